//! A small OWL-style ontology model with a Manchester syntax writer.
//!
//! Axioms are kept as an ordered list rather than a set: a literate
//! ontology is read as a document, so frames and annotations come out in
//! the order they were written.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

/// A prefixed name such as `h:HumanChromosome22`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId {
    pub prefix: String,
    pub local: String,
}

impl EntityId {
    pub fn new(prefix: impl Into<String>, local: impl Into<String>) -> Self {
        let local = local.into();
        assert!(!local.is_empty(), "entity local names must be non-empty");
        EntityId {
            prefix: prefix.into(),
            local,
        }
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix, self.local)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClassExpression {
    Named(EntityId),
    And(Vec<ClassExpression>),
    Or(Vec<ClassExpression>),
    Some {
        property: EntityId,
        filler: Box<ClassExpression>,
    },
    Exactly {
        n: u32,
        property: EntityId,
        filler: Box<ClassExpression>,
    },
}

impl ClassExpression {
    pub fn named(id: &EntityId) -> Self {
        ClassExpression::Named(id.clone())
    }

    /// Panics on fewer than two operands.
    pub fn and(operands: Vec<ClassExpression>) -> Self {
        assert!(operands.len() >= 2, "intersection needs at least two operands");
        ClassExpression::And(operands)
    }

    /// Panics on fewer than two operands.
    pub fn or(operands: Vec<ClassExpression>) -> Self {
        assert!(operands.len() >= 2, "union needs at least two operands");
        ClassExpression::Or(operands)
    }

    pub fn some(property: &EntityId, filler: ClassExpression) -> Self {
        ClassExpression::Some {
            property: property.clone(),
            filler: Box::new(filler),
        }
    }

    pub fn exactly(n: u32, property: &EntityId, filler: ClassExpression) -> Self {
        ClassExpression::Exactly {
            n,
            property: property.clone(),
            filler: Box::new(filler),
        }
    }

    fn visit_refs<'a>(&'a self, out: &mut Vec<(EntityKind, &'a EntityId)>) {
        match self {
            ClassExpression::Named(id) => out.push((EntityKind::Class, id)),
            ClassExpression::And(ops) | ClassExpression::Or(ops) => {
                ops.iter().for_each(|op| op.visit_refs(out));
            }
            ClassExpression::Some { property, filler } | ClassExpression::Exactly { property, filler, .. } => {
                out.push((EntityKind::ObjectProperty, property));
                filler.visit_refs(out);
            }
        }
    }
}

/// Manchester rendering. Operands and fillers that are not plain names are
/// parenthesized, so the printed form parses back unambiguously.
impl fmt::Display for ClassExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn nested(f: &mut fmt::Formatter<'_>, e: &ClassExpression) -> fmt::Result {
            match e {
                ClassExpression::Named(id) => write!(f, "{id}"),
                other => write!(f, "({other})"),
            }
        }
        match self {
            ClassExpression::Named(id) => write!(f, "{id}"),
            ClassExpression::And(ops) | ClassExpression::Or(ops) => {
                let keyword = if matches!(self, ClassExpression::And(_)) { " and " } else { " or " };
                for (i, op) in ops.iter().enumerate() {
                    if i > 0 {
                        f.write_str(keyword)?;
                    }
                    nested(f, op)?;
                }
                Ok(())
            }
            ClassExpression::Some { property, filler } => {
                write!(f, "{property} some ")?;
                nested(f, filler)
            }
            ClassExpression::Exactly { n, property, filler } => {
                write!(f, "{property} exactly {n} ")?;
                nested(f, filler)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityKind {
    Class,
    ObjectProperty,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityKind::Class => f.write_str("Class"),
            EntityKind::ObjectProperty => f.write_str("ObjectProperty"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnnotationProperty {
    Label,
    Comment,
}

impl AnnotationProperty {
    fn curie(self) -> &'static str {
        match self {
            AnnotationProperty::Label => "rdfs:label",
            AnnotationProperty::Comment => "rdfs:comment",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Axiom {
    Declaration { kind: EntityKind, id: EntityId },
    SubClassOf { sub: EntityId, sup: ClassExpression },
    EquivalentTo { class: EntityId, expr: ClassExpression },
    DisjointClasses(Vec<EntityId>),
    Annotation {
        subject: EntityId,
        property: AnnotationProperty,
        value: String,
    },
    TransitiveProperty(EntityId),
    Import(String),
}

impl Axiom {
    fn refs(&self) -> Vec<(EntityKind, &EntityId)> {
        let mut out = Vec::new();
        match self {
            // annotation subjects may be of either kind; checked separately
            Axiom::Declaration { .. } | Axiom::Import(_) | Axiom::Annotation { .. } => {}
            Axiom::SubClassOf { sub, sup } => {
                out.push((EntityKind::Class, sub));
                sup.visit_refs(&mut out);
            }
            Axiom::EquivalentTo { class, expr } => {
                out.push((EntityKind::Class, class));
                expr.visit_refs(&mut out);
            }
            Axiom::DisjointClasses(members) => {
                out.extend(members.iter().map(|m| (EntityKind::Class, m)));
            }
            Axiom::TransitiveProperty(id) => out.push((EntityKind::ObjectProperty, id)),
        }
        out
    }

    /// Entity whose frame this axiom is written in, if any.
    fn frame_subject(&self) -> Option<&EntityId> {
        match self {
            Axiom::SubClassOf { sub, .. } => Some(sub),
            Axiom::EquivalentTo { class, .. } => Some(class),
            Axiom::Annotation { subject, .. } => Some(subject),
            Axiom::TransitiveProperty(id) => Some(id),
            Axiom::Declaration { id, .. } => Some(id),
            Axiom::DisjointClasses(_) | Axiom::Import(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OwlError {
    #[error("{0} is already declared")]
    DuplicateEntity(EntityId),
    #[error("{kind} {entity} is not declared here or in an import")]
    UnresolvedReference { entity: EntityId, kind: EntityKind },
    #[error("prefix {0:?} has no namespace")]
    UnknownPrefix(String),
    #[error("prefix {prefix:?} is already bound to {existing}")]
    PrefixConflict { prefix: String, existing: String },
    #[error("disjointness needs at least two classes, got {0}")]
    TooFewMembers(usize),
}

/// An ordered collection of axioms with its prefix table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    iri: String,
    comment: Option<String>,
    prefixes: Vec<(String, String)>,
    axioms: Vec<Axiom>,
    /// Declarations visible through imports.
    imported: BTreeMap<EntityId, EntityKind>,
}

impl Ontology {
    pub fn new(iri: impl Into<String>) -> Self {
        Ontology {
            iri: iri.into(),
            comment: None,
            prefixes: Vec::new(),
            axioms: Vec::new(),
            imported: BTreeMap::new(),
        }
    }

    pub fn with_comment(mut self, comment: impl Into<String>) -> Self {
        self.comment = Some(comment.into());
        self
    }

    pub fn iri(&self) -> &str {
        &self.iri
    }

    pub fn comment(&self) -> Option<&str> {
        self.comment.as_deref()
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn prefixes(&self) -> &[(String, String)] {
        &self.prefixes
    }

    pub fn add_prefix(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) -> Result<(), OwlError> {
        let prefix = prefix.into();
        let namespace = namespace.into();
        match self.prefixes.iter().find(|(p, _)| *p == prefix) {
            Some((_, existing)) if *existing == namespace => Ok(()),
            Some((_, existing)) => Err(OwlError::PrefixConflict {
                prefix,
                existing: existing.clone(),
            }),
            None => {
                self.prefixes.push((prefix, namespace));
                Ok(())
            }
        }
    }

    pub fn namespace(&self, prefix: &str) -> Option<&str> {
        self.prefixes
            .iter()
            .find(|(p, _)| p == prefix)
            .map(|(_, ns)| ns.as_str())
    }

    /// Records an import and makes `other`'s declarations (including those
    /// it imports) and prefixes visible here.
    pub fn import(&mut self, other: &Ontology) -> Result<(), OwlError> {
        for (prefix, ns) in &other.prefixes {
            self.add_prefix(prefix.clone(), ns.clone())?;
        }
        for (id, kind) in other.declarations() {
            self.imported.insert(id.clone(), kind);
        }
        for (id, kind) in &other.imported {
            self.imported.insert(id.clone(), *kind);
        }
        self.axioms.push(Axiom::Import(other.iri.clone()));
        Ok(())
    }

    /// Locally declared entities in declaration order.
    pub fn declarations(&self) -> impl Iterator<Item = (&EntityId, EntityKind)> {
        self.axioms.iter().filter_map(|a| match a {
            Axiom::Declaration { kind, id } => Some((id, *kind)),
            _ => None,
        })
    }

    fn local_kind(&self, id: &EntityId) -> Option<EntityKind> {
        self.declarations().find(|(d, _)| *d == id).map(|(_, k)| k)
    }

    /// Kind of `id`, looking through imports.
    pub fn kind_of(&self, id: &EntityId) -> Option<EntityKind> {
        self.local_kind(id).or_else(|| self.imported.get(id).copied())
    }

    pub fn is_declared(&self, id: &EntityId) -> bool {
        self.kind_of(id).is_some()
    }

    pub fn declare(&mut self, kind: EntityKind, id: EntityId) -> Result<(), OwlError> {
        if self.is_declared(&id) {
            return Err(OwlError::DuplicateEntity(id));
        }
        if self.namespace(&id.prefix).is_none() {
            return Err(OwlError::UnknownPrefix(id.prefix));
        }
        self.axioms.push(Axiom::Declaration { kind, id });
        Ok(())
    }

    /// Appends, in order: the declaration, the label and comment
    /// annotations when given, one SubClassOf per super and one
    /// EquivalentTo per equivalent.
    pub fn define_class(
        &mut self,
        id: EntityId,
        label: Option<&str>,
        comment: Option<&str>,
        supers: Vec<ClassExpression>,
        equivalents: Vec<ClassExpression>,
    ) -> Result<(), OwlError> {
        self.declare(EntityKind::Class, id.clone())?;
        for (property, value) in [(AnnotationProperty::Label, label), (AnnotationProperty::Comment, comment)] {
            if let Some(value) = value {
                self.axioms.push(Axiom::Annotation {
                    subject: id.clone(),
                    property,
                    value: value.to_owned(),
                });
            }
        }
        for sup in supers {
            self.axioms.push(Axiom::SubClassOf { sub: id.clone(), sup });
        }
        for expr in equivalents {
            self.axioms.push(Axiom::EquivalentTo { class: id.clone(), expr });
        }
        Ok(())
    }

    pub fn define_object_property(&mut self, id: EntityId, transitive: bool) -> Result<(), OwlError> {
        self.declare(EntityKind::ObjectProperty, id.clone())?;
        if transitive {
            self.axioms.push(Axiom::TransitiveProperty(id));
        }
        Ok(())
    }

    /// Appends one DisjointClasses axiom, keeping member order.
    pub fn as_disjoint(&mut self, members: Vec<EntityId>) -> Result<(), OwlError> {
        if members.len() < 2 {
            return Err(OwlError::TooFewMembers(members.len()));
        }
        for m in &members {
            self.require(EntityKind::Class, m)?;
        }
        self.axioms.push(Axiom::DisjointClasses(members));
        Ok(())
    }

    pub fn push_axiom(&mut self, axiom: Axiom) {
        self.axioms.push(axiom);
    }

    fn require(&self, kind: EntityKind, id: &EntityId) -> Result<(), OwlError> {
        match self.kind_of(id) {
            Some(k) if k == kind => Ok(()),
            _ => Err(OwlError::UnresolvedReference {
                entity: id.clone(),
                kind,
            }),
        }
    }

    /// Checks that every referenced entity is declared with the right kind
    /// and that every prefix in use has a namespace.
    pub fn check_references(&self) -> Result<(), OwlError> {
        for axiom in &self.axioms {
            for (kind, id) in axiom.refs() {
                self.require(kind, id)?;
            }
            if let Axiom::Annotation { subject, .. } = axiom {
                if !self.is_declared(subject) {
                    return Err(OwlError::UnresolvedReference {
                        entity: subject.clone(),
                        kind: EntityKind::Class,
                    });
                }
            }
            if let Some(id) = axiom.frame_subject() {
                if self.namespace(&id.prefix).is_none() {
                    return Err(OwlError::UnknownPrefix(id.prefix.clone()));
                }
            }
        }
        Ok(())
    }
}

fn quote(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[derive(Default)]
struct Frame<'a> {
    annotations: Vec<(AnnotationProperty, &'a str)>,
    equivalents: Vec<&'a ClassExpression>,
    supers: Vec<&'a ClassExpression>,
    transitive: bool,
}

fn write_section(out: &mut String, heading: &str, items: &[String]) {
    if items.is_empty() {
        return;
    }
    let _ = writeln!(out, "    {heading}:");
    let _ = writeln!(out, "        {}", items.join(",\n        "));
}

fn write_frame(out: &mut String, kind: EntityKind, id: &EntityId, frame: &Frame<'_>) {
    let _ = writeln!(out, "{kind}: {id}");
    let annotations: Vec<String> = frame
        .annotations
        .iter()
        .map(|(p, v)| format!("{} {}", p.curie(), quote(v)))
        .collect();
    write_section(out, "Annotations", &annotations);
    if frame.transitive {
        write_section(out, "Characteristics", &["Transitive".to_owned()]);
    }
    let equivalents: Vec<String> = frame.equivalents.iter().map(ToString::to_string).collect();
    write_section(out, "EquivalentTo", &equivalents);
    let supers: Vec<String> = frame.supers.iter().map(ToString::to_string).collect();
    write_section(out, "SubClassOf", &supers);
    out.push('\n');
}

fn collect_frames(o: &Ontology) -> BTreeMap<&EntityId, Frame<'_>> {
    let mut frames: BTreeMap<&EntityId, Frame<'_>> = BTreeMap::new();
    for axiom in &o.axioms {
        match axiom {
            Axiom::Annotation { subject, property, value } => {
                frames.entry(subject).or_default().annotations.push((*property, value));
            }
            Axiom::SubClassOf { sub, sup } => frames.entry(sub).or_default().supers.push(sup),
            Axiom::EquivalentTo { class, expr } => frames.entry(class).or_default().equivalents.push(expr),
            Axiom::TransitiveProperty(id) => frames.entry(id).or_default().transitive = true,
            _ => {}
        }
    }
    frames
}

/// Serializes the ontology: prefixes, the ontology header with imports and
/// comment, one frame per local declaration in declaration order, then
/// frames for imported entities that received axioms here, then
/// DisjointClasses axioms in insertion order.
pub fn emit_manchester(o: &Ontology) -> Result<String, OwlError> {
    o.check_references()?;
    let mut out = String::new();
    for (prefix, ns) in &o.prefixes {
        let _ = writeln!(out, "Prefix: {prefix}: <{ns}>");
    }
    if !o.prefixes.is_empty() {
        out.push('\n');
    }
    let _ = writeln!(out, "Ontology: <{}>", o.iri);
    for axiom in &o.axioms {
        if let Axiom::Import(iri) = axiom {
            let _ = writeln!(out, "    Import: <{iri}>");
        }
    }
    if let Some(comment) = &o.comment {
        write_section(&mut out, "Annotations", &[format!("rdfs:comment {}", quote(comment))]);
    }
    out.push('\n');

    let mut frames = collect_frames(o);
    let mut seen = BTreeSet::new();
    for (id, kind) in o.declarations() {
        seen.insert(id);
        let frame = frames.remove(id).unwrap_or_default();
        write_frame(&mut out, kind, id, &frame);
    }
    for axiom in &o.axioms {
        if let Some(id) = axiom.frame_subject() {
            if seen.insert(id) {
                if let Some(frame) = frames.remove(id) {
                    let kind = o.kind_of(id).expect("references were checked");
                    write_frame(&mut out, kind, id, &frame);
                }
            }
        }
    }
    for axiom in &o.axioms {
        if let Axiom::DisjointClasses(members) = axiom {
            let members: Vec<String> = members.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "DisjointClasses:");
            let _ = writeln!(out, "    {}", members.join(",\n    "));
            out.push('\n');
        }
    }
    // single trailing newline
    while out.ends_with("\n\n") {
        out.pop();
    }
    Ok(out)
}

/// The frame for one entity, as it appears inside `emit_manchester`.
pub fn emit_frame(o: &Ontology, id: &EntityId) -> Result<String, OwlError> {
    o.check_references()?;
    let kind = o.kind_of(id).ok_or_else(|| OwlError::UnresolvedReference {
        entity: id.clone(),
        kind: EntityKind::Class,
    })?;
    let mut frames = collect_frames(o);
    let frame = frames.remove(id).unwrap_or_default();
    let mut out = String::new();
    write_frame(&mut out, kind, id, &frame);
    out.pop();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Ontology {
        let mut o = Ontology::new("http://example.org/t");
        o.add_prefix("t", "http://example.org/t#").unwrap();
        o.define_object_property(EntityId::new("t", "p"), true).unwrap();
        o
    }

    #[test]
    fn define_class_appends_in_order() {
        let mut o = fixture();
        let a = EntityId::new("t", "A");
        let b = EntityId::new("t", "B");
        let p = EntityId::new("t", "p");
        o.define_class(b.clone(), None, None, vec![], vec![]).unwrap();
        let before = o.axioms().len();
        o.define_class(
            a.clone(),
            Some("label"),
            Some("comment"),
            vec![ClassExpression::named(&b), ClassExpression::some(&p, ClassExpression::named(&b))],
            vec![ClassExpression::exactly(1, &p, ClassExpression::named(&b))],
        )
        .unwrap();
        let added = &o.axioms()[before..];
        assert_eq!(added.len(), 6);
        assert!(matches!(&added[0], Axiom::Declaration { kind: EntityKind::Class, id } if *id == a));
        assert!(matches!(&added[1], Axiom::Annotation { property: AnnotationProperty::Label, .. }));
        assert!(matches!(&added[2], Axiom::Annotation { property: AnnotationProperty::Comment, .. }));
        assert!(matches!(&added[3], Axiom::SubClassOf { .. }));
        assert!(matches!(&added[5], Axiom::EquivalentTo { .. }));
    }

    #[test]
    fn bare_class_is_declaration_only() {
        let mut o = fixture();
        let before = o.axioms().len();
        o.define_class(EntityId::new("t", "C"), None, None, vec![], vec![]).unwrap();
        assert_eq!(o.axioms().len(), before + 1);
    }

    #[test]
    fn duplicate_entity() {
        let mut o = fixture();
        let c = EntityId::new("t", "C");
        o.define_class(c.clone(), None, None, vec![], vec![]).unwrap();
        assert_eq!(
            o.define_class(c.clone(), None, None, vec![], vec![]),
            Err(OwlError::DuplicateEntity(c))
        );
    }

    #[test]
    fn empty_ontology_header_only() {
        let mut o = Ontology::new("http://example.org/e");
        assert_eq!(emit_manchester(&o).unwrap(), "Ontology: <http://example.org/e>\n");
        o.add_prefix("e", "http://example.org/e#").unwrap();
        assert_eq!(
            emit_manchester(&o).unwrap(),
            "Prefix: e: <http://example.org/e#>\n\nOntology: <http://example.org/e>\n"
        );
    }

    #[test]
    fn disjointness_checks() {
        let mut o = fixture();
        let a = EntityId::new("t", "A");
        let b = EntityId::new("t", "B");
        o.define_class(a.clone(), None, None, vec![], vec![]).unwrap();
        assert_eq!(o.as_disjoint(vec![a.clone()]), Err(OwlError::TooFewMembers(1)));
        assert!(matches!(
            o.as_disjoint(vec![a.clone(), b.clone()]),
            Err(OwlError::UnresolvedReference { .. })
        ));
        o.define_class(b.clone(), None, None, vec![], vec![]).unwrap();
        o.as_disjoint(vec![b.clone(), a.clone()]).unwrap();
        assert_eq!(o.axioms().last(), Some(&Axiom::DisjointClasses(vec![b, a])));
    }

    #[test]
    fn unresolved_reference_fails_emission() {
        let mut o = fixture();
        let ghost = EntityId::new("t", "Ghost");
        o.define_class(EntityId::new("t", "A"), None, None, vec![ClassExpression::named(&ghost)], vec![])
            .unwrap();
        assert_eq!(
            emit_manchester(&o),
            Err(OwlError::UnresolvedReference { entity: ghost, kind: EntityKind::Class })
        );
    }

    #[test]
    fn property_used_as_class_is_unresolved() {
        let mut o = fixture();
        let p = EntityId::new("t", "p");
        o.define_class(EntityId::new("t", "A"), None, None, vec![ClassExpression::named(&p)], vec![])
            .unwrap();
        assert!(matches!(emit_manchester(&o), Err(OwlError::UnresolvedReference { .. })));
    }

    #[test]
    fn imports_make_declarations_visible() {
        let base = fixture();
        let mut o = Ontology::new("http://example.org/u");
        o.add_prefix("u", "http://example.org/u#").unwrap();
        o.import(&base).unwrap();
        let p = EntityId::new("t", "p");
        assert_eq!(o.kind_of(&p), Some(EntityKind::ObjectProperty));
        assert_eq!(
            o.define_object_property(p.clone(), false),
            Err(OwlError::DuplicateEntity(p))
        );
        let text = emit_manchester(&o).unwrap();
        assert!(text.contains("    Import: <http://example.org/t>\n"));
    }

    #[test]
    fn prefix_conflicts() {
        let mut o = Ontology::new("x");
        o.add_prefix("a", "http://a#").unwrap();
        o.add_prefix("a", "http://a#").unwrap();
        assert!(matches!(o.add_prefix("a", "http://b#"), Err(OwlError::PrefixConflict { .. })));
        assert_eq!(
            o.declare(EntityKind::Class, EntityId::new("z", "C")),
            Err(OwlError::UnknownPrefix("z".into()))
        );
    }

    #[test]
    fn expression_printing() {
        let p = EntityId::new("e", "hasDirectEvent");
        let d = EntityId::new("b", "derivedFrom");
        let inner = ClassExpression::and(vec![
            ClassExpression::Named(EntityId::new("e", "Deletion")),
            ClassExpression::Named(EntityId::new("h", "HumanChromosome22")),
        ]);
        assert_eq!(
            ClassExpression::exactly(1, &p, inner.clone()).to_string(),
            "e:hasDirectEvent exactly 1 (e:Deletion and h:HumanChromosome22)"
        );
        let nested = ClassExpression::some(
            &d,
            ClassExpression::and(vec![
                ClassExpression::some(&d, ClassExpression::Named(EntityId::new("b", "k46_XY"))),
                ClassExpression::exactly(1, &p, inner),
            ]),
        );
        assert_eq!(
            nested.to_string(),
            "b:derivedFrom some ((b:derivedFrom some b:k46_XY) and (e:hasDirectEvent exactly 1 (e:Deletion and h:HumanChromosome22)))"
        );
    }

    #[test]
    fn strings_are_escaped() {
        assert_eq!(quote(r#"a "b" \c"#), r#""a \"b\" \\c""#);
    }
}
