//! Karyotype vocabulary, event patterns, the ISCN compiler and the
//! derivation-chain sex classifier.
//!
//! Four supporting ontologies are built once: `karyotype` (k), `human` (h),
//! `events` (e) and `base` (b). Compiled karyotypes live in the example
//! namespace (iexs) and import all four.
//!
//! A karyotype class states where it came from with `b:derivedFrom` and
//! what happened to it with `e:hasDirectEvent` cardinality restrictions.
//! Constitutional changes sit inside the derivation (the karyotype was
//! derived from an already abnormal one); acquired changes sit at the top.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::iscn::{
    computed_count, infer_base_complement, parse_iscn, validate_count, ChromosomeId, CopyChange, IscnError, IscnEvent,
    IscnKaryotype, SexChromosome,
};
use crate::owl::{Axiom, ClassExpression, EntityId, Ontology, OwlError};

pub const PURL_ROOT: &str = "http://www.purl.org/captau/karyotype/";
pub const EXAMPLES_IRI: &str = "http://www.purl.org/captau/karyotype/iscnexamples_subset";
pub const EXAMPLES_PREFIX: &str = "iexs";

#[derive(Debug, Error)]
pub enum KaryotypeError {
    #[error(transparent)]
    Iscn(#[from] IscnError),
    #[error(transparent)]
    Owl(#[from] OwlError),
    #[error("structural event {event} (event {event_index}) has no ontology model")]
    UnsupportedStructuralEvent { event_index: usize, event: String },
    #[error("derivation reaches both {0} and {1}")]
    ConflictingBases(EntityId, EntityId),
}

fn iri(name: &str) -> String {
    format!("{PURL_ROOT}{name}")
}

fn namespace(name: &str) -> String {
    format!("{PURL_ROOT}{name}#")
}

/// Entities and ontologies every compiled karyotype refers to.
#[derive(Debug)]
pub struct KaryotypeVocabulary {
    pub karyotype_ontology: Ontology,
    pub human: Ontology,
    pub events: Ontology,
    pub base: Ontology,

    pub karyotype: EntityId,
    pub human_chromosome: EntityId,
    pub human_autosome: EntityId,
    pub human_sex_chromosome: EntityId,
    pub event: EntityId,
    pub deletion: EntityId,
    pub addition: EntityId,
    pub k46_xx: EntityId,
    pub k46_xy: EntityId,
    pub k46_xn: EntityId,
    pub derived_from: EntityId,
    pub has_direct_event: EntityId,

    pub example_root: EntityId,
    pub male_karyotype: EntityId,
    pub female_karyotype: EntityId,
}

/// Class for one human chromosome, e.g. `h:HumanChromosome22`.
pub fn chromosome_entity(chromosome: ChromosomeId) -> EntityId {
    EntityId::new("h", format!("HumanChromosome{chromosome}"))
}

/// The chromosome pattern: one class per chromosome, filed under the
/// autosome or sex-chromosome parent.
fn define_chromosome(
    human: &mut Ontology,
    chromosome: ChromosomeId,
    autosome: &EntityId,
    sex_chromosome: &EntityId,
) -> Result<(), OwlError> {
    let parent = if chromosome.is_sex_chromosome() { sex_chromosome } else { autosome };
    human.define_class(
        chromosome_entity(chromosome),
        Some(&format!("Human chromosome {chromosome}")),
        None,
        vec![ClassExpression::named(parent)],
        vec![],
    )
}

impl KaryotypeVocabulary {
    fn build() -> Result<Self, OwlError> {
        let k = |local: &str| EntityId::new("k", local);
        let h = |local: &str| EntityId::new("h", local);
        let e = |local: &str| EntityId::new("e", local);
        let b = |local: &str| EntityId::new("b", local);
        let iexs = |local: &str| EntityId::new(EXAMPLES_PREFIX, local);

        let karyotype = k("Karyotype");
        let mut karyotype_ontology = Ontology::new(iri("karyotype"));
        karyotype_ontology.add_prefix("k", namespace("karyotype"))?;
        karyotype_ontology.define_class(karyotype.clone(), Some("Karyotype"), None, vec![], vec![])?;

        let human_chromosome = h("HumanChromosome");
        let human_autosome = h("HumanAutosome");
        let human_sex_chromosome = h("HumanSexChromosome");
        let mut human = Ontology::new(iri("human"));
        human.add_prefix("h", namespace("human"))?;
        human.define_class(human_chromosome.clone(), None, None, vec![], vec![])?;
        for parent in [&human_autosome, &human_sex_chromosome] {
            human.define_class(parent.clone(), None, None, vec![ClassExpression::named(&human_chromosome)], vec![])?;
        }
        for chromosome in ChromosomeId::all() {
            define_chromosome(&mut human, chromosome, &human_autosome, &human_sex_chromosome)?;
        }

        let event = e("Event");
        let deletion = e("Deletion");
        let addition = e("Addition");
        let has_direct_event = e("hasDirectEvent");
        let mut events = Ontology::new(iri("events"));
        events.add_prefix("e", namespace("events"))?;
        events.define_object_property(has_direct_event.clone(), false)?;
        events.define_class(event.clone(), None, None, vec![], vec![])?;
        for kind in [&deletion, &addition] {
            events.define_class(kind.clone(), None, None, vec![ClassExpression::named(&event)], vec![])?;
        }

        let derived_from = b("derivedFrom");
        let k46_xx = b("k46_XX");
        let k46_xy = b("k46_XY");
        let k46_xn = b("k46_XN");
        let mut base = Ontology::new(iri("base"));
        base.add_prefix("b", namespace("base"))?;
        base.import(&karyotype_ontology)?;
        base.define_object_property(derived_from.clone(), true)?;
        for (class, label) in [(&k46_xx, "The 46,XX karyotype"), (&k46_xy, "The 46,XY karyotype"), (&k46_xn, "The 46,XN karyotype")] {
            base.define_class(class.clone(), Some(label), None, vec![ClassExpression::named(&karyotype)], vec![])?;
        }

        Ok(KaryotypeVocabulary {
            karyotype_ontology,
            human,
            events,
            base,
            karyotype,
            human_chromosome,
            human_autosome,
            human_sex_chromosome,
            event,
            deletion,
            addition,
            k46_xx,
            k46_xy,
            k46_xn,
            derived_from,
            has_direct_event,
            example_root: iexs("ISCNExampleKaryotype_subset"),
            male_karyotype: iexs("MaleKaryotype"),
            female_karyotype: iexs("FemaleKaryotype"),
        })
    }

    pub fn chromosome(&self, chromosome: ChromosomeId) -> EntityId {
        chromosome_entity(chromosome)
    }

    pub fn derived(&self, filler: ClassExpression) -> ClassExpression {
        ClassExpression::some(&self.derived_from, filler)
    }
}

/// The shared vocabulary, built on first use.
pub fn vocabulary() -> &'static KaryotypeVocabulary {
    static VOCABULARY: OnceLock<KaryotypeVocabulary> = OnceLock::new();
    VOCABULARY.get_or_init(|| KaryotypeVocabulary::build().expect("karyotype vocabulary is well formed"))
}

fn event_pattern(kind: &EntityId, n: u32, chromosome: &EntityId) -> ClassExpression {
    let v = vocabulary();
    ClassExpression::exactly(
        n,
        &v.has_direct_event,
        ClassExpression::and(vec![ClassExpression::named(kind), ClassExpression::named(chromosome)]),
    )
}

/// `n` losses of `chromosome`. `n = 0` is accepted but says the karyotype
/// has no such loss.
pub fn deletion_pattern(n: u32, chromosome: &EntityId) -> ClassExpression {
    event_pattern(&vocabulary().deletion, n, chromosome)
}

/// `n` gains of `chromosome`.
pub fn addition_pattern(n: u32, chromosome: &EntityId) -> ClassExpression {
    event_pattern(&vocabulary().addition, n, chromosome)
}

/// A karyotype class compiled from an ISCN string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KaryotypeDefinition {
    pub id: EntityId,
    pub iscn: String,
    /// A `b:derivedFrom` restriction, possibly nested.
    pub base: ClassExpression,
    pub acquired_events: Vec<ClassExpression>,
}

impl KaryotypeDefinition {
    pub fn label(&self) -> String {
        format!("The {} karyotype", self.iscn)
    }

    /// Example root, base, then acquired events.
    pub fn supers(&self) -> Vec<ClassExpression> {
        let mut supers = vec![ClassExpression::named(&vocabulary().example_root), self.base.clone()];
        supers.extend(self.acquired_events.iter().cloned());
        supers
    }

    pub fn add_to(&self, ontology: &mut Ontology, comment: Option<&str>) -> Result<(), OwlError> {
        ontology.define_class(self.id.clone(), Some(&self.label()), comment, self.supers(), vec![])
    }
}

/// Class name for an ISCN string: `k` plus the string with commas turned
/// into underscores, e.g. `k45_XX_-22`.
pub fn karyotype_entity(iscn: &str) -> EntityId {
    EntityId::new(EXAMPLES_PREFIX, format!("k{}", iscn.replace(',', "_")))
}

/// Pattern restrictions for a run of numerical events. Repeats of the same
/// change on the same chromosome are merged into one count, in order of
/// first appearance.
fn event_restrictions(events: impl IntoIterator<Item = (CopyChange, ChromosomeId)>) -> Vec<ClassExpression> {
    let mut counts: Vec<((CopyChange, ChromosomeId), u32)> = Vec::new();
    for key in events {
        match counts.iter_mut().find(|(k, _)| *k == key) {
            Some((_, n)) => *n += 1,
            None => counts.push((key, 1)),
        }
    }
    counts
        .into_iter()
        .map(|((change, chromosome), n)| {
            let class = chromosome_entity(chromosome);
            match change {
                CopyChange::Gain => addition_pattern(n, &class),
                CopyChange::Loss => deletion_pattern(n, &class),
            }
        })
        .collect()
}

/// Compiles a parsed karyotype into its class definition.
pub fn compile_karyotype(k: &IscnKaryotype) -> Result<KaryotypeDefinition, KaryotypeError> {
    let v = vocabulary();
    if !validate_count(k) {
        return Err(IscnError::CountMismatch {
            declared: k.declared_count,
            computed: computed_count(k),
        }
        .into());
    }
    let mut constitutional = Vec::new();
    let mut acquired = Vec::new();
    for (i, event) in k.events.iter().enumerate() {
        match event {
            IscnEvent::Numerical {
                change,
                chromosome,
                constitutional: true,
            } => constitutional.push((*change, *chromosome)),
            IscnEvent::Numerical { change, chromosome, .. } => acquired.push((*change, *chromosome)),
            IscnEvent::Structural(_) => {
                return Err(KaryotypeError::UnsupportedStructuralEvent {
                    event_index: i,
                    event: event.to_string(),
                })
            }
        }
    }
    let constitutional = event_restrictions(constitutional);
    let complement = infer_base_complement(k)?;

    let base = if complement.needs_generic_base {
        let mut parts = vec![v.derived(ClassExpression::named(&v.k46_xn))];
        let letters = complement.sex_letters.len() as u32;
        if letters < 2 {
            parts.push(deletion_pattern(2 - letters, &v.human_sex_chromosome));
        } else if letters > 2 {
            parts.push(addition_pattern(letters - 2, &v.human_sex_chromosome));
        }
        parts.extend(constitutional);
        if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            v.derived(ClassExpression::and(parts))
        }
    } else {
        let root = if complement.sex_letters.contains(&SexChromosome::Y) {
            &v.k46_xy
        } else {
            &v.k46_xx
        };
        let root = v.derived(ClassExpression::named(root));
        if constitutional.is_empty() {
            root
        } else {
            let mut parts = vec![root];
            parts.extend(constitutional);
            v.derived(ClassExpression::and(parts))
        }
    };

    Ok(KaryotypeDefinition {
        id: karyotype_entity(&k.raw),
        iscn: k.raw.clone(),
        base,
        acquired_events: event_restrictions(acquired),
    })
}

/// Named classes reached by following `b:derivedFrom` restrictions through
/// conjunctions. `b:derivedFrom` is transitive, so every class on the
/// chain is an ancestor of the karyotype.
pub fn derivation_bases(expr: &ClassExpression) -> BTreeSet<EntityId> {
    fn walk(expr: &ClassExpression, derived_from: &EntityId, out: &mut BTreeSet<EntityId>) {
        match expr {
            ClassExpression::Some { property, filler } if property == derived_from => match filler.as_ref() {
                ClassExpression::Named(id) => {
                    out.insert(id.clone());
                }
                other => walk(other, derived_from, out),
            },
            ClassExpression::And(ops) => ops.iter().for_each(|op| walk(op, derived_from, out)),
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    walk(expr, &vocabulary().derived_from, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SexClass {
    Male,
    Female,
    Unknown,
}

impl SexClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SexClass::Male => "male",
            SexClass::Female => "female",
            SexClass::Unknown => "unknown",
        }
    }
}

impl fmt::Display for SexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sex of a class whose derivation reaches `bases`, or which is itself
/// `class`. Mirrors `MaleKaryotype ≡ k46_XY or (derivedFrom some k46_XY)`
/// and its female counterpart.
fn sex_of(class: Option<&EntityId>, mut bases: BTreeSet<EntityId>) -> Result<SexClass, KaryotypeError> {
    let v = vocabulary();
    if let Some(class) = class {
        bases.insert(class.clone());
    }
    match (bases.contains(&v.k46_xy), bases.contains(&v.k46_xx)) {
        (true, true) => Err(KaryotypeError::ConflictingBases(v.k46_xx.clone(), v.k46_xy.clone())),
        (true, false) => Ok(SexClass::Male),
        (false, true) => Ok(SexClass::Female),
        (false, false) => Ok(SexClass::Unknown),
    }
}

pub fn classify_sex(d: &KaryotypeDefinition) -> Result<SexClass, KaryotypeError> {
    sex_of(Some(&d.id), derivation_bases(&d.base))
}

/// Classifies an arbitrary expression such as a base restriction.
pub fn classify_expression(expr: &ClassExpression) -> Result<SexClass, KaryotypeError> {
    let named = match expr {
        ClassExpression::Named(id) => Some(id),
        _ => None,
    };
    sex_of(named, derivation_bases(expr))
}

/// Classifies a class of `ontology` from its asserted superclasses.
pub fn classify_class(ontology: &Ontology, class: &EntityId) -> Result<SexClass, KaryotypeError> {
    let mut bases = BTreeSet::new();
    for axiom in ontology.axioms() {
        if let Axiom::SubClassOf { sub, sup } = axiom {
            if sub == class {
                bases.extend(derivation_bases(sup));
            }
        }
    }
    sex_of(Some(class), bases)
}

/// Parses, compiles and classifies in one step.
pub fn classify_iscn(iscn: &str) -> Result<SexClass, KaryotypeError> {
    classify_sex(&compile_karyotype(&parse_iscn(iscn)?)?)
}

/// The example ontology skeleton: prefixes, imports of the four supporting
/// ontologies and the example root class. Compiled karyotypes are added to
/// this.
pub fn example_skeleton() -> Result<Ontology, OwlError> {
    let v = vocabulary();
    let mut o = Ontology::new(EXAMPLES_IRI)
        .with_comment("Example karyotypes from the ISCN, modelled with the human karyotype ontology.");
    o.add_prefix(EXAMPLES_PREFIX, format!("{EXAMPLES_IRI}#"))?;
    o.import(&v.karyotype_ontology)?;
    o.define_class(v.example_root.clone(), None, None, vec![ClassExpression::named(&v.karyotype)], vec![])?;
    o.import(&v.base)?;
    o.import(&v.events)?;
    o.import(&v.human)?;
    Ok(o)
}

/// The five example karyotypes with their comments.
pub const EXAMPLE_KARYOTYPES: [(&str, &str); 5] = [
    ("45,XX,-22", "A karyotype with monosomy 22."),
    ("45,X,-X", "A tumor karyotype in a female with loss of one X chromosome."),
    ("46,XY,+21c,-21", "Acquired loss of one chromosome 21 in a patient with Down syndrome."),
    ("45,X", "A karyotype with one X chromosome (Turner syndrome)."),
    ("46,Xc,+21", "Tumor cells with an acquired extra chromosome 21 in a patient with Turner syndrome."),
];

fn sex_definition(base: &EntityId) -> ClassExpression {
    let v = vocabulary();
    ClassExpression::or(vec![ClassExpression::named(base), v.derived(ClassExpression::named(base))])
}

/// The full example ontology: skeleton, the five compiled karyotypes, their
/// disjointness and the male and female karyotype definitions.
pub fn build_example_ontology() -> Result<Ontology, KaryotypeError> {
    let v = vocabulary();
    let mut o = example_skeleton()?;
    let mut members = Vec::new();
    for (iscn, comment) in EXAMPLE_KARYOTYPES {
        let definition = compile_karyotype(&parse_iscn(iscn)?)?;
        definition.add_to(&mut o, Some(comment))?;
        members.push(definition.id);
    }
    o.as_disjoint(members)?;
    o.define_class(v.male_karyotype.clone(), None, None, vec![], vec![sex_definition(&v.k46_xy)])?;
    o.define_class(v.female_karyotype.clone(), None, None, vec![], vec![sex_definition(&v.k46_xx)])?;
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::owl::EntityKind;

    fn compile(s: &str) -> KaryotypeDefinition {
        compile_karyotype(&parse_iscn(s).unwrap()).unwrap()
    }

    #[test]
    fn vocabulary_has_24_generated_chromosomes() {
        let v = vocabulary();
        let chromosomes: Vec<_> = v
            .human
            .declarations()
            .filter(|(id, _)| id.local.starts_with("HumanChromosome") && id.local != "HumanChromosome")
            .collect();
        assert_eq!(chromosomes.len(), 24);
        for n in 1..=22u8 {
            let sub = chromosome_entity(ChromosomeId::Autosome(n));
            assert!(v.human.axioms().contains(&Axiom::SubClassOf {
                sub,
                sup: ClassExpression::named(&v.human_autosome)
            }));
        }
        for c in [ChromosomeId::X, ChromosomeId::Y] {
            assert!(v.human.axioms().contains(&Axiom::SubClassOf {
                sub: chromosome_entity(c),
                sup: ClassExpression::named(&v.human_sex_chromosome)
            }));
        }
    }

    #[test]
    fn derived_from_is_transitive() {
        let v = vocabulary();
        assert!(v.base.axioms().contains(&Axiom::TransitiveProperty(v.derived_from.clone())));
        assert_eq!(v.base.kind_of(&v.derived_from), Some(EntityKind::ObjectProperty));
    }

    #[test]
    fn deletion_pattern_expansion() {
        let v = vocabulary();
        let chr22 = EntityId::new("h", "HumanChromosome22");
        assert_eq!(
            deletion_pattern(1, &chr22),
            ClassExpression::Exactly {
                n: 1,
                property: EntityId::new("e", "hasDirectEvent"),
                filler: Box::new(ClassExpression::And(vec![
                    ClassExpression::Named(EntityId::new("e", "Deletion")),
                    ClassExpression::Named(chr22),
                ])),
            }
        );
        assert_eq!(
            deletion_pattern(0, &v.chromosome(ChromosomeId::Autosome(1))).to_string(),
            "e:hasDirectEvent exactly 0 (e:Deletion and h:HumanChromosome1)"
        );
        assert_eq!(
            addition_pattern(2, &v.chromosome(ChromosomeId::X)).to_string(),
            "e:hasDirectEvent exactly 2 (e:Addition and h:HumanChromosomeX)"
        );
    }

    #[test]
    fn repeated_events_merge() {
        let d = compile("48,XY,+21,+21");
        assert_eq!(d.acquired_events, [addition_pattern(2, &chromosome_entity(ChromosomeId::Autosome(21)))]);
    }

    #[test]
    fn entity_names() {
        assert_eq!(karyotype_entity("46,XY,+21c,-21").to_string(), "iexs:k46_XY_+21c_-21");
        assert_eq!(karyotype_entity("45,X").local, "k45_X");
    }

    #[test]
    fn structural_events_are_unsupported() {
        let err = compile_karyotype(&parse_iscn("46,XY,t(1;3)(p22;q13.1)").unwrap()).unwrap_err();
        assert!(matches!(err, KaryotypeError::UnsupportedStructuralEvent { event_index: 0, .. }));
    }

    #[test]
    fn bad_count_is_rejected() {
        let err = compile_karyotype(&parse_iscn("44,XX,-22").unwrap()).unwrap_err();
        assert!(matches!(err, KaryotypeError::Iscn(IscnError::CountMismatch { .. })));
    }

    #[test]
    fn generic_bases() {
        let v = vocabulary();
        let d = compile("47,XYY");
        assert_eq!(
            d.base,
            v.derived(ClassExpression::and(vec![
                v.derived(ClassExpression::named(&v.k46_xn)),
                addition_pattern(1, &v.human_sex_chromosome),
            ]))
        );
        assert_eq!(classify_sex(&d).unwrap(), SexClass::Unknown);
    }

    #[test]
    fn derivation_bases_cases() {
        let v = vocabulary();
        assert!(derivation_bases(&ClassExpression::named(&v.k46_xx)).is_empty());
        assert_eq!(derivation_bases(&compile("46,XY,+21c,-21").base), BTreeSet::from([v.k46_xy.clone()]));
        assert_eq!(derivation_bases(&compile("45,X").base), BTreeSet::from([v.k46_xn.clone()]));
    }

    #[test]
    fn sex_verdicts() {
        assert_eq!(classify_iscn("45,X,-Y").unwrap(), SexClass::Male);
        assert_eq!(classify_iscn("45,X,-X").unwrap(), SexClass::Female);
        assert_eq!(classify_iscn("45,X").unwrap(), SexClass::Unknown);
        assert_eq!(classify_iscn("46,XY,+21c,-21").unwrap(), SexClass::Male);
        assert_eq!(classify_iscn("46,Xc,+21").unwrap(), SexClass::Unknown);
        let v = vocabulary();
        assert_eq!(classify_expression(&ClassExpression::named(&v.k46_xy)).unwrap(), SexClass::Male);
    }

    #[test]
    fn conflicting_bases() {
        let v = vocabulary();
        let expr = ClassExpression::and(vec![
            v.derived(ClassExpression::named(&v.k46_xx)),
            v.derived(ClassExpression::named(&v.k46_xy)),
        ]);
        assert!(matches!(classify_expression(&expr), Err(KaryotypeError::ConflictingBases(..))));
    }

    #[test]
    fn example_ontology_shape() {
        let o = build_example_ontology().unwrap();
        let local: Vec<_> = o.declarations().filter(|(id, _)| id.prefix == EXAMPLES_PREFIX).collect();
        assert_eq!(local.len(), 8);
        o.check_references().unwrap();
        let imports: Vec<_> = o
            .axioms()
            .iter()
            .filter_map(|a| match a {
                Axiom::Import(iri) => Some(iri.as_str()),
                _ => None,
            })
            .collect();
        assert_eq!(imports.len(), 4);
    }
}
