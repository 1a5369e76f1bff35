//! Shared test material: literate-source generators and hand-written
//! transcriptions of the example karyotype class blocks.
//!
//! The transcriptions are built from raw `ClassExpression` constructors so
//! they stay independent of the pattern functions they are compared with.

#![allow(dead_code)]

use std::path::PathBuf;

use litonto::lentic::{LiterateSource, ViewKind};
use litonto::owl::{ClassExpression, EntityId};
use proptest::prelude::*;

pub const BEGIN: &str = "\\begin{code}";
pub const END: &str = "\\end{code}";

pub fn fixture(name: &str) -> PathBuf {
    // also included from the cli crate, so resolve relative to the workspace
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

#[derive(Debug, Clone)]
pub enum Block {
    Prose(Vec<String>),
    Blank(String),
    Code(Vec<String>),
}

fn is_marker_like(line: &str) -> bool {
    [BEGIN, END].iter().any(|m| line == *m || line == format!(";; {m}"))
}

pub fn prose_line() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => "[A-Za-z][A-Za-z0-9 ,.|()/-]{0,30}",
        1 => "[A-Za-z0-9 ]{0,10}".prop_map(|s| format!(";; {s}")),
        1 => Just(";;".to_owned()),
        1 => Just(format!("{BEGIN} ")),
        1 => Just(format!(" {END}")),
        1 => Just("\\section{Karyotypes}".to_owned()),
    ]
}

pub fn code_line() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => "[ -~]{0,30}".prop_filter("not a marker", |l| !is_marker_like(l)),
        2 => "[a-z ]{0,20}".prop_map(|s| format!(";; {s}")),
        1 => Just(";;".to_owned()),
        1 => Just(String::new()),
        1 => Just(format!("{END}x")),
        1 => Just(format!(";;{BEGIN}")),
    ]
}

pub fn block() -> impl Strategy<Value = Block> {
    prop_oneof![
        3 => prop::collection::vec(prose_line(), 1..5).prop_map(Block::Prose),
        1 => prop_oneof![Just(String::new()), Just("   ".to_owned())].prop_map(Block::Blank),
        2 => prop::collection::vec(code_line(), 0..6).prop_map(Block::Code),
    ]
}

pub fn render_blocks(blocks: &[Block]) -> Vec<String> {
    let mut lines = Vec::new();
    for b in blocks {
        match b {
            Block::Prose(ls) => lines.extend(ls.iter().cloned()),
            Block::Blank(l) => lines.push(l.clone()),
            Block::Code(ls) => {
                lines.push(BEGIN.to_owned());
                lines.extend(ls.iter().cloned());
                lines.push(END.to_owned());
            }
        }
    }
    lines
}

/// Valid document-centric sources: random interleavings of prose, blank
/// lines and fenced code, including code lines that begin with the comment
/// prefix and near-miss markers.
pub fn document_source() -> impl Strategy<Value = LiterateSource> {
    (prop::collection::vec(block(), 0..20), any::<bool>()).prop_map(|(blocks, trailing)| {
        LiterateSource::new(ViewKind::DocumentCentric, render_blocks(&blocks), trailing).unwrap()
    })
}

fn named(prefix: &str, local: &str) -> ClassExpression {
    ClassExpression::Named(EntityId::new(prefix, local))
}

fn derived_from(filler: ClassExpression) -> ClassExpression {
    ClassExpression::Some {
        property: EntityId::new("b", "derivedFrom"),
        filler: Box::new(filler),
    }
}

fn event(n: u32, kind: &str, chromosome: &str) -> ClassExpression {
    ClassExpression::Exactly {
        n,
        property: EntityId::new("e", "hasDirectEvent"),
        filler: Box::new(ClassExpression::And(vec![named("e", kind), named("h", chromosome)])),
    }
}

/// (ISCN string, class local name, superclasses)
pub type Transcription = (&'static str, &'static str, Vec<ClassExpression>);

/// Superclass lists of the five example karyotype classes, written out by
/// hand from their definitions.
pub fn example_class_transcriptions() -> Vec<Transcription> {
    let root = || named("iexs", "ISCNExampleKaryotype_subset");
    let turner_base = || {
        derived_from(ClassExpression::And(vec![
            derived_from(named("b", "k46_XN")),
            event(1, "Deletion", "HumanSexChromosome"),
        ]))
    };
    vec![
        (
            "45,XX,-22",
            "k45_XX_-22",
            vec![root(), derived_from(named("b", "k46_XX")), event(1, "Deletion", "HumanChromosome22")],
        ),
        (
            "45,X,-X",
            "k45_X_-X",
            vec![root(), derived_from(named("b", "k46_XX")), event(1, "Deletion", "HumanChromosomeX")],
        ),
        (
            "46,XY,+21c,-21",
            "k46_XY_+21c_-21",
            vec![
                root(),
                derived_from(ClassExpression::And(vec![
                    derived_from(named("b", "k46_XY")),
                    event(1, "Addition", "HumanChromosome21"),
                ])),
                event(1, "Deletion", "HumanChromosome21"),
            ],
        ),
        ("45,X", "k45_X", vec![root(), turner_base()]),
        (
            "46,Xc,+21",
            "k46_Xc_+21",
            vec![root(), turner_base(), event(1, "Addition", "HumanChromosome21")],
        ),
    ]
}

/// The seven karyotype strings used throughout the examples.
pub const CORPUS: [&str; 7] = ["45,X", "47,XYY", "45,XX,-22", "45,X,-X", "46,XY,+21c,-21", "46,Xc,+21", "45,X,-Y"];
