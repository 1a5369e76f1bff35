//! Literate ontology tooling.
//!
//! * [`lentic`] converts a literate source between its document-centric
//!   and code-centric views.
//! * [`iscn`] parses ISCN karyotype strings.
//! * [`owl`] is a small ordered OWL model with a Manchester syntax writer.
//! * [`karyotype`] compiles karyotypes into class definitions and
//!   classifies their sex from the derivation chain.

pub mod iscn;
pub mod karyotype;
pub mod lentic;
pub mod owl;

pub use iscn::{parse_iscn, IscnError, IscnKaryotype};
pub use karyotype::{build_example_ontology, classify_sex, compile_karyotype, KaryotypeDefinition, KaryotypeError, SexClass};
pub use lentic::{to_code, to_document, validate, LenticError, LiterateConfig, LiterateSource, ViewKind};
pub use owl::{emit_manchester, ClassExpression, EntityId, Ontology, OwlError};
