//! Ontology-based exchange of clinical record statements between health
//! information systems that share nothing but a canonical ontology.
//!
//! The crate provides:
//!
//! - [`model`]: a small description-logic fragment with a deterministic text
//!   format, and [`graph`]: triple graphs with pattern matching.
//! - [`reasoner`]: TBox classification and ABox saturation/recognition over
//!   that fragment, including a forward-chaining rule engine with
//!   deterministic skolem individuals.
//! - [`db2onto`]: translation of relational schemas (plus a terminology-code
//!   table) into application ontologies and row-lifting import links.
//! - [`mapping`]: integration mappings against the canonical ontology —
//!   code-based class mapping inference, ontology-path enumeration, path
//!   mapping candidates and their compilation to rules.
//! - [`transfer`]: the five-step pipeline that lets a receiving system
//!   interpret records lifted by a sending system, ending in a rendered
//!   document.

pub mod db2onto;
pub mod graph;
pub mod mapping;
pub mod model;
pub mod reasoner;
pub mod transfer;

pub use graph::{Binding, Graph, PatternPredicate, PatternTerm, Term, Triple, TriplePattern, Var};
pub use model::{
    Axiom, ClassExpression, Comparator, Datatype, Literal, Name, Ontology, ParseError,
    PropertyDecl, PropertyRange,
};
pub use reasoner::{HornRule, SubsumptionLattice};
