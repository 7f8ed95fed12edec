//! usdkg — scene descriptions in, knowledge graphs out.
//!
//! This crate parses a well-defined subset of textual USD (`.usda`), composes
//! layered scene descriptions into a single stage, and translates that stage
//! into a knowledge graph that a robot control stack can query: which prims
//! are parts of which objects, what is physically connected to what, and
//! whether an articulated container is currently opened or closed.
//!
//! The pipeline runs in four steps, each of which is usable on its own:
//!
//! ```text
//!   .usda text ──parse──▶ Layer ──compose──▶ Stage ──translate──▶ Graph
//!                                                                   │
//!                               queries / watch ◀──materialize──────┘
//! ```
//!
//! * [`usda`] — lexer, recursive-descent parser, and printer for the usda
//!   subset (see `docs/usda-subset.md` for the grammar).
//! * [`compose`] — sublayer flattening and inherits resolution; produces a
//!   [`compose::Stage`] of composed prims with "strongest opinion wins"
//!   property resolution.
//! * [`schema`] — registry of typed and applied API schemas with property
//!   signatures, used for validation and for quality binding during
//!   translation.
//! * [`tbox`] — the built-in terminology (concepts, property axioms,
//!   classification rules), a loader for user extensions, and a generator
//!   that renders any terminology as a taggable usda sublayer.
//! * [`translate`] — turns a composed stage into assertional facts: parthood
//!   edges, schema edges, relationship edges, and per-prim quality
//!   individuals carrying attribute values.
//! * [`reason`] — forward-chaining materialization to a least fixpoint
//!   (subproperties, symmetry, transitivity, subclass and domain/range
//!   lifting, threshold classification), consistency checking, and
//!   open/closed state lifting for containers.
//! * [`kg`] — the graph value itself, a deterministic line-oriented text
//!   format, statistics, joint-state updates, and a watch engine that turns
//!   update streams into reclassification events.

pub mod compose;
pub mod iri;
pub mod kg;
pub mod reason;
pub mod schema;
pub mod tbox;
pub mod translate;
pub mod usda;

pub use iri::Iri;
pub use kg::{Fact, Graph, LiteralValue};
