//! Lexer, parser, and printer for the supported usda subset.
//!
//! The subset covers what layered scene descriptions for rigid-body scenes
//! actually use: `def`/`over`/`class` prim specs, typed schema names, applied
//! API schema lists, `inherits` arcs, attributes over a fixed set of value
//! datatypes, relationships, and `subLayers` metadata. The full grammar lives
//! in `docs/usda-subset.md`. Anything outside the subset is a parse error —
//! there is no silent skipping of unknown constructs.

mod parse;
mod path;
mod print;
mod token;
mod value;

pub use parse::{parse_layer, parse_source, ParseError};
pub use path::{PathError, PrimPath};
pub use print::{print_layer, print_value};
pub use token::{tokenize, LexError, Token, TokenKind};
pub use value::{parse_value_text, AttributeValue, Datatype};

/// One property opinion inside a prim spec: a typed attribute or a
/// relationship to other prim paths.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Property {
    pub name: String,
    pub value: AttributeValue,
}

/// Attribute vs. relationship, derived from the value's datatype.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyKind {
    Attribute,
    Relationship,
}

impl Property {
    pub fn kind(&self) -> PropertyKind {
        match self.value {
            AttributeValue::PathList(_) => PropertyKind::Relationship,
            _ => PropertyKind::Attribute,
        }
    }
}

/// Prim specifier keyword. `class` declares reusable prototypes (cls prims),
/// `over` declares opinions without existence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Specifier {
    Def,
    Over,
    Class,
}

/// One prim spec as authored in a single layer.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimSpec {
    pub specifier: Specifier,
    /// Typed schema name; `None` when the prim is untyped.
    pub typed_schema: Option<String>,
    pub path: PrimPath,
    pub children: Vec<PrimSpec>,
    /// Applied API schema names, in declaration order.
    pub api_schemas: Vec<String>,
    /// Inherits arc targets, in declaration order.
    pub inherits: Vec<PrimPath>,
    pub properties: Vec<Property>,
}

impl PrimSpec {
    /// The last path segment.
    pub fn name(&self) -> &str {
        self.path.leaf().expect("prim spec paths are never root")
    }
}

/// One parsed usda document: sublayer references plus root prim specs.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// Sublayer file identifiers, strongest first, as authored.
    pub sublayer_refs: Vec<String>,
    pub root_prims: Vec<PrimSpec>,
    /// Identifier of where this layer came from (path or synthetic name).
    pub source_id: String,
}

impl Layer {
    pub fn new(source_id: impl Into<String>) -> Self {
        Layer {
            sublayer_refs: Vec::new(),
            root_prims: Vec::new(),
            source_id: source_id.into(),
        }
    }

    /// All prim specs in the layer, depth-first.
    pub fn iter_prims(&self) -> impl Iterator<Item = &PrimSpec> {
        let mut stack: Vec<&PrimSpec> = self.root_prims.iter().rev().collect();
        std::iter::from_fn(move || {
            let next = stack.pop()?;
            stack.extend(next.children.iter().rev());
            Some(next)
        })
    }
}
