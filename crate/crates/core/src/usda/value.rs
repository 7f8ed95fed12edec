//! Attribute value datatypes and payloads.
//!
//! Numeric literals are held as `f64` regardless of the declared precision;
//! the declared datatype is kept alongside (it becomes the literal type tag
//! in the knowledge graph). Values need total equality and ordering so fact
//! sets stay deterministic, so floats compare by `total_cmp` and equate by
//! bit pattern — the grammar cannot produce NaN, and `-0.0` survives printing.

use std::cmp::Ordering;
use std::fmt;

use super::path::PrimPath;

/// Datatype tag of an attribute or relationship value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datatype {
    Token,
    TokenArray,
    String,
    Float,
    Double,
    Float3,
    Float4,
    Point3f,
    Color3fArray,
    FloatArray,
    Quatf,
    Matrix4d,
    Bool,
    /// Relationship targets (`rel` properties).
    RelPaths,
}

impl Datatype {
    /// The keyword as it appears in usda source, e.g. `color3f[]`.
    pub fn keyword(self) -> &'static str {
        match self {
            Datatype::Token => "token",
            Datatype::TokenArray => "token[]",
            Datatype::String => "string",
            Datatype::Float => "float",
            Datatype::Double => "double",
            Datatype::Float3 => "float3",
            Datatype::Float4 => "float4",
            Datatype::Point3f => "point3f",
            Datatype::Color3fArray => "color3f[]",
            Datatype::FloatArray => "float[]",
            Datatype::Quatf => "quatf",
            Datatype::Matrix4d => "matrix4d",
            Datatype::Bool => "bool",
            Datatype::RelPaths => "rel",
        }
    }

    /// Identifier-safe tag used in knowledge-graph literals, e.g. `color3fArray`.
    pub fn tag(self) -> &'static str {
        match self {
            Datatype::Token => "token",
            Datatype::TokenArray => "tokenArray",
            Datatype::String => "string",
            Datatype::Float => "float",
            Datatype::Double => "double",
            Datatype::Float3 => "float3",
            Datatype::Float4 => "float4",
            Datatype::Point3f => "point3f",
            Datatype::Color3fArray => "color3fArray",
            Datatype::FloatArray => "floatArray",
            Datatype::Quatf => "quatf",
            Datatype::Matrix4d => "matrix4d",
            Datatype::Bool => "bool",
            Datatype::RelPaths => "rel",
        }
    }

    /// Inverse of [`keyword`](Self::keyword).
    pub fn from_keyword(kw: &str) -> Option<Self> {
        Some(match kw {
            "token" => Datatype::Token,
            "token[]" => Datatype::TokenArray,
            "string" => Datatype::String,
            "float" => Datatype::Float,
            "double" => Datatype::Double,
            "float3" => Datatype::Float3,
            "float4" => Datatype::Float4,
            "point3f" => Datatype::Point3f,
            "color3f[]" => Datatype::Color3fArray,
            "float[]" => Datatype::FloatArray,
            "quatf" => Datatype::Quatf,
            "matrix4d" => Datatype::Matrix4d,
            "bool" => Datatype::Bool,
            "rel" => Datatype::RelPaths,
            _ => return None,
        })
    }

    /// Inverse of [`tag`](Self::tag).
    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "tokenArray" => Datatype::TokenArray,
            "color3fArray" => Datatype::Color3fArray,
            "floatArray" => Datatype::FloatArray,
            other => return Datatype::from_keyword(other),
        })
    }
}

/// A parsed attribute or relationship value. The variant is the datatype, so
/// payload arity is correct by construction (a `float3` is always 3 numbers).
#[derive(Debug, Clone)]
pub enum AttributeValue {
    Token(String),
    TokenArray(Vec<String>),
    Str(String),
    Float(f64),
    Double(f64),
    Float3([f64; 3]),
    Float4([f64; 4]),
    Point3f([f64; 3]),
    Color3fArray(Vec<[f64; 3]>),
    FloatArray(Vec<f64>),
    Quatf([f64; 4]),
    Matrix4d([[f64; 4]; 4]),
    Bool(bool),
    PathList(Vec<PrimPath>),
}

impl AttributeValue {
    pub fn datatype(&self) -> Datatype {
        match self {
            AttributeValue::Token(_) => Datatype::Token,
            AttributeValue::TokenArray(_) => Datatype::TokenArray,
            AttributeValue::Str(_) => Datatype::String,
            AttributeValue::Float(_) => Datatype::Float,
            AttributeValue::Double(_) => Datatype::Double,
            AttributeValue::Float3(_) => Datatype::Float3,
            AttributeValue::Float4(_) => Datatype::Float4,
            AttributeValue::Point3f(_) => Datatype::Point3f,
            AttributeValue::Color3fArray(_) => Datatype::Color3fArray,
            AttributeValue::FloatArray(_) => Datatype::FloatArray,
            AttributeValue::Quatf(_) => Datatype::Quatf,
            AttributeValue::Matrix4d(_) => Datatype::Matrix4d,
            AttributeValue::Bool(_) => Datatype::Bool,
            AttributeValue::PathList(_) => Datatype::RelPaths,
        }
    }

    /// The scalar payload for `float`/`double` values.
    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttributeValue::Float(n) | AttributeValue::Double(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            AttributeValue::Token(s) | AttributeValue::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_paths(&self) -> Option<&[PrimPath]> {
        match self {
            AttributeValue::PathList(p) => Some(p),
            _ => None,
        }
    }

    /// Flattens the numeric payload for ordering/equality purposes.
    fn numeric_parts(&self) -> Vec<f64> {
        match self {
            AttributeValue::Float(n) | AttributeValue::Double(n) => vec![*n],
            AttributeValue::Float3(v) | AttributeValue::Point3f(v) => v.to_vec(),
            AttributeValue::Float4(v) | AttributeValue::Quatf(v) => v.to_vec(),
            AttributeValue::Color3fArray(rows) => rows.iter().flatten().copied().collect(),
            AttributeValue::FloatArray(v) => v.clone(),
            AttributeValue::Matrix4d(m) => m.iter().flatten().copied().collect(),
            _ => Vec::new(),
        }
    }

    fn textual_parts(&self) -> Vec<String> {
        match self {
            AttributeValue::Token(s) | AttributeValue::Str(s) => vec![s.clone()],
            AttributeValue::TokenArray(v) => v.clone(),
            AttributeValue::Bool(b) => vec![b.to_string()],
            AttributeValue::PathList(p) => p.iter().map(|p| p.to_string()).collect(),
            _ => Vec::new(),
        }
    }
}

impl PartialEq for AttributeValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AttributeValue {}

impl PartialOrd for AttributeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AttributeValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let tag = self.datatype().cmp(&other.datatype());
        if tag != Ordering::Equal {
            return tag;
        }
        let a_nums = self.numeric_parts();
        let b_nums = other.numeric_parts();
        let by_len = a_nums.len().cmp(&b_nums.len());
        if by_len != Ordering::Equal {
            return by_len;
        }
        for (a, b) in a_nums.iter().zip(&b_nums) {
            let c = a.total_cmp(b);
            if c != Ordering::Equal {
                return c;
            }
        }
        self.textual_parts().cmp(&other.textual_parts())
    }
}

fn write_float(f: &mut fmt::Formatter<'_>, n: f64) -> fmt::Result {
    // `{}` on f64 prints the shortest string that parses back to the same
    // bits, which is exactly what the round-trip contract needs.
    write!(f, "{n}")
}

fn write_triple(f: &mut fmt::Formatter<'_>, v: &[f64; 3]) -> fmt::Result {
    write!(f, "(")?;
    for (i, n) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write_float(f, *n)?;
    }
    write!(f, ")")
}

fn escape_quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

/// Canonical source form of a value, e.g. `(1, 0, 0)` or `["a", "b"]`.
/// Printing then reparsing with the same datatype yields an equal value.
impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Token(s) | AttributeValue::Str(s) => {
                write!(f, "\"{}\"", escape_quoted(s))
            }
            AttributeValue::TokenArray(v) => {
                write!(f, "[")?;
                for (i, s) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "\"{}\"", escape_quoted(s))?;
                }
                write!(f, "]")
            }
            AttributeValue::Float(n) | AttributeValue::Double(n) => write_float(f, *n),
            AttributeValue::Float3(v) | AttributeValue::Point3f(v) => write_triple(f, v),
            AttributeValue::Float4(v) | AttributeValue::Quatf(v) => {
                write!(f, "(")?;
                for (i, n) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_float(f, *n)?;
                }
                write!(f, ")")
            }
            AttributeValue::Color3fArray(rows) => {
                write!(f, "[")?;
                for (i, row) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_triple(f, row)?;
                }
                write!(f, "]")
            }
            AttributeValue::FloatArray(v) => {
                write!(f, "[")?;
                for (i, n) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write_float(f, *n)?;
                }
                write!(f, "]")
            }
            AttributeValue::Matrix4d(m) => {
                write!(f, "(")?;
                for (i, row) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "(")?;
                    for (j, n) in row.iter().enumerate() {
                        if j > 0 {
                            write!(f, ", ")?;
                        }
                        write_float(f, *n)?;
                    }
                    write!(f, ")")?;
                }
                write!(f, ")")
            }
            AttributeValue::Bool(b) => write!(f, "{b}"),
            AttributeValue::PathList(paths) => {
                if paths.len() == 1 {
                    return write!(f, "<{}>", paths[0]);
                }
                write!(f, "[")?;
                for (i, p) in paths.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "<{p}>")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Parses a standalone value text against an expected datatype. This is the
/// same grammar the layer parser uses for the right-hand side of `=`, exposed
/// for literal decoding in the knowledge-graph text format.
pub fn parse_value_text(
    text: &str,
    datatype: Datatype,
) -> Result<AttributeValue, super::parse::ParseError> {
    super::parse::parse_value_standalone(text, datatype)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datatype_keyword_round_trip() {
        for dt in [
            Datatype::Token,
            Datatype::TokenArray,
            Datatype::String,
            Datatype::Float,
            Datatype::Double,
            Datatype::Float3,
            Datatype::Float4,
            Datatype::Point3f,
            Datatype::Color3fArray,
            Datatype::FloatArray,
            Datatype::Quatf,
            Datatype::Matrix4d,
            Datatype::Bool,
            Datatype::RelPaths,
        ] {
            assert_eq!(Datatype::from_keyword(dt.keyword()), Some(dt));
            assert_eq!(Datatype::from_tag(dt.tag()), Some(dt));
        }
    }

    #[test]
    fn float_equality_is_bitwise() {
        assert_eq!(AttributeValue::Float(2.79), AttributeValue::Float(2.79));
        assert_ne!(AttributeValue::Float(0.0), AttributeValue::Float(-0.0));
        assert_ne!(AttributeValue::Float(1.0), AttributeValue::Double(1.0));
    }

    #[test]
    fn display_is_shortest_round_trip_form() {
        assert_eq!(AttributeValue::Float(2.79).to_string(), "2.79");
        assert_eq!(AttributeValue::Float3([1.0, 0.0, 0.5]).to_string(), "(1, 0, 0.5)");
        assert_eq!(
            AttributeValue::TokenArray(vec!["xformOp:transform".into()]).to_string(),
            "[\"xformOp:transform\"]"
        );
    }
}
