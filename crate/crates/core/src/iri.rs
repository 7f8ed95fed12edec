//! IRI newtype shared by the terminology, translator, and graph modules.
//!
//! IRIs are kept as opaque validated strings. The only structure this module
//! understands is the percent-encoding used when scene paths are embedded in
//! fragments, and the prefix arithmetic needed to join namespaces with local
//! names.

use std::fmt;

use thiserror::Error;

use crate::usda::PrimPath;

/// A validated IRI. Nonempty and contains a scheme separator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum IriError {
    #[error("IRI is empty")]
    Empty,
    #[error("IRI `{0}` has no scheme separator")]
    NoScheme(String),
    #[error("IRI `{0}` contains a character IRIs exclude")]
    ForbiddenCharacter(String),
}

impl Iri {
    /// Validates and wraps an IRI string.
    pub fn new(s: impl Into<String>) -> Result<Self, IriError> {
        let s = s.into();
        if s.is_empty() {
            return Err(IriError::Empty);
        }
        if !s.contains(':') {
            return Err(IriError::NoScheme(s));
        }
        // Whitespace and controls are excluded outright; the rest are the
        // characters RFC 3986 leaves no place for. Rejecting them here is what
        // lets the graph text format quote IRIs without an escape syntax.
        if s.chars().any(|c| {
            c.is_whitespace()
                || c.is_control()
                || matches!(c, '<' | '>' | '"' | '|' | '\\' | '^' | '`' | '{' | '}')
        }) {
            return Err(IriError::ForbiddenCharacter(s));
        }
        Ok(Iri(s))
    }

    /// Concatenates a namespace IRI (ending in `#` or `/`) with a local name.
    pub fn in_namespace(namespace: &str, local: &str) -> Result<Self, IriError> {
        Iri::new(format!("{namespace}{local}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The local name: the part after the last `#`, or after the last `/`
    /// when there is no fragment. Falls back to the whole IRI.
    pub fn local_name(&self) -> &str {
        if let Some(i) = self.0.rfind('#') {
            &self.0[i + 1..]
        } else if let Some(i) = self.0.rfind('/') {
            &self.0[i + 1..]
        } else {
            &self.0
        }
    }

    /// The namespace part: everything up to and including the separator that
    /// [`local_name`](Self::local_name) splits on.
    pub fn namespace(&self) -> &str {
        let local = self.local_name();
        &self.0[..self.0.len() - local.len()]
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Percent-encodes every byte outside the RFC 3986 unreserved set.
pub fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'.' | b'_' | b'~' => {
                out.push(b as char)
            }
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out
}

/// Mints the individual IRI for a scene path: percent-encoded path segments
/// joined with `.`, attached to `base` as a fragment (or appended directly
/// when `base` already ends in `#` or `/`).
///
/// Segment names cannot contain `.`, so the joined form is injective and
/// [`decode_path`] inverts it exactly.
pub fn iri_of_path(base: &str, path: &PrimPath) -> Result<Iri, IriError> {
    let joined = path
        .segments()
        .iter()
        .map(|s| percent_encode(s))
        .collect::<Vec<_>>()
        .join(".");
    if base.ends_with('#') || base.ends_with('/') {
        Iri::new(format!("{base}{joined}"))
    } else if joined.is_empty() {
        Iri::new(base)
    } else {
        Iri::new(format!("{base}#{joined}"))
    }
}

/// Inverse of [`iri_of_path`] for IRIs minted under `base`. Returns `None`
/// when the IRI is outside `base` or its fragment is not an encoded path.
pub fn decode_path(base: &str, iri: &Iri) -> Option<PrimPath> {
    let text = iri.as_str();
    let rest = if base.ends_with('#') || base.ends_with('/') {
        text.strip_prefix(base)?
    } else if text == base {
        return Some(PrimPath::root());
    } else {
        text.strip_prefix(base)?.strip_prefix('#')?
    };
    let mut path = PrimPath::root();
    for segment in rest.split('.') {
        path = path.child(&percent_decode(segment)?).ok()?;
    }
    Some(path)
}

/// Inverse of [`percent_encode`]. Returns `None` on malformed escapes.
pub fn percent_decode(s: &str) -> Option<String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes.get(i + 1..i + 3)?;
            let hex = std::str::from_utf8(hex).ok()?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}
