//! Absolute prim paths (`/world/box`).

use std::fmt;

use thiserror::Error;

/// An absolute prim path. The pseudo-root `/` is the empty segment list; it
/// addresses no prim but is a valid parent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PrimPath {
    segments: Vec<String>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("prim path `{0}` must start with `/`")]
    NotAbsolute(String),
    #[error("prim path `{0}` contains an empty segment")]
    EmptySegment(String),
    #[error("invalid prim name `{0}`: must be a letter or `_` followed by letters, digits, or `_`")]
    InvalidName(String),
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PrimPath {
    /// The pseudo-root `/`.
    pub fn root() -> Self {
        PrimPath::default()
    }

    /// Parses an absolute path like `/world/box`.
    pub fn parse(text: &str) -> Result<Self, PathError> {
        let Some(rest) = text.strip_prefix('/') else {
            return Err(PathError::NotAbsolute(text.to_string()));
        };
        if rest.is_empty() {
            return Ok(PrimPath::root());
        }
        let mut segments = Vec::new();
        for seg in rest.split('/') {
            if seg.is_empty() {
                return Err(PathError::EmptySegment(text.to_string()));
            }
            if !valid_name(seg) {
                return Err(PathError::InvalidName(seg.to_string()));
            }
            segments.push(seg.to_string());
        }
        Ok(PrimPath { segments })
    }

    /// Appends one segment, validating the name.
    pub fn child(&self, name: &str) -> Result<Self, PathError> {
        if !valid_name(name) {
            return Err(PathError::InvalidName(name.to_string()));
        }
        let mut segments = self.segments.clone();
        segments.push(name.to_string());
        Ok(PrimPath { segments })
    }

    /// Parent path; `None` for the pseudo-root.
    pub fn parent(&self) -> Option<Self> {
        if self.segments.is_empty() {
            return None;
        }
        Some(PrimPath {
            segments: self.segments[..self.segments.len() - 1].to_vec(),
        })
    }

    /// Last segment; `None` for the pseudo-root.
    pub fn leaf(&self) -> Option<&str> {
        self.segments.last().map(String::as_str)
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn is_root(&self) -> bool {
        self.segments.is_empty()
    }

    /// True when `self` is `other` or nested anywhere below it.
    pub fn starts_with(&self, other: &PrimPath) -> bool {
        self.segments.len() >= other.segments.len()
            && self.segments[..other.segments.len()] == other.segments[..]
    }
}

impl fmt::Display for PrimPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segments.is_empty() {
            return f.write_str("/");
        }
        for seg in &self.segments {
            write!(f, "/{seg}")?;
        }
        Ok(())
    }
}
