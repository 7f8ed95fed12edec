//! Recursive-descent parser from token stream to [`Layer`].
//!
//! The parser is strict: constructs outside the documented subset are
//! reported as errors with their source position, never skipped. Prim paths
//! are built while descending, so every returned [`PrimSpec`] carries its
//! absolute path.

use thiserror::Error;

use super::path::{PathError, PrimPath};
use super::token::{tokenize, LexError, Token, TokenKind};
use super::value::{AttributeValue, Datatype};
use super::{Layer, PrimSpec, Property, Specifier};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{line}:{column}: expected {expected}, found {found}")]
    UnexpectedToken {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{column}: unknown datatype keyword `{word}`")]
    UnknownDatatypeKeyword {
        line: usize,
        column: usize,
        word: String,
    },
    #[error("{line}:{column}: duplicate prim name at `{path}`")]
    DuplicatePrimName {
        line: usize,
        column: usize,
        path: String,
    },
    #[error("{line}:{column}: duplicate property `{name}` on `{path}`")]
    DuplicateProperty {
        line: usize,
        column: usize,
        path: String,
        name: String,
    },
    #[error("{line}:{column}: {datatype} value needs {expected} components, found {got}")]
    ArityMismatch {
        line: usize,
        column: usize,
        datatype: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{line}:{column}: malformed prim path: {source}")]
    MalformedPath {
        line: usize,
        column: usize,
        source: PathError,
    },
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek2(&self) -> &Token {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::UnexpectedToken {
            line: t.line,
            column: t.column,
            expected: expected.into(),
            found: t.kind.to_string(),
        }
    }

    fn at_punct(&self, c: char) -> bool {
        self.peek().kind == TokenKind::Punct(c)
    }

    fn expect_punct(&mut self, c: char) -> Result<Token, ParseError> {
        if self.at_punct(c) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(format!("`{c}`")))
        }
    }

    fn expect_string(&mut self, what: &str) -> Result<(String, Token), ParseError> {
        match &self.peek().kind {
            TokenKind::StringLit(_) => {
                let t = self.bump();
                let TokenKind::StringLit(s) = t.kind.clone() else {
                    unreachable!()
                };
                Ok((s, t))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn expect_number(&mut self) -> Result<f64, ParseError> {
        match self.peek().kind {
            TokenKind::NumberLit(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("number")),
        }
    }

    fn expect_path_ref(&mut self) -> Result<PrimPath, ParseError> {
        match &self.peek().kind {
            TokenKind::PathRef(text) => {
                let text = text.clone();
                let t = self.bump();
                PrimPath::parse(&text).map_err(|source| ParseError::MalformedPath {
                    line: t.line,
                    column: t.column,
                    source,
                })
            }
            _ => Err(self.unexpected("prim path like `</world/box>`")),
        }
    }

    /// `</a>` or `[</a>, </b>]`.
    fn parse_path_list(&mut self) -> Result<Vec<PrimPath>, ParseError> {
        if self.at_punct('[') {
            self.bump();
            let mut paths = Vec::new();
            while !self.at_punct(']') {
                paths.push(self.expect_path_ref()?);
                if self.at_punct(',') {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect_punct(']')?;
            Ok(paths)
        } else {
            Ok(vec![self.expect_path_ref()?])
        }
    }

    fn parse_layer_metadata(&mut self, layer: &mut Layer) -> Result<(), ParseError> {
        self.expect_punct('(')?;
        while !self.at_punct(')') {
            match self.peek().kind.word() {
                Some("subLayers") => {
                    self.bump();
                    self.expect_punct('=')?;
                    self.expect_punct('[')?;
                    while !self.at_punct(']') {
                        match &self.peek().kind {
                            TokenKind::AssetRef(id) | TokenKind::StringLit(id) => {
                                let id = id.clone();
                                let t = self.bump();
                                if layer.sublayer_refs.contains(&id) {
                                    return Err(ParseError::UnexpectedToken {
                                        line: t.line,
                                        column: t.column,
                                        expected: "distinct sublayer references".into(),
                                        found: format!("duplicate `{id}`"),
                                    });
                                }
                                layer.sublayer_refs.push(id);
                            }
                            _ => return Err(self.unexpected("asset reference like `@sub.usda@`")),
                        }
                        if self.at_punct(',') {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect_punct(']')?;
                }
                _ => return Err(self.unexpected("`subLayers` metadata")),
            }
        }
        self.expect_punct(')')?;
        Ok(())
    }

    fn parse_specifier(&mut self) -> Option<Specifier> {
        let spec = match self.peek().kind {
            TokenKind::Keyword("def") => Specifier::Def,
            TokenKind::Keyword("over") => Specifier::Over,
            TokenKind::Keyword("class") => Specifier::Class,
            _ => return None,
        };
        self.bump();
        Some(spec)
    }

    fn parse_prim(&mut self, parent: &PrimPath) -> Result<PrimSpec, ParseError> {
        let specifier = self
            .parse_specifier()
            .ok_or_else(|| self.unexpected("`def`, `over`, or `class`"))?;

        let typed_schema = match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                self.bump();
                Some(name)
            }
            _ => None,
        };

        let (name, name_token) = self.expect_string("prim name string")?;
        let path = parent
            .child(&name)
            .map_err(|source| ParseError::MalformedPath {
                line: name_token.line,
                column: name_token.column,
                source,
            })?;

        let mut prim = PrimSpec {
            specifier,
            typed_schema,
            path,
            children: Vec::new(),
            api_schemas: Vec::new(),
            inherits: Vec::new(),
            properties: Vec::new(),
        };

        if self.at_punct('(') {
            self.parse_prim_metadata(&mut prim)?;
        }

        self.expect_punct('{')?;
        while !self.at_punct('}') {
            if matches!(
                self.peek().kind,
                TokenKind::Keyword("def") | TokenKind::Keyword("over") | TokenKind::Keyword("class")
            ) {
                let child_token = self.peek().clone();
                let child = self.parse_prim(&prim.path)?;
                if prim.children.iter().any(|c| c.path == child.path) {
                    return Err(ParseError::DuplicatePrimName {
                        line: child_token.line,
                        column: child_token.column,
                        path: child.path.to_string(),
                    });
                }
                prim.children.push(child);
            } else {
                let prop_token = self.peek().clone();
                let property = self.parse_property()?;
                if prim.properties.iter().any(|p| p.name == property.name) {
                    return Err(ParseError::DuplicateProperty {
                        line: prop_token.line,
                        column: prop_token.column,
                        path: prim.path.to_string(),
                        name: property.name,
                    });
                }
                prim.properties.push(property);
            }
        }
        self.expect_punct('}')?;
        Ok(prim)
    }

    fn parse_prim_metadata(&mut self, prim: &mut PrimSpec) -> Result<(), ParseError> {
        self.expect_punct('(')?;
        while !self.at_punct(')') {
            // `prepend` is list-edit bookkeeping for full USD; in a single
            // layer it changes nothing, so it is accepted and dropped.
            if self.peek().kind == TokenKind::Keyword("prepend") {
                self.bump();
            }
            match self.peek().kind.word() {
                Some("apiSchemas") => {
                    self.bump();
                    self.expect_punct('=')?;
                    self.expect_punct('[')?;
                    while !self.at_punct(']') {
                        let (name, t) = self.expect_string("API schema name string")?;
                        if prim.api_schemas.contains(&name) {
                            return Err(ParseError::UnexpectedToken {
                                line: t.line,
                                column: t.column,
                                expected: "distinct API schema names".into(),
                                found: format!("duplicate `{name}`"),
                            });
                        }
                        prim.api_schemas.push(name);
                        if self.at_punct(',') {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect_punct(']')?;
                }
                Some("inherits") => {
                    self.bump();
                    self.expect_punct('=')?;
                    for target in self.parse_path_list()? {
                        if !prim.inherits.contains(&target) {
                            prim.inherits.push(target);
                        }
                    }
                }
                _ => return Err(self.unexpected("`apiSchemas` or `inherits` metadata")),
            }
        }
        self.expect_punct(')')?;
        Ok(())
    }

    fn parse_property(&mut self) -> Result<Property, ParseError> {
        // `uniform` only constrains animatability in full USD; accepted and
        // dropped here.
        if self.peek().kind == TokenKind::Keyword("uniform") {
            self.bump();
        }

        if self.peek().kind == TokenKind::Keyword("rel") {
            self.bump();
            let name = self.expect_property_name()?;
            self.expect_punct('=')?;
            let paths = self.parse_path_list()?;
            return Ok(Property {
                name,
                value: AttributeValue::PathList(paths),
            });
        }

        let dt_token = self.peek().clone();
        let word = match dt_token.kind.word() {
            Some(w) => w.to_string(),
            None => return Err(self.unexpected("datatype keyword or `rel`")),
        };
        self.bump();
        let mut keyword = word.clone();
        // Array datatypes arrive as `float` `[` `]`.
        if self.at_punct('[') && self.peek2().kind == TokenKind::Punct(']') {
            self.bump();
            self.bump();
            keyword.push_str("[]");
        }
        let datatype =
            Datatype::from_keyword(&keyword).ok_or(ParseError::UnknownDatatypeKeyword {
                line: dt_token.line,
                column: dt_token.column,
                word: keyword,
            })?;
        if datatype == Datatype::RelPaths {
            // `rel` is handled above; reaching here means someone wrote it
            // in array position or similar nonsense.
            return Err(self.unexpected("datatype keyword"));
        }

        let name = self.expect_property_name()?;
        self.expect_punct('=')?;
        let value = self.parse_value(datatype)?;
        Ok(Property { name, value })
    }

    fn expect_property_name(&mut self) -> Result<String, ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(w) | TokenKind::NsIdent(w) => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => Err(self.unexpected("property name")),
        }
    }

    /// `(n, n, n)`-style tuple with an exact component count.
    fn parse_number_tuple(
        &mut self,
        datatype: Datatype,
        expected: usize,
    ) -> Result<Vec<f64>, ParseError> {
        let open = self.expect_punct('(')?;
        let mut parts = Vec::new();
        while !self.at_punct(')') {
            parts.push(self.expect_number()?);
            if self.at_punct(',') {
                self.bump();
            } else {
                break;
            }
        }
        self.expect_punct(')')?;
        if parts.len() != expected {
            return Err(ParseError::ArityMismatch {
                line: open.line,
                column: open.column,
                datatype: datatype.keyword(),
                expected,
                got: parts.len(),
            });
        }
        Ok(parts)
    }

    fn parse_value(&mut self, datatype: Datatype) -> Result<AttributeValue, ParseError> {
        match datatype {
            Datatype::Token => Ok(AttributeValue::Token(self.expect_string("token string")?.0)),
            Datatype::String => Ok(AttributeValue::Str(self.expect_string("string literal")?.0)),
            Datatype::TokenArray => {
                self.expect_punct('[')?;
                let mut items = Vec::new();
                while !self.at_punct(']') {
                    items.push(self.expect_string("token string")?.0);
                    if self.at_punct(',') {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect_punct(']')?;
                Ok(AttributeValue::TokenArray(items))
            }
            Datatype::Float => Ok(AttributeValue::Float(self.expect_number()?)),
            Datatype::Double => Ok(AttributeValue::Double(self.expect_number()?)),
            Datatype::Float3 => {
                let v = self.parse_number_tuple(datatype, 3)?;
                Ok(AttributeValue::Float3([v[0], v[1], v[2]]))
            }
            Datatype::Point3f => {
                let v = self.parse_number_tuple(datatype, 3)?;
                Ok(AttributeValue::Point3f([v[0], v[1], v[2]]))
            }
            Datatype::Float4 => {
                let v = self.parse_number_tuple(datatype, 4)?;
                Ok(AttributeValue::Float4([v[0], v[1], v[2], v[3]]))
            }
            Datatype::Quatf => {
                let v = self.parse_number_tuple(datatype, 4)?;
                Ok(AttributeValue::Quatf([v[0], v[1], v[2], v[3]]))
            }
            Datatype::Color3fArray => {
                self.expect_punct('[')?;
                let mut rows = Vec::new();
                while !self.at_punct(']') {
                    let v = self.parse_number_tuple(Datatype::Color3fArray, 3)?;
                    rows.push([v[0], v[1], v[2]]);
                    if self.at_punct(',') {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect_punct(']')?;
                Ok(AttributeValue::Color3fArray(rows))
            }
            Datatype::FloatArray => {
                self.expect_punct('[')?;
                let mut items = Vec::new();
                while !self.at_punct(']') {
                    items.push(self.expect_number()?);
                    if self.at_punct(',') {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect_punct(']')?;
                Ok(AttributeValue::FloatArray(items))
            }
            Datatype::Matrix4d => {
                let open = self.expect_punct('(')?;
                let mut rows = Vec::new();
                while !self.at_punct(')') {
                    rows.push(self.parse_number_tuple(Datatype::Matrix4d, 4)?);
                    if self.at_punct(',') {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect_punct(')')?;
                if rows.len() != 4 {
                    return Err(ParseError::ArityMismatch {
                        line: open.line,
                        column: open.column,
                        datatype: "matrix4d",
                        expected: 16,
                        got: rows.len() * 4,
                    });
                }
                let mut m = [[0.0; 4]; 4];
                for (i, row) in rows.iter().enumerate() {
                    m[i].copy_from_slice(row);
                }
                Ok(AttributeValue::Matrix4d(m))
            }
            Datatype::Bool => match self.peek().kind.word() {
                Some("true") => {
                    self.bump();
                    Ok(AttributeValue::Bool(true))
                }
                Some("false") => {
                    self.bump();
                    Ok(AttributeValue::Bool(false))
                }
                _ => Err(self.unexpected("`true` or `false`")),
            },
            Datatype::RelPaths => Ok(AttributeValue::PathList(self.parse_path_list()?)),
        }
    }

    fn parse_document(&mut self, source_id: &str) -> Result<Layer, ParseError> {
        let mut layer = Layer::new(source_id);
        if self.at_punct('(') {
            self.parse_layer_metadata(&mut layer)?;
        }
        let root = PrimPath::root();
        while self.peek().kind != TokenKind::Eof {
            let prim_token = self.peek().clone();
            let prim = self.parse_prim(&root)?;
            if layer.root_prims.iter().any(|p| p.path == prim.path) {
                return Err(ParseError::DuplicatePrimName {
                    line: prim_token.line,
                    column: prim_token.column,
                    path: prim.path.to_string(),
                });
            }
            layer.root_prims.push(prim);
        }
        Ok(layer)
    }
}

/// Parses a token stream into a [`Layer`].
pub fn parse_layer(tokens: Vec<Token>, source_id: &str) -> Result<Layer, ParseError> {
    assert!(
        matches!(tokens.last(), Some(t) if t.kind == TokenKind::Eof),
        "token streams end with Eof (tokenize guarantees this)"
    );
    Parser { tokens, pos: 0 }.parse_document(source_id)
}

/// Tokenizes and parses usda source text in one step.
pub fn parse_source(text: &str, source_id: &str) -> Result<Layer, ParseError> {
    parse_layer(tokenize(text)?, source_id)
}

/// Parses a standalone value text against an expected datatype (used for
/// knowledge-graph literal decoding).
pub(super) fn parse_value_standalone(
    text: &str,
    datatype: Datatype,
) -> Result<AttributeValue, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let value = parser.parse_value(datatype)?;
    if parser.peek().kind != TokenKind::Eof {
        return Err(parser.unexpected("end of value"));
    }
    Ok(value)
}
