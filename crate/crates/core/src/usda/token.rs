//! Hand-rolled lexer for the usda subset.
//!
//! Produces a flat token list with 1-based line/column positions for error
//! reporting. Comments run from `#` to end of line, which also covers the
//! `#usda 1.0` header line — the parser never sees it.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// Structural keyword: `def`, `over`, `class`, `uniform`, `rel`, `prepend`.
    Keyword(&'static str),
    /// Plain identifier (including datatype names, `true`/`false`, metadata
    /// field names).
    Ident(String),
    /// Namespaced identifier like `physics:mass` or `xformOp:transform`.
    NsIdent(String),
    /// Double-quoted string literal, unescaped.
    StringLit(String),
    /// Numeric literal, parsed as 64-bit float.
    NumberLit(f64),
    /// Angle-bracket prim path reference, inner text: `</world/box>`.
    PathRef(String),
    /// At-sign asset reference, inner text: `@sub.usda@`.
    AssetRef(String),
    /// Single punctuation character: `{ } ( ) [ ] = ,`.
    Punct(char),
    /// End of input; carries the final position.
    Eof,
}

impl TokenKind {
    /// Identifier text for `Ident`/`NsIdent`/`Keyword` tokens.
    pub fn word(&self) -> Option<&str> {
        match self {
            TokenKind::Keyword(w) => Some(w),
            TokenKind::Ident(w) | TokenKind::NsIdent(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(w) => write!(f, "`{w}`"),
            TokenKind::Ident(w) => write!(f, "identifier `{w}`"),
            TokenKind::NsIdent(w) => write!(f, "identifier `{w}`"),
            TokenKind::StringLit(s) => write!(f, "string \"{s}\""),
            TokenKind::NumberLit(n) => write!(f, "number {n}"),
            TokenKind::PathRef(p) => write!(f, "path <{p}>"),
            TokenKind::AssetRef(a) => write!(f, "asset @{a}@"),
            TokenKind::Punct(c) => write!(f, "`{c}`"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LexError {
    #[error("{line}:{column}: unterminated string literal")]
    UnterminatedString { line: usize, column: usize },
    #[error("{line}:{column}: unterminated path reference")]
    UnterminatedPathRef { line: usize, column: usize },
    #[error("{line}:{column}: unterminated asset reference")]
    UnterminatedAssetRef { line: usize, column: usize },
    #[error("{line}:{column}: malformed number `{text}`")]
    MalformedNumber {
        line: usize,
        column: usize,
        text: String,
    },
    #[error("{line}:{column}: invalid character `{ch}`")]
    InvalidCharacter { ch: char, line: usize, column: usize },
}

const KEYWORDS: &[&str] = &["def", "over", "class", "uniform", "rel", "prepend"];

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn is_ident_start(c: char) -> bool {
        c.is_ascii_alphabetic() || c == '_'
    }

    fn is_ident_continue(c: char) -> bool {
        c.is_ascii_alphanumeric() || c == '_'
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut tokens = Vec::new();
        loop {
            // Skip whitespace and comments.
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                    continue;
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                    continue;
                }
                _ => {}
            }

            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else {
                tokens.push(Token {
                    kind: TokenKind::Eof,
                    line,
                    column,
                });
                return Ok(tokens);
            };

            let kind = match c {
                '{' | '}' | '(' | ')' | '[' | ']' | '=' | ',' => {
                    self.bump();
                    TokenKind::Punct(c)
                }
                '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None | Some('\n') => {
                                return Err(LexError::UnterminatedString { line, column })
                            }
                            Some('"') => break,
                            Some('\\') => match self.bump() {
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                Some(other) => {
                                    // Unknown escapes pass through verbatim.
                                    s.push('\\');
                                    s.push(other);
                                }
                                None => {
                                    return Err(LexError::UnterminatedString { line, column })
                                }
                            },
                            Some(other) => s.push(other),
                        }
                    }
                    TokenKind::StringLit(s)
                }
                '<' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None | Some('\n') => {
                                return Err(LexError::UnterminatedPathRef { line, column })
                            }
                            Some('>') => break,
                            Some(other) => s.push(other),
                        }
                    }
                    TokenKind::PathRef(s)
                }
                '@' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None | Some('\n') => {
                                return Err(LexError::UnterminatedAssetRef { line, column })
                            }
                            Some('@') => break,
                            Some(other) => s.push(other),
                        }
                    }
                    TokenKind::AssetRef(s)
                }
                c if c.is_ascii_digit() || c == '-' || c == '+' => {
                    let mut text = String::new();
                    text.push(self.bump().unwrap());
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' {
                            text.push(self.bump().unwrap());
                        } else if (c == '-' || c == '+')
                            && matches!(text.chars().last(), Some('e') | Some('E'))
                        {
                            text.push(self.bump().unwrap());
                        } else {
                            break;
                        }
                    }
                    let n: f64 = text.parse().map_err(|_| LexError::MalformedNumber {
                        line,
                        column,
                        text: text.clone(),
                    })?;
                    TokenKind::NumberLit(n)
                }
                c if Self::is_ident_start(c) => {
                    let mut word = String::new();
                    word.push(self.bump().unwrap());
                    let mut namespaced = false;
                    loop {
                        match self.peek() {
                            Some(c) if Self::is_ident_continue(c) => {
                                word.push(self.bump().unwrap());
                            }
                            Some(':') => {
                                // Only part of the identifier when another
                                // segment follows, so `a:b` lexes as one
                                // token but a stray `:` stays an error.
                                let mut lookahead = self.chars.clone();
                                lookahead.next();
                                match lookahead.peek() {
                                    Some(&c) if Self::is_ident_start(c) => {
                                        self.bump();
                                        word.push(':');
                                        namespaced = true;
                                    }
                                    _ => break,
                                }
                            }
                            _ => break,
                        }
                    }
                    if namespaced {
                        TokenKind::NsIdent(word)
                    } else if let Some(kw) = KEYWORDS.iter().find(|k| **k == word) {
                        TokenKind::Keyword(kw)
                    } else {
                        TokenKind::Ident(word)
                    }
                }
                other => return Err(LexError::InvalidCharacter { ch: other, line, column }),
            };
            tokens.push(Token { kind, line, column });
        }
    }
}

/// Tokenizes usda source text.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    Lexer::new(src).run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_attribute_line() {
        let tokens = tokenize("float physics:mass = 2.79").unwrap();
        let kinds: Vec<&TokenKind> = tokens.iter().map(|t| &t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                &TokenKind::Ident("float".into()),
                &TokenKind::NsIdent("physics:mass".into()),
                &TokenKind::Punct('='),
                &TokenKind::NumberLit(2.79),
                &TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn empty_input_is_just_eof() {
        let tokens = tokenize("").unwrap();
        assert_eq!(tokens.len(), 1);
        assert_eq!(tokens[0].kind, TokenKind::Eof);
    }

    #[test]
    fn comments_and_header_are_skipped() {
        let tokens = tokenize("#usda 1.0\n# a comment\ndef\n").unwrap();
        assert_eq!(tokens[0].kind, TokenKind::Keyword("def"));
        assert_eq!(tokens[0].line, 3);
    }

    #[test]
    fn unterminated_string_reports_position() {
        let err = tokenize("def Xform \"world\" {\n  string s = \"abc\n}").unwrap_err();
        assert_eq!(
            err,
            LexError::UnterminatedString { line: 2, column: 14 }
        );
    }

    #[test]
    fn keywords_vs_identifiers() {
        let tokens = tokenize("def over class uniform rel prepend Xform").unwrap();
        assert!(matches!(tokens[0].kind, TokenKind::Keyword("def")));
        assert!(matches!(tokens[5].kind, TokenKind::Keyword("prepend")));
        assert!(matches!(tokens[6].kind, TokenKind::Ident(ref w) if w == "Xform"));
    }

    #[test]
    fn path_and_asset_refs() {
        let tokens = tokenize("rel physics:body0 = </world/box> @sub.usda@").unwrap();
        assert!(matches!(tokens[3].kind, TokenKind::PathRef(ref p) if p == "/world/box"));
        assert!(matches!(tokens[4].kind, TokenKind::AssetRef(ref a) if a == "sub.usda"));
    }

    #[test]
    fn negative_and_exponent_numbers() {
        let tokens = tokenize("-0.5 1e-7 +3").unwrap();
        assert_eq!(tokens[0].kind, TokenKind::NumberLit(-0.5));
        assert_eq!(tokens[1].kind, TokenKind::NumberLit(1e-7));
        assert_eq!(tokens[2].kind, TokenKind::NumberLit(3.0));
    }

    #[test]
    fn invalid_character_is_an_error() {
        let err = tokenize("def $").unwrap_err();
        assert_eq!(err, LexError::InvalidCharacter { ch: '$', line: 1, column: 5 });
    }
}
