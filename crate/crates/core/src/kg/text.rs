//! Line-oriented text serialization for graphs.
//!
//! Layout (full description in `docs/kg-format.md`):
//!
//! ```text
//! #kg 1
//! @prefix usd <https://usdkg.dev/ont/usd#>
//! edge|scene:world|dul:hasPart|scene:world.box
//! isa|scene:world.box|usd:Prim
//! some|scene:world.box|dul:hasQuality|usd:Shape
//! data|scene:world.box.quality.Quality|usd:hasJointValue|"0.0"^^float
//! ```
//!
//! Terms are `<full-iri>` or `prefix:local` (split on the first `:`); fields
//! are `|`-separated, which IRI validation keeps unambiguous. Serialization
//! renders every fact line and sorts them, so equal graphs serialize to
//! byte-identical documents.

use thiserror::Error;

use crate::iri::{Iri, IriError};
use crate::kg::{Fact, Graph, LiteralValue};
use crate::usda::{parse_value_text, Datatype};

pub const HEADER: &str = "#kg 1";

#[derive(Error, Debug, Clone, PartialEq)]
pub enum KgError {
    #[error("missing `#kg 1` header line")]
    MissingHeader,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown prefix `{prefix}`")]
    UnknownPrefix { line: usize, prefix: String },
    #[error("line {line}: {source}")]
    BadIri {
        line: usize,
        #[source]
        source: IriError,
    },
}

/// Renders a graph to its canonical text form.
pub fn serialize_graph(graph: &Graph) -> String {
    // Longest namespace first so the most specific prefix wins.
    let mut table: Vec<(&str, &str)> = graph
        .prefixes()
        .iter()
        .map(|(name, ns)| (ns.as_str(), name.as_str()))
        .collect();
    table.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.cmp(b)));

    let term = |iri: &Iri| -> String {
        let text = iri.as_str();
        for (ns, name) in &table {
            if let Some(rest) = text.strip_prefix(ns) {
                if !rest.is_empty() {
                    return format!("{name}:{rest}");
                }
            }
        }
        format!("<{text}>")
    };

    let mut lines: Vec<String> = graph
        .iter()
        .map(|fact| match fact {
            Fact::Concept {
                individual,
                concept,
            } => format!("isa|{}|{}", term(individual), term(concept)),
            Fact::Edge {
                subject,
                property,
                object,
            } => format!("edge|{}|{}|{}", term(subject), term(property), term(object)),
            Fact::Existential {
                individual,
                property,
                filler,
            } => format!("some|{}|{}|{}", term(individual), term(property), term(filler)),
            Fact::Data {
                subject,
                property,
                value,
            } => format!(
                "data|{}|{}|\"{}\"^^{}",
                term(subject),
                term(property),
                escape(&value.lexical()),
                value.tag()
            ),
        })
        .collect();
    lines.sort();

    let mut out = String::from(HEADER);
    out.push('\n');
    for (name, ns) in graph.prefixes() {
        out.push_str(&format!("@prefix {name} <{ns}>\n"));
    }
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parses the canonical text form back into a graph.
pub fn load_graph(text: &str) -> Result<Graph, KgError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim_end() == HEADER => {}
        _ => return Err(KgError::MissingHeader),
    }

    let mut graph = Graph::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@prefix ") {
            let mut parts = rest.splitn(2, ' ');
            let name = parts.next().unwrap_or_default();
            let ns = parts.next().unwrap_or_default();
            if name.is_empty()
                || name.contains(':')
                || !ns.starts_with('<')
                || !ns.ends_with('>')
                || ns.len() < 3
            {
                return Err(KgError::Malformed {
                    line: line_no,
                    message: "expected `@prefix name <iri>`".into(),
                });
            }
            graph.add_prefix(name, &ns[1..ns.len() - 1]);
            continue;
        }

        // Terms are IRIs and cannot contain `|` (the IRI grammar excludes
        // it), so splitting on pipes is exact for term fields. The literal
        // field of a `data` line is the one place raw pipes may appear, so
        // it is split off with a bounded `splitn` and absorbs the rest of
        // the line.
        let (kind, rest) = line.split_once('|').unwrap_or((line, ""));
        let fields: Vec<&str> = if kind == "data" {
            rest.splitn(3, '|').collect()
        } else {
            rest.split('|').collect()
        };
        let term = |field: &str| -> Result<Iri, KgError> {
            if field.starts_with('<') && field.ends_with('>') && field.len() > 2 {
                return Iri::new(&field[1..field.len() - 1])
                    .map_err(|source| KgError::BadIri { line: line_no, source });
            }
            let (prefix, local) = field.split_once(':').ok_or_else(|| KgError::Malformed {
                line: line_no,
                message: format!("term `{field}` is neither `<iri>` nor `prefix:local`"),
            })?;
            let ns = graph
                .prefixes()
                .get(prefix)
                .ok_or_else(|| KgError::UnknownPrefix {
                    line: line_no,
                    prefix: prefix.to_string(),
                })?;
            Iri::in_namespace(ns, local).map_err(|source| KgError::BadIri { line: line_no, source })
        };

        let expect_fields = |n: usize| -> Result<(), KgError> {
            if fields.len() == n {
                Ok(())
            } else {
                Err(KgError::Malformed {
                    line: line_no,
                    message: format!(
                        "`{kind}` lines take {n} fields, found {}",
                        fields.len()
                    ),
                })
            }
        };

        let fact = match kind {
            "isa" => {
                expect_fields(2)?;
                Fact::concept(term(fields[0])?, term(fields[1])?)
            }
            "edge" => {
                expect_fields(3)?;
                Fact::edge(term(fields[0])?, term(fields[1])?, term(fields[2])?)
            }
            "some" => {
                expect_fields(3)?;
                Fact::existential(term(fields[0])?, term(fields[1])?, term(fields[2])?)
            }
            "data" => {
                expect_fields(3)?;
                Fact::data(
                    term(fields[0])?,
                    term(fields[1])?,
                    parse_literal(fields[2], line_no)?,
                )
            }
            other => {
                return Err(KgError::Malformed {
                    line: line_no,
                    message: format!(
                        "unknown fact kind `{other}` (expected isa, edge, some, or data)"
                    ),
                })
            }
        };
        graph.insert(fact);
    }
    Ok(graph)
}

/// Parses `"lexical"^^tag`. Known tags re-parse the lexical through the
/// value grammar; unknown tags come back opaque so foreign data survives a
/// round trip.
fn parse_literal(field: &str, line: usize) -> Result<LiteralValue, KgError> {
    let malformed = |message: String| KgError::Malformed { line, message };
    let rest = field
        .strip_prefix('"')
        .ok_or_else(|| malformed("literal must start with `\"`".into()))?;
    let (lexical, tag) = split_literal(rest)
        .ok_or_else(|| malformed("literal must look like `\"lexical\"^^tag`".into()))?;
    let lexical = unescape(lexical, line)?;
    match Datatype::from_tag(tag) {
        Some(datatype) => {
            let value = parse_value_text(&lexical, datatype).map_err(|e| {
                malformed(format!("literal does not parse as `{}`: {e}", datatype.tag()))
            })?;
            Ok(LiteralValue::Typed(value))
        }
        None if tag.is_empty() => Err(malformed("literal has an empty datatype tag".into())),
        None => Ok(LiteralValue::Opaque {
            lexical,
            datatype: tag.to_string(),
        }),
    }
}

/// Splits `lexical"^^tag` at the closing unescaped quote.
fn split_literal(rest: &str) -> Option<(&str, &str)> {
    let bytes = rest.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'"' => {
                let tail = &rest[i + 1..];
                let tag = tail.strip_prefix("^^")?;
                return Some((&rest[..i], tag));
            }
            _ => i += 1,
        }
    }
    None
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(s: &str, line: usize) -> Result<String, KgError> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('"') => out.push('"'),
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some(other) => {
                return Err(KgError::Malformed {
                    line,
                    message: format!("unknown escape `\\{other}` in literal"),
                })
            }
            None => {
                return Err(KgError::Malformed {
                    line,
                    message: "literal ends inside an escape".into(),
                })
            }
        }
    }
    Ok(out)
}
