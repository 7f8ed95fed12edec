//! Loader for user terminology documents.
//!
//! A terminology document is line oriented. Blank lines and `#` comments are
//! skipped. Directives:
//!
//! ```text
//! namespace <http://example.org/onto#>
//! concept Milk subclass-of PhysicalObject
//! concept Openable
//! property hasLidAngle namespace <http://example.org/onto#>
//! property nextTo symmetric
//! rule Opened when hasQuality.hasLidAngle >= 0.5
//! ```
//!
//! `namespace` sets the default namespace for subsequently defined names.
//! Names in angle brackets are absolute IRIs; bare names resolve against the
//! built-in vocabulary first (by local name), then against the default
//! namespace. Referenced parents must already exist, which keeps the loaded
//! hierarchy acyclic by construction.

use std::collections::BTreeSet;

use crate::iri::Iri;
use crate::tbox::{
    builtin_tbox, ClassificationRule, Comparator, Concept, MaxCardinality, PropertyAxioms, TBox,
    TboxError,
};

/// Parses a terminology document and returns the built-in terminology
/// extended with its definitions.
pub fn load_tbox(text: &str) -> Result<TBox, TboxError> {
    let mut tbox = builtin_tbox();
    let mut default_ns: Option<String> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "namespace" => {
                let uri = expect_bracketed(words.get(1).copied(), line_no, "namespace IRI")?;
                if words.len() > 2 {
                    return Err(trailing(line_no, &words[2..]));
                }
                // Validate eagerly so a bad namespace fails at its own line.
                Iri::in_namespace(&uri, "x").map_err(|e| TboxError::Parse {
                    line: line_no,
                    message: format!("invalid namespace: {e}"),
                })?;
                default_ns = Some(uri);
            }
            "concept" => {
                let name = words.get(1).copied().ok_or_else(|| TboxError::Parse {
                    line: line_no,
                    message: "expected a concept name after `concept`".into(),
                })?;
                let mut namespace = None;
                let mut parents = BTreeSet::new();
                let mut rest = &words[2..];
                while !rest.is_empty() {
                    match rest[0] {
                        "namespace" => {
                            namespace = Some(expect_bracketed(
                                rest.get(1).copied(),
                                line_no,
                                "namespace IRI",
                            )?);
                            rest = &rest[2..];
                        }
                        "subclass-of" => {
                            let parent = rest.get(1).copied().ok_or_else(|| TboxError::Parse {
                                line: line_no,
                                message: "expected a name after `subclass-of`".into(),
                            })?;
                            parents.insert(resolve_concept(
                                &tbox,
                                parent,
                                default_ns.as_deref(),
                                line_no,
                            )?);
                            rest = &rest[2..];
                        }
                        other => {
                            return Err(TboxError::Parse {
                                line: line_no,
                                message: format!("unexpected `{other}` in concept definition"),
                            })
                        }
                    }
                }
                let namespace = namespace
                    .or_else(|| default_ns.clone())
                    .ok_or_else(|| TboxError::Parse {
                        line: line_no,
                        message: format!(
                            "concept `{name}` has no namespace; add one or set a default \
                             with a `namespace` line"
                        ),
                    })?;
                tbox.insert_concept(Concept {
                    namespace,
                    local_name: name.to_string(),
                    parents,
                })?;
            }
            "property" => {
                let name = words.get(1).copied().ok_or_else(|| TboxError::Parse {
                    line: line_no,
                    message: "expected a property name after `property`".into(),
                })?;
                let mut namespace = None;
                let mut axioms = PropertyAxioms::default();
                let mut rest = &words[2..];
                while !rest.is_empty() {
                    match rest[0] {
                        "namespace" => {
                            namespace = Some(expect_bracketed(
                                rest.get(1).copied(),
                                line_no,
                                "namespace IRI",
                            )?);
                            rest = &rest[2..];
                        }
                        "subproperty-of" => {
                            let parent = next_arg(rest, line_no, "subproperty-of")?;
                            axioms.parents.insert(resolve_property(
                                &tbox,
                                parent,
                                default_ns.as_deref(),
                                line_no,
                            )?);
                            rest = &rest[2..];
                        }
                        "symmetric" => {
                            axioms.symmetric = true;
                            rest = &rest[1..];
                        }
                        "transitive" => {
                            axioms.transitive = true;
                            rest = &rest[1..];
                        }
                        "domain" => {
                            let c = next_arg(rest, line_no, "domain")?;
                            axioms.domain =
                                Some(resolve_concept(&tbox, c, default_ns.as_deref(), line_no)?);
                            rest = &rest[2..];
                        }
                        "range" => {
                            let c = next_arg(rest, line_no, "range")?;
                            axioms.range =
                                Some(resolve_concept(&tbox, c, default_ns.as_deref(), line_no)?);
                            rest = &rest[2..];
                        }
                        "max" => {
                            let limit: u32 = next_arg(rest, line_no, "max")?
                                .parse()
                                .map_err(|_| TboxError::Parse {
                                    line: line_no,
                                    message: "expected an integer after `max`".into(),
                                })?;
                            let filler = rest.get(2).copied().ok_or_else(|| TboxError::Parse {
                                line: line_no,
                                message: "expected a filler concept after the `max` limit".into(),
                            })?;
                            axioms.max_cardinality = Some(MaxCardinality {
                                limit,
                                filler: resolve_concept(
                                    &tbox,
                                    filler,
                                    default_ns.as_deref(),
                                    line_no,
                                )?,
                            });
                            rest = &rest[3..];
                        }
                        other => {
                            return Err(TboxError::Parse {
                                line: line_no,
                                message: format!("unexpected `{other}` in property definition"),
                            })
                        }
                    }
                }
                let iri = name_to_iri(name, namespace.as_deref().or(default_ns.as_deref()))
                    .map_err(|message| TboxError::Parse {
                        line: line_no,
                        message,
                    })?;
                tbox.insert_property(iri, axioms)?;
            }
            "rule" => {
                // rule <concept> when <prop>.<prop> >=|< <number>
                if words.len() != 6 || words[2] != "when" {
                    return Err(TboxError::Parse {
                        line: line_no,
                        message: "expected `rule <concept> when <prop>.<prop> >=|< <number>`"
                            .into(),
                    });
                }
                let target = resolve_concept(&tbox, words[1], default_ns.as_deref(), line_no)?;
                let (qual, data) = words[3].split_once('.').ok_or_else(|| TboxError::Parse {
                    line: line_no,
                    message: "expected `<quality-property>.<data-property>`".into(),
                })?;
                let quality_property =
                    resolve_property(&tbox, qual, default_ns.as_deref(), line_no)?;
                let data_property = resolve_property(&tbox, data, default_ns.as_deref(), line_no)?;
                let comparator = match words[4] {
                    ">=" => Comparator::AtLeast,
                    "<" => Comparator::LessThan,
                    other => {
                        return Err(TboxError::Parse {
                            line: line_no,
                            message: format!("unknown comparator `{other}` (use `>=` or `<`)"),
                        })
                    }
                };
                let threshold: f64 = words[5].parse().map_err(|_| TboxError::Parse {
                    line: line_no,
                    message: format!("`{}` is not a number", words[5]),
                })?;
                tbox.rules.push(ClassificationRule {
                    target,
                    quality_property,
                    data_property,
                    comparator,
                    threshold,
                });
            }
            other => {
                return Err(TboxError::Parse {
                    line: line_no,
                    message: format!(
                        "unknown directive `{other}` (expected `namespace`, `concept`, \
                         `property`, or `rule`)"
                    ),
                })
            }
        }
    }
    Ok(tbox)
}

fn next_arg<'a>(rest: &[&'a str], line: usize, after: &str) -> Result<&'a str, TboxError> {
    rest.get(1).copied().ok_or_else(|| TboxError::Parse {
        line,
        message: format!("expected an argument after `{after}`"),
    })
}

fn trailing(line: usize, words: &[&str]) -> TboxError {
    TboxError::Parse {
        line,
        message: format!("unexpected trailing input: `{}`", words.join(" ")),
    }
}

fn expect_bracketed(word: Option<&str>, line: usize, what: &str) -> Result<String, TboxError> {
    match word {
        Some(w) if w.starts_with('<') && w.ends_with('>') && w.len() > 2 => {
            Ok(w[1..w.len() - 1].to_string())
        }
        Some(w) => Err(TboxError::Parse {
            line,
            message: format!("expected {what} in angle brackets, found `{w}`"),
        }),
        None => Err(TboxError::Parse {
            line,
            message: format!("expected {what}"),
        }),
    }
}

fn name_to_iri(name: &str, default_ns: Option<&str>) -> Result<Iri, String> {
    if name.starts_with('<') && name.ends_with('>') && name.len() > 2 {
        return Iri::new(&name[1..name.len() - 1]).map_err(|e| e.to_string());
    }
    match default_ns {
        Some(ns) => Iri::in_namespace(ns, name).map_err(|e| e.to_string()),
        None => Err(format!(
            "`{name}` has no namespace; add one or set a default with a `namespace` line"
        )),
    }
}

/// Resolves a concept reference: absolute `<iri>`, a built-in or previously
/// defined local name, or the default namespace.
fn resolve_concept(
    tbox: &TBox,
    name: &str,
    default_ns: Option<&str>,
    line: usize,
) -> Result<Iri, TboxError> {
    resolve(tbox, name, default_ns, line, |tbox, iri| {
        tbox.concept(iri).is_some()
    })
}

fn resolve_property(
    tbox: &TBox,
    name: &str,
    default_ns: Option<&str>,
    line: usize,
) -> Result<Iri, TboxError> {
    resolve(tbox, name, default_ns, line, |tbox, iri| {
        tbox.property(iri).is_some()
    })
}

fn resolve(
    tbox: &TBox,
    name: &str,
    default_ns: Option<&str>,
    line: usize,
    exists: impl Fn(&TBox, &Iri) -> bool,
) -> Result<Iri, TboxError> {
    if name.starts_with('<') && name.ends_with('>') && name.len() > 2 {
        let iri = Iri::new(&name[1..name.len() - 1]).map_err(|e| TboxError::Parse {
            line,
            message: e.to_string(),
        })?;
        if exists(tbox, &iri) {
            return Ok(iri);
        }
        return Err(TboxError::UnknownName {
            line,
            name: name.to_string(),
        });
    }
    // Local names match anything already defined (built-in or extension),
    // preferring an exact local-name hit over default-namespace resolution.
    if let Some(iri) = tbox.find_by_local_name(name) {
        if exists(tbox, &iri) {
            return Ok(iri);
        }
    }
    if let Some(ns) = default_ns {
        if let Ok(iri) = Iri::in_namespace(ns, name) {
            if exists(tbox, &iri) {
                return Ok(iri);
            }
        }
    }
    Err(TboxError::UnknownName {
        line,
        name: name.to_string(),
    })
}
