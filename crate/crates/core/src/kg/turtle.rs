//! Turtle export for interoperability with standard RDF tooling.
//!
//! Concept facts become `a` triples, edges become plain triples, and
//! existentials become blank-node objects typed with the filler concept —
//! the one construct Turtle expresses directly. Literals use XSD datatypes
//! where a faithful one exists; everything else keeps its lexical form under
//! a vocabulary datatype IRI so nothing is lost.

use crate::kg::{Fact, Graph, LiteralValue};
use crate::tbox::vocab;
use crate::usda::{AttributeValue, Datatype};

const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

/// Renders a graph as Turtle. Deterministic: prefix lines first, then one
/// sorted triple line per fact.
pub fn export_turtle(graph: &Graph) -> String {
    let mut table: Vec<(&str, &str)> = graph
        .prefixes()
        .iter()
        .map(|(name, ns)| (ns.as_str(), name.as_str()))
        .collect();
    table.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.cmp(b)));

    let term = |iri: &crate::iri::Iri| -> String {
        let text = iri.as_str();
        for (ns, name) in &table {
            if let Some(rest) = text.strip_prefix(ns) {
                // Turtle local names are stricter than ours; only shorten
                // plain identifier-like remainders.
                if !rest.is_empty()
                    && rest
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-')
                    && !rest.starts_with('.')
                    && !rest.ends_with('.')
                {
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
            } => format!("{} a {} .", term(individual), term(concept)),
            Fact::Edge {
                subject,
                property,
                object,
            } => format!("{} {} {} .", term(subject), term(property), term(object)),
            Fact::Existential {
                individual,
                property,
                filler,
            } => format!(
                "{} {} [ a {} ] .",
                term(individual),
                term(property),
                term(filler)
            ),
            Fact::Data {
                subject,
                property,
                value,
            } => format!(
                "{} {} {} .",
                term(subject),
                term(property),
                literal(value)
            ),
        })
        .collect();
    lines.sort();

    let mut out = String::new();
    for (name, ns) in graph.prefixes() {
        out.push_str(&format!("@prefix {name}: <{ns}> .\n"));
    }
    out.push_str(&format!("@prefix xsd: <{XSD}> .\n\n"));
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn literal(value: &LiteralValue) -> String {
    let quoted = |s: &str, dt: &str| {
        let mut esc = String::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '\\' => esc.push_str("\\\\"),
                '"' => esc.push_str("\\\""),
                '\n' => esc.push_str("\\n"),
                '\r' => esc.push_str("\\r"),
                '\t' => esc.push_str("\\t"),
                _ => esc.push(c),
            }
        }
        format!("\"{esc}\"^^{dt}")
    };
    match value {
        LiteralValue::Typed(AttributeValue::Bool(b)) => quoted(&b.to_string(), "xsd:boolean"),
        LiteralValue::Typed(v @ (AttributeValue::Float(_) | AttributeValue::Double(_))) => {
            quoted(&v.as_number().expect("scalar").to_string(), "xsd:double")
        }
        LiteralValue::Typed(
            v @ (AttributeValue::Token(_) | AttributeValue::Str(_)),
        ) => quoted(v.as_str().expect("textual"), "xsd:string"),
        LiteralValue::Typed(v) => quoted(
            &v.to_string(),
            &format!("<{}dt.{}>", vocab::USD_NS, v.datatype().tag()),
        ),
        LiteralValue::Opaque { lexical, datatype } => {
            if Datatype::from_tag(datatype).is_some() {
                unreachable!("known tags parse as typed values");
            }
            quoted(lexical, &format!("<{}dt.{}>", vocab::USD_NS, datatype))
        }
    }
}
