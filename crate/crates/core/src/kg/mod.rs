//! The knowledge graph: typed facts over IRIs plus literal values.
//!
//! Four fact shapes cover everything the pipeline produces:
//! - [`Fact::Concept`] — an individual belongs to a concept;
//! - [`Fact::Edge`] — an object property between two individuals;
//! - [`Fact::Existential`] — an individual has *some* property filler of a
//!   given concept, without naming the filler;
//! - [`Fact::Data`] — a literal-valued property on an individual.
//!
//! Facts live in an ordered set, so iteration order, serialization, and
//! reasoning are deterministic. The text format is in `docs/kg-format.md`.

mod text;
mod turtle;
mod update;

pub use text::{load_graph, serialize_graph, KgError};
pub use turtle::export_turtle;
pub use update::{apply_joint_update, parse_update_line, parse_update_stream, JointUpdate, UpdateError};

use std::collections::{BTreeMap, BTreeSet};

use crate::iri::Iri;
use crate::usda::AttributeValue;

/// A literal value on a data fact. `Typed` values round-trip through the
/// scene-description value grammar; `Opaque` preserves literals whose
/// datatype tag this build does not know.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum LiteralValue {
    Typed(AttributeValue),
    Opaque { lexical: String, datatype: String },
}

impl LiteralValue {
    /// The datatype tag used in serialized literals.
    pub fn tag(&self) -> &str {
        match self {
            LiteralValue::Typed(v) => v.datatype().tag(),
            LiteralValue::Opaque { datatype, .. } => datatype,
        }
    }

    /// The lexical form used in serialized literals.
    pub fn lexical(&self) -> String {
        match self {
            LiteralValue::Typed(v) => v.to_string(),
            LiteralValue::Opaque { lexical, .. } => lexical.clone(),
        }
    }

    /// Numeric view, when the value is a scalar number.
    pub fn as_number(&self) -> Option<f64> {
        match self {
            LiteralValue::Typed(v) => v.as_number(),
            LiteralValue::Opaque { .. } => None,
        }
    }
}

impl From<AttributeValue> for LiteralValue {
    fn from(value: AttributeValue) -> Self {
        LiteralValue::Typed(value)
    }
}

/// One assertion in the graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fact {
    Concept {
        individual: Iri,
        concept: Iri,
    },
    Edge {
        subject: Iri,
        property: Iri,
        object: Iri,
    },
    Existential {
        individual: Iri,
        property: Iri,
        filler: Iri,
    },
    Data {
        subject: Iri,
        property: Iri,
        value: LiteralValue,
    },
}

impl Fact {
    pub fn concept(individual: Iri, concept: Iri) -> Self {
        Fact::Concept {
            individual,
            concept,
        }
    }

    pub fn edge(subject: Iri, property: Iri, object: Iri) -> Self {
        Fact::Edge {
            subject,
            property,
            object,
        }
    }

    pub fn existential(individual: Iri, property: Iri, filler: Iri) -> Self {
        Fact::Existential {
            individual,
            property,
            filler,
        }
    }

    pub fn data(subject: Iri, property: Iri, value: impl Into<LiteralValue>) -> Self {
        Fact::Data {
            subject,
            property,
            value: value.into(),
        }
    }

    /// The IRIs this fact puts in node positions. Properties and literals
    /// are not nodes; the concept of a membership fact is (it can carry
    /// further assertions).
    pub fn node_iris(&self) -> impl Iterator<Item = &Iri> {
        let pair: [Option<&Iri>; 2] = match self {
            Fact::Concept {
                individual,
                concept,
            } => [Some(individual), Some(concept)],
            Fact::Edge {
                subject, object, ..
            } => [Some(subject), Some(object)],
            Fact::Existential {
                individual, filler, ..
            } => [Some(individual), Some(filler)],
            Fact::Data { subject, .. } => [Some(subject), None],
        };
        pair.into_iter().flatten()
    }
}

/// Size summary of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GraphStats {
    /// Distinct IRIs appearing in node positions.
    pub nodes: usize,
    /// Total fact count.
    pub facts: usize,
    pub concept_facts: usize,
    pub edge_facts: usize,
    pub existential_facts: usize,
    pub data_facts: usize,
}

/// An ordered set of facts plus the prefix table used when serializing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Graph {
    facts: BTreeSet<Fact>,
    /// Prefix name -> namespace IRI. Names are identifier-like and may not
    /// contain `:`.
    prefixes: BTreeMap<String, String>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Registers a namespace prefix for serialization. Names are restricted
    /// to ASCII alphanumerics, `_`, and `-` (anything else — colons, pipes,
    /// whitespace — would corrupt the text format), and unusable names are
    /// ignored.
    pub fn add_prefix(&mut self, name: impl Into<String>, namespace: impl Into<String>) {
        let name = name.into();
        let usable = !name.is_empty()
            && name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if usable {
            self.prefixes.insert(name, namespace.into());
        }
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    /// Inserts a fact; `true` when it was not already present.
    pub fn insert(&mut self, fact: Fact) -> bool {
        self.facts.insert(fact)
    }

    pub fn extend(&mut self, facts: impl IntoIterator<Item = Fact>) {
        self.facts.extend(facts)
    }

    /// Removes a fact; `true` when it was present.
    pub fn remove(&mut self, fact: &Fact) -> bool {
        self.facts.remove(fact)
    }

    pub fn retain(&mut self, keep: impl FnMut(&Fact) -> bool) {
        self.facts.retain(keep)
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.facts.contains(fact)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    /// Whether the IRI appears in any node position.
    pub fn mentions(&self, iri: &Iri) -> bool {
        self.facts
            .iter()
            .any(|f| f.node_iris().any(|n| n == iri))
    }

    /// All distinct node IRIs.
    pub fn nodes(&self) -> BTreeSet<&Iri> {
        self.facts.iter().flat_map(Fact::node_iris).collect()
    }

    pub fn stats(&self) -> GraphStats {
        let mut stats = GraphStats {
            nodes: self.nodes().len(),
            facts: self.facts.len(),
            ..GraphStats::default()
        };
        for fact in &self.facts {
            match fact {
                Fact::Concept { .. } => stats.concept_facts += 1,
                Fact::Edge { .. } => stats.edge_facts += 1,
                Fact::Existential { .. } => stats.existential_facts += 1,
                Fact::Data { .. } => stats.data_facts += 1,
            }
        }
        stats
    }

    /// Objects of `property` edges from `subject`.
    pub fn objects(&self, subject: &Iri, property: &Iri) -> Vec<&Iri> {
        self.facts
            .iter()
            .filter_map(|f| match f {
                Fact::Edge {
                    subject: s,
                    property: p,
                    object,
                } if s == subject && p == property => Some(object),
                _ => None,
            })
            .collect()
    }

    /// Subjects of `property` edges into `object`.
    pub fn subjects(&self, property: &Iri, object: &Iri) -> Vec<&Iri> {
        self.facts
            .iter()
            .filter_map(|f| match f {
                Fact::Edge {
                    subject,
                    property: p,
                    object: o,
                } if o == object && p == property => Some(subject),
                _ => None,
            })
            .collect()
    }

    /// Literal values of `property` on `subject`.
    pub fn data_values(&self, subject: &Iri, property: &Iri) -> Vec<&LiteralValue> {
        self.facts
            .iter()
            .filter_map(|f| match f {
                Fact::Data {
                    subject: s,
                    property: p,
                    value,
                } if s == subject && p == property => Some(value),
                _ => None,
            })
            .collect()
    }

    /// Concepts asserted on an individual.
    pub fn concepts_of(&self, individual: &Iri) -> Vec<&Iri> {
        self.facts
            .iter()
            .filter_map(|f| match f {
                Fact::Concept {
                    individual: i,
                    concept,
                } if i == individual => Some(concept),
                _ => None,
            })
            .collect()
    }

    /// Individuals asserted to belong to a concept.
    pub fn members_of(&self, concept: &Iri) -> Vec<&Iri> {
        self.facts
            .iter()
            .filter_map(|f| match f {
                Fact::Concept {
                    individual,
                    concept: c,
                } if c == concept => Some(individual),
                _ => None,
            })
            .collect()
    }

    /// Replaces all `property` data facts on `subject` with a single value.
    pub fn set_data(&mut self, subject: &Iri, property: &Iri, value: impl Into<LiteralValue>) {
        self.facts.retain(|f| {
            !matches!(f, Fact::Data { subject: s, property: p, .. } if s == subject && p == property)
        });
        self.facts.insert(Fact::data(subject.clone(), property.clone(), value));
    }
}

impl IntoIterator for Graph {
    type Item = Fact;
    type IntoIter = std::collections::btree_set::IntoIter<Fact>;

    fn into_iter(self) -> Self::IntoIter {
        self.facts.into_iter()
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Fact;
    type IntoIter = std::collections::btree_set::Iter<'a, Fact>;

    fn into_iter(self) -> Self::IntoIter {
        self.facts.iter()
    }
}

impl FromIterator<Fact> for Graph {
    fn from_iter<T: IntoIterator<Item = Fact>>(iter: T) -> Self {
        Graph {
            facts: iter.into_iter().collect(),
            prefixes: BTreeMap::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn stats_count_nodes_per_position_rules() {
        let mut g = Graph::new();
        let (a, b, c, p) = (
            iri("http://e.org/s#a"),
            iri("http://e.org/s#b"),
            iri("http://e.org/o#C"),
            iri("http://e.org/o#p"),
        );
        g.insert(Fact::concept(a.clone(), c.clone()));
        g.insert(Fact::edge(a.clone(), p.clone(), b.clone()));
        g.insert(Fact::data(
            b.clone(),
            p.clone(),
            AttributeValue::Float(1.0),
        ));
        g.insert(Fact::existential(b.clone(), p.clone(), c.clone()));

        let stats = g.stats();
        // Nodes: a, b, and the concept C. The property IRI is not a node.
        assert_eq!(stats.nodes, 3);
        assert_eq!(stats.facts, 4);
        assert_eq!(
            (
                stats.concept_facts,
                stats.edge_facts,
                stats.existential_facts,
                stats.data_facts
            ),
            (1, 1, 1, 1)
        );
        assert!(g.mentions(&c));
        assert!(!g.mentions(&p));
    }

    #[test]
    fn duplicate_facts_collapse() {
        let mut g = Graph::new();
        let a = iri("http://e.org/s#a");
        let c = iri("http://e.org/o#C");
        assert!(g.insert(Fact::concept(a.clone(), c.clone())));
        assert!(!g.insert(Fact::concept(a, c)));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn set_data_replaces_existing_values() {
        let mut g = Graph::new();
        let (s, p) = (iri("http://e.org/s#j"), iri("http://e.org/o#v"));
        g.insert(Fact::data(s.clone(), p.clone(), AttributeValue::Float(0.0)));
        g.set_data(&s, &p, AttributeValue::Float(0.3));
        let values = g.data_values(&s, &p);
        assert_eq!(
            values,
            vec![&LiteralValue::Typed(AttributeValue::Float(0.3))]
        );
    }

    #[test]
    fn float_bearing_facts_order_deterministically() {
        // NaN-free ordering sanity: equal bits compare equal, others total.
        let (s, p) = (iri("http://e.org/s#x"), iri("http://e.org/o#v"));
        let mk = |v: f64| Fact::data(s.clone(), p.clone(), AttributeValue::Float(v));
        assert_eq!(mk(1.0), mk(1.0));
        assert_ne!(mk(0.0), mk(-0.0));
        assert!(mk(-1.0) < mk(2.0));
    }
}
