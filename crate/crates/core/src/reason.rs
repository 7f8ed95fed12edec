//! Forward-chaining materialization and the queries built on top of it.
//!
//! [`materialize`] saturates a graph under the terminology's axioms:
//!
//! - concept memberships lift through the subclass hierarchy;
//! - edges lift through the subproperty hierarchy;
//! - symmetric properties gain their reverse edges, transitive properties
//!   their compositions;
//! - domain and range axioms type edge endpoints;
//! - threshold classification rules label individuals from the numeric
//!   values carried by their qualities;
//! - container state lifting labels a container opened (closed) once every
//!   connected joint is labeled opened (closed) — evaluated only at rule
//!   fixpoints, so a half-computed connection closure can never leak a
//!   premature label.
//!
//! Everything is monotone, so the result is the least fixpoint. A fact cap
//! (default ten times the input size) aborts runaway rule sets; violations
//! of disjointness or cardinality axioms are *reported* by
//! [`check_consistency`], never repaired.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::iri::Iri;
use crate::kg::{apply_joint_update, Fact, Graph, JointUpdate, UpdateError};
use crate::tbox::{vocab, TBox};

/// What a materialization run did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InferenceReport {
    /// Facts added on top of the input.
    pub added: usize,
    /// Alternations between rule saturation and state lifting.
    pub rounds: usize,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ReasonError {
    #[error(
        "materialization exceeded the fact cap ({cap}); the graph is left partially saturated"
    )]
    CapExceeded { cap: usize },
}

/// The default materialization cap for a graph of `initial` facts.
pub fn default_cap(initial: usize) -> usize {
    initial.saturating_mul(10).max(1000)
}

/// Saturates the graph under the terminology with the default cap.
pub fn materialize(graph: &mut Graph, tbox: &TBox) -> Result<InferenceReport, ReasonError> {
    let cap = default_cap(graph.len());
    materialize_capped(graph, tbox, cap)
}

/// Saturates the graph under the terminology, aborting once the fact count
/// passes `cap` (the graph is then left partially saturated).
pub fn materialize_capped(
    graph: &mut Graph,
    tbox: &TBox,
    cap: usize,
) -> Result<InferenceReport, ReasonError> {
    let initial = graph.len();
    let mut idx = Indices::default();
    let mut queue: VecDeque<Fact> = graph.iter().cloned().collect();
    let mut report = InferenceReport::default();

    loop {
        while let Some(fact) = queue.pop_front() {
            idx.add(&fact);
            for conclusion in conclusions_of(&fact, tbox, &idx) {
                if graph.insert(conclusion.clone()) {
                    if graph.len() > cap {
                        return Err(ReasonError::CapExceeded { cap });
                    }
                    queue.push_back(conclusion);
                }
            }
        }
        report.rounds += 1;
        let lifted = lifting_pass(tbox, &idx);
        let mut grew = false;
        for fact in lifted {
            if graph.insert(fact.clone()) {
                if graph.len() > cap {
                    return Err(ReasonError::CapExceeded { cap });
                }
                queue.push_back(fact);
                grew = true;
            }
        }
        if !grew {
            report.added = graph.len() - initial;
            return Ok(report);
        }
    }
}

/// In-memory join indices over the facts processed so far.
#[derive(Default)]
struct Indices {
    /// property -> subject -> objects
    fwd: BTreeMap<Iri, BTreeMap<Iri, BTreeSet<Iri>>>,
    /// property -> object -> subjects
    rev: BTreeMap<Iri, BTreeMap<Iri, BTreeSet<Iri>>>,
    /// individual -> concepts
    types: BTreeMap<Iri, BTreeSet<Iri>>,
    /// concept -> individuals
    members: BTreeMap<Iri, BTreeSet<Iri>>,
    /// (subject, property) -> numeric values
    numbers: BTreeMap<(Iri, Iri), Vec<f64>>,
}

impl Indices {
    fn add(&mut self, fact: &Fact) {
        match fact {
            Fact::Concept {
                individual,
                concept,
            } => {
                self.types
                    .entry(individual.clone())
                    .or_default()
                    .insert(concept.clone());
                self.members
                    .entry(concept.clone())
                    .or_default()
                    .insert(individual.clone());
            }
            Fact::Edge {
                subject,
                property,
                object,
            } => {
                self.fwd
                    .entry(property.clone())
                    .or_default()
                    .entry(subject.clone())
                    .or_default()
                    .insert(object.clone());
                self.rev
                    .entry(property.clone())
                    .or_default()
                    .entry(object.clone())
                    .or_default()
                    .insert(subject.clone());
            }
            Fact::Data {
                subject,
                property,
                value,
            } => {
                if let Some(n) = value.as_number() {
                    self.numbers
                        .entry((subject.clone(), property.clone()))
                        .or_default()
                        .push(n);
                }
            }
            Fact::Existential { .. } => {}
        }
    }

    fn objects(&self, property: &Iri, subject: &Iri) -> impl Iterator<Item = &Iri> {
        self.fwd
            .get(property)
            .and_then(|m| m.get(subject))
            .into_iter()
            .flatten()
    }

    fn subjects(&self, property: &Iri, object: &Iri) -> impl Iterator<Item = &Iri> {
        self.rev
            .get(property)
            .and_then(|m| m.get(object))
            .into_iter()
            .flatten()
    }

    fn has_type(&self, individual: &Iri, concept: &Iri) -> bool {
        self.types
            .get(individual)
            .is_some_and(|c| c.contains(concept))
    }
}

/// Everything one fact implies against the already-indexed facts.
fn conclusions_of(fact: &Fact, tbox: &TBox, idx: &Indices) -> Vec<Fact> {
    let mut out = Vec::new();
    match fact {
        Fact::Concept {
            individual,
            concept,
        } => {
            if let Some(c) = tbox.concept(concept) {
                for parent in &c.parents {
                    out.push(Fact::concept(individual.clone(), parent.clone()));
                }
            }
        }
        Fact::Edge {
            subject,
            property,
            object,
        } => {
            if let Some(axioms) = tbox.property(property) {
                for parent in &axioms.parents {
                    out.push(Fact::edge(subject.clone(), parent.clone(), object.clone()));
                }
                if axioms.symmetric {
                    out.push(Fact::edge(object.clone(), property.clone(), subject.clone()));
                }
                if axioms.transitive {
                    for z in idx.objects(property, object) {
                        out.push(Fact::edge(subject.clone(), property.clone(), z.clone()));
                    }
                    for w in idx.subjects(property, subject) {
                        out.push(Fact::edge(w.clone(), property.clone(), object.clone()));
                    }
                }
                if let Some(domain) = &axioms.domain {
                    out.push(Fact::concept(subject.clone(), domain.clone()));
                }
                if let Some(range) = &axioms.range {
                    out.push(Fact::concept(object.clone(), range.clone()));
                }
            }
            for rule in &tbox.rules {
                if &rule.quality_property == property {
                    let key = (object.clone(), rule.data_property.clone());
                    if let Some(values) = idx.numbers.get(&key) {
                        if values.iter().any(|v| rule.comparator.holds(*v, rule.threshold)) {
                            out.push(Fact::concept(subject.clone(), rule.target.clone()));
                        }
                    }
                }
            }
        }
        Fact::Existential {
            individual,
            property,
            filler,
        } => {
            if let Some(axioms) = tbox.property(property) {
                for parent in &axioms.parents {
                    out.push(Fact::existential(
                        individual.clone(),
                        parent.clone(),
                        filler.clone(),
                    ));
                }
                if let Some(domain) = &axioms.domain {
                    out.push(Fact::concept(individual.clone(), domain.clone()));
                }
            }
        }
        Fact::Data {
            subject,
            property,
            value,
        } => {
            if let Some(v) = value.as_number() {
                for rule in &tbox.rules {
                    if &rule.data_property == property && rule.comparator.holds(v, rule.threshold) {
                        for x in idx.subjects(&rule.quality_property, subject) {
                            out.push(Fact::concept(x.clone(), rule.target.clone()));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Container state lifting, evaluated on a rule fixpoint: every connected
/// joint opened lifts the container to opened; every one closed, to closed;
/// mixed or jointless containers stay unlabeled.
fn lifting_pass(tbox: &TBox, idx: &Indices) -> Vec<Fact> {
    let hct = vocab::has_connection_transitive();
    let schema_prop = vocab::has_typed_schema();
    let mut out = Vec::new();
    for lifting in &tbox.lifting {
        let Some(containers) = idx.members.get(&lifting.container) else {
            continue;
        };
        for container in containers {
            let joints: Vec<&Iri> = idx
                .objects(&hct, container)
                .filter(|j| {
                    idx.objects(&schema_prop, j)
                        .any(|s| tbox.joint_schemas.contains(s))
                })
                .collect();
            if joints.is_empty() {
                continue;
            }
            for label in [&lifting.opened, &lifting.closed] {
                if joints.iter().all(|j| idx.has_type(j, label)) {
                    out.push(Fact::concept(container.clone(), label.clone()));
                }
            }
        }
    }
    out
}

/// A consistency violation. Reported, never repaired.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// An individual belongs to two concepts declared disjoint.
    DisjointConcepts {
        individual: Iri,
        left: Iri,
        right: Iri,
    },
    /// A subject exceeds a property's cardinality limit for a filler.
    MaxCardinalityExceeded {
        subject: Iri,
        property: Iri,
        filler: Iri,
        limit: u32,
        count: usize,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DisjointConcepts {
                individual,
                left,
                right,
            } => write!(
                f,
                "{individual} belongs to disjoint concepts {left} and {right}"
            ),
            Violation::MaxCardinalityExceeded {
                subject,
                property,
                filler,
                limit,
                count,
            } => write!(
                f,
                "{subject} has {count} {property} fillers of type {filler} (limit {limit})"
            ),
        }
    }
}

/// Scans a (normally materialized) graph for axiom violations, sorted.
pub fn check_consistency(graph: &Graph, tbox: &TBox) -> Vec<Violation> {
    let mut out = Vec::new();

    for (left, right) in &tbox.disjoint {
        let l: BTreeSet<&Iri> = graph.members_of(left).into_iter().collect();
        for individual in graph.members_of(right) {
            if l.contains(individual) {
                out.push(Violation::DisjointConcepts {
                    individual: individual.clone(),
                    left: left.clone(),
                    right: right.clone(),
                });
            }
        }
    }

    for (property, axioms) in tbox.properties() {
        let Some(max) = &axioms.max_cardinality else {
            continue;
        };
        // Count per subject: edge objects typed with the filler, plus
        // existentials whose filler is at or below it.
        let mut counts: BTreeMap<&Iri, usize> = BTreeMap::new();
        for fact in graph.iter() {
            match fact {
                Fact::Edge {
                    subject,
                    property: p,
                    object,
                } if p == property => {
                    if graph.concepts_of(object).contains(&&max.filler) {
                        *counts.entry(subject).or_default() += 1;
                    }
                }
                Fact::Existential {
                    individual,
                    property: p,
                    filler,
                } if p == property => {
                    if tbox.is_sub_concept_of(filler, &max.filler) {
                        *counts.entry(individual).or_default() += 1;
                    }
                }
                _ => {}
            }
        }
        for (subject, count) in counts {
            if count > max.limit as usize {
                out.push(Violation::MaxCardinalityExceeded {
                    subject: subject.clone(),
                    property: property.clone(),
                    filler: max.filler.clone(),
                    limit: max.limit,
                    count,
                });
            }
        }
    }

    out.sort();
    out
}

/// A malformed instance query.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum QueryError {
    /// The IRI is neither a terminology concept nor used as a concept by
    /// any fact, so the query is almost certainly a typo rather than an
    /// empty result.
    #[error("`{0}` is not a known concept")]
    UnknownConcept(Iri),
}

/// Individuals belonging to a concept or any of its sub-concepts.
///
/// Concepts outside the terminology (for example tag concepts from a
/// namespace that was never loaded) are still queryable as long as the
/// graph uses them; a concept known to neither side is an error.
pub fn query_instances(
    graph: &Graph,
    tbox: &TBox,
    concept: &Iri,
) -> Result<BTreeSet<Iri>, QueryError> {
    let mut out = BTreeSet::new();
    for c in tbox.concept_descendants_inclusive(concept) {
        out.extend(graph.members_of(&c).into_iter().cloned());
    }
    if out.is_empty() && tbox.concept(concept).is_none() {
        return Err(QueryError::UnknownConcept(concept.clone()));
    }
    Ok(out)
}

/// Whether the transitive connection relation holds from `a` to `b`.
///
/// Self-loops are genuine answers: any individual with at least one
/// connection reaches itself through symmetry plus transitivity.
pub fn query_connected(graph: &Graph, a: &Iri, b: &Iri) -> bool {
    graph.contains(&Fact::edge(
        a.clone(),
        vocab::has_connection_transitive(),
        b.clone(),
    ))
}

/// Everything connection-reachable from an individual (either direction),
/// excluding the individual itself.
pub fn connected_individuals(graph: &Graph, individual: &Iri) -> BTreeSet<Iri> {
    let hct = vocab::has_connection_transitive();
    let mut out: BTreeSet<Iri> = graph
        .objects(individual, &hct)
        .into_iter()
        .cloned()
        .collect();
    out.extend(graph.subjects(&hct, individual).into_iter().cloned());
    out.remove(individual);
    out
}

/// Current open/closed verdict for one container.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContainerState {
    Opened,
    Closed,
    Unlabeled,
}

impl ContainerState {
    pub fn as_str(self) -> &'static str {
        match self {
            ContainerState::Opened => "opened",
            ContainerState::Closed => "closed",
            ContainerState::Unlabeled => "unlabeled",
        }
    }
}

/// States of all container individuals, per the terminology's liftings.
pub fn container_states(graph: &Graph, tbox: &TBox) -> BTreeMap<Iri, ContainerState> {
    let mut out = BTreeMap::new();
    for lifting in &tbox.lifting {
        let containers = query_instances(graph, tbox, &lifting.container).unwrap_or_default();
        for container in containers {
            let concepts = graph.concepts_of(&container);
            let state = if concepts.contains(&&lifting.opened) {
                ContainerState::Opened
            } else if concepts.contains(&&lifting.closed) {
                ContainerState::Closed
            } else {
                ContainerState::Unlabeled
            };
            out.insert(container, state);
        }
    }
    out
}

/// A label an individual gained after an update.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StateEvent {
    pub individual: Iri,
    pub label: Iri,
}

impl std::fmt::Display for StateEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {}", self.individual, self.label.local_name())
    }
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum WatchError {
    #[error(transparent)]
    Update(#[from] UpdateError),
    #[error(transparent)]
    Reason(#[from] ReasonError),
}

/// Applies joint updates to a materialized graph and reports the state
/// labels each update produces.
///
/// The default mode retracts the labels an update invalidates and
/// re-saturates in place. `full_rematerialize` instead rebuilds from the
/// pristine translation output on every update — slower, immune to any
/// doubt about incremental retraction.
pub struct StateWatcher {
    tbox: TBox,
    base: String,
    full_rematerialize: bool,
    /// Unmaterialized facts, kept as the rebuild source.
    raw: Graph,
    /// Materialized view served to queries.
    graph: Graph,
    /// Labels whose gains are reported.
    watched: BTreeSet<Iri>,
}

impl StateWatcher {
    /// Materializes the baseline. The initial labels are not events.
    pub fn new(
        raw: Graph,
        tbox: TBox,
        base: impl Into<String>,
        full_rematerialize: bool,
    ) -> Result<Self, ReasonError> {
        let mut graph = raw.clone();
        materialize(&mut graph, &tbox)?;
        let mut watched: BTreeSet<Iri> = tbox.rules.iter().map(|r| r.target.clone()).collect();
        for lifting in &tbox.lifting {
            watched.insert(lifting.opened.clone());
            watched.insert(lifting.closed.clone());
        }
        Ok(StateWatcher {
            tbox,
            base: base.into(),
            full_rematerialize,
            raw,
            graph,
            watched,
        })
    }

    /// The current materialized graph.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Applies one update and returns the state labels it caused, sorted.
    /// Stale or unknown-joint updates error without changing any state.
    pub fn apply(&mut self, update: &JointUpdate) -> Result<Vec<StateEvent>, WatchError> {
        let before = self.labels();
        // The raw graph carries the timestamps, so stale updates bounce here
        // before the materialized view is touched.
        apply_joint_update(&mut self.raw, update, &self.tbox, &self.base)?;
        if self.full_rematerialize {
            let mut rebuilt = self.raw.clone();
            materialize(&mut rebuilt, &self.tbox)?;
            self.graph = rebuilt;
        } else {
            apply_joint_update(&mut self.graph, update, &self.tbox, &self.base)?;
            materialize(&mut self.graph, &self.tbox)?;
        }
        Ok(self
            .labels()
            .difference(&before)
            .map(|(individual, label)| StateEvent {
                individual: individual.clone(),
                label: label.clone(),
            })
            .collect())
    }

    fn labels(&self) -> BTreeSet<(Iri, Iri)> {
        self.graph
            .iter()
            .filter_map(|f| match f {
                Fact::Concept {
                    individual,
                    concept,
                } if self.watched.contains(concept) => {
                    Some((individual.clone(), concept.clone()))
                }
                _ => None,
            })
            .collect()
    }
}
