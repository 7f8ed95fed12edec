//! Joint state updates: applying new joint values to a graph.
//!
//! Updates arrive as `<scene-path> <value> <timestamp>` lines. Applying one
//! replaces the joint's quality value, records the timestamp for
//! stale-update rejection, and retracts the state labels that depended on
//! the old value — on the joint itself and on everything
//! connection-reachable from it — so re-running the reasoner yields exactly
//! the labels the new value supports.

use thiserror::Error;

use crate::iri::{iri_of_path, Iri};
use crate::kg::{Fact, Graph};
use crate::tbox::{vocab, TBox};
use crate::usda::{AttributeValue, PathError, PrimPath};

/// One joint state sample.
#[derive(Debug, Clone, PartialEq)]
pub struct JointUpdate {
    pub path: PrimPath,
    pub value: f64,
    pub timestamp: f64,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum UpdateError {
    #[error("update line {line}: expected `<path> <value> <timestamp>`, found `{text}`")]
    Malformed { line: usize, text: String },
    #[error("update line {line}: {source}")]
    BadPath {
        line: usize,
        #[source]
        source: PathError,
    },
    #[error("`{0}` does not name a joint in the graph")]
    UnknownJoint(Iri),
    #[error("stale update for `{joint}`: timestamp {incoming} is not after {current}")]
    StaleTimestamp {
        joint: Iri,
        incoming: f64,
        current: f64,
    },
    #[error("cannot mint an IRI under base `{base}`: {message}")]
    BadBase { base: String, message: String },
}

/// Parses one update line: `<path> <value> <timestamp>`.
pub fn parse_update_line(line: &str, line_no: usize) -> Result<JointUpdate, UpdateError> {
    let malformed = || UpdateError::Malformed {
        line: line_no,
        text: line.to_string(),
    };
    let mut words = line.split_whitespace();
    let (path, value, timestamp) = (
        words.next().ok_or_else(malformed)?,
        words.next().ok_or_else(malformed)?,
        words.next().ok_or_else(malformed)?,
    );
    if words.next().is_some() {
        return Err(malformed());
    }
    Ok(JointUpdate {
        path: PrimPath::parse(path).map_err(|source| UpdateError::BadPath {
            line: line_no,
            source,
        })?,
        value: value.parse().map_err(|_| malformed())?,
        timestamp: timestamp.parse().map_err(|_| malformed())?,
    })
}

/// Parses a whole update stream; blank lines and `#` comments are skipped.
pub fn parse_update_stream(text: &str) -> Result<Vec<JointUpdate>, UpdateError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_update_line(line, idx + 1)?);
    }
    Ok(out)
}

/// Applies one update to a graph whose individuals were minted under
/// `base`. Returns the joint's IRI.
///
/// The graph may be raw (straight out of translation) or materialized; in
/// the materialized case the stale state labels are retracted so the next
/// reasoning pass starts clean.
pub fn apply_joint_update(
    graph: &mut Graph,
    update: &JointUpdate,
    tbox: &TBox,
    base: &str,
) -> Result<Iri, UpdateError> {
    let joint = iri_of_path(base, &update.path).map_err(|e| UpdateError::BadBase {
        base: base.to_string(),
        message: e.to_string(),
    })?;
    if !graph.mentions(&joint) {
        return Err(UpdateError::UnknownJoint(joint));
    }

    let ts_prop = vocab::state_timestamp();
    if let Some(current) = graph
        .data_values(&joint, &ts_prop)
        .iter()
        .find_map(|v| v.as_number())
    {
        if update.timestamp <= current {
            return Err(UpdateError::StaleTimestamp {
                joint,
                incoming: update.timestamp,
                current,
            });
        }
    }

    // The joint's value quality: prefer the one already carrying a value,
    // then any already-attached generic quality, then mint one.
    let has_quality = vocab::has_quality();
    let value_prop = vocab::has_joint_value();
    let attached: Vec<Iri> = graph
        .objects(&joint, &has_quality)
        .into_iter()
        .cloned()
        .collect();
    let quality = attached
        .iter()
        .find(|q| !graph.data_values(q, &value_prop).is_empty())
        .cloned()
        .or_else(|| {
            attached
                .iter()
                .find(|q| q.as_str().ends_with(".quality.Quality"))
                .cloned()
        })
        .unwrap_or_else(|| {
            Iri::new(format!("{joint}.quality.Quality"))
                .expect("a valid IRI stays valid with a dotted suffix")
        });
    graph.insert(Fact::edge(joint.clone(), has_quality, quality.clone()));
    graph.set_data(&quality, &value_prop, AttributeValue::Float(update.value));
    graph.set_data(&joint, &ts_prop, AttributeValue::Double(update.timestamp));

    retract_dependent_labels(graph, tbox, &joint, &value_prop);
    Ok(joint)
}

/// Removes state labels derived from `data_property` on the joint and on
/// every individual connection-reachable from it.
fn retract_dependent_labels(graph: &mut Graph, tbox: &TBox, joint: &Iri, data_property: &Iri) {
    let mut labels: Vec<Iri> = tbox
        .rules
        .iter()
        .filter(|r| &r.data_property == data_property)
        .map(|r| r.target.clone())
        .collect();
    for lifting in &tbox.lifting {
        labels.push(lifting.opened.clone());
        labels.push(lifting.closed.clone());
    }
    if labels.is_empty() {
        return;
    }

    let hct = vocab::has_connection_transitive();
    let mut affected: Vec<Iri> = vec![joint.clone()];
    affected.extend(graph.subjects(&hct, joint).into_iter().cloned());
    affected.extend(graph.objects(joint, &hct).into_iter().cloned());

    graph.retain(|fact| match fact {
        Fact::Concept {
            individual,
            concept,
        } => !(labels.contains(concept) && affected.contains(individual)),
        _ => true,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tbox::builtin_tbox;

    const BASE: &str = "https://usdkg.dev/scene";

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn joint_graph() -> (Graph, Iri, Iri) {
        let mut g = Graph::new();
        let joint = iri("https://usdkg.dev/scene#world.j1");
        let boxy = iri("https://usdkg.dev/scene#world.box");
        let q = iri("https://usdkg.dev/scene#world.j1.quality.Quality");
        g.insert(Fact::concept(joint.clone(), vocab::prim()));
        g.insert(Fact::edge(joint.clone(), vocab::has_quality(), q.clone()));
        g.insert(Fact::data(
            q.clone(),
            vocab::has_joint_value(),
            AttributeValue::Float(0.0),
        ));
        // Materialized-style state: labels and connection closure present.
        g.insert(Fact::concept(joint.clone(), vocab::closed()));
        g.insert(Fact::concept(boxy.clone(), vocab::closed()));
        g.insert(Fact::edge(
            boxy.clone(),
            vocab::has_connection_transitive(),
            joint.clone(),
        ));
        (g, joint, q)
    }

    #[test]
    fn update_lines_parse_and_reject_garbage() {
        let u = parse_update_line("/world/j1 0.3 17.5", 1).unwrap();
        assert_eq!(u.path.to_string(), "/world/j1");
        assert_eq!((u.value, u.timestamp), (0.3, 17.5));

        assert!(matches!(
            parse_update_line("/world/j1 0.3", 4),
            Err(UpdateError::Malformed { line: 4, .. })
        ));
        assert!(matches!(
            parse_update_line("world/j1 0.3 1.0", 2),
            Err(UpdateError::BadPath { line: 2, .. })
        ));
        assert!(matches!(
            parse_update_line("/world/j1 fast 1.0", 1),
            Err(UpdateError::Malformed { .. })
        ));

        let stream = parse_update_stream("# warmup\n\n/world/j1 0.3 1.0\n/world/j2 0.0 2.0\n")
            .unwrap();
        assert_eq!(stream.len(), 2);
    }

    #[test]
    fn applying_an_update_swaps_value_and_clears_labels_in_the_component() {
        let (mut g, joint, q) = joint_graph();
        let tbox = builtin_tbox();
        let update = JointUpdate {
            path: PrimPath::parse("/world/j1").unwrap(),
            value: 0.3,
            timestamp: 10.0,
        };
        let applied = apply_joint_update(&mut g, &update, &tbox, BASE).unwrap();
        assert_eq!(applied, joint);

        let values = g.data_values(&q, &vocab::has_joint_value());
        assert_eq!(values.len(), 1);
        assert_eq!(values[0].as_number(), Some(0.3));

        // Labels gone on the joint and on the connected box.
        assert!(!g
            .iter()
            .any(|f| matches!(f, Fact::Concept { concept, .. } if *concept == vocab::closed())));
        // Timestamp recorded.
        let ts = g.data_values(&joint, &vocab::state_timestamp());
        assert_eq!(ts[0].as_number(), Some(10.0));
    }

    #[test]
    fn stale_and_unknown_updates_are_rejected() {
        let (mut g, joint, _) = joint_graph();
        let tbox = builtin_tbox();
        let mut update = JointUpdate {
            path: PrimPath::parse("/world/j1").unwrap(),
            value: 0.3,
            timestamp: 10.0,
        };
        apply_joint_update(&mut g, &update, &tbox, BASE).unwrap();

        // Same timestamp again: stale.
        update.value = 0.5;
        assert_eq!(
            apply_joint_update(&mut g, &update, &tbox, BASE),
            Err(UpdateError::StaleTimestamp {
                joint: joint.clone(),
                incoming: 10.0,
                current: 10.0
            })
        );
        // Later timestamp: fine.
        update.timestamp = 11.0;
        apply_joint_update(&mut g, &update, &tbox, BASE).unwrap();

        let unknown = JointUpdate {
            path: PrimPath::parse("/world/ghost").unwrap(),
            value: 0.1,
            timestamp: 12.0,
        };
        assert!(matches!(
            apply_joint_update(&mut g, &unknown, &tbox, BASE),
            Err(UpdateError::UnknownJoint(_))
        ));
    }

    #[test]
    fn updates_mint_a_quality_when_the_joint_has_none() {
        let mut g = Graph::new();
        let joint = iri("https://usdkg.dev/scene#world.bare");
        g.insert(Fact::concept(joint.clone(), vocab::prim()));
        let tbox = builtin_tbox();
        let update = JointUpdate {
            path: PrimPath::parse("/world/bare").unwrap(),
            value: 0.2,
            timestamp: 1.0,
        };
        apply_joint_update(&mut g, &update, &tbox, BASE).unwrap();

        let q = iri("https://usdkg.dev/scene#world.bare.quality.Quality");
        assert!(g.contains(&Fact::edge(joint, vocab::has_quality(), q.clone())));
        assert_eq!(
            g.data_values(&q, &vocab::has_joint_value())
                .first()
                .and_then(|v| v.as_number()),
            Some(0.2)
        );
    }
}
