//! Generates the tagging sublayer: a scene-description layer of `class`
//! prims mirroring the concept hierarchy.
//!
//! Semantic tag relationships in a scene point at these class prims; each
//! carries its concept's namespace and name as string attributes, so the
//! translator can recover the concept IRI from the composed stage alone.
//!
//! Layout rules, all deterministic:
//! - every concept becomes one `class` prim named `_class_<local name>`
//!   (invalid characters replaced by `_`; cross-namespace name collisions
//!   disambiguated with a short hash of the namespace);
//! - a concept with parents nests under its first parent (smallest IRI);
//!   remaining parents become inherits arcs;
//! - parentless concepts sit at the layer root.

use std::collections::BTreeMap;

use crate::iri::Iri;
use crate::tbox::TBox;
use crate::usda::{AttributeValue, Layer, PrimPath, PrimSpec, Property, Specifier};

/// Builds the tagging sublayer for a terminology.
pub fn generate_tagging_sublayer(tbox: &TBox, source_id: &str) -> Layer {
    let paths = tagging_paths(tbox);
    let mut specs: BTreeMap<PrimPath, PrimSpec> = BTreeMap::new();

    for concept in tbox.concepts() {
        let iri = concept.iri();
        let path = paths[&iri].clone();
        let mut inherits: Vec<PrimPath> = Vec::new();
        if let Some(primary) = primary_parent(tbox, &iri) {
            for parent in &concept.parents {
                if *parent != primary {
                    if let Some(p) = paths.get(parent) {
                        inherits.push(p.clone());
                    }
                }
            }
        }
        specs.insert(
            path.clone(),
            PrimSpec {
                specifier: Specifier::Class,
                typed_schema: None,
                path,
                children: Vec::new(),
                api_schemas: vec!["RdfAPI".to_string()],
                inherits,
                properties: vec![
                    Property {
                        name: "rdf:conceptName".to_string(),
                        value: AttributeValue::Str(concept.local_name.clone()),
                    },
                    Property {
                        name: "rdf:namespace".to_string(),
                        value: AttributeValue::Str(concept.namespace.clone()),
                    },
                ],
            },
        );
    }

    // Attach children to parents, deepest paths first so each subtree is
    // complete before it moves into its parent.
    let mut layer = Layer::new(source_id);
    let deepest_first: Vec<PrimPath> = {
        let mut all: Vec<PrimPath> = specs.keys().cloned().collect();
        all.sort_by_key(|p| std::cmp::Reverse(p.segments().len()));
        all
    };
    for path in deepest_first {
        let spec = specs.remove(&path).expect("each path is visited once");
        match path.parent() {
            Some(parent) if !parent.is_root() => {
                specs
                    .get_mut(&parent)
                    .expect("parent prims are generated for every nested concept")
                    .children
                    .push(spec);
            }
            _ => layer.root_prims.push(spec),
        }
    }
    // The moves above visit deepest-first; restore name order everywhere.
    fn sort_tree(prims: &mut Vec<PrimSpec>) {
        prims.sort_by(|a, b| a.name().cmp(b.name()));
        for prim in prims {
            sort_tree(&mut prim.children);
        }
    }
    sort_tree(&mut layer.root_prims);
    layer
}

/// The class-prim path for every concept in the terminology.
pub fn tagging_paths(tbox: &TBox) -> BTreeMap<Iri, PrimPath> {
    let names = prim_names(tbox);
    let mut paths: BTreeMap<Iri, PrimPath> = BTreeMap::new();
    for concept in tbox.concepts() {
        resolve_path(tbox, &concept.iri(), &names, &mut paths);
    }
    paths
}

fn resolve_path(
    tbox: &TBox,
    iri: &Iri,
    names: &BTreeMap<Iri, String>,
    paths: &mut BTreeMap<Iri, PrimPath>,
) -> PrimPath {
    if let Some(done) = paths.get(iri) {
        return done.clone();
    }
    let base = match primary_parent(tbox, iri) {
        Some(parent) => resolve_path(tbox, &parent, names, paths),
        None => PrimPath::root(),
    };
    let path = base.child(&names[iri]).expect("generated names are valid");
    paths.insert(iri.clone(), path.clone());
    path
}

/// First parent by IRI order, if any resolve to known concepts.
fn primary_parent(tbox: &TBox, iri: &Iri) -> Option<Iri> {
    tbox.concept(iri)?
        .parents
        .iter()
        .find(|p| tbox.concept(p).is_some())
        .cloned()
}

/// Deterministic prim names: `_class_` + sanitized local name, plus a short
/// namespace hash whenever two namespaces share a local name.
fn prim_names(tbox: &TBox) -> BTreeMap<Iri, String> {
    let mut by_name: BTreeMap<String, Vec<Iri>> = BTreeMap::new();
    for concept in tbox.concepts() {
        by_name
            .entry(sanitize(&concept.local_name))
            .or_default()
            .push(concept.iri());
    }
    let mut names = BTreeMap::new();
    for (name, iris) in by_name {
        let ambiguous = iris.len() > 1;
        for iri in iris {
            let ns = tbox
                .concept(&iri)
                .map(|c| c.namespace.clone())
                .unwrap_or_default();
            let full = if ambiguous {
                format!("_class_{name}_{:08x}", fnv1a32(ns.as_bytes()))
            } else {
                format!("_class_{name}")
            };
            names.insert(iri, full);
        }
    }
    names
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect()
}

fn fnv1a32(bytes: &[u8]) -> u32 {
    let mut hash: u32 = 0x811c_9dc5;
    for b in bytes {
        hash ^= u32::from(*b);
        hash = hash.wrapping_mul(0x0100_0193);
    }
    hash
}
