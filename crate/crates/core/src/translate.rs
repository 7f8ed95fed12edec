//! Stage-to-graph translation.
//!
//! Every concrete (`def`) prim becomes an individual whose IRI embeds its
//! scene path (see [`crate::iri::iri_of_path`]). Class prims never become
//! individuals — they exist to be tag targets and inherits sources. Per
//! prim, the translator emits:
//!
//! - membership in the scene-prim concept;
//! - `hasTypedSchema` / `hasAPI` edges to canonical schema individuals
//!   (which share IRIs with the schema concepts in the terminology);
//! - `hasPart` edges to concrete children;
//! - concept memberships for resolved semantic tags and for schemas carrying
//!   an `applies-to` hook;
//! - relationship edges, named under the vocabulary namespace;
//! - quality individuals: a shape quality when the prim carries
//!   `xformOpOrder` (typed by the schema registry's quality binding), and a
//!   generic quality holding any attribute that feeds a classification rule;
//! - data facts for remaining attributes.
//!
//! Quality individuals live at `<prim-iri>.quality.<Kind>`. Avoid naming
//! prims `quality` if you need that corner of the naming scheme to stay
//! unambiguous.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::compose::Stage;
use crate::iri::{iri_of_path, Iri, IriError};
use crate::kg::{Fact, Graph};
use crate::schema::SchemaRegistry;
use crate::tbox::{vocab, TBox};
use crate::usda::{AttributeValue, PrimPath};

/// A translated stage: the graph plus anything worth flagging.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub graph: Graph,
    pub warnings: Vec<TranslateWarning>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranslateWarning {
    /// A semantic tag pointed at a path that is not a taggable class prim.
    DanglingTag { path: PrimPath, target: PrimPath },
    /// A relationship pointed at a path with no concrete prim. The edge is
    /// still emitted — the scene may be partial on purpose.
    DanglingRelTarget {
        path: PrimPath,
        property: String,
        target: PrimPath,
    },
}

impl std::fmt::Display for TranslateWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TranslateWarning::DanglingTag { path, target } => write!(
                f,
                "{path}: semantic tag target {target} is not a taggable class prim; tag skipped"
            ),
            TranslateWarning::DanglingRelTarget {
                path,
                property,
                target,
            } => write!(
                f,
                "{path}: relationship `{property}` targets {target}, which is not a concrete prim"
            ),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("cannot mint IRIs under base `{base}`: {source}")]
    BadBase {
        base: String,
        #[source]
        source: IriError,
    },
}

/// The name of the relationship that carries semantic tags.
pub const SEMANTIC_TAG_PROPERTY: &str = "semanticTag:semanticLabel";

/// Attribute names consumed structurally rather than emitted as data facts.
const XFORM_ORDER: &str = "xformOpOrder";
const XFORM_TRANSFORM: &str = "xformOp:transform";

/// Mints the IRI of a prim's quality individual of a given kind.
pub fn mint_quality(prim: &Iri, kind: &str) -> Iri {
    Iri::new(format!("{prim}.quality.{kind}"))
        .expect("a valid IRI stays valid with a dotted suffix")
}

/// Translates a composed stage into a knowledge graph.
pub fn translate(
    stage: &Stage,
    tbox: &TBox,
    registry: &SchemaRegistry,
    base: &str,
) -> Result<Translation, TranslateError> {
    let mint = |path: &PrimPath| {
        iri_of_path(base, path).map_err(|source| TranslateError::BadBase {
            base: base.to_string(),
            source,
        })
    };

    // Tag targets: class prims carrying concept coordinates.
    let mut tag_targets: BTreeMap<&PrimPath, Iri> = BTreeMap::new();
    for prim in stage.iter() {
        if prim.is_concrete() {
            continue;
        }
        if let Some(concept) = concept_of_class_prim(prim) {
            tag_targets.insert(&prim.path, concept);
        }
    }

    // Attributes that feed classification rules, by local name.
    let mut rule_data_props: BTreeMap<&str, Iri> = BTreeMap::new();
    for rule in &tbox.rules {
        rule_data_props
            .entry(rule.data_property.local_name())
            .or_insert_with(|| rule.data_property.clone());
    }

    let mut graph = Graph::new();
    graph.add_prefix("usd", vocab::USD_NS);
    graph.add_prefix("dul", vocab::DUL_NS);
    let scene_ns = if base.ends_with('#') || base.ends_with('/') {
        base.to_string()
    } else {
        format!("{base}#")
    };
    graph.add_prefix("scene", scene_ns);
    let mut warnings = Vec::new();

    for prim in stage.iter() {
        if !prim.is_concrete() {
            continue;
        }
        let iri = mint(&prim.path)?;
        graph.insert(Fact::concept(iri.clone(), vocab::prim()));

        if let Some(schema) = &prim.typed_schema {
            graph.insert(Fact::edge(
                iri.clone(),
                vocab::has_typed_schema(),
                vocab::schema_individual(schema),
            ));
        }
        for api in &prim.api_schemas {
            graph.insert(Fact::edge(
                iri.clone(),
                vocab::has_api(),
                vocab::schema_individual(api),
            ));
        }
        for concept in registry.applied_concepts(prim.typed_schema.as_deref(), &prim.api_schemas) {
            graph.insert(Fact::concept(iri.clone(), concept));
        }

        for child in &prim.child_paths {
            if stage.get(child).is_some_and(|c| c.is_concrete()) {
                graph.insert(Fact::edge(iri.clone(), vocab::has_part(), mint(child)?));
            }
        }

        for property in &prim.properties {
            match (&property.name, &property.value) {
                (name, AttributeValue::PathList(targets)) if name == SEMANTIC_TAG_PROPERTY => {
                    for target in targets {
                        match tag_targets.get(target) {
                            Some(concept) => {
                                graph.insert(Fact::concept(iri.clone(), concept.clone()));
                            }
                            None => warnings.push(TranslateWarning::DanglingTag {
                                path: prim.path.clone(),
                                target: target.clone(),
                            }),
                        }
                    }
                }
                (name, AttributeValue::PathList(targets)) => {
                    for target in targets {
                        if !stage.get(target).is_some_and(|t| t.is_concrete()) {
                            warnings.push(TranslateWarning::DanglingRelTarget {
                                path: prim.path.clone(),
                                property: name.clone(),
                                target: target.clone(),
                            });
                        }
                        graph.insert(Fact::edge(
                            iri.clone(),
                            vocab::property_iri(name),
                            mint(target)?,
                        ));
                    }
                }
                (name, _) if name == XFORM_ORDER => {
                    let binding = registry
                        .quality_binding(prim.typed_schema.as_deref(), &prim.api_schemas)
                        .unwrap_or_else(vocab::shape);
                    let quality = mint_quality(&iri, "Shape");
                    graph.insert(Fact::edge(iri.clone(), vocab::has_shape(), quality.clone()));
                    graph.insert(Fact::concept(quality, binding));
                }
                (name, _) if name == XFORM_TRANSFORM => {
                    graph.insert(Fact::concept(iri.clone(), vocab::with_xform()));
                }
                (name, value) => match rule_data_props.get(name.as_str()) {
                    Some(data_property) if value.as_number().is_some() => {
                        let quality = mint_quality(&iri, "Quality");
                        graph.insert(Fact::edge(
                            iri.clone(),
                            vocab::has_quality(),
                            quality.clone(),
                        ));
                        graph.insert(Fact::data(
                            quality,
                            data_property.clone(),
                            value.clone(),
                        ));
                    }
                    _ => {
                        graph.insert(Fact::data(
                            iri.clone(),
                            vocab::property_iri(name),
                            value.clone(),
                        ));
                    }
                },
            }
        }
    }

    Ok(Translation { graph, warnings })
}

/// Reads the concept coordinates off a taggable class prim. Accepts the
/// short attribute aliases as well as the canonical names.
fn concept_of_class_prim(prim: &crate::compose::ComposedPrim) -> Option<Iri> {
    let text = |names: [&str; 2]| {
        names.iter().find_map(|n| {
            prim.property(n).and_then(|p| match &p.value {
                AttributeValue::Str(s) => Some(s.clone()),
                _ => None,
            })
        })
    };
    let namespace = text(["rdf:namespace", "rdf:ns"])?;
    let name = text(["rdf:conceptName", "rdf:name"])?;
    Iri::in_namespace(&namespace, &name).ok()
}
