//! Schema registry: declared property signatures for typed and applied API
//! schemas, plus the concept hooks the translator consumes.
//!
//! The built-in registry covers the transformable/geometry/joint schemas and
//! the applied APIs used for mass, semantic tagging, and concept metadata.
//! Users register additional schemas programmatically or from a schema
//! extension document (`docs/schema-extensions.md`).
//!
//! Two hooks drive translation:
//! - `quality_binding`: the shape concept asserted on a prim's minted shape
//!   quality (nearest declaration wins along the typed-schema chain, then
//!   applied APIs in order);
//! - `applies_to`: a concept asserted directly on every prim bearing the
//!   schema, letting an applied API stand in for a semantic tag.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::iri::Iri;
use crate::tbox::vocab;
use crate::usda::{Datatype, PrimPath, Property};

/// Typed (`def Xform ...`) vs. applied (`apiSchemas = [...]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaKind {
    Typed,
    Api,
}

impl SchemaKind {
    pub fn keyword(self) -> &'static str {
        match self {
            SchemaKind::Typed => "typed",
            SchemaKind::Api => "api",
        }
    }
}

/// One declared property: name, datatype, and whether a conforming prim
/// must author it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySignature {
    pub name: String,
    pub datatype: Datatype,
    pub required: bool,
}

/// One schema definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaDef {
    pub name: String,
    pub kind: SchemaKind,
    /// Parent schema name; signatures are inherited.
    pub parent: Option<String>,
    /// Concept asserted on prims bearing this schema.
    pub applies_to: Option<Iri>,
    /// Shape concept for the prim's minted shape quality.
    pub quality_binding: Option<Iri>,
    pub signatures: Vec<PropertySignature>,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SchemaError {
    #[error("schema `{0}` is already registered")]
    DuplicateSchema(String),
    #[error("schema `{name}` names unknown parent `{parent}`")]
    UnknownParent { name: String, parent: String },
    #[error("schema `{name}` is {kind} but parent `{parent}` is not")]
    ParentKindMismatch {
        name: String,
        parent: String,
        kind: &'static str,
    },
    #[error("schema extension line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema extension line {line}: unknown schema `{name}`")]
    UnknownSchema { line: usize, name: String },
}

/// Severity of a validation diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

/// One validation finding for a composed prim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// The prim names a typed or API schema the registry does not know.
    UnknownSchema { path: PrimPath, schema: String },
    /// The property is not declared by any schema on the prim.
    UndeclaredProperty { path: PrimPath, property: String },
    /// The property is declared with a different datatype.
    DatatypeMismatch {
        path: PrimPath,
        property: String,
        expected: Datatype,
        found: Datatype,
    },
    /// A `required` signature has no authored opinion.
    MissingRequiredProperty {
        path: PrimPath,
        property: String,
        schema: String,
    },
}

impl Diagnostic {
    pub fn severity(&self) -> Severity {
        match self {
            Diagnostic::UndeclaredProperty { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }

    pub fn path(&self) -> &PrimPath {
        match self {
            Diagnostic::UnknownSchema { path, .. }
            | Diagnostic::UndeclaredProperty { path, .. }
            | Diagnostic::DatatypeMismatch { path, .. }
            | Diagnostic::MissingRequiredProperty { path, .. } => path,
        }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::UnknownSchema { path, schema } => {
                write!(f, "{path}: unknown schema `{schema}`")
            }
            Diagnostic::UndeclaredProperty { path, property } => {
                write!(f, "{path}: property `{property}` is not declared by any schema on the prim")
            }
            Diagnostic::DatatypeMismatch {
                path,
                property,
                expected,
                found,
            } => write!(
                f,
                "{path}: property `{property}` is declared `{}` but authored `{}`",
                expected.keyword(),
                found.keyword()
            ),
            Diagnostic::MissingRequiredProperty {
                path,
                property,
                schema,
            } => write!(
                f,
                "{path}: schema `{schema}` requires property `{property}`"
            ),
        }
    }
}

/// Registered schemas, keyed by name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SchemaRegistry {
    schemas: BTreeMap<String, SchemaDef>,
}

impl SchemaRegistry {
    pub fn get(&self, name: &str) -> Option<&SchemaDef> {
        self.schemas.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SchemaDef> {
        self.schemas.values()
    }

    /// Registers a schema. The parent must already exist and share the kind.
    pub fn register_schema(&mut self, def: SchemaDef) -> Result<(), SchemaError> {
        if self.schemas.contains_key(&def.name) {
            return Err(SchemaError::DuplicateSchema(def.name));
        }
        if let Some(parent) = &def.parent {
            match self.schemas.get(parent) {
                None => {
                    return Err(SchemaError::UnknownParent {
                        name: def.name,
                        parent: parent.clone(),
                    })
                }
                Some(p) if p.kind != def.kind => {
                    return Err(SchemaError::ParentKindMismatch {
                        name: def.name,
                        parent: parent.clone(),
                        kind: def.kind.keyword(),
                    })
                }
                Some(_) => {}
            }
        }
        self.schemas.insert(def.name.clone(), def);
        Ok(())
    }

    /// Schema chain from `name` to its root, nearest first. Empty when the
    /// name is unknown; cycles are impossible because parents must pre-exist.
    pub fn chain(&self, name: &str) -> Vec<&SchemaDef> {
        let mut out = Vec::new();
        let mut next = self.schemas.get(name);
        while let Some(def) = next {
            out.push(def);
            next = def.parent.as_deref().and_then(|p| self.schemas.get(p));
        }
        out
    }

    /// All signatures a schema exposes, own plus inherited, nearest
    /// declaration winning on name conflicts. `None` for unknown schemas.
    pub fn resolved_signatures(&self, name: &str) -> Option<BTreeMap<String, PropertySignature>> {
        if !self.schemas.contains_key(name) {
            return None;
        }
        let mut out = BTreeMap::new();
        for def in self.chain(name) {
            for sig in &def.signatures {
                out.entry(sig.name.clone()).or_insert_with(|| sig.clone());
            }
        }
        Some(out)
    }

    /// The shape concept for a prim: nearest `quality` declaration along the
    /// typed-schema chain, then the applied APIs in application order.
    pub fn quality_binding(&self, typed_schema: Option<&str>, api_schemas: &[String]) -> Option<Iri> {
        if let Some(name) = typed_schema {
            for def in self.chain(name) {
                if let Some(binding) = &def.quality_binding {
                    return Some(binding.clone());
                }
            }
        }
        for api in api_schemas {
            for def in self.chain(api) {
                if let Some(binding) = &def.quality_binding {
                    return Some(binding.clone());
                }
            }
        }
        None
    }

    /// Concepts asserted on a prim via `applies-to` hooks, deduplicated.
    pub fn applied_concepts(&self, typed_schema: Option<&str>, api_schemas: &[String]) -> BTreeSet<Iri> {
        let mut out = BTreeSet::new();
        let chains = typed_schema
            .into_iter()
            .chain(api_schemas.iter().map(String::as_str));
        for name in chains {
            for def in self.chain(name) {
                if let Some(concept) = &def.applies_to {
                    out.insert(concept.clone());
                }
            }
        }
        out
    }

    /// Validates one prim's schemas and properties. Diagnostics come back
    /// sorted by path, then severity (errors first), then rendering.
    pub fn validate_prim(
        &self,
        path: &PrimPath,
        typed_schema: Option<&str>,
        api_schemas: &[String],
        properties: &[Property],
    ) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut declared: BTreeMap<String, (String, PropertySignature)> = BTreeMap::new();
        let mut known_schema = false;

        let mut absorb = |name: &str, out: &mut Vec<Diagnostic>| match self.resolved_signatures(name) {
            Some(sigs) => {
                for (prop, sig) in sigs {
                    declared.entry(prop).or_insert((name.to_string(), sig));
                }
                true
            }
            None => {
                out.push(Diagnostic::UnknownSchema {
                    path: path.clone(),
                    schema: name.to_string(),
                });
                false
            }
        };
        if let Some(name) = typed_schema {
            known_schema |= absorb(name, &mut out);
        }
        for api in api_schemas {
            known_schema |= absorb(api, &mut out);
        }

        for prop in properties {
            match declared.get(&prop.name) {
                Some((_, sig)) => {
                    let found = prop.value.datatype();
                    if sig.datatype != found {
                        out.push(Diagnostic::DatatypeMismatch {
                            path: path.clone(),
                            property: prop.name.clone(),
                            expected: sig.datatype,
                            found,
                        });
                    }
                }
                // Without any known schema every property would be flagged;
                // the unknown-schema error already covers that situation.
                None if known_schema || (typed_schema.is_none() && api_schemas.is_empty()) => {
                    out.push(Diagnostic::UndeclaredProperty {
                        path: path.clone(),
                        property: prop.name.clone(),
                    });
                }
                None => {}
            }
        }

        for (prop, (schema, sig)) in &declared {
            if sig.required && !properties.iter().any(|p| &p.name == prop) {
                out.push(Diagnostic::MissingRequiredProperty {
                    path: path.clone(),
                    property: prop.clone(),
                    schema: schema.clone(),
                });
            }
        }

        sort_diagnostics(&mut out);
        out
    }
}

/// Sorts diagnostics by path, severity (errors first), then rendering.
pub fn sort_diagnostics(diagnostics: &mut [Diagnostic]) {
    diagnostics.sort_by(|a, b| {
        a.path()
            .cmp(b.path())
            .then(b.severity().cmp(&a.severity()))
            .then_with(|| a.to_string().cmp(&b.to_string()))
    });
}

/// Builds the built-in registry.
pub fn builtin_registry() -> SchemaRegistry {
    let mut registry = SchemaRegistry::default();
    let sig = |name: &str, datatype: Datatype| PropertySignature {
        name: name.to_string(),
        datatype,
        required: false,
    };
    let defs = [
        SchemaDef {
            name: "Xformable".into(),
            kind: SchemaKind::Typed,
            parent: None,
            applies_to: None,
            quality_binding: Some(vocab::shape()),
            signatures: vec![
                sig("xformOpOrder", Datatype::TokenArray),
                sig("xformOp:transform", Datatype::Matrix4d),
            ],
        },
        SchemaDef {
            name: "Xform".into(),
            kind: SchemaKind::Typed,
            parent: Some("Xformable".into()),
            applies_to: None,
            quality_binding: None,
            signatures: vec![],
        },
        SchemaDef {
            name: "Gprim".into(),
            kind: SchemaKind::Typed,
            parent: Some("Xformable".into()),
            applies_to: None,
            quality_binding: None,
            signatures: vec![
                sig("primvars:displayColor", Datatype::Color3fArray),
                sig("primvars:displayOpacity", Datatype::FloatArray),
            ],
        },
        SchemaDef {
            name: "Cube".into(),
            kind: SchemaKind::Typed,
            parent: Some("Gprim".into()),
            applies_to: None,
            quality_binding: Some(vocab::cube_shape()),
            signatures: vec![sig("size", Datatype::Double)],
        },
        SchemaDef {
            name: "PhysicsJoint".into(),
            kind: SchemaKind::Typed,
            parent: None,
            applies_to: None,
            quality_binding: None,
            signatures: vec![
                sig("physics:body0", Datatype::RelPaths),
                sig("physics:body1", Datatype::RelPaths),
            ],
        },
        SchemaDef {
            name: "PhysicsRevoluteJoint".into(),
            kind: SchemaKind::Typed,
            parent: Some("PhysicsJoint".into()),
            applies_to: None,
            quality_binding: None,
            signatures: vec![],
        },
        SchemaDef {
            name: "PhysicsMassAPI".into(),
            kind: SchemaKind::Api,
            parent: None,
            applies_to: None,
            quality_binding: None,
            signatures: vec![
                sig("physics:mass", Datatype::Float),
                sig("physics:centerOfMass", Datatype::Point3f),
            ],
        },
        SchemaDef {
            name: "RdfAPI".into(),
            kind: SchemaKind::Api,
            parent: None,
            applies_to: None,
            quality_binding: None,
            signatures: vec![
                sig("rdf:namespace", Datatype::String),
                sig("rdf:conceptName", Datatype::String),
            ],
        },
        SchemaDef {
            name: "SemanticTagAPI".into(),
            kind: SchemaKind::Api,
            parent: None,
            applies_to: None,
            quality_binding: None,
            signatures: vec![sig("semanticTag:semanticLabel", Datatype::RelPaths)],
        },
    ];
    for def in defs {
        registry
            .register_schema(def)
            .expect("built-in schemas are distinct and ordered parent-first");
    }
    registry
}

/// Parses a schema extension document into `registry`.
///
/// Line oriented; blank lines and `#` comments are skipped. Directives:
///
/// ```text
/// schema Openable api applies-to <http://example.org/onto#Openable>
/// schema LidJoint typed parent PhysicsJoint quality <http://example.org/onto#LidShape>
/// prop Openable lidAngle float required
/// ```
///
/// Concept references must be absolute IRIs in angle brackets. `prop` lines
/// may only extend schemas defined earlier in the same document.
pub fn load_schema_extensions(
    text: &str,
    registry: &mut SchemaRegistry,
) -> Result<(), SchemaError> {
    let mut own: BTreeSet<String> = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "schema" => {
                let name = words.get(1).copied().ok_or_else(|| SchemaError::Parse {
                    line: line_no,
                    message: "expected a schema name after `schema`".into(),
                })?;
                let kind = match words.get(2).copied() {
                    Some("typed") => SchemaKind::Typed,
                    Some("api") => SchemaKind::Api,
                    other => {
                        return Err(SchemaError::Parse {
                            line: line_no,
                            message: format!(
                                "expected `typed` or `api` after the schema name, found `{}`",
                                other.unwrap_or("")
                            ),
                        })
                    }
                };
                let mut def = SchemaDef {
                    name: name.to_string(),
                    kind,
                    parent: None,
                    applies_to: None,
                    quality_binding: None,
                    signatures: vec![],
                };
                let mut rest = &words[3..];
                while !rest.is_empty() {
                    let arg = |rest: &[&str]| -> Result<String, SchemaError> {
                        rest.get(1)
                            .map(|s| s.to_string())
                            .ok_or_else(|| SchemaError::Parse {
                                line: line_no,
                                message: format!("expected an argument after `{}`", rest[0]),
                            })
                    };
                    match rest[0] {
                        "parent" => def.parent = Some(arg(rest)?),
                        "applies-to" => def.applies_to = Some(parse_iri(&arg(rest)?, line_no)?),
                        "quality" => def.quality_binding = Some(parse_iri(&arg(rest)?, line_no)?),
                        other => {
                            return Err(SchemaError::Parse {
                                line: line_no,
                                message: format!("unexpected `{other}` in schema definition"),
                            })
                        }
                    }
                    rest = &rest[2..];
                }
                registry.register_schema(def)?;
                own.insert(name.to_string());
            }
            "prop" => {
                if words.len() < 4 || words.len() > 5 {
                    return Err(SchemaError::Parse {
                        line: line_no,
                        message: "expected `prop <schema> <property> <datatype> [required]`"
                            .into(),
                    });
                }
                let schema = words[1];
                if !own.contains(schema) {
                    return Err(SchemaError::UnknownSchema {
                        line: line_no,
                        name: schema.to_string(),
                    });
                }
                let datatype =
                    Datatype::from_keyword(words[3]).ok_or_else(|| SchemaError::Parse {
                        line: line_no,
                        message: format!("unknown datatype `{}`", words[3]),
                    })?;
                let required = match words.get(4) {
                    None => false,
                    Some(&"required") => true,
                    Some(other) => {
                        return Err(SchemaError::Parse {
                            line: line_no,
                            message: format!("expected `required` or end of line, found `{other}`"),
                        })
                    }
                };
                let def = registry
                    .schemas
                    .get_mut(schema)
                    .expect("membership checked above");
                def.signatures.push(PropertySignature {
                    name: words[2].to_string(),
                    datatype,
                    required,
                });
            }
            other => {
                return Err(SchemaError::Parse {
                    line: line_no,
                    message: format!("unknown directive `{other}` (expected `schema` or `prop`)"),
                })
            }
        }
    }
    Ok(())
}

fn parse_iri(word: &str, line: usize) -> Result<Iri, SchemaError> {
    if word.starts_with('<') && word.ends_with('>') && word.len() > 2 {
        Iri::new(&word[1..word.len() - 1]).map_err(|e| SchemaError::Parse {
            line,
            message: e.to_string(),
        })
    } else {
        Err(SchemaError::Parse {
            line,
            message: format!("expected an IRI in angle brackets, found `{word}`"),
        })
    }
}
