//! Layer stacking and stage composition.
//!
//! A scene is authored as a root layer plus transitively referenced
//! sublayers. Composition flattens that stack into one [`Stage`]: for every
//! prim path the strongest layer's opinion wins per property, `def` anywhere
//! makes a prim concrete, and `inherits` arcs pull properties from class
//! prims. "Strongest" means earliest in the depth-first stack order, the
//! root layer being strongest of all.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Component, Path, PathBuf};

use thiserror::Error;

use crate::usda::{
    parse_source, Layer, ParseError, PrimPath, PrimSpec, Property, Specifier,
};

/// Flattened layer stack, strongest (root) first.
#[derive(Debug, Clone)]
pub struct LayerStack {
    pub layers: Vec<Layer>,
}

/// Composed prim existence: concrete scene content vs. class prototypes.
/// `over`-only prims do not survive composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComposedSpecifier {
    Def,
    Class,
}

/// One prim after composition: merged type, API schemas, and properties.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedPrim {
    pub specifier: ComposedSpecifier,
    pub typed_schema: Option<String>,
    pub path: PrimPath,
    /// Paths of composed children, sorted.
    pub child_paths: Vec<PrimPath>,
    /// Applied API schemas: declaration order of the strongest spec first,
    /// then additions from weaker specs and inherits, without duplicates.
    pub api_schemas: Vec<String>,
    /// Resolved properties, sorted by name. Strongest opinion per name.
    pub properties: Vec<Property>,
}

impl ComposedPrim {
    pub fn property(&self, name: &str) -> Option<&Property> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn is_concrete(&self) -> bool {
        self.specifier == ComposedSpecifier::Def
    }
}

/// The composed scene graph: prims keyed by path, iteration is
/// path-lexicographic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Stage {
    pub prims: BTreeMap<PrimPath, ComposedPrim>,
}

impl Stage {
    pub fn get(&self, path: &PrimPath) -> Option<&ComposedPrim> {
        self.prims.get(path)
    }

    pub fn len(&self) -> usize {
        self.prims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prims.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComposedPrim> {
        self.prims.values()
    }

    /// Builds a stage directly from composed prims, recomputing child paths.
    /// Useful for synthesizing stages in tests and tools without authoring
    /// layer text.
    pub fn from_prims(prims: impl IntoIterator<Item = ComposedPrim>) -> Self {
        let mut map: BTreeMap<PrimPath, ComposedPrim> = BTreeMap::new();
        for mut prim in prims {
            prim.child_paths.clear();
            map.insert(prim.path.clone(), prim);
        }
        let paths: Vec<PrimPath> = map.keys().cloned().collect();
        for path in &paths {
            if let Some(parent) = path.parent() {
                if let Some(parent_prim) = map.get_mut(&parent) {
                    parent_prim.child_paths.push(path.clone());
                }
            }
        }
        Stage { prims: map }
    }
}

#[derive(Error, Debug)]
pub enum ComposeError {
    #[error("sublayer `{id}` could not be loaded: {reason}")]
    SublayerNotFound { id: String, reason: String },
    #[error("sublayer `{id}` failed to parse: {source}")]
    SublayerParse { id: String, source: ParseError },
    #[error("sublayer cycle: {}", chain.join(" -> "))]
    SublayerCycle { chain: Vec<String> },
    #[error("`{path}` declares typed schema `{conflicting}` but a stronger layer says `{strongest}`")]
    ConflictingTypedSchema {
        path: PrimPath,
        strongest: String,
        conflicting: String,
    },
    #[error("`{path}` inherits from `{target}`, which does not exist in the stage")]
    InheritTargetNotFound { path: PrimPath, target: PrimPath },
    #[error("`{path}` inherits from `{target}`, which is not a class prim")]
    InheritTargetNotClass { path: PrimPath, target: PrimPath },
    #[error("inherits cycle: {}", chain.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" -> "))]
    InheritCycle { chain: Vec<PrimPath> },
    #[error("no prim at `{path}`")]
    PrimNotFound { path: PrimPath },
}

/// Non-fatal composition findings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComposeWarning {
    /// `over` opinions for a path no layer defines; the opinions are dropped.
    OverWithoutDef(PrimPath),
    /// A defined prim whose ancestor does not compose; the prim is dropped.
    OrphanedPrim {
        path: PrimPath,
        missing_ancestor: PrimPath,
    },
}

impl fmt::Display for ComposeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComposeWarning::OverWithoutDef(path) => {
                write!(f, "`{path}` has only `over` opinions and was dropped")
            }
            ComposeWarning::OrphanedPrim { path, missing_ancestor } => write!(
                f,
                "`{path}` was dropped because ancestor `{missing_ancestor}` does not compose"
            ),
        }
    }
}

/// Source of layers for sublayer resolution.
pub trait LayerLoader {
    /// Loads the layer for a resolved identifier. The returned layer's
    /// `source_id` must equal `id`.
    fn load(&self, id: &str) -> Result<Layer, ComposeError>;

    /// Resolves a sublayer reference relative to the referring layer.
    fn resolve(&self, referrer: &str, reference: &str) -> String;
}

/// Loads `.usda` files from disk; references resolve relative to the
/// referring file's directory.
#[derive(Debug, Default)]
pub struct FsLoader;

impl LayerLoader for FsLoader {
    fn load(&self, id: &str) -> Result<Layer, ComposeError> {
        let text = std::fs::read_to_string(id).map_err(|e| ComposeError::SublayerNotFound {
            id: id.to_string(),
            reason: e.to_string(),
        })?;
        parse_source(&text, id).map_err(|source| ComposeError::SublayerParse {
            id: id.to_string(),
            source,
        })
    }

    fn resolve(&self, referrer: &str, reference: &str) -> String {
        let ref_path = Path::new(reference);
        if ref_path.is_absolute() {
            return reference.to_string();
        }
        let base = Path::new(referrer).parent().unwrap_or(Path::new(""));
        let mut out = PathBuf::new();
        for part in base.join(ref_path).components() {
            match part {
                Component::CurDir => {}
                Component::ParentDir => {
                    if !out.pop() {
                        out.push("..");
                    }
                }
                other => out.push(other),
            }
        }
        out.to_string_lossy().into_owned()
    }
}

/// In-memory loader keyed by exact identifier; references resolve verbatim.
#[derive(Debug, Default)]
pub struct MemLoader {
    layers: BTreeMap<String, Layer>,
}

impl MemLoader {
    pub fn new(layers: impl IntoIterator<Item = Layer>) -> Self {
        MemLoader {
            layers: layers
                .into_iter()
                .map(|l| (l.source_id.clone(), l))
                .collect(),
        }
    }
}

impl LayerLoader for MemLoader {
    fn load(&self, id: &str) -> Result<Layer, ComposeError> {
        self.layers
            .get(id)
            .cloned()
            .ok_or_else(|| ComposeError::SublayerNotFound {
                id: id.to_string(),
                reason: "not present in the in-memory layer set".into(),
            })
    }

    fn resolve(&self, _referrer: &str, reference: &str) -> String {
        reference.to_string()
    }
}

/// Flattens the sublayer graph under `root` into a depth-first stack, root
/// first. A layer referenced from several places is included once, at its
/// strongest position; reference cycles are errors.
pub fn resolve_sublayers(
    root: Layer,
    loader: &dyn LayerLoader,
) -> Result<LayerStack, ComposeError> {
    let mut layers = Vec::new();
    let mut included = BTreeSet::new();
    let mut dfs_stack = Vec::new();
    visit_layer(root, loader, &mut layers, &mut included, &mut dfs_stack)?;
    Ok(LayerStack { layers })
}

fn visit_layer(
    layer: Layer,
    loader: &dyn LayerLoader,
    layers: &mut Vec<Layer>,
    included: &mut BTreeSet<String>,
    dfs_stack: &mut Vec<String>,
) -> Result<(), ComposeError> {
    let id = layer.source_id.clone();
    included.insert(id.clone());
    dfs_stack.push(id.clone());
    let refs = layer.sublayer_refs.clone();
    layers.push(layer);
    for reference in refs {
        let resolved = loader.resolve(&id, &reference);
        if dfs_stack.contains(&resolved) {
            let mut chain = dfs_stack.clone();
            chain.push(resolved);
            return Err(ComposeError::SublayerCycle { chain });
        }
        if included.contains(&resolved) {
            continue; // diamond reference; already included at a stronger spot
        }
        let sublayer = loader.load(&resolved)?;
        visit_layer(sublayer, loader, layers, included, dfs_stack)?;
    }
    dfs_stack.pop();
    Ok(())
}

/// Per-path opinions gathered across the stack, strongest first.
#[derive(Debug, Default)]
struct PrimMerge {
    has_def: bool,
    has_class: bool,
    has_over: bool,
    /// Non-empty typed schema opinions, strongest first.
    typed: Vec<String>,
    /// API schemas in first-encounter (strength) order.
    api_schemas: Vec<String>,
    /// Inherit targets in first-encounter order.
    inherits: Vec<PrimPath>,
    /// Property opinions; the first entry per name is the strongest.
    properties: Vec<Property>,
}

impl PrimMerge {
    fn absorb(&mut self, spec: &PrimSpec) {
        match spec.specifier {
            Specifier::Def => self.has_def = true,
            Specifier::Class => self.has_class = true,
            Specifier::Over => self.has_over = true,
        }
        if let Some(t) = &spec.typed_schema {
            self.typed.push(t.clone());
        }
        for api in &spec.api_schemas {
            if !self.api_schemas.contains(api) {
                self.api_schemas.push(api.clone());
            }
        }
        for target in &spec.inherits {
            if !self.inherits.contains(target) {
                self.inherits.push(target.clone());
            }
        }
        for prop in &spec.properties {
            if !self.properties.iter().any(|p| p.name == prop.name) {
                self.properties.push(prop.clone());
            }
        }
    }
}

/// Composes a layer stack into a stage. Returns the stage plus warnings for
/// dropped opinions.
pub fn compose_stage(stack: &LayerStack) -> Result<(Stage, Vec<ComposeWarning>), ComposeError> {
    let mut merges: BTreeMap<PrimPath, PrimMerge> = BTreeMap::new();
    for layer in &stack.layers {
        for spec in layer.iter_prims() {
            merges.entry(spec.path.clone()).or_default().absorb(spec);
        }
    }

    let mut warnings = Vec::new();

    // Existence pass: a prim composes when some layer defines it (def or
    // class) and its ancestors compose too. Children of class prims are
    // class content themselves, never scene content.
    let mut specifiers: BTreeMap<PrimPath, ComposedSpecifier> = BTreeMap::new();
    for (path, merge) in &merges {
        if !merge.has_def && !merge.has_class {
            warnings.push(ComposeWarning::OverWithoutDef(path.clone()));
            continue;
        }
        let parent = path.parent().expect("prim paths are never the pseudo-root");
        let parent_spec = if parent.is_root() {
            None
        } else {
            match specifiers.get(&parent) {
                Some(spec) => Some(*spec),
                None => {
                    // BTreeMap iteration is path-lexicographic, so parents
                    // are decided before children; absence means dropped.
                    warnings.push(ComposeWarning::OrphanedPrim {
                        path: path.clone(),
                        missing_ancestor: parent.clone(),
                    });
                    continue;
                }
            }
        };
        let specifier = if parent_spec == Some(ComposedSpecifier::Class) || !merge.has_def {
            ComposedSpecifier::Class
        } else {
            ComposedSpecifier::Def
        };
        specifiers.insert(path.clone(), specifier);

        let merge = &merges[path];
        if let Some((strongest, rest)) = merge.typed.split_first() {
            if let Some(conflicting) = rest.iter().find(|t| *t != strongest) {
                return Err(ComposeError::ConflictingTypedSchema {
                    path: path.clone(),
                    strongest: strongest.clone(),
                    conflicting: conflicting.clone(),
                });
            }
        }
    }

    // Inherits pass: pull properties and API schemas from class prims,
    // weaker than any direct opinion, depth-first in declaration order.
    let mut resolved: BTreeMap<PrimPath, (Vec<Property>, Vec<String>)> = BTreeMap::new();
    let paths: Vec<PrimPath> = specifiers.keys().cloned().collect();
    for path in &paths {
        let mut visiting = Vec::new();
        resolve_merge(path, &merges, &specifiers, &mut resolved, &mut visiting)?;
    }

    let mut prims = BTreeMap::new();
    for path in &paths {
        let merge = &merges[path];
        let (mut properties, api_schemas) = resolved[path].clone();
        properties.sort_by(|a, b| a.name.cmp(&b.name));
        prims.insert(
            path.clone(),
            ComposedPrim {
                specifier: specifiers[path],
                typed_schema: merge.typed.first().cloned(),
                path: path.clone(),
                child_paths: Vec::new(),
                api_schemas,
                properties,
            },
        );
    }

    // Child paths from the final prim set.
    for path in &paths {
        if let Some(parent) = path.parent() {
            if let Some(parent_prim) = prims.get_mut(&parent) {
                parent_prim.child_paths.push(path.clone());
            }
        }
    }

    Ok((Stage { prims }, warnings))
}

/// Resolves one prim's effective properties and API schemas through its
/// inherits arcs, memoized. Diamond targets apply once (first encounter in
/// declaration-order depth-first traversal); cycles are errors.
fn resolve_merge(
    path: &PrimPath,
    merges: &BTreeMap<PrimPath, PrimMerge>,
    specifiers: &BTreeMap<PrimPath, ComposedSpecifier>,
    resolved: &mut BTreeMap<PrimPath, (Vec<Property>, Vec<String>)>,
    visiting: &mut Vec<PrimPath>,
) -> Result<(), ComposeError> {
    if resolved.contains_key(path) {
        return Ok(());
    }
    if visiting.contains(path) {
        let mut chain = visiting.clone();
        chain.push(path.clone());
        return Err(ComposeError::InheritCycle { chain });
    }
    visiting.push(path.clone());

    let merge = &merges[path];
    let mut properties = merge.properties.clone();
    let mut api_schemas = merge.api_schemas.clone();
    for target in &merge.inherits {
        let Some(target_spec) = specifiers.get(target) else {
            return Err(ComposeError::InheritTargetNotFound {
                path: path.clone(),
                target: target.clone(),
            });
        };
        if *target_spec != ComposedSpecifier::Class {
            return Err(ComposeError::InheritTargetNotClass {
                path: path.clone(),
                target: target.clone(),
            });
        }
        resolve_merge(target, merges, specifiers, resolved, visiting)?;
        let (target_props, target_apis) = &resolved[target];
        for prop in target_props {
            if !properties.iter().any(|p| p.name == prop.name) {
                properties.push(prop.clone());
            }
        }
        for api in target_apis {
            if !api_schemas.contains(api) {
                api_schemas.push(api.clone());
            }
        }
    }

    visiting.pop();
    resolved.insert(path.clone(), (properties, api_schemas));
    Ok(())
}

/// Resolves the effective properties of a free-standing prim spec against an
/// already-composed stage: local opinions win, then each inherit target (a
/// class prim in the stage) contributes its resolved properties in order.
pub fn resolve_inherits(
    spec: &PrimSpec,
    stage: &Stage,
) -> Result<Vec<Property>, ComposeError> {
    let mut properties = spec.properties.clone();
    for target in &spec.inherits {
        let prim = stage
            .get(target)
            .ok_or_else(|| ComposeError::InheritTargetNotFound {
                path: spec.path.clone(),
                target: target.clone(),
            })?;
        if prim.specifier != ComposedSpecifier::Class {
            return Err(ComposeError::InheritTargetNotClass {
                path: spec.path.clone(),
                target: target.clone(),
            });
        }
        for prop in &prim.properties {
            if !properties.iter().any(|p| p.name == prop.name) {
                properties.push(prop.clone());
            }
        }
    }
    properties.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(properties)
}

/// Looks up a prim by path. The pseudo-root is not a prim.
pub fn resolve_path<'a>(stage: &'a Stage, path: &PrimPath) -> Result<&'a ComposedPrim, ComposeError> {
    stage
        .get(path)
        .ok_or_else(|| ComposeError::PrimNotFound { path: path.clone() })
}

/// Convenience: parse a root document, resolve its sublayers, and compose.
pub fn compose_source(
    text: &str,
    source_id: &str,
    loader: &dyn LayerLoader,
) -> Result<(Stage, Vec<ComposeWarning>), ComposeError> {
    let root = parse_source(text, source_id).map_err(|source| ComposeError::SublayerParse {
        id: source_id.to_string(),
        source,
    })?;
    let stack = resolve_sublayers(root, loader)?;
    compose_stage(&stack)
}
