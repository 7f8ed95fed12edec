//! Terminology: concepts, property axioms, and classification rules.
//!
//! The built-in terminology covers the scene-description vocabulary (prims,
//! schemas, shapes, connection properties) plus the container state concepts
//! (Box, Flap, Opened, Closed). Users extend it with a line-oriented
//! terminology document (`docs/tbox-format.md`); extensions can add concepts,
//! properties, and threshold rules but never remove or redefine built-ins.

mod tagging;
mod terminology;
pub mod vocab;

pub use tagging::{generate_tagging_sublayer, tagging_paths};
pub use terminology::load_tbox;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::iri::Iri;

/// A named concept with its namespace and direct parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub namespace: String,
    pub local_name: String,
    pub parents: BTreeSet<Iri>,
}

impl Concept {
    pub fn iri(&self) -> Iri {
        Iri::in_namespace(&self.namespace, &self.local_name)
            .expect("concept namespaces and names are validated on insert")
    }
}

/// Axioms attached to one property.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PropertyAxioms {
    pub parents: BTreeSet<Iri>,
    pub symmetric: bool,
    pub transitive: bool,
    pub domain: Option<Iri>,
    pub range: Option<Iri>,
    pub max_cardinality: Option<MaxCardinality>,
}

/// "At most `limit` fillers of type `filler` per subject."
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxCardinality {
    pub limit: u32,
    pub filler: Iri,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    /// `>=`
    AtLeast,
    /// `<`
    LessThan,
}

impl Comparator {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::AtLeast => value >= threshold,
            Comparator::LessThan => value < threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::AtLeast => ">=",
            Comparator::LessThan => "<",
        }
    }
}

/// Threshold rule: a subject whose quality carries a data value satisfying
/// the comparison is classified under `target`.
///
/// Condition shape: `quality_property(x, q) and data_property(q, v) and
/// (v cmp threshold)  =>  target(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationRule {
    pub target: Iri,
    pub quality_property: Iri,
    pub data_property: Iri,
    pub comparator: Comparator,
    pub threshold: f64,
}

/// Container state lifting: a `container`-typed individual whose connected
/// joints all carry `opened` is itself `opened`; all `closed`, `closed`;
/// mixed or no joints, unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateLifting {
    pub container: Iri,
    pub opened: Iri,
    pub closed: Iri,
}

/// The terminology: concept hierarchy, property axioms, classification
/// rules, and the built-in state machinery.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TBox {
    concepts: BTreeMap<Iri, Concept>,
    properties: BTreeMap<Iri, PropertyAxioms>,
    pub rules: Vec<ClassificationRule>,
    /// Concept pairs no individual may belong to simultaneously.
    pub disjoint: Vec<(Iri, Iri)>,
    pub lifting: Vec<StateLifting>,
    /// Schema individuals whose presence as a `hasTypedSchema` target marks
    /// an individual as a joint.
    pub joint_schemas: BTreeSet<Iri>,
    /// IRIs defined by `builtin_tbox`, frozen against redefinition.
    builtin: BTreeSet<Iri>,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum TboxError {
    #[error("terminology line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("`{0}` is built in and cannot be redefined")]
    RedefinitionOfBuiltin(Iri),
    #[error("`{0}` is defined twice")]
    DuplicateDefinition(Iri),
    #[error("terminology line {line}: unknown name `{name}`")]
    UnknownName { line: usize, name: String },
    #[error("concept `{0}` has an empty namespace")]
    EmptyNamespace(String),
}

impl TBox {
    pub fn concept(&self, iri: &Iri) -> Option<&Concept> {
        self.concepts.get(iri)
    }

    pub fn property(&self, iri: &Iri) -> Option<&PropertyAxioms> {
        self.properties.get(iri)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn properties(&self) -> impl Iterator<Item = (&Iri, &PropertyAxioms)> {
        self.properties.iter()
    }

    /// Finds a concept or property IRI by bare local name. Used by the
    /// terminology loader and schema extension files, where built-ins are
    /// addressed by name.
    pub fn find_by_local_name(&self, name: &str) -> Option<Iri> {
        self.concepts
            .keys()
            .chain(self.properties.keys())
            .find(|iri| iri.local_name() == name)
            .cloned()
    }

    pub(crate) fn insert_concept(&mut self, concept: Concept) -> Result<(), TboxError> {
        if concept.namespace.is_empty() {
            return Err(TboxError::EmptyNamespace(concept.local_name));
        }
        let iri = concept.iri();
        if self.builtin.contains(&iri) {
            return Err(TboxError::RedefinitionOfBuiltin(iri));
        }
        if self.concepts.contains_key(&iri) {
            return Err(TboxError::DuplicateDefinition(iri));
        }
        self.concepts.insert(iri, concept);
        Ok(())
    }

    pub(crate) fn insert_property(
        &mut self,
        iri: Iri,
        axioms: PropertyAxioms,
    ) -> Result<(), TboxError> {
        if self.builtin.contains(&iri) {
            return Err(TboxError::RedefinitionOfBuiltin(iri));
        }
        if self.properties.contains_key(&iri) {
            return Err(TboxError::DuplicateDefinition(iri));
        }
        self.properties.insert(iri, axioms);
        Ok(())
    }

    /// Reflexive-transitive subsumption between concepts.
    pub fn is_sub_concept_of(&self, sub: &Iri, sup: &Iri) -> bool {
        sub == sup || self.concept_ancestors(sub).contains(sup)
    }

    /// All strict ancestors of a concept.
    pub fn concept_ancestors(&self, iri: &Iri) -> BTreeSet<Iri> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![iri.clone()];
        while let Some(next) = frontier.pop() {
            if let Some(concept) = self.concepts.get(&next) {
                for parent in &concept.parents {
                    if out.insert(parent.clone()) {
                        frontier.push(parent.clone());
                    }
                }
            }
        }
        out
    }

    /// A concept together with everything below it.
    pub fn concept_descendants_inclusive(&self, iri: &Iri) -> BTreeSet<Iri> {
        let mut out = BTreeSet::new();
        out.insert(iri.clone());
        // The hierarchy is small; a fixpoint sweep keeps this dependency-free.
        loop {
            let before = out.len();
            for concept in self.concepts.values() {
                if concept.parents.iter().any(|p| out.contains(p)) {
                    out.insert(concept.iri());
                }
            }
            if out.len() == before {
                return out;
            }
        }
    }

    /// Reflexive-transitive subsumption between properties.
    pub fn is_sub_property_of(&self, sub: &Iri, sup: &Iri) -> bool {
        sub == sup || self.property_ancestors(sub).contains(sup)
    }

    pub fn property_ancestors(&self, iri: &Iri) -> BTreeSet<Iri> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![iri.clone()];
        while let Some(next) = frontier.pop() {
            if let Some(axioms) = self.properties.get(&next) {
                for parent in &axioms.parents {
                    if out.insert(parent.clone()) {
                        frontier.push(parent.clone());
                    }
                }
            }
        }
        out
    }

    /// Internal-consistency scan: hierarchy cycles and property flag
    /// combinations that make no sense together.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        for (iri, _) in &self.concepts {
            if self.concept_ancestors(iri).contains(iri) {
                issues.push(format!("concept `{iri}` is its own strict ancestor"));
            }
        }
        for (iri, axioms) in &self.properties {
            if self.property_ancestors(iri).contains(iri) {
                issues.push(format!("property `{iri}` is its own strict ancestor"));
            }
            if axioms.symmetric {
                if let Some(max) = &axioms.max_cardinality {
                    if max.limit <= 1 {
                        issues.push(format!(
                            "property `{iri}` is symmetric but effectively functional (max {} {})",
                            max.limit, max.filler
                        ));
                    }
                }
            }
        }
        issues
    }
}

/// Builds the built-in terminology.
pub fn builtin_tbox() -> TBox {
    let mut tbox = TBox::default();

    let concept = |ns: &str, name: &str, parents: &[Iri]| Concept {
        namespace: ns.to_string(),
        local_name: name.to_string(),
        parents: parents.iter().cloned().collect(),
    };

    let concepts = [
        // Top-level alignment stubs.
        concept(vocab::DUL_NS, "Object", &[]),
        concept(vocab::DUL_NS, "PhysicalObject", &[vocab::dul_object()]),
        concept(vocab::DUL_NS, "Quality", &[]),
        // Scene description core.
        concept(vocab::USD_NS, "Prim", &[vocab::dul_object()]),
        concept(vocab::USD_NS, "Shape", &[vocab::dul_quality()]),
        concept(vocab::USD_NS, "CubeShape", &[vocab::shape()]),
        concept(vocab::USD_NS, "TypedSchema", &[]),
        concept(vocab::USD_NS, "APISchema", &[]),
        concept(vocab::USD_NS, "WithXform", &[]),
        // Typed schema concepts mirror schema inheritance.
        concept(vocab::USD_NS, "Xformable", &[vocab::typed_schema_concept()]),
        concept(vocab::USD_NS, "Xform", &[vocab::schema_individual("Xformable")]),
        concept(vocab::USD_NS, "Gprim", &[vocab::schema_individual("Xformable")]),
        concept(vocab::USD_NS, "Cube", &[vocab::schema_individual("Gprim")]),
        concept(vocab::USD_NS, "PhysicsJoint", &[vocab::typed_schema_concept()]),
        concept(
            vocab::USD_NS,
            "PhysicsRevoluteJoint",
            &[vocab::schema_individual("PhysicsJoint")],
        ),
        concept(vocab::USD_NS, "PhysicsMassAPI", &[vocab::api_schema_concept()]),
        concept(vocab::USD_NS, "RdfAPI", &[vocab::api_schema_concept()]),
        concept(vocab::USD_NS, "SemanticTagAPI", &[vocab::api_schema_concept()]),
        // Container state vocabulary.
        concept(vocab::USD_NS, "Box", &[vocab::physical_object()]),
        concept(vocab::USD_NS, "Flap", &[vocab::physical_object()]),
        concept(vocab::USD_NS, "Opened", &[]),
        concept(vocab::USD_NS, "Closed", &[]),
        concept(vocab::USD_NS, "Joint", &[vocab::prim()]),
    ];
    for c in concepts {
        tbox.insert_concept(c).expect("built-in concepts are distinct");
    }

    let mut prop = |iri: Iri, axioms: PropertyAxioms| {
        tbox.insert_property(iri, axioms)
            .expect("built-in properties are distinct");
    };

    prop(
        vocab::has_quality(),
        PropertyAxioms {
            range: Some(vocab::dul_quality()),
            max_cardinality: Some(MaxCardinality {
                limit: 1,
                filler: vocab::shape(),
            }),
            ..Default::default()
        },
    );
    prop(
        vocab::has_part(),
        PropertyAxioms {
            transitive: true,
            ..Default::default()
        },
    );
    prop(vocab::describes(), PropertyAxioms::default());
    prop(
        vocab::has_shape(),
        PropertyAxioms {
            parents: [vocab::has_quality()].into(),
            domain: Some(vocab::physical_object()),
            range: Some(vocab::shape()),
            ..Default::default()
        },
    );
    prop(
        vocab::has_connection(),
        PropertyAxioms {
            parents: [vocab::has_connection_transitive()].into(),
            symmetric: true,
            ..Default::default()
        },
    );
    prop(
        vocab::has_connection_transitive(),
        PropertyAxioms {
            transitive: true,
            ..Default::default()
        },
    );
    prop(
        vocab::property_iri("physics:body0"),
        PropertyAxioms {
            parents: [vocab::has_connection()].into(),
            ..Default::default()
        },
    );
    prop(
        vocab::property_iri("physics:body1"),
        PropertyAxioms {
            parents: [vocab::has_connection()].into(),
            ..Default::default()
        },
    );
    prop(vocab::has_joint_value(), PropertyAxioms::default());
    prop(
        vocab::is_schema_of(),
        PropertyAxioms {
            parents: [vocab::describes()].into(),
            ..Default::default()
        },
    );
    prop(vocab::has_typed_schema(), PropertyAxioms::default());
    prop(vocab::has_api(), PropertyAxioms::default());
    prop(vocab::state_timestamp(), PropertyAxioms::default());

    tbox.rules = vec![
        ClassificationRule {
            target: vocab::opened(),
            quality_property: vocab::has_quality(),
            data_property: vocab::has_joint_value(),
            comparator: Comparator::AtLeast,
            threshold: 0.1,
        },
        ClassificationRule {
            target: vocab::closed(),
            quality_property: vocab::has_quality(),
            data_property: vocab::has_joint_value(),
            comparator: Comparator::LessThan,
            threshold: 0.1,
        },
    ];
    tbox.disjoint = vec![(vocab::opened(), vocab::closed())];
    tbox.lifting = vec![StateLifting {
        container: vocab::box_concept(),
        opened: vocab::opened(),
        closed: vocab::closed(),
    }];
    tbox.joint_schemas = [
        vocab::schema_individual("PhysicsJoint"),
        vocab::schema_individual("PhysicsRevoluteJoint"),
    ]
    .into();

    tbox.builtin = tbox
        .concepts
        .keys()
        .chain(tbox.properties.keys())
        .cloned()
        .collect();
    tbox
}
