//! Well-known IRIs of the built-in vocabulary.
//!
//! Everything the toolkit itself defines lives under [`USD_NS`]. The handful
//! of top-level alignment concepts and properties (Object, PhysicalObject,
//! Quality, hasQuality, hasPart, describes) are stubs under the published
//! DUL namespace so exported graphs line up with stacks that already speak
//! it. Scene individuals live under a caller-chosen base IRI
//! ([`DEFAULT_BASE`] when none is given).

use crate::iri::Iri;

/// Namespace of the built-in scene-description vocabulary.
pub const USD_NS: &str = "https://usdkg.dev/ont/usd#";

/// Namespace of the DOLCE+DnS Ultralite alignment stubs.
pub const DUL_NS: &str = "http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#";

/// Default base IRI for scene individuals.
pub const DEFAULT_BASE: &str = "https://usdkg.dev/scene";

fn usd(local: &str) -> Iri {
    Iri::new(format!("{USD_NS}{local}")).expect("vocabulary local names are IRI-safe")
}

fn dul(local: &str) -> Iri {
    Iri::new(format!("{DUL_NS}{local}")).expect("vocabulary local names are IRI-safe")
}

// Top-level alignment concepts.
pub fn dul_object() -> Iri {
    dul("Object")
}
pub fn physical_object() -> Iri {
    dul("PhysicalObject")
}
pub fn dul_quality() -> Iri {
    dul("Quality")
}

// Top-level alignment properties.
pub fn has_quality() -> Iri {
    dul("hasQuality")
}
pub fn has_part() -> Iri {
    dul("hasPart")
}
pub fn describes() -> Iri {
    dul("describes")
}

// Scene-description concepts.
pub fn prim() -> Iri {
    usd("Prim")
}
pub fn shape() -> Iri {
    usd("Shape")
}
pub fn cube_shape() -> Iri {
    usd("CubeShape")
}
pub fn typed_schema_concept() -> Iri {
    usd("TypedSchema")
}
pub fn api_schema_concept() -> Iri {
    usd("APISchema")
}
pub fn with_xform() -> Iri {
    usd("WithXform")
}
pub fn box_concept() -> Iri {
    usd("Box")
}
pub fn flap() -> Iri {
    usd("Flap")
}
pub fn opened() -> Iri {
    usd("Opened")
}
pub fn closed() -> Iri {
    usd("Closed")
}
pub fn joint_concept() -> Iri {
    usd("Joint")
}

// Scene-description properties.
pub fn has_shape() -> Iri {
    usd("hasShape")
}
pub fn has_connection() -> Iri {
    usd("hasConnection")
}
pub fn has_connection_transitive() -> Iri {
    usd("hasConnectionTransitive")
}
pub fn has_joint_value() -> Iri {
    usd("hasJointValue")
}
pub fn is_schema_of() -> Iri {
    usd("isSchemaOf")
}
pub fn has_typed_schema() -> Iri {
    usd("hasTypedSchema")
}
pub fn has_api() -> Iri {
    usd("hasAPI")
}
/// Bookkeeping data property carrying the latest joint-update sequence
/// number on a joint individual.
pub fn state_timestamp() -> Iri {
    usd("stateTimestamp")
}

/// IRI of the canonical individual standing for a schema (also the IRI of
/// the schema's concept, when one exists): `Xform`, `PhysicsMassAPI`, ...
pub fn schema_individual(name: &str) -> Iri {
    usd(name)
}

/// IRI of a scene property named as authored (`physics:mass`,
/// `semanticTag:semanticLabel`, ...). Colons are fragment-safe.
pub fn property_iri(name: &str) -> Iri {
    usd(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_iris_are_valid_and_distinct() {
        let all = [
            dul_object(),
            physical_object(),
            dul_quality(),
            has_quality(),
            has_part(),
            describes(),
            prim(),
            shape(),
            cube_shape(),
            typed_schema_concept(),
            api_schema_concept(),
            with_xform(),
            box_concept(),
            flap(),
            opened(),
            closed(),
            joint_concept(),
            has_shape(),
            has_connection(),
            has_connection_transitive(),
            has_joint_value(),
            is_schema_of(),
            has_typed_schema(),
            has_api(),
            state_timestamp(),
        ];
        let distinct: std::collections::BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn namespaced_property_names_stay_intact() {
        assert_eq!(
            property_iri("physics:body0").as_str(),
            format!("{USD_NS}physics:body0")
        );
    }
}
