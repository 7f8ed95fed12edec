//! The release gate: one test per acceptance criterion, end to end.
//!
//! Every test prints `ACCEPTANCE <n> <name>: PASS` (or FAIL) so the gate can
//! be read off the test log at a glance. Oracles here are written from
//! scratch against the documented semantics — a matrix-closure check for
//! connectivity, a naive reference translator, and closed-form fact counts
//! for the synthetic apartment — so they fail independently of the code
//! under test.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use usdkg::compose::{compose_source, MemLoader, Stage};
use usdkg::iri::{decode_path, iri_of_path};
use usdkg::kg::{
    apply_joint_update, load_graph, serialize_graph, Fact, Graph, JointUpdate, LiteralValue,
};
use usdkg::reason::{
    container_states, materialize, ContainerState, StateEvent, StateWatcher,
};
use usdkg::schema::{builtin_registry, SchemaRegistry};
use usdkg::tbox::{
    builtin_tbox, generate_tagging_sublayer, load_tbox, tagging_paths, vocab, TBox,
};
use usdkg::translate::translate;
use usdkg::usda::{
    parse_source, print_layer, AttributeValue, Layer, PrimPath, PrimSpec, Property, Specifier,
};
use usdkg::Iri;

const BASE: &str = "https://usdkg.dev/scene";

/// Runs one criterion body and prints its verdict line.
fn criterion(number: u32, name: &str, body: impl FnOnce() + std::panic::UnwindSafe) {
    match std::panic::catch_unwind(body) {
        Ok(()) => println!("ACCEPTANCE {number} {name}: PASS"),
        Err(payload) => {
            println!("ACCEPTANCE {number} {name}: FAIL");
            std::panic::resume_unwind(payload);
        }
    }
}

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {path}: {e}"))
}

fn path(text: &str) -> PrimPath {
    PrimPath::parse(text).unwrap()
}

fn scene_iri(path_text: &str) -> Iri {
    iri_of_path(BASE, &path(path_text)).unwrap()
}

fn untagged_stage() -> Stage {
    let loader = MemLoader::new([]);
    let (stage, warnings) = compose_source(&fixture("box.usda"), "box.usda", &loader).unwrap();
    assert!(warnings.is_empty(), "{warnings:?}");
    stage
}

/// The box fixture under both its source layer and the terminology's
/// generated tagging sublayer.
fn tagged_stage(tbox: &TBox) -> Stage {
    let box_layer = parse_source(&fixture("box.usda"), "box.usda").unwrap();
    let tags_layer = generate_tagging_sublayer(tbox, "tags.usda");
    let loader = MemLoader::new([box_layer, tags_layer]);
    let (stage, warnings) =
        compose_source(&fixture("box_tagged.usda"), "box_tagged.usda", &loader).unwrap();
    assert!(warnings.is_empty(), "{warnings:?}");
    stage
}

fn tagged_graph(tbox: &TBox) -> Graph {
    let translation = translate(&tagged_stage(tbox), tbox, &builtin_registry(), BASE).unwrap();
    assert!(translation.warnings.is_empty(), "{:?}", translation.warnings);
    translation.graph
}

// ---------------------------------------------------------------------------
// 1. Box fixture translates to the exact expected facts.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_1_box_fixture_translates_exactly() {
    criterion(1, "box fixture exactness", || {
        let started = Instant::now();
        let tbox = builtin_tbox();
        let registry = builtin_registry();

        let untagged = translate(&untagged_stage(), &tbox, &registry, BASE)
            .unwrap()
            .graph;
        let tagged = tagged_graph(&tbox);

        let world = scene_iri("/world");
        let boxp = scene_iri("/world/box");
        let joint1 = scene_iri("/world/box/box_flap_1_joint");

        // The IRI scheme must decode back to the authored paths.
        for (iri, expected) in [
            (&world, "/world"),
            (&boxp, "/world/box"),
            (&joint1, "/world/box/box_flap_1_joint"),
        ] {
            assert_eq!(
                decode_path(BASE, iri).unwrap().to_string(),
                expected,
                "IRI {iri} must decode to its path"
            );
        }

        let expected = [
            Fact::edge(world.clone(), vocab::has_part(), boxp.clone()),
            Fact::edge(boxp.clone(), vocab::has_part(), joint1.clone()),
            Fact::edge(
                boxp.clone(),
                vocab::has_api(),
                vocab::schema_individual("PhysicsMassAPI"),
            ),
            Fact::edge(
                joint1.clone(),
                vocab::property_iri("physics:body0"),
                boxp.clone(),
            ),
            Fact::data(
                boxp.clone(),
                vocab::property_iri("physics:mass"),
                AttributeValue::Float(2.79),
            ),
        ];
        for (graph, label) in [(&untagged, "untagged"), (&tagged, "tagged")] {
            for fact in &expected {
                assert!(graph.contains(fact), "{label} graph missing {fact:?}");
            }
            // Class prims contribute vocabulary, never individuals: no fact
            // may mention a tagging-hierarchy IRI.
            for fact in graph.iter() {
                for node in fact.node_iris() {
                    assert!(
                        !node.as_str().contains("_class_"),
                        "{label} graph mentions class prim {node}"
                    );
                }
            }
        }

        // The tag on /world/box resolves through the tagging sublayer.
        assert!(tagged.contains(&Fact::concept(boxp.clone(), vocab::box_concept())));
        assert!(!untagged.contains(&Fact::concept(boxp, vocab::box_concept())));

        assert!(
            started.elapsed() < Duration::from_secs(1),
            "criterion took {:?}",
            started.elapsed()
        );
    });
}

// ---------------------------------------------------------------------------
// 2. Connection closure equals an independent matrix oracle.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_2_connection_closure_matches_matrix_oracle() {
    criterion(2, "connection closure vs. matrix oracle", || {
        let started = Instant::now();
        let tbox = builtin_tbox();
        let mut graph = tagged_graph(&tbox);
        materialize(&mut graph, &tbox).unwrap();

        // Oracle: the fixture's articulation, written down by hand. Each
        // revolute joint touches its two bodies; the closure is computed on
        // a plain boolean matrix, independent of the rule engine.
        let nodes = [
            "/world/box",
            "/world/box_flap_1",
            "/world/box_flap_2",
            "/world/box/box_flap_1_joint",
            "/world/box/box_flap_2_joint",
        ];
        let touches = [(3, 0), (3, 1), (4, 0), (4, 2)];
        let n = nodes.len();
        let mut closure = vec![vec![false; n]; n];
        for (a, b) in touches {
            closure[a][b] = true;
            closure[b][a] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if closure[i][k] {
                    for j in 0..n {
                        if closure[k][j] {
                            closure[i][j] = true;
                        }
                    }
                }
            }
        }

        let expected: BTreeSet<(Iri, Iri)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| closure[i][j])
            .map(|(i, j)| (scene_iri(nodes[i]), scene_iri(nodes[j])))
            .collect();

        let hct = vocab::has_connection_transitive();
        let actual: BTreeSet<(Iri, Iri)> = graph
            .iter()
            .filter_map(|fact| match fact {
                Fact::Edge {
                    subject,
                    property,
                    object,
                } if *property == hct => Some((subject.clone(), object.clone())),
                _ => None,
            })
            .collect();

        assert_eq!(actual, expected, "full connection relation must match");
        // The two headline reachability facts.
        assert!(actual.contains(&(scene_iri("/world/box"), scene_iri("/world/box_flap_1"))));
        assert!(actual.contains(&(
            scene_iri("/world/box_flap_1"),
            scene_iri("/world/box_flap_2")
        )));

        assert!(
            started.elapsed() < Duration::from_secs(1),
            "criterion took {:?}",
            started.elapsed()
        );
    });
}

// ---------------------------------------------------------------------------
// 3. Threshold partition and container lifting.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_3_threshold_partition_and_container_lifting() {
    criterion(3, "threshold partition and lifting", || {
        let tbox = builtin_tbox();

        // Joint classification at the partition's sampled values.
        for (value, expect_opened) in [(0.0, false), (0.05, false), (0.1, true), (0.2, true)] {
            let mut graph = Graph::new();
            let joint = Iri::new("https://usdkg.dev/scene#j").unwrap();
            let quality = Iri::new("https://usdkg.dev/scene#j.quality.Quality").unwrap();
            graph.insert(Fact::edge(
                joint.clone(),
                vocab::has_quality(),
                quality.clone(),
            ));
            graph.insert(Fact::data(
                quality,
                vocab::has_joint_value(),
                AttributeValue::Float(value),
            ));
            materialize(&mut graph, &tbox).unwrap();
            let opened = graph.contains(&Fact::concept(joint.clone(), vocab::opened()));
            let closed = graph.contains(&Fact::concept(joint.clone(), vocab::closed()));
            assert_eq!(opened, expect_opened, "value {value} opened?");
            assert_eq!(closed, !expect_opened, "value {value} closed?");
        }

        // Box lifting over the fixture: both open, both closed, mixed.
        let boxp = scene_iri("/world/box");
        let state_for = |v1: f64, v2: f64| -> ContainerState {
            let mut graph = tagged_graph(&tbox);
            for (joint, value) in [
                ("/world/box/box_flap_1_joint", v1),
                ("/world/box/box_flap_2_joint", v2),
            ] {
                let update = JointUpdate {
                    path: path(joint),
                    value,
                    timestamp: 1.0,
                };
                apply_joint_update(&mut graph, &update, &tbox, BASE).unwrap();
            }
            materialize(&mut graph, &tbox).unwrap();
            container_states(&graph, &tbox)[&boxp]
        };
        assert_eq!(state_for(0.2, 0.3), ContainerState::Opened);
        assert_eq!(state_for(0.0, 0.05), ContainerState::Closed);
        assert_eq!(state_for(0.0, 0.2), ContainerState::Unlabeled);
    });
}

// ---------------------------------------------------------------------------
// 4. Translator equals a naive reference over random stages.
// ---------------------------------------------------------------------------

/// A from-scratch restatement of the translation rules, structured as a
/// single pass with inline decisions — no shared code with the translator
/// beyond the vocabulary and IRI primitives.
fn reference_translate(
    stage: &Stage,
    tbox: &TBox,
    registry: &SchemaRegistry,
    base: &str,
) -> BTreeSet<Fact> {
    let mut out = BTreeSet::new();

    // Class prims carrying concept coordinates are tag targets.
    let mut tag_targets: BTreeMap<String, Iri> = BTreeMap::new();
    for prim in stage.iter().filter(|p| !p.is_concrete()) {
        let text_attr = |names: [&str; 2]| {
            names.iter().find_map(|name| {
                prim.property(name).and_then(|p| match &p.value {
                    AttributeValue::Str(s) => Some(s.clone()),
                    _ => None,
                })
            })
        };
        let namespace = text_attr(["rdf:namespace", "rdf:ns"]);
        let concept_name = text_attr(["rdf:conceptName", "rdf:name"]);
        if let (Some(ns), Some(name)) = (namespace, concept_name) {
            if let Ok(concept) = Iri::in_namespace(&ns, &name) {
                tag_targets.insert(prim.path.to_string(), concept);
            }
        }
    }

    let rule_attrs: BTreeMap<String, Iri> = tbox
        .rules
        .iter()
        .map(|r| (r.data_property.local_name().to_string(), r.data_property.clone()))
        .collect();

    for prim in stage.iter().filter(|p| p.is_concrete()) {
        let subject = iri_of_path(base, &prim.path).unwrap();
        out.insert(Fact::concept(subject.clone(), vocab::prim()));
        if let Some(schema) = &prim.typed_schema {
            out.insert(Fact::edge(
                subject.clone(),
                vocab::has_typed_schema(),
                vocab::schema_individual(schema),
            ));
        }
        for api in &prim.api_schemas {
            out.insert(Fact::edge(
                subject.clone(),
                vocab::has_api(),
                vocab::schema_individual(api),
            ));
        }
        for concept in registry.applied_concepts(prim.typed_schema.as_deref(), &prim.api_schemas) {
            out.insert(Fact::concept(subject.clone(), concept));
        }
        for child in &prim.child_paths {
            if stage.get(child).is_some_and(|c| c.is_concrete()) {
                out.insert(Fact::edge(
                    subject.clone(),
                    vocab::has_part(),
                    iri_of_path(base, child).unwrap(),
                ));
            }
        }
        for property in &prim.properties {
            if let AttributeValue::PathList(targets) = &property.value {
                for target in targets {
                    if property.name == "semanticTag:semanticLabel" {
                        if let Some(concept) = tag_targets.get(&target.to_string()) {
                            out.insert(Fact::concept(subject.clone(), concept.clone()));
                        }
                    } else {
                        out.insert(Fact::edge(
                            subject.clone(),
                            vocab::property_iri(&property.name),
                            iri_of_path(base, target).unwrap(),
                        ));
                    }
                }
            } else if property.name == "xformOpOrder" {
                let kind = registry
                    .quality_binding(prim.typed_schema.as_deref(), &prim.api_schemas)
                    .unwrap_or_else(vocab::shape);
                let quality = Iri::new(format!("{subject}.quality.Shape")).unwrap();
                out.insert(Fact::edge(subject.clone(), vocab::has_shape(), quality.clone()));
                out.insert(Fact::concept(quality, kind));
            } else if property.name == "xformOp:transform" {
                out.insert(Fact::concept(subject.clone(), vocab::with_xform()));
            } else if rule_attrs.contains_key(property.name.as_str())
                && property.value.as_number().is_some()
            {
                let quality = Iri::new(format!("{subject}.quality.Quality")).unwrap();
                out.insert(Fact::edge(
                    subject.clone(),
                    vocab::has_quality(),
                    quality.clone(),
                ));
                out.insert(Fact::data(
                    quality,
                    rule_attrs[property.name.as_str()].clone(),
                    property.value.clone(),
                ));
            } else {
                out.insert(Fact::data(
                    subject.clone(),
                    vocab::property_iri(&property.name),
                    property.value.clone(),
                ));
            }
        }
    }
    out
}

/// Builds a random well-formed single-layer stage of at most 12 prims.
fn random_stage(rng: &mut ChaCha8Rng) -> Stage {
    let count = rng.gen_range(1..=12);
    let mut parents: Vec<Option<usize>> = vec![None];
    for i in 1..count {
        parents.push(if rng.gen_bool(0.6) {
            Some(rng.gen_range(0..i))
        } else {
            None
        });
    }
    let mut paths: Vec<PrimPath> = Vec::new();
    for (i, parent) in parents.iter().enumerate() {
        let name = format!("p{i}");
        let p = match parent {
            Some(j) => paths[*j].child(&name).unwrap(),
            None => PrimPath::parse(&format!("/{name}")).unwrap(),
        };
        paths.push(p);
    }

    let round2 = |x: f64| (x * 100.0).round() / 100.0;
    let mut specs: Vec<PrimSpec> = Vec::new();
    for i in 0..count {
        let specifier = if rng.gen_bool(0.25) {
            Specifier::Class
        } else {
            Specifier::Def
        };
        let typed_schema = match rng.gen_range(0..6) {
            0 => None,
            1 => Some("Cube"),
            2 => Some("PhysicsRevoluteJoint"),
            3 => Some("Widget"),
            _ => Some("Xform"),
        }
        .map(str::to_string);
        let mut api_schemas = Vec::new();
        for (api, chance) in [
            ("SemanticTagAPI", 0.25),
            ("PhysicsMassAPI", 0.2),
            ("RdfAPI", 0.2),
        ] {
            if rng.gen_bool(chance) {
                api_schemas.push(api.to_string());
            }
        }

        let mut properties: Vec<Property> = Vec::new();
        let mut attr = |name: &str, value: AttributeValue| {
            properties.push(Property {
                name: name.to_string(),
                value,
            });
        };
        if specifier == Specifier::Class {
            // Sometimes a complete tag target, sometimes half of one.
            let roll = rng.gen_range(0..10);
            if roll < 7 || roll == 8 {
                attr(
                    "rdf:namespace",
                    AttributeValue::Str("https://example.org/ont#".into()),
                );
            }
            if roll < 7 || roll == 9 {
                attr(
                    "rdf:conceptName",
                    AttributeValue::Str(format!("C{}", rng.gen_range(0..5))),
                );
            }
        }
        if rng.gen_bool(0.3) {
            attr(
                "physics:mass",
                AttributeValue::Float(round2(rng.gen_range(0.0..10.0))),
            );
        }
        if rng.gen_bool(0.3) {
            attr("size", AttributeValue::Double(round2(rng.gen_range(0.0..2.0))));
        }
        if rng.gen_bool(0.35) {
            attr(
                "hasJointValue",
                AttributeValue::Float(rng.gen_range(0..=20) as f64 / 100.0),
            );
        }
        if rng.gen_bool(0.2) {
            attr("category", AttributeValue::Token("storage".into()));
        }
        if rng.gen_bool(0.2) {
            attr("active", AttributeValue::Bool(rng.gen_bool(0.5)));
        }
        if rng.gen_bool(0.3) {
            attr(
                "xformOpOrder",
                AttributeValue::TokenArray(vec!["xformOp:transform".into()]),
            );
        }
        if rng.gen_bool(0.3) {
            attr(
                "xformOp:transform",
                AttributeValue::Matrix4d([
                    [1.0, 0.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0],
                ]),
            );
        }
        let random_target = |rng: &mut ChaCha8Rng| -> PrimPath {
            if rng.gen_bool(0.2) {
                PrimPath::parse("/nowhere").unwrap()
            } else {
                paths[rng.gen_range(0..count)].clone()
            }
        };
        if rng.gen_bool(0.3) {
            let t = random_target(rng);
            attr("physics:body0", AttributeValue::PathList(vec![t]));
        }
        if rng.gen_bool(0.3) {
            let t = random_target(rng);
            attr("physics:body1", AttributeValue::PathList(vec![t]));
        }
        if rng.gen_bool(0.35) {
            let mut targets = vec![random_target(rng)];
            if rng.gen_bool(0.4) {
                targets.push(random_target(rng));
            }
            targets.dedup();
            attr("semanticTag:semanticLabel", AttributeValue::PathList(targets));
        }
        if rng.gen_bool(0.2) {
            let mut targets = vec![random_target(rng), random_target(rng)];
            targets.dedup();
            attr("custom:ref", AttributeValue::PathList(targets));
        }

        specs.push(PrimSpec {
            specifier,
            typed_schema,
            path: paths[i].clone(),
            children: Vec::new(),
            api_schemas,
            inherits: Vec::new(),
            properties,
        });
    }

    // Assemble the tree (children were generated after their parents).
    for i in (1..count).rev() {
        if let Some(j) = parents[i] {
            let child = specs.remove(i);
            specs[j].children.push(child);
        }
    }
    for spec in &mut specs {
        spec.children.reverse();
    }
    let mut layer = Layer::new("generated.usda");
    layer.root_prims = specs;

    // Through the printer and parser so the stage is exactly what a file
    // would produce.
    let text = print_layer(&layer);
    let loader = MemLoader::new([]);
    let (stage, _warnings) = compose_source(&text, "generated.usda", &loader)
        .unwrap_or_else(|e| panic!("generated layer failed to compose: {e}\n{text}"));
    stage
}

#[test]
fn acceptance_4_translator_matches_naive_reference() {
    criterion(4, "translator vs. naive reference (500 stages)", || {
        let started = Instant::now();
        let tbox = builtin_tbox();
        let registry = builtin_registry();
        let mut rng = ChaCha8Rng::seed_from_u64(0x0acc_e554);

        for case in 0..500 {
            let stage = random_stage(&mut rng);
            let actual: BTreeSet<Fact> = translate(&stage, &tbox, &registry, BASE)
                .unwrap()
                .graph
                .into_iter()
                .collect();
            let expected = reference_translate(&stage, &tbox, &registry, BASE);
            if actual != expected {
                let missing: Vec<_> = expected.difference(&actual).take(5).collect();
                let extra: Vec<_> = actual.difference(&expected).take(5).collect();
                panic!("case {case}: translator disagrees with reference\nmissing: {missing:#?}\nextra: {extra:#?}");
            }
        }

        assert!(
            started.elapsed() < Duration::from_secs(30),
            "criterion took {:?}",
            started.elapsed()
        );
    });
}

// ---------------------------------------------------------------------------
// 5. Reasoner fixpoint properties over random fact sets.
// ---------------------------------------------------------------------------

/// Random facts over the monotone rule fragment. Container state lifting
/// aggregates over *all* connected joints and is closed-world by design
/// (`reason` has a dedicated test pinning that behavior), so the generator
/// leaves out the joint-schema typing edges that would arm it; every other
/// rule — hierarchy, symmetry, transitivity, domain/range, thresholds — is
/// exercised.
fn random_abox(rng: &mut ChaCha8Rng) -> Vec<Fact> {
    let node = |rng: &mut ChaCha8Rng| -> Iri {
        Iri::new(format!("https://usdkg.dev/scene#n{}", rng.gen_range(0..10))).unwrap()
    };
    let concepts = [
        vocab::box_concept(),
        vocab::flap(),
        vocab::cube_shape(),
        vocab::prim(),
        vocab::joint_concept(),
    ];
    let properties = [
        vocab::has_connection(),
        vocab::has_connection_transitive(),
        vocab::has_part(),
        vocab::has_shape(),
        vocab::has_quality(),
        vocab::describes(),
    ];
    let count = rng.gen_range(0..=40);
    (0..count)
        .map(|_| match rng.gen_range(0..5) {
            0 => Fact::concept(
                node(rng),
                concepts[rng.gen_range(0..concepts.len())].clone(),
            ),
            1 | 2 => Fact::edge(
                node(rng),
                properties[rng.gen_range(0..properties.len())].clone(),
                node(rng),
            ),
            3 => Fact::existential(
                node(rng),
                properties[rng.gen_range(0..properties.len())].clone(),
                concepts[rng.gen_range(0..concepts.len())].clone(),
            ),
            _ => Fact::data(
                node(rng),
                vocab::has_joint_value(),
                AttributeValue::Float(rng.gen_range(0..=20) as f64 / 100.0),
            ),
        })
        .collect()
}

#[test]
fn acceptance_5_reasoner_is_idempotent_and_monotone() {
    criterion(5, "reasoner fixpoint properties (500 fact sets)", || {
        let started = Instant::now();
        let tbox = builtin_tbox();
        let mut rng = ChaCha8Rng::seed_from_u64(0x0acc_e555);

        for case in 0..500 {
            let facts = random_abox(&mut rng);
            let extra = random_abox(&mut rng);

            // Idempotence: a second run adds nothing.
            let mut graph: Graph = facts.iter().cloned().collect();
            materialize(&mut graph, &tbox).unwrap();
            let once = graph.clone();
            let report = materialize(&mut graph, &tbox).unwrap();
            assert_eq!(report.added, 0, "case {case}: rerun added facts");
            assert_eq!(graph, once, "case {case}: rerun changed the graph");

            // Monotonicity: closure(A) is contained in closure(A + B).
            let mut larger: Graph = facts.iter().cloned().chain(extra).collect();
            materialize(&mut larger, &tbox).unwrap();
            for fact in once.iter() {
                assert!(
                    larger.contains(fact),
                    "case {case}: adding facts lost {fact:?}"
                );
            }
        }

        assert!(
            started.elapsed() < Duration::from_secs(30),
            "criterion took {:?}",
            started.elapsed()
        );
    });
}

// ---------------------------------------------------------------------------
// 6. Round trips: scene text, graph text, tagging sublayer.
// ---------------------------------------------------------------------------

fn random_kg(rng: &mut ChaCha8Rng) -> Graph {
    let mut graph = Graph::new();
    graph.add_prefix("scene", "https://usdkg.dev/scene#");
    if rng.gen_bool(0.5) {
        graph.add_prefix("usd", vocab::USD_NS);
    }
    let node = |rng: &mut ChaCha8Rng| -> Iri {
        Iri::new(format!("https://usdkg.dev/scene#n{}", rng.gen_range(0..8))).unwrap()
    };
    let round2 = |x: f64| (x * 100.0).round() / 100.0;
    let literal = |rng: &mut ChaCha8Rng| -> LiteralValue {
        match rng.gen_range(0..9) {
            0 => AttributeValue::Float(round2(rng.gen_range(-5.0..5.0))).into(),
            1 => AttributeValue::Double(round2(rng.gen_range(-5.0..5.0))).into(),
            2 => AttributeValue::Bool(rng.gen_bool(0.5)).into(),
            3 => AttributeValue::Str("pipes | quotes \" and\nnewlines\tfit".into()).into(),
            4 => AttributeValue::Token(format!("t{}", rng.gen_range(0..4))).into(),
            5 => AttributeValue::Float3([1.0, round2(rng.gen_range(0.0..1.0)), -2.5]).into(),
            6 => AttributeValue::TokenArray(vec!["a".into(), "b".into()]).into(),
            7 => AttributeValue::PathList(vec![
                PrimPath::parse("/world/box").unwrap(),
                PrimPath::parse("/world/lid").unwrap(),
            ])
            .into(),
            _ => LiteralValue::Opaque {
                lexical: format!("raw|{}|payload", rng.gen_range(0..100)),
                datatype: "customTag".into(),
            },
        }
    };
    for _ in 0..rng.gen_range(0..60) {
        let fact = match rng.gen_range(0..4) {
            0 => Fact::concept(node(rng), vocab::box_concept()),
            1 => Fact::edge(node(rng), vocab::has_connection(), node(rng)),
            2 => Fact::existential(node(rng), vocab::has_quality(), vocab::shape()),
            _ => Fact::data(node(rng), vocab::property_iri("note"), literal(rng)),
        };
        graph.insert(fact);
    }
    graph
}

#[test]
fn acceptance_6_round_trips_are_exact() {
    criterion(6, "round trips (scene, graph, tagging)", || {
        // (a) Scene text: parse -> print -> parse is a fixpoint on the
        // fixture corpus plus the generated tagging sublayer.
        let tags_text = print_layer(&generate_tagging_sublayer(&builtin_tbox(), "tags.usda"));
        let corpus = [
            ("box.usda", fixture("box.usda")),
            ("box_tagged.usda", fixture("box_tagged.usda")),
            ("tags.usda", tags_text),
        ];
        for (name, text) in &corpus {
            let first = parse_source(text, name).unwrap();
            let printed = print_layer(&first);
            let second = parse_source(&printed, name).unwrap();
            assert_eq!(first, second, "{name}: reparse changed the layer");
            assert_eq!(
                printed,
                print_layer(&second),
                "{name}: print is not a fixpoint"
            );
        }

        // (b) Graph text: serialize -> load is exact and byte-stable over
        // random graphs with every fact kind and opaque literals.
        let mut rng = ChaCha8Rng::seed_from_u64(0x0acc_e556);
        for case in 0..200 {
            let graph = random_kg(&mut rng);
            let text = serialize_graph(&graph);
            let loaded = load_graph(&text).unwrap_or_else(|e| panic!("case {case}: {e}\n{text}"));
            assert_eq!(loaded, graph, "case {case}: loaded graph differs");
            assert_eq!(
                serialize_graph(&loaded),
                text,
                "case {case}: serialization unstable"
            );
        }

        // (c) Terminology -> tagging sublayer -> reparse recovers every
        // concept's coordinates, for the built-in and an extended tbox.
        let extended = load_tbox(
            "namespace <https://warehouse.example/ont#>\n\
             concept Pallet subclass-of PhysicalObject\n\
             concept Crate subclass-of Pallet\n\
             concept LoadingBay\n",
        )
        .unwrap();
        for tbox in [builtin_tbox(), extended] {
            let layer = generate_tagging_sublayer(&tbox, "tags.usda");
            let reparsed = parse_source(&print_layer(&layer), "tags.usda").unwrap();
            let mut recovered = BTreeSet::new();
            for prim in reparsed.iter_prims() {
                let text_attr = |name: &str| {
                    prim.properties
                        .iter()
                        .find(|p| p.name == name)
                        .and_then(|p| match &p.value {
                            AttributeValue::Str(s) => Some(s.clone()),
                            _ => None,
                        })
                };
                if let (Some(ns), Some(name)) =
                    (text_attr("rdf:namespace"), text_attr("rdf:conceptName"))
                {
                    recovered.insert((ns, name));
                }
            }
            let expected: BTreeSet<(String, String)> = tbox
                .concepts()
                .map(|c| (c.namespace.clone(), c.local_name.clone()))
                .collect();
            assert_eq!(recovered, expected, "tagging layer lost concepts");
            // And the tag paths index covers every concept.
            assert_eq!(tagging_paths(&tbox).len(), tbox.concepts().count());
        }
    });
}

// ---------------------------------------------------------------------------
// 7. Apartment-scale throughput with closed-form stats.
// ---------------------------------------------------------------------------

struct ApartmentParams {
    rooms: usize,
    furniture_per_room: usize,
    doors_per_furniture: usize,
}

impl ApartmentParams {
    fn prim_count(&self) -> usize {
        let furniture = self.rooms * self.furniture_per_room;
        let doors = furniture * self.doors_per_furniture;
        1 + self.rooms + furniture + 2 * doors
    }
}

/// Emits the apartment layer: rooms of articulated storage furniture, each
/// piece tagged as a container, each door driven by a revolute joint at
/// value zero.
fn apartment_source(params: &ApartmentParams, box_tag: &PrimPath) -> String {
    let identity = "( (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1) )";
    let mut out = String::from("#usda 1.0\n(\n    subLayers = [@tags.usda@]\n)\n\n");
    out.push_str("def Xform \"apartment\"\n{\n");
    for r in 0..params.rooms {
        let _ = writeln!(out, "    def Xform \"room_{r}\"\n    {{");
        for f in 0..params.furniture_per_room {
            let furn = format!("/apartment/room_{r}/furn_{f}");
            let _ = writeln!(
                out,
                "        def Xform \"furn_{f}\" (\n            prepend apiSchemas = [\"SemanticTagAPI\"]\n        ) {{"
            );
            let _ = writeln!(
                out,
                "            matrix4d xformOp:transform = {identity}"
            );
            let _ = writeln!(
                out,
                "            token[] xformOpOrder = [\"xformOp:transform\"]"
            );
            let _ = writeln!(
                out,
                "            rel semanticTag:semanticLabel = <{box_tag}>"
            );
            for d in 0..params.doors_per_furniture {
                let _ = writeln!(out, "            def Cube \"door_{d}\"\n            {{");
                let _ = writeln!(out, "                double size = 0.5");
                let _ = writeln!(
                    out,
                    "                matrix4d xformOp:transform = {identity}"
                );
                let _ = writeln!(
                    out,
                    "                token[] xformOpOrder = [\"xformOp:transform\"]"
                );
                let _ = writeln!(out, "            }}");
                let _ = writeln!(
                    out,
                    "            def PhysicsRevoluteJoint \"joint_{d}\"\n            {{"
                );
                let _ = writeln!(out, "                rel physics:body0 = <{furn}>");
                let _ = writeln!(
                    out,
                    "                rel physics:body1 = <{furn}/door_{d}>"
                );
                let _ = writeln!(out, "                float hasJointValue = 0.0");
                let _ = writeln!(out, "            }}");
            }
            let _ = writeln!(out, "        }}");
        }
        let _ = writeln!(out, "    }}");
    }
    out.push_str("}\n");
    out
}

#[test]
fn acceptance_7_apartment_scale_throughput_and_stats() {
    criterion(7, "apartment-scale throughput and stats", || {
        let params = ApartmentParams {
            rooms: 25,
            furniture_per_room: 8,
            doors_per_furniture: 5,
        };
        assert!(params.prim_count() >= 2000, "generator must hit scale");

        let tbox = builtin_tbox();
        let box_paths = tagging_paths(&tbox);
        let box_tag = &box_paths[&vocab::box_concept()];
        let text = apartment_source(&params, box_tag);

        let started = Instant::now();
        let tags_layer = generate_tagging_sublayer(&tbox, "tags.usda");
        let loader = MemLoader::new([tags_layer]);
        let (stage, warnings) = compose_source(&text, "apartment.usda", &loader).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        let translation = translate(&stage, &tbox, &builtin_registry(), BASE).unwrap();
        assert!(translation.warnings.is_empty());
        let mut graph = translation.graph;
        let translated_stats = graph.stats();
        materialize(&mut graph, &tbox).unwrap();
        let materialized_stats = graph.stats();
        let elapsed = started.elapsed();
        assert!(
            elapsed < Duration::from_secs(10),
            "pipeline took {elapsed:?}"
        );

        // Closed-form expectations, computed from the generator's shape.
        let r = params.rooms;
        let rf = r * params.furniture_per_room;
        let rfd = rf * params.doors_per_furniture;
        let d = params.doors_per_furniture;
        let n = params.prim_count();

        // Translation: every prim is a member of the prim concept; xformed
        // prims (furniture, doors) add a with-xform membership and a typed
        // shape quality; every furniture piece is tagged a container.
        let concepts0 = n + (rf + rfd) + (rf + rfd) + rf;
        // Edges: a typed-schema edge per prim, an API edge per furniture
        // piece, child containment for all non-root prims, a shape-quality
        // edge per xformed prim, a joint-value quality edge per joint, and
        // two body edges per joint.
        let edges0 = n + rf + (n - 1) + (rf + rfd) + rfd + 2 * rfd;
        // Data: door size plus the joint value carried on its quality.
        let data0 = 2 * rfd;
        assert_eq!(translated_stats.concept_facts, concepts0);
        assert_eq!(translated_stats.edge_facts, edges0);
        assert_eq!(translated_stats.data_facts, data0);
        assert_eq!(translated_stats.existential_facts, 0);
        assert_eq!(translated_stats.facts, concepts0 + edges0 + data0);
        // Nodes: prims, one quality per xformed prim and per joint, three
        // typed-schema individuals plus one API individual, and the five
        // concepts used in memberships.
        let nodes0 = n + (rf + rfd) + rfd + 4 + 5;
        assert_eq!(translated_stats.nodes, nodes0);

        // Materialization: memberships per individual, written out from the
        // hierarchy (deduplicated set sizes, not rule firings):
        //   plain prims {Prim, Object}; furniture {Prim, Object, WithXform,
        //   Box, PhysicalObject, Closed}; furniture quality {Shape,
        //   Quality}; doors {Prim, Object, WithXform, PhysicalObject}; door
        //   quality {CubeShape, Shape, Quality}; joints {Prim, Object,
        //   Closed}; joint quality {Quality}.
        let concepts1 =
            2 * (1 + r) + 6 * rf + 2 * rf + 4 * rfd + 3 * rfd + 3 * rfd + rfd;
        // Edges: containment closes transitively (rooms sit 1 step from the
        // root, furniture 2, doors and joints 3); shape edges lift to
        // quality edges; body edges lift through connection and close into
        // a complete relation (self-loops included) on each furniture
        // piece's component of 1 + 2·doors individuals.
        let edges1 = n
            + rf
            + (r + 2 * rf + 3 * rfd + 3 * rfd)
            + (rf + rfd)
            + (rf + rfd + rfd)
            + 2 * rfd
            + 4 * rfd
            + rf * (1 + 2 * d) * (1 + 2 * d);
        assert_eq!(materialized_stats.concept_facts, concepts1);
        assert_eq!(materialized_stats.edge_facts, edges1);
        assert_eq!(materialized_stats.data_facts, data0);
        assert_eq!(materialized_stats.existential_facts, 0);
        // Four concept IRIs join the node set: Object, PhysicalObject,
        // Quality, and the closed label.
        assert_eq!(materialized_stats.nodes, nodes0 + 4);

        // Spot semantics at scale: every furniture piece reads closed.
        let states = container_states(&graph, &tbox);
        assert_eq!(states.len(), rf);
        assert!(states.values().all(|s| *s == ContainerState::Closed));

        println!(
            "  apartment: {} prims, {} facts translated, {} facts materialized in {:?}",
            n, translated_stats.facts, materialized_stats.facts, elapsed
        );
    });
}

// ---------------------------------------------------------------------------
// 8. Watch loop reclassifies the box exactly once per transition.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_8_watch_loop_reclassifies_once_per_transition() {
    criterion(8, "watch loop end to end", || {
        let tbox = builtin_tbox();
        let graph = tagged_graph(&tbox);
        let mut watcher = StateWatcher::new(graph, tbox.clone(), BASE, false).unwrap();

        let boxp = scene_iri("/world/box");
        assert_eq!(
            container_states(watcher.graph(), &tbox)[&boxp],
            ContainerState::Closed,
            "authored joint values of zero must read closed"
        );

        let box_events = |events: &[StateEvent], boxp: &Iri| -> Vec<Iri> {
            events
                .iter()
                .filter(|e| &e.individual == boxp)
                .map(|e| e.label.clone())
                .collect()
        };

        // Open both flaps: exactly one box event, to the opened label.
        let mut opened_events = Vec::new();
        for (i, joint) in [
            "/world/box/box_flap_1_joint",
            "/world/box/box_flap_2_joint",
        ]
        .iter()
        .enumerate()
        {
            let events = watcher
                .apply(&JointUpdate {
                    path: path(joint),
                    value: 0.3,
                    timestamp: (i + 1) as f64,
                })
                .unwrap();
            opened_events.extend(box_events(&events, &boxp));
        }
        assert_eq!(opened_events, vec![vocab::opened()]);

        // Close both: exactly one box event, to the closed label.
        let mut closed_events = Vec::new();
        for (i, joint) in [
            "/world/box/box_flap_1_joint",
            "/world/box/box_flap_2_joint",
        ]
        .iter()
        .enumerate()
        {
            let events = watcher
                .apply(&JointUpdate {
                    path: path(joint),
                    value: 0.0,
                    timestamp: (i + 3) as f64,
                })
                .unwrap();
            closed_events.extend(box_events(&events, &boxp));
        }
        assert_eq!(closed_events, vec![vocab::closed()]);
    });
}
