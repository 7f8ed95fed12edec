//! Canonical text form for layers. `parse_source(print_layer(l))` yields a
//! layer structurally equal to `l`.

use std::fmt::Write;

use super::value::AttributeValue;
use super::{Layer, PrimSpec, Property, PropertyKind, Specifier};

/// Renders a value in its canonical source form.
pub fn print_value(value: &AttributeValue) -> String {
    value.to_string()
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn print_property(out: &mut String, prop: &Property, depth: usize) {
    indent(out, depth);
    match prop.kind() {
        PropertyKind::Relationship => {
            let _ = writeln!(out, "rel {} = {}", prop.name, prop.value);
        }
        PropertyKind::Attribute => {
            let _ = writeln!(
                out,
                "{} {} = {}",
                prop.value.datatype().keyword(),
                prop.name,
                prop.value
            );
        }
    }
}

fn print_prim(out: &mut String, prim: &PrimSpec, depth: usize) {
    indent(out, depth);
    let keyword = match prim.specifier {
        Specifier::Def => "def",
        Specifier::Over => "over",
        Specifier::Class => "class",
    };
    out.push_str(keyword);
    if let Some(schema) = &prim.typed_schema {
        let _ = write!(out, " {schema}");
    }
    let _ = write!(out, " \"{}\"", prim.name());

    if !prim.api_schemas.is_empty() || !prim.inherits.is_empty() {
        out.push_str(" (\n");
        if !prim.api_schemas.is_empty() {
            indent(out, depth + 1);
            let quoted: Vec<String> =
                prim.api_schemas.iter().map(|s| format!("\"{s}\"")).collect();
            let _ = writeln!(out, "prepend apiSchemas = [{}]", quoted.join(", "));
        }
        if !prim.inherits.is_empty() {
            indent(out, depth + 1);
            if prim.inherits.len() == 1 {
                let _ = writeln!(out, "inherits = <{}>", prim.inherits[0]);
            } else {
                let targets: Vec<String> =
                    prim.inherits.iter().map(|p| format!("<{p}>")).collect();
                let _ = writeln!(out, "inherits = [{}]", targets.join(", "));
            }
        }
        indent(out, depth);
        out.push_str(")\n");
    } else {
        out.push('\n');
    }

    indent(out, depth);
    out.push_str("{\n");
    for prop in &prim.properties {
        print_property(out, prop, depth + 1);
    }
    for child in &prim.children {
        print_prim(out, child, depth + 1);
    }
    indent(out, depth);
    out.push_str("}\n");
}

/// Renders a full layer document, header line included.
pub fn print_layer(layer: &Layer) -> String {
    let mut out = String::from("#usda 1.0\n");
    if !layer.sublayer_refs.is_empty() {
        out.push_str("(\n");
        indent(&mut out, 1);
        let refs: Vec<String> = layer
            .sublayer_refs
            .iter()
            .map(|r| format!("@{r}@"))
            .collect();
        let _ = writeln!(out, "subLayers = [{}]", refs.join(", "));
        out.push_str(")\n");
    }
    for prim in &layer.root_prims {
        out.push('\n');
        print_prim(&mut out, prim, 0);
    }
    out
}
