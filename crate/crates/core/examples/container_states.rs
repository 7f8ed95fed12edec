//! Minimal end-to-end use of the library: compose a scene file, translate
//! it, materialize inferences, and print each container's open/closed state.
//!
//! ```sh
//! cargo run -p usdkg --example container_states -- crates/core/tests/fixtures/box_tagged.usda
//! ```

use usdkg::compose::{compose_source, FsLoader};
use usdkg::reason::{container_states, materialize};
use usdkg::schema::builtin_registry;
use usdkg::tbox::{builtin_tbox, vocab};
use usdkg::translate::translate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .ok_or("usage: container_states <scene.usda>")?;

    let text = std::fs::read_to_string(&path)?;
    let (stage, _warnings) = compose_source(&text, &path, &FsLoader)?;

    let tbox = builtin_tbox();
    let translation = translate(&stage, &tbox, &builtin_registry(), vocab::DEFAULT_BASE)?;

    let mut graph = translation.graph;
    materialize(&mut graph, &tbox)?;

    for (individual, state) in container_states(&graph, &tbox) {
        println!("{individual} is {}", state.as_str());
    }
    Ok(())
}
