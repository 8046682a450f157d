//! Walk the bundled Wicker transposable-element taxonomy and the two
//! dataset-shaped label subsets.
//!
//! Run: `cargo run --example wicker_taxonomy`

use tehier::synth::{pgsb_taxonomy, repbase_taxonomy};
use tehier::Taxonomy;

fn main() {
    let wicker = Taxonomy::wicker();
    for node in wicker.preorder().skip(1) {
        let indent = "  ".repeat(wicker.depth(node) - 1);
        let label = wicker.label(node).unwrap();
        let name = wicker.name(node).unwrap_or("");
        let kind = if wicker.is_leaf(node) { "" } else { " /" };
        println!("{indent}{label} {name}{kind}");
    }
    println!("\nWicker: {} nodes, classes per level {:?}", wicker.len(), wicker.classes_per_level());
    println!("PGSB shape:    {:?}", pgsb_taxonomy().classes_per_level());
    println!("REPBASE shape: {:?}", repbase_taxonomy().classes_per_level());
}
