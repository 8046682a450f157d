//! Hierarchical precision, recall and F-measure on hand-made predictions.
//!
//! Run: `cargo run --example hier_metrics`

use tehier::metrics::harmonic_f;
use tehier::*;

fn main() -> tehier::Result<()> {
    let tax = Taxonomy::wicker();
    let pairs: Vec<(HierLabel, HierLabel)> = [
        ("1.1.1", "1.1.1"),     // exact
        ("1.1", "1.1.2"),       // stopped one level early
        ("1.1.2", "1.1.1"),     // sibling superfamily
        ("2.1.1.2", "2.1.1.2"), // exact, depth 4
        ("2.2", "2.1.1.9"),     // wrong subclass
        ("1.4.3", "1.4"),       // went one level too deep
    ]
    .iter()
    .map(|(p, t)| Ok((parse_label(p)?, parse_label(t)?)))
    .collect::<tehier::Result<_>>()?;

    for (p, t) in &pairs {
        let ps = label_set(&tax, p)?;
        let ts = label_set(&tax, t)?;
        println!("pred {:<8} true {:<8} |P|={} |T|={} |P&T|={}", p.to_string(), t.to_string(), ps.len(), ts.len(), ps.intersection_len(&ts));
    }
    let m = hier_metrics(&pairs, &tax)?;
    println!("\nhP {:.4}  hR {:.4}  hF {:.4}", m.hp, m.hr, m.hf);
    for (level, f) in m.per_level.iter().enumerate() {
        match f {
            Some(f) => println!("  level {}: hF {:.4}", level + 1, f),
            None => println!("  level {}: undefined", level + 1),
        }
    }
    println!("\nhF(hP=0.908, hR=0.897) = {:.4}", harmonic_f(0.908, 0.897));
    Ok(())
}
