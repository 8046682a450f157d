//! Stratified 10-fold cross-validation of both base classifiers and both
//! prediction strategies on a synthetic dataset.
//!
//! Run: `cargo run --release --example crossval_synth [separability]`

use tehier::synth::pgsb_taxonomy;
use tehier::*;

fn main() -> tehier::Result<()> {
    let separability: f64 = std::env::args().nth(1).map_or(0.3, |s| s.parse().expect("separability"));
    let mut spec = SynthSpec::new(pgsb_taxonomy(), 17);
    spec.per_node = 40;
    spec.separability = separability;
    let data = Dataset::from_sequences(&generate(&spec)?, &KmerConfig::default())?;
    println!("{} sequences, separability {separability}", data.len());

    let bases = [
        BaseConfig::Svm(SvmConfig::new(8.0, 16.0)?),
        BaseConfig::LogReg(LogRegConfig::default()),
    ];
    for base in &bases {
        let reports = crossval_strategies(&data, &spec.taxonomy, &[Strategy::Nllcpn, Strategy::Lcpnb], base, 10, 17)?;
        for r in &reports {
            let levels: Vec<String> = r
                .mean_level_f()
                .iter()
                .map(|f| f.map_or("NA".into(), |v| format!("{v:.3}")))
                .collect();
            println!(
                "{:<6} {:<6}  hP {:.3}  hR {:.3}  hF {:.3} +- {:.3}  per level [{}]",
                r.base.to_string(),
                r.strategy.to_string(),
                r.mean_hp(),
                r.mean_hr(),
                r.mean_hf(),
                r.std_hf(),
                levels.join(" ")
            );
        }
        for w in &reports[0].warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
