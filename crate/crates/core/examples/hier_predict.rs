//! Train a per-parent-node hierarchical model on synthetic data, then
//! compare the greedy and best-path strategies on single sequences.
//!
//! Run: `cargo run --release --example hier_predict`

use tehier::synth::pgsb_taxonomy;
use tehier::*;

fn main() -> tehier::Result<()> {
    let mut spec = SynthSpec::new(pgsb_taxonomy(), 5);
    spec.per_node = 30;
    spec.separability = 0.5;
    let sequences = generate(&spec)?;
    let (train, test): (Vec<_>, Vec<_>) = sequences.into_iter().enumerate().partition(|(i, _)| i % 4 != 0);
    let train: Vec<Sequence> = train.into_iter().map(|(_, s)| s).collect();
    let test: Vec<Sequence> = test.into_iter().map(|(_, s)| s).collect();

    let config = KmerConfig::default();
    let data = Dataset::from_sequences(&train, &config)?;
    let base = BaseConfig::Svm(SvmConfig::new(8.0, 16.0)?);
    let model = train_hier(&data.points, &data.labels, &spec.taxonomy, &config, &base)?;
    println!("trained on {} sequences; untrained parents: {:?}", data.len(), model.untrained_nodes());

    // Save and reload through JSON.
    let mut buf = Vec::new();
    model.save(&mut buf)?;
    let model = HierModel::load(buf.as_slice())?;
    println!("model file: {} bytes", buf.len());

    let sample = &test[0];
    let x = featurize(&sample.residues, &config);
    println!("\nsequence {} (true label {})", sample.id, sample.label.as_ref().unwrap());
    let mut paths = model.path_scores(&x)?;
    paths.sort_by(|a, b| b.score.total_cmp(&a.score));
    for p in paths.iter().take(5) {
        let edges: Vec<String> = p.edges.iter().map(|e| format!("{e:.2}")).collect();
        println!("  {:<9} score {:.3}  edges [{}]", p.terminal.to_string(), p.score, edges.join(", "));
    }
    println!("  nLLCPN -> {}", model.predict_nllcpn(&x)?);
    println!("  LCPNB  -> {}", model.predict_lcpnb(&x)?);

    let truth: Vec<HierLabel> = test.iter().map(|s| s.label.clone().unwrap()).collect();
    for strategy in [Strategy::Nllcpn, Strategy::Lcpnb] {
        let predicted = model.predict_sequences(strategy, &test)?;
        let pairs: Vec<_> = predicted.into_iter().zip(truth.iter().cloned()).collect();
        let m = hier_metrics(&pairs, &spec.taxonomy)?;
        println!("held-out {strategy}: hP {:.3} hR {:.3} hF {:.3}", m.hp, m.hr, m.hf);
    }
    Ok(())
}
