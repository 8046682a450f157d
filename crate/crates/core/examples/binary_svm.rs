//! Train a single soft-margin RBF SVM with SMO and inspect it.
//!
//! Run: `cargo run --release --example binary_svm`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tehier::svm::{kkt_violations, train_binary_svm};
use tehier::SvmConfig;

fn main() -> tehier::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // Two noisy rings: inner ring +1, outer ring -1.
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for i in 0..300 {
        let (radius, y) = if i % 2 == 0 { (1.0, 1.0) } else { (2.2, -1.0) };
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = radius + rng.gen_range(-0.35..0.35);
        points.push(vec![r * angle.cos(), r * angle.sin()]);
        labels.push(y);
    }

    for (cost, gamma) in [(0.5, 0.5), (4.0, 1.0), (64.0, 4.0)] {
        let cfg = SvmConfig::new(cost, gamma)?;
        let model = train_binary_svm(&points, &labels, &cfg)?;
        let correct = points
            .iter()
            .zip(&labels)
            .filter(|(x, y)| model.decision(x).map(|f| f * **y > 0.0).unwrap_or(false))
            .count();
        let violations = kkt_violations(&model, &points, &labels, cost, cfg.kkt_tolerance)?;
        println!(
            "C={cost:<4} gamma={gamma:<3}  support vectors {:>3}  train acc {:.3}  dual {:>8.3}  KKT violations {}",
            model.support_vectors().len(),
            correct as f64 / points.len() as f64,
            model.dual_objective(),
            violations.len()
        );
        let platt = model.platt();
        println!(
            "    P(+1 | origin) = {:.3}  P(+1 | (3,0)) = {:.3}  sigmoid A={:.3} B={:.3}",
            model.probability(&[0.0, 0.0])?,
            model.probability(&[3.0, 0.0])?,
            platt.a,
            platt.b
        );
    }
    Ok(())
}
