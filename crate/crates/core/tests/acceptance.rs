//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stderr so it shows even when test output is captured.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tehier::kmer::canonical_feature_order;
use tehier::logreg::{logreg_gradient, logreg_objective};
use tehier::metrics::harmonic_f;
use tehier::strategy::{lcpnb, nllcpn, LocalDistribution};
use tehier::svm::{kkt_violations, train_binary_svm};
use tehier::*;

fn report(criterion: &str, pass: bool, detail: &str) {
    let line = format!("\n[{}] {criterion}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

/// Random taxonomy with depth <= `max_depth` and branching <= `max_branch`.
fn random_taxonomy(rng: &mut ChaCha8Rng, max_depth: usize, max_branch: u32) -> Taxonomy {
    fn grow(rng: &mut ChaCha8Rng, prefix: Vec<u32>, depth_left: usize, max_branch: u32, out: &mut Vec<HierLabel>) {
        let children = if prefix.is_empty() {
            rng.gen_range(1..=max_branch)
        } else if depth_left == 0 {
            0
        } else {
            rng.gen_range(0..=max_branch)
        };
        if children == 0 {
            out.push(HierLabel::new(prefix).unwrap());
            return;
        }
        for c in 1..=children {
            let mut p = prefix.clone();
            p.push(c);
            grow(rng, p, depth_left - 1, max_branch, out);
        }
    }
    let depth = rng.gen_range(1..=max_depth);
    let mut leaves = Vec::new();
    grow(rng, vec![], depth, max_branch, &mut leaves);
    Taxonomy::build_from_labels(&leaves).unwrap()
}

fn all_labels(t: &Taxonomy) -> Vec<HierLabel> {
    t.labels().cloned().collect()
}

// ---------------------------------------------------------------------------

#[test]
fn hf_matches_published_triples() {
    // (dataset, strategy, hR, hP, published hF)
    let table = [
        ("PGSB", "nLLCPN", 0.897, 0.908, 0.903),
        ("REPBASE", "nLLCPN", 0.887, 0.879, 0.883),
        ("PGSB+REPBASE", "nLLCPN", 0.879, 0.882, 0.881),
        ("PGSB", "LCPNB", 0.904, 0.907, 0.905),
        ("REPBASE", "LCPNB", 0.890, 0.881, 0.885),
        ("PGSB+REPBASE", "LCPNB", 0.884, 0.880, 0.882),
    ];
    let worst = table
        .iter()
        .map(|&(_, _, hr, hp, hf)| (harmonic_f(hp, hr) - hf).abs())
        .fold(0.0, f64::max);
    let pass = worst <= 0.001;
    report("hF from published hP/hR (6 triples, tol 0.001)", pass, &format!("max deviation {worst:.5}"));
    assert!(pass);
}

// ---------------------------------------------------------------------------

fn prefix_set(label: &HierLabel) -> BTreeSet<String> {
    let parts: Vec<String> = label.to_string().split('.').map(String::from).collect();
    (1..=parts.len()).map(|n| parts[..n].join(".")).collect()
}

fn oracle_f(pairs: &[(HierLabel, HierLabel)]) -> (f64, f64, f64) {
    let (mut inter, mut np, mut nt) = (0usize, 0usize, 0usize);
    for (p, t) in pairs {
        let (ps, ts) = (prefix_set(p), prefix_set(t));
        inter += ps.intersection(&ts).count();
        np += ps.len();
        nt += ts.len();
    }
    let hp = inter as f64 / np as f64;
    let hr = inter as f64 / nt as f64;
    let hf = if hp + hr > 0.0 { 2.0 * hp * hr / (hp + hr) } else { 0.0 };
    (hp, hr, hf)
}

fn cut(label: &HierLabel, level: usize) -> HierLabel {
    HierLabel::new(label.path()[..level.min(label.depth())].to_vec()).unwrap()
}

#[test]
fn metrics_match_set_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    let mut mismatches = 0;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let tax = random_taxonomy(&mut rng, 4, 3);
        let labels = all_labels(&tax);
        let n = rng.gen_range(1..=25);
        let pairs: Vec<(HierLabel, HierLabel)> = (0..n)
            .map(|_| (labels.choose(&mut rng).unwrap().clone(), labels.choose(&mut rng).unwrap().clone()))
            .collect();
        let got = hier_metrics(&pairs, &tax).unwrap();
        let (hp, hr, hf) = oracle_f(&pairs);
        let mut diffs = vec![(got.hp - hp).abs(), (got.hr - hr).abs(), (got.hf - hf).abs()];
        let mut levels_ok = got.per_level.len() == tax.max_depth();
        for level in 1..=tax.max_depth() {
            let kept: Vec<_> = pairs
                .iter()
                .filter(|(_, t)| t.depth() >= level)
                .map(|(p, t)| (cut(p, level), cut(t, level)))
                .collect();
            let want = (!kept.is_empty()).then(|| oracle_f(&kept).2);
            match (got.per_level.get(level - 1).copied().flatten(), want) {
                (Some(a), Some(b)) => diffs.push((a - b).abs()),
                (None, None) => {}
                _ => levels_ok = false,
            }
        }
        let d = diffs.into_iter().fold(0.0, f64::max);
        worst = worst.max(d);
        if d > 1e-12 || !levels_ok {
            mismatches += 1;
        }
    }
    let pass = mismatches == 0;
    report(
        "hierarchical metrics vs set oracle (1000 lists, 1e-12)",
        pass,
        &format!("{mismatches} mismatches, max deviation {worst:e}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

/// Random local distributions: the root is always trained, other internal
/// nodes with probability 0.8. Classes are the children plus the self
/// class, each kept with probability 0.9; weights are small integers so
/// ties are common.
fn random_stub(rng: &mut ChaCha8Rng, tax: &Taxonomy) -> BTreeMap<NodeId, LocalDistribution> {
    let mut out = BTreeMap::new();
    for node in tax.parent_nodes() {
        if node != Taxonomy::ROOT && rng.gen_bool(0.2) {
            continue;
        }
        let mut classes: Vec<NodeId> = tax.children(node).to_vec();
        if node != Taxonomy::ROOT {
            classes.push(node);
        }
        let mut kept: Vec<NodeId> = classes.iter().copied().filter(|_| rng.gen_bool(0.9)).collect();
        if kept.is_empty() {
            kept.push(*classes.choose(rng).unwrap());
        }
        let weights: Vec<u32> = kept.iter().map(|_| rng.gen_range(0..=3)).collect();
        let total: u32 = weights.iter().sum();
        let mut dist: LocalDistribution = kept
            .iter()
            .zip(&weights)
            .map(|(&c, &w)| {
                let p = if total == 0 { 1.0 / kept.len() as f64 } else { w as f64 / total as f64 };
                (c, p)
            })
            .collect();
        dist.shuffle(rng);
        out.insert(node, dist);
    }
    out
}

fn prob(dist: &LocalDistribution, class: NodeId) -> f64 {
    dist.iter().find(|(c, _)| *c == class).map_or(0.0, |(_, p)| *p)
}

/// Enumerate every root-to-node path whose proper ancestors are all
/// trained; score by the mean edge probability, adding the node's own
/// self-class edge when it is trained.
fn lcpnb_oracle(tax: &Taxonomy, stub: &BTreeMap<NodeId, LocalDistribution>) -> HierLabel {
    let mut best: Option<(f64, usize, Vec<u32>)> = None;
    for label in tax.labels() {
        let node = tax.id(label).unwrap();
        let mut chain = vec![node];
        while let Some(p) = tax.parent(*chain.last().unwrap()) {
            chain.push(p);
        }
        chain.reverse(); // root first
        if !chain[..chain.len() - 1].iter().all(|a| stub.contains_key(a)) {
            continue;
        }
        let mut edges: Vec<f64> = chain.windows(2).map(|w| prob(&stub[&w[0]], w[1])).collect();
        if let Some(own) = stub.get(&node) {
            edges.push(prob(own, node));
        }
        let score = edges.iter().sum::<f64>() / edges.len() as f64;
        let key = (score, label.depth(), label.path().to_vec());
        best = match best {
            None => Some(key),
            Some(b) => {
                let better = key.0 > b.0 || (key.0 == b.0 && (key.1 > b.1 || (key.1 == b.1 && key.2 < b.2)));
                Some(if better { key } else { b })
            }
        };
    }
    HierLabel::new(best.unwrap().2).unwrap()
}

/// Greedy descent: argmax with ties to the smallest label; stop on the self
/// class, a leaf, or an untrained node.
fn nllcpn_oracle(tax: &Taxonomy, stub: &BTreeMap<NodeId, LocalDistribution>) -> HierLabel {
    let mut node = Taxonomy::ROOT;
    while let Some(dist) = stub.get(&node) {
        let mut ranked: Vec<(f64, Vec<u32>, NodeId)> = dist
            .iter()
            .map(|&(c, p)| (p, tax.label(c).unwrap().path().to_vec(), c))
            .collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let winner = ranked[0].2;
        if winner == node {
            break;
        }
        node = winner;
    }
    tax.label(node).unwrap().clone()
}

fn strategy_oracle_run(seed: u64, strategy: Strategy) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0;
    let mut ties = 0;
    for _ in 0..1000 {
        let tax = random_taxonomy(&mut rng, 4, 3);
        let stub = random_stub(&mut rng, &tax);
        let local = |n: NodeId| Ok(stub.get(&n).cloned());
        let (got, want) = match strategy {
            Strategy::Lcpnb => (lcpnb(&tax, local).unwrap(), lcpnb_oracle(&tax, &stub)),
            Strategy::Nllcpn => (nllcpn(&tax, local).unwrap(), nllcpn_oracle(&tax, &stub)),
        };
        if stub.values().any(|d| {
            let mut ps: Vec<f64> = d.iter().map(|(_, p)| *p).collect();
            ps.sort_by(f64::total_cmp);
            ps.windows(2).any(|w| w[0] == w[1])
        }) {
            ties += 1;
        }
        if tax.label(got).unwrap() == &want {
            agree += 1;
        }
    }
    (agree, ties)
}

#[test]
fn lcpnb_matches_path_enumeration() {
    let (agree, ties) = strategy_oracle_run(0x1C9B, Strategy::Lcpnb);
    let pass = agree == 1000;
    report(
        "LCPNB vs exhaustive path enumeration (1000 stub taxonomies)",
        pass,
        &format!("{agree}/1000 agree; {ties} cases contain tied probabilities"),
    );
    assert!(pass);
}

#[test]
fn nllcpn_matches_greedy_chain() {
    let (agree, ties) = strategy_oracle_run(0x9EED, Strategy::Nllcpn);
    let pass = agree == 1000;
    report(
        "nLLCPN vs greedy-chain oracle (1000 stub taxonomies)",
        pass,
        &format!("{agree}/1000 agree; {ties} cases contain tied probabilities"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

fn binary_problem(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let y = if i % 2 == 0 { 1.0 } else { -1.0 };
        let x: Vec<f64> = (0..dim).map(|_| 0.6 * y + rng.gen_range(-1.5..1.5)).collect();
        xs.push(x);
        ys.push(y);
    }
    (xs, ys)
}

#[test]
fn smo_passes_kkt_audit() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5E0);
    let mut failures = Vec::new();
    for problem in 0..20 {
        let (xs, ys) = binary_problem(&mut rng, 200, 4);
        let cfg = SvmConfig {
            cost: rng.gen_range(0.1..20.0),
            gamma: rng.gen_range(0.05..2.0),
            kkt_tolerance: 1e-3,
            seed: problem,
            ..SvmConfig::default()
        };
        let model = train_binary_svm(&xs, &ys, &cfg).unwrap();
        let bad = kkt_violations(&model, &xs, &ys, cfg.cost, 1e-3).unwrap();
        if !bad.is_empty() {
            failures.push((problem, bad.len()));
        }
    }
    let pass = failures.is_empty();
    report(
        "SMO KKT audit at 1e-3 (20 problems x 200 points)",
        pass,
        &format!("problems with violations: {failures:?}"),
    );
    assert!(pass);
}

/// Euclidean projection onto `{0 <= a <= c, y'a = 0}` by bisection on the
/// multiplier of the equality constraint.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> { v.iter().zip(y).map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c)).collect() };
    let g = |lambda: f64| -> f64 { at(lambda).iter().zip(y).map(|(a, yi)| a * yi).sum() };
    let (mut lo, mut hi) = (-1e6, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Maximize the soft-margin dual with accelerated projected gradient.
fn qp_oracle(xs: &[Vec<f64>], y: &[f64], c: f64, gamma: f64) -> f64 {
    let n = xs.len();
    let k = |a: &[f64], b: &[f64]| (-gamma * a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>()).exp();
    let q: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| y[i] * y[j] * k(&xs[i], &xs[j])).collect()).collect();
    let lip = q.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let objective = |a: &[f64]| -> f64 {
        let quad: f64 = (0..n).map(|i| (0..n).map(|j| a[i] * q[i][j] * a[j]).sum::<f64>()).sum();
        a.iter().sum::<f64>() - 0.5 * quad
    };
    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0f64;
    for _ in 0..20000 {
        let grad: Vec<f64> = (0..n).map(|i| 1.0 - (0..n).map(|j| q[i][j] * z[j]).sum::<f64>()).collect();
        let step: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi + gi / lip).collect();
        let next = project(&step, y, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next.iter().zip(&a).map(|(nx, ax)| nx + (t - 1.0) / t_next * (nx - ax)).collect();
        if objective(&next) < objective(&a) {
            t = 1.0;
            z = next.clone();
        } else {
            t = t_next;
        }
        a = next;
    }
    objective(&a)
}

#[test]
fn smo_dual_matches_qp_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0A1);
    let mut worst = 0.0f64;
    for problem in 0..20 {
        let n = rng.gen_range(4..=20);
        let (xs, ys) = binary_problem(&mut rng, n, 3);
        let cost = rng.gen_range(0.1..10.0);
        let gamma = rng.gen_range(0.1..2.0);
        let cfg = SvmConfig {
            cost,
            gamma,
            seed: problem,
            ..SvmConfig::default()
        };
        let model = train_binary_svm(&xs, &ys, &cfg).unwrap();
        let oracle = qp_oracle(&xs, &ys, cost, gamma);
        worst = worst.max((model.dual_objective() - oracle).abs());
    }
    let pass = worst <= 1e-3;
    report(
        "SMO dual objective vs projected-gradient QP (20 problems, tol 1e-3)",
        pass,
        &format!("max |difference| {worst:.2e}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

#[test]
fn logreg_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x106);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d = rng.gen_range(1..=8);
        let k = rng.gen_range(2..=5);
        let n = rng.gen_range(1..=12);
        let l2 = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..0.5) };
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let ys: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let w: Vec<f64> = (0..d * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (gw, gb) = logreg_gradient(&w, &b, &xs, &ys, l2).unwrap();
        let analytic: Vec<f64> = gw.into_iter().chain(gb).collect();

        let mut theta: Vec<f64> = w.iter().chain(&b).copied().collect();
        let mut numeric = Vec::with_capacity(theta.len());
        for i in 0..theta.len() {
            let orig = theta[i];
            theta[i] = orig + h;
            let up = logreg_objective(&theta[..d * k], &theta[d * k..], &xs, &ys, l2).unwrap();
            theta[i] = orig - h;
            let down = logreg_objective(&theta[..d * k], &theta[d * k..], &xs, &ys, l2).unwrap();
            theta[i] = orig;
            numeric.push((up - down) / (2.0 * h));
        }
        // Error relative to the gradient's largest component.
        let scale = analytic.iter().map(|g| g.abs()).fold(1e-8, f64::max);
        let err = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        worst = worst.max(err);
    }
    let pass = worst < 1e-5;
    report(
        "logistic-regression gradient vs central differences (50 configs, h=1e-5)",
        pass,
        &format!("max relative error {worst:.2e}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

fn naive_kmers(k: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..k {
        out = out.iter().flat_map(|p| ["A", "C", "G", "T"].map(|b| format!("{p}{b}"))).collect();
    }
    out
}

fn naive_features(seq: &str, ks: &[usize], relative: bool) -> Vec<f64> {
    let mut out = Vec::new();
    for &k in ks {
        let windows: Vec<&str> = (0..seq.len().saturating_sub(k - 1)).map(|i| &seq[i..i + k]).collect();
        let counts: Vec<f64> = naive_kmers(k)
            .iter()
            .map(|m| windows.iter().filter(|w| *w == m).count() as f64)
            .collect();
        let total: f64 = counts.iter().sum();
        out.extend(counts.into_iter().map(|c| if relative && total > 0.0 { c / total } else { c }));
    }
    out
}

#[test]
fn kmer_features_match_substring_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4B3);
    let alphabet: Vec<char> = "ACGTNRYSWKMBDHV".chars().collect();
    let ks = [2, 3, 4];
    let freq = KmerConfig::default();
    let raw = KmerConfig::default().with_normalization(Normalization::RawCounts);
    let names_ok = canonical_feature_order(&freq) == ks.iter().flat_map(|&k| naive_kmers(k)).collect::<Vec<_>>();
    let mut mismatches = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(1..=300);
        let seq: String = (0..len)
            .map(|_| {
                if rng.gen_bool(0.85) {
                    alphabet[rng.gen_range(0..4)]
                } else {
                    alphabet[rng.gen_range(4..alphabet.len())]
                }
            })
            .collect();
        if featurize(&seq, &freq).as_slice() != naive_features(&seq, &ks, true).as_slice()
            || featurize(&seq, &raw).as_slice() != naive_features(&seq, &ks, false).as_slice()
        {
            mismatches += 1;
        }
    }
    let pass = names_ok && mismatches == 0 && freq.dimension() == 336;
    report(
        "k-mer features vs substring-count oracle (1000 sequences, exact)",
        pass,
        &format!("{mismatches} mismatches; column order ok: {names_ok}; dimension {}", freq.dimension()),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

fn pgsb_dataset(seed: u64) -> (Dataset, Taxonomy) {
    let spec = SynthSpec::new(synth::pgsb_taxonomy(), seed);
    let data = Dataset::from_sequences(&generate(&spec).unwrap(), &KmerConfig::default()).unwrap();
    let tax = spec.taxonomy.clone();
    (data, tax)
}

/// Outer 10-fold CV where each fold grid-searches the 3x3 desk lattice
/// with 3 inner folds on its own training part.
#[test]
fn end_to_end_desk_experiment() {
    let start = Instant::now();
    let (data, tax) = pgsb_dataset(2024);
    let mut grid = Grid::desk(0);
    grid.folds = 3;
    let tuned = crossval_tuned(&data, &tax, &grid, &SvmConfig::default(), 10, 2024).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let hf = tuned.report.mean_hf();
    let pass = hf >= 0.90 && elapsed < 600.0;
    report(
        "end-to-end synth PGSB shape, SVM 3x3 grid + LCPNB, 10-fold (hF >= 0.90, < 10 min)",
        pass,
        &format!("mean hF {hf:.4} (std {:.4}), {elapsed:.0}s, selected per fold {:?}", tuned.report.std_hf(), tuned.selected),
    );
    assert!(pass);
}

#[test]
fn lcpnb_competitive_with_nllcpn() {
    let strategies = [Strategy::Nllcpn, Strategy::Lcpnb];
    let bases = [
        BaseConfig::Svm(SvmConfig::new(8.0, 16.0).unwrap()),
        BaseConfig::LogReg(LogRegConfig::default()),
    ];
    let mut lines = Vec::new();
    let mut pass = true;
    for base in &bases {
        let mut gaps = Vec::new();
        let (mut nll_sum, mut lcpnb_sum) = (0.0, 0.0);
        for seed in 1..=5 {
            let (data, tax) = pgsb_dataset(seed);
            let r = crossval_strategies(&data, &tax, &strategies, base, 10, seed).unwrap();
            let (nll, lc) = (r[0].mean_hf(), r[1].mean_hf());
            nll_sum += nll;
            lcpnb_sum += lc;
            gaps.push(lc - nll);
            pass &= lc >= nll - 0.02;
        }
        pass &= lcpnb_sum / 5.0 >= nll_sum / 5.0 - 0.02;
        lines.push(format!(
            "{}: nLLCPN {:.4} LCPNB {:.4}, per-seed LCPNB-nLLCPN min {:+.4}",
            base.kind(),
            nll_sum / 5.0,
            lcpnb_sum / 5.0,
            gaps.iter().copied().fold(f64::INFINITY, f64::min)
        ));
    }
    report("LCPNB hF >= nLLCPN hF - 0.02, SVM and LogReg, 5 seeds", pass, &lines.join("; "));
    assert!(pass);
}

// ---------------------------------------------------------------------------

fn run_cli(dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_tehier"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn tehier");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

/// Run the whole pipeline and collect stdout plus every artifact.
fn pipeline(threads: &str) -> BTreeMap<String, Vec<u8>> {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("grid.json"), r#"{"c": [1, 8], "gamma": [16]}"#).unwrap();
    let t = ["--threads", threads];
    let steps: Vec<Vec<&str>> = vec![
        vec!["synth", "--per-node", "20", "--length", "300-500", "--seed", "7", "--out", "s.fa"],
        vec!["featurize", "--input", "s.fa", "--out", "s.csv"],
        vec!["train", "--input", "s.csv", "--seed", "7", "--out", "m.json"],
        vec!["predict", "--model", "m.json", "--input", "s.fa", "--out", "p.csv"],
        vec!["evaluate", "--pred", "p.csv", "--truth", "s.fa", "--out", "e.csv"],
        vec!["cv", "--input", "s.csv", "--folds", "5", "--seed", "7", "--out", "cv.csv"],
        vec!["compare", "--input", "s.csv", "--folds", "3", "--seed", "7", "--out", "cmp.csv"],
        vec!["gridsearch", "--input", "s.csv", "--grid", "grid.json", "--folds", "3", "--seed", "7", "--out", "g.csv", "--model-out", "gm.json"],
    ];
    let mut out = BTreeMap::new();
    for (i, step) in steps.iter().enumerate() {
        let mut args = step.clone();
        args.extend_from_slice(&t);
        out.insert(format!("{i}-{}-stdout", step[0]), run_cli(d, &args));
    }
    for f in ["s.fa", "s.csv", "m.json", "p.csv", "e.csv", "cv.csv", "cmp.csv", "g.csv", "gm.json"] {
        out.insert(f.to_string(), std::fs::read(d.join(f)).unwrap());
    }
    out
}

#[test]
fn cli_is_deterministic_across_runs_and_threads() {
    let one = pipeline("1");
    let eight = pipeline("8");
    let again = pipeline("8");
    let differing: Vec<&String> = one
        .keys()
        .filter(|k| one[*k] != eight[*k] || eight[*k] != again[*k])
        .collect();
    let pass = differing.is_empty();
    report(
        "CLI byte-identical outputs on rerun and --threads 1 vs 8",
        pass,
        &format!("{} outputs compared; differing: {differing:?}", one.len()),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------

#[test]
fn wicker_and_pgsb_labels_give_table_shape() {
    let wicker = Taxonomy::wicker();
    let pgsb = synth::pgsb_labels();
    let inside = pgsb.iter().all(|l| wicker.contains(l));
    let closure: BTreeSet<HierLabel> = pgsb
        .iter()
        .flat_map(|l| (1..=l.depth()).map(move |d| cut(l, d)))
        .collect();
    let restricted = Taxonomy::build_from_labels(closure.iter()).unwrap();
    let shape = restricted.classes_per_level();
    let repbase = synth::repbase_taxonomy().classes_per_level();
    let pass = inside && shape == vec![2, 4, 3, 5] && repbase == vec![2, 5, 12, 9];
    report(
        "Wicker taxonomy + PGSB label set gives 2/4/3/5 classes per level",
        pass,
        &format!(
            "labels in Wicker: {inside}; PGSB shape {shape:?}; REPBASE shape {repbase:?}; Wicker has {} nodes",
            wicker.len()
        ),
    );
    assert!(pass);
}
