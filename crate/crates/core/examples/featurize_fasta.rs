//! Parse FASTA records and turn them into k-mer frequency vectors.
//!
//! Run: `cargo run --example featurize_fasta`

use tehier::kmer::canonical_feature_order;
use tehier::{featurize, parse_fasta, KmerConfig, Normalization};

const FASTA: &str = "\
>te_001 1.1.2
TGTTGGAATAGCCAAGGGAAACCTCCCTAACGAGATTGGTTGATAATCATCCCACAACA
>te_002 2.1.1.1
CAGGGGCAGGAACCTTCAGAACGTGCCTGAGTTAATTATTTCACAAATGNNNNNACCGTA
>te_003
ACGTTGCA
";

fn main() -> tehier::Result<()> {
    let records = parse_fasta(FASTA.as_bytes())?;
    let freq = KmerConfig::default();
    let raw = KmerConfig::new(vec![2], Normalization::RawCounts)?;
    let names = canonical_feature_order(&freq);
    println!("{} features ({})", freq.dimension(), freq.fingerprint());

    for rec in &records {
        let v = featurize(&rec.residues, &freq);
        let counts = featurize(&rec.residues, &raw);
        let top = (0..16).max_by(|&a, &b| counts[a].total_cmp(&counts[b])).unwrap();
        let label = rec.label.as_ref().map_or("-".to_string(), |l| l.to_string());
        println!(
            "{:<7} label {:<8} len {:>3}  most common 2-mer {} (x{})  f(AA)={:.4} f(AAA)={:.4}",
            rec.id,
            label,
            rec.residues.len(),
            names[top],
            counts[top],
            v[0],
            v[16]
        );
    }
    Ok(())
}
