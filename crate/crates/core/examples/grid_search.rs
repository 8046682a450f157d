//! Pick SVM cost and RBF width by cross-validated hierarchical F-measure,
//! then train the final model.
//!
//! Run: `cargo run --release --example grid_search`

use tehier::grid::CellStatus;
use tehier::synth::pgsb_taxonomy;
use tehier::*;

fn main() -> tehier::Result<()> {
    let mut spec = SynthSpec::new(pgsb_taxonomy(), 8);
    spec.per_node = 30;
    spec.separability = 0.3;
    let data = Dataset::from_sequences(&generate(&spec)?, &KmerConfig::default())?;

    let mut grid = Grid::desk(8);
    grid.folds = 5;
    let template = SvmConfig::default();
    let result = grid_search(&data, &spec.taxonomy, &grid, &template)?;

    print!("{:>8}", "C \\ g");
    for g in &grid.gamma_values {
        print!("{g:>9}");
    }
    println!();
    for (row, c) in result.cells.chunks(grid.gamma_values.len()).zip(&grid.c_values) {
        print!("{c:>8}");
        for cell in row {
            match (&cell.status, cell.mean_hf) {
                (CellStatus::Ok, Some(hf)) => print!("{hf:>9.4}"),
                _ => print!("{:>9}", "failed"),
            }
        }
        println!();
    }
    let (c, g) = result.selected.expect("at least one cell succeeded");
    println!("selected C={c} gamma={g}");

    let model = train_final(&data, &spec.taxonomy, &result, &template)?;
    let predicted = model.predict_batch(Strategy::Lcpnb, &data.points)?;
    let pairs: Vec<_> = predicted.into_iter().zip(data.labels.iter().cloned()).collect();
    println!("training-set hF with the selected cell: {:.4}", hier_metrics(&pairs, &spec.taxonomy)?.hf);
    Ok(())
}
