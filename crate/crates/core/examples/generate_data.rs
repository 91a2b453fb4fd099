//! Draws the three synthetic benchmarks and prints their shape, label
//! balance and the variables that truly drive the label.
//!
//! ```text
//! cargo run --release --example generate_data
//! ```

use cennet::datagen::{generate, SyntheticKind, SyntheticSpec};

fn main() -> cennet::Result<()> {
    for kind in [
        SyntheticKind::NonlinearAdditive,
        SyntheticKind::NonlinearNonadditive,
        SyntheticKind::Category,
    ] {
        let g = generate(&SyntheticSpec::new(kind, 5_000, 42))?;
        let ds = &g.dataset;
        let pos = ds.labels().iter().filter(|&&y| y == 1).count();
        println!("{}: {} rows, features {:?}", kind.as_str(), ds.n_rows(), ds.feature_names());
        println!("  positive rate {:.3}", pos as f64 / ds.n_rows() as f64);
        println!("  important sets {:?}", g.ground_truth.important_sets);
        if g.ground_truth.per_row.is_some() {
            println!("  row 0 important {:?}", g.ground_truth.important_for_row(0));
        }
    }
    Ok(())
}
