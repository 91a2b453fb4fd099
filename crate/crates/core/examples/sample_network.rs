//! Samples the Insurance network, keeps the variables near the target and
//! splits 90:5:5.
//!
//! ```text
//! cargo run --release --example sample_network [target]
//! ```

use cennet::datagen::{build_candidates, builtin_network, emit_bn, parse_bn, sample_bn};
use cennet::store::{split, SplitRatios};

fn main() -> cennet::Result<()> {
    let target = std::env::args().nth(1).unwrap_or_else(|| "OtherCar".into());
    let bn = builtin_network("insurance")?;
    println!("{}: {} variables, {} edges", bn.name(), bn.len(), bn.dag().n_edges());

    // Emitting and re-parsing gives back the same network.
    assert_eq!(parse_bn(&emit_bn(&bn))?, bn);

    let truth = build_candidates(&bn, &target)?;
    println!("parents of {target}: {:?}", truth.parents_of_target);
    println!("candidates: {:?}", truth.candidate_vars);

    let mut keep = truth.candidate_vars.clone();
    keep.push(target.clone());
    let ds = sample_bn(&bn, 10_000, 42, &target)?.project(&keep)?;
    let ds = split(&ds, SplitRatios::parse("90:5:5")?, 42)?;
    let (tr, va, te) = ds.split_counts();
    let pos = ds.labels().iter().filter(|&&y| y == 1).count();
    println!("rows train/val/test: {tr}/{va}/{te}; P({target} = {}) = {:.3}", ds.positive_label(), pos as f64 / ds.n_rows() as f64);
    Ok(())
}
