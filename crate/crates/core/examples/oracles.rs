//! The exact oracles: d-separation on the Alarm graph, and the minimum
//! conditional entropy over valid conditioning sets on a random network.
//!
//! ```text
//! cargo run --release --example oracles
//! ```

use cennet::causal::{d_separated, min_cond_entropy, valid_conditioning_sets, JointTable};
use cennet::datagen::{builtin_network, random_network, RandomNetSpec};

fn main() -> cennet::Result<()> {
    let alarm = builtin_network("alarm")?;
    let dag = alarm.dag();
    let idx = |n: &str| alarm.index_of(n);
    let (lv, hi, lvv) = (idx("LVFAILURE")?, idx("HISTORY")?, idx("LVEDVOLUME")?);
    println!("HISTORY parents: {:?}", dag.parents_of(hi).iter().map(|&p| dag.name(p)).collect::<Vec<_>>());
    println!("LVFAILURE _||_ HISTORY: {}", d_separated(dag, lv, hi, &[])?);
    println!("HISTORY _||_ LVEDVOLUME | LVFAILURE: {}", d_separated(dag, hi, lvv, &[lv])?);

    let bn = random_network(&RandomNetSpec {
        n_nodes: 6,
        seed: 3,
        ..RandomNetSpec::default()
    })?;
    let joint = JointTable::from_bn(&bn)?;
    for x in 0..bn.len() {
        let allowed = valid_conditioning_sets(bn.dag(), x);
        let (best, h) = min_cond_entropy(&joint, x, &allowed)?;
        let pa = bn.dag().parents_of(x);
        println!(
            "{}: H = {:.4}, min over {} sets = {h:.4} at {best:?}, H(x | parents {pa:?}) = {:.4}",
            bn.dag().name(x),
            joint.entropy(&[x]),
            allowed.len(),
            joint.cond_entropy(x, pa)
        );
    }
    Ok(())
}
