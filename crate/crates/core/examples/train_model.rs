//! Trains the 16-5 ReLU classifier on the category data and shows the
//! layer feeding the output unit.
//!
//! ```text
//! cargo run --release --example train_model
//! ```

use cennet::harness::{prepare_data, ExperimentConfig};
use cennet::mlp::{pr_auc, split_signs, train};
use cennet::store::SplitTag;

fn main() -> cennet::Result<()> {
    let cfg: ExperimentConfig = serde_json::from_str(r#"{"dataset": {"kind": "category", "n": 10000, "seed": 42}}"#)?;
    let ds = prepare_data(&cfg)?.dataset;
    let model = train(&ds, &cfg.train)?;
    let sel = model.selection.expect("validation split present");
    println!("architecture {:?}", model.architecture);
    println!("best epoch {} with validation PR-AUC {:.4}", sel.best_epoch, sel.val_pr_auc);

    let test = ds.rows(SplitTag::Test);
    let xs = model.encoder.encode(&ds)?;
    let logits = model.logits(&xs)?;
    let labels = ds.labels();
    let scores: Vec<f64> = test.iter().map(|&r| logits[r]).collect();
    let ys: Vec<u8> = test.iter().map(|&r| labels[r]).collect();
    println!("test PR-AUC {:.4}", pr_auc(&scores, &ys)?);

    let (pos, neg) = split_signs(model.output_weights());
    println!("output weights {:?}, bias {:.3}", model.output_weights(), model.output_bias());
    println!("positive neurons {pos:?}, negative neurons {neg:?}");
    Ok(())
}
