//! Repeated stratified 10-fold cross-validation on MUTAG.
//!
//! cargo run --release --example cross_validate -- [augment] [epochs] [runs]

use graphmix::augment::AugmentKind;
use graphmix::data::{default_data_dir, load_dataset};
use graphmix::trainer::{cross_validate_with, TrainConfig};

fn main() -> graphmix::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kind: AugmentKind = args.first().map(String::as_str).unwrap_or("if_mixup").parse()?;
    let epochs = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let runs = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    let ds = load_dataset(&default_data_dir().join("MUTAG"), "MUTAG")?;
    let mut cfg = TrainConfig {
        epochs,
        runs,
        ..TrainConfig::default()
    };
    cfg.augment.kind = kind;
    let log = cross_validate_with(&ds, &cfg, &mut |run, fold, r| {
        if r.epoch + 1 == epochs {
            println!("run {run} fold {fold}: val acc {:.3}", r.val_acc);
        }
    })?;
    println!(
        "{}: {:.3} ± {:.3} at the best mean epoch {:?}, {:.3} ± {:.3} at the last",
        kind.name(),
        log.mean,
        log.std,
        log.run_best_epochs,
        log.final_mean,
        log.final_std
    );
    Ok(())
}
