//! Trains GIN on one stratified split of MUTAG and prints the learning curve.
//!
//! cargo run --release --example train_mutag -- [augment] [epochs]
//! where augment is one of none, if_mixup, drop_edge, drop_node, mixup_graph,
//! manifold_mixup, if_mixup_shuffled.

use std::time::Instant;

use graphmix::augment::AugmentKind;
use graphmix::data::{default_data_dir, load_dataset};
use graphmix::rng::stream;
use graphmix::trainer::{fold_split, stratified_folds, train_single_with, TrainConfig};

fn main() -> graphmix::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kind: AugmentKind = args.first().map(String::as_str).unwrap_or("if_mixup").parse()?;
    let epochs: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200);

    let ds = load_dataset(&default_data_dir().join("MUTAG"), "MUTAG")?;
    let mut cfg = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    cfg.augment.kind = kind;

    let folds = stratified_folds(&ds.class_indices(), 10, &mut stream(cfg.seed, &[0]))?;
    let (tr, va) = fold_split(&folds, 0);
    let start = Instant::now();
    let out = train_single_with(
        &ds.subset(&tr),
        &ds.subset(&va),
        &cfg,
        &mut stream(cfg.seed, &[0, 0]),
        &mut |r| {
            if r.epoch % 10 == 0 || r.epoch + 1 == epochs {
                println!(
                    "epoch {:>3}  loss {:.4}  val acc {:.3}",
                    r.epoch, r.train_loss, r.val_acc
                );
            }
        },
    )?;
    let last = out.epochs.last().expect("at least one epoch");
    println!(
        "{}: final loss {:.4}, val acc {:.3}, {:.1}s",
        kind.name(),
        last.train_loss,
        last.val_acc,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
