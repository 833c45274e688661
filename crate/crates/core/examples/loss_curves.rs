//! Compares training loss and validation accuracy of GIN with and without
//! input mixing on MUTAG (10-fold, one run) and writes both mean curves.
//!
//! cargo run --release --example loss_curves -- [epochs] [out_dir]

use std::path::PathBuf;
use std::time::Instant;

use graphmix::augment::AugmentKind;
use graphmix::data::{default_data_dir, load_dataset};
use graphmix::mixer::BetaParams;
use graphmix::plot::{loss_curve_svg, write_svg};
use graphmix::trainer::{cross_validate, TrainConfig};

fn main() -> graphmix::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let epochs: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(200);
    let out = PathBuf::from(args.get(1).map(String::as_str).unwrap_or("target/loss_curves"));
    std::fs::create_dir_all(&out).map_err(|e| graphmix::Error::Data(e.to_string()))?;

    let ds = load_dataset(&default_data_dir().join("MUTAG"), "MUTAG")?;
    let mut curves = Vec::new();
    for kind in [AugmentKind::None, AugmentKind::IfMixup] {
        let mut cfg = TrainConfig {
            epochs,
            runs: 1,
            ..TrainConfig::default()
        };
        cfg.augment.kind = kind;
        cfg.augment.beta = BetaParams::new(20.0, 1.0)?;
        let start = Instant::now();
        let log = cross_validate(&ds, &cfg)?;
        let curve = log.mean_curve();
        let last = curve.last().expect("epochs > 0");
        println!(
            "{:<9} final train loss {:.4}  final val acc {:.3}  best-epoch acc {:.3}  ({:.0}s)",
            kind.name(),
            last.train_loss,
            last.val_acc,
            log.mean,
            start.elapsed().as_secs_f64()
        );
        log.write_csv(&out.join(format!("{}.csv", kind.name())))?;
        curves.push((kind.name().to_string(), curve));
    }
    write_svg(&out.join("loss_curves.svg"), &loss_curve_svg(&curves))?;
    println!("wrote {}", out.display());
    Ok(())
}
