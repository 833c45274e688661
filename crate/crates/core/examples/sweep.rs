//! Beta or depth sweep on a small synthetic dataset, written as CSV + SVG.
//! Use the `sweep` subcommand for real datasets.
//!
//! cargo run --release --example sweep -- [beta|layers] [epochs] [out_dir]

use std::path::PathBuf;

use graphmix::data::{encode_node_features, synthetic_dataset, FeatureEncoding};
use graphmix::gnn::ModelConfig;
use graphmix::plot::{sweep_svg, write_svg};
use graphmix::rng::stream;
use graphmix::trainer::{run_sweep, write_sweep_csv, SweepAxis, TrainConfig};

fn main() -> graphmix::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let axis: SweepAxis = args.first().map(String::as_str).unwrap_or("beta").parse()?;
    let epochs = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let out = PathBuf::from(args.get(2).cloned().unwrap_or_else(|| "sweep-out".into()));
    std::fs::create_dir_all(&out).map_err(|e| graphmix::Error::Data(format!("{}: {e}", out.display())))?;

    let parsed = synthetic_dataset("SYNTH", 60, 2, 4, &mut stream(1, &[]));
    let ds = encode_node_features(&parsed, FeatureEncoding::OneHotLabels)?;
    let base = TrainConfig {
        model: ModelConfig {
            hidden: 16,
            ..ModelConfig::default()
        },
        epochs,
        folds: 5,
        runs: 1,
        ..TrainConfig::default()
    };
    let rows = run_sweep(&ds, &base, axis, &mut |r| {
        println!("{:<16} {:<14} {:.3} ± {:.3}", r.method, r.setting, r.mean, r.std)
    })?;
    write_sweep_csv(&rows, &out.join("sweep.csv"))?;
    write_svg(&out.join("sweep.svg"), &sweep_svg(&rows))?;
    println!("wrote {}", out.display());
    Ok(())
}
