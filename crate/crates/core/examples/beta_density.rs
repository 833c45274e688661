//! Tabulates the five Beta densities used for the mixing ratio, checks the
//! sampler against the analytic means and writes CSV + SVG.
//!
//! cargo run --release --example beta_density -- [out_dir]

use std::path::PathBuf;

use graphmix::mixer::{sample_lambda, ABLATION_BETAS};
use graphmix::plot::{beta_density_svg, write_beta_density_csv, write_svg};
use graphmix::rng::stream;

fn main() -> graphmix::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "beta-out".into()));
    std::fs::create_dir_all(&out).map_err(|e| graphmix::Error::Data(format!("{}: {e}", out.display())))?;

    let mut rng = stream(0, &[]);
    for b in ABLATION_BETAS {
        let draws = 100_000;
        let mean = (0..draws).map(|_| sample_lambda(b, &mut rng)).sum::<f64>() / draws as f64;
        println!("{b:<14} analytic mean {:.4}  sampled {mean:.4}", b.mean());
    }
    write_beta_density_csv(&out.join("beta_density.csv"), &ABLATION_BETAS)?;
    write_svg(&out.join("beta_density.svg"), &beta_density_svg(&ABLATION_BETAS)?)?;
    println!("wrote {}", out.display());
    Ok(())
}
