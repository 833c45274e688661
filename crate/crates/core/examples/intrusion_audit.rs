//! Audits random MUTAG mixes for label-conflicting collisions and recovery
//! failures.
//!
//! cargo run --release --example intrusion_audit -- [trials] [alpha] [beta]

use graphmix::data::{default_data_dir, load_dataset};
use graphmix::mixer::BetaParams;
use graphmix::recovery::intrusion_audit;
use graphmix::rng::stream;

fn main() -> graphmix::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let trials = args.first().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let alpha = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let beta = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2.0);

    let ds = load_dataset(&default_data_dir().join("MUTAG"), "MUTAG")?;
    let report = intrusion_audit(&ds, trials, BetaParams::new(alpha, beta)?, &mut stream(0, &[]))?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    println!("{}", if report.passed() { "PASS" } else { "FAIL" });
    Ok(())
}
