//! Trains on MUTAG, saves a checkpoint, reloads it and exports graph
//! embeddings of the whole dataset.
//!
//! cargo run --release --example export_embeddings -- [epochs] [out_dir]

use std::path::PathBuf;

use graphmix::data::{default_data_dir, load_dataset};
use graphmix::gnn::Checkpoint;
use graphmix::rng::stream;
use graphmix::trainer::{
    accuracy, export_embeddings, fold_split, save_checkpoint, stratified_folds, train_single, TrainConfig,
};

fn main() -> graphmix::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let epochs = args.first().and_then(|s| s.parse().ok()).unwrap_or(50);
    let out = PathBuf::from(args.get(1).cloned().unwrap_or_else(|| "embeddings-out".into()));
    std::fs::create_dir_all(&out).map_err(|e| graphmix::Error::Data(format!("{}: {e}", out.display())))?;

    let ds = load_dataset(&default_data_dir().join("MUTAG"), "MUTAG")?;
    let cfg = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    let folds = stratified_folds(&ds.class_indices(), 10, &mut stream(cfg.seed, &[0]))?;
    let (tr, va) = fold_split(&folds, 0);
    let trained = train_single(&ds.subset(&tr), &ds.subset(&va), &cfg, &mut stream(cfg.seed, &[0, 0]))?;

    let ckpt = out.join("model.json");
    save_checkpoint(&trained.model, &trained.params, &ckpt)?;
    let (model, params) = Checkpoint::load(&ckpt)?.into_model()?;
    println!(
        "reloaded model: val acc {:.3}",
        accuracy(&model, &params, &ds.subset(&va))?
    );
    export_embeddings(&model, &params, &ds, &out.join("embeddings.csv"))?;
    println!(
        "wrote {} embeddings of dimension {} to {}",
        ds.len(),
        model.representation_dim(),
        out.display()
    );
    Ok(())
}
