//! Head-to-head placement strategies on one generated overlay: the
//! optimizer's assignment (GANS) against random selection (RSN), coding
//! at all merging nodes (CAN) and no coding at all (NONE). Paired seeds,
//! shared churn, and the full figure set written as SVG files.

use ncmin::app::{cmd_compare, ExperimentConfig};
use ncmin::sim::Strategy;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ExperimentConfig::default();
    cfg.nodes = 20;
    cfg.links = 50;
    cfg.receivers = 8;
    cfg.rate = 3;
    cfg.seed = 11;
    cfg.runs = 5;
    cfg.strategies = vec![Strategy::Gans, Strategy::Rsn, Strategy::Can, Strategy::None];
    cfg.rsn_count = 2;
    cfg.file_blocks = vec![16, 32, 64];
    cfg.block_bytes = 32;
    cfg.segment_blocks = 8;
    cfg.dynamic_links = vec![0, 2, 5];
    cfg.deadline = 2000;
    cfg.out = PathBuf::from("out/faceoff");

    let table = cmd_compare(&cfg)?;
    println!(
        "\n{} comparison rows; see {} for the CSV and the four charts",
        table.rows.len(),
        cfg.out.display()
    );
    Ok(())
}
