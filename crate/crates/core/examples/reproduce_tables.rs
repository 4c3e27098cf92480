//! Curated sweep on a real dataset followed by the summary report.
//!
//! ```text
//! cargo run --release --example reproduce_tables -- air AirQualityUCI.csv [subsample] [epochs]
//! ```
//!
//! A full-size run takes many hours. The default subsample of 1000 rows and
//! 5 epochs only shows the shape of the output; the single kappa = 2000
//! variant costs about as much as all other configurations together.
//! Results are appended to `srbfn-<kind>/results.jsonl`, so an interrupted
//! run picks up where it stopped.

use std::path::PathBuf;

use srbfn::dataset::{load_air_quality, load_energy};
use srbfn::evaluation::{curated_configs, grid_sweep, quartile_summary, write_report, RunSettings};

fn main() -> srbfn::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (kind, path) = match args.as_slice() {
        [k, p, ..] => (k.as_str(), PathBuf::from(p)),
        _ => {
            eprintln!("usage: reproduce_tables air|energy <csv> [subsample] [epochs]");
            std::process::exit(2);
        }
    };
    let data = match kind {
        "air" => load_air_quality(&path)?,
        _ => load_energy(&path)?,
    };
    let subsample = args.get(2).map_or(1000, |s| s.parse().expect("subsample"));
    let epochs = args.get(3).map_or(5, |s| s.parse().expect("epochs"));
    let settings = RunSettings {
        dataset: kind.into(),
        epochs,
        subsample: (subsample > 0).then_some(subsample),
        ..RunSettings::default()
    };

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let out_dir = PathBuf::from(format!("srbfn-{kind}"));
    std::fs::create_dir_all(&out_dir)?;
    let results = out_dir.join("results.jsonl");
    let out = grid_sweep(&data, &curated_configs(), &settings, Some(&results), workers)?;
    println!("{} results ({} computed now)", out.results.len(), out.computed);

    let summary = quartile_summary(&out.results)?;
    for m in &summary.models {
        println!(
            "{:<20} top {:.4} ({:.4})  Q1 {:.4}  Q3 {:.4}",
            m.model.label(),
            m.top_mean,
            m.top_std,
            m.first_quartile,
            m.third_quartile
        );
    }
    for f in write_report(&out.results, &out_dir)? {
        println!("wrote {}", out_dir.join(f).display());
    }
    Ok(())
}
