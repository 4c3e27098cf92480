//! Load a dataset and print what the loader did with it.
//!
//! ```text
//! cargo run --example load_dataset -- air path/to/AirQualityUCI.csv
//! cargo run --example load_dataset -- energy path/to/energydata_complete.csv
//! ```
//!
//! Without arguments a small generated CSV is used.

use srbfn::dataset::{load_air_quality_with_report, load_csv, load_energy_with_report};

fn main() -> srbfn::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (data, report) = match args.as_slice() {
        [kind, path] if kind == "air" => load_air_quality_with_report(path)?,
        [kind, path] if kind == "energy" => load_energy_with_report(path)?,
        _ => {
            let dir = std::env::temp_dir().join("srbfn-load-example");
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("toy.csv");
            std::fs::write(&path, "a,b,empty,y\n1,2,,3\n4,,,5\n7,8,,\n0,1,,2\n")?;
            load_csv(&path, "y", b',')?
        }
    };

    println!("raw rows {}  raw columns {}", report.raw_rows, report.raw_columns);
    println!("dropped (target missing) {}", report.dropped_missing_target);
    println!("kept {} rows x {} features, target {}", data.len(), data.dim(), data.target_name);
    for (name, n) in report.missing_by_feature.iter().filter(|(_, &n)| n > 0) {
        println!("  {name}: {n} cells imputed");
    }
    if !report.dropped_columns.is_empty() {
        println!("dropped columns: {}", report.dropped_columns.join(", "));
    }
    Ok(())
}
