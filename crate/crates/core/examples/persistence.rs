//! Save a trained model as JSON, load it back and check predictions agree.

use srbfn::dataset::synthetic;
use srbfn::mhp::MhpConfig;
use srbfn::model::SRbfnModel;
use srbfn::persist;

fn main() -> srbfn::Result<()> {
    let data = synthetic::two_branch(200, 0.3, 9);
    let cfg = MhpConfig { m: 3, kappa: 8, epochs: 5, seed: 1, ..MhpConfig::default() };
    let model = SRbfnModel::train(&data, &cfg, 3.0)?;

    let path = std::env::temp_dir().join("srbfn-model-example.json");
    persist::save(&path, &model)?;
    let bytes = std::fs::metadata(&path)?.len();
    let back: SRbfnModel = persist::load(&path)?;

    let a = model.predict(&data.features)?;
    let b = back.predict(&data.features)?;
    let same = a.iter().zip(&b).all(|(u, v)| u.to_bits() == v.to_bits());
    println!("{} ({bytes} bytes), identical predictions: {same}", path.display());
    Ok(())
}
