//! Versioned JSON containers for predictors, ensembles and fitted models.
//!
//! Every file is an object `{"format": <kind>, "version": 1, "payload": ...}`.
//! Matrices are stored as `{"rows", "cols", "data"}` with `data` row-major.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mhp::HypothesisEnsemble;
use crate::model::SRbfnModel;
use crate::predictor::MlpParams;

pub const FORMAT_VERSION: u32 = 1;

pub trait Persist: Serialize + DeserializeOwned {
    const FORMAT: &'static str;
}

impl Persist for MlpParams {
    const FORMAT: &'static str = "srbfn-mlp";
}

impl Persist for HypothesisEnsemble {
    const FORMAT: &'static str = "srbfn-ensemble";
}

impl Persist for SRbfnModel {
    const FORMAT: &'static str = "srbfn-model";
}

#[derive(Serialize)]
struct EnvelopeRef<'a, T> {
    format: &'a str,
    version: u32,
    payload: &'a T,
}

#[derive(Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    payload: T,
}

pub fn to_json<T: Persist>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(&EnvelopeRef {
        format: T::FORMAT,
        version: FORMAT_VERSION,
        payload: value,
    })?)
}

pub fn from_json<T: Persist>(text: &str) -> Result<T> {
    #[derive(Deserialize)]
    struct Header {
        format: String,
        version: u32,
    }
    let header: Header = serde_json::from_str(text)?;
    if header.format != T::FORMAT || header.version != FORMAT_VERSION {
        return Err(Error::SchemaMismatch(format!(
            "expected {} v{FORMAT_VERSION}, found {} v{}",
            T::FORMAT,
            header.format,
            header.version
        )));
    }
    let env: Envelope<T> = serde_json::from_str(text)?;
    debug_assert_eq!((env.format.as_str(), env.version), (T::FORMAT, FORMAT_VERSION));
    Ok(env.payload)
}

pub fn save<T: Persist>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn load<T: Persist>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    from_json(&fs::read_to_string(path)?)
}
