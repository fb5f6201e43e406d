//! JSON instance files.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::measure::Measure1D;
use crate::stepfn::StepFunction;
use crate::verify::Instance;

/// `{"measure": ..., "function": ..., "metadata": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub measure: Measure1D,
    pub function: StepFunction,
    #[serde(default)]
    pub metadata: Map<String, Value>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_text(path)?)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let mut metadata = Map::new();
        metadata.insert("seed".into(), Value::from(inst.seed));
        metadata.insert("descriptor".into(), Value::from(inst.descriptor.clone()));
        InstanceFile { measure: inst.measure.clone(), function: inst.function.clone(), metadata }
    }

    /// Validates the finiteness of every level set; `seed` and `descriptor`
    /// are taken from the metadata when present.
    pub fn into_instance(self) -> Result<Instance> {
        let seed = self.metadata.get("seed").and_then(Value::as_u64).unwrap_or(0);
        let descriptor = self.metadata.get("descriptor").and_then(Value::as_str).unwrap_or("").to_string();
        Instance::new(self.measure, self.function, seed, descriptor)
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::random_instance;

    #[test]
    fn round_trip() {
        for seed in 0..30 {
            let file = InstanceFile::from_instance(&random_instance(seed, (seed % 13) as usize));
            let text = file.to_json();
            let back = InstanceFile::from_json(&text).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.to_json(), text);
            assert_eq!(back.into_instance().unwrap().seed, seed);
        }
    }

    #[test]
    fn rejects_unknown_fields_and_infinite_levels() {
        assert!(InstanceFile::from_json(r#"{"measure": {}, "function": {"pieces": []}, "extra": 1}"#).is_err());
        let text = r#"{"measure": {"background_density": "1", "density_pieces": [], "atoms": []},
                       "function": {"pieces": [{"from": "0", "to": "1", "value": "2"}]}}"#;
        let file = InstanceFile::from_json(text).unwrap();
        assert!(file.metadata.is_empty());
        assert!(file.into_instance().is_ok());
    }
}
