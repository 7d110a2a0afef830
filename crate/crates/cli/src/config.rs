use std::path::Path;

use serde::Deserialize;

use crate::CliError;

/// Node degree as written in a config file: an integer or `"inf"`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DegreeValue {
    Count(usize),
    Text(String),
}

impl DegreeValue {
    pub fn as_text(&self) -> String {
        match self {
            DegreeValue::Count(n) => n.to_string(),
            DegreeValue::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DeltasSection {
    pub n: Option<DegreeValue>,
    pub from: Option<usize>,
    #[serde(rename = "N")]
    pub to: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct NodeSection {
    pub case: Option<u8>,
    #[serde(rename = "N")]
    pub half: Option<usize>,
    pub samples: Option<usize>,
    pub vmax: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub case: Option<u8>,
    #[serde(rename = "N")]
    pub half: Option<usize>,
    pub epsilon: Option<f64>,
    pub t_end: Option<f64>,
    pub cells: Option<usize>,
    pub length: Option<f64>,
    pub cfl: Option<f64>,
}

/// Contents of a `--config` file; one section per command.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub deltas: DeltasSection,
    pub node: NodeSection,
    pub kinetic: RunSection,
    pub composite: RunSection,
    pub compare: RunSection,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}
