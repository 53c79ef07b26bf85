//! Reading problem instances from JSON: either a graph file
//! (`{"n": .., "edges": [[i, j], ..]}`) or a Hamiltonian file
//! (`{"k": .., "n": .., "couplings": [..]}`).

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hamiltonian::{CostHamiltonian, HamiltonianFile};

#[derive(Debug, Clone)]
pub enum Instance {
    Graph(Graph),
    Hamiltonian(CostHamiltonian<f64>),
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("couplings").is_some() {
            let file: HamiltonianFile = serde_json::from_value(value)?;
            Ok(Instance::Hamiltonian(file.try_into()?))
        } else {
            Ok(Instance::Graph(serde_json::from_value(value)?))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn graph(&self) -> Option<&Graph> {
        match self {
            Instance::Graph(g) => Some(g),
            Instance::Hamiltonian(_) => None,
        }
    }

    /// The cost Hamiltonian; `k` is required for graphs and must agree for
    /// Hamiltonian files when given.
    pub fn hamiltonian(&self, k: Option<usize>) -> Result<CostHamiltonian<f64>> {
        match self {
            Instance::Graph(g) => {
                let k = k.ok_or_else(|| Error::InvalidArgument("k is required for a graph instance".into()))?;
                CostHamiltonian::from_graph(g, k)
            }
            Instance::Hamiltonian(h) => match k {
                Some(k) if k != h.k() => Err(Error::InvalidArgument(format!(
                    "k = {k} requested but the Hamiltonian file has k = {}",
                    h.k()
                ))),
                _ => Ok(h.clone()),
            },
        }
    }
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}
