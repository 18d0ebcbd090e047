use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use stresslab::complex::SimplicialComplex;
use stresslab::realization::{Realization, RealizationData};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexFile {
    pub name: String,
    pub facets: Vec<Vec<String>>,
}

impl ComplexFile {
    pub fn from_complex(name: &str, c: &SimplicialComplex) -> Self {
        ComplexFile { name: name.to_string(), facets: c.facet_labels() }
    }
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

pub struct LoadedComplex {
    pub name: String,
    pub complex: SimplicialComplex,
    pub bytes: Vec<u8>,
}

pub fn load_complex(path: &Path) -> Result<LoadedComplex, CliError> {
    let bytes = read(path)?;
    let file: ComplexFile =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let complex = SimplicialComplex::from_facets(&file.facets)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(LoadedComplex { name: file.name, complex, bytes })
}

/// Coordinates from a realization file; face checks are left to the caller.
pub fn load_realization(path: &Path, c: &SimplicialComplex) -> Result<(Realization, Vec<u8>), CliError> {
    let bytes = read(path)?;
    let data: RealizationData =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if c.dim() >= 0 && data.dim != c.dim() as usize {
        return Err(CliError::Parse(format!(
            "{}: realization has dim {}, complex has dim {}",
            path.display(),
            data.dim,
            c.dim()
        )));
    }
    let r = data.to_unvalidated(c).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok((r, bytes))
}
