//! Model documents and the bundled Heisenberg, Martinet and Engel models.

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::strata::{StratumDocument, StratumSpec};
use crate::symca::{vars_from, PolyOneForm, PolyVectorField};

/// Distribution document: frame fields and optional coframe as rows of
/// polynomial strings, one entry per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub name: String,
    pub dim: usize,
    pub rank: usize,
    pub coords: Vec<String>,
    pub frame: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coframe: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strata: Vec<StratumDocument>,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub dist: Distribution,
    pub strata: Vec<StratumSpec>,
}

impl Model {
    pub fn from_document(doc: &ModelDocument) -> Result<Self> {
        if doc.coords.len() != doc.dim {
            return Err(Error::Schema(format!("dim is {} but {} coordinates are listed", doc.dim, doc.coords.len())));
        }
        let mut names = doc.coords.clone();
        names.sort();
        names.dedup();
        if names.len() != doc.dim {
            return Err(Error::Schema("coordinate names must be distinct".into()));
        }
        let vars = vars_from(&doc.coords);
        fn as_strs(row: &[String]) -> Vec<&str> {
            row.iter().map(String::as_str).collect()
        }
        let frame =
            doc.frame.iter().map(|row| PolyVectorField::parse(&as_strs(row), &vars)).collect::<Result<Vec<_>>>()?;
        let coframe = doc
            .coframe
            .as_ref()
            .map(|rows| rows.iter().map(|row| PolyOneForm::parse(&as_strs(row), &vars)).collect::<Result<Vec<_>>>())
            .transpose()?;
        let dist = Distribution::new(doc.name.clone(), vars, doc.rank, frame, coframe)?;
        let strata = doc.strata.iter().map(|s| StratumSpec::from_document(s, &dist)).collect::<Result<Vec<_>>>()?;
        let mut seen: Vec<&str> = strata.iter().map(|s| s.name.as_str()).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Schema("stratum names must be distinct".into()));
        }
        Ok(Model { dist, strata })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn stratum(&self, name: &str) -> Result<&StratumSpec> {
        self.strata.iter().find(|s| s.name == name).ok_or_else(|| {
            let known: Vec<&str> = self.strata.iter().map(|s| s.name.as_str()).collect();
            Error::InvalidArgument(format!("model `{}` has no stratum `{name}` (known: {known:?})", self.dist.name()))
        })
    }
}

/// Bundled model documents by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("heisenberg", include_str!("../models/heisenberg.json")),
    ("martinet", include_str!("../models/martinet.json")),
    ("engel", include_str!("../models/engel.json")),
];

pub fn bundled_source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn bundled(name: &str) -> Result<Model> {
    let src = bundled_source(name).ok_or_else(|| Error::InvalidArgument(format!("no bundled model `{name}`")))?;
    Model::from_json(src)
}

fn bundled_dist(name: &str) -> Distribution {
    bundled(name).expect("bundled models are valid").dist
}

/// `X1 = ∂x1`, `X2 = ∂x2 + x1 ∂y` on `ℝ³`.
pub fn heisenberg() -> Distribution {
    bundled_dist("heisenberg")
}

/// `X1 = ∂x1 + x2² ∂y`, `X2 = ∂x2` on `ℝ³`; singular along `x2 = 0`.
pub fn martinet() -> Distribution {
    bundled_dist("martinet")
}

/// `X1 = ∂x1`, `X2 = ∂x2 + x1 ∂y1 + (x1²/2) ∂y2` on `ℝ⁴`.
pub fn engel() -> Distribution {
    bundled_dist("engel")
}
