//! Versioned JSON instance files and solver result documents.
//!
//! An instance file looks like
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "u0": 1.0,
//!   "products": [
//!     { "id": "x11", "level": 1, "revenue": 10.0, "utility": 1.0 }
//!   ]
//! }
//! ```
//!
//! Numbers are written with the shortest representation that parses back
//! to the same `f64`, so files round-trip bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Product};
use crate::optimizer::OptimizationResult;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format_version: u32,
    pub u0: f64,
    pub products: Vec<ProductRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductRecord {
    pub id: String,
    pub level: u32,
    pub revenue: f64,
    pub utility: f64,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceFile {
            format_version: FORMAT_VERSION,
            u0: instance.outside_utility(),
            products: instance
                .products()
                .iter()
                .map(|p| ProductRecord {
                    id: p.id.clone(),
                    level: p.level,
                    revenue: p.revenue,
                    utility: p.utility,
                })
                .collect(),
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let products = self
            .products
            .into_iter()
            .map(|p| Product::new(p.id, p.level, p.revenue, p.utility))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        Instance::new(products, self.u0).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_instance()
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(instance))
        .expect("instance file serialization cannot fail")
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn write_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    let mut text = instance_to_json(instance);
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// What `solve` writes out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDocument {
    pub method: String,
    pub assortment: Vec<String>,
    pub revenue: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub thresholds: Option<Vec<usize>>,
    pub evaluations: u64,
    pub certified_optimal: bool,
}

impl SolveDocument {
    pub fn new(instance: &Instance, result: &OptimizationResult) -> Self {
        SolveDocument {
            method: result.method.to_string(),
            assortment: instance.ids(&result.assortment),
            revenue: result.revenue,
            thresholds: result.thresholds.clone(),
            evaluations: result.evaluations,
            certified_optimal: result.certified_optimal,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serialization cannot fail")
    }
}
