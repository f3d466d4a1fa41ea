//! Self-mappings of a bounded convex domain: gallery entries and parsed
//! piecewise-affine definitions.

pub mod dsl;
pub mod gallery;

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::space::{DomainSet, Exponent, NormSpec};

pub use dsl::{parse_piecewise, PiecewiseAst};
pub use gallery::{gallery_list, GalleryEntry, GalleryMap};

/// Number of grid points used to validate the self-map property at load.
pub const SELF_MAP_GRID_POINTS: usize = 10_000;

/// Relative slack allowed when an image lands outside the domain by rounding.
const IMAGE_SLACK: f64 = 1e-12;

/// Known fixed points of a mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "points", rename_all = "kebab-case")]
pub enum FixedSet {
    Points(Vec<Vec<f64>>),
    /// Every point of the domain is fixed.
    Whole,
    Unknown,
}

impl FixedSet {
    pub fn is_known(&self) -> bool {
        !matches!(self, FixedSet::Unknown)
    }

    /// Concrete representatives; `Whole` is sampled on the given grid.
    pub fn representatives(&self, domain: &DomainSet, grid_points: usize) -> Vec<Vec<f64>> {
        match self {
            FixedSet::Points(ps) => ps.clone(),
            FixedSet::Whole => domain.grid(grid_points),
            FixedSet::Unknown => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MappingBody {
    Gallery(GalleryMap),
    Piecewise(PiecewiseAst),
}

/// A validated self-map `T : K -> K`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingDef {
    pub name: String,
    pub domain: DomainSet,
    pub norm: NormSpec,
    pub body: MappingBody,
    pub declared_fixed_points: FixedSet,
}

impl MappingDef {
    /// Builds the definition and checks the self-map property on a grid.
    pub fn new(
        name: impl Into<String>,
        domain: DomainSet,
        body: MappingBody,
        declared_fixed_points: FixedSet,
    ) -> Result<Self> {
        let norm = NormSpec::euclidean(domain.dim());
        let def = MappingDef { name: name.into(), domain, norm, body, declared_fixed_points };
        def.validate()?;
        Ok(def)
    }

    /// Same mapping measured in a different lp norm.
    pub fn with_norm(mut self, p: Exponent) -> Self {
        self.norm = NormSpec { p, dim: self.domain.dim() };
        self
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn grid_per_axis(&self) -> usize {
        let d = self.dim() as f64;
        (SELF_MAP_GRID_POINTS as f64).powf(1.0 / d).ceil() as usize
    }

    fn validate(&self) -> Result<()> {
        let n = self.grid_per_axis();
        for x in self.domain.grid(n) {
            let raw = self.raw_eval(&x);
            if raw.len() != self.dim() || !self.domain.contains_within(&raw, IMAGE_SLACK) {
                return Err(Error::input(format!(
                    "mapping `{}` is not a self-map: T({x:?}) = {raw:?} leaves the domain",
                    self.name
                )));
            }
        }
        if let FixedSet::Points(ps) = &self.declared_fixed_points {
            for p in ps {
                if !self.domain.contains(p) {
                    return Err(Error::OutsideDomain { point: p.clone() });
                }
            }
        }
        Ok(())
    }

    fn raw_eval(&self, x: &[f64]) -> Vec<f64> {
        match &self.body {
            MappingBody::Gallery(g) => g.eval(x),
            MappingBody::Piecewise(ast) => {
                vec![ast.eval(x[0]).unwrap_or(f64::NAN)]
            }
        }
    }

    /// `Tx` for a point of the domain.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.norm.check_dim(x)?;
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain { point: x.to_vec() });
        }
        self.apply(x)
    }

    /// `Tx` for a point already known to lie in the domain (up to rounding).
    pub(crate) fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let x = if self.domain.contains(x) { x.to_vec() } else { self.domain.project(x) };
        let y = self.raw_eval(&x);
        if self.domain.contains(&y) {
            Ok(y)
        } else if self.domain.contains_within(&y, IMAGE_SLACK) {
            Ok(self.domain.project(&y))
        } else {
            Err(Error::Internal(format!("mapping `{}` sent {x:?} to {y:?}, outside the domain", self.name)))
        }
    }

    /// `‖Tx - x‖`.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        let tx = self.evaluate(x)?;
        Ok(self.norm.dist(&tx, x))
    }

    /// Canonical DSL text when the mapping has a 1D piecewise-affine form.
    pub fn to_dsl(&self) -> Option<String> {
        match &self.body {
            MappingBody::Piecewise(ast) => Some(ast.to_source()),
            MappingBody::Gallery(g) => g.to_piecewise().map(|a| a.to_source()),
        }
    }
}

/// Builds a mapping from DSL text.
pub fn mapping_from_dsl(name: impl Into<String>, source: &str) -> Result<MappingDef> {
    let ast = parse_piecewise(source)?;
    let (lo, hi) = ast.domain_f64();
    let fixed = match ast.exact_fixed_points() {
        Some(ps) => FixedSet::Points(ps.into_iter().map(|p| vec![p]).collect()),
        None if ast.pieces.len() == 1 => FixedSet::Whole,
        None => FixedSet::Unknown,
    };
    MappingDef::new(name, DomainSet::interval(lo, hi)?, MappingBody::Piecewise(ast), fixed)
}

/// A mapping together with the text it was loaded from.
#[derive(Debug, Clone)]
pub struct LoadedMapping {
    pub mapping: MappingDef,
    /// `gallery:<id>[:params]` or the file contents.
    pub source_text: String,
    pub source_hash: String,
}

/// Loads `gallery:<id>[:p1,p2,...]` or a DSL file path.
pub fn load_mapping(source: &str) -> Result<LoadedMapping> {
    let (mapping, text) = if let Some(spec) = source.strip_prefix("gallery:") {
        let (id, params) = match spec.split_once(':') {
            Some((id, p)) => (id, parse_params(p)?),
            None => (spec, Vec::new()),
        };
        (gallery::build(id, &params)?, format!("gallery:{spec}"))
    } else {
        let text = std::fs::read_to_string(Path::new(source))?;
        (mapping_from_dsl(source, &text)?, text)
    };
    let source_hash = hex::encode(Sha256::digest(text.as_bytes()));
    Ok(LoadedMapping { mapping, source_text: text, source_hash })
}

fn parse_params(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::input(format!("cannot parse gallery parameter `{s}`"))))
        .collect()
}
