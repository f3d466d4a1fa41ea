//! Registry of canonical test mappings with documented properties.
//!
//! Every documented property is re-checked by the classifier in the test
//! suite; nothing here is trusted on its own.

use serde::Serialize;

use super::dsl::{Affine, Decimal, Guard, Piece, PiecewiseAst};
use super::{FixedSet, MappingBody, MappingDef};
use crate::error::{Error, Result};
use crate::space::DomainSet;

#[derive(Debug, Clone, PartialEq)]
pub enum GalleryMap {
    Identity,
    Constant(f64),
    Halving,
    AffineContraction {
        slope: f64,
        intercept: f64,
    },
    Reflection,
    SuzukiStep,
    /// `min(2x, 1)` on `[0, 1]`; not quasi-nonexpansive.
    Doubling,
    /// Half-speed quarter turn on `[-1, 1]^2`.
    PlanarRotation,
}

impl GalleryMap {
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            GalleryMap::Identity => x.to_vec(),
            GalleryMap::Constant(c) => vec![*c],
            GalleryMap::Halving => vec![x[0] / 2.0],
            GalleryMap::AffineContraction { slope, intercept } => vec![slope * x[0] + intercept],
            GalleryMap::Reflection => vec![1.0 - x[0]],
            GalleryMap::SuzukiStep => vec![if x[0] == 3.0 { 1.0 } else { 0.0 }],
            GalleryMap::Doubling => vec![(2.0 * x[0]).min(1.0)],
            GalleryMap::PlanarRotation => vec![-0.5 * x[1], 0.5 * x[0]],
        }
    }

    /// Equivalent DSL definition, for 1D entries.
    pub fn to_piecewise(&self) -> Option<PiecewiseAst> {
        let dec = |v: f64| Decimal::from_f64(v);
        let closed = |lo: Decimal, hi: Decimal| Guard { lo, lo_closed: true, hi, hi_closed: true };
        let affine = |slope: Decimal, intercept: Decimal| Affine { slope, intercept };
        let piece = |guard, expr| Piece { guard, expr, location: None, expr_location: None };
        let zero = Decimal::ZERO;
        let one = Decimal::ONE;
        let (lo, hi, pieces) = match self {
            GalleryMap::Identity => (zero, one, vec![piece(closed(zero, one), affine(one, zero))]),
            GalleryMap::Constant(c) => (zero, one, vec![piece(closed(zero, one), affine(zero, dec(*c)?))]),
            GalleryMap::Halving => (zero, one, vec![piece(closed(zero, one), affine(dec(0.5)?, zero))]),
            GalleryMap::AffineContraction { slope, intercept } => {
                (zero, one, vec![piece(closed(zero, one), affine(dec(*slope)?, dec(*intercept)?))])
            }
            GalleryMap::Reflection => (zero, one, vec![piece(closed(zero, one), affine(-one, one))]),
            GalleryMap::SuzukiStep => {
                let three = Decimal::from_int(3);
                (
                    zero,
                    three,
                    vec![
                        piece(Guard { lo: zero, lo_closed: true, hi: three, hi_closed: false }, affine(zero, zero)),
                        piece(closed(three, three), affine(zero, one)),
                    ],
                )
            }
            GalleryMap::Doubling => {
                let half = dec(0.5)?;
                (
                    zero,
                    one,
                    vec![
                        piece(closed(zero, half), affine(Decimal::from_int(2), zero)),
                        piece(Guard { lo: half, lo_closed: false, hi: one, hi_closed: true }, affine(zero, one)),
                    ],
                )
            }
            GalleryMap::PlanarRotation => return None,
        };
        PiecewiseAst::new(lo, hi, pieces).ok()
    }
}

/// Which conditions an entry is documented to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KnownProperties {
    pub nonexpansive: bool,
    pub condition_c: bool,
    pub rsc: bool,
    pub quasi_nonexpansive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GalleryEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub params: Vec<ParamSpec>,
    pub dim: usize,
    pub known: KnownProperties,
    /// Fixed set for the default parameters.
    pub fixed_points: FixedSet,
    /// Counterexample entries excluded from suites that assume the documented
    /// conditions of the theory.
    pub test_only: bool,
}

const fn props(nonexpansive: bool, condition_c: bool, rsc: bool, quasi_nonexpansive: bool) -> KnownProperties {
    KnownProperties { nonexpansive, condition_c, rsc, quasi_nonexpansive }
}

fn entry(
    id: &'static str,
    summary: &'static str,
    params: Vec<ParamSpec>,
    known: KnownProperties,
    test_only: bool,
) -> GalleryEntry {
    let mapping = build(id, &[]).expect("gallery defaults are valid");
    GalleryEntry {
        id,
        summary,
        params,
        dim: mapping.dim(),
        known,
        fixed_points: mapping.declared_fixed_points,
        test_only,
    }
}

pub fn gallery_list() -> Vec<GalleryEntry> {
    vec![
        entry("identity", "Tx = x on [0,1]", vec![], props(true, true, false, true), false),
        entry(
            "constant",
            "Tx = c on [0,1]",
            vec![ParamSpec { name: "c", default: 0.3 }],
            props(true, true, true, true),
            false,
        ),
        entry("halving", "Tx = x/2 on [0,1]", vec![], props(true, true, true, true), false),
        entry(
            "affine-contraction",
            "Tx = a*x + b on [0,1], |a| < 1",
            vec![ParamSpec { name: "a", default: 0.9 }, ParamSpec { name: "b", default: 0.05 }],
            props(true, true, false, true),
            false,
        ),
        entry("reflection", "Tx = 1 - x on [0,1]", vec![], props(true, true, true, true), false),
        entry("suzuki-step", "Tx = 0 on [0,3), T3 = 1", vec![], props(false, true, true, true), false),
        entry("doubling", "Tx = 2x on [0,1/2], Tx = 1 on (1/2,1]", vec![], props(false, false, false, false), true),
        entry("planar-rotation", "Tx = (-x2/2, x1/2) on [-1,1]^2", vec![], props(true, true, true, true), false),
    ]
}

pub fn lookup(id: &str) -> Option<GalleryEntry> {
    gallery_list().into_iter().find(|e| e.id == id)
}

fn arity(id: &str, params: &[f64], expected: usize) -> Result<()> {
    if params.is_empty() || params.len() == expected {
        Ok(())
    } else {
        Err(Error::input(format!("`{id}` takes {expected} parameter(s), got {}", params.len())))
    }
}

/// Instantiates a gallery entry; empty `params` selects the defaults.
pub fn build(id: &str, params: &[f64]) -> Result<MappingDef> {
    let unit = || DomainSet::interval(0.0, 1.0);
    let point = |v: f64| FixedSet::Points(vec![vec![v]]);
    let (map, domain, fixed) = match id {
        "identity" => {
            arity(id, params, 0)?;
            (GalleryMap::Identity, unit()?, FixedSet::Whole)
        }
        "constant" => {
            arity(id, params, 1)?;
            let c = params.first().copied().unwrap_or(0.3);
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::input(format!("constant c = {c} must lie in [0,1]")));
            }
            (GalleryMap::Constant(c), unit()?, point(c))
        }
        "halving" => {
            arity(id, params, 0)?;
            (GalleryMap::Halving, unit()?, point(0.0))
        }
        "affine-contraction" => {
            arity(id, params, 2)?;
            let (a, b) = match params {
                [a, b] => (*a, *b),
                _ => (0.9, 0.05),
            };
            if !(a.abs() < 1.0) || !b.is_finite() {
                return Err(Error::input(format!("affine-contraction needs |a| < 1, got a = {a}")));
            }
            (GalleryMap::AffineContraction { slope: a, intercept: b }, unit()?, point(b / (1.0 - a)))
        }
        "reflection" => {
            arity(id, params, 0)?;
            (GalleryMap::Reflection, unit()?, point(0.5))
        }
        "suzuki-step" => {
            arity(id, params, 0)?;
            (GalleryMap::SuzukiStep, DomainSet::interval(0.0, 3.0)?, point(0.0))
        }
        "doubling" => {
            arity(id, params, 0)?;
            (GalleryMap::Doubling, unit()?, FixedSet::Points(vec![vec![0.0], vec![1.0]]))
        }
        "planar-rotation" => {
            arity(id, params, 0)?;
            (
                GalleryMap::PlanarRotation,
                DomainSet::boxed(vec![-1.0, -1.0], vec![1.0, 1.0])?,
                FixedSet::Points(vec![vec![0.0, 0.0]]),
            )
        }
        other => return Err(Error::input(format!("unknown gallery id `{other}`"))),
    };
    let name = if params.is_empty() {
        format!("gallery:{id}")
    } else {
        let p: Vec<String> = params.iter().map(|v| v.to_string()).collect();
        format!("gallery:{id}:{}", p.join(","))
    };
    MappingDef::new(name, domain, MappingBody::Gallery(map), fixed)
}
