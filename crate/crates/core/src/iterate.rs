//! Krasnoselskii-Mann iteration and trajectory diagnostics.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::{check_condition_i, verified_fixed_points, ConditionIFunction, PairSamplePlan};
use crate::error::{Error, Result};
use crate::mapping::{FixedSet, MappingDef};
use crate::space::NormSpec;
use crate::tolerance::Tolerance;
use crate::verdict::Verdict;

/// Relative slack for iterates that leave the domain by rounding.
const ITERATE_SLACK: f64 = 1e-12;

/// Grid used to confirm condition (I) before a strong-convergence check.
pub const CONDITION_I_GRID: usize = 201;

const MERGE_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationConfig {
    pub alpha: f64,
    pub x1: Vec<f64>,
    pub max_iter: usize,
    pub residual_tol: f64,
    pub record_every: usize,
    /// Accept `alpha` outside `[1/2, 1)`.
    #[serde(default)]
    pub allow_any_alpha: bool,
}

impl IterationConfig {
    pub fn new(alpha: f64, x1: Vec<f64>, max_iter: usize) -> Self {
        IterationConfig { alpha, x1, max_iter, residual_tol: 0.0, record_every: 1, allow_any_alpha: false }
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = tol;
        self
    }

    pub fn validate(&self, mapping: &MappingDef) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha > 1.0 {
            return Err(Error::input(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !self.allow_any_alpha && !(0.5..1.0).contains(&self.alpha) {
            return Err(Error::input(format!(
                "alpha = {} is outside the valid range [1/2, 1); pass the override to explore it",
                self.alpha
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::input("max_iter must be positive"));
        }
        if self.record_every == 0 {
            return Err(Error::input("record_every must be positive"));
        }
        if !(self.residual_tol >= 0.0) {
            return Err(Error::input("residual_tol must be nonnegative"));
        }
        mapping.norm.check_dim(&self.x1)?;
        if !mapping.domain.contains(&self.x1) {
            return Err(Error::OutsideDomain { point: self.x1.clone() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    ResidualTol,
    MaxIter,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::ResidualTol => "residual-tol",
            StopReason::MaxIter => "max-iter",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub x: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub config: IterationConfig,
    pub rows: Vec<TraceRow>,
    pub stop_reason: StopReason,
}

impl IterationTrace {
    pub fn last(&self) -> &TraceRow {
        self.rows.last().expect("traces are nonempty")
    }

    pub fn dim(&self) -> usize {
        self.config.x1.len()
    }

    /// Consecutive recorded rows `(x_n, x_{n+1})`.
    fn steps(&self) -> impl Iterator<Item = (&TraceRow, &TraceRow)> {
        self.rows.windows(2).filter(|w| w[1].n == w[0].n + 1).map(|w| (&w[0], &w[1]))
    }

    /// Writes `n,x_0,...,residual[,dist_to_F]` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W, norm: NormSpec, fixed: Option<&[Vec<f64>]>) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["n".to_string()];
        header.extend((0..self.dim()).map(|i| format!("x_{i}")));
        header.push("residual".into());
        if fixed.is_some() {
            header.push("dist_to_F".into());
        }
        out.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.n.to_string()];
            rec.extend(row.x.iter().map(|v| fmt_float(*v)));
            rec.push(fmt_float(row.residual));
            if let Some(fps) = fixed {
                rec.push(fmt_float(distance_to_set(norm, &row.x, fps)));
            }
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads rows written by [`IterationTrace::write_csv`].
    pub fn read_csv<R: Read>(r: R, config: IterationConfig, stop_reason: StopReason) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        let dim = header.iter().filter(|h| h.starts_with("x_")).count();
        if header.get(0) != Some("n") || header.get(dim + 1) != Some("residual") {
            return Err(Error::input("trace header must be `n,x_0,...,residual[,dist_to_F]`"));
        }
        if dim != config.x1.len() {
            return Err(Error::Dimension { expected: config.x1.len(), got: dim });
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |k: usize| -> Result<&str> {
                rec.get(k).ok_or_else(|| Error::input(format!("trace row {} is truncated", i + 1)))
            };
            let n = field(0)?
                .parse::<usize>()
                .map_err(|_| Error::input(format!("trace row {}: bad index `{}`", i + 1, &rec[0])))?;
            let x = (1..=dim).map(|k| parse_float(field(k)?, i)).collect::<Result<Vec<_>>>()?;
            let residual = parse_float(field(dim + 1)?, i)?;
            rows.push(TraceRow { n, x, residual });
        }
        if rows.is_empty() {
            return Err(Error::input("trace has no rows"));
        }
        if rows.windows(2).any(|w| w[1].n <= w[0].n) {
            return Err(Error::input("trace indices must increase"));
        }
        Ok(IterationTrace { config, rows, stop_reason })
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_float(s: &str, row: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::input(format!("trace row {}: bad number `{s}`", row + 1)))
}

fn distance_to_set(norm: NormSpec, x: &[f64], set: &[Vec<f64>]) -> f64 {
    set.iter().map(|p| norm.dist(x, p)).fold(f64::INFINITY, f64::min)
}

fn relaxed(alpha: f64, tx: &[f64], x: &[f64]) -> Vec<f64> {
    tx.iter().zip(x).map(|(t, v)| alpha * t + (1.0 - alpha) * v).collect()
}

/// `x_{n+1} = alpha T x_n + (1 - alpha) x_n` from `x_1` until the residual
/// drops to `residual_tol` or `max_iter` iterates exist.
pub fn run_iteration(mapping: &MappingDef, config: &IterationConfig) -> Result<IterationTrace> {
    config.validate(mapping)?;
    let alpha = config.alpha;
    let mut x = config.x1.clone();
    let mut rows = Vec::new();
    let mut n = 1;
    let stop_reason = loop {
        let tx = mapping.apply(&x)?;
        let residual = mapping.norm.dist(&tx, &x);
        let stop = if residual <= config.residual_tol {
            Some(StopReason::ResidualTol)
        } else if n == config.max_iter {
            Some(StopReason::MaxIter)
        } else {
            None
        };
        if n == 1 || n % config.record_every == 0 || stop.is_some() {
            rows.push(TraceRow { n, x: x.clone(), residual });
        }
        if let Some(reason) = stop {
            break reason;
        }
        let next = relaxed(alpha, &tx, &x);
        x = if mapping.domain.contains(&next) {
            next
        } else if mapping.domain.contains_within(&next, ITERATE_SLACK) {
            mapping.domain.project(&next)
        } else {
            return Err(Error::Internal(format!(
                "iterate x_{} = {next:?} of `{}` left the domain",
                n + 1,
                mapping.name
            )));
        };
        n += 1;
    };
    Ok(IterationTrace { config: config.clone(), rows, stop_reason })
}

/// Runs every `(alpha, x1)` combination; output order follows the inputs.
pub fn run_sweep(
    mapping: &MappingDef,
    base: &IterationConfig,
    alphas: &[f64],
    starts: &[Vec<f64>],
) -> Result<Vec<IterationTrace>> {
    let configs: Vec<IterationConfig> = alphas
        .iter()
        .flat_map(|&alpha| starts.iter().map(move |x1| IterationConfig { alpha, x1: x1.clone(), ..base.clone() }))
        .collect();
    configs.par_iter().map(|c| run_iteration(mapping, c)).collect()
}

/// Outcome of a trajectory-level check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub verdict: Verdict,
    pub checked: u64,
    /// Cases whose premise failed and were not asserted.
    pub skipped: u64,
    pub violations: u64,
    /// Iterate index of the first violation.
    pub first_violation: Option<usize>,
    /// Check-specific measurement: worst ratio, oscillation, residual or distance.
    pub observed: Option<f64>,
    /// First iterate index meeting a target, where the check has one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reached_at: Option<usize>,
    pub message: String,
}

impl PropertyReport {
    fn new(property: &str) -> Self {
        PropertyReport {
            property: property.into(),
            verdict: Verdict::Pass,
            checked: 0,
            skipped: 0,
            violations: 0,
            first_violation: None,
            observed: None,
            reached_at: None,
            message: String::new(),
        }
    }

    fn not_applicable(property: &str, message: String) -> Self {
        PropertyReport { verdict: Verdict::NotApplicable, message, ..Self::new(property) }
    }

    fn violation(&mut self, n: usize) {
        self.violations += 1;
        self.first_violation.get_or_insert(n);
    }

    fn observe_max(&mut self, v: f64) {
        self.observed = Some(self.observed.map_or(v, |m| m.max(v)));
    }

    fn settle(mut self) -> Self {
        if self.violations > 0 {
            self.verdict = Verdict::Fail;
        } else if self.checked == 0 {
            self.verdict = Verdict::Vacuous;
        }
        self
    }
}

fn verify_fixed(mapping: &MappingDef, p: &[f64], tol: Tolerance) -> Result<()> {
    verified_fixed_points(mapping, &FixedSet::Points(vec![p.to_vec()]), 1, tol).map(|_| ())
}

/// Fejer monotonicity `‖x_{n+1} - q‖ <= ‖x_n - q‖` along recorded rows.
pub fn check_fejer(mapping: &MappingDef, trace: &IterationTrace, q: &[f64], tol: Tolerance) -> Result<PropertyReport> {
    verify_fixed(mapping, q, tol)?;
    let mut rep = PropertyReport::new("fejer");
    for w in trace.rows.windows(2) {
        let before = mapping.norm.dist(&w[0].x, q);
        let after = mapping.norm.dist(&w[1].x, q);
        rep.checked += 1;
        if before > 0.0 {
            rep.observe_max(after / before);
        }
        if tol.exceeds(after, before) {
            rep.violation(w[1].n);
        }
    }
    rep.message = match rep.first_violation {
        Some(n) => format!("distance to q increased at n = {n}"),
        None => format!("distance to q nonincreasing over {} steps", rep.checked),
    };
    Ok(rep.settle())
}

/// `h(n) = ‖t x_n + (1 - t) p - q‖` for the auxiliary-limit check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryLimitProbe {
    pub t: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl AuxiliaryLimitProbe {
    pub fn h(&self, norm: NormSpec, x: &[f64]) -> f64 {
        let w: Vec<f64> = x.iter().zip(&self.p).map(|(a, b)| self.t * a + (1.0 - self.t) * b).collect();
        norm.dist(&w, &self.q)
    }
}

/// Passes when `h(n)` varies by less than `osc_tol` over the last
/// `tail_window` recorded rows. Not applicable unless the final residual is
/// below `max(residual_tol, osc_tol)`.
pub fn check_auxiliary_limit(
    mapping: &MappingDef,
    trace: &IterationTrace,
    probe: &AuxiliaryLimitProbe,
    tail_window: usize,
    osc_tol: f64,
    tol: Tolerance,
) -> Result<PropertyReport> {
    if !(0.0..=1.0).contains(&probe.t) {
        return Err(Error::input(format!("t must lie in [0, 1], got {}", probe.t)));
    }
    if tail_window == 0 || trace.rows.len() < tail_window {
        return Err(Error::input(format!(
            "trace has {} rows, too short for a tail window of {tail_window}",
            trace.rows.len()
        )));
    }
    verify_fixed(mapping, &probe.p, tol)?;
    verify_fixed(mapping, &probe.q, tol)?;
    let property = "auxiliary-limit";
    let gate = trace.config.residual_tol.max(osc_tol);
    let final_residual = trace.last().residual;
    if final_residual > gate {
        return Ok(PropertyReport::not_applicable(
            property,
            format!("final residual {final_residual:e} has not fallen below {gate:e}"),
        ));
    }
    let tail = &trace.rows[trace.rows.len() - tail_window..];
    let hs: Vec<f64> = tail.iter().map(|r| probe.h(mapping.norm, &r.x)).collect();
    let hi = hs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = hs.iter().copied().fold(f64::INFINITY, f64::min);
    let osc = hi - lo;
    let mut rep = PropertyReport::new(property);
    rep.checked = tail_window as u64;
    rep.observed = Some(osc);
    if !(osc < osc_tol) {
        rep.violation(tail[0].n);
    }
    rep.message = format!("tail oscillation {osc:e} over {tail_window} rows, limit estimate {}", hs[hs.len() - 1]);
    Ok(rep.settle())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Xst1Sweep {
    /// Only `n = m`.
    Diagonal,
    /// Every recorded `(m, n)` pair.
    Full,
}

/// `‖x_{n+1} - S^{l+1} z‖ <= ‖x_n - S^l z‖ + (8/3)‖x_n - T x_n‖` with
/// `z = t x_m + (1 - t) p` and `S y = alpha T y + (1 - alpha) y`, for
/// `0 <= l <= ell_max`. Cases where `½‖x_n - T x_n‖ > ‖x_n - S^l z‖` are
/// skipped.
pub fn check_xst1(
    mapping: &MappingDef,
    trace: &IterationTrace,
    t: f64,
    p: &[f64],
    ell_max: usize,
    sweep: Xst1Sweep,
    tol: Tolerance,
) -> Result<PropertyReport> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::input(format!("t must lie in [0, 1], got {t}")));
    }
    verify_fixed(mapping, p, tol)?;
    let alpha = trace.config.alpha;
    let norm = mapping.norm;
    // orbits[k][l] = S^l z with z built from row k
    let orbits = trace
        .rows
        .par_iter()
        .map(|row| -> Result<Vec<Vec<f64>>> {
            let mut z: Vec<f64> = row.x.iter().zip(p).map(|(a, b)| t * a + (1.0 - t) * b).collect();
            let mut out = Vec::with_capacity(ell_max + 2);
            for _ in 0..=ell_max + 1 {
                let tz = mapping.apply(&z)?;
                let next = relaxed(alpha, &tz, &z);
                out.push(std::mem::replace(&mut z, next));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let steps: Vec<usize> =
        (0..trace.rows.len().saturating_sub(1)).filter(|&k| trace.rows[k + 1].n == trace.rows[k].n + 1).collect();

    let partial: Vec<PropertyReport> = steps
        .par_iter()
        .map(|&k| {
            let (xn, xn1) = (&trace.rows[k], &trace.rows[k + 1]);
            let mut rep = PropertyReport::new("xst1");
            let sources = match sweep {
                Xst1Sweep::Diagonal => k..k + 1,
                Xst1Sweep::Full => 0..orbits.len(),
            };
            let res = mapping.residual(&xn.x).unwrap_or(xn.residual);
            for zs in &orbits[sources] {
                for l in 0..=ell_max {
                    let d = norm.dist(&xn.x, &zs[l]);
                    if 0.5 * res > d {
                        rep.skipped += 1;
                        continue;
                    }
                    let lhs = norm.dist(&xn1.x, &zs[l + 1]);
                    let rhs = d + 8.0 / 3.0 * res;
                    rep.checked += 1;
                    if rhs > 0.0 {
                        rep.observe_max(lhs / rhs);
                    }
                    if tol.exceeds(lhs, rhs) {
                        rep.violation(xn.n);
                    }
                }
            }
            rep
        })
        .collect();

    let mut rep = PropertyReport::new("xst1");
    for r in partial {
        rep.checked += r.checked;
        rep.skipped += r.skipped;
        rep.violations += r.violations;
        if let Some(v) = r.observed {
            rep.observe_max(v);
        }
        if let Some(n) = r.first_violation {
            rep.first_violation = Some(rep.first_violation.map_or(n, |m| m.min(n)));
        }
    }
    rep.message =
        format!("{} cases checked, {} skipped by the premise, {} violations", rep.checked, rep.skipped, rep.violations);
    Ok(rep.settle())
}

/// Finite-dimensional demiclosedness check: when residuals vanish and the
/// tail is Cauchy within `tol`, the final iterate must be fixed to `10 tol`.
pub fn check_demiclosed(mapping: &MappingDef, trace: &IterationTrace, tol: f64) -> Result<PropertyReport> {
    let property = "demiclosed";
    let last = trace.last();
    if last.residual > tol {
        return Ok(PropertyReport::not_applicable(
            property,
            format!("recorded residual {:e} is above {tol:e}", last.residual),
        ));
    }
    if let Some((a, b)) = trace.steps().last() {
        let step = mapping.norm.dist(&a.x, &b.x);
        if step > tol {
            return Ok(PropertyReport::not_applicable(property, format!("final step length {step:e} exceeds {tol:e}")));
        }
    }
    let residual = mapping.residual(&last.x)?;
    let mut rep = PropertyReport::new(property);
    rep.checked = 1;
    rep.observed = Some(residual);
    if residual > 10.0 * tol {
        rep.violation(last.n);
    }
    rep.message = format!("limit {:?} has residual {residual:e}", last.x);
    Ok(rep.settle())
}

/// Strong convergence under condition (I): `d(x_N, F) < dist_tol` and
/// `d(x_n, F)` nonincreasing. Not applicable unless condition (I) holds for
/// `f` on an exhaustive grid.
pub fn check_strong_convergence(
    mapping: &MappingDef,
    trace: &IterationTrace,
    fixed: &FixedSet,
    f: &ConditionIFunction,
    dist_tol: f64,
    tol: Tolerance,
) -> Result<PropertyReport> {
    let property = "strong-convergence";
    let gate = check_condition_i(mapping, fixed, f, &PairSamplePlan::exhaustive(CONDITION_I_GRID), tol)?;
    if gate.verdict != Verdict::Pass {
        return Ok(PropertyReport::not_applicable(property, format!("condition (I) verdict is {}", gate.verdict)));
    }
    let fps = verified_fixed_points(mapping, fixed, CONDITION_I_GRID, tol)?;
    let dist: Vec<f64> = trace.rows.iter().map(|r| distance_to_set(mapping.norm, &r.x, &fps)).collect();
    let mut rep = PropertyReport::new(property);
    for (k, w) in dist.windows(2).enumerate() {
        rep.checked += 1;
        if tol.exceeds(w[1], w[0]) {
            rep.violation(trace.rows[k + 1].n);
        }
    }
    rep.reached_at = dist.iter().position(|&d| d < dist_tol).map(|k| trace.rows[k].n);
    let final_dist = dist[dist.len() - 1];
    rep.observed = Some(final_dist);
    rep.checked += 1;
    if !(final_dist < dist_tol) {
        rep.violation(trace.last().n);
    }
    rep.message = match rep.reached_at {
        Some(n) => format!("d(x_n, F) < {dist_tol:e} from n = {n}; final distance {final_dist:e}"),
        None => format!("final distance {final_dist:e} is not below {dist_tol:e}"),
    };
    Ok(rep.settle())
}

/// Grid scan of `Tx - x` with bisection on sign changes (1D), or a KM run
/// from every grid point (higher dimensions). Returns points with residual
/// at most `refine_tol`; points closer than `1000 refine_tol` are merged,
/// keeping the one with the smaller residual.
///
/// Fixed points between grid nodes that do not produce a sign change, and
/// isolated fixed points of discontinuous maps off the grid, are missed.
pub fn find_fixed_points(mapping: &MappingDef, grid_points: usize, refine_tol: f64) -> Result<Vec<Vec<f64>>> {
    if grid_points < 2 {
        return Err(Error::input("find_fixed_points needs at least 2 grid points"));
    }
    if !(refine_tol > 0.0) {
        return Err(Error::input("refine_tol must be positive"));
    }
    let mut found: Vec<(Vec<f64>, f64)> = if mapping.dim() == 1 {
        scan_1d(mapping, grid_points, refine_tol)?
    } else {
        scan_km(mapping, grid_points, refine_tol)?
    };
    found.sort_by(|a, b| {
        a.0.iter().zip(&b.0).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut merged: Vec<(Vec<f64>, f64)> = Vec::new();
    for (x, r) in found {
        match merged.iter_mut().find(|(y, _)| mapping.norm.dist(&x, y) <= MERGE_FACTOR * refine_tol) {
            Some(slot) if r < slot.1 => *slot = (x, r),
            Some(_) => {}
            None => merged.push((x, r)),
        }
    }
    Ok(merged.into_iter().map(|(x, _)| x).collect())
}

fn scan_1d(mapping: &MappingDef, grid_points: usize, refine_tol: f64) -> Result<Vec<(Vec<f64>, f64)>> {
    let g = |x: f64| -> Result<f64> { Ok(mapping.apply(&[x])?[0] - x) };
    let xs: Vec<f64> = mapping.domain.grid(grid_points).into_iter().map(|p| p[0]).collect();
    let gs = xs.iter().map(|&x| g(x)).collect::<Result<Vec<f64>>>()?;
    let mut out = Vec::new();
    for (k, (&x, &gx)) in xs.iter().zip(&gs).enumerate() {
        if gx.abs() <= refine_tol {
            out.push((vec![x], gx.abs()));
        }
        if k + 1 < xs.len() && gx * gs[k + 1] < 0.0 {
            let (mut a, mut b, mut ga) = (x, xs[k + 1], gx);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let gm = g(mid)?;
                if gm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if (gm < 0.0) == (ga < 0.0) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            let best = [a, b]
                .into_iter()
                .map(|c| g(c).map(|v| (c, v.abs())))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .min_by(|u, v| u.1.total_cmp(&v.1))
                .expect("two candidates");
            if best.1 <= refine_tol {
                out.push((vec![best.0], best.1));
            }
        }
    }
    Ok(out)
}

fn scan_km(mapping: &MappingDef, grid_points: usize, refine_tol: f64) -> Result<Vec<(Vec<f64>, f64)>> {
    let starts = mapping.domain.grid(grid_points);
    let runs = starts
        .into_par_iter()
        .map(|x1| {
            let config = IterationConfig::new(0.5, x1, 100_000).with_residual_tol(refine_tol);
            let trace = run_iteration(mapping, &config)?;
            let last = trace.last();
            Ok((last.residual <= refine_tol).then(|| (last.x.clone(), last.residual)))
        })
        .collect::<Vec<Result<_>>>();
    let mut out = Vec::new();
    for r in runs {
        if let Some(hit) = r? {
            out.push(hit);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::gallery::build;

    fn g(id: &str) -> MappingDef {
        build(id, &[]).unwrap()
    }

    fn run(id: &str, alpha: f64, x1: f64, max_iter: usize) -> IterationTrace {
        run_iteration(&g(id), &IterationConfig::new(alpha, vec![x1], max_iter)).unwrap()
    }

    #[test]
    fn halving_closed_form() {
        let tr = run("halving", 0.5, 1.0, 50);
        assert_eq!(tr.rows[3].x[0], 0.421875);
        for r in &tr.rows {
            assert!((r.x[0] - 0.75f64.powi(r.n as i32 - 1)).abs() <= 1e-12);
        }
        assert_eq!(tr.stop_reason, StopReason::MaxIter);
        assert_eq!(tr.rows.len(), 50);
    }

    #[test]
    fn constant_and_identity() {
        let tr = run("constant", 0.5, 1.0, 3);
        assert_eq!(tr.rows[1].x[0], 0.65);
        assert_eq!(tr.rows[2].x[0], 0.475);
        let tr =
            run_iteration(&g("identity"), &IterationConfig::new(0.7, vec![0.3], 100).with_residual_tol(1e-9)).unwrap();
        assert_eq!(tr.rows.len(), 1);
        assert_eq!(tr.stop_reason, StopReason::ResidualTol);
        assert_eq!(tr.rows[0].residual, 0.0);
    }

    #[test]
    fn alpha_range_is_enforced() {
        let m = g("halving");
        let err = run_iteration(&m, &IterationConfig::new(0.2, vec![1.0], 10)).unwrap_err();
        assert!(err.to_string().contains("[1/2, 1)"));
        assert!(run_iteration(&m, &IterationConfig::new(1.0, vec![1.0], 10)).is_err());
        let mut c = IterationConfig::new(0.2, vec![1.0], 10);
        c.allow_any_alpha = true;
        assert!(run_iteration(&m, &c).is_ok());
        assert!(run_iteration(&m, &IterationConfig::new(0.5, vec![2.0], 10)).is_err());
    }

    #[test]
    fn recording_stride_keeps_first_and_last() {
        let mut c = IterationConfig::new(0.5, vec![1.0], 25);
        c.record_every = 10;
        let tr = run_iteration(&g("halving"), &c).unwrap();
        let ns: Vec<usize> = tr.rows.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![1, 10, 20, 25]);
    }

    #[test]
    fn csv_round_trip_is_bit_faithful() {
        let m = g("affine-contraction");
        let tr = run_iteration(&m, &IterationConfig::new(0.75, vec![0.1], 40)).unwrap();
        let mut buf = Vec::new();
        let fps = vec![vec![0.5]];
        tr.write_csv(&mut buf, m.norm, Some(&fps)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,x_0,residual,dist_to_F\n"));
        let back = IterationTrace::read_csv(&buf[..], tr.config.clone(), tr.stop_reason).unwrap();
        assert_eq!(back, tr);
    }

    #[test]
    fn fejer_examples() {
        let tol = Tolerance::default();
        assert_eq!(
            check_fejer(&g("halving"), &run("halving", 0.5, 1.0, 100), &[0.0], tol).unwrap().verdict,
            Verdict::Pass
        );
        let tr = run("reflection", 0.5, 0.9, 10);
        assert_eq!(tr.rows[1].x[0], 0.5);
        assert_eq!(check_fejer(&g("reflection"), &tr, &[0.5], tol).unwrap().verdict, Verdict::Pass);
        let tr = run("suzuki-step", 0.5, 2.0, 60);
        assert_eq!(tr.rows[5].x[0], 2.0 / 32.0);
        assert_eq!(check_fejer(&g("suzuki-step"), &tr, &[0.0], tol).unwrap().verdict, Verdict::Pass);
        assert!(matches!(check_fejer(&g("halving"), &tr, &[0.5], tol), Err(Error::NotFixed { .. })));
    }

    #[test]
    fn fejer_detects_expansion() {
        let m = g("doubling");
        let mut c = IterationConfig::new(0.5, vec![0.1], 20);
        c.allow_any_alpha = true;
        let tr = run_iteration(&m, &c).unwrap();
        let rep = check_fejer(&m, &tr, &[0.0], Tolerance::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert_eq!(rep.first_violation, Some(2));
    }

    #[test]
    fn auxiliary_limit_examples() {
        let m = g("halving");
        let tr = run("halving", 0.5, 1.0, 1000);
        let tol = Tolerance::default();
        for t in [0.0, 0.5, 1.0] {
            let probe = AuxiliaryLimitProbe { t, p: vec![0.0], q: vec![0.0] };
            let rep = check_auxiliary_limit(&m, &tr, &probe, 100, 1e-8, tol).unwrap();
            assert_eq!(rep.verdict, Verdict::Pass, "t = {t}");
        }
        let short = run("halving", 0.5, 1.0, 3);
        let probe = AuxiliaryLimitProbe { t: 0.5, p: vec![0.0], q: vec![0.0] };
        assert!(matches!(check_auxiliary_limit(&m, &short, &probe, 50, 1e-8, tol), Err(Error::Input(_))));
        let early = run("halving", 0.5, 1.0, 200);
        let rep = check_auxiliary_limit(&m, &early, &probe, 100, 1e-30, tol).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn xst1_examples() {
        let tol = Tolerance::default();
        for (id, p) in [("identity", 0.4), ("halving", 0.0), ("constant", 0.3)] {
            let tr = run(id, 0.5, 1.0, 200);
            let rep = check_xst1(&g(id), &tr, 0.5, &[p], 10, Xst1Sweep::Diagonal, tol).unwrap();
            assert_ne!(rep.verdict, Verdict::Fail, "{id}: {rep:?}");
        }
        let tr = run("halving", 0.5, 1.0, 30);
        let rep = check_xst1(&g("halving"), &tr, 0.5, &[0.0], 5, Xst1Sweep::Full, tol).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert_eq!(rep.checked + rep.skipped, 29 * 30 * 6);
    }

    #[test]
    fn xst1_halving_closed_form() {
        // S y = (3/4) y, x_n = (3/4)^{n-1}, z = x_n / 2, residual x_n / 2
        let tr = run("halving", 0.5, 1.0, 40);
        let tol = Tolerance::default();
        let rep = check_xst1(&g("halving"), &tr, 0.5, &[0.0], 10, Xst1Sweep::Diagonal, tol).unwrap();
        let mut checked = 0;
        let mut worst: f64 = 0.0;
        for n in 1..40 {
            let xn = 0.75f64.powi(n - 1);
            for l in 0..=10 {
                let sz = 0.5 * xn * 0.75f64.powi(l);
                let d = xn - sz;
                let res = xn / 2.0;
                if 0.5 * res > d {
                    continue;
                }
                checked += 1;
                let lhs = 0.75 * xn - 0.75 * sz;
                worst = worst.max(lhs / (d + 8.0 / 3.0 * res));
            }
        }
        assert_eq!(rep.checked, checked);
        assert!((rep.observed.unwrap() - worst).abs() < 1e-12);
    }

    #[test]
    fn demiclosed_examples() {
        for (id, x1) in [("halving", 1.0), ("constant", 1.0), ("suzuki-step", 2.0)] {
            let m = g(id);
            let tr = run_iteration(&m, &IterationConfig::new(0.5, vec![x1], 10_000).with_residual_tol(1e-10)).unwrap();
            let rep = check_demiclosed(&m, &tr, 1e-10).unwrap();
            assert_eq!(rep.verdict, Verdict::Pass, "{id}");
        }
        let tr = run("halving", 0.5, 1.0, 5);
        assert_eq!(check_demiclosed(&g("halving"), &tr, 1e-10).unwrap().verdict, Verdict::NotApplicable);
    }

    #[test]
    fn strong_convergence_examples() {
        let tol = Tolerance::default();
        let half = ConditionIFunction::linear(0.5).unwrap();
        let m = g("halving");
        let rep =
            check_strong_convergence(&m, &run("halving", 0.5, 1.0, 200), &m.declared_fixed_points, &half, 1e-8, tol)
                .unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        let m = g("reflection");
        let rep =
            check_strong_convergence(&m, &run("reflection", 0.5, 0.0, 10), &m.declared_fixed_points, &half, 1e-8, tol)
                .unwrap();
        assert_eq!(rep.reached_at, Some(2));
        let m = g("affine-contraction");
        let f = ConditionIFunction::linear(0.1).unwrap();
        let rep = check_strong_convergence(
            &m,
            &run("affine-contraction", 0.5, 1.0, 400),
            &m.declared_fixed_points,
            &f,
            1e-8,
            tol,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        let steep = ConditionIFunction::linear(2.0).unwrap();
        let rep = check_strong_convergence(
            &m,
            &run("affine-contraction", 0.5, 1.0, 10),
            &m.declared_fixed_points,
            &steep,
            1e-8,
            tol,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn fixed_point_search() {
        assert_eq!(find_fixed_points(&g("halving"), 101, 1e-12).unwrap(), vec![vec![0.0]]);
        assert_eq!(find_fixed_points(&g("suzuki-step"), 301, 1e-12).unwrap(), vec![vec![0.0]]);
        let r = find_fixed_points(&g("reflection"), 100, 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0][0] - 0.5).abs() <= 1e-12);
        let r = find_fixed_points(&g("affine-contraction"), 64, 1e-12).unwrap();
        assert!((r[0][0] - 0.5).abs() <= 1e-11, "{r:?}");
        let r = find_fixed_points(&g("planar-rotation"), 5, 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].iter().all(|v| v.abs() < 1e-11));
    }

    #[test]
    fn sweep_preserves_order() {
        let m = g("halving");
        let base = IterationConfig::new(0.5, vec![1.0], 20);
        let trs = run_sweep(&m, &base, &[0.5, 0.9], &[vec![1.0], vec![0.5]]).unwrap();
        assert_eq!(trs.len(), 4);
        assert_eq!((trs[1].config.alpha, trs[1].config.x1[0]), (0.5, 0.5));
        assert_eq!((trs[2].config.alpha, trs[2].config.x1[0]), (0.9, 1.0));
    }
}
