//! Sampled classifiers for nonexpansive-type conditions.
//!
//! Each check sweeps ordered pairs `(x, y)` from a [`PairSamplePlan`] and
//! records inequality violations as witnesses. Sweeps run in parallel; partial
//! results merge by summing counts and keeping the lexicographically smallest
//! witnesses, so reports do not depend on the thread count.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::{FixedSet, MappingDef};
use crate::tolerance::Tolerance;
use crate::verdict::Verdict;

pub const DEFAULT_MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    ExhaustiveGrid,
    SeededRandom,
}

/// Which pairs a check visits.
///
/// Both modes draw points from `domain.grid(grid_points)`. Exhaustive mode
/// visits all ordered pairs; random mode draws `pair_count` ordered index
/// pairs uniformly from a ChaCha8 stream seeded with `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSamplePlan {
    pub mode: SampleMode,
    pub grid_points: usize,
    pub pair_count: usize,
    pub seed: Option<u64>,
    /// Witnesses kept per report; `usize::MAX` keeps all.
    pub max_witnesses: usize,
}

impl PairSamplePlan {
    pub fn exhaustive(grid_points: usize) -> Self {
        Self {
            mode: SampleMode::ExhaustiveGrid,
            grid_points,
            pair_count: 0,
            seed: None,
            max_witnesses: DEFAULT_MAX_WITNESSES,
        }
    }

    pub fn random(grid_points: usize, pair_count: usize, seed: u64) -> Self {
        Self {
            mode: SampleMode::SeededRandom,
            grid_points,
            pair_count,
            seed: Some(seed),
            max_witnesses: DEFAULT_MAX_WITNESSES,
        }
    }

    pub fn with_max_witnesses(mut self, max: usize) -> Self {
        self.max_witnesses = max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_points == 0 {
            return Err(Error::input("grid_points must be positive"));
        }
        if self.max_witnesses == 0 {
            return Err(Error::input("max_witnesses must be positive"));
        }
        if self.mode == SampleMode::SeededRandom {
            if self.seed.is_none() {
                return Err(Error::input("random sampling requires an explicit seed"));
            }
            if self.pair_count == 0 {
                return Err(Error::input("random sampling requires pair_count > 0"));
            }
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.unwrap_or(0))
    }
}

/// One violated inequality `lhs <= rhs` at the pair `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clause: Option<String>,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (u, v) in a.iter().zip(b) {
        match u.total_cmp(v) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

impl Witness {
    fn order(&self, other: &Self) -> Ordering {
        lex_cmp(&self.x, &other.x).then_with(|| lex_cmp(&self.y, &other.y)).then_with(|| self.clause.cmp(&other.clause))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub verdict: Verdict,
    pub pairs_checked: u64,
    pub premise_vacuous_count: u64,
    pub tolerance: Tolerance,
    pub witnesses: Vec<Witness>,
    /// Total violations found; `witnesses` may be truncated.
    pub failures: u64,
    /// Largest observed `lhs / rhs` over checked pairs with `rhs > 0`.
    pub max_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl ConditionReport {
    fn not_applicable(condition: &str, tol: Tolerance, note: String) -> Self {
        ConditionReport {
            condition: condition.into(),
            verdict: Verdict::NotApplicable,
            pairs_checked: 0,
            premise_vacuous_count: 0,
            tolerance: tol,
            witnesses: Vec::new(),
            failures: 0,
            max_ratio: None,
            notes: vec![note],
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Order-independent partial result of a sweep.
#[derive(Debug, Clone)]
struct Tally {
    checked: u64,
    vacuous: u64,
    failures: u64,
    max_ratio: Option<f64>,
    witnesses: Vec<Witness>,
}

impl Tally {
    fn empty() -> Self {
        Tally { checked: 0, vacuous: 0, failures: 0, max_ratio: None, witnesses: Vec::new() }
    }

    fn observe(&mut self, lhs: f64, rhs: f64) {
        if rhs > 0.0 {
            let r = lhs / rhs;
            self.max_ratio = Some(self.max_ratio.map_or(r, |m| m.max(r)));
        }
    }

    fn push(&mut self, w: Witness, cap: usize) {
        self.failures += 1;
        if self.witnesses.len() >= cap {
            if let Some(last) = self.witnesses.last() {
                if w.order(last) != Ordering::Less {
                    return;
                }
            }
        }
        let at = self.witnesses.partition_point(|v| v.order(&w) == Ordering::Less);
        if self.witnesses.get(at).is_some_and(|v| v.order(&w) == Ordering::Equal) {
            return;
        }
        self.witnesses.insert(at, w);
        self.witnesses.truncate(cap);
    }

    fn merge(mut self, other: Tally, cap: usize) -> Tally {
        self.checked += other.checked;
        self.vacuous += other.vacuous;
        self.failures += other.failures;
        self.max_ratio = match (self.max_ratio, other.max_ratio) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.witnesses.extend(other.witnesses);
        self.witnesses.sort_by(|a, b| a.order(b));
        self.witnesses.dedup_by(|a, b| a.order(b) == Ordering::Equal);
        self.witnesses.truncate(cap);
        self
    }

    fn into_report(self, condition: &str, tol: Tolerance) -> ConditionReport {
        let verdict = if !self.witnesses.is_empty() {
            Verdict::Fail
        } else if self.checked == 0 {
            Verdict::Vacuous
        } else {
            Verdict::Pass
        };
        ConditionReport {
            condition: condition.into(),
            verdict,
            pairs_checked: self.checked,
            premise_vacuous_count: self.vacuous,
            tolerance: tol,
            witnesses: self.witnesses,
            failures: self.failures,
            max_ratio: self.max_ratio,
            notes: Vec::new(),
        }
    }
}

/// A grid point with its image and residual.
#[derive(Debug, Clone)]
pub(crate) struct Sample {
    pub x: Vec<f64>,
    pub tx: Vec<f64>,
    pub residual: f64,
}

pub(crate) fn samples(mapping: &MappingDef, points: Vec<Vec<f64>>) -> Result<Vec<Sample>> {
    points
        .into_par_iter()
        .map(|x| {
            let tx = mapping.apply(&x)?;
            let residual = mapping.norm.dist(&x, &tx);
            Ok(Sample { x, tx, residual })
        })
        .collect()
}

/// Inequality produced by a pair: `lhs <= rhs` must hold.
struct Ineq {
    lhs: f64,
    rhs: f64,
    clause: Option<&'static str>,
}

enum Outcome {
    /// Premise failed; nothing asserted.
    Skipped,
    Checked(Vec<Ineq>),
}

fn record(tally: &mut Tally, x: &Sample, y: &[f64], outcome: Outcome, tol: Tolerance, cap: usize) {
    match outcome {
        Outcome::Skipped => tally.vacuous += 1,
        Outcome::Checked(ineqs) => {
            tally.checked += 1;
            for q in ineqs {
                tally.observe(q.lhs, q.rhs);
                if tol.exceeds(q.lhs, q.rhs) {
                    let w = Witness {
                        x: x.x.clone(),
                        y: y.to_vec(),
                        lhs: q.lhs,
                        rhs: q.rhs,
                        clause: q.clause.map(str::to_string),
                    };
                    tally.push(w, cap);
                }
            }
        }
    }
}

/// Runs `check` on the ordered pairs selected by `plan`.
fn sweep_pairs<F>(pts: &[Sample], plan: &PairSamplePlan, tol: Tolerance, check: F) -> Tally
where
    F: Fn(&Sample, &Sample) -> Outcome + Sync,
{
    let cap = plan.max_witnesses;
    let visit = |mut tally: Tally, (i, j): (usize, usize)| {
        let (x, y) = (&pts[i], &pts[j]);
        record(&mut tally, x, &y.x, check(x, y), tol, cap);
        tally
    };
    match plan.mode {
        SampleMode::ExhaustiveGrid => (0..pts.len())
            .into_par_iter()
            .fold(Tally::empty, |t, i| (0..pts.len()).map(|j| (i, j)).fold(t, visit))
            .reduce(Tally::empty, |a, b| a.merge(b, cap)),
        SampleMode::SeededRandom => {
            let n = pts.len();
            let mut rng = plan.rng();
            let pairs: Vec<(usize, usize)> =
                (0..plan.pair_count).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            pairs.into_par_iter().fold(Tally::empty, visit).reduce(Tally::empty, |a, b| a.merge(b, cap))
        }
    }
}

/// Grid indices visited by single-point checks.
fn sweep_points(pts: &[Sample], plan: &PairSamplePlan) -> Vec<usize> {
    match plan.mode {
        SampleMode::ExhaustiveGrid => (0..pts.len()).collect(),
        SampleMode::SeededRandom => {
            let mut rng = plan.rng();
            (0..plan.pair_count).map(|_| rng.gen_range(0..pts.len())).collect()
        }
    }
}

fn grid_samples(mapping: &MappingDef, plan: &PairSamplePlan) -> Result<Vec<Sample>> {
    plan.validate()?;
    let pts = mapping.domain.grid(plan.grid_points);
    if pts.is_empty() {
        return Err(Error::input("sample grid is empty"));
    }
    samples(mapping, pts)
}

/// `‖Tx - Ty‖ <= ‖x - y‖` for all sampled pairs.
pub fn check_nonexpansive(mapping: &MappingDef, plan: &PairSamplePlan, tol: Tolerance) -> Result<ConditionReport> {
    let pts = grid_samples(mapping, plan)?;
    let norm = mapping.norm;
    let tally = sweep_pairs(&pts, plan, tol, |x, y| {
        Outcome::Checked(vec![Ineq { lhs: norm.dist(&x.tx, &y.tx), rhs: norm.dist(&x.x, &y.x), clause: None }])
    });
    Ok(tally.into_report("nonexpansive", tol))
}

/// Suzuki's condition (C): `½‖x - Tx‖ <= ‖x - y‖` implies `‖Tx - Ty‖ <= ‖x - y‖`.
pub fn check_condition_c(mapping: &MappingDef, plan: &PairSamplePlan, tol: Tolerance) -> Result<ConditionReport> {
    let pts = grid_samples(mapping, plan)?;
    let norm = mapping.norm;
    let tally = sweep_pairs(&pts, plan, tol, |x, y| {
        let d = norm.dist(&x.x, &y.x);
        if 0.5 * x.residual > d {
            return Outcome::Skipped;
        }
        Outcome::Checked(vec![Ineq { lhs: norm.dist(&x.tx, &y.tx), rhs: d, clause: None }])
    });
    Ok(tally.into_report("condition-c", tol))
}

/// Reich-Suzuki-(C): `½‖x - Tx‖ <= ‖x - y‖` implies
/// `‖Tx - Ty‖ <= (‖x - y‖ + ‖y - Ty‖ + ‖x - Tx‖) / 3`.
pub fn check_rsc(mapping: &MappingDef, plan: &PairSamplePlan, tol: Tolerance) -> Result<ConditionReport> {
    let pts = grid_samples(mapping, plan)?;
    Ok(rsc_on(&pts, mapping, plan, tol))
}

fn rsc_on(pts: &[Sample], mapping: &MappingDef, plan: &PairSamplePlan, tol: Tolerance) -> ConditionReport {
    let norm = mapping.norm;
    sweep_pairs(pts, plan, tol, |x, y| {
        let d = norm.dist(&x.x, &y.x);
        if 0.5 * x.residual > d {
            return Outcome::Skipped;
        }
        let rhs = (d + y.residual + x.residual) / 3.0;
        Outcome::Checked(vec![Ineq { lhs: norm.dist(&x.tx, &y.tx), rhs, clause: None }])
    })
    .into_report("rsc", tol)
}

/// Confirms each representative is a fixed point and returns them.
pub(crate) fn verified_fixed_points(
    mapping: &MappingDef,
    fixed: &FixedSet,
    grid_points: usize,
    tol: Tolerance,
) -> Result<Vec<Vec<f64>>> {
    let reps = fixed.representatives(&mapping.domain, grid_points);
    if reps.is_empty() {
        return Err(Error::input("a nonempty set of fixed points is required"));
    }
    for p in &reps {
        mapping.norm.check_dim(p)?;
        let residual = mapping.residual(p)?;
        if residual > tol.floor() {
            return Err(Error::NotFixed { point: p.clone(), residual });
        }
    }
    Ok(reps)
}

fn nearest<'a>(mapping: &MappingDef, x: &[f64], fixed: &'a [Vec<f64>]) -> (f64, &'a [f64]) {
    fixed
        .iter()
        .map(|p| (mapping.norm.dist(x, p), p.as_slice()))
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lex_cmp(a.1, b.1)))
        .expect("fixed set is nonempty")
}

/// `‖Tx - p‖ <= ‖x - p‖` for every sampled `x` and every supplied fixed point `p`.
pub fn check_quasi_nonexpansive(
    mapping: &MappingDef,
    fixed: &FixedSet,
    plan: &PairSamplePlan,
    tol: Tolerance,
) -> Result<ConditionReport> {
    let pts = grid_samples(mapping, plan)?;
    let fps = verified_fixed_points(mapping, fixed, plan.grid_points, tol)?;
    let norm = mapping.norm;
    let cap = plan.max_witnesses;
    let idx = sweep_points(&pts, plan);
    let tally = idx
        .into_par_iter()
        .fold(Tally::empty, |mut t, i| {
            let x = &pts[i];
            for p in &fps {
                let ineq = Ineq { lhs: norm.dist(&x.tx, p), rhs: norm.dist(&x.x, p), clause: None };
                record(&mut t, x, p, Outcome::Checked(vec![ineq]), tol, cap);
            }
            t
        })
        .reduce(Tally::empty, |a, b| a.merge(b, cap));
    Ok(tally.into_report("quasi-nonexpansive", tol))
}

/// The two consequences of RSC: (i) `‖x - Ty‖ <= 7‖x - Tx‖ + ‖x - y‖` and
/// (ii) `‖y - Ty‖ <= 7‖x - Tx‖ + 2‖x - y‖`.
///
/// Not applicable unless the mapping passes [`check_rsc`] on the same plan.
pub fn verify_proposition_k(mapping: &MappingDef, plan: &PairSamplePlan, tol: Tolerance) -> Result<ConditionReport> {
    let pts = grid_samples(mapping, plan)?;
    let gate = rsc_on(&pts, mapping, plan, tol);
    if gate.verdict == Verdict::Fail {
        return Ok(ConditionReport::not_applicable(
            "proposition-k",
            tol,
            format!("mapping fails the RSC condition on this plan ({} violations)", gate.failures),
        ));
    }
    let norm = mapping.norm;
    let tally = sweep_pairs(&pts, plan, tol, |x, y| {
        let d = norm.dist(&x.x, &y.x);
        Outcome::Checked(vec![
            Ineq { lhs: norm.dist(&x.x, &y.tx), rhs: 7.0 * x.residual + d, clause: Some("i") },
            Ineq { lhs: y.residual, rhs: 7.0 * x.residual + 2.0 * d, clause: Some("ii") },
        ])
    });
    Ok(tally.into_report("proposition-k", tol))
}

/// Nondecreasing `f` with `f(0) = 0` and `f(r) > 0` for `r > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum ConditionIFunction {
    /// `f(r) = k r`.
    Linear { k: f64 },
    /// Piecewise-linear through `(r, f(r))` points, constant past the last one.
    Table { points: Vec<(f64, f64)> },
}

impl ConditionIFunction {
    pub fn linear(k: f64) -> Result<Self> {
        let f = ConditionIFunction::Linear { k };
        f.validate()?;
        Ok(f)
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        let f = ConditionIFunction::Table { points };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConditionIFunction::Linear { k } => {
                if !(k.is_finite() && *k > 0.0) {
                    return Err(Error::input(format!("condition (I) slope must be positive, got {k}")));
                }
            }
            ConditionIFunction::Table { points } => {
                match points.first() {
                    Some(&(r, v)) if r == 0.0 && v == 0.0 => {}
                    _ => return Err(Error::input("condition (I) table must start at (0, 0)")),
                }
                if points.len() < 2 {
                    return Err(Error::input("condition (I) table needs a point with r > 0"));
                }
                for w in points.windows(2) {
                    let ((r0, f0), (r1, f1)) = (w[0], w[1]);
                    if !(r1 > r0) || !r1.is_finite() {
                        return Err(Error::input("condition (I) table abscissae must increase"));
                    }
                    if !(f1 >= f0) || !f1.is_finite() {
                        return Err(Error::input("condition (I) function must be nondecreasing"));
                    }
                    if f1 <= 0.0 {
                        return Err(Error::input(format!("condition (I) function must be positive at r = {r1}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            ConditionIFunction::Linear { k } => k * r,
            ConditionIFunction::Table { points } => {
                let at = points.partition_point(|&(pr, _)| pr <= r);
                if at == 0 {
                    return 0.0;
                }
                if at == points.len() {
                    return points[at - 1].1;
                }
                let ((r0, f0), (r1, f1)) = (points[at - 1], points[at]);
                f0 + (f1 - f0) * (r - r0) / (r1 - r0)
            }
        }
    }
}

/// Senter-Dotson condition (I): `‖x - Tx‖ >= f(d(x, F))` with `d(x, F)` the
/// distance to the nearest supplied fixed point.
pub fn check_condition_i(
    mapping: &MappingDef,
    fixed: &FixedSet,
    f: &ConditionIFunction,
    plan: &PairSamplePlan,
    tol: Tolerance,
) -> Result<ConditionReport> {
    f.validate()?;
    let pts = grid_samples(mapping, plan)?;
    let fps = verified_fixed_points(mapping, fixed, plan.grid_points, tol)?;
    let cap = plan.max_witnesses;
    let idx = sweep_points(&pts, plan);
    let tally = idx
        .into_par_iter()
        .fold(Tally::empty, |mut t, i| {
            let x = &pts[i];
            let (dist, p) = nearest(mapping, &x.x, &fps);
            let ineq = Ineq { lhs: f.eval(dist), rhs: x.residual, clause: None };
            record(&mut t, x, p, Outcome::Checked(vec![ineq]), tol, cap);
            t
        })
        .reduce(Tally::empty, |a, b| a.merge(b, cap));
    Ok(tally.into_report("condition-i", tol))
}

/// Empirical lower estimate of the radius in the convex-combination lemma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiEstimate {
    pub epsilon: f64,
    pub xi_hat: f64,
    pub t_grid: usize,
    pub pair_grid: usize,
    pub verdict: Verdict,
    /// Every grid pair satisfied the conclusion; any larger radius also works.
    pub saturated: bool,
    pub message: String,
}

/// Largest `xi` such that all grid pairs `u, v` with `‖Tu - u‖ < xi` and
/// `‖Tv - v‖ < xi` keep `‖Tw - w‖ < epsilon` at `w = t u + (1-t) v` for every
/// `t` on a uniform grid of `t_grid` points in `[0, 1]`.
///
/// The admissible set only changes at observed residual levels, so the search
/// bisects over the sorted levels. Requires the mapping to pass RSC on the
/// exhaustive `pair_grid` plan.
pub fn estimate_xi(
    mapping: &MappingDef,
    epsilon: f64,
    t_grid: usize,
    pair_grid: usize,
    tol: Tolerance,
) -> Result<XiEstimate> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::input(format!("epsilon must be positive, got {epsilon}")));
    }
    if t_grid < 2 {
        return Err(Error::input("t_grid needs at least 2 points"));
    }
    let plan = PairSamplePlan::exhaustive(pair_grid);
    let mut pts = grid_samples(mapping, &plan)?;
    let gate = rsc_on(&pts, mapping, &plan, tol);
    let mut out = XiEstimate {
        epsilon,
        xi_hat: 0.0,
        t_grid,
        pair_grid,
        verdict: Verdict::NotApplicable,
        saturated: false,
        message: String::new(),
    };
    if gate.verdict == Verdict::Fail {
        out.message = "mapping fails the RSC condition on the pair grid".into();
        return Ok(out);
    }

    pts.sort_by(|a, b| a.residual.total_cmp(&b.residual).then_with(|| lex_cmp(&a.x, &b.x)));
    let mut levels: Vec<f64> = pts.iter().map(|s| s.residual).collect();
    levels.dedup();
    let ts: Vec<f64> = (0..t_grid).map(|k| k as f64 / (t_grid - 1) as f64).collect();

    // ok(k): the conclusion holds for all pairs with residual <= levels[k]
    let ok = |k: usize| -> Result<bool> {
        let count = pts.partition_point(|s| s.residual <= levels[k]);
        let admitted = &pts[..count];
        let bad = admitted.par_iter().enumerate().try_fold(
            || false,
            |_, (i, u)| -> Result<bool> {
                for v in &admitted[i..] {
                    for &t in &ts {
                        let w: Vec<f64> = u.x.iter().zip(&v.x).map(|(a, b)| t * a + (1.0 - t) * b).collect();
                        let tw = mapping.apply(&w)?;
                        if !(mapping.norm.dist(&tw, &w) < epsilon) {
                            return Ok(true);
                        }
                    }
                }
                Ok(false)
            },
        );
        let any_bad = bad.try_reduce(|| false, |a, b| Ok(a || b))?;
        Ok(!any_bad)
    };

    // largest k with ok(k); ok(-1) holds vacuously
    let (mut lo, mut hi) = (-1i64, levels.len() as i64);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid as usize)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.verdict = Verdict::Pass;
    if hi as usize == levels.len() {
        out.saturated = true;
        out.xi_hat = *levels.last().expect("nonempty grid");
        out.message = "all grid pairs satisfy the conclusion; xi_hat is the largest grid residual".into();
    } else {
        out.xi_hat = levels[hi as usize];
        out.message = format!("conclusion first fails once residual level {:e} is admitted", levels[hi as usize]);
    }
    Ok(out)
}

/// Runs every applicable classifier.
pub fn classify(
    mapping: &MappingDef,
    plan: &PairSamplePlan,
    tol: Tolerance,
    fixed: Option<&FixedSet>,
    f: Option<&ConditionIFunction>,
) -> Result<Vec<ConditionReport>> {
    let mut reports = vec![
        check_nonexpansive(mapping, plan, tol)?,
        check_condition_c(mapping, plan, tol)?,
        check_rsc(mapping, plan, tol)?,
    ];
    let fixed = fixed.unwrap_or(&mapping.declared_fixed_points);
    if fixed.is_known() {
        reports.push(check_quasi_nonexpansive(mapping, fixed, plan, tol)?);
        if let Some(f) = f {
            reports.push(check_condition_i(mapping, fixed, f, plan, tol)?);
        }
    }
    Ok(reports)
}
