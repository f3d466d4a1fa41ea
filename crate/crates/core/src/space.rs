//! Finite-dimensional lp spaces, bounded convex domains, and sampled
//! uniform-convexity diagnostics.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::verdict::Verdict;

/// Tolerance used by [`DomainSet::contains`] for balls.
pub const BALL_TOLERANCE: f64 = 1e-12;

/// Exponent of an lp norm. `p = inf` is a distinct variant, never a float sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::input(format!("norm exponent must satisfy 1 <= p <= inf, got {p}")))
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// lp is uniformly convex exactly for `1 < p < inf`.
    pub fn is_uniformly_convex(self) -> bool {
        matches!(self, Exponent::Finite(p) if p > 1.0)
    }

    fn eval(self, x: &[f64]) -> f64 {
        match self {
            Exponent::Infinity => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            Exponent::Finite(1.0) => x.iter().map(|v| v.abs()).sum(),
            Exponent::Finite(p) => {
                // Scale by the largest modulus so the power sum cannot overflow.
                let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if scale == 0.0 || !scale.is_finite() {
                    return scale;
                }
                if p == 2.0 {
                    let s: f64 = x
                        .iter()
                        .map(|v| {
                            let r = v / scale;
                            r * r
                        })
                        .sum();
                    scale * s.sqrt()
                } else {
                    let s: f64 = x.iter().map(|v| (v.abs() / scale).powf(p)).sum();
                    scale * s.powf(1.0 / p)
                }
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => {
                let p: f64 = other.parse().map_err(|_| Error::input(format!("cannot parse norm exponent `{s}`")))?;
                Exponent::new(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        let parsed = match Repr::deserialize(deserializer)? {
            Repr::Num(p) => Exponent::new(p),
            Repr::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// An lp norm on R^d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub p: Exponent,
    pub dim: usize,
}

impl NormSpec {
    pub fn new(p: Exponent, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("dimension must be positive"));
        }
        Ok(Self { p, dim })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self { p: Exponent::Finite(2.0), dim: dim.max(1) }
    }

    pub fn uniformly_convex(&self) -> bool {
        self.p.is_uniformly_convex()
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dim {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.dim, got: x.len() })
        }
    }

    /// lp norm of `x`; rejects vectors of the wrong length.
    pub fn norm_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.p.eval(x))
    }

    /// Norm without the dimension check, for hot loops over validated data.
    #[inline]
    pub fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.p.eval(x)
    }

    /// `‖x - y‖`.
    #[inline]
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        if x.len() == 1 {
            return (x[0] - y[0]).abs();
        }
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.p.eval(&diff)
    }

    /// `‖x + y‖`.
    pub fn norm_sum(&self, x: &[f64], y: &[f64]) -> f64 {
        let s: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.p.eval(&s)
    }
}

/// Bounded, closed, convex subset of R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSet {
    Interval { lo: f64, hi: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64, p: Exponent },
}

impl DomainSet {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::input(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(DomainSet::Interval { lo, hi })
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::input("box bounds must be nonempty and of equal length"));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite()) || l > u {
                return Err(Error::input(format!("invalid box side [{l}, {u}]")));
            }
        }
        Ok(DomainSet::Box { lower, upper })
    }

    pub fn ball(center: Vec<f64>, radius: f64, p: Exponent) -> Result<Self> {
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("ball center must be a finite, nonempty vector"));
        }
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::input(format!("invalid ball radius {radius}")));
        }
        Ok(DomainSet::Ball { center, radius, p })
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSet::Interval { .. } => 1,
            DomainSet::Box { lower, .. } => lower.len(),
            DomainSet::Ball { center, .. } => center.len(),
        }
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            DomainSet::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            DomainSet::Box { lower, upper } => (lower.clone(), upper.clone()),
            DomainSet::Ball { center, radius, .. } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
        }
    }

    /// Exact for intervals and boxes; balls use [`BALL_TOLERANCE`].
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            DomainSet::Interval { lo, hi } => *lo <= x[0] && x[0] <= *hi,
            DomainSet::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| l <= v && v <= u)
            }
            DomainSet::Ball { center, radius, p } => {
                let diff: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                p.eval(&diff) <= radius + BALL_TOLERANCE
            }
        }
    }

    /// Membership with an additional absolute slack, scaled by the domain size.
    pub fn contains_within(&self, x: &[f64], slack: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let pad = slack * (1.0 + self.extent());
        match self {
            DomainSet::Interval { lo, hi } => *lo - pad <= x[0] && x[0] <= *hi + pad,
            DomainSet::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| l - pad <= *v && *v <= u + pad)
            }
            DomainSet::Ball { center, radius, p } => {
                let diff: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                p.eval(&diff) <= radius + BALL_TOLERANCE + pad
            }
        }
    }

    /// Nearest-point style projection used to absorb rounding drift.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            DomainSet::Interval { lo, hi } => vec![x[0].clamp(*lo, *hi)],
            DomainSet::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).map(|(v, (l, u))| v.clamp(*l, *u)).collect()
            }
            DomainSet::Ball { center, radius, p } => {
                let diff: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                let n = p.eval(&diff);
                if n <= *radius {
                    x.to_vec()
                } else {
                    let s = radius / n;
                    center.iter().zip(&diff).map(|(c, d)| c + s * d).collect()
                }
            }
        }
    }

    /// Largest side length of the bounding box.
    pub fn extent(&self) -> f64 {
        let (l, u) = self.bounds();
        l.iter().zip(&u).fold(0.0, |m, (a, b)| m.max(b - a))
    }

    /// Deterministic grid with `n` points per axis, restricted to the domain.
    ///
    /// Points are emitted in lexicographic order. For `n == 1` the grid is the
    /// box midpoint (or the ball center).
    pub fn grid(&self, n: usize) -> Vec<Vec<f64>> {
        let n = n.max(1);
        let (lower, upper) = self.bounds();
        let axes: Vec<Vec<f64>> = lower.iter().zip(&upper).map(|(&l, &u)| axis_points(l, u, n)).collect();
        let d = axes.len();
        let total = n.checked_pow(d as u32).unwrap_or(usize::MAX);
        let mut out = Vec::with_capacity(total.min(1 << 20));
        let mut idx = vec![0usize; d];
        loop {
            let p: Vec<f64> = idx.iter().enumerate().map(|(k, &i)| axes[k][i]).collect();
            if self.contains(&p) {
                out.push(p);
            }
            // odometer increment, last axis fastest
            let mut k = d;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

fn axis_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let span = hi - lo;
    let last = (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + span * (i as f64) / last }).collect()
}

/// Sampled estimate of the modulus of convexity at a given `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub p: Exponent,
    pub dim: usize,
    pub epsilon: f64,
    pub delta_hat: f64,
    pub samples: usize,
    /// Pairs that satisfied `‖x - y‖ >= epsilon` and contributed to the estimate.
    pub admitted_pairs: usize,
    pub uniformly_convex: bool,
    /// False when the space is uniformly convex but the estimate is not positive.
    pub consistent: bool,
    pub warnings: Vec<String>,
}

/// Estimates `delta(eps) = 1 - sup { ‖x+y‖/2 : ‖x‖=‖y‖=1, ‖x-y‖ >= eps }`.
///
/// The supremum is taken over seeded random unit pairs (normalized Gaussian
/// directions) together with a fixed family of axis, antipodal, and sign-vector
/// pairs. Every admissible pair is additionally slid along the sphere towards
/// the constraint boundary `‖x-y‖ = eps`, where the supremum is attained.
pub fn estimate_modulus(space: &NormSpec, epsilon: f64, samples: usize, seed: u64) -> Result<ModulusEstimate> {
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(Error::input(format!("epsilon must lie in (0, 2], got {epsilon}")));
    }
    let d = space.dim;
    if d < 2 && space.p != Exponent::Finite(2.0) {
        return Err(Error::input("modulus estimation needs dim >= 2 unless p = 2 (the 1D sphere is two points)"));
    }

    let mut best = f64::NEG_INFINITY;
    let mut admitted = 0usize;
    let mut consider = |x: &[f64], y: &[f64]| {
        if let Some(v) = boundary_value(space, x, y, epsilon) {
            admitted += 1;
            if v > best {
                best = v;
            }
        }
    };

    for (x, y) in deterministic_pairs(space) {
        consider(&x, &y);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_unit(space, &mut rng);
        let y = random_unit(space, &mut rng);
        consider(&x, &y);
    }

    let uniformly_convex = space.uniformly_convex();
    let mut warnings = Vec::new();
    if !uniformly_convex {
        warnings.push(format!(
            "l{} is not uniformly convex; convergence results requiring uniform convexity do not apply",
            space.p
        ));
    }
    let delta_hat = if admitted == 0 {
        warnings.push("no sampled pair satisfied ‖x-y‖ >= epsilon".to_string());
        0.0
    } else {
        (1.0 - best).clamp(0.0, 1.0)
    };
    let consistent = !(uniformly_convex && delta_hat <= 0.0);
    if !consistent {
        warnings.push("estimate is not positive although the space is uniformly convex".into());
    }

    Ok(ModulusEstimate {
        p: space.p,
        dim: d,
        epsilon,
        delta_hat,
        samples,
        admitted_pairs: admitted,
        uniformly_convex,
        consistent,
        warnings,
    })
}

fn normalize(space: &NormSpec, v: &mut [f64]) -> bool {
    let n = space.norm(v);
    if !(n > 1e-300) || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|c| *c /= n);
    true
}

fn random_unit(space: &NormSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..space.dim).map(|_| StandardNormal.sample(rng)).collect();
        if normalize(space, &mut v) {
            return v;
        }
    }
}

fn deterministic_pairs(space: &NormSpec) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = space.dim;
    let unit = |i: usize, s: f64| {
        let mut e = vec![0.0; d];
        e[i] = s;
        e
    };
    let mut pairs = Vec::new();
    for i in 0..d {
        pairs.push((unit(i, 1.0), unit(i, -1.0)));
        for j in 0..d {
            if i != j {
                pairs.push((unit(i, 1.0), unit(j, 1.0)));
                pairs.push((unit(i, 1.0), unit(j, -1.0)));
            }
        }
    }
    // normalized sign vectors (corners of the cube); all pairs for small d
    if d <= 6 {
        let corners: Vec<Vec<f64>> = (0..(1usize << d))
            .filter_map(|mask| {
                let mut v: Vec<f64> = (0..d).map(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
                normalize(space, &mut v).then_some(v)
            })
            .collect();
        for a in &corners {
            for b in &corners {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    pairs
}

/// Largest `‖x + y'‖/2` found on the arc from `y` towards `x` while keeping
/// `‖x - y'‖ >= eps`. `None` if the pair itself is not admissible.
fn boundary_value(space: &NormSpec, x: &[f64], y: &[f64], eps: f64) -> Option<f64> {
    if space.dist(x, y) < eps {
        return None;
    }
    let mut value = 0.5 * space.norm_sum(x, y);
    let arc = |s: f64| -> Option<Vec<f64>> {
        let mut v: Vec<f64> = x.iter().zip(y).map(|(a, b)| s * a + (1.0 - s) * b).collect();
        normalize(space, &mut v).then_some(v)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut found: Option<Vec<f64>> = None;
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        match arc(mid) {
            Some(v) if space.dist(x, &v) >= eps => {
                lo = mid;
                found = Some(v);
            }
            _ => hi = mid,
        }
    }
    if let Some(v) = found {
        value = value.max(0.5 * space.norm_sum(x, &v));
    }
    Some(value)
}

/// Result of the finite-sample check of "norms → 1 and ‖x+y‖ → 2 imply ‖x−y‖ → 0".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KirkReport {
    pub verdict: Verdict,
    pub tail_start: usize,
    /// Upper bound on `‖x_n - y_n‖` implied by the tail hypotheses; `None` when
    /// not applicable.
    pub bound: Option<f64>,
    pub max_tail_distance: f64,
    pub message: String,
}

/// Bound on `‖x - y‖` for `‖x‖, ‖y‖ <= 1 + tol` and `‖x + y‖ >= 2 - tol` in lp.
///
/// From Clarkson's inequalities with `r = max(p, p/(p-1))`:
/// `‖(x-y)/2‖^r <= (1+tol)^r - (1-tol/2)^r`. For `p = 2` this is the
/// parallelogram identity, giving `sqrt(12 tol + 3 tol^2)`.
pub fn kirk_distance_bound(p: Exponent, tol: f64) -> Option<f64> {
    let p = match p {
        Exponent::Finite(p) if p > 1.0 => p,
        _ => return None,
    };
    let r = if p >= 2.0 { p } else { p / (p - 1.0) };
    let gap = (1.0 + tol).powf(r) - (1.0 - 0.5 * tol).max(0.0).powf(r);
    Some(2.0 * gap.max(0.0).powf(1.0 / r))
}

/// Checks the tail of two sequences against the uniform-convexity lemma.
///
/// The tail is the last `tail` entries (the whole sequence if shorter). When the
/// hypotheses `|‖x_n‖-1|`, `|‖y_n‖-1|`, `|‖x_n+y_n‖-2|` all stay within `tol` on
/// the tail, every tail distance `‖x_n-y_n‖` must stay below
/// [`kirk_distance_bound`].
pub fn check_kirk_property(
    space: &NormSpec,
    xs: &[Vec<f64>],
    ys: &[Vec<f64>],
    tol: f64,
    tail: usize,
) -> Result<KirkReport> {
    if xs.len() != ys.len() {
        return Err(Error::input(format!("sequences differ in length: {} vs {}", xs.len(), ys.len())));
    }
    for v in xs.iter().chain(ys) {
        space.check_dim(v)?;
    }
    let start = xs.len().saturating_sub(tail.max(1));
    let not_applicable = |message: String| KirkReport {
        verdict: Verdict::NotApplicable,
        tail_start: start,
        bound: None,
        max_tail_distance: f64::NAN,
        message,
    };
    if xs.is_empty() {
        return Ok(not_applicable("empty sequences".into()));
    }
    let Some(bound) = kirk_distance_bound(space.p, tol) else {
        return Ok(not_applicable(format!("l{} is not uniformly convex", space.p)));
    };

    let mut max_dist = 0.0f64;
    for (n, (x, y)) in xs.iter().zip(ys).enumerate().skip(start) {
        let (nx, ny, ns) = (space.norm(x), space.norm(y), space.norm_sum(x, y));
        if (nx - 1.0).abs() > tol || (ny - 1.0).abs() > tol || (ns - 2.0).abs() > tol {
            return Ok(not_applicable(format!("hypotheses fail at index {n}: ‖x‖={nx}, ‖y‖={ny}, ‖x+y‖={ns}")));
        }
        max_dist = max_dist.max(space.dist(x, y));
    }
    let verdict = if max_dist <= bound { Verdict::Pass } else { Verdict::Fail };
    Ok(KirkReport {
        verdict,
        tail_start: start,
        bound: Some(bound),
        max_tail_distance: max_dist,
        message: format!("max tail ‖x-y‖ = {max_dist:e}, bound {bound:e}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(p: f64, dim: usize) -> NormSpec {
        NormSpec::new(Exponent::new(p).unwrap(), dim).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(l(2.0, 2).norm_eval(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(l(1.0, 2).norm_eval(&[3.0, 4.0]).unwrap(), 7.0);
        let sup = NormSpec::new(Exponent::Infinity, 2).unwrap();
        assert_eq!(sup.norm_eval(&[3.0, -4.0]).unwrap(), 4.0);
    }

    #[test]
    fn norm_rejects_wrong_dimension() {
        assert!(matches!(l(2.0, 3).norm_eval(&[1.0, 2.0]), Err(Error::Dimension { expected: 3, got: 2 })));
    }

    #[test]
    fn general_p_does_not_overflow() {
        let n = l(3.0, 2).norm_eval(&[1e300, 1e300]).unwrap();
        assert!((n / 1e300 - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn exponent_validation_and_flags() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(!Exponent::new(1.0).unwrap().is_uniformly_convex());
        assert!(Exponent::new(1.5).unwrap().is_uniformly_convex());
        assert!(!Exponent::Infinity.is_uniformly_convex());
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
    }

    #[test]
    fn grid_is_inside_and_deterministic() {
        let ball = DomainSet::ball(vec![0.0, 0.0], 1.0, Exponent::Finite(2.0)).unwrap();
        let g = ball.grid(21);
        assert!(!g.is_empty());
        assert!(g.iter().all(|p| ball.contains(p)));
        assert_eq!(g, ball.grid(21));

        let iv = DomainSet::interval(0.0, 3.0).unwrap();
        let g = iv.grid(301);
        assert_eq!(g.len(), 301);
        assert_eq!(g[0], vec![0.0]);
        assert_eq!(g[300], vec![3.0]);
        assert_eq!(iv.grid(1), vec![vec![1.5]]);
    }

    #[test]
    fn invalid_domains_rejected() {
        assert!(DomainSet::interval(1.0, 0.0).is_err());
        assert!(DomainSet::boxed(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(DomainSet::ball(vec![0.0], -1.0, Exponent::Infinity).is_err());
    }

    #[test]
    fn projection_lands_inside() {
        let b = DomainSet::ball(vec![0.0, 0.0], 1.0, Exponent::Finite(2.0)).unwrap();
        let p = b.project(&[3.0, 4.0]);
        assert!(b.contains(&p));
        assert!((p[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn modulus_rejects_bad_epsilon_and_1d() {
        assert!(estimate_modulus(&l(2.0, 2), 0.0, 10, 1).is_err());
        assert!(estimate_modulus(&l(2.0, 2), 2.5, 10, 1).is_err());
        assert!(estimate_modulus(&l(3.0, 1), 1.0, 10, 1).is_err());
    }

    #[test]
    fn modulus_near_zero_epsilon() {
        let est = estimate_modulus(&l(2.0, 2), 1e-9, 1000, 3).unwrap();
        assert!(est.delta_hat <= 1e-6, "{}", est.delta_hat);
    }

    #[test]
    fn modulus_l1_is_zero_and_flagged() {
        let est = estimate_modulus(&l(1.0, 2), 1.0, 2000, 5).unwrap();
        assert!(est.delta_hat.abs() <= 1e-9);
        assert!(!est.uniformly_convex);
        assert!(!est.warnings.is_empty());
    }

    #[test]
    fn modulus_is_seed_deterministic() {
        let a = estimate_modulus(&l(3.0, 3), 0.5, 500, 9).unwrap();
        let b = estimate_modulus(&l(3.0, 3), 0.5, 500, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tail_check_identical_sequences_pass() {
        let e1 = vec![vec![1.0, 0.0]; 20];
        let r = check_kirk_property(&l(2.0, 2), &e1, &e1, 1e-6, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.max_tail_distance, 0.0);
    }

    #[test]
    fn tail_check_opposite_sequences_not_applicable() {
        let xs = vec![vec![1.0, 0.0]; 20];
        let ys = vec![vec![-1.0, 0.0]; 20];
        let r = check_kirk_property(&l(2.0, 2), &xs, &ys, 1e-6, 10).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn tail_check_rotating_sequence_passes() {
        let n_max = 1000;
        let xs: Vec<Vec<f64>> = (1..=n_max).map(|_| vec![1.0, 0.0]).collect();
        let ys: Vec<Vec<f64>> = (1..=n_max)
            .map(|n| {
                let a = 1.0 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let r = check_kirk_property(&l(2.0, 2), &xs, &ys, 1e-6, 100).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.message);
    }

    #[test]
    fn tail_distance_bound_holds_for_loose_tolerance() {
        // hypotheses hold for a loose tol; the distance stays under the bound
        let xs = vec![vec![1.0, 0.0]];
        let ys = vec![vec![0.8, 0.6]];
        let tol = 0.2;
        let r = check_kirk_property(&l(2.0, 2), &xs, &ys, tol, 1).unwrap();
        // ‖x+y‖ = sqrt(3.24+0.36) ≈ 1.897 is within 0.2 of 2
        let bound = kirk_distance_bound(Exponent::Finite(2.0), tol).unwrap();
        assert!(r.max_tail_distance < bound);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(kirk_distance_bound(Exponent::Finite(1.0), tol).is_none());
    }
}
