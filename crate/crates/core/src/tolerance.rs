use serde::{Deserialize, Serialize};

/// Relative/absolute tolerance pair shared by every inequality check.
///
/// An inequality `lhs <= rhs` is considered violated only when
/// `lhs > rhs * (1 + rel) + abs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub const DEFAULT_REL: f64 = 1e-9;
    pub const DEFAULT_ABS: f64 = 1e-12;

    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    /// True when `lhs <= rhs` is violated beyond tolerance.
    #[inline]
    pub fn exceeds(&self, lhs: f64, rhs: f64) -> bool {
        lhs > rhs * (1.0 + self.rel) + self.abs
    }

    #[inline]
    pub fn holds(&self, lhs: f64, rhs: f64) -> bool {
        !self.exceeds(lhs, rhs)
    }

    /// Absolute floor used for "is zero" decisions, e.g. fixed-point residuals.
    #[inline]
    pub fn floor(&self) -> f64 {
        self.abs
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(Self::DEFAULT_REL, Self::DEFAULT_ABS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_is_not_a_violation() {
        let tol = Tolerance::default();
        assert!(tol.holds(0.5, 0.5));
        // rounding noise around an equality case
        assert!(tol.holds(0.5 + 1e-16, 0.5));
        assert!(tol.exceeds(0.5 + 1e-6, 0.5));
    }

    #[test]
    fn floor_applies_near_zero() {
        let tol = Tolerance::default();
        assert!(tol.holds(5e-13, 0.0));
        assert!(tol.exceeds(2e-12, 0.0));
    }
}
