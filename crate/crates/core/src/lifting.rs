//! Scalar lifting of a real variable onto a knot sequence.
//!
//! For knots `t_1 < ... < t_L` and `x` in `[t_l, t_{l+1}]` the lifting is
//! `(1 - lambda) e_l + lambda e_{l+1}` with `lambda = (x - t_l) / (t_{l+1} - t_l)`;
//! its inverse is the affine map `z -> sum_l z_l t_l`. The scaled variant
//! multiplies every coordinate by its knot so that the inverse becomes a plain
//! component sum, and it extends linearly beyond the outer knots.
//!
//! Intervals are left-closed: an interior knot `t_l` belongs to `[t_l, t_{l+1})`.
//! Both choices produce the same lifted vector; the convention only fixes which
//! one-sided derivative [`lift_jacobian`] reports at a knot.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Relative tolerance for domain membership.
pub const DOMAIN_RTOL: f64 = 1e-12;

/// Strictly increasing knots `t_1 < ... < t_L` with `L >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSequence {
    knots: Arc<[f64]>,
}

impl KnotSequence {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidKnots(format!("need at least 2 knots, got {}", knots.len())));
        }
        if let Some(bad) = knots.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidKnots(format!("non-finite knot {bad}")));
        }
        if let Some(w) = knots.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidKnots(format!(
                "knots must be strictly increasing, but t[{}]={} >= t[{}]={}",
                w,
                knots[w],
                w + 1,
                knots[w + 1]
            )));
        }
        Ok(Self { knots: knots.into() })
    }

    /// `count` equally spaced knots on `[lower, upper]`, endpoints included.
    pub fn uniform(lower: f64, upper: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidKnots(format!("need at least 2 knots, got {count}")));
        }
        let step = (upper - lower) / (count - 1) as f64;
        let knots = (0..count)
            .map(|i| if i + 1 == count { upper } else { lower + step * i as f64 })
            .collect();
        Self::new(knots)
    }

    /// `count` equally spaced knots on `[-bound, bound]`. An odd count places
    /// an exact zero in the middle.
    pub fn symmetric(bound: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidKnots(format!("need at least 2 knots, got {count}")));
        }
        let half = (count - 1) as f64 / 2.0;
        let knots = (0..count)
            .map(|i| {
                let offset = i as f64 - half;
                if offset == 0.0 {
                    0.0
                } else {
                    bound * offset / half
                }
            })
            .collect();
        Self::new(knots)
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.knots
    }

    pub fn first(&self) -> f64 {
        self.knots[0]
    }

    pub fn last(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    /// Index of the exactly-zero knot, if any.
    pub fn zero_index(&self) -> Option<usize> {
        self.knots.iter().position(|&t| t == 0.0)
    }

    pub fn tolerance(&self) -> f64 {
        DOMAIN_RTOL * self.first().abs().max(self.last().abs()).max(1.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = self.tolerance();
        x >= self.first() - tol && x <= self.last() + tol
    }

    /// Left-closed interval index `l` in `0..L-1` with `x` in `[t_l, t_{l+1})`;
    /// values beyond the outer knots map to the boundary intervals.
    pub fn interval(&self, x: f64) -> usize {
        let upper = self.knots.partition_point(|&t| t <= x);
        upper.saturating_sub(1).min(self.knots.len() - 2)
    }

    /// Brings `x` into `[t_1, t_L]` according to `policy`.
    pub fn admit(&self, x: f64, policy: OutOfRange) -> Result<f64> {
        if x.is_nan() {
            return Err(self.domain_error(x));
        }
        if self.contains(x) || policy == OutOfRange::Clamp {
            Ok(x.clamp(self.first(), self.last()))
        } else {
            Err(self.domain_error(x))
        }
    }

    fn domain_error(&self, x: f64) -> Error {
        Error::Domain { value: x, lower: self.first(), upper: self.last() }
    }

    /// Interval and the interpolation weights `(w_l, w_{l+1})` of `x`.
    /// Outside the knot range the weights extrapolate linearly.
    pub(crate) fn weights(&self, x: f64) -> (usize, f64, f64) {
        let l = self.interval(x);
        let (lo, hi) = (self.knots[l], self.knots[l + 1]);
        let width = hi - lo;
        (l, (hi - x) / width, (x - lo) / width)
    }
}

/// What to do with inputs outside `[t_1, t_L]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutOfRange {
    #[default]
    Error,
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftMode {
    /// Convex-combination coefficients, image of the lifting.
    Standard,
    /// Coefficients carry their knot values; inverse is the component sum.
    Scaled,
    /// Arbitrary point of the unit simplex.
    Relaxed,
}

/// A length-`L` lifted coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedVector {
    coeffs: Vec<f64>,
    mode: LiftMode,
}

impl LiftedVector {
    pub fn new(coeffs: Vec<f64>, mode: LiftMode) -> Self {
        Self { coeffs, mode }
    }

    /// A relaxed vector; fails unless the entries lie in the unit simplex.
    pub fn relaxed(coeffs: Vec<f64>) -> Result<Self> {
        if !in_unit_simplex(&coeffs, 1e-12) {
            return Err(Error::Shape("relaxed lifted vector must lie in the unit simplex".into()));
        }
        Ok(Self { coeffs, mode: LiftMode::Relaxed })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn mode(&self) -> LiftMode {
        self.mode
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
}

/// Lifts `x` onto `knots`. Fails with [`Error::Domain`] outside the knot range.
pub fn lift(x: f64, knots: &KnotSequence) -> Result<LiftedVector> {
    lift_with(x, knots, OutOfRange::Error)
}

pub fn lift_with(x: f64, knots: &KnotSequence, policy: OutOfRange) -> Result<LiftedVector> {
    let x = knots.admit(x, policy)?;
    let mut coeffs = vec![0.0; knots.len()];
    let (l, lower, upper) = knots.weights(x);
    coeffs[l] = lower;
    coeffs[l + 1] = upper;
    Ok(LiftedVector::new(coeffs, LiftMode::Standard))
}

/// `sum_l z_l t_l` for standard or relaxed vectors, the component sum for scaled ones.
pub fn inverse_lift(z: &LiftedVector, knots: &KnotSequence) -> Result<f64> {
    if z.len() != knots.len() {
        return Err(Error::Dimension { expected: knots.len(), found: z.len() });
    }
    Ok(match z.mode {
        LiftMode::Scaled => z.coeffs.iter().sum(),
        LiftMode::Standard | LiftMode::Relaxed => inverse_lift_coeffs(&z.coeffs, knots.as_slice()),
    })
}

pub(crate) fn inverse_lift_coeffs(z: &[f64], knots: &[f64]) -> f64 {
    z.iter().zip(knots).map(|(a, t)| a * t).sum()
}

/// Scaled lifting `(1 - lambda) t_l e_l + lambda t_{l+1} e_{l+1}`.
///
/// With `extend` set, inputs beyond the outer knots extrapolate the boundary
/// intervals linearly, so the component sum equals `x` on the whole real line.
pub fn scaled_lift(x: f64, knots: &KnotSequence, extend: bool) -> Result<LiftedVector> {
    let x = if extend {
        if x.is_nan() {
            return Err(knots.domain_error(x));
        }
        x
    } else {
        knots.admit(x, OutOfRange::Error)?
    };
    let mut coeffs = vec![0.0; knots.len()];
    let t = knots.as_slice();
    let (l, lower, upper) = knots.weights(x);
    coeffs[l] = lower * t[l];
    coeffs[l + 1] = upper * t[l + 1];
    Ok(LiftedVector::new(coeffs, LiftMode::Scaled))
}

/// The two complementary rectified channels `(max(x, 0), min(x, 0))`.
pub fn reduced_lift(x: f64) -> (f64, f64) {
    (x.max(0.0), x.min(0.0))
}

/// Derivative of the standard or scaled lifting with respect to `x`.
///
/// At a knot the right-adjacent interval's slope is reported. The scaled
/// Jacobian accepts any real `x` (linear extension); the standard one fails
/// outside the knot range.
pub fn lift_jacobian(x: f64, knots: &KnotSequence, mode: LiftMode) -> Result<Vec<f64>> {
    let t = knots.as_slice();
    let x = match mode {
        LiftMode::Scaled => x,
        LiftMode::Standard | LiftMode::Relaxed => knots.admit(x, OutOfRange::Error)?,
    };
    let l = knots.interval(x);
    let width = t[l + 1] - t[l];
    let mut jac = vec![0.0; t.len()];
    match mode {
        LiftMode::Scaled => {
            jac[l] = -t[l] / width;
            jac[l + 1] = t[l + 1] / width;
        }
        LiftMode::Standard | LiftMode::Relaxed => {
            jac[l] = -1.0 / width;
            jac[l + 1] = 1.0 / width;
        }
    }
    Ok(jac)
}

/// Range predicate of the standard lifting: entries in `[0, 1]`, support on
/// one adjacent pair, and that pair summing to one (up to `4 eps`).
pub fn satisfies_range_predicate(z: &[f64]) -> bool {
    if z.len() < 2 || z.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return false;
    }
    let support: Vec<usize> = (0..z.len()).filter(|&i| z[i] != 0.0).collect();
    let pair = match support.as_slice() {
        [i] => {
            if *i + 1 < z.len() {
                *i
            } else {
                *i - 1
            }
        }
        [i, j] if *j == *i + 1 => *i,
        _ => return false,
    };
    (z[pair] + z[pair + 1] - 1.0).abs() <= 4.0 * f64::EPSILON
}

/// Nonnegative entries summing to one within `tol`.
pub fn in_unit_simplex(z: &[f64], tol: f64) -> bool {
    z.iter().all(|&v| v >= 0.0) && (z.iter().sum::<f64>() - 1.0).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knots(v: &[f64]) -> KnotSequence {
        KnotSequence::new(v.to_vec()).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn knot_validation() {
        assert!(KnotSequence::new(vec![1.0]).is_err());
        assert!(KnotSequence::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(KnotSequence::new(vec![0.0, f64::NAN]).is_err());
        let s = KnotSequence::symmetric(2.0, 5).unwrap();
        assert_eq!(s.as_slice(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let u = KnotSequence::uniform(0.0, std::f64::consts::TAU, 20).unwrap();
        assert_eq!(u.last(), std::f64::consts::TAU);
    }

    #[test]
    fn lift_at_knots_is_unit_vector() {
        let k = knots(&[-1.0, 0.5, 2.0, 3.0]);
        for (i, &t) in k.as_slice().iter().enumerate() {
            let z = lift(t, &k).unwrap();
            let mut e = vec![0.0; 4];
            e[i] = 1.0;
            assert_eq!(z.coeffs(), e.as_slice());
        }
    }

    #[test]
    fn lift_examples() {
        let k = knots(&[0.0, 1.0, 2.0]);
        assert_eq!(lift(0.5, &k).unwrap().coeffs(), &[0.5, 0.5, 0.0]);
        assert_eq!(lift(1.0, &k).unwrap().coeffs(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn lift_out_of_domain() {
        let k = knots(&[0.0, 1.0, 2.0]);
        assert!(matches!(lift(2.5, &k), Err(Error::Domain { .. })));
        assert!(matches!(lift(f64::NAN, &k), Err(Error::Domain { .. })));
        // within relative tolerance
        assert_eq!(lift(2.0 + 1e-13, &k).unwrap().coeffs(), &[0.0, 0.0, 1.0]);
        let clamped = lift_with(-3.0, &k, OutOfRange::Clamp).unwrap();
        assert_eq!(clamped.coeffs(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn inverse_examples() {
        let k = knots(&[0.0, 1.0, 2.0]);
        let unit = LiftedVector::new(vec![0.0, 1.0, 0.0], LiftMode::Standard);
        assert_eq!(inverse_lift(&unit, &k).unwrap(), 1.0);
        let z = lift(0.3, &k).unwrap();
        assert!((inverse_lift(&z, &k).unwrap() - 0.3).abs() < 1e-15);
        let relaxed = LiftedVector::relaxed(vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(inverse_lift(&relaxed, &k).unwrap(), 1.25);
        let short = LiftedVector::new(vec![1.0, 0.0], LiftMode::Standard);
        assert_eq!(inverse_lift(&short, &k), Err(Error::Dimension { expected: 3, found: 2 }));
    }

    #[test]
    fn scaled_examples() {
        let sym = knots(&[-1.0, 0.0, 1.0]);
        assert_eq!(scaled_lift(-0.5, &sym, false).unwrap().coeffs(), &[-0.5, 0.0, 0.0]);
        assert_eq!(scaled_lift(0.5, &sym, false).unwrap().coeffs(), &[0.0, 0.0, 0.5]);
        let k = knots(&[0.0, 1.0, 2.0]);
        assert_eq!(scaled_lift(1.5, &k, false).unwrap().coeffs(), &[0.0, 0.5, 1.0]);
        assert!(scaled_lift(3.0, &k, false).is_err());
        let ext = scaled_lift(3.0, &k, true).unwrap();
        assert!((ext.coeffs().iter().sum::<f64>() - 3.0).abs() < 1e-12);
        assert_eq!(inverse_lift(&ext, &k).unwrap(), ext.coeffs().iter().sum::<f64>());
    }

    #[test]
    fn reduced_examples() {
        assert_eq!(reduced_lift(3.0), (3.0, 0.0));
        assert_eq!(reduced_lift(-2.0), (0.0, -2.0));
        assert_eq!(reduced_lift(0.0), (0.0, 0.0));
    }

    #[test]
    fn jacobian_examples() {
        let k = knots(&[0.0, 1.0, 2.0]);
        assert_close(&lift_jacobian(0.5, &k, LiftMode::Standard).unwrap(), &[-1.0, 1.0, 0.0], 0.0);
        assert_close(&lift_jacobian(1.0, &k, LiftMode::Standard).unwrap(), &[0.0, -1.0, 1.0], 0.0);
        let k2 = knots(&[0.0, 2.0, 4.0]);
        assert_close(&lift_jacobian(1.0, &k2, LiftMode::Standard).unwrap(), &[-0.5, 0.5, 0.0], 0.0);
        assert!(lift_jacobian(5.0, &k, LiftMode::Standard).is_err());
        assert_close(&lift_jacobian(5.0, &k, LiftMode::Scaled).unwrap(), &[0.0, -1.0, 2.0], 0.0);
    }

    // Frozen against central differences with h = 1e-6 on the lifting itself.
    #[test]
    fn jacobian_matches_central_differences() {
        let k = knots(&[-1.0, -0.2, 0.7, 1.5, 3.0]);
        let h = 1e-6;
        for i in 0..200 {
            let x = -0.99 + 3.98 * i as f64 / 199.0;
            if k.as_slice().iter().any(|t| (t - x).abs() < 1e-3) {
                continue;
            }
            for mode in [LiftMode::Standard, LiftMode::Scaled] {
                let eval = |v: f64| match mode {
                    LiftMode::Scaled => scaled_lift(v, &k, true).unwrap().into_coeffs(),
                    _ => lift(v, &k).unwrap().into_coeffs(),
                };
                let (plus, minus) = (eval(x + h), eval(x - h));
                let jac = lift_jacobian(x, &k, mode).unwrap();
                for j in 0..k.len() {
                    let fd = (plus[j] - minus[j]) / (2.0 * h);
                    let rel = (fd - jac[j]).abs() / jac[j].abs().max(1.0);
                    assert!(rel <= 1e-6, "x={x} j={j} fd={fd} jac={}", jac[j]);
                }
            }
        }
    }

    #[test]
    fn range_predicate() {
        assert!(satisfies_range_predicate(&[0.0, 0.3, 0.7, 0.0]));
        assert!(satisfies_range_predicate(&[0.0, 0.0, 1.0]));
        assert!(!satisfies_range_predicate(&[0.3, 0.0, 0.7]));
        assert!(!satisfies_range_predicate(&[0.2, 0.2, 0.6]));
        assert!(!satisfies_range_predicate(&[0.5, 0.4, 0.0]));
        assert!(!satisfies_range_predicate(&[-0.1, 1.1, 0.0]));
    }
}
