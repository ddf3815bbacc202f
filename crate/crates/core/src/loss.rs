//! Per-sample losses `L_y(u)` of a prediction `u` against a target `y`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Squared,
    Absolute,
    TruncatedLinear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    kind: LossKind,
    truncation: f64,
}

impl LossSpec {
    pub fn squared() -> Self {
        Self { kind: LossKind::Squared, truncation: f64::INFINITY }
    }

    pub fn absolute() -> Self {
        Self { kind: LossKind::Absolute, truncation: f64::INFINITY }
    }

    /// `min(|u - y|, tau)`; requires `tau > 0`.
    pub fn truncated_linear(tau: f64) -> Result<Self> {
        if tau.is_nan() || tau <= 0.0 {
            return Err(Error::Config(format!("truncation must be positive, got {tau}")));
        }
        Ok(Self { kind: LossKind::TruncatedLinear, truncation: tau })
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn value(&self, prediction: f64, target: f64) -> f64 {
        let r = prediction - target;
        match self.kind {
            LossKind::Squared => r * r,
            LossKind::Absolute => r.abs(),
            LossKind::TruncatedLinear => r.abs().min(self.truncation),
        }
    }

    /// Derivative with respect to the prediction; `0` at the kinks.
    pub fn derivative(&self, prediction: f64, target: f64) -> f64 {
        let r = prediction - target;
        match self.kind {
            LossKind::Squared => 2.0 * r,
            LossKind::Absolute => sign(r),
            LossKind::TruncatedLinear if r.abs() < self.truncation => sign(r),
            LossKind::TruncatedLinear => 0.0,
        }
    }
}

fn sign(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_and_derivatives() {
        let sq = LossSpec::squared();
        assert_eq!(sq.value(3.0, 1.0), 4.0);
        assert_eq!(sq.derivative(3.0, 1.0), 4.0);
        let abs = LossSpec::absolute();
        assert_eq!(abs.value(-1.0, 1.0), 2.0);
        assert_eq!(abs.derivative(-1.0, 1.0), -1.0);
        assert_eq!(abs.derivative(1.0, 1.0), 0.0);
        let tl = LossSpec::truncated_linear(0.3).unwrap();
        assert_eq!(tl.value(0.1, 0.0), 0.1);
        assert_eq!(tl.value(5.0, 0.0), 0.3);
        assert_eq!(tl.derivative(0.1, 0.0), 1.0);
        assert_eq!(tl.derivative(5.0, 0.0), 0.0);
        assert!(LossSpec::truncated_linear(0.0).is_err());
        assert!(LossSpec::truncated_linear(f64::NAN).is_err());
    }
}
