use core::ops::{Add, Div, Mul};
#[allow(unused_imports)]
use num_traits::Float;

/// A real number stored as `sign · exp(log_magnitude)`.
///
/// `sign == 0` means the value is exactly zero and `log_magnitude` is then
/// meaningless (kept at `-inf`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaleValue {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl LogScaleValue {
    pub const ZERO: Self = Self {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };
    pub const ONE: Self = Self {
        log_magnitude: 0.0,
        sign: 1,
    };

    /// Positive value `exp(log_magnitude)`.
    pub fn from_log(log_magnitude: f64) -> Self {
        Self {
            log_magnitude,
            sign: 1,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self {
                log_magnitude: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    /// Converts back; underflows to `±0` and overflows to `±inf` like `exp`.
    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        Self {
            sign: self.sign.abs(),
            ..self
        }
    }

    pub fn powf(self, p: f64) -> Self {
        assert!(self.sign >= 0, "real power of a negative LogScaleValue");
        if self.sign == 0 {
            return Self::ZERO;
        }
        Self::from_log(self.log_magnitude * p)
    }
}

/// Sum with overflow-free log-sum-exp.
impl Add for LogScaleValue {
    type Output = Self;
    fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_magnitude >= other.log_magnitude {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = (small.log_magnitude - big.log_magnitude).exp();
        let factor = if big.sign == small.sign {
            1.0 + ratio
        } else {
            1.0 - ratio
        };
        if factor == 0.0 {
            return Self::ZERO;
        }
        Self {
            log_magnitude: big.log_magnitude + factor.ln(),
            sign: big.sign,
        }
    }
}

impl Mul for LogScaleValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self {
            log_magnitude: self.log_magnitude + rhs.log_magnitude,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for LogScaleValue {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division by a zero LogScaleValue");
        if self.sign == 0 {
            return Self::ZERO;
        }
        Self {
            log_magnitude: self.log_magnitude - rhs.log_magnitude,
            sign: self.sign * rhs.sign,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tiny_products_do_not_underflow() {
        let a = LogScaleValue::from_log(-500.0);
        let p = a * a * a;
        assert_eq!(p.to_f64(), 0.0);
        assert!((p.log_magnitude + 1500.0).abs() < 1e-12);
        assert_eq!((p / a / a).log_magnitude, -500.0);
    }

    #[test]
    fn zero_behaviour() {
        let z = LogScaleValue::from_f64(0.0);
        assert!(z.is_zero());
        assert!((z * LogScaleValue::from_f64(3.0)).is_zero());
        assert_eq!(z.add(LogScaleValue::from_f64(-2.0)).to_f64(), -2.0);
        let x = LogScaleValue::from_f64(1.5);
        assert!(x.add(LogScaleValue::from_f64(-1.5)).is_zero());
    }

    proptest! {
        #[test]
        fn multiplication_adds_logs(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            prop_assume!(a != 0.0 && b != 0.0);
            let p = LogScaleValue::from_f64(a) * LogScaleValue::from_f64(b);
            prop_assert_eq!(p.sign, if a * b > 0.0 { 1 } else { -1 });
            prop_assert!((p.to_f64() - a * b).abs() <= 1e-12 * (a * b).abs());
        }

        #[test]
        fn addition_matches_f64(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            let s = LogScaleValue::from_f64(a).add(LogScaleValue::from_f64(b)).to_f64();
            prop_assert!((s - (a + b)).abs() <= 1e-12 * (a.abs() + b.abs()).max(1e-300));
        }
    }
}
