//! Sign-and-log10 arithmetic for magnitudes far outside the `f64` range.
//!
//! The certified probability bounds in this crate are numbers like 10^(-4535);
//! `LogMagnitude` carries them as a sign together with log10 of the absolute
//! value, so products and quotients stay exact in the exponent and sums go
//! through log-sum-exp.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

const LN_10: f64 = std::f64::consts::LN_10;

/// A real number stored as `sign * 10^log10_abs`.
///
/// `sign` is -1, 0, or +1. When `sign == 0` the `log10_abs` field is
/// `f64::NEG_INFINITY` and carries no information.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LogMagnitude {
    pub sign: i8,
    pub log10_abs: f64,
}

impl LogMagnitude {
    pub const ZERO: LogMagnitude = LogMagnitude {
        sign: 0,
        log10_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogMagnitude = LogMagnitude {
        sign: 1,
        log10_abs: 0.0,
    };

    pub fn new(sign: i8, log10_abs: f64) -> Self {
        debug_assert!(sign == -1 || sign == 0 || sign == 1);
        if sign == 0 {
            Self::ZERO
        } else {
            LogMagnitude { sign, log10_abs }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogMagnitude {
                sign: if x > 0.0 { 1 } else { -1 },
                log10_abs: x.abs().log10(),
            }
        }
    }

    /// Converts back to a plain `f64`. Exact to rounding when
    /// `log10_abs` is within the representable window (roughly +-300);
    /// outside it the result saturates to 0 or +-inf.
    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * 10f64.powf(self.log10_abs)
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(self) -> bool {
        self.sign > 0
    }

    pub fn abs(self) -> Self {
        LogMagnitude::new(self.sign.abs(), self.log10_abs)
    }

    /// 10^log10_abs scaled by an ordinary positive factor.
    pub fn scaled(self, factor: f64) -> Self {
        self * LogMagnitude::from_f64(factor)
    }

    /// log10 of `1 - 10^(-d)` for `d > 0`, accurate for both tiny and large `d`.
    fn log10_one_minus_pow10(d: f64) -> f64 {
        // 1 - 10^(-d) = -expm1(-d ln 10)
        (-(-d * LN_10).exp_m1()).log10()
    }
}

impl Mul for LogMagnitude {
    type Output = LogMagnitude;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        LogMagnitude::new(self.sign * rhs.sign, self.log10_abs + rhs.log10_abs)
    }
}

impl Div for LogMagnitude {
    type Output = LogMagnitude;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division of LogMagnitude by zero");
        if self.sign == 0 {
            return Self::ZERO;
        }
        LogMagnitude::new(self.sign * rhs.sign, self.log10_abs - rhs.log10_abs)
    }
}

impl Neg for LogMagnitude {
    type Output = LogMagnitude;
    fn neg(self) -> Self {
        LogMagnitude::new(-self.sign, self.log10_abs)
    }
}

impl Add for LogMagnitude {
    type Output = LogMagnitude;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log10_abs >= rhs.log10_abs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = big.log10_abs - small.log10_abs;
        if big.sign == small.sign {
            let l = big.log10_abs + (1.0 + 10f64.powf(-d)).log10();
            LogMagnitude::new(big.sign, l)
        } else if d == 0.0 {
            Self::ZERO
        } else {
            let l = big.log10_abs + Self::log10_one_minus_pow10(d);
            LogMagnitude::new(big.sign, l)
        }
    }
}

impl Sub for LogMagnitude {
    type Output = LogMagnitude;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl PartialEq for LogMagnitude {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for LogMagnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            ord => return Some(ord),
        }
        match self.sign {
            0 => Some(Ordering::Equal),
            1 => self.log10_abs.partial_cmp(&other.log10_abs),
            _ => other.log10_abs.partial_cmp(&self.log10_abs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn roundtrip_in_representable_window() {
        // the log10 representation itself rounds: relative error up to
        // |log10| * eps * ln 10, about 1e-13 at the window edges
        for &x in &[1.0, -2.5, 1e-300, 3.7e299, -4.2e-17, 0.0] {
            let lm = LogMagnitude::from_f64(x);
            let back = lm.to_f64();
            assert!(
                (back - x).abs() <= 1e-12 * x.abs(),
                "roundtrip {x} -> {back}"
            );
        }
    }

    #[test]
    fn extreme_exponents_survive_products() {
        let a = LogMagnitude::new(1, -4535.0);
        let b = LogMagnitude::new(1, -1282.0);
        let p = a * b;
        assert_eq!(p.sign, 1);
        assert!((p.log10_abs + 5817.0).abs() < 1e-12);
    }

    #[test]
    fn subtraction_of_nearly_equal() {
        // 1 - (1 - 1e-12) computed in log domain
        let one = LogMagnitude::ONE;
        let near = LogMagnitude::from_f64(1.0 - 1e-12);
        let d = one - near;
        assert_eq!(d.sign, 1);
        assert!((d.to_f64() - 1e-12).abs() < 1e-16);
    }

    proptest! {
        #[test]
        fn mul_matches_f64(a in -1e10f64..1e10, b in -1e10f64..1e10) {
            let p = (LogMagnitude::from_f64(a) * LogMagnitude::from_f64(b)).to_f64();
            let q = a * b;
            prop_assert!((p - q).abs() <= 1e-12 * q.abs().max(1e-300));
        }

        #[test]
        fn add_matches_f64(a in -1e8f64..1e8, b in -1e8f64..1e8) {
            let s = (LogMagnitude::from_f64(a) + LogMagnitude::from_f64(b)).to_f64();
            let t = a + b;
            // additive cancellation is allowed to lose relative accuracy,
            // bound the error against the inputs' scale
            prop_assert!((s - t).abs() <= 1e-9 * (a.abs() + b.abs()).max(1e-300));
        }

        #[test]
        fn ordering_matches_f64(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let la = LogMagnitude::from_f64(a);
            let lb = LogMagnitude::from_f64(b);
            if a < b { prop_assert!(la < lb); }
            if a > b { prop_assert!(la > lb); }
        }
    }
}
