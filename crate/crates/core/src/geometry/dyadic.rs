use std::cmp::Ordering;
use std::fmt;

/// An exact dyadic rational `num / 2^exp`, normalized so `num` is odd or zero.
///
/// Every finite `f64` is a dyadic rational, so conversions from scene input
/// are exact. Arithmetic panics on exponent spreads beyond what an `i128`
/// numerator can absorb (~90 bits), which is far outside the desk scale this
/// crate works at (unit box, grid scales of a few dozen levels).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    /// `num / 2^exp`, normalized.
    pub fn new(num: i128, exp: u32) -> Dyadic {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub fn from_int(n: i64) -> Dyadic {
        Dyadic {
            num: n as i128,
            exp: 0,
        }
    }

    /// Exact conversion; `None` for non-finite input.
    pub fn from_f64(x: f64) -> Option<Dyadic> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::ZERO);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & 0xf_ffff_ffff_ffff;
        let (mantissa, e) = if biased == 0 {
            (frac as i128, -1074i32) // subnormal
        } else {
            ((frac | (1 << 52)) as i128, biased - 1075)
        };
        let num = sign * mantissa;
        let d = if e >= 0 {
            assert!(e < 64, "f64 magnitude out of supported range");
            Dyadic::new(num << e, 0)
        } else {
            Dyadic::new(num, (-e) as u32)
        };
        Some(d)
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && self.num % 2 == 0 {
            self.num /= 2;
            self.exp -= 1;
        }
    }

    fn aligned(self, other: Dyadic) -> (i128, i128, u32) {
        let exp = self.exp.max(other.exp);
        let a = shl_checked(self.num, exp - self.exp);
        let b = shl_checked(other.num, exp - other.exp);
        (a, b, exp)
    }

    pub fn add(self, other: Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(other);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), exp)
    }

    pub fn sub(self, other: Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(other);
        Dyadic::new(a.checked_sub(b).expect("dyadic overflow"), exp)
    }

    pub fn mul_int(self, k: i64) -> Dyadic {
        Dyadic::new(
            self.num.checked_mul(k as i128).expect("dyadic overflow"),
            self.exp,
        )
    }

    pub fn half(self) -> Dyadic {
        Dyadic::new(self.num, self.exp + 1)
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Exact floor of `self * 2^scale`.
    pub fn floor_scaled(self, scale: u32) -> i128 {
        if scale >= self.exp {
            shl_checked(self.num, scale - self.exp)
        } else {
            // arithmetic shift right floors toward -inf
            self.num >> (self.exp - scale)
        }
    }

    /// Whether `self * 2^scale` is an integer.
    pub fn is_integer_scaled(self, scale: u32) -> bool {
        scale >= self.exp
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / 2f64.powi(self.exp as i32)
    }

    pub fn min(self, other: Dyadic) -> Dyadic {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Dyadic) -> Dyadic {
        if self >= other {
            self
        } else {
            other
        }
    }
}

fn shl_checked(v: i128, by: u32) -> i128 {
    assert!(
        by < 96,
        "dyadic exponent spread {by} is outside the supported range"
    );
    v.checked_shl(by).expect("dyadic overflow")
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip_is_exact() {
        for &x in &[0.0, 1.0, -0.375, 0.1, 1.0 / 3.0, 6.25e-2, -7.0] {
            let d = Dyadic::from_f64(x).unwrap();
            assert_eq!(d.to_f64(), x);
        }
        assert!(Dyadic::from_f64(f64::NAN).is_none());
        assert!(Dyadic::from_f64(f64::INFINITY).is_none());
    }

    #[test]
    fn ordering_and_arithmetic() {
        let a = Dyadic::new(3, 2); // 3/4
        let b = Dyadic::new(1, 1); // 1/2
        assert!(a > b);
        assert_eq!(a.sub(b), Dyadic::new(1, 2));
        assert_eq!(a.add(b), Dyadic::new(5, 2));
        assert_eq!(b.mul_int(3), Dyadic::new(3, 1));
        assert_eq!(a.half(), Dyadic::new(3, 3));
    }

    #[test]
    fn floor_scaled_matches_f64_floor() {
        let d = Dyadic::from_f64(-0.3).unwrap();
        assert_eq!(d.floor_scaled(4), (-0.3f64 * 16.0).floor() as i128);
        let e = Dyadic::from_f64(0.75).unwrap();
        assert_eq!(e.floor_scaled(2), 3);
        assert!(e.is_integer_scaled(2));
        assert!(!Dyadic::from_f64(0.3).unwrap().is_integer_scaled(10));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const LIM: i64 = 1 << 40;

        proptest! {
            #[test]
            fn arithmetic_is_exact(
                a in -LIM..LIM, ea in 0u32..40,
                b in -LIM..LIM, eb in 0u32..40,
            ) {
                let x = Dyadic::new(a as i128, ea);
                let y = Dyadic::new(b as i128, eb);
                prop_assert_eq!(x.add(y).sub(y), x);
                prop_assert_eq!(x.sub(y).add(y), x);
                prop_assert_eq!(x.add(y), y.add(x));
                prop_assert_eq!(x.half().mul_int(2), x);
            }

            #[test]
            fn floor_scaled_brackets_the_value(
                a in -LIM..LIM, ea in 0u32..40, scale in 0u32..20,
            ) {
                let x = Dyadic::new(a as i128, ea);
                let scaled = x.mul_int(1 << scale);
                let floor = Dyadic::new(x.floor_scaled(scale), 0);
                prop_assert!(floor <= scaled);
                prop_assert!(scaled < floor.add(Dyadic::ONE));
            }

            #[test]
            fn f64_round_trip_is_exact_for_any_finite(x in -1e12f64..1e12f64) {
                prop_assert_eq!(Dyadic::from_f64(x).unwrap().to_f64(), x);
            }
        }
    }
}
