//! Exact rational arithmetic helpers and certified logarithm enclosures.
//!
//! Every density, defect and average in this crate is a `Rat` (arbitrary
//! precision rational). Logarithms never go through bare floating point:
//! `ln_enclosure` returns a rational interval that provably contains ln(x),
//! tightened until the requested width is reached.

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact rational number, serialized as the string "p/q".
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    /// 2^(-k), the metric weight scale.
    pub fn pow2_neg(k: u32) -> Rat {
        Rat(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    pub fn from_bigint(n: BigInt) -> Rat {
        Rat(BigRational::from_integer(n))
    }

    pub fn ratio_big(num: BigInt, den: BigInt) -> Rat {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn min(self, other: Rat) -> Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Nearest f64; fine for display and heuristics, never for verdicts.
    pub fn to_f64(&self) -> f64 {
        big_to_f64(self.0.numer()) / big_to_f64(self.0.denom())
    }

    /// Decimal string with `digits` fractional digits, round half away from zero.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = &self.0 * BigRational::from_integer(scale.clone());
        let num = scaled.numer();
        let den = scaled.denom();
        let (q, r) = (num / den, num % den);
        let mut q = q;
        let two_r = r.abs() * BigInt::from(2);
        if two_r >= den.abs() {
            if num.sign() == Sign::Minus {
                q -= BigInt::one();
            } else {
                q += BigInt::one();
            }
        }
        let neg = q.sign() == Sign::Minus;
        let q = q.abs();
        let int_part = &q / &scale;
        let frac_part = &q % &scale;
        let mut frac = frac_part.to_string();
        while (frac.len() as u32) < digits {
            frac.insert(0, '0');
        }
        if digits == 0 {
            format!("{}{}", if neg { "-" } else { "" }, int_part)
        } else {
            format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac)
        }
    }
}

fn big_to_f64(n: &BigInt) -> f64 {
    // Keep the top 64 bits and scale back; avoids overflow for huge integers.
    let bits = n.bits();
    if bits <= 63 {
        return n.to_string().parse::<f64>().unwrap_or(0.0);
    }
    let shift = bits - 63;
    let top: BigInt = n >> shift;
    let top_f = top.to_string().parse::<f64>().unwrap_or(0.0);
    top_f * 2f64.powi(shift as i32)
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n = BigInt::from_str(num).map_err(|e| format!("bad numerator {num:?}: {e}"))?;
        let d = BigInt::from_str(den).map_err(|e| format!("bad denominator {den:?}: {e}"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Rat(BigRational::new(n, d)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rat::from_str(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 = &self.0 + &rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

/// A closed rational interval [lo, hi].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Interval {
        assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(v: Rat) -> Interval {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rat) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) * Rat::new(1, 2)
    }

    /// Separation distance between two intervals; 0 when they overlap.
    pub fn gap(&self, other: &Interval) -> Rat {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo <= hi {
            Rat::zero()
        } else {
            lo - hi
        }
    }
}

/// Floor to a dyadic with denominator 2^bits (directed rounding down).
fn dyadic_floor(x: &BigRational, bits: u32) -> BigRational {
    let scaled = x * BigRational::from_integer(BigInt::one() << bits);
    BigRational::new(scaled.floor().to_integer(), BigInt::one() << bits)
}

fn dyadic_ceil(x: &BigRational, bits: u32) -> BigRational {
    let scaled = x * BigRational::from_integer(BigInt::one() << bits);
    BigRational::new(scaled.ceil().to_integer(), BigInt::one() << bits)
}

/// Rational enclosure of atanh(t) for 0 <= t < 1/2, width <= 2^-bits.
///
/// atanh(t) = sum t^(2j+1)/(2j+1); the tail after J terms is bounded by
/// t^(2J+1)/((2J+1)(1-t^2)) which we add to the upper end.
fn atanh_enclosure(t: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!t.is_negative() && t < &BigRational::new(BigInt::one(), BigInt::from(2)));
    let t_lo = dyadic_floor(t, bits + 8);
    let t_hi = dyadic_ceil(t, bits + 8);
    let tol = BigRational::new(BigInt::one(), BigInt::one() << (bits + 2));
    let sum_with_tail = |t: &BigRational, round_up: bool| -> BigRational {
        let t2 = t * t;
        let mut term = t.clone(); // t^(2j+1)
        let mut sum = BigRational::zero();
        let mut j = 0u32;
        loop {
            let contrib = &term / BigRational::from_integer(BigInt::from(2 * j + 1));
            sum += &contrib;
            term *= &t2;
            j += 1;
            // Geometric tail bound: term/((2j+1)(1-t^2)) with t < 1/2 so 1-t^2 > 3/4.
            let tail = &term
                / (BigRational::from_integer(BigInt::from(2 * j + 1))
                    * (BigRational::one() - &t2));
            if tail < tol {
                if round_up {
                    sum += tail;
                }
                break;
            }
            // Keep intermediate denominators bounded.
            sum = if round_up {
                dyadic_ceil(&sum, bits + 16)
            } else {
                dyadic_floor(&sum, bits + 16)
            };
        }
        sum
    };
    let lo = sum_with_tail(&t_lo, false);
    let hi = sum_with_tail(&t_hi, true);
    (lo, hi)
}

/// Enclosure of ln(2) to width <= 2^-bits.
fn ln2_enclosure(bits: u32) -> (BigRational, BigRational) {
    // ln 2 = 2 atanh(1/3)
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let (lo, hi) = atanh_enclosure(&third, bits + 1);
    (lo * BigRational::from_integer(BigInt::from(2)), hi * BigRational::from_integer(BigInt::from(2)))
}

/// Certified rational enclosure of ln(x) for x > 0 with width <= 2^-bits.
pub fn ln_enclosure(x: &Rat, bits: u32) -> Interval {
    let v = &x.0;
    assert!(v.is_positive(), "ln of non-positive value");
    if v.is_one() {
        return Interval::point(Rat::zero());
    }
    // Normalize x = m * 2^e with m in [1, 2).
    let num_bits = v.numer().bits() as i64;
    let den_bits = v.denom().bits() as i64;
    let mut e = num_bits - den_bits;
    let two = BigRational::from_integer(BigInt::from(2));
    let pow2 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(BigInt::one() << (k as u64))
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << ((-k) as u64))
        }
    };
    let mut m = v / pow2(e);
    while m >= two {
        m /= &two;
        e += 1;
    }
    while m < BigRational::one() {
        m *= &two;
        e -= 1;
    }
    // ln m = 2 atanh((m-1)/(m+1)), argument in [0, 1/3].
    let t = (&m - BigRational::one()) / (&m + BigRational::one());
    let margin = bits + 4;
    let (alo, ahi) = atanh_enclosure(&t, margin);
    let (l2lo, l2hi) = ln2_enclosure(margin + (64 - (e.unsigned_abs().leading_zeros())));
    let two_r = BigRational::from_integer(BigInt::from(2));
    let e_r = BigRational::from_integer(BigInt::from(e));
    let (elo, ehi) = if e >= 0 {
        (&e_r * &l2lo, &e_r * &l2hi)
    } else {
        (&e_r * &l2hi, &e_r * &l2lo)
    };
    let lo = &two_r * &alo + elo;
    let hi = &two_r * &ahi + ehi;
    Interval::new(Rat(dyadic_floor(&lo, bits + 2)), Rat(dyadic_ceil(&hi, bits + 2)))
}

/// ln(n)/d as a midpoint decimal string, certified to `digits` decimals.
pub fn ln_ratio_decimal(n: &Rat, d: u64, digits: u32) -> String {
    // Need width below 10^-digits; 4 bits per decimal digit is enough.
    let enc = ln_enclosure(n, 4 * digits + 8);
    let val = enc.midpoint() * Rat::ratio_big(BigInt::one(), BigInt::from(d));
    val.to_decimal(digits)
}
