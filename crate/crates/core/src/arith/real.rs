use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use alloc::format;
use astro_float::{BigFloat, Consts, RoundingMode, Sign};

use crate::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Multi-precision real number with a declared mantissa width.
///
/// Field operations round to the wider of the two operand precisions.
/// Transcendental functions need the constants cache held by [`Ctx`].
#[derive(Clone)]
pub struct Real(BigFloat);

/// `x * 2^e` without going through `powi` (unavailable in `core`).
fn ldexp(mut x: f64, mut e: i64) -> f64 {
    const STEP: i64 = 1000;
    while e > STEP {
        x *= f64::from_bits(((1023 + STEP) as u64) << 52);
        e -= STEP;
    }
    while e < -STEP {
        x *= f64::from_bits(((1023 - STEP) as u64) << 52);
        e += STEP;
    }
    x * f64::from_bits(((1023 + e) as u64) << 52)
}

impl Real {
    pub fn from_u64(v: u64, precision_bits: usize) -> Self {
        Real(BigFloat::from_u64(v, precision_bits))
    }

    pub fn from_f64(v: f64, precision_bits: usize) -> Self {
        Real(BigFloat::from_f64(v, precision_bits))
    }

    pub fn zero(precision_bits: usize) -> Self {
        Real::from_u64(0, precision_bits)
    }

    pub fn one(precision_bits: usize) -> Self {
        Real::from_u64(1, precision_bits)
    }

    /// Mantissa width in bits (a multiple of the machine word).
    pub fn precision(&self) -> usize {
        self.0.mantissa_max_bit_len().unwrap_or(0)
    }

    pub fn is_nan(&self) -> bool {
        self.0.is_nan()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.0.is_zero() && self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    /// Binary exponent `e` with `|x| = 0.1xxx₂ · 2^e`.
    pub fn exponent(&self) -> Option<i32> {
        if self.0.is_zero() {
            return None;
        }
        self.0.exponent()
    }

    /// Nearest-below `f64` (truncated mantissa); exact for `f64`-representable values.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _, sign, exp, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let Some(&top) = words.last() else {
            return 0.0;
        };
        if top == 0 {
            return 0.0;
        }
        // top word carries the leading bit; value = top/2^64 * 2^exp
        let frac = (top >> 11) as f64;
        let mag = ldexp(frac, i64::from(exp) - 53);
        match sign {
            Sign::Neg => -mag,
            Sign::Pos => mag,
        }
    }

    /// Natural log as an `f64`, valid far outside the `f64` range of `x` itself.
    /// Reporting only; decisions never go through this.
    pub fn ln_f64(&self) -> f64 {
        if !self.is_positive() {
            return f64::NAN;
        }
        let Some((words, _, _, exp, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let top = words.last().copied().unwrap_or(0);
        let m = (top >> 11) as f64 / (1u64 << 53) as f64;
        libm::log(m) + f64::from(exp) * core::f64::consts::LN_2
    }

    /// `2^(1-p)·|x|`-sized unit in the last place at this precision.
    pub fn ulp(&self) -> Real {
        let p = self.precision();
        let e = self.exponent().unwrap_or(0);
        let mut u = BigFloat::from_u64(1, p);
        u.set_exponent(e - p as i32 + 1);
        Real(u)
    }

    pub fn min<'a>(&'a self, other: &'a Real) -> &'a Real {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max<'a>(&'a self, other: &'a Real) -> &'a Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn total_cmp(&self, other: &Real) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    pub fn mul_u64(&self, k: u64) -> Real {
        let p = self.precision();
        Real(self.0.mul(&BigFloat::from_u64(k, p), p, RM))
    }

    pub fn div_u64(&self, k: u64) -> Real {
        let p = self.precision();
        Real(self.0.div(&BigFloat::from_u64(k, p), p, RM))
    }

    /// Arithmetic mean of two values.
    pub fn midpoint(&self, other: &Real) -> Real {
        (self + other).div_u64(2)
    }

    pub fn with_precision(&self, precision_bits: usize) -> Real {
        let mut v = self.0.clone();
        // set_precision only fails on invalid widths, which callers never pass
        let _ = v.set_precision(precision_bits, RM);
        Real(v)
    }
}

fn prec2(a: &Real, b: &Real) -> usize {
    a.precision().max(b.precision())
}

macro_rules! binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl<'a> $trait<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                Real(self.0.$call(&rhs.0, prec2(self, rhs), RM))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e}, {} bits)", self.to_f64(), self.precision())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

/// Precision plus the constants cache that `ln`/`exp` need.
///
/// A `Ctx` is cheap to build; parallel callers create one per task.
pub struct Ctx {
    precision_bits: usize,
    consts: Consts,
}

impl Ctx {
    pub fn new(precision_bits: usize) -> Result<Self> {
        if precision_bits < 64 {
            return Err(Error::domain(format!(
                "precision {precision_bits} bits is below the 64-bit minimum"
            )));
        }
        let consts = Consts::new().map_err(|e| Error::Numeric(format!("{e:?}")))?;
        Ok(Ctx { precision_bits, consts })
    }

    pub fn precision(&self) -> usize {
        self.precision_bits
    }

    pub fn from_u64(&self, v: u64) -> Real {
        Real::from_u64(v, self.precision_bits)
    }

    pub fn from_f64(&self, v: f64) -> Real {
        Real::from_f64(v, self.precision_bits)
    }

    /// Exact when the integer has at most `precision` significant bits.
    pub fn from_big(&self, v: &crate::BigNat) -> Real {
        let p = self.precision_bits;
        let base = BigFloat::from_u64(u64::MAX, p).add(&BigFloat::from_u64(1, p), p, RM);
        let mut acc = BigFloat::from_u64(0, p);
        for d in v.to_u64_digits().iter().rev() {
            acc = acc.mul(&base, p, RM).add(&BigFloat::from_u64(*d, p), p, RM);
        }
        Real(acc)
    }

    pub fn ln(&mut self, x: &Real) -> Real {
        Real(x.0.ln(self.precision_bits, RM, &mut self.consts))
    }

    pub fn exp(&mut self, x: &Real) -> Real {
        Real(x.0.exp(self.precision_bits, RM, &mut self.consts))
    }

    pub fn ln_u64(&mut self, v: u64) -> Real {
        let x = self.from_u64(v);
        self.ln(&x)
    }

    /// `x^y = exp(y·ln x)` for `x > 0`.
    pub fn powf(&mut self, x: &Real, y: &Real) -> Real {
        let l = self.ln(x);
        self.exp(&(&l * y))
    }

    pub fn sqrt(&self, x: &Real) -> Real {
        Real(x.0.sqrt(self.precision_bits, RM))
    }
}

/// `(1 + √5) / 2` at `precision_bits` (at least 96).
pub fn golden_ratio(precision_bits: usize) -> Result<Real> {
    if precision_bits < 96 {
        return Err(Error::domain("golden ratio needs at least 96 bits"));
    }
    let five = BigFloat::from_u64(5, precision_bits);
    let root = five.sqrt(precision_bits, RM);
    let one = BigFloat::from_u64(1, precision_bits);
    let two = BigFloat::from_u64(2, precision_bits);
    Ok(Real(root.add(&one, precision_bits, RM).div(&two, precision_bits, RM)))
}
