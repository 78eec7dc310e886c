//! Mahler measures `c_i = m(p^{h_i}/q^{h_{i-1}})` and measure functions
//! `f_x(t) = (Σ x_i c_i^t)^{1/t}`.

use core::cmp::Ordering;

use alloc::format;
use alloc::vec::Vec;

use crate::arith::{cmp_power, is_prime, BigNat, Ctx, FibTable, Real};
use crate::lattice::ExponentVector;
use crate::{Error, Result};

/// An ordered pair of distinct primes with their logarithms.
#[derive(Debug, Clone)]
pub struct PrimePair {
    p: u64,
    q: u64,
    log_p: Real,
    log_q: Real,
    ratio: Real,
}

impl PrimePair {
    pub fn new(p: u64, q: u64, ctx: &mut Ctx) -> Result<Self> {
        for v in [p, q] {
            if !is_prime(v)? {
                return Err(Error::domain(format!("{v} is not prime")));
            }
        }
        if p == q {
            return Err(Error::domain("p and q must differ"));
        }
        let log_p = ctx.ln_u64(p);
        let log_q = ctx.ln_u64(q);
        let ratio = &log_q / &log_p;
        Ok(Self { p, q, log_p, log_q, ratio })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn log_p(&self) -> &Real {
        &self.log_p
    }

    pub fn log_q(&self) -> &Real {
        &self.log_q
    }

    /// `log q / log p`.
    pub fn ratio(&self) -> &Real {
        &self.ratio
    }

    pub fn precision(&self) -> usize {
        self.log_p.precision()
    }
}

/// Which side of `max{a log p, b log q}` wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    PTerm,
    QTerm,
    /// `p^a = q^b`; unreachable for distinct primes unless `a = b = 0`.
    Tie,
    /// `a = b = 0`, so `α = 1` and the measure is zero.
    Unit,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::PTerm => "p",
            Branch::QTerm => "q",
            Branch::Tie => "tie",
            Branch::Unit => "unit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MeasureCoefficient {
    pub index: usize,
    pub value: Real,
    pub branch: Branch,
}

/// `m(p^a / q^b) = max{a log p, b log q}`, the branch decided by exact powers.
pub fn mahler_rational(pair: &PrimePair, a: &BigNat, b: &BigNat, ctx: &Ctx) -> (Real, Branch) {
    if a.bits() == 0 && b.bits() == 0 {
        return (Real::zero(ctx.precision()), Branch::Unit);
    }
    match cmp_power(pair.p, a, pair.q, b) {
        Ordering::Greater => (&ctx.from_big(a) * &pair.log_p, Branch::PTerm),
        Ordering::Less => (&ctx.from_big(b) * &pair.log_q, Branch::QTerm),
        Ordering::Equal => (&ctx.from_big(a) * &pair.log_p, Branch::Tie),
    }
}

/// `c_1, …, c_{N+1}` with exact branch tags and cached logarithms.
#[derive(Debug, Clone)]
pub struct CoefficientVector {
    pair: PrimePair,
    dim: usize,
    coeffs: Vec<MeasureCoefficient>,
    ln_c: Vec<Real>,
}

impl CoefficientVector {
    pub fn new(pair: &PrimePair, dim: usize, ctx: &mut Ctx) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        let fib = FibTable::new(dim + 2);
        let mut coeffs = Vec::with_capacity(dim + 1);
        let mut ln_c = Vec::with_capacity(dim + 1);
        for i in 1..=dim + 1 {
            let (value, branch) = mahler_rational(pair, fib.fib(i)?, fib.fib(i - 1)?, ctx);
            ln_c.push(ctx.ln(&value));
            coeffs.push(MeasureCoefficient { index: i, value, branch });
        }
        Ok(Self {
            pair: pair.clone(),
            dim,
            coeffs,
            ln_c,
        })
    }

    pub fn pair(&self) -> &PrimePair {
        &self.pair
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest available index (`N + 1`).
    pub fn max_index(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficient(&self, i: usize) -> Result<&MeasureCoefficient> {
        self.coeffs.get(i.wrapping_sub(1)).ok_or(Error::OutOfRange {
            index: i,
            max: self.coeffs.len(),
        })
    }

    /// `c_i` for `1 ≤ i ≤ N+1`.
    pub fn c(&self, i: usize) -> &Real {
        &self.coeffs[i - 1].value
    }

    pub fn ln_c(&self, i: usize) -> &Real {
        &self.ln_c[i - 1]
    }

    pub fn branch(&self, i: usize) -> Branch {
        self.coeffs[i - 1].branch
    }

    pub fn iter(&self) -> core::slice::Iter<'_, MeasureCoefficient> {
        self.coeffs.iter()
    }

    fn check_vector(&self, x: &ExponentVector) -> Result<()> {
        if x.dim() > self.coeffs.len() {
            return Err(Error::DimensionOverflow { dim: self.coeffs.len() });
        }
        if x.weight() == 0 {
            return Err(Error::domain("measure function of the zero vector"));
        }
        Ok(())
    }

    /// `c_i^t` for every index, shared by all vectors evaluated at one `t`.
    pub fn powers(&self, t: &Real, ctx: &mut Ctx) -> Result<PowerTable> {
        check_t(t)?;
        let pow = self.ln_c.iter().map(|l| ctx.exp(&(l * t))).collect();
        Ok(PowerTable { t: t.clone(), pow })
    }
}

fn check_t(t: &Real) -> Result<()> {
    if !t.is_positive() {
        return Err(Error::domain(format!("t = {t} must be positive")));
    }
    Ok(())
}

/// `c_i^t` at a fixed `t`.
#[derive(Debug, Clone)]
pub struct PowerTable {
    t: Real,
    pow: Vec<Real>,
}

impl PowerTable {
    pub fn t(&self) -> &Real {
        &self.t
    }

    /// `c_i^t`.
    pub fn get(&self, i: usize) -> &Real {
        &self.pow[i - 1]
    }

    /// `f_x(t)^t = Σ x_i c_i^t`.
    pub fn pow_sum(&self, x: &ExponentVector) -> Real {
        let prec = self.t.precision();
        let mut acc = Real::zero(prec);
        for i in x.support() {
            acc = &acc + &self.pow[i - 1].mul_u64(u64::from(x.get(i)));
        }
        acc
    }

    /// `s^{1/t}` for a value `s` of [`pow_sum`](Self::pow_sum).
    pub fn root(&self, s: &Real, ctx: &mut Ctx) -> Real {
        let l = ctx.ln(s);
        ctx.exp(&(&l / &self.t))
    }

    pub fn norm(&self, x: &ExponentVector, ctx: &mut Ctx) -> Real {
        let s = self.pow_sum(x);
        self.root(&s, ctx)
    }
}

/// `f_x(t)`, evaluated around the largest term so huge `t` stays accurate.
pub fn eval_measure_fn(x: &ExponentVector, coeffs: &CoefficientVector, t: &Real, ctx: &mut Ctx) -> Result<Real> {
    check_t(t)?;
    coeffs.check_vector(x)?;
    let terms: Vec<Real> = x
        .support()
        .map(|i| {
            let lx = ctx.ln_u64(u64::from(x.get(i)));
            &(coeffs.ln_c(i) * t) + &lx
        })
        .collect();
    let m = terms.iter().fold(terms[0].clone(), |a, b| a.max(b).clone());
    let mut s = Real::zero(ctx.precision());
    for l in &terms {
        s = &s + &ctx.exp(&(l - &m));
    }
    let ls = ctx.ln(&s);
    Ok(ctx.exp(&(&(&m + &ls) / t)))
}

/// `f_x(t)^t = Σ x_i c_i^t`, linear in `x`.
pub fn eval_measure_pow(x: &ExponentVector, coeffs: &CoefficientVector, t: &Real, ctx: &mut Ctx) -> Result<Real> {
    check_t(t)?;
    if x.dim() > coeffs.max_index() {
        return Err(Error::DimensionOverflow { dim: coeffs.max_index() });
    }
    let mut acc = Real::zero(ctx.precision());
    for i in x.support() {
        let ci_t = ctx.exp(&(coeffs.ln_c(i) * t));
        acc = &acc + &ci_t.mul_u64(u64::from(x.get(i)));
    }
    Ok(acc)
}

/// The factors `p^{h_i}/q^{h_{i-1}}` of `x` as exponent pairs, with multiplicity.
pub fn omega(x: &ExponentVector, fib: &FibTable) -> Result<Vec<(BigNat, BigNat)>> {
    let mut out = Vec::new();
    for i in x.support() {
        let pair = (fib.fib(i)?.clone(), fib.fib(i - 1)?.clone());
        for _ in 0..x.get(i) {
            out.push(pair.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FibSystem;

    fn setup() -> (Ctx, PrimePair, CoefficientVector) {
        let mut ctx = Ctx::new(128).unwrap();
        let pair = PrimePair::new(1879, 198_301, &mut ctx).unwrap();
        let cv = CoefficientVector::new(&pair, 13, &mut ctx).unwrap();
        (ctx, pair, cv)
    }

    fn ev(e: &[u32], dim: usize, n: usize) -> ExponentVector {
        let mut v = e.to_vec();
        v.resize(dim, 0);
        ExponentVector::new(v, n)
    }

    #[test]
    fn pair_validation() {
        let mut ctx = Ctx::new(128).unwrap();
        assert!(PrimePair::new(1879, 1879, &mut ctx).is_err());
        assert!(PrimePair::new(4, 7, &mut ctx).is_err());
        let pair = PrimePair::new(2, 3, &mut ctx).unwrap();
        assert!((pair.ratio().to_f64() - 3f64.ln() / 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn low_coefficients() {
        let (_, pair, cv) = setup();
        assert_eq!(cv.c(1), pair.log_p());
        assert_eq!(cv.branch(1), Branch::PTerm);
        assert_eq!(cv.c(2), pair.log_q());
        assert_eq!(cv.branch(2), Branch::QTerm);
        assert_eq!(cv.max_index(), 14);
        for i in 2..=14 {
            assert!(cv.c(i) > cv.c(i - 1));
        }
    }

    #[test]
    fn branch_matches_full_powers() {
        let (ctx, pair, cv) = setup();
        let fib = FibTable::new(16);
        for i in 1..=14 {
            let (a, b) = (fib.fib(i).unwrap(), fib.fib(i - 1).unwrap());
            let lhs = num_traits::Pow::pow(BigNat::from(1879u32), a);
            let rhs = num_traits::Pow::pow(BigNat::from(198_301u32), b);
            let want = if lhs > rhs { Branch::PTerm } else { Branch::QTerm };
            assert_eq!(cv.branch(i), want, "i = {i}");
        }
        let (v, br) = mahler_rational(&pair, &BigNat::from(0u32), &BigNat::from(0u32), &ctx);
        assert!(v.is_zero());
        assert_eq!(br, Branch::Unit);
    }

    #[test]
    fn trivial_and_one_norm() {
        let (mut ctx, _, cv) = setup();
        let sys = FibSystem::new(13).unwrap();
        let t = ctx.from_f64(2.75);
        for n in 1..=13 {
            let triv = ExponentVector::unit(n, 13).unwrap();
            let f = eval_measure_fn(&triv, &cv, &t, &mut ctx).unwrap();
            let rel = ((&f - cv.c(n)).abs() / cv.c(n).clone()).to_f64();
            assert!(rel < 1e-35, "{rel}");
        }
        let x = sys.x_vector(5, 3).unwrap();
        let one = ctx.from_u64(1);
        let f1 = eval_measure_fn(&x, &cv, &one, &mut ctx).unwrap();
        let want = &cv.c(1).mul_u64(2) + &cv.c(2).mul_u64(3);
        assert!(((&f1 - &want).abs() / want.clone()).to_f64() < 1e-35);
        assert!(eval_measure_fn(&x, &cv, &ctx.from_u64(0), &mut ctx).is_err());
    }

    #[test]
    fn log_domain_agrees_with_direct_power_sum() {
        let (mut ctx, _, cv) = setup();
        let mut hi = Ctx::new(256).unwrap();
        let pair_hi = PrimePair::new(1879, 198_301, &mut hi).unwrap();
        let cv_hi = CoefficientVector::new(&pair_hi, 13, &mut hi).unwrap();
        let x = ev(&[1, 0, 0, 3, 0, 2, 0, 3], 13, 11);
        let two = ctx.from_u64(2);
        let f = eval_measure_fn(&x, &cv, &two, &mut ctx).unwrap();
        let mut s = hi.from_u64(0);
        for i in x.support() {
            s = &s + &(cv_hi.c(i) * cv_hi.c(i)).mul_u64(u64::from(x.get(i)));
        }
        let direct = hi.sqrt(&s);
        let rel = ((&f.with_precision(256) - &direct).abs() / direct.clone()).to_f64();
        assert!(rel < 2f64.powi(-90), "{rel}");
        let table = cv.powers(&two, &mut ctx).unwrap();
        let g = table.norm(&x, &mut ctx);
        assert!(((&f - &g).abs() / f.clone()).to_f64() < 1e-35);
    }

    #[test]
    fn large_t_tends_to_max_coefficient() {
        let (mut ctx, _, cv) = setup();
        let x = ev(&[1, 0, 0, 4], 13, 7);
        let t = ctx.from_u64(200);
        let f = eval_measure_fn(&x, &cv, &t, &mut ctx).unwrap();
        // only the multiplicity of the top slot survives: f → 4^{1/t}·c_4
        let limit = cv.c(4).to_f64() * 4f64.powf(1.0 / 200.0);
        assert!((f.to_f64() / limit - 1.0).abs() < 1e-6);
    }

    #[test]
    fn omega_of_generator() {
        let fib = FibTable::new(10);
        let x = ev(&[0, 1, 2], 5, 5);
        let w = omega(&x, &fib).unwrap();
        let pairs: Vec<(u64, u64)> = w.iter().map(|(a, b)| (a.try_into().unwrap(), b.try_into().unwrap())).collect();
        assert_eq!(pairs, [(1, 1), (2, 1), (2, 1)]);
    }
}
