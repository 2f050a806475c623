//! Exact arithmetic in Q(ζ_{2D})(t), where t is a formal parameter and z = t^D.
//!
//! A [`Scalar`] is stored as `t^val · num(t) / den(t)` with
//! - `num`, `den` having nonzero constant terms,
//! - `den` monic and coprime to `num`,
//!
//! so structural equality is field equality. Laurent polynomials in t (the
//! common case) never touch the gcd path.

mod cyclo;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use cyclo::{cyclotomic_poly, totient, Cyclo};

use crate::error::{Error, Result};

/// Small exact rationals used for weights and exponents in (1/D)Z.
pub type Q64 = Ratio<i64>;

pub fn q64(n: i64, d: i64) -> Q64 {
    Ratio::new(n, d)
}

pub fn qi(n: i64) -> Q64 {
    Ratio::from_integer(n)
}

type TPoly = Vec<Cyclo>;

#[derive(Clone, Debug, PartialEq)]
pub struct Scalar {
    val: i64,
    num: TPoly,
    den: TPoly,
}

fn tpoly_trim(p: &mut TPoly) {
    while p.last().is_some_and(Cyclo::is_zero) {
        p.pop();
    }
}

fn tpoly_add(a: &[Cyclo], b: &[Cyclo]) -> TPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        });
    }
    tpoly_trim(&mut out);
    out
}

fn tpoly_mul(a: &[Cyclo], b: &[Cyclo]) -> TPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len() == 1 {
        return b.iter().map(|y| a[0].mul(y)).collect();
    }
    if b.len() == 1 {
        return a.iter().map(|x| x.mul(&b[0])).collect();
    }
    let mut out = vec![Cyclo::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    tpoly_trim(&mut out);
    out
}

fn tpoly_scale(a: &[Cyclo], c: &Cyclo) -> TPoly {
    let mut out: TPoly = a.iter().map(|x| x.mul(c)).collect();
    tpoly_trim(&mut out);
    out
}

fn tpoly_divrem(a: &[Cyclo], b: &[Cyclo]) -> Result<(TPoly, TPoly)> {
    let mut r = a.to_vec();
    tpoly_trim(&mut r);
    if b.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let db = b.len() - 1;
    if r.len() < b.len() {
        return Ok((Vec::new(), r));
    }
    let lead_inv = b[db].inv()?;
    let mut q = vec![Cyclo::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].mul(&lead_inv);
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[k + j] = r[k + j].sub(&c.mul(bj));
            }
        }
        q[k] = c;
    }
    tpoly_trim(&mut r);
    tpoly_trim(&mut q);
    Ok((q, r))
}

fn tpoly_gcd(a: &[Cyclo], b: &[Cyclo]) -> Result<TPoly> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    tpoly_trim(&mut x);
    tpoly_trim(&mut y);
    while !y.is_empty() {
        let (_, r) = tpoly_divrem(&x, &y)?;
        x = std::mem::replace(&mut y, r);
    }
    if let Some(lead) = x.last() {
        let inv = lead.inv()?;
        x = tpoly_scale(&x, &inv);
    }
    Ok(x)
}

fn is_unit_poly(p: &[Cyclo]) -> bool {
    p.len() == 1 && p[0].is_one()
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { val: 0, num: Vec::new(), den: vec![Cyclo::one()] }
    }

    pub fn one() -> Self {
        Self::from_cyclo(Cyclo::one())
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_cyclo(Cyclo::from_int(k))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_cyclo(Cyclo::from_rational(q))
    }

    pub fn from_q64(q: Q64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom())))
    }

    pub fn from_cyclo(c: Cyclo) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Scalar { val: 0, num: vec![c], den: vec![Cyclo::one()] }
    }

    /// The monomial t^k.
    pub fn t_pow(k: i64) -> Self {
        Scalar { val: k, num: vec![Cyclo::one()], den: vec![Cyclo::one()] }
    }

    /// Builds t^val · num / den and brings it to normal form.
    pub fn from_parts(val: i64, num: Vec<Cyclo>, den: Vec<Cyclo>) -> Result<Self> {
        let mut num = num;
        let mut den = den;
        tpoly_trim(&mut num);
        tpoly_trim(&mut den);
        if den.is_empty() {
            return Err(Error::DivisionByZero);
        }
        if num.is_empty() {
            return Ok(Self::zero());
        }
        let mut val = val;
        let lz = num.iter().take_while(|c| c.is_zero()).count();
        num.drain(..lz);
        val += lz as i64;
        let lzd = den.iter().take_while(|c| c.is_zero()).count();
        den.drain(..lzd);
        val -= lzd as i64;
        if den.len() > 1 {
            let g = tpoly_gcd(&num, &den)?;
            if g.len() > 1 {
                num = tpoly_divrem(&num, &g)?.0;
                den = tpoly_divrem(&den, &g)?.0;
            }
        }
        let lead = den.last().expect("nonempty").clone();
        if !lead.is_one() {
            let inv = lead.inv()?;
            num = tpoly_scale(&num, &inv);
            den = tpoly_scale(&den, &inv);
        }
        Ok(Scalar { val, num, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.val == 0 && is_unit_poly(&self.num) && is_unit_poly(&self.den)
    }

    /// True when the value is a Laurent polynomial in t.
    pub fn is_laurent(&self) -> bool {
        is_unit_poly(&self.den)
    }

    /// The value as an element of Q(ζ), if it does not depend on t.
    pub fn as_constant(&self) -> Option<&Cyclo> {
        if self.is_zero() {
            return None;
        }
        (self.val == 0 && self.num.len() == 1 && is_unit_poly(&self.den)).then(|| &self.num[0])
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        self.as_constant().and_then(|c| c.as_rational().cloned())
    }

    /// Nonzero t-exponents and their coefficients, for Laurent values.
    pub fn laurent_terms(&self) -> Option<Vec<(i64, &Cyclo)>> {
        if !self.is_laurent() {
            return None;
        }
        Some(
            self.num
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (self.val + i as i64, c))
                .collect(),
        )
    }

    fn is_const_fast(&self) -> bool {
        self.val == 0 && self.num.len() == 1 && is_unit_poly(&self.den)
    }

    pub fn neg(&self) -> Self {
        Scalar { val: self.val, num: self.num.iter().map(Cyclo::neg).collect(), den: self.den.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.is_const_fast() && other.is_const_fast() {
            return Self::from_cyclo(self.num[0].add(&other.num[0]));
        }
        let v = self.val.min(other.val);
        let shift = |p: &[Cyclo], by: i64| -> TPoly {
            let mut out = vec![Cyclo::zero(); by as usize];
            out.extend(p.iter().cloned());
            out
        };
        let a = shift(&self.num, self.val - v);
        let b = shift(&other.num, other.val - v);
        if is_unit_poly(&self.den) && is_unit_poly(&other.den) {
            return Self::from_parts(v, tpoly_add(&a, &b), vec![Cyclo::one()]).expect("unit denominator");
        }
        if self.den == other.den {
            return Self::from_parts(v, tpoly_add(&a, &b), self.den.clone()).expect("nonzero denominator");
        }
        let num = tpoly_add(&tpoly_mul(&a, &other.den), &tpoly_mul(&b, &self.den));
        let den = tpoly_mul(&self.den, &other.den);
        Self::from_parts(v, num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_const_fast() && other.is_const_fast() {
            return Self::from_cyclo(self.num[0].mul(&other.num[0]));
        }
        let val = self.val + other.val;
        let num = tpoly_mul(&self.num, &other.num);
        if is_unit_poly(&self.den) && is_unit_poly(&other.den) {
            return Scalar { val, num, den: vec![Cyclo::one()] };
        }
        let den = tpoly_mul(&self.den, &other.den);
        Self::from_parts(val, num, den).expect("nonzero denominator")
    }

    pub fn scale_q(&self, q: &BigRational) -> Self {
        if q.is_zero() || self.is_zero() {
            return Self::zero();
        }
        Scalar { val: self.val, num: self.num.iter().map(|c| c.scale(q)).collect(), den: self.den.clone() }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale_q(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::from_parts(-self.val, self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Substitutes t ↦ q.
    pub fn specialize(&self, q: &Cyclo) -> Result<Self> {
        let eval = |p: &[Cyclo]| -> Cyclo {
            let mut acc = Cyclo::zero();
            for c in p.iter().rev() {
                acc = acc.mul(q).add(c);
            }
            acc
        };
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let d = eval(&self.den);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = eval(&self.num).mul(&d.inv()?).mul(&q.pow(self.val)?);
        Ok(Self::from_cyclo(v))
    }

    /// Canonical text with t-powers shown as powers of z whenever D divides them.
    pub fn render(&self, d: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if is_unit_poly(&self.den) {
            return render_laurent(self.val, &self.num, d);
        }
        let num = render_laurent(self.val.max(0), &self.num, 1);
        let den = render_laurent((-self.val).max(0), &self.den, 1);
        format!("({num})/({den})")
    }

    /// Splits off a leading sign for use as a series coefficient:
    /// returns (negated, magnitude text, is a single term).
    pub fn render_parts(&self, d: u32) -> (bool, String, bool) {
        let single = self.is_laurent() && self.num.iter().filter(|c| !c.is_zero()).count() == 1;
        if single {
            let c = self.num.iter().find(|c| !c.is_zero()).expect("single term");
            if let Some(q) = c.as_rational() {
                if q.is_negative() {
                    return (true, self.neg().render(d), true);
                }
            }
            let atomic = c.as_rational().is_some() || self.val == 0;
            return (false, self.render(d), atomic);
        }
        (false, self.render(d), false)
    }
}

fn render_laurent(val: i64, num: &[Cyclo], d: u32) -> String {
    let terms: Vec<(i64, &Cyclo)> =
        num.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (val + i as i64, c)).collect();
    let use_z = d >= 1 && terms.iter().all(|(e, _)| e % d as i64 == 0);
    let mut out = String::new();
    for (e, c) in terms {
        let (var, pow) = if use_z { ("z", e / d as i64) } else { ("t", e) };
        let mono = match pow {
            0 => String::new(),
            1 => var.to_string(),
            p => format!("{var}^{p}"),
        };
        let (neg, mag) = match c.as_rational() {
            Some(q) if q.is_negative() => (true, Cyclo::from_rational(-q.clone())),
            _ => (false, c.clone()),
        };
        let compound = mag.as_rational().is_none() && mag.coeffs().iter().filter(|x| !x.is_zero()).count() > 1;
        let coeff = if compound { format!("({})", mag.render()) } else { mag.render() };
        let body = if mono.is_empty() {
            coeff
        } else if mag.is_one() {
            mono
        } else {
            format!("{coeff} {mono}")
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(1))
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::add(self, rhs)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::sub(self, rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::mul(self, rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

/// Binomial coefficient C(r, i) for rational r.
pub fn binom_q(r: Q64, i: u64) -> BigRational {
    let rr = BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
    let mut acc = BigRational::one();
    for j in 0..i {
        acc = acc * (&rr - BigRational::from_integer(BigInt::from(j))) / BigRational::from_integer(BigInt::from(j + 1));
    }
    acc
}

/// Binomial coefficient C(n, i) for integer n (any sign).
pub fn binom_i(n: i64, i: u64) -> BigRational {
    binom_q(qi(n), i)
}

/// How t is interpreted in a session.
#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    Formal,
    /// t is the Gaussian rational `re + i·im`.
    Concrete { re: BigRational, im: BigRational },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseKind {
    /// e^{h·l_p(z)}
    LogBranch,
    /// e^{πih}
    PiRotation,
}

/// Session field data: the denominator bound D and the meaning of t.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldConfig {
    d: u32,
    mode: Mode,
    t_value: Option<Cyclo>,
}

impl FieldConfig {
    pub fn formal(d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("D must be at least 1".into()));
        }
        Ok(FieldConfig { d, mode: Mode::Formal, t_value: None })
    }

    pub fn concrete(d: u32, re: BigRational, im: BigRational) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("D must be at least 1".into()));
        }
        if re.is_zero() && im.is_zero() {
            return Err(Error::InvalidArgument("concrete value of t must be nonzero".into()));
        }
        let mut v = Cyclo::from_rational(re.clone());
        if !im.is_zero() {
            if d % 2 != 0 {
                return Err(Error::IncompatibleD(format!("a non-real t needs i in Q(ζ_{}), so D must be even", 2 * d)));
            }
            let i = Cyclo::zeta_pow(2 * d, (d / 2) as i64);
            v = v.add(&i.scale(&im));
        }
        Ok(FieldConfig { d, mode: Mode::Concrete { re, im }, t_value: Some(v) })
    }

    /// Concrete session from a value of z, taking the real D-th root for t.
    pub fn concrete_z(d: u32, z: BigRational) -> Result<Self> {
        if z.is_zero() {
            return Err(Error::InvalidArgument("z must be nonzero".into()));
        }
        let root = rational_root(&z, d).ok_or_else(|| {
            Error::UnsupportedExponent(format!("z = {z} has no rational real {d}-th root"))
        })?;
        Self::concrete(d, root, BigRational::zero())
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn is_formal(&self) -> bool {
        self.t_value.is_none()
    }

    /// Order of the root of unity adjoined, 2D.
    pub fn order(&self) -> u32 {
        2 * self.d
    }

    pub fn zeta_pow(&self, k: i64) -> Scalar {
        Scalar::from_cyclo(Cyclo::zeta_pow(self.order(), k))
    }

    pub fn t(&self) -> Scalar {
        match &self.t_value {
            None => Scalar::t_pow(1),
            Some(v) => Scalar::from_cyclo(v.clone()),
        }
    }

    pub fn t_pow(&self, k: i64) -> Scalar {
        match &self.t_value {
            None => Scalar::t_pow(k),
            Some(v) => Scalar::from_cyclo(v.pow(k).expect("t is nonzero")),
        }
    }

    pub fn z(&self) -> Scalar {
        self.t_pow(self.d as i64)
    }

    fn lattice_numerator(&self, r: Q64, what: &str) -> Result<i64> {
        let dr = r * qi(self.d as i64);
        if !dr.is_integer() {
            return Err(Error::UnsupportedExponent(format!("{what} = {r} is not in (1/{})Z", self.d)));
        }
        Ok(dr.to_integer())
    }

    /// z^r = t^{Dr}.
    pub fn z_power(&self, r: Q64) -> Result<Scalar> {
        let k = self.lattice_numerator(r, "exponent")?;
        Ok(self.t_pow(k))
    }

    pub fn branch_phase(&self, h: Q64, p: i64, kind: PhaseKind) -> Result<Scalar> {
        let dh = self.lattice_numerator(h, "weight")?;
        match kind {
            PhaseKind::LogBranch => Ok(self.t_pow(dh).mul(&self.zeta_pow(2 * p * dh))),
            PhaseKind::PiRotation => Ok(self.zeta_pow(dh)),
        }
    }

    /// c^r for the bases that occur in binomial expansions.
    pub fn scalar_power(&self, c: &Scalar, r: Q64) -> Result<Scalar> {
        if r.is_integer() {
            return c.pow(r.to_integer());
        }
        if *c == self.z() {
            return self.z_power(r);
        }
        Err(Error::UnsupportedExponent(format!("non-integral power {r} of {}", c.render(self.d))))
    }
}

fn rational_root(q: &BigRational, d: u32) -> Option<BigRational> {
    if d == 1 {
        return Some(q.clone());
    }
    if q.is_negative() {
        if d % 2 == 0 {
            return None;
        }
        return rational_root(&-q.clone(), d).map(|r| -r);
    }
    let n = int_root(q.numer(), d)?;
    let m = int_root(q.denom(), d)?;
    Some(BigRational::new(n, m))
}

fn int_root(n: &BigInt, d: u32) -> Option<BigInt> {
    let approx = n.to_f64()?.powf(1.0 / d as f64).round();
    let base = BigInt::from(approx as i64);
    for delta in -1i64..=1 {
        let cand = &base + delta;
        if cand.sign() != num_bigint::Sign::Minus && num_traits::pow(cand.clone(), d as usize) == *n {
            return Some(cand);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Scalar {
        Scalar::t_pow(1)
    }

    #[test]
    fn polynomial_identity() {
        let a = t().add(&Scalar::one());
        let b = t().sub(&Scalar::one());
        assert_eq!(a.mul(&b), t().pow(2).unwrap().sub(&Scalar::one()));
    }

    #[test]
    fn zeta_order_two_squares_to_minus_one() {
        let f = FieldConfig::formal(2).unwrap();
        let z4 = f.zeta_pow(1);
        assert_eq!(z4.mul(&z4), Scalar::from_int(-1));
    }

    #[test]
    fn inverse_of_t() {
        let inv = t().inv().unwrap();
        assert_eq!(inv, Scalar::t_pow(-1));
        assert!(inv.mul(&t()).is_one());
    }

    #[test]
    fn division_by_zero_is_error() {
        assert_eq!(Scalar::zero().inv(), Err(Error::DivisionByZero));
        assert_eq!(Scalar::one().div(&Scalar::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn rational_functions_reduce() {
        let tm1 = t().sub(&Scalar::one());
        let tp1 = t().add(&Scalar::one());
        let f = tm1.mul(&tp1).div(&tm1).unwrap();
        assert_eq!(f, tp1);
        let g = Scalar::one().div(&tm1).unwrap().add(&Scalar::one().div(&tp1).unwrap());
        let expect = t().scale_int(2).div(&t().pow(2).unwrap().sub(&Scalar::one())).unwrap();
        assert_eq!(g, expect);
    }

    #[test]
    fn z_power_examples() {
        let f = FieldConfig::formal(4).unwrap();
        assert_eq!(f.z_power(qi(1)).unwrap(), Scalar::t_pow(4));
        assert_eq!(f.z_power(q64(-1, 4)).unwrap(), Scalar::t_pow(-1));
        assert!(matches!(f.z_power(q64(1, 3)), Err(Error::UnsupportedExponent(_))));
    }

    #[test]
    fn branch_phase_examples() {
        let f1 = FieldConfig::formal(1).unwrap();
        assert_eq!(f1.branch_phase(qi(1), 0, PhaseKind::LogBranch).unwrap(), Scalar::t_pow(1));
        assert!(f1.branch_phase(qi(2), 0, PhaseKind::PiRotation).unwrap().is_one());
        assert_eq!(f1.branch_phase(qi(1), 0, PhaseKind::PiRotation).unwrap(), Scalar::from_int(-1));
        let f2 = FieldConfig::formal(2).unwrap();
        assert_eq!(f2.branch_phase(q64(1, 2), 1, PhaseKind::LogBranch).unwrap(), Scalar::t_pow(1).neg());
    }

    #[test]
    fn concrete_from_z() {
        let f = FieldConfig::concrete_z(2, BigRational::from_integer(4.into())).unwrap();
        assert_eq!(f.t(), Scalar::from_int(2));
        assert_eq!(f.z(), Scalar::from_int(4));
        assert!(FieldConfig::concrete_z(2, BigRational::from_integer(2.into())).is_err());
        assert!(FieldConfig::concrete(1, BigRational::zero(), BigRational::zero()).is_err());
    }

    #[test]
    fn gaussian_t_needs_even_d() {
        let one = BigRational::one();
        assert!(FieldConfig::concrete(1, one.clone(), one.clone()).is_err());
        let f = FieldConfig::concrete(2, BigRational::zero(), one).unwrap();
        assert_eq!(f.t().mul(&f.t()), Scalar::from_int(-1));
    }

    #[test]
    fn rendering() {
        let z = Scalar::t_pow(1);
        assert_eq!(z.render(1), "z");
        assert_eq!(z.pow(2).unwrap().render(1), "z^2");
        assert_eq!(Scalar::t_pow(1).render(2), "t");
        assert_eq!(z.add(&Scalar::one()).render(1), "1 + z");
        assert_eq!(Scalar::from_q64(q64(-1, 2)).render(1), "-1/2");
    }
}
