//! Elements of the cyclotomic field Q(ζ_n), stored in the power basis
//! 1, ζ, …, ζ^{φ(n)-1} and reduced modulo the n-th cyclotomic polynomial.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use parking_lot::Mutex;

use crate::error::{Error, Result};

fn cyclotomic_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (ascending) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic order must be positive");
    if let Some(p) = cyclotomic_cache().lock().get(&n) {
        return p.clone();
    }
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            p = exact_div_monic(&p, &phi_d);
        }
    }
    let p = Arc::new(p);
    cyclotomic_cache().lock().insert(n, p.clone());
    p
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qlen = num.len() - dd;
    let mut q = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dd];
        q[k] = c;
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|c| *c == 0));
    q
}

/// Euler's totient, the degree of Q(ζ_n) over Q.
pub fn totient(n: u32) -> usize {
    cyclotomic_poly(n).len() - 1
}

/// An element of Q(ζ_n). Elements lying in Q are stored with n = 1.
#[derive(Clone, Debug)]
pub struct Cyclo {
    n: u32,
    c: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo { n: 1, c: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Cyclo { n: 1, c: vec![BigRational::one()] }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Cyclo { n: 1, c: vec![q] }
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(k)))
    }

    /// ζ_n^k.
    pub fn zeta_pow(n: u32, k: i64) -> Self {
        let k = k.rem_euclid(n as i64) as usize;
        let phi = totient(n);
        let mut poly = vec![BigRational::zero(); k.max(phi) + 1];
        poly[k] = BigRational::one();
        Self::from_poly(n, poly)
    }

    fn from_poly(n: u32, poly: Vec<BigRational>) -> Self {
        let c = reduce_mod_cyclotomic(poly, n);
        Self::canonical(n, c)
    }

    fn canonical(n: u32, mut c: Vec<BigRational>) -> Self {
        if n > 1 && c.iter().skip(1).all(Zero::is_zero) {
            c.truncate(1);
            return Cyclo { n: 1, c };
        }
        Cyclo { n, c }
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.n == 1 && self.c[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.n == 1 && self.c[0].is_one()
    }

    /// The value as a rational number, if it lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        (self.n == 1).then(|| &self.c[0])
    }

    fn embed(&self, m: u32) -> Vec<BigRational> {
        if self.n == m {
            return self.c.clone();
        }
        let phi_m = totient(m);
        if self.n == 1 {
            let mut v = vec![BigRational::zero(); phi_m];
            v[0] = self.c[0].clone();
            return v;
        }
        let step = (m / self.n) as usize;
        let mut poly = vec![BigRational::zero(); (self.c.len() - 1) * step + 1];
        for (j, cj) in self.c.iter().enumerate() {
            poly[j * step] = cj.clone();
        }
        let mut out = reduce_mod_cyclotomic(poly, m);
        out.resize(phi_m, BigRational::zero());
        out
    }

    fn common(&self, other: &Self) -> (u32, Vec<BigRational>, Vec<BigRational>) {
        let m = if self.n == other.n {
            self.n
        } else {
            (self.n as u64).lcm(&(other.n as u64)) as u32
        };
        (m, self.embed(m), other.embed(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.n == 1 && other.n == 1 {
            return Cyclo { n: 1, c: vec![&self.c[0] + &other.c[0]] };
        }
        let (m, a, b) = self.common(other);
        let c = a.into_iter().zip(b).map(|(x, y)| x + y).collect();
        Self::canonical(m, c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Cyclo { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.n == 1 && other.n == 1 {
            return Cyclo { n: 1, c: vec![&self.c[0] * &other.c[0]] };
        }
        if self.n == 1 || other.n == 1 {
            let (s, v) = if self.n == 1 { (&self.c[0], other) } else { (&other.c[0], self) };
            if s.is_zero() {
                return Self::zero();
            }
            return Cyclo { n: v.n, c: v.c.iter().map(|x| x * s).collect() };
        }
        let (m, a, b) = self.common(other);
        let mut prod = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    prod[i + j] += ai * bj;
                }
            }
        }
        Self::from_poly(m, prod)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Cyclo { n: self.n, c: self.c.iter().map(|x| x * q).collect() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.n == 1 {
            return Ok(Cyclo { n: 1, c: vec![self.c[0].recip()] });
        }
        let phi: Vec<BigRational> = cyclotomic_poly(self.n)
            .iter()
            .map(|k| BigRational::from_integer(BigInt::from(*k)))
            .collect();
        let s = qpoly_inverse_mod(&self.c, &phi);
        Ok(Self::from_poly(self.n, s))
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

    /// Canonical text: rationals plainly, otherwise a combination of ζ-powers.
    pub fn render(&self) -> String {
        if let Some(q) = self.as_rational() {
            return q.to_string();
        }
        let mut out = String::new();
        for (j, cj) in self.c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let neg = cj.is_negative();
            let mag = cj.abs();
            let mono = match j {
                0 => String::new(),
                1 => "ζ".to_string(),
                _ => format!("ζ^{j}"),
            };
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono
            } else {
                format!("{mag}{mono}")
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
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.c == other.c;
        }
        if self.n == 1 || other.n == 1 {
            return false;
        }
        let (_, a, b) = self.common(other);
        a == b
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn reduce_mod_cyclotomic(mut poly: Vec<BigRational>, n: u32) -> Vec<BigRational> {
    let phi = cyclotomic_poly(n);
    let d = phi.len() - 1;
    if poly.len() > d {
        for k in (d..poly.len()).rev() {
            let c = std::mem::replace(&mut poly[k], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            for (j, pj) in phi.iter().enumerate().take(d) {
                if *pj != 0 {
                    poly[k - d + j] -= &c * BigRational::from_integer(BigInt::from(*pj));
                }
            }
        }
    }
    poly.resize(d, BigRational::zero());
    poly
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn qpoly_sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let len = a.len().max(if q.is_empty() || b.is_empty() { 0 } else { q.len() + b.len() - 1 });
    let mut out = vec![BigRational::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        out[i] += ai;
    }
    for (i, qi) in q.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] -= qi * bj;
        }
    }
    trim(&mut out);
    out
}

fn qpoly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = b[db].recip();
    let mut q = vec![BigRational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] * &lead_inv;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[k + j] -= &c * bj;
            }
        }
        q[k] = c;
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

/// Inverse of `a` modulo the irreducible polynomial `m` over Q.
fn qpoly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r1);
    let mut s0: Vec<BigRational> = Vec::new();
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = qpoly_divrem(&r0, &r1);
        let s2 = qpoly_sub_mul(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    let g = r0[0].recip();
    s0.iter().map(|c| c * &g).collect()
}
