//! Rational functions with poles at 0 and one further point, their ι-expansions
//! and recognition from a truncated expansion at infinity.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::formal::{binom_expand, mul, three_term_check, Base, Direction, ExpandIn, MonoCheck, TruncatedSeries};
use crate::scalars::{qi, FieldConfig, Scalar, Q64};

/// p(x)·x^{−l}·(x − c)^{−k} in minimal form.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFn {
    p: Vec<Scalar>,
    l: u32,
    k: u32,
    pole: Scalar,
}

fn trim(p: &mut Vec<Scalar>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_eval(p: &[Scalar], x: &Scalar) -> Scalar {
    p.iter().rev().fold(Scalar::zero(), |acc, c| acc.mul(x).add(c))
}

/// Quotient of p by (x − c), assuming c is a root.
fn div_linear(p: &[Scalar], c: &Scalar) -> Vec<Scalar> {
    let n = p.len();
    let mut q = vec![Scalar::zero(); n.saturating_sub(1)];
    let mut carry = Scalar::zero();
    for i in (1..n).rev() {
        carry = p[i].add(&carry.mul(c));
        q[i - 1] = carry.clone();
    }
    q
}

fn mul_linear(p: &[Scalar], c: &Scalar) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); p.len() + 1];
    for (i, a) in p.iter().enumerate() {
        out[i + 1] = out[i + 1].add(a);
        out[i] = out[i].sub(&a.mul(c));
    }
    out
}

impl RationalFn {
    pub fn new(mut p: Vec<Scalar>, mut l: u32, mut k: u32, pole: Scalar) -> Self {
        trim(&mut p);
        if p.is_empty() {
            return RationalFn { p, l: 0, k: 0, pole };
        }
        while l > 0 && p[0].is_zero() {
            p.remove(0);
            l -= 1;
        }
        while k > 0 && !pole.is_zero() && poly_eval(&p, &pole).is_zero() {
            p = div_linear(&p, &pole);
            k -= 1;
        }
        RationalFn { p, l, k, pole }
    }

    /// x^a (x − c)^b.
    pub fn monomial(a: i64, b: i64, pole: Scalar) -> Self {
        let mut p = vec![Scalar::zero(); a.max(0) as usize];
        p.push(Scalar::one());
        for _ in 0..b.max(0) {
            p = mul_linear(&p, &pole);
        }
        Self::new(p, (-a).max(0) as u32, (-b).max(0) as u32, pole)
    }

    pub fn polynomial(&self) -> &[Scalar] {
        &self.p
    }
    pub fn l(&self) -> u32 {
        self.l
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn pole(&self) -> &Scalar {
        &self.pole
    }
    pub fn is_zero(&self) -> bool {
        self.p.is_empty()
    }

    fn deg(&self) -> i64 {
        self.p.len().saturating_sub(1) as i64
    }

    /// p(x)·x^{−l} as a finite series whose window starts at −l.
    fn numerator_series(&self, var: &str) -> TruncatedSeries<Scalar> {
        let lo = -(self.l as i64);
        let mut s = TruncatedSeries::univariate(var, Direction::Finite, qi(lo), qi(lo + self.deg()));
        for (i, c) in self.p.iter().enumerate() {
            s.add_term(vec![qi(lo + i as i64)], c.clone());
        }
        s
    }

    /// Expansion at infinity, exact on [deg p − l − k − M, deg p − l − k].
    pub fn iota_infinity(&self, field: &FieldConfig, depth: u32) -> Result<TruncatedSeries<Scalar>> {
        self.iota_infinity_in("x", field, depth)
    }

    pub fn iota_infinity_in(&self, var: &str, field: &FieldConfig, depth: u32) -> Result<TruncatedSeries<Scalar>> {
        let d = binom_expand(field, &Base::VarMinus(var.into(), self.pole.clone()), qi(-(self.k as i64)), ExpandIn::Second, depth)?;
        let mut out = mul(&self.numerator_series(var), &d)?;
        if self.k == 0 {
            // A Laurent polynomial is its own expansion; keep the promised upper shape.
            let v = out.var(0).clone();
            let mut up = TruncatedSeries::univariate(var, Direction::Upper, v.hi - qi(depth as i64), v.hi);
            for (e, c) in out.terms() {
                up.add_term(e.clone(), c.clone());
            }
            out = up;
        }
        Ok(out)
    }

    /// Expansion at zero, exact on [−l, −l + M].
    pub fn iota_zero(&self, field: &FieldConfig, depth: u32) -> Result<TruncatedSeries<Scalar>> {
        self.iota_zero_in("x", field, depth)
    }

    pub fn iota_zero_in(&self, var: &str, field: &FieldConfig, depth: u32) -> Result<TruncatedSeries<Scalar>> {
        if self.k > 0 && self.pole.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = binom_expand(field, &Base::VarMinus(var.into(), self.pole.clone()), qi(-(self.k as i64)), ExpandIn::First, depth)?;
        let out = mul(&self.numerator_series(var), &d)?;
        let lo = -(self.l as i64);
        Ok(out.restrict(0, qi(lo), qi(lo + depth as i64)))
    }

    /// ι_{x0;0} f(x0 + c) where c is the pole: the poles move to −c and 0.
    pub fn shifted_iota_zero(&self, var: &str, field: &FieldConfig, depth: u32) -> Result<TruncatedSeries<Scalar>> {
        let c = &self.pole;
        if self.l > 0 && c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut shifted = TruncatedSeries::univariate(var, Direction::Finite, qi(0), qi(self.deg()));
        for (j, pj) in self.p.iter().enumerate() {
            let b = binom_expand(field, &Base::ScalarPlus(c.clone(), var.into()), qi(j as i64), ExpandIn::Second, 0)?;
            for (e, v) in b.terms() {
                shifted.add_term(e.clone(), v.mul(pj));
            }
        }
        let inv = binom_expand(field, &Base::ScalarPlus(c.clone(), var.into()), qi(-(self.l as i64)), ExpandIn::Second, depth)?;
        let prod = mul(&shifted, &inv)?;
        let k = self.k as i64;
        Ok(prod.shift(0, qi(-k)).restrict(0, qi(-k), qi(-k + depth as i64)))
    }

    /// Textual form `(p) x^-l (x - c)^-k`.
    pub fn render(&self, d: u32) -> String {
        if self.p.is_empty() {
            return "0".into();
        }
        let terms: Vec<(Q64, Scalar)> = self.p.iter().enumerate().map(|(i, c)| (qi(i as i64), c.clone())).collect();
        let poly = TruncatedSeries::finite_from("x", terms).render(d);
        let mut parts = Vec::new();
        let trivial = poly == "1";
        if !trivial {
            parts.push(if self.p.iter().filter(|c| !c.is_zero()).count() > 1 { format!("({poly})") } else { poly });
        }
        if self.l > 0 {
            parts.push(format!("x^-{}", self.l));
        }
        if self.k > 0 {
            let (neg, body, atomic) = self.pole.render_parts(d);
            let c = if atomic { body } else { format!("({body})") };
            parts.push(format!("(x {} {c})^-{}", if neg { "+" } else { "-" }, self.k));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    /// Guaranteed by a-priori pole bounds.
    Exact,
    /// Negative coefficients verified to vanish down to this many exponents.
    VerifiedToDepth(i64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Recognized {
    pub f: RationalFn,
    /// Clearing exponents (l, k) that succeeded; equal to the minimal form's orders.
    pub l: u32,
    pub k: u32,
    pub depth: i64,
    pub certainty: Certainty,
}

/// Bounds for [`recognize_from_upper`].
#[derive(Clone, Copy, Debug)]
pub struct RecognizeBounds {
    pub l_max: u32,
    pub k_max: u32,
    pub deg_max: u32,
    /// Pole orders known to suffice from theory, if any.
    pub a_priori: Option<(u32, u32)>,
}

/// Finds the minimal (l, k) such that x^l (x − c)^k s has no negative powers
/// on its certified window, and returns the corresponding rational function.
pub fn recognize_from_upper(field: &FieldConfig, s: &TruncatedSeries<Scalar>, pole: &Scalar, b: RecognizeBounds) -> Result<Recognized> {
    if s.vars().len() != 1 {
        return Err(Error::InvalidArgument("recognition needs a univariate series".into()));
    }
    let v = s.var(0).clone();
    if !matches!(v.dir, Direction::Upper | Direction::Finite) {
        return Err(Error::InvalidArgument("recognition needs an upper-truncated series".into()));
    }
    if s.terms().any(|(e, _)| !e[0].is_integer()) || !v.lo.is_integer() || !v.hi.is_integer() {
        return Err(Error::UnsupportedExponent("recognition needs integral exponents".into()));
    }
    let (lo, hi) = (v.lo.to_integer(), v.hi.to_integer());
    let need = (b.l_max + b.k_max + b.deg_max + 1) as i64;
    if v.dir != Direction::Finite && hi - lo + 1 < need {
        return Err(Error::WindowTooSmall(format!("window [{lo}, {hi}] shorter than {need}")));
    }
    let var = v.name.clone();
    for l in 0..=b.l_max {
        for k in 0..=b.k_max {
            let clear = RationalFn::monomial(l as i64, k as i64, pole.clone()).numerator_series(&var);
            let q = mul(&clear, s)?;
            let qlo = q.var(0).lo.to_integer();
            let exact_below = q.var(0).dir == Direction::Finite;
            if qlo > 0 && !exact_below {
                continue;
            }
            let negative_clear = q.terms().all(|(e, _)| !e[0].is_negative());
            if !negative_clear {
                continue;
            }
            let top = q.var(0).hi.to_integer().max(0);
            let mut p = vec![Scalar::zero(); (top + 1) as usize];
            for (e, c) in q.terms() {
                p[e[0].to_integer() as usize] = c.clone();
            }
            trim(&mut p);
            if p.len() as i64 - 1 > (b.deg_max + l + k) as i64 {
                continue;
            }
            let f = RationalFn::new(p, l, k, pole.clone());
            let depth = if exact_below { i64::MAX } else { -qlo };
            let certainty = if exact_below {
                Certainty::Exact
            } else {
                match b.a_priori {
                    Some((la, ka)) if l <= la && k <= ka && lo <= -((la + ka) as i64) => Certainty::Exact,
                    _ => Certainty::VerifiedToDepth(depth),
                }
            };
            let back = f.iota_infinity_in(&var, field, (hi - lo).max(0) as u32 + 1)?;
            for e in lo..=hi {
                if back.coeff1(qi(e))? != s.coeff1(qi(e))? {
                    return Err(Error::InconsistentCertificate(format!("re-expansion differs at {var}^{e}")));
                }
            }
            return Ok(Recognized { f, l, k, depth, certainty });
        }
    }
    Err(Error::NoCandidate(format!("no (l, k) <= ({}, {}) clears the series", b.l_max, b.k_max)))
}

/// Checks the three-term expansion identity for f on |a|, |b| ≤ window.
pub fn verify_expansion_jacobi(field: &FieldConfig, f: &RationalFn, window: i64) -> Result<Vec<MonoCheck>> {
    let w = window;
    let depth_a = (f.deg() - f.l as i64 - f.k as i64 + 2 * w + 2).max(0) as u32;
    let a = f.iota_infinity_in("x", field, depth_a)?;
    let b = f.iota_zero_in("x", field, (w + f.l as i64 + 1) as u32)?;
    let c = f.shifted_iota_zero("x0", field, (w + f.k as i64 + 1) as u32)?;
    three_term_check(field, &a, &b, &c, f.pole(), w)
}

/// g(x1, x2)·(x1 − x2)^{−k} with g a Laurent polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFn2 {
    pub g: BTreeMap<(i64, i64), Scalar>,
    pub k: u32,
}

impl RationalFn2 {
    pub fn is_zero(&self) -> bool {
        self.g.is_empty()
    }

    pub fn render(&self, d: u32) -> String {
        let pole = format!("(x1 - x2)^-{}", self.k);
        if self.g.is_empty() {
            return "0".into();
        }
        let mut body = String::new();
        for (i, ((a, b), c)) in self.g.iter().enumerate() {
            let mut mono = Vec::new();
            for (name, e) in [("x1", *a), ("x2", *b)] {
                match e {
                    0 => {}
                    1 => mono.push(name.to_string()),
                    _ => mono.push(format!("{name}^{e}")),
                }
            }
            let mono = mono.join(" ");
            let (neg, cb, atomic) = c.render_parts(d);
            let text = match (mono.is_empty(), cb == "1") {
                (true, _) => cb,
                (false, true) => mono,
                (false, false) if atomic => format!("{cb} {mono}"),
                _ => format!("({cb}) {mono}"),
            };
            if i == 0 {
                if neg {
                    body.push('-');
                }
            } else {
                body.push_str(if neg { " - " } else { " + " });
            }
            body.push_str(&text);
        }
        match (self.k, body.as_str()) {
            (0, _) => body,
            (_, "1") => pole,
            _ if self.g.len() == 1 && !body.starts_with('-') => format!("{body} {pole}"),
            _ => format!("({body}) {pole}"),
        }
    }
}

impl Zero for RationalFn2 {
    fn zero() -> Self {
        RationalFn2 { g: BTreeMap::new(), k: 0 }
    }
    fn is_zero(&self) -> bool {
        self.g.is_empty()
    }
}

impl std::ops::Add for RationalFn2 {
    type Output = RationalFn2;
    fn add(self, other: Self) -> Self {
        assert_eq!(self.k, other.k, "sum of two-variable functions with different pole orders");
        let mut g = self.g;
        for (e, c) in other.g {
            let s = g.get(&e).map(|x| x.add(&c)).unwrap_or(c);
            if s.is_zero() {
                g.remove(&e);
            } else {
                g.insert(e, s);
            }
        }
        RationalFn2 { g, k: self.k }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::MonoStatus;

    fn field() -> FieldConfig {
        FieldConfig::formal(1).unwrap()
    }
    fn z() -> Scalar {
        Scalar::t_pow(1)
    }

    #[test]
    fn iota_examples() {
        let f = field();
        let r = RationalFn::monomial(0, -1, z());
        let inf = r.iota_infinity(&f, 6).unwrap();
        for i in 0..=6 {
            assert_eq!(inf.coeff1(qi(-1 - i)).unwrap(), z().pow(i).unwrap());
        }
        let zero = r.iota_zero(&f, 6).unwrap();
        for i in 0..=6 {
            assert_eq!(zero.coeff1(qi(i)).unwrap(), z().pow(-1 - i).unwrap().neg());
        }
        let cube = RationalFn::monomial(3, 0, z()).iota_infinity(&f, 4).unwrap();
        assert!(cube.coeff1(qi(3)).unwrap().is_one());
        assert_eq!(cube.len(), 1);
        let xm2 = RationalFn::monomial(-2, 0, z()).iota_zero(&f, 4).unwrap();
        assert!(xm2.coeff1(qi(-2)).unwrap().is_one());
        assert_eq!(xm2.len(), 1);
    }

    #[test]
    fn partial_fraction_oracle() {
        let f = field();
        let r = RationalFn::monomial(-1, -1, z());
        let inf = r.iota_infinity(&f, 8).unwrap();
        // (1/z)(1/(x−z) − 1/x): coefficient of x^{−1−i} is z^{i−1} for i ≥ 1.
        assert!(inf.coeff1(qi(-1)).unwrap().is_zero());
        for i in 1..=8 {
            assert_eq!(inf.coeff1(qi(-1 - i)).unwrap(), z().pow(i - 1).unwrap());
        }
    }

    #[test]
    fn recognition_examples() {
        let f = field();
        let b = RecognizeBounds { l_max: 3, k_max: 3, deg_max: 3, a_priori: None };
        let s = RationalFn::monomial(0, -1, z()).iota_infinity(&f, 12).unwrap();
        let r = recognize_from_upper(&f, &s, &z(), b).unwrap();
        assert_eq!(r.f, RationalFn::monomial(0, -1, z()));
        assert_eq!((r.l, r.k), (0, 1));

        let poly = TruncatedSeries::finite_from("x", [(qi(2), Scalar::one()), (qi(0), Scalar::from_int(3))]);
        let r = recognize_from_upper(&f, &poly, &z(), b).unwrap();
        assert_eq!(r.f.polynomial(), &[Scalar::from_int(3), Scalar::zero(), Scalar::one()]);
        assert_eq!(r.certainty, Certainty::Exact);

        let a = RationalFn::monomial(-1, 0, z()).iota_infinity(&f, 14).unwrap();
        let c = RationalFn::monomial(0, -2, z()).iota_infinity(&f, 14).unwrap();
        let sum = a.add(&c).unwrap();
        let r = recognize_from_upper(&f, &sum, &z(), b).unwrap();
        assert_eq!((r.l, r.k), (1, 2));
        let back = r.f.iota_infinity(&f, 12).unwrap();
        for e in -12..=0 {
            assert_eq!(back.coeff1(qi(e)).unwrap(), sum.coeff1(qi(e)).unwrap());
        }
    }

    #[test]
    fn recognition_is_honest() {
        let f = field();
        let two_z = z().scale_int(2);
        let s = RationalFn::monomial(0, -1, two_z).iota_infinity(&f, 16).unwrap();
        let b = RecognizeBounds { l_max: 3, k_max: 3, deg_max: 3, a_priori: None };
        assert!(matches!(recognize_from_upper(&f, &s, &z(), b), Err(Error::NoCandidate(_))));
        let short = RationalFn::monomial(0, -1, z()).iota_infinity(&f, 3).unwrap();
        assert!(matches!(recognize_from_upper(&f, &short, &z(), b), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn expansion_jacobi_examples() {
        let f = field();
        for r in [RationalFn::monomial(0, 0, z()), RationalFn::monomial(0, -1, z()), RationalFn::monomial(-1, 0, z())] {
            let checks = verify_expansion_jacobi(&f, &r, 8).unwrap();
            assert_eq!(checks.len(), 17 * 17);
            assert!(checks.iter().all(|c| c.status == MonoStatus::Pass), "{}", r.render(1));
        }
    }

    #[test]
    fn rendering() {
        assert_eq!(RationalFn::monomial(0, -1, z()).render(1), "(x - z)^-1");
        let mut g = BTreeMap::new();
        g.insert((0, 0), Scalar::one());
        assert_eq!(RationalFn2 { g, k: 2 }.render(1), "(x1 - x2)^-2");
    }
}
