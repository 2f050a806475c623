//! Multivariate formal Laurent series known exactly on a window.
//!
//! Each variable carries a [`Direction`] and a window `[lo, hi]`. Inside the
//! window coefficients are exact; outside it they are either known to vanish
//! (below `lo` for lower/finite, above `hi` for upper/finite) or unknown.
//! Products are only formed when every coefficient is a finite sum, and the
//! result window is the largest one certified by the inputs.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalars::{binom_q, qi, FieldConfig, Scalar, Q64};

/// Coefficient types that form a module over [`Scalar`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
    fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Scalar::add(self, other)
    }
    fn scale(&self, s: &Scalar) -> Self {
        Scalar::mul(s, self)
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Zero below the window (an element of U((x))).
    Lower,
    /// Zero above the window (an element of U((x⁻¹))).
    Upper,
    /// Zero outside the window.
    Finite,
    /// Unknown on both sides.
    Bilateral,
}

impl Direction {
    fn zero_below(self) -> bool {
        matches!(self, Direction::Lower | Direction::Finite)
    }
    fn zero_above(self) -> bool {
        matches!(self, Direction::Upper | Direction::Finite)
    }
    fn from_flags(below: bool, above: bool) -> Self {
        match (below, above) {
            (true, true) => Direction::Finite,
            (true, false) => Direction::Lower,
            (false, true) => Direction::Upper,
            (false, false) => Direction::Bilateral,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarWindow {
    pub name: String,
    pub dir: Direction,
    pub lo: Q64,
    pub hi: Q64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Exact,
    KnownZero,
    Unknown,
}

impl VarWindow {
    pub fn status(&self, e: Q64) -> Status {
        if e >= self.lo && e <= self.hi {
            Status::Exact
        } else if (e < self.lo && self.dir.zero_below()) || (e > self.hi && self.dir.zero_above()) {
            Status::KnownZero
        } else {
            Status::Unknown
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C> {
    vars: Vec<VarWindow>,
    terms: BTreeMap<Vec<Q64>, C>,
}

impl<C: Coeff> TruncatedSeries<C> {
    pub fn new(vars: Vec<VarWindow>) -> Self {
        TruncatedSeries { vars, terms: BTreeMap::new() }
    }

    pub fn univariate(name: &str, dir: Direction, lo: Q64, hi: Q64) -> Self {
        Self::new(vec![VarWindow { name: name.to_string(), dir, lo, hi }])
    }

    /// A finite Laurent polynomial in one variable.
    pub fn finite_from<I: IntoIterator<Item = (Q64, C)>>(name: &str, terms: I) -> Self {
        let terms: Vec<(Q64, C)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let lo = terms.iter().map(|(e, _)| *e).min().unwrap_or(qi(0));
        let hi = terms.iter().map(|(e, _)| *e).max().unwrap_or(qi(0));
        let mut s = Self::univariate(name, Direction::Finite, lo, hi);
        for (e, c) in terms {
            s.add_term(vec![e], c);
        }
        s
    }

    pub fn vars(&self) -> &[VarWindow] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &VarWindow {
        &self.vars[i]
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Q64>, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn in_window(&self, e: &[Q64]) -> bool {
        self.vars.iter().zip(e).all(|(v, x)| *x >= v.lo && *x <= v.hi)
    }

    /// Accumulates `c` at exponent `e`; terms outside the window are dropped.
    pub fn add_term(&mut self, e: Vec<Q64>, c: C) {
        if c.is_zero() || !self.in_window(&e) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn status(&self, e: &[Q64]) -> Status {
        let mut st = Status::Exact;
        for (v, x) in self.vars.iter().zip(e) {
            match v.status(*x) {
                Status::Unknown => return Status::Unknown,
                Status::KnownZero => st = Status::KnownZero,
                Status::Exact => {}
            }
        }
        st
    }

    /// The exact coefficient at `e`, or a window error when it is not certified.
    pub fn coeff(&self, e: &[Q64]) -> Result<C> {
        match self.status(e) {
            Status::Unknown => Err(Error::WindowTooSmall(format!("exponent {e:?} outside certified window"))),
            Status::KnownZero => Ok(C::zero()),
            Status::Exact => Ok(self.terms.get(e).cloned().unwrap_or_else(C::zero)),
        }
    }

    pub fn coeff1(&self, e: Q64) -> Result<C> {
        self.coeff(&[e])
    }

    pub fn coeff_opt(&self, e: &[Q64]) -> Option<C> {
        self.coeff(e).ok()
    }

    fn check_vars(&self, other_vars: &[VarWindow]) -> Result<()> {
        let same = self.vars.len() == other_vars.len() && self.vars.iter().zip(other_vars).all(|(a, b)| a.name == b.name);
        if same {
            Ok(())
        } else {
            Err(Error::InvalidArgument("series over different variables".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(&other.vars)?;
        let mut vars = Vec::with_capacity(self.vars.len());
        for (a, b) in self.vars.iter().zip(&other.vars) {
            let below = a.dir.zero_below() && b.dir.zero_below();
            let above = a.dir.zero_above() && b.dir.zero_above();
            // Known region of each summand: (-inf if zero below else lo, +inf if zero above else hi).
            let klo = [a, b].iter().filter(|v| !v.dir.zero_below()).map(|v| v.lo).max();
            let khi = [a, b].iter().filter(|v| !v.dir.zero_above()).map(|v| v.hi).min();
            let lo = if below { a.lo.min(b.lo) } else { klo.expect("some side unknown below") };
            let hi = if above { a.hi.max(b.hi) } else { khi.expect("some side unknown above") };
            if lo > hi {
                return Err(Error::WindowTooSmall("sum has empty certified window".into()));
            }
            vars.push(VarWindow { name: a.name.clone(), dir: Direction::from_flags(below, above), lo, hi });
        }
        let mut out = Self::new(vars);
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::new(self.vars.clone());
        if s.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.scale(s));
        }
        out
    }

    /// Multiplies by the monomial `var^k`.
    pub fn shift(&self, var: usize, k: Q64) -> Self {
        let mut vars = self.vars.clone();
        vars[var].lo += k;
        vars[var].hi += k;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e[var] += k;
                (e, c.clone())
            })
            .collect();
        TruncatedSeries { vars, terms }
    }

    /// Narrows the window of one variable.
    pub fn restrict(&self, var: usize, lo: Q64, hi: Q64) -> Self {
        let mut vars = self.vars.clone();
        let v = &mut vars[var];
        if lo > v.lo {
            v.lo = lo;
            v.dir = Direction::from_flags(false, v.dir.zero_above());
        }
        if hi < v.hi {
            v.hi = hi;
            v.dir = Direction::from_flags(v.dir.zero_below(), false);
        }
        let mut out = Self::new(vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    /// Coefficient of `var⁻¹`, as a series in the remaining variables.
    pub fn residue(&self, var: usize) -> Result<Self> {
        let m1 = qi(-1);
        if self.vars[var].status(m1) == Status::Unknown {
            return Err(Error::WindowTooSmall(format!("exponent -1 of {} is not certified", self.vars[var].name)));
        }
        let mut vars = self.vars.clone();
        vars.remove(var);
        let mut out = Self::new(vars);
        for (e, c) in &self.terms {
            if e[var] == m1 {
                let mut e2 = e.clone();
                e2.remove(var);
                out.add_term(e2, c.clone());
            }
        }
        Ok(out)
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut vars = self.vars.clone();
        vars[var].lo -= qi(1);
        vars[var].hi -= qi(1);
        let mut out = Self::new(vars);
        for (e, c) in &self.terms {
            let k = e[var];
            if k.is_zero() {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= qi(1);
            out.add_term(e2, c.scale(&Scalar::from_q64(k)));
        }
        out
    }

    /// f(x) ↦ f(x + z0) for a series upper-truncated in its single variable.
    pub fn shift_upper(&self, z0: &Scalar) -> Result<Self> {
        if self.vars.len() != 1 || !self.vars[0].dir.zero_above() {
            return Err(Error::InvalidArgument("shift_upper needs a univariate upper-truncated series".into()));
        }
        let v = &self.vars[0];
        let polynomial = v.dir == Direction::Finite && v.lo.is_integer() && !v.lo.is_negative() && self.terms.keys().all(|e| e[0].is_integer());
        let mut out = if polynomial {
            Self::univariate(&v.name, Direction::Finite, qi(0), v.hi)
        } else {
            Self::univariate(&v.name, Direction::Upper, v.lo, v.hi)
        };
        let floor = out.vars[0].lo;
        for (e, a) in &self.terms {
            let n = e[0];
            let mut zp = Scalar::one();
            let mut j = 0u64;
            while n - qi(j as i64) >= floor {
                let c = binom_q(n, j);
                if !c.is_zero() {
                    out.add_term(vec![n - qi(j as i64)], a.scale(&zp.scale_q(&c)));
                }
                zp = zp.mul(z0);
                j += 1;
            }
        }
        Ok(out)
    }

    /// Substitutes var ↦ s·var (integral exponents only).
    pub fn rescale_var(&self, var: usize, s: &Scalar) -> Result<Self> {
        let mut out = Self::new(self.vars.clone());
        for (e, c) in &self.terms {
            if !e[var].is_integer() {
                return Err(Error::UnsupportedExponent(format!("rescaling x^{}", e[var])));
            }
            out.add_term(e.clone(), c.scale(&s.pow(e[var].to_integer())?));
        }
        Ok(out)
    }
}

fn mul_window(a: &VarWindow, b: &VarWindow) -> Result<VarWindow> {
    use Direction::*;
    let (dir, lo, hi) = match (a.dir, b.dir) {
        (Finite, Finite) => (Finite, a.lo + b.lo, a.hi + b.hi),
        (Finite, Lower) => (Lower, a.lo + b.lo, a.lo + b.hi),
        (Lower, Finite) => (Lower, a.lo + b.lo, b.lo + a.hi),
        (Finite, Upper) => (Upper, a.hi + b.lo, a.hi + b.hi),
        (Upper, Finite) => (Upper, b.hi + a.lo, a.hi + b.hi),
        (Finite, Bilateral) => (Bilateral, a.hi + b.lo, a.lo + b.hi),
        (Bilateral, Finite) => (Bilateral, b.hi + a.lo, b.lo + a.hi),
        (Lower, Lower) => (Lower, a.lo + b.lo, (a.hi + b.lo).min(b.hi + a.lo)),
        (Upper, Upper) => (Upper, (a.lo + b.hi).max(b.lo + a.hi), a.hi + b.hi),
        (x, y) => {
            return Err(Error::ProductExistence(format!(
                "{x:?} times {y:?} in variable {} has infinite coefficient sums",
                a.name
            )))
        }
    };
    if lo > hi {
        return Err(Error::WindowTooSmall(format!("product in {} has empty certified window", a.name)));
    }
    Ok(VarWindow { name: a.name.clone(), dir, lo, hi })
}

/// Product of a scalar series with a series of any coefficient type.
pub fn mul<C: Coeff>(a: &TruncatedSeries<Scalar>, b: &TruncatedSeries<C>) -> Result<TruncatedSeries<C>> {
    b.check_vars(&a.vars)?;
    let vars = a.vars.iter().zip(&b.vars).map(|(x, y)| mul_window(x, y)).collect::<Result<Vec<_>>>()?;
    let mut out = TruncatedSeries::new(vars);
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let e: Vec<Q64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if out.in_window(&e) {
                out.add_term(e, cb.scale(ca));
            }
        }
    }
    Ok(out)
}

impl TruncatedSeries<Scalar> {
    /// Textual form of a univariate scalar series: descending exponents for
    /// upper series, ascending otherwise.
    pub fn render(&self, d: u32) -> String {
        let mut items: Vec<(Q64, &Scalar)> = self.terms.iter().map(|(e, c)| (e[0], c)).collect();
        if self.vars.len() == 1 && self.vars[0].dir == Direction::Upper {
            items.reverse();
        }
        let var = self.vars.first().map(|v| v.name.as_str()).unwrap_or("x");
        render_terms(var, &items, d)
    }
}

fn render_terms(var: &str, items: &[(Q64, &Scalar)], d: u32) -> String {
    if items.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (e, c) in items {
        let mono = if e.is_zero() {
            String::new()
        } else if e.is_one() {
            var.to_string()
        } else {
            format!("{var}^{e}")
        };
        let (neg, body, atomic) = c.render_parts(d);
        let text = if mono.is_empty() {
            body
        } else if body == "1" {
            mono
        } else if atomic {
            format!("{body} {mono}")
        } else {
            format!("({body}) {mono}")
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&text);
    }
    out
}

/// The base of a binomial power.
#[derive(Clone, Debug)]
pub enum Base {
    /// v1 − v2, integral exponents only.
    Diff(String, String),
    /// v − c.
    VarMinus(String, Scalar),
    /// c + v.
    ScalarPlus(Scalar, String),
}

/// Which summand the expansion is in nonnegative powers of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpandIn {
    First,
    Second,
}

fn nonneg_integer(r: Q64) -> bool {
    r.is_integer() && !r.is_negative()
}

/// Binomial expansion of `base^r` to `depth` terms in the chosen direction.
///
/// - `VarMinus(x, c)` with `Second` is ι_{x;∞}: Σ C(r,i)(−c)^i x^{r−i}.
/// - `VarMinus(x, c)` with `First` is ι_{x;0}: Σ C(r,i)(−c)^{r−i} x^i.
pub fn binom_expand(field: &FieldConfig, base: &Base, r: Q64, dir: ExpandIn, depth: u32) -> Result<TruncatedSeries<Scalar>> {
    let finite = nonneg_integer(r);
    let n_terms = if finite { r.to_integer() as u64 + 1 } else { depth as u64 + 1 };
    let top = if finite { r } else { qi(depth as i64) };
    match base {
        Base::Diff(v1, v2) => {
            if !r.is_integer() {
                return Err(Error::UnsupportedExponent(format!("({v1} - {v2})^{r} needs an integral exponent")));
            }
            let (d1, w1, d2, w2) = if finite {
                (Direction::Finite, (qi(0), r), Direction::Finite, (qi(0), r))
            } else {
                match dir {
                    ExpandIn::Second => (Direction::Upper, (r - top, r), Direction::Lower, (qi(0), top)),
                    ExpandIn::First => (Direction::Lower, (qi(0), top), Direction::Upper, (r - top, r)),
                }
            };
            let mut s = TruncatedSeries::new(vec![
                VarWindow { name: v1.clone(), dir: d1, lo: w1.0, hi: w1.1 },
                VarWindow { name: v2.clone(), dir: d2, lo: w2.0, hi: w2.1 },
            ]);
            for i in 0..n_terms {
                let c = binom_q(r, i);
                let iq = qi(i as i64);
                let (e, sign_exp) = match dir {
                    ExpandIn::Second => (vec![r - iq, iq], i as i64),
                    ExpandIn::First => (vec![iq, r - iq], (r - iq).to_integer()),
                };
                let sign = if sign_exp.rem_euclid(2) == 0 { 1 } else { -1 };
                s.add_term(e, Scalar::from_rational(c).scale_int(sign));
            }
            Ok(s)
        }
        Base::VarMinus(v, c) => {
            let mc = c.neg();
            match dir {
                ExpandIn::Second => {
                    let (d, lo) = if finite { (Direction::Finite, qi(0)) } else { (Direction::Upper, r - top) };
                    let mut s = TruncatedSeries::univariate(v, d, lo, r);
                    let mut p = Scalar::one();
                    for i in 0..n_terms {
                        s.add_term(vec![r - qi(i as i64)], p.scale_q(&binom_q(r, i)));
                        p = p.mul(&mc);
                    }
                    Ok(s)
                }
                ExpandIn::First => {
                    let (d, hi) = if finite { (Direction::Finite, r) } else { (Direction::Lower, top) };
                    let mut s = TruncatedSeries::univariate(v, d, qi(0), hi);
                    for i in 0..n_terms {
                        let iq = qi(i as i64);
                        let coef = binom_q(r, i);
                        if coef.is_zero() {
                            continue;
                        }
                        let p = field.scalar_power(&mc, r - iq)?;
                        s.add_term(vec![iq], p.scale_q(&coef));
                    }
                    Ok(s)
                }
            }
        }
        Base::ScalarPlus(c, v) => match dir {
            ExpandIn::Second => {
                let (d, hi) = if finite { (Direction::Finite, r) } else { (Direction::Lower, top) };
                let mut s = TruncatedSeries::univariate(v, d, qi(0), hi);
                for i in 0..n_terms {
                    let iq = qi(i as i64);
                    let coef = binom_q(r, i);
                    if coef.is_zero() {
                        continue;
                    }
                    let p = field.scalar_power(c, r - iq)?;
                    s.add_term(vec![iq], p.scale_q(&coef));
                }
                Ok(s)
            }
            ExpandIn::First => {
                let (d, lo) = if finite { (Direction::Finite, qi(0)) } else { (Direction::Upper, r - top) };
                let mut s = TruncatedSeries::univariate(v, d, lo, r);
                let mut p = Scalar::one();
                for i in 0..n_terms {
                    s.add_term(vec![r - qi(i as i64)], p.scale_q(&binom_q(r, i)));
                    p = p.mul(c);
                }
                Ok(s)
            }
        },
    }
}

/// Outcome of one monomial comparison.
#[derive(Clone, Debug, PartialEq)]
pub enum MonoStatus {
    Pass,
    Fail { lhs: Scalar, rhs: Scalar },
    Unknown,
}

/// One monomial x0^a x^b of a three-term δ identity.
#[derive(Clone, Debug, PartialEq)]
pub struct MonoCheck {
    pub a: i64,
    pub b: i64,
    pub status: MonoStatus,
}

/// Checks, for |a|,|b| ≤ window, the coefficient of x0^a x^b in
///
/// x0⁻¹δ((x−z)/x0)·A(x) − x0⁻¹δ((z−x)/(−x0))·B(x) = z⁻¹δ((x−x0)/z)·C(x0)
///
/// where A is upper-truncated in x and B, C are lower-truncated. Each δ-term
/// is expanded slice by slice with [`binom_expand`]; cells outside the
/// certified windows of the inputs are reported as unknown.
pub fn three_term_check(
    field: &FieldConfig,
    a_ser: &TruncatedSeries<Scalar>,
    b_ser: &TruncatedSeries<Scalar>,
    c_ser: &TruncatedSeries<Scalar>,
    z: &Scalar,
    window: i64,
) -> Result<Vec<MonoCheck>> {
    let w = window;
    let xa = a_ser.var(0).name.clone();
    let x0 = c_ser.var(0).name.clone();
    let side = (2 * w + 1) as usize;
    let mut lhs: Vec<Option<Scalar>> = vec![None; side * side];
    let idx = |a: i64, b: i64| ((a + w) as usize) * side + (b + w) as usize;
    let a_hi = a_ser.var(0).hi;
    let b_lo = b_ser.var(0).lo;
    let c_lo = c_ser.var(0).lo;
    for a in -w..=w {
        let n = qi(-a - 1);
        let d1_depth = (n + a_hi + qi(w)).ceil().to_integer().max(0) as u32;
        let d1 = binom_expand(field, &Base::VarMinus(xa.clone(), z.clone()), n, ExpandIn::Second, d1_depth)?;
        let t1 = mul(&d1, a_ser).ok();
        let d2_depth = (qi(w) - b_lo).ceil().to_integer().max(0) as u32;
        let d2 = binom_expand(field, &Base::VarMinus(xa.clone(), z.clone()), n, ExpandIn::First, d2_depth)?;
        let t2 = mul(&d2, b_ser).ok();
        for b in -w..=w {
            let v1 = t1.as_ref().and_then(|s| s.coeff_opt(&[qi(b)]));
            let v2 = t2.as_ref().and_then(|s| s.coeff_opt(&[qi(b)]));
            if let (Some(v1), Some(v2)) = (v1, v2) {
                lhs[idx(a, b)] = Some(v1.sub(&v2));
            }
        }
    }
    let mut out = Vec::with_capacity(side * side);
    let mut rhs: Vec<Option<Scalar>> = vec![None; side * side];
    // The x^b slice of z⁻¹δ((x−x0)/z) is (z + x0)^{−b−1} expanded in x0.
    for b in -w..=w {
        let depth = (qi(w) - c_lo).ceil().to_integer().max(0) as u32;
        let d3 = binom_expand(field, &Base::ScalarPlus(z.clone(), x0.clone()), qi(-b - 1), ExpandIn::Second, depth)?;
        let t3 = mul(&d3, c_ser).ok();
        for a in -w..=w {
            rhs[idx(a, b)] = t3.as_ref().and_then(|s| s.coeff_opt(&[qi(a)]));
        }
    }
    for a in -w..=w {
        for b in -w..=w {
            let status = match (&lhs[idx(a, b)], &rhs[idx(a, b)]) {
                (Some(l), Some(r)) if l == r => MonoStatus::Pass,
                (Some(l), Some(r)) => MonoStatus::Fail { lhs: l.clone(), rhs: r.clone() },
                _ => MonoStatus::Unknown,
            };
            out.push(MonoCheck { a, b, status });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1() -> FieldConfig {
        FieldConfig::formal(1).unwrap()
    }

    fn z() -> Scalar {
        Scalar::t_pow(1)
    }

    fn geometric(n: i64) -> TruncatedSeries<Scalar> {
        let mut s = TruncatedSeries::univariate("x", Direction::Lower, qi(0), qi(n));
        for i in 0..=n {
            s.add_term(vec![qi(i)], Scalar::one());
        }
        s
    }

    #[test]
    fn geometric_times_one_minus_x() {
        let one_minus_x = TruncatedSeries::finite_from("x", [(qi(0), Scalar::one()), (qi(1), Scalar::from_int(-1))]);
        let p = mul(&one_minus_x, &geometric(10)).unwrap();
        assert_eq!(p.var(0).dir, Direction::Lower);
        assert_eq!((p.var(0).lo, p.var(0).hi), (qi(0), qi(10)));
        for e in 0..=10 {
            let expect = if e == 0 { Scalar::one() } else { Scalar::zero() };
            assert_eq!(p.coeff1(qi(e)).unwrap(), expect);
        }
        assert!(p.coeff1(qi(11)).is_err());
    }

    #[test]
    fn upper_geometric_times_x_minus_z() {
        let mut s = TruncatedSeries::univariate("x", Direction::Upper, qi(-11), qi(-1));
        for i in 0..=10 {
            s.add_term(vec![qi(-i - 1)], z().pow(i).unwrap());
        }
        let lin = TruncatedSeries::finite_from("x", [(qi(1), Scalar::one()), (qi(0), z().neg())]);
        let p = mul(&lin, &s).unwrap();
        assert_eq!((p.var(0).lo, p.var(0).hi), (qi(-10), qi(0)));
        for e in -10..=0 {
            let expect = if e == 0 { Scalar::one() } else { Scalar::zero() };
            assert_eq!(p.coeff1(qi(e)).unwrap(), expect);
        }
    }

    #[test]
    fn bilateral_products_refused() {
        let a = TruncatedSeries::<Scalar>::univariate("x", Direction::Bilateral, qi(-3), qi(3));
        assert!(matches!(mul(&a, &a), Err(Error::ProductExistence(_))));
        let u = TruncatedSeries::<Scalar>::univariate("x", Direction::Upper, qi(-3), qi(3));
        assert!(matches!(mul(&u, &geometric(3)), Err(Error::ProductExistence(_))));
    }

    #[test]
    fn iota_examples() {
        let f = f1();
        let inf = binom_expand(&f, &Base::VarMinus("x".into(), z()), qi(-1), ExpandIn::Second, 5).unwrap();
        for i in 0..=5 {
            assert_eq!(inf.coeff1(qi(-1 - i)).unwrap(), z().pow(i).unwrap());
        }
        let zero = binom_expand(&f, &Base::VarMinus("x".into(), z()), qi(-1), ExpandIn::First, 5).unwrap();
        for i in 0..=5 {
            assert_eq!(zero.coeff1(qi(i)).unwrap(), z().pow(-1 - i).unwrap().neg());
        }
        let sq1 = binom_expand(&f, &Base::VarMinus("x".into(), z()), qi(2), ExpandIn::Second, 0).unwrap();
        let sq2 = binom_expand(&f, &Base::VarMinus("x".into(), z()), qi(2), ExpandIn::First, 0).unwrap();
        assert_eq!(sq1, sq2);
        assert_eq!(sq1.coeff1(qi(1)).unwrap(), z().scale_int(-2));
        assert_eq!(sq1.coeff1(qi(0)).unwrap(), z().pow(2).unwrap());
    }

    #[test]
    fn residues() {
        let f = f1();
        let xinv = TruncatedSeries::finite_from("x", [(qi(-1), Scalar::one())]);
        assert!(xinv.residue(0).unwrap().coeff(&[]).unwrap().is_one());
        let inf = binom_expand(&f, &Base::VarMinus("x".into(), z()), qi(-1), ExpandIn::Second, 4).unwrap();
        assert!(inf.residue(0).unwrap().coeff(&[]).unwrap().is_one());
        let zero = binom_expand(&f, &Base::VarMinus("x".into(), z()), qi(-1), ExpandIn::First, 4).unwrap();
        assert!(zero.residue(0).unwrap().coeff(&[]).unwrap().is_zero());
        let narrow = TruncatedSeries::<Scalar>::univariate("x", Direction::Upper, qi(2), qi(5));
        assert!(matches!(narrow.residue(0), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn shift_examples() {
        let xinv = {
            let mut s = TruncatedSeries::univariate("x", Direction::Upper, qi(-8), qi(-1));
            s.add_term(vec![qi(-1)], Scalar::one());
            s
        };
        let sh = xinv.shift_upper(&z()).unwrap();
        for j in 0..=7 {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            assert_eq!(sh.coeff1(qi(-1 - j)).unwrap(), z().pow(j).unwrap().scale_int(sign));
        }
        let x2 = TruncatedSeries::finite_from("x", [(qi(2), Scalar::one())]);
        let sh2 = x2.shift_upper(&z()).unwrap();
        assert_eq!(sh2.coeff1(qi(1)).unwrap(), z().scale_int(2));
        assert_eq!(sh2.coeff1(qi(0)).unwrap(), z().pow(2).unwrap());
        assert!(sh2.coeff1(qi(-1)).unwrap().is_zero());
        let back = sh.shift_upper(&z().neg()).unwrap();
        for e in -8..=-1 {
            assert_eq!(back.coeff1(qi(e)).unwrap(), xinv.coeff1(qi(e)).unwrap());
        }
    }

    #[test]
    fn rendering_upper_series() {
        let f = f1();
        let inf = binom_expand(&f, &Base::VarMinus("x".into(), z()), qi(-1), ExpandIn::Second, 4).unwrap();
        assert_eq!(inf.render(1), "x^-1 + z x^-2 + z^2 x^-3 + z^3 x^-4 + z^4 x^-5");
    }

    #[test]
    fn delta_identity_small_window() {
        let f = f1();
        let one = |v: &str| TruncatedSeries::finite_from(v, [(qi(0), Scalar::one())]);
        let checks = three_term_check(&f, &one("x"), &one("x"), &one("x0"), &z(), 4).unwrap();
        assert!(checks.iter().all(|c| c.status == MonoStatus::Pass), "{checks:?}");
    }
}
