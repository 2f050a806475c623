//! Graded spaces, vertex-operator oracles and axiom verifiers.

mod jacobi;
mod lie;
mod three_point;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::formal::{Coeff, Direction, TruncatedSeries};
use crate::scalars::{qi, Scalar, Q64};

pub use jacobi::{borcherds_check, BorcherdsOps, JacobiBox, JacobiReport, StdTriple};
pub use lie::{g_bracket, lie_act, normalize_lie, LieElement, LieMode};
pub use three_point::{three_point, ThreePoint};

/// A homogeneous basis vector: its weight and an instance-specific label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisKey {
    pub weight: Q64,
    pub label: Vec<u32>,
}

impl BasisKey {
    pub fn new(weight: Q64, label: Vec<u32>) -> Self {
        BasisKey { weight, label }
    }
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.label.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]@{}", parts.join(","), self.weight)
    }
}

/// A finite combination of basis vectors with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GradedVector(BTreeMap<BasisKey, Scalar>);

impl GradedVector {
    pub fn zero() -> Self {
        GradedVector(BTreeMap::new())
    }

    pub fn basis(key: BasisKey) -> Self {
        Self::term(key, Scalar::one())
    }

    pub fn term(key: BasisKey, c: Scalar) -> Self {
        let mut v = Self::zero();
        v.add_term(key, c);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisKey, &Scalar)> {
        self.0.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &BasisKey> {
        self.0.keys()
    }

    pub fn coeff(&self, k: &BasisKey) -> Scalar {
        self.0.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, key: BasisKey, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&key) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.0.remove(&key);
                } else {
                    *old = s;
                }
            }
            None => {
                self.0.insert(key, c);
            }
        }
    }

    /// self += s·other
    pub fn add_scaled(&mut self, other: &GradedVector, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (k, c) in &other.0 {
            self.add_term(k.clone(), c.mul(s));
        }
    }

    pub fn add(&self, other: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn sub(&self, other: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    pub fn scale(&self, s: &Scalar) -> GradedVector {
        if s.is_zero() {
            return Self::zero();
        }
        GradedVector(self.0.iter().map(|(k, c)| (k.clone(), c.mul(s))).collect())
    }

    /// The common weight of all components, if homogeneous and nonzero.
    pub fn weight(&self) -> Option<Q64> {
        let mut it = self.0.keys().map(|k| k.weight);
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    pub fn max_weight(&self) -> Option<Q64> {
        self.0.keys().map(|k| k.weight).max()
    }

    /// Pairing with `dual` read in the coordinate dual basis.
    pub fn pair(&self, dual: &GradedVector) -> Scalar {
        let (small, large) = if self.len() <= dual.len() { (self, dual) } else { (dual, self) };
        small.0.iter().fold(Scalar::zero(), |acc, (k, c)| match large.0.get(k) {
            Some(d) => acc.add(&c.mul(d)),
            None => acc,
        })
    }

    /// Components of weight `w`.
    pub fn component(&self, w: Q64) -> GradedVector {
        GradedVector(self.0.iter().filter(|(k, _)| k.weight == w).map(|(k, c)| (k.clone(), c.clone())).collect())
    }

    pub fn render(&self, d: u32) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self.0.iter().map(|(k, c)| format!("({}) {k}", c.render(d))).collect();
        parts.join(" + ")
    }
}

impl FromIterator<(BasisKey, Scalar)> for GradedVector {
    fn from_iter<I: IntoIterator<Item = (BasisKey, Scalar)>>(iter: I) -> Self {
        let mut v = GradedVector::zero();
        for (k, c) in iter {
            v.add_term(k, c);
        }
        v
    }
}

impl Coeff for GradedVector {
    fn zero() -> Self {
        GradedVector::zero()
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        GradedVector::add(self, other)
    }
    fn scale(&self, s: &Scalar) -> Self {
        GradedVector::scale(self, s)
    }
}

/// A graded space with finite-dimensional weight spaces up to a cutoff.
pub trait GradedSpace: Send + Sync {
    fn lowest_weight(&self) -> Q64;
    fn cutoff(&self) -> Q64;
    /// Basis of the weight-`w` space; empty off the weight lattice.
    fn basis_at(&self, w: Q64) -> Vec<BasisKey>;

    /// All basis vectors of weight at most `max`.
    fn basis_upto(&self, max: Q64) -> Vec<BasisKey> {
        let mut out = Vec::new();
        let mut w = self.lowest_weight();
        while w <= max && w <= self.cutoff() {
            out.extend(self.basis_at(w));
            w += qi(1);
        }
        out
    }
}

/// A vertex-operator map (algebra action, module action or intertwiner).
///
/// `raw_mode(u, n, w)` is the coefficient u_n w of x^{−n−1}; it must land in
/// weight wt u + wt w − n − 1. Callers go through [`mode`], which enforces
/// the grading and the cutoff.
pub trait VertexOperator: Send + Sync {
    fn raw_mode(&self, u: &BasisKey, n: Q64, w: &BasisKey) -> Result<GradedVector>;
    fn target_lowest(&self) -> Q64;
    fn target_cutoff(&self) -> Q64;
}

/// Checked mode u_n w for basis vectors.
pub fn mode(op: &dyn VertexOperator, u: &BasisKey, n: Q64, w: &BasisKey) -> Result<GradedVector> {
    let target = u.weight + w.weight - n - qi(1);
    let low = op.target_lowest();
    if target < low || !(target - low).is_integer() {
        return Ok(GradedVector::zero());
    }
    if target > op.target_cutoff() {
        return Err(Error::CutoffExceeded { weight: target.to_string(), cutoff: op.target_cutoff().to_string() });
    }
    let r = op.raw_mode(u, n, w)?;
    if let Some(bad) = r.keys().find(|k| k.weight != target) {
        return Err(Error::GradingViolation(format!("{u} mode {n} on {w} produced weight {} instead of {target}", bad.weight)));
    }
    Ok(r)
}

/// Checked mode extended bilinearly.
pub fn mode_vec(op: &dyn VertexOperator, u: &GradedVector, n: Q64, w: &GradedVector) -> Result<GradedVector> {
    let mut out = GradedVector::zero();
    for (ku, cu) in u.iter() {
        for (kw, cw) in w.iter() {
            let r = mode(op, ku, n, kw)?;
            out.add_scaled(&r, &cu.mul(cw));
        }
    }
    Ok(out)
}

/// The x^e coefficient of Y(u, x)w.
pub fn coeff_at(op: &dyn VertexOperator, u: &GradedVector, e: Q64, w: &GradedVector) -> Result<GradedVector> {
    mode_vec(op, u, -e - qi(1), w)
}

/// Vertex algebra data on top of its adjoint action.
pub trait Voa: VertexOperator + GradedSpace {
    fn vacuum(&self) -> BasisKey;
    fn omega(&self) -> GradedVector;
    fn rank(&self) -> Scalar;
}

/// L(n)w = ω_{n+1}w for the action `op` of the algebra `voa`.
pub fn virasoro_mode(voa: &dyn Voa, op: &dyn VertexOperator, n: i64, w: &GradedVector) -> Result<GradedVector> {
    mode_vec(op, &voa.omega(), qi(n + 1), w)
}

/// Y(u, x)w for homogeneous u, w on every certified exponent, as a lower series.
pub fn vertex_series(op: &dyn VertexOperator, u: &BasisKey, w: &BasisKey) -> Result<TruncatedSeries<GradedVector>> {
    let base = u.weight + w.weight;
    let lo = op.target_lowest() - base;
    let hi = op.target_cutoff() - base;
    let mut s = TruncatedSeries::univariate("x", Direction::Lower, lo, hi);
    let mut e = lo;
    while e <= hi {
        let c = mode(op, u, -e - qi(1), w)?;
        s.add_term(vec![e], c);
        e += qi(1);
    }
    Ok(s)
}

/// Outcome of a finite family of exact checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckReport {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(witness());
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
    }
}

/// ([L(m), L(n)] − (m−n)L(m+n) − δ_{m+n,0}(m³−m)/12·rank)·sample = 0.
pub fn verify_virasoro(voa: &dyn Voa, op: &dyn VertexOperator, m: i64, n: i64, sample: &GradedVector) -> Result<bool> {
    let lm_ln = virasoro_mode(voa, op, m, &virasoro_mode(voa, op, n, sample)?)?;
    let ln_lm = virasoro_mode(voa, op, n, &virasoro_mode(voa, op, m, sample)?)?;
    let mut lhs = lm_ln.sub(&ln_lm);
    lhs.add_scaled(&virasoro_mode(voa, op, m + n, sample)?, &Scalar::from_int(-(m - n)));
    if m + n == 0 {
        let c = voa.rank().scale_q(&num_rational::BigRational::new((m * m * m - m).into(), 12.into()));
        lhs.add_scaled(sample, &c.neg());
    }
    Ok(lhs.is_zero())
}

/// (L(−1)v)_n w = −n·v_{n−1}w for every n whose target weight is certified.
pub fn verify_derivative(voa: &dyn Voa, op: &dyn VertexOperator, v: &BasisKey, w: &BasisKey) -> Result<CheckReport> {
    let lv = mode_vec(voa, &voa.omega(), qi(0), &GradedVector::basis(v.clone()))?;
    let mut report = CheckReport::default();
    let base = v.weight + w.weight + qi(1);
    let mut target = op.target_lowest();
    while target <= op.target_cutoff() {
        let n = base - target - qi(1);
        let lhs = mode_vec(op, &lv, n, &GradedVector::basis(w.clone()))?;
        let rhs = mode(op, v, n - qi(1), w)?.scale(&Scalar::from_q64(-n));
        report.record(lhs == rhs, || format!("derivative v={v} w={w} n={n}"));
        target += qi(1);
    }
    Ok(report)
}

/// Vacuum axioms: Y(1, x)v = v and the creation property Y(v, x)1 = e^{xL(−1)}v.
pub fn verify_vacuum(voa: &dyn Voa, v: &BasisKey) -> Result<CheckReport> {
    let vac = voa.vacuum();
    let vv = GradedVector::basis(v.clone());
    let mut report = CheckReport::default();
    let s = vertex_series(voa, &vac, v)?;
    for (e, c) in s.terms() {
        let ok = if e[0].is_zero() { *c == vv } else { c.is_zero() };
        report.record(ok, || format!("Y(1,x){v} at x^{}", e[0]));
    }
    report.record(s.coeff1(qi(0))? == vv, || format!("Y(1,x){v} constant term"));
    let s = vertex_series(voa, v, &vac)?;
    let mut expect = vv.clone();
    let mut j = 0i64;
    while v.weight + qi(j) <= voa.cutoff() {
        if j > 0 {
            expect = virasoro_mode(voa, voa, -1, &expect)?.scale(&Scalar::from_rational(num_rational::BigRational::new(1.into(), j.into())));
        }
        let got = s.coeff1(qi(j))?;
        report.record(got == expect, || format!("Y({v},x)1 at x^{j}"));
        j += 1;
    }
    for (e, c) in s.terms() {
        if e[0].is_negative() {
            report.record(c.is_zero(), || format!("Y({v},x)1 has x^{}", e[0]));
        }
    }
    Ok(report)
}
