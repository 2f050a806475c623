//! Opposite vertex operators, contragredient and full duals, and the
//! shifted and conjugated actions built from them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use parking_lot::RwLock;

use crate::error::{Error, Result};
use crate::formal::{Direction, TruncatedSeries};
use crate::scalars::{binom_i, qi, Scalar, Q64};
use crate::voa_core::{mode, mode_vec, virasoro_mode, BasisKey, BorcherdsOps, CheckReport, GradedSpace, GradedVector, VertexOperator, Voa};

fn inv_factorial(j: i64) -> Scalar {
    let mut f = BigRational::from_integer(1.into());
    for i in 2..=j {
        f /= BigRational::from_integer(i.into());
    }
    Scalar::from_rational(f)
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Terms (x-exponent, vector) of e^{xL(1)}(−x⁻²)^{L(0)}v.
pub fn insert_terms(voa: &dyn Voa, v: &GradedVector) -> Result<Vec<(i64, GradedVector)>> {
    let mut by_weight: BTreeMap<Q64, GradedVector> = BTreeMap::new();
    for (k, c) in v.iter() {
        by_weight.entry(k.weight).or_insert_with(GradedVector::zero).add_term(k.clone(), c.clone());
    }
    let mut out: BTreeMap<i64, GradedVector> = BTreeMap::new();
    for (h, comp) in by_weight {
        if !h.is_integer() {
            return Err(Error::UnsupportedExponent(format!("algebra weight {h}")));
        }
        let h = h.to_integer();
        let mut lj = comp;
        let mut j = 0i64;
        while !lj.is_zero() {
            let term = lj.scale(&inv_factorial(j).scale_int(sign(h)));
            let slot = out.entry(j - 2 * h).or_insert_with(GradedVector::zero);
            *slot = slot.add(&term);
            lj = virasoro_mode(voa, voa, 1, &lj)?;
            j += 1;
        }
    }
    Ok(out.into_iter().filter(|(_, v)| !v.is_zero()).collect())
}

/// e^{xL(1)}(−x⁻²)^{L(0)}v as a finite Laurent polynomial.
pub fn adjoint_insert(voa: &dyn Voa, v: &GradedVector) -> Result<TruncatedSeries<GradedVector>> {
    Ok(TruncatedSeries::finite_from("x", insert_terms(voa, v)?.into_iter().map(|(e, c)| (qi(e), c))))
}

/// Coefficient of x^{−s−1} in Σ_e x^e·R(u_e, x⁻¹) where R(u, x) = Σ_n f(u, n)x^{−n−1}.
///
/// With R = Y this is the opposite mode v^o_s; applied to an opposite
/// action it recovers the left action.
pub fn opposite_via(voa: &dyn Voa, v: &GradedVector, s: Q64, f: impl Fn(&GradedVector, Q64) -> Result<GradedVector>) -> Result<GradedVector> {
    let mut out = GradedVector::zero();
    for (e, u) in insert_terms(voa, v)? {
        out = out.add(&f(&u, -s - qi(2) - qi(e))?);
    }
    Ok(out)
}

/// The right action Y^o of V on a module W, optionally shifted to
/// Y^o(v, x + z0) with the shift expanded in nonnegative powers of z0.
///
/// With `transpose` set, W is the contragredient M′ of the module (op, space),
/// read in the coordinate dual basis, and Y^o on M′ is the transpose of Y_M.
#[derive(Clone)]
pub struct Opposite<'a> {
    pub voa: &'a dyn Voa,
    pub op: &'a dyn VertexOperator,
    pub space: &'a dyn GradedSpace,
    pub shift: Option<Scalar>,
    pub transpose: bool,
}

impl<'a> Opposite<'a> {
    pub fn new(voa: &'a dyn Voa, op: &'a dyn VertexOperator, space: &'a dyn GradedSpace) -> Self {
        Opposite { voa, op, space, shift: None, transpose: false }
    }

    /// Right action on the contragredient of (op, space).
    pub fn on_dual(voa: &'a dyn Voa, op: &'a dyn VertexOperator, space: &'a dyn GradedSpace) -> Self {
        Opposite { voa, op, space, shift: None, transpose: true }
    }

    pub fn shifted(&self, z0: Scalar) -> Self {
        Opposite { shift: if z0.is_zero() { None } else { Some(z0) }, ..self.clone() }
    }

    /// Smallest mode index that can act nontrivially on weight `ww`.
    pub fn s_floor(&self, h: Q64, ww: Q64) -> i64 {
        (self.op.target_lowest() - ww + h - qi(1)).ceil().to_integer()
    }

    fn plain(&self, v: &GradedVector, s: Q64, w: &GradedVector) -> Result<GradedVector> {
        if !self.transpose {
            return opposite_via(self.voa, v, s, |u, n| mode_vec(self.op, u, n, w));
        }
        let mut out = GradedVector::zero();
        for (kv, cv) in v.iter() {
            for (kw, cw) in w.iter() {
                let target = kw.weight - kv.weight + s + qi(1);
                if target > self.op.target_cutoff() {
                    return Err(Error::CutoffExceeded { weight: target.to_string(), cutoff: self.op.target_cutoff().to_string() });
                }
                for b in self.space.basis_at(target) {
                    let c = mode(self.op, kv, s, &b)?.coeff(kw);
                    out.add_term(b, c.mul(cv).mul(cw));
                }
            }
        }
        Ok(out)
    }

    /// v^o_s w, the coefficient of x^{−s−1}.
    pub fn mode(&self, v: &GradedVector, s: Q64, w: &GradedVector) -> Result<GradedVector> {
        let Some(z0) = &self.shift else {
            return self.plain(v, s, w);
        };
        let (Some(hmin), Some(wmax)) = (v.keys().map(|k| k.weight).min(), w.max_weight()) else {
            return Ok(GradedVector::zero());
        };
        if !s.is_integer() {
            return Err(Error::UnsupportedExponent(format!("shifted mode {s}")));
        }
        let s = s.to_integer();
        let floor = self.s_floor(hmin, wmax);
        let mut out = GradedVector::zero();
        let mut zp = Scalar::one();
        for k in 0..=(s - floor).max(-1) {
            let c = binom_i(k - s - 1, k as u64);
            if !c.is_zero() {
                out.add_scaled(&self.plain(v, qi(s - k), w)?, &zp.scale_q(&c));
            }
            zp = zp.mul(z0);
        }
        Ok(out)
    }

    pub fn mode_basis(&self, v: &BasisKey, s: i64, w: &BasisKey) -> Result<GradedVector> {
        self.mode(&GradedVector::basis(v.clone()), qi(s), &GradedVector::basis(w.clone()))
    }

    /// Y^o(v, x)w on every certified exponent, as an upper series.
    pub fn series(&self, v: &BasisKey, w: &BasisKey) -> Result<TruncatedSeries<GradedVector>> {
        let hi = -self.s_floor(v.weight, w.weight) - 1;
        let lo = (w.weight - v.weight - self.op.target_cutoff()).ceil().to_integer();
        let mut s = TruncatedSeries::univariate("x", Direction::Upper, qi(lo), qi(hi));
        for e in lo..=hi {
            s.add_term(vec![qi(e)], self.mode_basis(v, -e - 1, w)?);
        }
        Ok(s)
    }
}

/// The contragredient action Y′ on W′, read in the coordinate dual basis:
/// ⟨v′_n w′, w⟩ = ⟨w′, v^o_n w⟩.
pub struct Contragredient<'a> {
    pub opp: Opposite<'a>,
}

impl VertexOperator for Contragredient<'_> {
    fn raw_mode(&self, u: &BasisKey, n: Q64, w: &BasisKey) -> Result<GradedVector> {
        let target = u.weight + w.weight - n - qi(1);
        let uv = GradedVector::basis(u.clone());
        let mut out = GradedVector::zero();
        for b in self.opp.space.basis_at(target) {
            let c = self.opp.mode(&uv, n, &GradedVector::basis(b.clone()))?.coeff(w);
            out.add_term(b, c);
        }
        Ok(out)
    }
    fn target_lowest(&self) -> Q64 {
        self.opp.space.lowest_weight()
    }
    fn target_cutoff(&self) -> Q64 {
        self.opp.space.cutoff()
    }
}

type EvalFn<'a> = dyn Fn(&BasisKey) -> Result<Scalar> + Send + Sync + 'a;

/// An element of W*, given by its values on basis vectors, with an optional
/// certificate that it lies in W′.
#[derive(Clone)]
pub struct Functional<'a> {
    eval: Arc<EvalFn<'a>>,
    support: Option<GradedVector>,
}

impl fmt::Debug for Functional<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.support {
            Some(s) => write!(f, "Functional(restricted {})", s.render(1)),
            None => write!(f, "Functional(<evaluator>)"),
        }
    }
}

impl<'a> Functional<'a> {
    pub fn new(f: impl Fn(&BasisKey) -> Result<Scalar> + Send + Sync + 'a) -> Self {
        Functional { eval: Arc::new(f), support: None }
    }

    /// The element of W′ whose coordinates are those of `w`.
    pub fn restricted(w: GradedVector) -> Self {
        let ev = w.clone();
        Functional { eval: Arc::new(move |k| Ok(ev.coeff(k))), support: Some(w) }
    }

    pub fn zero() -> Self {
        Functional::restricted(GradedVector::zero())
    }

    /// The same functional with its successful evaluations cached.
    pub fn memoized(&self) -> Self {
        let inner = self.clone();
        let cache: RwLock<HashMap<BasisKey, Scalar>> = RwLock::new(HashMap::new());
        Functional {
            eval: Arc::new(move |k| {
                if let Some(c) = cache.read().get(k) {
                    return Ok(c.clone());
                }
                let c = inner.eval(k)?;
                cache.write().insert(k.clone(), c.clone());
                Ok(c)
            }),
            support: self.support.clone(),
        }
    }

    pub fn support(&self) -> Option<&GradedVector> {
        self.support.as_ref()
    }

    pub fn eval(&self, k: &BasisKey) -> Result<Scalar> {
        (self.eval)(k)
    }

    pub fn apply(&self, w: &GradedVector) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (k, c) in w.iter() {
            let a = self.eval(k)?;
            if !a.is_zero() {
                acc = acc.add(&a.mul(c));
            }
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Functional<'a>) -> Functional<'a> {
        let (a, b) = (self.clone(), other.clone());
        let support = match (&self.support, &other.support) {
            (Some(x), Some(y)) => Some(x.add(y)),
            _ => None,
        };
        Functional { eval: Arc::new(move |k| Ok(a.eval(k)?.add(&b.eval(k)?))), support }
    }

    pub fn scale(&self, s: &Scalar) -> Functional<'a> {
        let (a, s2) = (self.clone(), s.clone());
        Functional { eval: Arc::new(move |k| Ok(a.eval(k)?.mul(&s2))), support: self.support.as_ref().map(|x| x.scale(s)) }
    }
}

/// v*_s α, defined by ⟨v*_s α, w⟩ = ⟨α, v^o_s w⟩. A certificate on α is
/// carried over through Y′.
pub fn star_mode<'a>(opp: &Opposite<'a>, v: &GradedVector, s: Q64, alpha: &Functional<'a>) -> Result<Functional<'a>> {
    let support = match alpha.support() {
        Some(sup) if opp.shift.is_none() => {
            let y = Contragredient { opp: opp.clone() };
            Some(mode_vec(&y, v, s, sup)?)
        }
        _ => None,
    };
    let (o, vv, a) = (opp.clone(), v.clone(), alpha.clone());
    Ok(Functional {
        eval: Arc::new(move |k| a.apply(&o.mode(&vv, s, &GradedVector::basis(k.clone()))?)),
        support,
    })
}

/// ⟨Y*(v, x)α, w⟩ = ⟨α, Y^o(v, x)w⟩ on every certified exponent.
pub fn star_pairing(opp: &Opposite, v: &BasisKey, alpha: &Functional, w: &BasisKey) -> Result<TruncatedSeries<Scalar>> {
    let s = opp.series(v, w)?;
    let var = s.var(0).clone();
    let mut out = TruncatedSeries::univariate("x", var.dir, var.lo, var.hi);
    for (e, c) in s.terms() {
        out.add_term(e.clone(), alpha.apply(c)?);
    }
    Ok(out)
}

/// Opposite Jacobi data: u, v ∈ V acting on w ∈ W through Y^o (or a shift of it).
pub struct OppTriple<'a> {
    pub opp: Opposite<'a>,
    pub u: BasisKey,
    pub v: BasisKey,
    pub w: BasisKey,
}

impl BorcherdsOps for OppTriple<'_> {
    fn t1(&self, p: Q64, q: Q64) -> Result<GradedVector> {
        let inner = self.opp.mode(&GradedVector::basis(self.u.clone()), p, &GradedVector::basis(self.w.clone()))?;
        self.opp.mode(&GradedVector::basis(self.v.clone()), q, &inner)
    }
    fn t2(&self, p: Q64, q: Q64) -> Result<GradedVector> {
        let inner = self.opp.mode(&GradedVector::basis(self.v.clone()), p, &GradedVector::basis(self.w.clone()))?;
        self.opp.mode(&GradedVector::basis(self.u.clone()), q, &inner)
    }
    fn t3(&self, p: Q64, q: Q64) -> Result<GradedVector> {
        let inner = mode(self.opp.voa, &self.u, p, &self.v)?;
        self.opp.mode(&inner, q, &GradedVector::basis(self.w.clone()))
    }
    fn i_max(&self, l: i64, m: i64, n: Q64) -> (i64, i64, i64) {
        let (wu, wv, ww) = (self.u.weight, self.v.weight, self.w.weight);
        let n = n.to_integer();
        (
            l + m - self.opp.s_floor(wu, ww),
            l + n - self.opp.s_floor(wv, ww),
            (wu + wv - qi(l) - qi(1) - self.opp.voa.lowest_weight()).floor().to_integer(),
        )
    }
    fn in_range(&self, l: i64, m: i64, n: Q64) -> bool {
        let out = self.w.weight - self.u.weight - self.v.weight + qi(l + m) + n + qi(2);
        let low = self.opp.op.target_lowest();
        n.is_integer() && out >= low && out <= self.opp.op.target_cutoff()
    }
}

/// Y(e^{−z0(1+z0x)L(1)}(1+z0x)^{−2L(0)}v, x/(1+z0x))w, expanded in powers of z0,
/// on the exponents where e^{−z0L(1)}Y(v,x)e^{z0L(1)}w is certified.
pub fn conjugated_left(voa: &dyn Voa, op: &dyn VertexOperator, v: &BasisKey, w: &BasisKey, z0: &Scalar) -> Result<TruncatedSeries<GradedVector>> {
    let (lo, hi) = left_window(op, v, w);
    let mut s = TruncatedSeries::univariate("x", Direction::Lower, qi(lo), qi(hi));
    let h = v.weight.to_integer();
    let wv = GradedVector::basis(w.clone());
    let mut l1 = vec![GradedVector::basis(v.clone())];
    loop {
        let next = virasoro_mode(voa, voa, 1, l1.last().unwrap())?;
        if next.is_zero() {
            break;
        }
        l1.push(next);
    }
    let low = op.target_lowest();
    for e in lo..=hi {
        let mut acc = GradedVector::zero();
        for (j, u) in l1.iter().enumerate() {
            let j = j as i64;
            let cj = inv_factorial(j).mul(&z0.neg().pow(j)?);
            let mut k = 0i64;
            // Target weight of (L(1)^j v)_n w with n = k − e − 1 is h − j + wt w + e − k.
            while qi(h - j + e - k) + w.weight >= low {
                let n = k - e - 1;
                let c = binom_i(n + 1 + j - 2 * h, k as u64);
                if !c.is_zero() {
                    let term = mode_vec(op, u, qi(n), &wv)?;
                    acc.add_scaled(&term, &cj.mul(&z0.pow(k)?).scale_q(&c));
                }
                k += 1;
            }
        }
        s.add_term(vec![qi(e)], acc);
    }
    Ok(s)
}

fn left_window(op: &dyn VertexOperator, v: &BasisKey, w: &BasisKey) -> (i64, i64) {
    let base = v.weight + w.weight;
    ((op.target_lowest() - base).ceil().to_integer(), (op.target_cutoff() - base).floor().to_integer())
}

fn exp_l1(voa: &dyn Voa, op: &dyn VertexOperator, c: &Scalar, w: &GradedVector) -> Result<GradedVector> {
    let mut out = GradedVector::zero();
    let mut term = w.clone();
    let mut j = 0i64;
    while !term.is_zero() {
        out.add_scaled(&term, &inv_factorial(j).mul(&c.pow(j)?));
        term = virasoro_mode(voa, op, 1, &term)?;
        j += 1;
    }
    Ok(out)
}

/// Compares [`conjugated_left`] with e^{−z0L(1)}Y(v,x)e^{z0L(1)}w coefficientwise.
pub fn verify_conjugated_left(voa: &dyn Voa, op: &dyn VertexOperator, v: &BasisKey, w: &BasisKey, z0: &Scalar) -> Result<CheckReport> {
    let lhs = conjugated_left(voa, op, v, w, z0)?;
    let inner = exp_l1(voa, op, z0, &GradedVector::basis(w.clone()))?;
    let vv = GradedVector::basis(v.clone());
    let (lo, hi) = left_window(op, v, w);
    let mut report = CheckReport::default();
    for e in lo..=hi {
        let y = mode_vec(op, &vv, qi(-e - 1), &inner)?;
        let rhs = exp_l1(voa, op, &z0.neg(), &y)?;
        let got = lhs.coeff1(qi(e))?;
        report.record(got == rhs, || format!("conjugated action v={v} w={w} at x^{e}"));
    }
    Ok(report)
}

/// ⟨[u*_m, v*_n]α, w⟩ = Σ_i C(m,i)⟨(u_i v)*_{m+n−i}α, w⟩ for each sample w.
pub fn verify_star_commutator(
    opp: &Opposite,
    u: &BasisKey,
    v: &BasisKey,
    m: i64,
    n: i64,
    alpha: &Functional,
    samples: &[BasisKey],
) -> Result<CheckReport> {
    let uv = GradedVector::basis(u.clone());
    let vv = GradedVector::basis(v.clone());
    let mut report = CheckReport::default();
    for w in samples {
        let wv = GradedVector::basis(w.clone());
        let attempt = || -> Result<(Scalar, Scalar)> {
            let a = alpha.apply(&opp.mode(&vv, qi(n), &opp.mode(&uv, qi(m), &wv)?)?)?;
            let b = alpha.apply(&opp.mode(&uv, qi(m), &opp.mode(&vv, qi(n), &wv)?)?)?;
            let mut rhs = Scalar::zero();
            let top = (u.weight + v.weight - qi(1) - opp.voa.lowest_weight()).floor().to_integer();
            for i in 0..=top.max(-1) {
                let c = binom_i(m, i as u64);
                if c.is_zero() {
                    continue;
                }
                let uiv = mode(opp.voa, u, qi(i), v)?;
                rhs = rhs.add(&alpha.apply(&opp.mode(&uiv, qi(m + n - i), &wv)?)?.scale_q(&c));
            }
            Ok((a.sub(&b), rhs))
        };
        match attempt() {
            Ok((l, r)) => report.record(l == r, || format!("[{u}*_{m}, {v}*_{n}] on {w}")),
            Err(Error::CutoffExceeded { .. }) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// ω^o_1 = L(0) on every basis vector up to `max_weight`.
pub fn verify_omega_alignment(opp: &Opposite, max_weight: Q64) -> Result<CheckReport> {
    let om = opp.voa.omega();
    let mut report = CheckReport::default();
    for b in opp.space.basis_upto(max_weight) {
        let wv = GradedVector::basis(b.clone());
        let lhs = opp.mode(&om, qi(1), &wv)?;
        let rhs = virasoro_mode(opp.voa, opp.op, 0, &wv)?;
        report.record(lhs == rhs, || format!("omega alignment on {b}"));
    }
    Ok(report)
}

/// Y^o(L(−1)v, x) = d/dx Y^o(v, x) and [L^o(−1), Y^o(v, x)] = −d/dx Y^o(v, x) on a sample,
/// where L^o(−1) = ω^o_0 is the translation operator of the right action.
pub fn verify_opposite_derivative(opp: &Opposite, v: &BasisKey, w: &BasisKey) -> Result<CheckReport> {
    let vv = GradedVector::basis(v.clone());
    let wv = GradedVector::basis(w.clone());
    let lv = virasoro_mode(opp.voa, opp.voa, -1, &vv)?;
    let om = opp.voa.omega();
    let lw = opp.mode(&om, qi(0), &wv)?;
    let mut report = CheckReport::default();
    let lo = opp.s_floor(v.weight, w.weight);
    let hi = (opp.op.target_cutoff() - w.weight + v.weight - qi(2)).floor().to_integer();
    for s in lo..=hi {
        let d = opp.mode(&vv, qi(s - 1), &wv)?.scale(&Scalar::from_int(s));
        let a = opp.mode(&lv, qi(s), &wv)?;
        report.record(a.add(&d).is_zero(), || format!("Y^o(L(-1){v}) at mode {s}"));
        let b = opp.mode(&om, qi(0), &opp.mode(&vv, qi(s), &wv)?)?.sub(&opp.mode(&vv, qi(s), &lw)?);
        report.record(b == d, || format!("[L^o(-1), Y^o({v})] on {w} at mode {s}"));
    }
    Ok(report)
}

/// Outcome of a bounded D(W) membership test.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub pass: bool,
    /// Largest k with a nonzero x^{−k} coefficient seen.
    pub pole_order: i64,
    pub checked: usize,
    pub witness: Option<String>,
}

/// Checks that ⟨α, Y^o(v, x)w⟩ has no nonzero coefficient below x^{−depth}
/// for every test vector v and basis w up to `pairing_weight`.
pub fn dw_membership(opp: &Opposite, alpha: &Functional, tests: &[BasisKey], depth: i64, pairing_weight: Q64) -> Result<MembershipReport> {
    let mut rep = MembershipReport { pass: true, pole_order: i64::MIN, checked: 0, witness: None };
    let support: Option<Vec<Q64>> = alpha.support().map(|s| {
        let mut ws: Vec<Q64> = s.keys().map(|k| k.weight).collect();
        ws.dedup();
        ws
    });
    for v in tests {
        for w in opp.space.basis_upto(pairing_weight) {
            let lo = opp.s_floor(v.weight, w.weight);
            let hi = (opp.op.target_cutoff() - w.weight + v.weight - qi(1)).floor().to_integer();
            for s in lo..=hi {
                let target = w.weight - v.weight + qi(s + 1);
                if let Some(ws) = &support {
                    if !ws.contains(&target) {
                        continue;
                    }
                }
                let c = alpha.apply(&opp.mode_basis(v, s, &w)?)?;
                rep.checked += 1;
                if c.is_zero() {
                    continue;
                }
                let e = -s - 1;
                rep.pole_order = rep.pole_order.max(-e);
                if e < -depth && rep.pass {
                    rep.pass = false;
                    rep.witness = Some(format!("v={v} w={w}: coefficient of x^{e} is {}", c.render(1)));
                }
            }
        }
    }
    if rep.pole_order == i64::MIN {
        rep.pole_order = 0;
    }
    Ok(rep)
}

/// Deterministic functional with values in {−3, …, 3} spread over all weights,
/// used to probe identities on the full dual.
pub fn probe_functional<'a>() -> Functional<'a> {
    Functional::new(|k: &BasisKey| {
        let mut h: i64 = 17 + 7 * k.weight.numer() + 3 * k.weight.denom();
        for (i, p) in k.label.iter().enumerate() {
            h = (h * 31 + (i as i64 + 1) * *p as i64) % 1_000_003;
        }
        Ok(Scalar::from_int(h.rem_euclid(7) - 3))
    })
}
