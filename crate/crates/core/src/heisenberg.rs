//! The rank-one Heisenberg vertex operator algebra M(1), its Fock modules
//! M(1, λ) and the intertwining operators M(1,λ) ⊗ M(1,μ) → M(1,λ+μ).
//!
//! A basis vector α(−n₁)⋯α(−n_k)𝟏_λ is a [`BasisKey`] whose label is the
//! partition (n₁ ≥ … ≥ n_k). Every vertex operator is computed by one
//! recursion on the first argument, starting from the exponential formula
//! for 𝒴(𝟏_λ, x).

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use parking_lot::RwLock;

use crate::error::{Error, Result};
use crate::scalars::{binom_i, q64, qi, Scalar, Q64};
use crate::voa_core::{BasisKey, GradedSpace, GradedVector, VertexOperator, Voa};

type Partition = Vec<u32>;
type FVec = BTreeMap<Partition, BigRational>;

fn big(q: Q64) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

fn add_into(v: &mut FVec, p: Partition, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let s = match v.remove(&p) {
        Some(old) => old + c,
        None => c,
    };
    if !s.is_zero() {
        v.insert(p, s);
    }
}

/// Partitions of n, each weakly decreasing, in lexicographically decreasing order.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn go(n: u32, max: u32, prefix: &mut Partition, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

fn insert_part(p: &[u32], part: u32) -> Partition {
    let mut q = p.to_vec();
    let pos = q.iter().position(|&x| x < part).unwrap_or(q.len());
    q.insert(pos, part);
    q
}

fn merge(a: &[u32], b: &[u32]) -> Partition {
    let mut q: Partition = a.iter().chain(b).copied().collect();
    q.sort_unstable_by(|x, y| y.cmp(x));
    q
}

/// α(n) on a partition vector of M(1, λ); n > 0 annihilates, n < 0 creates.
fn alpha_fvec(n: i64, lambda: &BigRational, v: &FVec) -> FVec {
    let mut out = FVec::new();
    for (p, c) in v {
        match n {
            0 => add_into(&mut out, p.clone(), c * lambda),
            n if n < 0 => add_into(&mut out, insert_part(p, (-n) as u32), c.clone()),
            n => {
                let n = n as u32;
                let mult = p.iter().filter(|&&x| x == n).count();
                if mult > 0 {
                    let pos = p.iter().position(|&x| x == n).expect("part present");
                    let mut q = p.clone();
                    q.remove(pos);
                    add_into(&mut out, q, c * BigRational::from_integer(BigInt::from(n as u64 * mult as u64)));
                }
            }
        }
    }
    out
}

/// Coefficients of [y^c] exp(s·Σ_{n>0} X_n y^n / n) as partitions of c.
fn exp_coeffs(s: &BigRational, c: u32) -> Vec<(Partition, BigRational)> {
    partitions(c)
        .into_iter()
        .map(|p| {
            let mut coef = BigRational::one();
            let mut i = 0;
            while i < p.len() {
                let n = p[i];
                let k = p[i..].iter().take_while(|&&x| x == n).count();
                for j in 1..=k {
                    coef = coef * s / BigRational::from_integer(BigInt::from(n as u64 * j as u64));
                }
                i += k;
            }
            (p, coef)
        })
        .collect()
}

/// Momentum λ with λ²/2 on the (1/D)ℤ lattice.
fn check_lattice(q: Q64, d: u32, what: &str) -> Result<()> {
    if (q * qi(d as i64)).is_integer() {
        Ok(())
    } else {
        Err(Error::IncompatibleD(format!("{what} = {q} is not in (1/{d})Z")))
    }
}

/// 𝒴 of type (M(1,λ+μ); M(1,λ) M(1,μ)) normalized by 𝒴(𝟏_λ, x)𝟏_μ = x^{λμ}𝟏_{λ+μ} + ….
pub struct FockIntertwiner {
    lambda: Q64,
    mu: Q64,
    cutoff: Q64,
    lam_big: BigRational,
    mu_big: BigRational,
    cache: RwLock<HashMap<(Partition, Q64, Partition), Arc<FVec>>>,
    out_cache: RwLock<HashMap<(Partition, Q64, Partition), GradedVector>>,
}

impl FockIntertwiner {
    pub fn new(lambda: Q64, mu: Q64, cutoff: Q64, d: u32) -> Result<Self> {
        check_lattice(lambda * mu, d, "λμ")?;
        for m in [lambda, mu, lambda + mu] {
            check_lattice(m * m / qi(2), d, "λ²/2")?;
        }
        Ok(FockIntertwiner {
            lambda,
            mu,
            cutoff,
            lam_big: big(lambda),
            mu_big: big(mu),
            cache: RwLock::new(HashMap::new()),
            out_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn lambda(&self) -> Q64 {
        self.lambda
    }

    pub fn mu(&self) -> Q64 {
        self.mu
    }

    fn lowest_target(&self) -> Q64 {
        let s = self.lambda + self.mu;
        s * s / qi(2)
    }

    fn weight_in(&self, momentum: Q64, p: &[u32]) -> Q64 {
        momentum * momentum / qi(2) + qi(p.iter().map(|&x| x as i64).sum())
    }

    /// Coefficient of x^e in 𝒴(u, x)w as a partition vector of M(1, λ+μ).
    fn coeff(&self, u: &[u32], e: Q64, w: &[u32]) -> Arc<FVec> {
        let key = (u.to_vec(), e, w.to_vec());
        if let Some(v) = self.cache.read().get(&key) {
            return v.clone();
        }
        let v = Arc::new(self.compute(u, e, w));
        self.cache.write().insert(key, v.clone());
        v
    }

    fn compute(&self, u: &[u32], e: Q64, w: &[u32]) -> FVec {
        let target = self.weight_in(self.lambda, u) + self.weight_in(self.mu, w) + e;
        let low = self.lowest_target();
        if target < low || !(target - low).is_integer() {
            return FVec::new();
        }
        if u.is_empty() {
            return self.vacuum_coeff(e, w);
        }
        let m = u[0] as i64;
        let rest = &u[1..];
        let mut out = FVec::new();
        let wt_rest = self.weight_in(self.lambda, rest) + self.weight_in(self.mu, w);
        // Σ_{i≥0} C(m+i−1, i) α(−m−i)·[x^{e−i}]𝒴(u′,x)w
        let mut i = 0i64;
        while wt_rest + e - qi(i) >= low {
            let inner = self.coeff(rest, e - qi(i), w);
            if !inner.is_empty() {
                let c = binom_i(m + i - 1, i as u64);
                for (p, x) in alpha_fvec(-m - i, &self.lam_big, &inner) {
                    add_into(&mut out, p, x * &c);
                }
            }
            i += 1;
        }
        // Σ_{i≥0} (−1)^{m+1} C(m+i−1, i)·[x^{e+m+i}]𝒴(u′,x)α(i)w
        let wvec: FVec = [(w.to_vec(), BigRational::one())].into_iter().collect();
        let top = w.first().copied().unwrap_or(0) as i64;
        for i in 0..=top {
            let aw = alpha_fvec(i, &self.mu_big, &wvec);
            if aw.is_empty() {
                continue;
            }
            let sign = if (m + 1) % 2 == 0 { 1 } else { -1 };
            let c = binom_i(m + i - 1, i as u64) * BigInt::from(sign);
            for (wp, wc) in aw {
                let inner = self.coeff(rest, e + qi(m + i), &wp);
                for (p, x) in inner.iter() {
                    add_into(&mut out, p.clone(), x * &wc * &c);
                }
            }
        }
        out
    }

    /// [x^e] E⁻(−λ,x)E⁺(−λ,x)e^λ x^{λα(0)} applied to w.
    fn vacuum_coeff(&self, e: Q64, w: &[u32]) -> FVec {
        let shift = e - self.lambda * self.mu;
        if !shift.is_integer() {
            return FVec::new();
        }
        let shift = shift.to_integer();
        let wsize: u32 = w.iter().sum();
        let mut out = FVec::new();
        let neg_lam = -self.lam_big.clone();
        for d in 0..=wsize {
            let c = shift + d as i64;
            if c < 0 {
                continue;
            }
            // Annihilation part of degree d applied to w.
            let mut annihilated = FVec::new();
            for (nu, coef) in exp_coeffs(&neg_lam, d) {
                let mut v: FVec = [(w.to_vec(), coef)].into_iter().collect();
                for &n in &nu {
                    v = alpha_fvec(n as i64, &self.mu_big, &v);
                    if v.is_empty() {
                        break;
                    }
                }
                for (p, x) in v {
                    add_into(&mut annihilated, p, x);
                }
            }
            if annihilated.is_empty() {
                continue;
            }
            for (nu, coef) in exp_coeffs(&self.lam_big, c as u32) {
                for (p, x) in &annihilated {
                    add_into(&mut out, merge(&nu, p), x * &coef);
                }
            }
        }
        out
    }

    fn to_graded(&self, v: &FVec) -> GradedVector {
        let s = self.lambda + self.mu;
        v.iter().map(|(p, c)| (BasisKey::new(self.weight_in(s, p), p.clone()), Scalar::from_rational(c.clone()))).collect()
    }
}

impl VertexOperator for FockIntertwiner {
    fn raw_mode(&self, u: &BasisKey, n: Q64, w: &BasisKey) -> Result<GradedVector> {
        let e = -n - qi(1);
        let key = (u.label.clone(), e, w.label.clone());
        if let Some(v) = self.out_cache.read().get(&key) {
            return Ok(v.clone());
        }
        let v = self.to_graded(&self.coeff(&u.label, e, &w.label));
        self.out_cache.write().insert(key, v.clone());
        Ok(v)
    }
    fn target_lowest(&self) -> Q64 {
        self.lowest_target()
    }
    fn target_cutoff(&self) -> Q64 {
        self.cutoff
    }
}

/// The Fock module M(1, λ) with its module action.
pub struct FockModule {
    lambda: Q64,
    cutoff: Q64,
    action: FockIntertwiner,
}

impl FockModule {
    pub fn new(lambda: Q64, cutoff: Q64, d: u32) -> Result<Self> {
        Ok(FockModule { lambda, cutoff, action: FockIntertwiner::new(qi(0), lambda, cutoff, d)? })
    }

    pub fn lambda(&self) -> Q64 {
        self.lambda
    }

    pub fn key(&self, p: &[u32]) -> BasisKey {
        BasisKey::new(self.lambda * self.lambda / qi(2) + qi(p.iter().map(|&x| x as i64).sum()), p.to_vec())
    }

    /// 𝟏_λ.
    pub fn top(&self) -> BasisKey {
        self.key(&[])
    }

    /// α(n) acting on a vector of this module.
    pub fn alpha(&self, n: i64, w: &GradedVector) -> Result<GradedVector> {
        let lam = big(self.lambda);
        let mut out = GradedVector::zero();
        for (k, c) in w.iter() {
            let target = k.weight - qi(n);
            if target < self.lowest_weight() {
                continue;
            }
            if target > self.cutoff {
                return Err(Error::CutoffExceeded { weight: target.to_string(), cutoff: self.cutoff.to_string() });
            }
            let v: FVec = [(k.label.clone(), BigRational::one())].into_iter().collect();
            for (p, x) in alpha_fvec(n, &lam, &v) {
                out.add_term(self.key(&p), Scalar::from_rational(x).mul(c));
            }
        }
        Ok(out)
    }

    /// Coordinate dual basis of the weight-`w` space; the pairing is [`GradedVector::pair`].
    pub fn contragredient_basis(&self, w: Q64) -> Vec<GradedVector> {
        self.basis_at(w).into_iter().map(GradedVector::basis).collect()
    }
}

impl GradedSpace for FockModule {
    fn lowest_weight(&self) -> Q64 {
        self.lambda * self.lambda / qi(2)
    }
    fn cutoff(&self) -> Q64 {
        self.cutoff
    }
    fn basis_at(&self, w: Q64) -> Vec<BasisKey> {
        let n = w - self.lowest_weight();
        if n < qi(0) || !n.is_integer() || w > self.cutoff {
            return Vec::new();
        }
        partitions(n.to_integer() as u32).into_iter().map(|p| self.key(&p)).collect()
    }
}

impl VertexOperator for FockModule {
    fn raw_mode(&self, u: &BasisKey, n: Q64, w: &BasisKey) -> Result<GradedVector> {
        self.action.raw_mode(u, n, w)
    }
    fn target_lowest(&self) -> Q64 {
        self.lowest_weight()
    }
    fn target_cutoff(&self) -> Q64 {
        self.cutoff
    }
}

/// M(1) with a = α(−1)𝟏, ω = ½α(−1)²𝟏 and rank 1.
pub struct Heisenberg {
    module: FockModule,
}

impl Heisenberg {
    pub fn new(cutoff: i64) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidArgument("the Heisenberg cutoff must be at least 2".into()));
        }
        Ok(Heisenberg { module: FockModule::new(qi(0), qi(cutoff), 1)? })
    }

    pub fn module(&self) -> &FockModule {
        &self.module
    }

    pub fn key(&self, p: &[u32]) -> BasisKey {
        self.module.key(p)
    }

    /// a = α(−1)𝟏.
    pub fn a(&self) -> BasisKey {
        self.key(&[1])
    }
}

impl GradedSpace for Heisenberg {
    fn lowest_weight(&self) -> Q64 {
        qi(0)
    }
    fn cutoff(&self) -> Q64 {
        self.module.cutoff
    }
    fn basis_at(&self, w: Q64) -> Vec<BasisKey> {
        self.module.basis_at(w)
    }
}

impl VertexOperator for Heisenberg {
    fn raw_mode(&self, u: &BasisKey, n: Q64, w: &BasisKey) -> Result<GradedVector> {
        self.module.raw_mode(u, n, w)
    }
    fn target_lowest(&self) -> Q64 {
        qi(0)
    }
    fn target_cutoff(&self) -> Q64 {
        self.module.cutoff
    }
}

impl Voa for Heisenberg {
    fn vacuum(&self) -> BasisKey {
        self.key(&[])
    }
    fn omega(&self) -> GradedVector {
        GradedVector::term(self.key(&[1, 1]), Scalar::from_q64(q64(1, 2)))
    }
    fn rank(&self) -> Scalar {
        Scalar::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voa_core::{mode, mode_vec, virasoro_mode};

    #[test]
    fn partition_counts() {
        let p: Vec<usize> = (0..=8).map(|n| partitions(n).len()).collect();
        assert_eq!(p, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
    }

    #[test]
    fn voa_examples() {
        let h = Heisenberg::new(8).unwrap();
        let om = h.omega();
        assert_eq!(om.weight(), Some(qi(2)));
        assert!(virasoro_mode(&h, &h, 1, &om).unwrap().is_zero());
        assert_eq!(virasoro_mode(&h, &h, 0, &om).unwrap(), om.scale(&Scalar::from_int(2)));
        assert_eq!(h.basis_at(qi(4)).len(), 5);
        let a = h.a();
        assert_eq!(mode(&h, &a, qi(1), &a).unwrap(), GradedVector::basis(h.vacuum()));
        assert!(mode(&h, &a, qi(0), &a).unwrap().is_zero());
        // L(−1)a = α(−2)𝟏.
        let la = virasoro_mode(&h, &h, -1, &GradedVector::basis(a.clone())).unwrap();
        assert_eq!(la, GradedVector::basis(h.key(&[2])));
        // a_{−1}a = α(−1)²𝟏.
        assert_eq!(mode(&h, &a, qi(-1), &a).unwrap(), GradedVector::basis(h.key(&[1, 1])));
        // ω_1 = L(0) on α(−2)α(−1)𝟏 gives weight 3.
        let v = GradedVector::basis(h.key(&[2, 1]));
        assert_eq!(mode_vec(&h, &om, qi(1), &v).unwrap(), v.scale(&Scalar::from_int(3)));
    }

    #[test]
    fn module_examples() {
        let m = FockModule::new(qi(1), qi(6), 2).unwrap();
        assert_eq!(m.lowest_weight(), q64(1, 2));
        assert!(FockModule::new(qi(1), qi(6), 1).is_err());
        let top = GradedVector::basis(m.top());
        assert!(m.alpha(1, &top).unwrap().is_zero());
        assert_eq!(m.alpha(0, &top).unwrap(), top);
        let x = m.alpha(-1, &top).unwrap();
        assert_eq!(m.alpha(1, &x).unwrap(), top);
        let h = Heisenberg::new(6).unwrap();
        let v = GradedVector::basis(h.key(&[2, 1]));
        assert_eq!(h.module().alpha(1, &v).unwrap(), GradedVector::basis(h.key(&[2])));
        for n in 0..=5 {
            assert_eq!(m.basis_at(q64(1, 2) + qi(n)).len(), partitions(n as u32).len());
        }
    }

    #[test]
    fn intertwiner_leading_term() {
        let y = FockIntertwiner::new(qi(1), qi(1), qi(6), 2).unwrap();
        let l1 = BasisKey::new(q64(1, 2), vec![]);
        let e = qi(1);
        let c = y.raw_mode(&l1, -e - qi(1), &l1).unwrap();
        assert_eq!(c, GradedVector::basis(BasisKey::new(qi(2), vec![])));
        assert!(y.raw_mode(&l1, qi(-1), &l1).unwrap().is_zero());
        // Next order: x^{λμ+1} coefficient is λα(−1)𝟏_{λ+μ}.
        let c1 = y.raw_mode(&l1, qi(-3), &l1).unwrap();
        assert_eq!(c1, GradedVector::basis(BasisKey::new(qi(3), vec![1])));
    }

    #[test]
    fn skew_case_is_exponential_of_l_minus_one() {
        let m = FockModule::new(qi(1), qi(6), 2).unwrap();
        let y = FockIntertwiner::new(qi(1), qi(0), qi(6), 2).unwrap();
        let h = Heisenberg::new(6).unwrap();
        let top = m.top();
        let mut expect = GradedVector::basis(top.clone());
        for j in 0..4i64 {
            let got = y.raw_mode(&top, qi(-j - 1), &h.vacuum()).unwrap();
            assert_eq!(got, expect, "x^{j}");
            let next = virasoro_mode(&h, &m, -1, &expect).unwrap();
            expect = next.scale(&Scalar::from_q64(q64(1, j + 1)));
        }
    }
}
