use rayon::prelude::*;

use super::{mode, mode_vec, BasisKey, GradedVector, VertexOperator};
use crate::error::{Error, Result};
use crate::scalars::{binom_i, qi, Scalar, Q64};

/// The three operator products of a Jacobi identity, read through its
/// component (Borcherds) form
///
/// Σ_i (−1)^i C(l,i)[T1(l+m−i, n+i) − (−1)^l T2(l+n−i, m+i)] = Σ_i C(m,i) T3(l+i, m+n−i).
pub trait BorcherdsOps: Sync {
    /// u_p v_q w (or its opposite-order analogue).
    fn t1(&self, p: Q64, q: Q64) -> Result<GradedVector>;
    /// v_p u_q w.
    fn t2(&self, p: Q64, q: Q64) -> Result<GradedVector>;
    /// (u_p v)_q w.
    fn t3(&self, p: Q64, q: Q64) -> Result<GradedVector>;
    /// Largest i that can contribute to the T1, T2 and T3 sums.
    fn i_max(&self, l: i64, m: i64, n: Q64) -> (i64, i64, i64);
    /// Whether the monomial's output weight lies in the certified range.
    fn in_range(&self, l: i64, m: i64, n: Q64) -> bool;
}

/// Box of monomials: l, m ∈ [−w, w], n ∈ n0 + [−w, w].
#[derive(Clone, Copy, Debug)]
pub struct JacobiBox {
    pub window: i64,
    pub n0: Q64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct JacobiReport {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<(i64, i64, Q64)>,
}

impl JacobiReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
    pub fn merge(&mut self, o: JacobiReport) {
        self.checked += o.checked;
        self.skipped += o.skipped;
        self.failures.extend(o.failures);
    }
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn one_monomial(ops: &dyn BorcherdsOps, l: i64, m: i64, n: Q64) -> Result<bool> {
    let (i1, i2, i3) = ops.i_max(l, m, n);
    let mut lhs = GradedVector::zero();
    for i in 0..=i1.max(i2) {
        let c = Scalar::from_rational(binom_i(l, i as u64)).scale_int(sign(i));
        if c.is_zero() {
            continue;
        }
        if i <= i1 {
            lhs.add_scaled(&ops.t1(qi(l + m - i), n + qi(i))?, &c);
        }
        if i <= i2 {
            lhs.add_scaled(&ops.t2(qi(l - i) + n, qi(m + i))?, &c.scale_int(-sign(l)));
        }
    }
    let mut rhs = GradedVector::zero();
    for i in 0..=i3 {
        let c = Scalar::from_rational(binom_i(m, i as u64));
        if !c.is_zero() {
            rhs.add_scaled(&ops.t3(qi(l + i), qi(m - i) + n)?, &c);
        }
    }
    Ok(lhs == rhs)
}

/// Checks every monomial of the box whose output weight is certified.
/// Monomials that need a weight above the cutoff are counted as skipped.
pub fn borcherds_check(ops: &dyn BorcherdsOps, bx: JacobiBox) -> Result<JacobiReport> {
    let w = bx.window;
    let monos: Vec<(i64, i64, Q64)> = (-w..=w)
        .flat_map(|l| (-w..=w).flat_map(move |m| (-w..=w).map(move |k| (l, m, bx.n0 + qi(k)))))
        .filter(|&(l, m, n)| ops.in_range(l, m, n))
        .collect();
    let results: Vec<Result<Option<bool>>> = monos
        .par_iter()
        .map(|&(l, m, n)| match one_monomial(ops, l, m, n) {
            Ok(ok) => Ok(Some(ok)),
            Err(Error::CutoffExceeded { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let mut report = JacobiReport::default();
    for (mono, r) in monos.into_iter().zip(results) {
        match r? {
            Some(true) => report.checked += 1,
            Some(false) => {
                report.checked += 1;
                report.failures.push(mono);
            }
            None => report.skipped += 1,
        }
    }
    Ok(report)
}

/// Jacobi data for u ∈ V acting on an intertwiner of type (W3; W1 W2) with
/// v ∈ W1, w ∈ W2. The algebra and module cases take W1 = V and 𝒴 = Y.
pub struct StdTriple<'a> {
    /// Y on W3.
    pub y3: &'a dyn VertexOperator,
    /// 𝒴: W1 ⊗ W2 → W3.
    pub yv: &'a dyn VertexOperator,
    /// Y on W2.
    pub y2: &'a dyn VertexOperator,
    /// Y on W1.
    pub y1: &'a dyn VertexOperator,
    /// Lowest weights of W1 and W2.
    pub low1: Q64,
    pub low2: Q64,
    pub u: BasisKey,
    pub v: BasisKey,
    pub w: BasisKey,
}

fn floor_i(q: Q64) -> i64 {
    q.floor().to_integer()
}

impl BorcherdsOps for StdTriple<'_> {
    fn t1(&self, p: Q64, q: Q64) -> Result<GradedVector> {
        let inner = mode(self.yv, &self.v, q, &self.w)?;
        mode_vec(self.y3, &GradedVector::basis(self.u.clone()), p, &inner)
    }
    fn t2(&self, p: Q64, q: Q64) -> Result<GradedVector> {
        let inner = mode(self.y2, &self.u, q, &self.w)?;
        mode_vec(self.yv, &GradedVector::basis(self.v.clone()), p, &inner)
    }
    fn t3(&self, p: Q64, q: Q64) -> Result<GradedVector> {
        let inner = mode(self.y1, &self.u, p, &self.v)?;
        mode_vec(self.yv, &inner, q, &GradedVector::basis(self.w.clone()))
    }
    fn i_max(&self, l: i64, m: i64, n: Q64) -> (i64, i64, i64) {
        let (wu, wv, ww) = (self.u.weight, self.v.weight, self.w.weight);
        let low3 = self.yv.target_lowest();
        let one = qi(1);
        (
            floor_i(wv + ww - n - one - low3),
            floor_i(wu + ww - qi(m) - one - self.low2),
            floor_i(wu + wv - qi(l) - one - self.low1),
        )
    }
    fn in_range(&self, l: i64, m: i64, n: Q64) -> bool {
        let out = self.u.weight + self.v.weight + self.w.weight - qi(l + m) - n - qi(2);
        let low = self.yv.target_lowest();
        out >= low && out <= self.yv.target_cutoff() && (out - low).is_integer()
    }
}
