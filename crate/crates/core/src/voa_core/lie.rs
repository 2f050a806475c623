use std::collections::BTreeMap;

use super::{mode_vec, virasoro_mode, BasisKey, GradedVector, VertexOperator, Voa};
use crate::error::Result;
use crate::scalars::{binom_i, qi, Scalar};

/// The class u(m) of u ⊗ t^m in g(V).
#[derive(Clone, Debug, PartialEq)]
pub struct LieMode {
    pub u: GradedVector,
    pub m: i64,
}

/// A finite combination Σ c·b(m) of basis modes.
pub type LieElement = BTreeMap<(BasisKey, i64), Scalar>;

fn add_into(e: &mut LieElement, key: (BasisKey, i64), c: Scalar) {
    if c.is_zero() {
        return;
    }
    let s = e.get(&key).map(|x| x.add(&c)).unwrap_or(c);
    if s.is_zero() {
        e.remove(&key);
    } else {
        e.insert(key, s);
    }
}

/// Reduced row echelon rows (pivot, row, tag) with row[pivot] = 1.
struct Echelon {
    rows: Vec<(BasisKey, GradedVector, GradedVector)>,
    kernel: Vec<GradedVector>,
}

impl Echelon {
    fn build(input: Vec<(GradedVector, GradedVector)>) -> Self {
        let mut ech = Echelon { rows: Vec::new(), kernel: Vec::new() };
        for (row, tag) in input {
            let (row, tag) = ech.reduce(row, tag);
            let Some(pivot) = row.keys().max().cloned() else {
                ech.kernel.push(tag);
                continue;
            };
            let inv = row.coeff(&pivot).inv().expect("pivot is nonzero");
            let (row, tag) = (row.scale(&inv), tag.scale(&inv));
            for (_, r, t) in ech.rows.iter_mut() {
                let c = r.coeff(&pivot);
                if !c.is_zero() {
                    r.add_scaled(&row, &c.neg());
                    t.add_scaled(&tag, &c.neg());
                }
            }
            ech.rows.push((pivot, row, tag));
        }
        ech
    }

    /// Returns (remainder, Σ tags used).
    fn reduce(&self, mut y: GradedVector, mut tag: GradedVector) -> (GradedVector, GradedVector) {
        for (p, r, t) in &self.rows {
            let c = y.coeff(p);
            if !c.is_zero() {
                y.add_scaled(r, &c.neg());
                tag.add_scaled(t, &c.neg());
            }
        }
        (y, tag)
    }
}

fn l_minus_one_rows(voa: &dyn Voa, from: &[BasisKey]) -> Result<Vec<(GradedVector, GradedVector)>> {
    from.iter()
        .map(|b| {
            let v = GradedVector::basis(b.clone());
            Ok((virasoro_mode(voa, voa, -1, &v)?, v))
        })
        .collect()
}

/// Normal form modulo (L(−1)u)(m) = −m·u(m−1) and k(m) = 0 for k ∈ ker L(−1), m ≠ −1.
pub fn normalize_lie(voa: &dyn Voa, e: &LieElement) -> Result<LieElement> {
    let mut out = LieElement::new();
    let mut work: Vec<((BasisKey, i64), Scalar)> = e.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
    let mut cache: BTreeMap<num_rational::Ratio<i64>, (Echelon, Echelon)> = BTreeMap::new();
    while let Some(((key, m), c)) = work.pop() {
        let h = key.weight;
        if !cache.contains_key(&h) {
            let below = if h - qi(1) >= voa.lowest_weight() { voa.basis_at(h - qi(1)) } else { Vec::new() };
            let image = Echelon::build(l_minus_one_rows(voa, &below)?);
            let here = Echelon::build(l_minus_one_rows(voa, &voa.basis_at(h))?);
            let kernel = Echelon::build(here.kernel.iter().map(|k| (k.clone(), GradedVector::zero())).collect());
            cache.insert(h, (image, kernel));
        }
        let (image, kernel) = &cache[&h];
        let (rest, pre) = image.reduce(GradedVector::basis(key.clone()), GradedVector::zero());
        // y = L(−1)(−pre) + rest, so y(m) = m·pre(m−1) + rest(m).
        for (k, a) in pre.iter() {
            if m != 0 {
                work.push(((k.clone(), m - 1), a.mul(&c).scale_int(m)));
            }
        }
        let rest = if m != -1 { kernel.reduce(rest, GradedVector::zero()).0 } else { rest };
        for (k, a) in rest.iter() {
            add_into(&mut out, (k.clone(), m), a.mul(&c));
        }
    }
    Ok(out)
}

/// [u(m), v(n)] = Σ_{i≥0} C(m,i)(u_i v)(m+n−i), in normal form.
pub fn g_bracket(voa: &dyn Voa, a: &LieMode, b: &LieMode) -> Result<LieElement> {
    let mut out = LieElement::new();
    let max_w = |x: &GradedVector| x.max_weight().unwrap_or(qi(0));
    let i_top = (max_w(&a.u) + max_w(&b.u) - qi(1) - voa.lowest_weight()).floor().to_integer();
    for i in 0..=i_top.max(-1) {
        let c = Scalar::from_rational(binom_i(a.m, i as u64));
        if c.is_zero() {
            continue;
        }
        let prod = mode_vec(voa, &a.u, qi(i), &b.u)?;
        for (k, x) in prod.iter() {
            add_into(&mut out, (k.clone(), a.m + b.m - i), x.mul(&c));
        }
    }
    normalize_lie(voa, &out)
}

/// Action of a Lie element on a module vector through u(m) ↦ u_m.
pub fn lie_act(op: &dyn VertexOperator, e: &LieElement, w: &GradedVector) -> Result<GradedVector> {
    let mut out = GradedVector::zero();
    for ((k, m), c) in e {
        let r = mode_vec(op, &GradedVector::basis(k.clone()), qi(*m), w)?;
        out.add_scaled(&r, c);
    }
    Ok(out)
}
