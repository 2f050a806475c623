use std::collections::BTreeMap;

use super::{mode, mode_vec, BasisKey, CheckReport, GradedVector, VertexOperator};
use crate::error::{Error, Result};
use crate::ratfun::RationalFn2;
use crate::scalars::{binom_i, qi, Scalar, Q64};

#[derive(Clone, Debug, PartialEq)]
pub struct ThreePoint {
    pub f: RationalFn2,
    pub report: CheckReport,
}

fn int(q: Q64, what: &str) -> Result<i64> {
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(Error::UnsupportedExponent(format!("{what} = {q} is not integral")))
    }
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Recognizes ⟨w′, Y(u,x1)Y(v,x2)w⟩ as g(x1,x2)/(x1−x2)^k and checks the
/// opposite-order expansion and the iterate against it.
///
/// `y_alg` is the adjoint action of V, `y_mod` its action on the module of
/// w; `dual` is read in the coordinate dual basis and must be homogeneous.
pub fn three_point(
    y_alg: &dyn VertexOperator,
    y_mod: &dyn VertexOperator,
    dual: &GradedVector,
    u: &BasisKey,
    v: &BasisKey,
    w: &BasisKey,
    k_max: u32,
) -> Result<ThreePoint> {
    let hd = dual.weight().ok_or_else(|| Error::InvalidArgument("dual vector must be homogeneous and nonzero".into()))?;
    let low = y_mod.target_lowest();
    let cut = y_mod.target_cutoff();
    let (wu, wv, ww) = (u.weight, v.weight, w.weight);
    let s = int(wu + wv + ww - hd - qi(2), "mode sum")?;
    let dg = -s - 2;
    // x2 exponents b = −q−1 of the |x1| > |x2| expansion.
    let b_lo = int(low - wv - ww, "x2 exponent")?;
    let b_hi = int(cut - wv - ww, "x2 exponent")?;
    let e1min = int(low - wu - ww, "x1 exponent")?;
    let wvec = GradedVector::basis(w.clone());
    let uvec = GradedVector::basis(u.clone());
    let vvec = GradedVector::basis(v.clone());
    let mut c = BTreeMap::new();
    for b in b_lo..=b_hi {
        let q = qi(-b - 1);
        let p = qi(s) - q;
        let inner = mode(y_mod, v, q, w)?;
        c.insert(b, mode_vec(y_mod, &uvec, p, &inner)?.pair(dual));
    }
    let coef = |b: i64| c.get(&b).cloned().unwrap_or_else(Scalar::zero);

    let mut found = None;
    for k in 0..=k_max as i64 {
        let btop = dg + k - e1min;
        if b_hi <= btop {
            return Err(Error::WindowTooSmall(format!("cutoff leaves no room to verify pole order {k}")));
        }
        let prod = |b: i64| {
            (0..=k).fold(Scalar::zero(), |acc, j| acc.add(&coef(b - j).scale_q(&binom_i(k, j as u64)).scale_int(sign(j))))
        };
        if ((btop + 1)..=b_hi).all(|b| prod(b).is_zero()) {
            let mut g = BTreeMap::new();
            for b in b_lo..=btop {
                let x = prod(b);
                if !x.is_zero() {
                    g.insert((dg + k - b, b), x);
                }
            }
            found = Some(RationalFn2 { g, k: k as u32 });
            break;
        }
    }
    let f = found.ok_or_else(|| Error::NoCandidate(format!("no pole order <= {k_max} at x1 = x2")))?;
    let k = f.k as i64;
    let mut report = CheckReport::default();

    // Commutativity: ⟨w′, Y(v,x2)Y(u,x1)w⟩ is lower in x1.
    let a_hi = int(cut - wu - ww, "x1 exponent")?;
    for a in e1min..=a_hi {
        let b = dg - a;
        let p = qi(-a - 1);
        let q = qi(-b - 1);
        let inner = mode(y_mod, u, p, w)?;
        let got = mode_vec(y_mod, &vvec, q, &inner)?.pair(dual);
        let mut expect = Scalar::zero();
        for ((a1, b1), gc) in &f.g {
            let i = a - a1;
            if i >= 0 && b == b1 - k - i {
                let cf = Scalar::from_rational(binom_i(-k, i as u64)).scale_int(sign(k + i));
                expect = expect.add(&gc.mul(&cf));
            }
        }
        report.record(got == expect, || format!("commutativity at x1^{a} x2^{b}"));
    }

    // Associativity: ⟨w′, Y(Y(u,x0)v,x2)w⟩ against f(x0+x2, x2) at |x2| > |x0|.
    let c0_lo = int(-wu - wv, "x0 exponent")?;
    let c0_hi = int(y_alg.target_cutoff() - wu - wv, "x0 exponent")?;
    for c0 in c0_lo..=c0_hi {
        let c2 = dg - c0;
        let r = qi(-c0 - 1);
        let sidx = qi(-c2 - 1);
        let inner = match mode_vec(y_alg, &uvec, r, &vvec) {
            Ok(x) => x,
            Err(Error::CutoffExceeded { .. }) => {
                report.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let got = mode_vec(y_mod, &inner, sidx, &wvec)?.pair(dual);
        let i = c0 + k;
        let mut expect = Scalar::zero();
        if i >= 0 {
            for ((a1, b1), gc) in &f.g {
                if a1 - i + b1 == c2 {
                    expect = expect.add(&gc.scale_q(&binom_i(*a1, i as u64)));
                }
            }
        }
        report.record(got == expect, || format!("associativity at x0^{c0} x2^{c2}"));
    }
    Ok(ThreePoint { f, report })
}
