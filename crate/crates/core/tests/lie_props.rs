use proptest::prelude::*;
use vreg_core::error::Error;
use vreg_core::heisenberg::Heisenberg;
use vreg_core::scalars::{qi, Scalar};
use vreg_core::voa_core::{g_bracket, lie_act, mode, normalize_lie, BasisKey, GradedSpace, GradedVector, LieElement, LieMode, Voa};

fn bracket_elem(h: &Heisenberg, a: &LieElement, b: &LieElement) -> LieElement {
    let mut out = LieElement::new();
    for ((ka, ma), ca) in a {
        for ((kb, mb), cb) in b {
            let r = g_bracket(h, &LieMode { u: GradedVector::basis(ka.clone()), m: *ma }, &LieMode { u: GradedVector::basis(kb.clone()), m: *mb })
                .unwrap();
            for (k, c) in r {
                let s = out.get(&k).cloned().unwrap_or_else(Scalar::zero).add(&c.mul(ca).mul(cb));
                out.insert(k, s);
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    normalize_lie(h, &out).unwrap()
}

fn single(k: &BasisKey, m: i64) -> LieElement {
    LieElement::from([((k.clone(), m), Scalar::one())])
}

fn add(a: &LieElement, b: &LieElement, s: i64) -> LieElement {
    let mut out = a.clone();
    for (k, c) in b {
        let v = out.get(k).cloned().unwrap_or_else(Scalar::zero).add(&c.scale_int(s));
        out.insert(k.clone(), v);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

#[test]
fn antisymmetry_on_all_modes() {
    let h = Heisenberg::new(8).unwrap();
    let basis = h.basis_upto(qi(3));
    for u in &basis {
        for v in &basis {
            for m in -4..=4 {
                for n in -4..=4 {
                    let ab = bracket_elem(&h, &single(u, m), &single(v, n));
                    let ba = bracket_elem(&h, &single(v, n), &single(u, m));
                    assert!(add(&ab, &ba, 1).is_empty(), "[{u}({m}), {v}({n})]");
                }
            }
        }
    }
}

fn act_all(h: &Heisenberg, e: &LieElement, w: &GradedVector) -> Result<GradedVector, Error> {
    lie_act(h, e, w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_and_representation(i in 0usize..7, j in 0usize..7, k in 0usize..7, m in -4i64..=4, n in -4i64..=4, p in -4i64..=4, wi in 0usize..20) {
        let h = Heisenberg::new(12).unwrap();
        let basis = h.basis_upto(qi(3));
        let (a, b, c) = (single(&basis[i], m), single(&basis[j], n), single(&basis[k], p));
        let ab_c = bracket_elem(&h, &bracket_elem(&h, &a, &b), &c);
        let bc_a = bracket_elem(&h, &bracket_elem(&h, &b, &c), &a);
        let ca_b = bracket_elem(&h, &bracket_elem(&h, &c, &a), &b);
        prop_assert!(add(&add(&ab_c, &bc_a, 1), &ca_b, 1).is_empty());

        let ws = h.basis_upto(qi(6));
        let w = GradedVector::basis(ws[wi % ws.len()].clone());
        let lhs = act_all(&h, &bracket_elem(&h, &a, &b), &w);
        let rhs = (|| -> Result<GradedVector, Error> {
            Ok(act_all(&h, &a, &act_all(&h, &b, &w)?)?.sub(&act_all(&h, &b, &act_all(&h, &a, &w)?)?))
        })();
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => prop_assert_eq!(l, r),
            (Err(Error::CutoffExceeded { .. }), _) | (_, Err(Error::CutoffExceeded { .. })) => {}
            (l, r) => prop_assert!(false, "{:?} {:?}", l, r),
        }
    }
}

#[test]
fn vacuum_modes_are_central() {
    let h = Heisenberg::new(8).unwrap();
    for v in h.basis_upto(qi(3)) {
        for m in -3..=3 {
            for n in -3..=3 {
                let b = bracket_elem(&h, &single(&h.vacuum(), m), &single(&v, n));
                assert!(b.is_empty());
            }
        }
    }
    assert_eq!(mode(&h, &h.a(), qi(1), &h.a()).unwrap(), GradedVector::basis(h.vacuum()));
}
