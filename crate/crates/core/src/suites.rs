//! Verification suites and their report records.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::dualization::{
    dw_membership, probe_functional, verify_conjugated_left, verify_omega_alignment, verify_opposite_derivative, verify_star_commutator,
    Contragredient, Functional, OppTriple, Opposite,
};
use crate::error::{Error, Result};
use crate::formal::{three_term_check, MonoStatus, TruncatedSeries};
use crate::heisenberg::{FockIntertwiner, FockModule, Heisenberg};
use crate::ratfun::{recognize_from_upper, verify_expansion_jacobi, RationalFn, RecognizeBounds};
use crate::regrep::{
    build_pz_map, l0_eigenvalue, peter_weyl_functional, pz_membership, scale_functional, uniform_k_bound, verify_clearing,
    verify_hom_property, verify_intertwining_map, verify_left_shift_formula, verify_left_via_shifted_module, verify_lr_commute,
    verify_oracle_equivalence, verify_scaling, verify_sigma, verify_three_term, weight_k_bound, Factor, PwRoute, PzContext,
    PzFunctional, RightSide, SearchBounds,
};
use crate::scalars::{q64, qi, FieldConfig, PhaseKind, Scalar, Q64};
use crate::voa_core::{
    borcherds_check, mode, verify_derivative, verify_vacuum, verify_virasoro, BasisKey, CheckReport, GradedSpace, GradedVector,
    JacobiBox, JacobiReport, StdTriple, Voa,
};

pub const SUITES: [&str; 7] = ["iota", "voa-axioms", "dualization", "regrep", "intertwiner", "peter-weyl", "scaling"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One line of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub suite: String,
    pub check_id: String,
    pub paper_ref: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub checked: usize,
    pub skipped: usize,
}

impl Record {
    pub fn json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldMode {
    Formal,
    /// A concrete nonzero rational z.
    Concrete(BigRational),
}

/// Session and per-suite parameters. Unset options take suite defaults.
#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub d: u32,
    pub mode: FieldMode,
    pub cutoff: i64,
    pub momenta: Vec<Q64>,
    pub window: Option<i64>,
    pub depth: Option<i64>,
    pub pairing_weight: Option<i64>,
    pub branches: Vec<i64>,
    pub scale: Option<BigRational>,
    pub mutate: bool,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            d: 2,
            mode: FieldMode::Formal,
            cutoff: 8,
            momenta: vec![qi(1)],
            window: None,
            depth: None,
            pairing_weight: None,
            branches: vec![0, 1],
            scale: None,
            mutate: false,
        }
    }
}

impl SuiteParams {
    pub fn field(&self) -> Result<FieldConfig> {
        match &self.mode {
            FieldMode::Formal => FieldConfig::formal(self.d),
            FieldMode::Concrete(z) => FieldConfig::concrete_z(self.d, z.clone()),
        }
    }

    fn bounds(&self) -> SearchBounds {
        SearchBounds { l_max: 3, k_max: 3, depth: self.depth.unwrap_or(2) }
    }

    fn nested(&self) -> SearchBounds {
        SearchBounds { l_max: 6, k_max: 6, depth: self.depth.unwrap_or(2) }
    }
}

/// Runs one suite; `None` for an unknown name.
pub fn run_suite(name: &str, p: &SuiteParams) -> Option<Vec<Record>> {
    let out = match name {
        "iota" => iota(p),
        "voa-axioms" => voa_axioms(p),
        "dualization" => dualization(p),
        "regrep" => regrep(p),
        "intertwiner" => intertwiner(p),
        "peter-weyl" => peter_weyl(p),
        "scaling" => scaling(p),
        _ => return None,
    };
    Some(out.unwrap_or_else(|e| vec![failure(name, "setup", "suite setup", &e)]))
}

fn failure(suite: &str, id: &str, label: &str, e: &Error) -> Record {
    Record {
        suite: suite.into(),
        check_id: id.into(),
        paper_ref: label.into(),
        status: Status::Fail,
        witness: Some(e.to_string()),
        checked: 0,
        skipped: 0,
    }
}

fn from_report(suite: &str, id: String, label: &str, r: Result<CheckReport>) -> Record {
    match r {
        Ok(r) => Record {
            suite: suite.into(),
            check_id: id,
            paper_ref: label.into(),
            status: if r.pass() { Status::Pass } else { Status::Fail },
            witness: r.failures.first().cloned().or_else(|| (r.checked == 0).then(|| "nothing was checked".to_string())),
            checked: r.checked,
            skipped: r.skipped,
        },
        Err(e) => failure(suite, &id, label, &e),
    }
}

/// A check that must fail; passes when it does and keeps the witness.
fn expected_failure(suite: &str, id: String, label: &str, r: Result<CheckReport>) -> Record {
    match r {
        Ok(r) => Record {
            suite: suite.into(),
            check_id: id,
            paper_ref: label.into(),
            status: if r.failures.is_empty() { Status::Fail } else { Status::Pass },
            witness: Some(r.failures.first().cloned().unwrap_or_else(|| "the expected failure did not occur".into())),
            checked: r.checked,
            skipped: r.skipped,
        },
        Err(e) => failure(suite, &id, label, &e),
    }
}

fn from_jacobi(suite: &str, id: String, label: &str, r: Result<JacobiReport>) -> Record {
    let r = r.map(|j| CheckReport {
        checked: j.checked,
        skipped: j.skipped,
        failures: j.failures.iter().map(|(l, m, n)| format!("monomial (l, m, n) = ({l}, {m}, {n})")).collect(),
    });
    from_report(suite, id, label, r)
}

fn monos(checks: &[crate::formal::MonoCheck], d: u32) -> CheckReport {
    let mut r = CheckReport::default();
    for c in checks {
        match &c.status {
            MonoStatus::Pass => r.record(true, String::new),
            MonoStatus::Fail { lhs, rhs } => r.record(false, || format!("x0^{} x^{}: {} vs {}", c.a, c.b, lhs.render(d), rhs.render(d))),
            MonoStatus::Unknown => r.skipped += 1,
        }
    }
    r
}

fn cube(us: &[BasisKey], vs: &[BasisKey], ws: &[BasisKey]) -> Vec<(BasisKey, BasisKey, BasisKey)> {
    let mut out = Vec::new();
    for u in us {
        for v in vs {
            for w in ws {
                out.push((u.clone(), v.clone(), w.clone()));
            }
        }
    }
    out
}

fn iota(p: &SuiteParams) -> Result<Vec<Record>> {
    const S: &str = "iota";
    let field = p.field()?;
    let d = field.d();
    let z = field.z();
    let w = p.window.unwrap_or(8);
    let mut out = Vec::new();
    let geo = RationalFn::monomial(0, -1, z.clone());
    out.push(from_report(S, "geometric-infinity".into(), "expansion of (x - z)^-1 at infinity", (|| {
        let s = geo.iota_infinity(&field, w as u32)?;
        let mut r = CheckReport::default();
        for i in 0..=w {
            r.record(s.coeff1(qi(-1 - i))? == z.pow(i)?, || format!("x^{} coefficient", -1 - i));
        }
        Ok(r)
    })()));
    out.push(from_report(S, "geometric-zero".into(), "expansion of (x - z)^-1 at zero", (|| {
        let s = geo.iota_zero(&field, w as u32)?;
        let mut r = CheckReport::default();
        for i in 0..=w {
            r.record(s.coeff1(qi(i))? == z.pow(-1 - i)?.neg(), || format!("x^{i} coefficient"));
        }
        Ok(r)
    })()));
    out.push(from_report(S, "delta-identity".into(), "three-term delta-function identity", (|| {
        let one = |v: &str| TruncatedSeries::finite_from(v, [(qi(0), Scalar::one())]);
        Ok(monos(&three_term_check(&field, &one("x"), &one("x"), &one("x0"), &z, w)?, d))
    })()));
    let fam: Vec<(i64, i64)> = (-3..=3).flat_map(|a| (-3..=3).map(move |b| (a, b))).collect();
    out.extend(fam.par_iter().map(|&(a, b)| {
        from_report(S, format!("round-trip/x^{a}(x-z)^{b}"), "recognition inverts expansion at infinity", (|| {
            let f = RationalFn::monomial(a, b, z.clone());
            let s = f.iota_infinity(&field, 16)?;
            let back = recognize_from_upper(&field, &s, &z, RecognizeBounds { l_max: 3, k_max: 3, deg_max: 6, a_priori: None })?;
            let mut r = CheckReport::default();
            r.record(back.f == f, || format!("recognized {}", back.f.render(d)));
            Ok(r)
        })())
    }).collect::<Vec<_>>());
    let fam: Vec<(i64, i64)> = (-3..=2).flat_map(|a| (-3..=2).map(move |b| (a, b))).collect();
    out.extend(fam.par_iter().map(|&(a, b)| {
        let f = RationalFn::monomial(a, b, z.clone());
        from_report(S, format!("expansion-jacobi/x^{a}(x-z)^{b}"), "Jacobi identity of the three expansions", {
            verify_expansion_jacobi(&field, &f, w).map(|c| monos(&c, d))
        })
    }).collect::<Vec<_>>());
    Ok(out)
}

fn voa_axioms(p: &SuiteParams) -> Result<Vec<Record>> {
    const S: &str = "voa-axioms";
    let h = Heisenberg::new(p.cutoff)?;
    let top = qi(p.pairing_weight.unwrap_or(3));
    let w = p.window.unwrap_or(6);
    let basis = h.basis_upto(top);
    let mut out = Vec::new();
    let triples = cube(&basis, &basis, &basis);
    out.extend(triples.par_iter().map(|(u, v, x)| {
        let t = StdTriple { y3: &h, yv: &h, y2: &h, y1: &h, low1: qi(0), low2: qi(0), u: u.clone(), v: v.clone(), w: x.clone() };
        from_jacobi(S, format!("jacobi/{u}/{v}/{x}"), "Jacobi identity", borcherds_check(&t, JacobiBox { window: w, n0: qi(0) }))
    }).collect::<Vec<_>>());
    for v in &basis {
        out.push(from_report(S, format!("vacuum/{v}"), "vacuum and creation properties", verify_vacuum(&h, v)));
    }
    for v in &basis {
        out.push(from_report(S, format!("virasoro/{v}"), "Virasoro relations", (|| {
            let mut r = CheckReport::default();
            for m in -2..=3 {
                for n in -2..=3 {
                    r.record(verify_virasoro(&h, &h, m, n, &GradedVector::basis(v.clone()))?, || format!("[L({m}), L({n})]"));
                }
            }
            Ok(r)
        })()));
    }
    let pairs: Vec<(BasisKey, BasisKey)> = basis.iter().flat_map(|v| basis.iter().map(move |x| (v.clone(), x.clone()))).collect();
    out.extend(pairs.par_iter().map(|(v, x)| from_report(S, format!("derivative/{v}/{x}"), "L(-1)-derivative property", verify_derivative(&h, &h, v, x))).collect::<Vec<_>>());
    out.extend(pairs.par_iter().map(|(u, x)| {
        from_report(S, format!("grading/{u}/{x}"), "weight grading of modes", (|| {
            let mut r = CheckReport::default();
            let hi = (u.weight + x.weight).to_integer() - 1;
            for n in hi - p.cutoff..=hi + 1 {
                match mode(&h, u, qi(n), x) {
                    Ok(y) => r.record(y.keys().all(|k| k.weight == u.weight + x.weight - qi(n) - qi(1)), || format!("mode {n}")),
                    Err(Error::CutoffExceeded { .. }) => r.skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(r)
        })())
    }).collect::<Vec<_>>());
    for lam in &p.momenta {
        let m = FockModule::new(*lam, qi(p.cutoff), p.d)?;
        let low = m.lowest_weight();
        let small = h.basis_upto(qi(2));
        let ws = m.basis_upto(low + qi(2));
        let mut r = Ok(JacobiReport::default());
        for u in &small {
            for v in &small {
                for x in &ws {
                    let t = StdTriple { y3: &m, yv: &m, y2: &m, y1: &h, low1: qi(0), low2: low, u: u.clone(), v: v.clone(), w: x.clone() };
                    r = r.and_then(|mut acc| {
                        acc.merge(borcherds_check(&t, JacobiBox { window: 5, n0: qi(0) })?);
                        Ok(acc)
                    });
                }
            }
        }
        out.push(from_jacobi(S, format!("module-jacobi/{lam}"), "Jacobi identity on a Fock module", r));
        let y = FockIntertwiner::new(*lam, *lam, qi(p.cutoff - 1), p.d)?;
        let m2 = FockModule::new(*lam + *lam, qi(p.cutoff - 1), p.d)?;
        let m1 = FockModule::new(*lam, qi(p.cutoff - 1), p.d)?;
        let mut r = Ok(JacobiReport::default());
        for u in &small {
            for v in &ws {
                for x in &ws {
                    let t = StdTriple { y3: &m2, yv: &y, y2: &m1, y1: &m1, low1: low, low2: low, u: u.clone(), v: v.clone(), w: x.clone() };
                    r = r.and_then(|mut acc| {
                        let j = borcherds_check(&t, JacobiBox { window: 4, n0: qi(0) })?;
                        acc.checked += j.checked;
                        acc.skipped += j.skipped;
                        acc.failures.extend(j.failures);
                        Ok(acc)
                    });
                }
            }
        }
        out.push(from_jacobi(S, format!("intertwiner-jacobi/{lam}/{lam}"), "Jacobi identity for a Fock intertwining operator", r));
    }
    Ok(out)
}

fn dualization(p: &SuiteParams) -> Result<Vec<Record>> {
    const S: &str = "dualization";
    let h = Heisenberg::new(p.cutoff)?;
    let opp = Opposite::new(&h, &h, &h);
    let mut out = Vec::new();
    let b2 = h.basis_upto(qi(2));
    let b3 = h.basis_upto(qi(3));
    let triples = cube(&b2, &b2, &b3);
    out.extend(triples.par_iter().map(|(u, v, w)| {
        let t = OppTriple { opp: opp.clone(), u: u.clone(), v: v.clone(), w: w.clone() };
        from_jacobi(S, format!("opposite-jacobi/{u}/{v}/{w}"), "Jacobi identity of the opposite action", borcherds_check(&t, JacobiBox { window: 6, n0: qi(0) }))
    }).collect::<Vec<_>>());
    let once = Contragredient { opp: opp.clone() };
    let twice = Contragredient { opp: Opposite::new(&h, &once, &h) };
    let b4 = h.basis_upto(qi(4));
    out.push(from_report(S, "double-contragredient".into(), "second contragredient equals the module", (|| {
        let mut r = CheckReport::default();
        for v in &b2 {
            for w in &b4 {
                for n in -4..=6 {
                    let target = v.weight + w.weight - qi(n) - qi(1);
                    if target < qi(0) || target > qi(p.cutoff) {
                        r.skipped += 1;
                        continue;
                    }
                    r.record(mode(&twice, v, qi(n), w)? == mode(&h, v, qi(n), w)?, || format!("{v} mode {n} on {w}"));
                }
            }
        }
        Ok(r)
    })()));
    let z = p.field()?.z();
    let shifted = opp.shifted(z.clone());
    let a = h.a();
    for w in [h.vacuum(), a.clone(), h.key(&[1, 1])] {
        let t = OppTriple { opp: shifted.clone(), u: a.clone(), v: a.clone(), w: w.clone() };
        out.push(from_jacobi(S, format!("shifted-jacobi/{w}"), "Jacobi identity of the shifted opposite action", borcherds_check(&t, JacobiBox { window: 5, n0: qi(0) })));
    }
    for v in &b2 {
        for w in &b2 {
            out.push(from_report(S, format!("conjugated-left/{v}/{w}"), "conjugated left action", verify_conjugated_left(&h, &h, v, w, &z)));
        }
    }
    let alpha = probe_functional();
    let samples: Vec<BasisKey> = b4.iter().take(10).cloned().collect();
    let gens = [h.vacuum(), h.a(), h.key(&[1, 1])];
    for u in &gens {
        for v in &gens {
            out.push(from_report(S, format!("star-commutator/{u}/{v}"), "commutator formula on the full dual", (|| {
                let mut r = CheckReport::default();
                for m in -3..=3 {
                    for n in -3..=3 {
                        r.merge(verify_star_commutator(&opp, u, v, m, n, &alpha, &samples)?);
                    }
                }
                Ok(r)
            })()));
        }
    }
    out.push(from_report(S, "omega-alignment".into(), "opposite Virasoro element", verify_omega_alignment(&opp, qi(4))));
    for v in &b2 {
        for w in &b2 {
            out.push(from_report(S, format!("opposite-derivative/{v}/{w}"), "opposite L(-1)-derivative", verify_opposite_derivative(&opp, v, w)));
        }
    }
    out.push(from_report(S, "restricted-dual-in-dw".into(), "restricted dual lies in D(W)", (|| {
        let r = dw_membership(&opp, &Functional::restricted(GradedVector::basis(h.vacuum())), &b2, 4, qi(4))?;
        let mut c = CheckReport::default();
        c.record(r.pass, || r.witness.clone().unwrap_or_default());
        Ok(c)
    })()));
    out.push(expected_failure(S, "full-dual-not-in-dw".into(), "a full-dual functional outside D(W)", (|| {
        let r = dw_membership(&opp, &probe_functional(), &[h.a()], 2, qi(3))?;
        let mut c = CheckReport::default();
        c.record(r.pass, || r.witness.clone().unwrap_or_else(|| "no witness".into()));
        Ok(c)
    })()));
    Ok(out)
}

/// Three-term relation with Y^R negated at x^0 when `mutate` is set.
fn three_term(alpha: &PzFunctional, v: &BasisKey, tests: &[BasisKey], window: i64, mutate: bool) -> Result<CheckReport> {
    if !mutate {
        return verify_three_term(alpha, v, tests, window);
    }
    let mut report = CheckReport::default();
    let d = alpha.ctx.field.d();
    for w in tests {
        let a = alpha.y_star_pairing(v, w, -2 * window - 2, "x")?;
        let b = alpha.y_right_pairing(v, w, window, "x")?;
        let mut flipped = TruncatedSeries::new(b.vars().to_vec());
        for (e, c) in b.terms() {
            flipped.add_term(e.clone(), if e[0] == qi(0) { c.neg() } else { c.clone() });
        }
        let c = alpha.y_left_pairing(v, w, window, "x0")?;
        let mut r = monos(&three_term_check(&alpha.ctx.field, &a, &flipped, &c, &alpha.ctx.z, window)?, d);
        r.failures.iter_mut().for_each(|f| *f = format!("w={w}: {f}"));
        report.merge(r);
    }
    Ok(report)
}

fn regrep(p: &SuiteParams) -> Result<Vec<Record>> {
    const S: &str = "regrep";
    let field = p.field()?;
    let pw = p.pairing_weight.unwrap_or(6);
    let window = p.window.unwrap_or(4);
    let h = Heisenberg::new(p.cutoff.max(pw + 20))?;
    let lam = p.momenta.first().copied().unwrap_or(qi(1));
    let m = FockModule::new(lam, lam * lam / qi(2) + qi(8), field.d())?;
    let ctx = PzContext::new(Opposite::new(&h, &h, &h), field.clone(), p.bounds())?;
    let a = GradedVector::basis(h.a());
    let top = GradedVector::basis(m.top());
    let alphas = vec![
        ("dual-vacuum".to_string(), Functional::restricted(GradedVector::basis(h.vacuum()))),
        ("phi(a,a')".to_string(), peter_weyl_functional(&h, &h, &h, &a, &a, &field, 0, PwRoute::DualL1)?),
        (format!("phi(1_{lam},1_{lam}')"), peter_weyl_functional(&h, &m, &m, &top, &top, &field, 0, PwRoute::DualL1)?),
    ];
    let tests = h.basis_upto(qi(pw));
    let om = h.key(&[1, 1]);
    let vs = [h.vacuum(), h.a(), om.clone()];
    let mut out = Vec::new();
    for (name, base) in alphas {
        let alpha = PzFunctional::new(ctx.clone(), base);
        for v in &vs {
            let id = format!("membership/{name}/{v}");
            out.push(match pz_membership(&alpha, v, &tests) {
                Ok(mem) => Record {
                    suite: S.into(),
                    check_id: id,
                    paper_ref: "pole certificate (l, k)".into(),
                    status: if mem.certificate.is_some() { Status::Pass } else { Status::Fail },
                    witness: Some(match mem.certificate {
                        Some(c) => format!("l={} k={} {:?}", c.l, c.k, c.certainty),
                        None => mem.witness.unwrap_or_default(),
                    }),
                    checked: mem.checked,
                    skipped: 0,
                },
                Err(e) => failure(S, &id, "pole certificate (l, k)", &e),
            });
        }
        for v in &vs {
            out.push(from_report(S, format!("clearing/{name}/{v}"), "(x - z)^k clears Y^R against Y*", verify_clearing(&alpha, v, &tests, window)));
            out.push(from_report(S, format!("oracle/{name}/{v}"), "Y^R against the residue oracle", verify_oracle_equivalence(&alpha, v, &tests, window)));
            out.push(from_report(S, format!("three-term/{name}/{v}"), "three-term relation of Y*, Y^R, Y^L", three_term(&alpha, v, &tests, window, p.mutate)));
            out.push(from_report(S, format!("left-shift/{name}/{v}"), "Y^L from the shifted Y* after clearing", verify_left_shift_formula(&alpha, v, &tests, window)));
            out.push(from_report(S, format!("left-shifted-module/{name}/{v}"), "Y^L as Y^R of the shifted right module", verify_left_via_shifted_module(&alpha, v, &tests, window)));
        }
        if name == "dual-vacuum" {
            out.push(from_report(S, format!("restricted-dual/{name}"), "Y^R equals Y* on the restricted dual", (|| {
                let mut r = CheckReport::default();
                for w in &tests {
                    let yr = alpha.y_right_pairing(&h.a(), w, window, "x")?;
                    let ys = alpha.y_star_pairing(&h.a(), w, -window, "x")?;
                    for e in -window..=window {
                        r.record(yr.coeff1(qi(e))? == ys.coeff1(qi(e))?, || format!("w={w} x^{e}"));
                    }
                }
                Ok(r)
            })()));
        }
        let mut pairs = vec![(h.a(), h.a())];
        if name == "phi(a,a')" {
            pairs.push((h.a(), om.clone()));
        }
        for (u, v) in pairs {
            out.push(from_report(S, format!("lr-commute/{name}/{u}/{v}"), "Y^L and Y^R commute", verify_lr_commute(&alpha, &u, &v, &tests, window, p.nested())));
        }
    }
    // Closure under single modes with the commutator bound on k.
    let alpha = PzFunctional::new(ctx.clone(), peter_weyl_functional(&h, &h, &h, &a, &a, &field, 0, PwRoute::DualL1)?);
    let small = h.basis_upto(qi(3));
    let gens = [h.a(), om.clone()];
    for v in &gens {
        for u in &gens {
            out.push(from_report(S, format!("mode-closure/phi(a,a')/{v}/{u}"), "closure under single modes with uniform k", (|| {
                let bound = uniform_k_bound(&alpha, v, u, &small)?;
                let mut r = CheckReport::default();
                for n in -3..=3 {
                    let moved = alpha.star(&GradedVector::basis(v.clone()), n)?.with_bounds(p.nested());
                    let mem = pz_membership(&moved, u, &small)?;
                    match mem.certificate {
                        Some(c) => r.record(c.k <= bound, || format!("n={n}: k={} exceeds {bound}", c.k)),
                        None => r.record(false, || format!("n={n}: {}", mem.witness.clone().unwrap_or_default())),
                    }
                }
                Ok(r)
            })()));
        }
    }
    out.push(from_report(S, "tensor-l0/phi(a,a')".into(), "L(0) of both factors on a Peter-Weyl image", (|| {
        let mut r = CheckReport::default();
        let (el, rl) = l0_eigenvalue(&alpha, true, &small)?;
        let (er, rr) = l0_eigenvalue(&alpha, false, &small)?;
        r.merge(rl);
        r.merge(rr);
        r.record(el == Some(Scalar::one()) && er == Some(Scalar::one()), || "eigenvalues differ from (1, 1)".into());
        Ok(r)
    })()));
    Ok(out)
}

fn intertwiner(p: &SuiteParams) -> Result<Vec<Record>> {
    const S: &str = "intertwiner";
    let field = p.field()?;
    let lam = p.momenta.first().copied().unwrap_or(qi(1));
    let low = lam * lam / qi(2);
    let low3 = qi(2) * lam * lam;
    let pw = p.pairing_weight.unwrap_or(3);
    let window = p.window.unwrap_or(4);
    let cut = (low3 + qi(pw + 7)).ceil().to_integer();
    let h = Heisenberg::new(cut)?;
    let m1 = FockModule::new(lam, qi(cut) - qi(1) + low - low.floor(), field.d())?;
    let m3 = FockModule::new(lam + lam, qi(cut), field.d())?;
    let y = FockIntertwiner::new(lam, lam, qi(cut), field.d())?;
    let ctx = PzContext::new(Opposite::on_dual(&h, &m3, &m3), field.clone(), p.bounds())?;
    let tests = m3.basis_upto(low3 + qi(pw));
    let w1s = m1.basis_upto(low + qi(1));
    let top = m1.top();
    let mut out = Vec::new();
    for &br in &p.branches {
        let mut f = build_pz_map(&y, &field, br);
        f.mutated = p.mutate;
        for v in [h.vacuum(), h.a(), h.key(&[1, 1])] {
            for k1 in &w1s {
                for k2 in &w1s {
                    let (first, second) = (Factor { op: &m1, w: k1 }, Factor { op: &m1, w: k2 });
                    let tag = format!("p={br}/{v}/{k1}/{k2}");
                    out.push(from_report(S, format!("intertwining-map/{tag}"), "defining identity of a P(z)-intertwining map", verify_intertwining_map(&f, &ctx, &v, first, second, &tests, window)));
                    out.push(from_report(S, format!("image-membership/{tag}"), "images are P(z)-functionals with the weight bound on k", (|| {
                        let img = f.image_pz(&ctx, &GradedVector::basis(k1.clone()), &GradedVector::basis(k2.clone()));
                        let mem = pz_membership(&img, &v, &tests)?;
                        let mut r = CheckReport::default();
                        let bound = weight_k_bound(&v, k1, low);
                        match mem.certificate {
                            Some(c) => r.record(c.k <= bound, || format!("k={} exceeds {bound}", c.k)),
                            None => r.record(false, || mem.witness.clone().unwrap_or_default()),
                        }
                        Ok(r)
                    })()));
                    out.push(from_report(S, format!("homomorphism/{tag}"), "Y^R and Y^L act through the two factors", verify_hom_property(&f, &ctx, &v, first, second, &tests, window, RightSide::YR)));
                }
            }
        }
        let both = (Factor { op: &m1, w: &top }, Factor { op: &m1, w: &top });
        out.push(expected_failure(S, format!("y-star-substitution/p={br}"), "Y* in place of Y^R breaks the right identity", verify_hom_property(&f, &ctx, &h.a(), both.0, both.1, &tests, window, RightSide::YStar)));
    }
    out.push(from_report(S, "branch-coherence".into(), "branches differ by e^{2 pi i h} phases", (|| {
        let mut r = CheckReport::default();
        let (f0, f1) = (build_pz_map(&y, &field, 0), build_pz_map(&y, &field, 1));
        for k1 in &w1s {
            for k2 in &w1s {
                for b in &tests {
                    let (w1, w2) = (GradedVector::basis(k1.clone()), GradedVector::basis(k2.clone()));
                    let hh = b.weight - k1.weight - k2.weight;
                    let ratio = field.zeta_pow(2 * (hh * qi(field.d() as i64)).to_integer());
                    r.record(f1.eval(&w1, &w2, b)? == f0.eval(&w1, &w2, b)?.mul(&ratio), || format!("{k1} {k2} at {b}"));
                }
            }
        }
        Ok(r)
    })()));
    out.push(from_report(S, "branch-coherence/half-momenta".into(), "branches differ by e^{2 pi i h} phases", (|| {
        let d = 8;
        let f8 = FieldConfig::formal(d)?;
        let half = q64(1, 2);
        let m = FockModule::new(half, qi(6), d)?;
        let m3 = FockModule::new(qi(1), qi(7), d)?;
        let y = FockIntertwiner::new(half, half, qi(7), d)?;
        let (f0, f1) = (build_pz_map(&y, &f8, 0), build_pz_map(&y, &f8, 1));
        let mut r = CheckReport::default();
        let mut moved = 0;
        for k1 in m.basis_upto(q64(17, 8)) {
            for k2 in m.basis_upto(q64(17, 8)) {
                for b in m3.basis_upto(qi(4)) {
                    let (w1, w2) = (GradedVector::basis(k1.clone()), GradedVector::basis(k2.clone()));
                    let (a0, a1) = (f0.eval(&w1, &w2, &b)?, f1.eval(&w1, &w2, &b)?);
                    let hh = b.weight - k1.weight - k2.weight;
                    r.record(a1 == a0.mul(&f8.zeta_pow(2 * (hh * qi(d as i64)).to_integer())), || format!("{k1} {k2} at {b}"));
                    moved += usize::from(!a0.is_zero() && a0 != a1);
                }
            }
        }
        r.record(moved > 0, || "no component changed between branches".into());
        Ok(r)
    })()));
    Ok(out)
}

fn peter_weyl(p: &SuiteParams) -> Result<Vec<Record>> {
    const S: &str = "peter-weyl";
    let field = p.field()?;
    let pw = p.pairing_weight.unwrap_or(4);
    let h = Heisenberg::new(p.cutoff.max(pw + 14))?;
    let keys = h.basis_upto(qi(pw + 2));
    let vac = GradedVector::basis(h.vacuum());
    let mut out = Vec::new();
    out.push(from_report(S, "dual-vacuum".into(), "Phi(1 (x) 1') is the dual vacuum", (|| {
        let phi = peter_weyl_functional(&h, &h, &h, &vac, &vac, &field, 0, PwRoute::DualL1)?;
        let mut r = CheckReport::default();
        for v in &keys {
            let expect = if *v == h.vacuum() { Scalar::one() } else { Scalar::zero() };
            r.record(phi.eval(v)? == expect, || format!("value at {v}"));
        }
        Ok(r)
    })()));
    let samples = [(h.a(), h.a()), (h.key(&[2]), h.a()), (h.a(), h.key(&[1, 1])), (h.key(&[2]), h.key(&[1, 1]))];
    let ctx = PzContext::new(Opposite::new(&h, &h, &h), field.clone(), SearchBounds { l_max: 5, k_max: 5, depth: p.depth.unwrap_or(2) })?;
    let tests = h.basis_upto(qi(pw));
    for (w, wp) in &samples {
        let (wv, wpv) = (GradedVector::basis(w.clone()), GradedVector::basis(wp.clone()));
        let tag = format!("{w}/{wp}");
        out.push(from_report(S, format!("routes/{tag}"), "dual L(1) route against moved L(-1) route", (|| {
            let one = peter_weyl_functional(&h, &h, &h, &wv, &wpv, &field, 0, PwRoute::DualL1)?;
            let two = peter_weyl_functional(&h, &h, &h, &wv, &wpv, &field, 0, PwRoute::MovedLm1)?;
            let mut r = CheckReport::default();
            for v in &keys {
                r.record(one.eval(v)? == two.eval(v)?, || format!("value at {v}"));
            }
            Ok(r)
        })()));
        out.push(from_report(S, format!("branch-coherence/{tag}"), "branches differ by the e^{-2 l_p(z) L(0)} phase", (|| {
            let mut r = CheckReport::default();
            for &br in &p.branches {
                let one = peter_weyl_functional(&h, &h, &h, &wv, &wpv, &field, br, PwRoute::DualL1)?;
                let next = peter_weyl_functional(&h, &h, &h, &wv, &wpv, &field, br + 1, PwRoute::DualL1)?;
                let ratio = field
                    .branch_phase(-w.weight * qi(2), br + 1, PhaseKind::LogBranch)?
                    .div(&field.branch_phase(-w.weight * qi(2), br, PhaseKind::LogBranch)?)?;
                for v in &keys {
                    r.record(next.eval(v)? == one.eval(v)?.mul(&ratio), || format!("p={br} value at {v}"));
                }
            }
            Ok(r)
        })()));
        let alpha = PzFunctional::new(ctx.clone(), peter_weyl_functional(&h, &h, &h, &wv, &wpv, &field, 0, PwRoute::DualL1)?);
        out.push(from_report(S, format!("membership/{tag}"), "membership with the weight bound on k", (|| {
            let mut r = CheckReport::default();
            for v in [h.vacuum(), h.a(), h.key(&[1, 1]), h.key(&[2])] {
                let mem = pz_membership(&alpha, &v, &tests)?;
                let bound = weight_k_bound(&v, w, qi(0));
                match mem.certificate {
                    Some(c) => r.record(c.k <= bound, || format!("v={v}: k={} exceeds {bound}", c.k)),
                    None => r.record(false, || mem.witness.clone().unwrap_or_default()),
                }
            }
            Ok(r)
        })()));
        out.push(from_report(S, format!("l0-eigenvalues/{tag}"), "L(0) of both factors", (|| {
            let (el, mut r) = l0_eigenvalue(&alpha, true, &tests)?;
            let (er, rr) = l0_eigenvalue(&alpha, false, &tests)?;
            r.merge(rr);
            r.record(el == Some(Scalar::from_q64(w.weight)) && er == Some(Scalar::from_q64(wp.weight)), || "eigenvalues differ from the weights".into());
            Ok(r)
        })()));
    }
    Ok(out)
}

fn scaling(p: &SuiteParams) -> Result<Vec<Record>> {
    const S: &str = "scaling";
    let z1 = match &p.mode {
        FieldMode::Concrete(z) => z.clone(),
        FieldMode::Formal => BigRational::from_integer(1.into()),
    };
    let zs = p.scale.clone().unwrap_or_else(|| BigRational::from_integer(2.into()));
    let window = p.window.unwrap_or(3);
    let pw = p.pairing_weight.unwrap_or(3);
    let h = Heisenberg::new(p.cutoff.max(pw + 25))?;
    let f1 = FieldConfig::concrete_z(1, z1.clone())?;
    let fs = FieldConfig::concrete_z(1, zs.clone())?;
    let f2 = FieldConfig::concrete_z(1, &zs * &z1)?;
    let src = PzContext::new(Opposite::new(&h, &h, &h), f1.clone(), p.bounds())?;
    let dst = PzContext::new(Opposite::new(&h, &h, &h), f2.clone(), p.bounds())?;
    let a = GradedVector::basis(h.a());
    let base = peter_weyl_functional(&h, &h, &h, &a, &a, &f1, 0, PwRoute::DualL1)?;
    let alpha = PzFunctional::new(src, base.clone());
    let tests = h.basis_upto(qi(pw + 1));
    let mut out = Vec::new();
    let beta = scale_functional(&alpha, &dst, &fs, 0);
    for v in [h.a(), h.key(&[1, 1])] {
        out.push(from_report(S, format!("conjugation/{v}"), "e^{l_p(z) L*(0)} intertwines Y^R and Y^L at z1 and z z1", (|| {
            let mut r = CheckReport::default();
            for (f, side) in [(&alpha, "source"), (&beta, "image")] {
                let mem = pz_membership(f, &v, &tests)?;
                r.record(mem.certificate.is_some_and(|c| c.k > 0), || format!("{side} certificate {:?}", mem.witness));
            }
            r.merge(verify_scaling(&alpha, &beta, &fs, 0, &v, &tests, window)?);
            Ok(r)
        })()));
    }
    out.push(from_report(S, "sigma/a/a".into(), "sigma is a V (x) V-homomorphism", verify_sigma(&alpha, &dst, &fs, 0, &h.a(), &h.a(), &h.basis_upto(qi(pw)), window, p.nested())));
    out.push(expected_failure(S, "refutation".into(), "a pole at z1 fails membership at another point", (|| {
        let wrong = PzFunctional::new(dst.clone(), base.clone());
        let mem = pz_membership(&wrong, &h.a(), &tests)?;
        let mut r = CheckReport::default();
        r.record(mem.certificate.is_some(), || mem.witness.clone().unwrap_or_else(|| "no witness".into()));
        Ok(r)
    })()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_none() {
        assert!(run_suite("nope", &SuiteParams::default()).is_none());
    }

    #[test]
    fn iota_suite_passes_in_concrete_mode() {
        let p = SuiteParams { d: 1, mode: FieldMode::Concrete(BigRational::new(3.into(), 2.into())), window: Some(4), ..SuiteParams::default() };
        let recs = run_suite("iota", &p).unwrap();
        assert_eq!(recs.len(), 3 + 49 + 36);
        assert!(recs.iter().all(|r| r.status == Status::Pass), "{:?}", recs.iter().find(|r| r.status == Status::Fail));
    }

    #[test]
    fn record_field_order() {
        let r = Record {
            suite: "iota".into(),
            check_id: "x".into(),
            paper_ref: "y".into(),
            status: Status::Fail,
            witness: None,
            checked: 1,
            skipped: 0,
        };
        assert_eq!(r.json_line(), r#"{"suite":"iota","check_id":"x","paper_ref":"y","status":"fail","checked":1,"skipped":0}"#);
    }

    #[test]
    fn setup_errors_become_failures() {
        let p = SuiteParams { d: 0, ..SuiteParams::default() };
        let recs = run_suite("iota", &p).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].status, Status::Fail);
        assert!(recs[0].witness.is_some());
    }
}
