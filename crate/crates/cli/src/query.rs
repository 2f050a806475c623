use anyhow::{anyhow, bail, Result};
use vreg_core::heisenberg::Heisenberg;
use vreg_core::ratfun::RationalFn;
use vreg_core::dualization::{Functional, Opposite};
use vreg_core::regrep::{peter_weyl_functional, PwRoute, PzContext, PzFunctional, SearchBounds};
use vreg_core::scalars::FieldConfig;
use vreg_core::scalars::qi;
use vreg_core::voa_core::{three_point, BasisKey, GradedSpace, GradedVector};

/// Evaluates one query against the Heisenberg algebra over `field`.
pub fn answer(q: &str, field: &FieldConfig, cutoff: i64) -> Result<String> {
    let q = q.trim();
    let d = field.d();
    if let Some(rest) = q.strip_prefix("iota_inf").or_else(|| q.strip_prefix("iota_zero")) {
        let at_inf = q.starts_with("iota_inf");
        let (expr, depth) = rest.rsplit_once("depth").ok_or_else(|| anyhow!("missing `depth <n>`"))?;
        let depth: u32 = depth.trim().parse().map_err(|_| anyhow!("depth must be a nonnegative integer"))?;
        let (a, b) = parse_monomial(expr)?;
        let f = RationalFn::monomial(a, b, field.z());
        let s = if at_inf { f.iota_infinity(field, depth)? } else { f.iota_zero(field, depth)? };
        return Ok(s.render(d));
    }
    if let Some(rest) = q.strip_prefix("three_point") {
        let args: Vec<&str> = rest.split_whitespace().collect();
        let [u, v, w, dual] = args[..] else { bail!("three_point takes u v w w'") };
        let keys = [u, v, w, dual.strip_suffix('\'').ok_or_else(|| anyhow!("the last argument must be primed"))?];
        let h = heisenberg(&keys, cutoff)?;
        let [u, v, w, dual] = keys.map(|k| key(&h, k));
        let (u, v, w, dual) = (u?, v?, w?, dual?);
        let t = three_point(&h, &h, &GradedVector::basis(dual), &u, &v, &w, 8)?;
        if !t.report.pass() && t.report.checked > 0 {
            bail!("three-point recognition failed: {:?}", t.report.failures.first());
        }
        return Ok(t.f.render(d));
    }
    if let Some(rest) = q.strip_prefix("phi(") {
        let (args, tail) = rest.split_once(')').ok_or_else(|| anyhow!("unclosed phi("))?;
        let (w, wp) = args.split_once(',').ok_or_else(|| anyhow!("phi takes two arguments"))?;
        let wp = wp.trim().strip_suffix('\'').ok_or_else(|| anyhow!("the second phi argument must be primed"))?;
        let v = tail.trim().strip_prefix("at").map(str::trim).and_then(|t| t.strip_prefix("v=")).ok_or_else(|| anyhow!("expected `at v=<vector>`"))?;
        let names = [w.trim(), wp, v.trim()];
        let h = heisenberg(&names, cutoff)?;
        let (w, wp, v) = (key(&h, names[0])?, key(&h, names[1])?, key(&h, names[2])?);
        let phi = peter_weyl_functional(&h, &h, &h, &GradedVector::basis(w), &GradedVector::basis(wp), field, 0, PwRoute::DualL1)?;
        return Ok(phi.eval(&v)?.render(d));
    }
    if let Some(rest) = q.strip_prefix("yR(").map(|r| (r, true)).or_else(|| q.strip_prefix("yL(").map(|r| (r, false))) {
        return action(rest.0, rest.1, field, cutoff);
    }
    bail!("unrecognized query {q:?}; expected iota_inf, iota_zero, three_point, phi(...), yR(...) or yL(...)")
}

/// `yR(v; alpha; window=lo..hi[; pairing=n])`: the pairings of Y^R(v, x)alpha
/// (or Y^L) with every basis vector up to the pairing weight.
fn action(rest: &str, right: bool, field: &FieldConfig, cutoff: i64) -> Result<String> {
    let body = rest.trim().strip_suffix(')').ok_or_else(|| anyhow!("unclosed action query"))?;
    let parts: Vec<&str> = body.split(';').map(str::trim).collect();
    let [v, alpha, opts @ ..] = &parts[..] else { bail!("expected yR(v; alpha; window=lo..hi)") };
    let (mut lo, mut hi, mut pairing) = (-3i64, 3i64, 2i64);
    for o in opts {
        let (k, val) = o.split_once('=').ok_or_else(|| anyhow!("option {o:?} must be key=value"))?;
        match k.trim() {
            "window" => {
                let (a, b) = val.split_once("..").ok_or_else(|| anyhow!("window must be lo..hi"))?;
                lo = a.trim().parse()?;
                hi = b.trim().parse()?;
                if lo > hi {
                    bail!("empty window {val}");
                }
            }
            "pairing" => pairing = val.trim().parse()?,
            other => bail!("unknown option {other:?}"),
        }
    }
    let h = Heisenberg::new(cutoff.max(2 * lo.abs().max(hi.abs()) + pairing + 16))?;
    let vk = key(&h, v)?;
    let base = if let Some(args) = alpha.strip_prefix("phi(").and_then(|a| a.strip_suffix(')')) {
        let (w, wp) = args.split_once(',').ok_or_else(|| anyhow!("phi takes two arguments"))?;
        let wp = wp.trim().strip_suffix('\'').ok_or_else(|| anyhow!("the second phi argument must be primed"))?;
        let (w, wp) = (GradedVector::basis(key(&h, w.trim())?), GradedVector::basis(key(&h, wp)?));
        peter_weyl_functional(&h, &h, &h, &w, &wp, field, 0, PwRoute::DualL1)?
    } else {
        let w = alpha.strip_suffix('\'').ok_or_else(|| anyhow!("alpha must be phi(w, w') or a primed vector"))?;
        Functional::restricted(GradedVector::basis(key(&h, w)?))
    };
    let ctx = PzContext::new(Opposite::new(&h, &h, &h), field.clone(), SearchBounds { l_max: 6, k_max: 6, depth: 2 })?;
    let alpha = PzFunctional::new(ctx, base);
    let mut lines = Vec::new();
    for w in h.basis_upto(qi(pairing)) {
        let s = if right { alpha.y_right_pairing(&vk, &w, hi, "x")? } else { alpha.y_left_pairing(&vk, &w, hi, "x")? };
        let s = s.restrict(0, qi(lo), qi(hi));
        lines.push(format!("w={w}: {}", s.render(field.d())));
    }
    Ok(lines.join("\n"))
}

fn parse_monomial(expr: &str) -> Result<(i64, i64)> {
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let (mut a, mut b) = (0, 0);
    let mut rest = s.as_str();
    while !rest.is_empty() {
        rest = rest.trim_start_matches('*');
        let (is_pole, after) = if let Some(r) = rest.strip_prefix("(x-z)") {
            (true, r)
        } else if let Some(r) = rest.strip_prefix('x') {
            (false, r)
        } else {
            bail!("cannot read factor at {rest:?}; use x^a and (x-z)^b");
        };
        let (e, after) = match after.strip_prefix('^') {
            Some(r) => {
                let end = r.char_indices().find(|&(i, c)| !(c.is_ascii_digit() || (i == 0 && c == '-'))).map_or(r.len(), |(i, _)| i);
                (r[..end].parse::<i64>().map_err(|_| anyhow!("bad exponent in {expr:?}"))?, &r[end..])
            }
            None => (1, after),
        };
        if is_pole {
            b += e;
        } else {
            a += e;
        }
        rest = after;
    }
    Ok((a, b))
}

fn parse_label(name: &str) -> Result<Vec<u32>> {
    match name {
        "vac" | "1" => Ok(vec![]),
        "a" => Ok(vec![1]),
        "omega" => Ok(vec![1, 1]),
        _ => {
            let inner = name.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(|| anyhow!("unknown vector {name:?}; use vac, a, omega or [n1,n2,...]"))?;
            let mut parts = inner.split(',').filter(|p| !p.trim().is_empty()).map(|p| p.trim().parse::<u32>().map_err(|_| anyhow!("bad part {p:?} in {name}"))).collect::<Result<Vec<_>>>()?;
            if parts.contains(&0) {
                bail!("parts must be positive in {name}");
            }
            parts.sort_unstable_by(|x, y| y.cmp(x));
            Ok(parts)
        }
    }
}

fn heisenberg(names: &[&str], cutoff: i64) -> Result<Heisenberg> {
    let mut total = 0i64;
    for n in names {
        total += parse_label(n)?.iter().map(|&p| p as i64).sum::<i64>();
    }
    Ok(Heisenberg::new(cutoff.max(total + 8))?)
}

fn key(h: &Heisenberg, name: &str) -> Result<BasisKey> {
    Ok(h.key(&parse_label(name)?))
}
