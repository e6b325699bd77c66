//! One handler per command. Each returns the `result` object and the list of
//! checks that decide the exit status.

use maslov::cocycle::{self, BasedTriple};
use maslov::lagrange::{self, enumerate_lagrangians};
use maslov::symbols::{self, RelationReport};
use maslov::verify::{self, CheckReport};
use maslov::witt::{self, hilbert_symbol, Place};
use maslov::{BasedLagrangian, FieldCtx, FieldKind, HyperbolicSpace, Lagrangian, SHatElement, Sign, WittClass};
use serde_json::{json, Value};

use crate::job::{self, form, matrix, matrix_json, scalar, scalar_json, CliError, CliResult};

pub struct Job<'a> {
    pub ctx: FieldCtx,
    pub input: &'a Value,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub exhaustive: bool,
}

pub struct Outcome {
    pub result: Value,
    pub checks: Vec<Value>,
}

impl Outcome {
    fn plain(result: Value) -> Outcome {
        Outcome { result, checks: Vec::new() }
    }
}

fn check(name: &str, passed: bool, detail: Value) -> Value {
    json!({ "name": name, "passed": passed, "detail": detail })
}

fn report_check(r: &CheckReport) -> Value {
    json!({
        "name": r.name,
        "passed": r.ok(),
        "trials": r.trials,
        "successes": r.passed,
        "failures": r.failures,
    })
}

fn relation_check(name: &str, r: &RelationReport) -> Value {
    json!({
        "name": name,
        "passed": r.passed(),
        "checked": r.checked,
        "failures": r.violations,
    })
}

pub fn witt_json(w: &WittClass) -> Value {
    let cert = w.certificate();
    let disc = w.signed_disc().ok().map(|d| shat_json(&d));
    let hasse: Vec<Value> = cert.hasse.iter().map(|(p, v)| json!({ "p": p.to_string(), "val": v })).collect();
    json!({
        "dim": w.dim(),
        "dim_mod2": w.dim() % 2,
        "disc": disc,
        "signature": cert.signature,
        "hasse": hasse,
        "is_zero": cert.is_zero,
        "entries": w.entries().iter().map(scalar_json).collect::<Vec<_>>(),
    })
}

pub fn shat_json(s: &SHatElement) -> Value {
    json!({ "s": s.class_string(), "sign": s.sign().value(), "identity": s.is_identity() })
}

/// `(X_0, Y_0, u_t Y_0)` from `{"t": ...}` with their standard bases, or
/// three `2n×n` bases from `{"lagrangians": [...]}`.
fn triple(job: &Job) -> CliResult<[BasedLagrangian; 3]> {
    let ctx = job.ctx;
    if let Some(t) = job.input.get("t") {
        let t = form(&ctx, t)?;
        let space = HyperbolicSpace::new(ctx, t.dim());
        let (x, y) = space.standard_bases();
        let z = space.u_t(&t)?.matrix().mul(&y);
        return Ok([
            BasedLagrangian::from_basis(space, x)?,
            BasedLagrangian::from_basis(space, y)?,
            BasedLagrangian::from_basis(space, z)?,
        ]);
    }
    let ls = job::field(job.input, "lagrangians")?
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| CliError::Parse("\"lagrangians\" must hold three bases".into()))?;
    let bases = ls.iter().map(|b| matrix(&ctx, b)).collect::<CliResult<Vec<_>>>()?;
    let space = HyperbolicSpace::new(ctx, bases[0].cols());
    let mut out = Vec::with_capacity(3);
    for b in bases {
        out.push(BasedLagrangian::from_basis(space, b)?);
    }
    Ok(out.try_into().expect("three bases"))
}

fn lagrangians(t: &[BasedLagrangian; 3]) -> (&Lagrangian, &Lagrangian, &Lagrangian) {
    (t[0].lagrangian(), t[1].lagrangian(), t[2].lagrangian())
}

pub fn kappa(job: &Job) -> CliResult<Outcome> {
    let t = triple(job)?;
    let (x, y, z) = lagrangians(&t);
    let k = lagrange::kappa(x, y, z)?;
    let class = witt::witt_class(&k)?;
    Ok(Outcome::plain(json!({ "kappa": matrix_json(k.matrix()), "class": witt_json(&class) })))
}

pub fn maslov(job: &Job) -> CliResult<Outcome> {
    let t = triple(job)?;
    let (x, y, z) = lagrangians(&t);
    let m = cocycle::maslov(x, y, z)?;
    let swapped = cocycle::maslov(x, z, y)?;
    let alternating = m.add(&swapped)?.is_zero();
    let mut result = json!({ "maslov": witt_json(&m) });
    let mut checks = vec![check("alternating", alternating, json!(null))];
    if job.ctx.eps == Sign::Plus {
        let bt = BasedTriple::new(t[0].clone(), t[1].clone(), t[2].clone())?;
        result["disc_defect"] = shat_json(&cocycle::disc_defect(&bt)?);
        checks.push(check("disc_defect_identity", cocycle::disc_defect(&bt)?.is_identity(), json!(null)));
        if job.ctx.is_symplectic() {
            let r = cocycle::reduced_maslov(&bt)?;
            checks.push(check("reduced_in_ii", r.in_ii()?, json!(null)));
            result["reduced"] = witt_json(&r);
        }
    }
    Ok(Outcome { result, checks })
}

pub fn kashiwara(job: &Job) -> CliResult<Outcome> {
    if !job.ctx.is_symplectic() {
        return Err(maslov::Error::WrongContext("Kashiwara's form needs Q with eps = 1".into()).into());
    }
    let t = triple(job)?;
    let q = cocycle::kashiwara_form_based(&t[0], &t[1], &t[2])?;
    let (x, y, z) = lagrangians(&t);
    let class = cocycle::kashiwara_class(x, y, z)?;
    let mut result = json!({ "form": matrix_json(q.matrix()), "class": witt_json(&class) });
    let mut checks = Vec::new();
    match cocycle::maslov(x, y, z) {
        Ok(m) => {
            checks.push(check("agrees_with_maslov", m == class, json!(null)));
            result["maslov"] = witt_json(&m);
        }
        Err(maslov::Error::NotPairwiseOpposite) => result["maslov"] = Value::Null,
        Err(e) => return Err(e.into()),
    }
    Ok(Outcome { result, checks })
}

/// `{"g": U, "h": U, "i"?: U, "o"?: basis}`; `o` defaults to `X_0`.
pub fn tau(job: &Job) -> CliResult<Outcome> {
    let ctx = job.ctx;
    let g = matrix(&ctx, job::field(job.input, "g")?)?;
    if g.rows() % 2 != 0 || !g.is_square() {
        return Err(maslov::Error::DimensionMismatch("unitary must be 2n×2n".into()).into());
    }
    let space = HyperbolicSpace::new(ctx, g.rows() / 2);
    let g = space.unitary(g)?;
    let h = space.unitary(matrix(&ctx, job::field(job.input, "h")?)?)?;
    let o = match job.input.get("o") {
        Some(b) => space.lagrangian(matrix(&ctx, b)?)?,
        None => space.standard_pair().0,
    };
    let value = cocycle::tau(&g, &h, &o)?;
    let mut result = json!({ "tau": witt_json(&value) });
    let mut checks = Vec::new();
    if let Some(i) = job.input.get("i") {
        let i = space.unitary(matrix(&ctx, i)?)?;
        let defect = cocycle::tau_cocycle_defect(&g, &h, &i, &o)?;
        checks.push(check("cocycle_identity", defect.is_zero(), json!(null)));
        result["cocycle_defect"] = witt_json(&defect);
    }
    Ok(Outcome { result, checks })
}

/// `{"form": matrix}` or `{"diag": [scalars]}`.
fn witt_input(job: &Job) -> CliResult<WittClass> {
    if let Some(f) = job.input.get("form") {
        return Ok(witt::witt_class(&form(&job.ctx, f)?)?);
    }
    let diag = job::field(job.input, "diag")?
        .as_array()
        .ok_or_else(|| CliError::Parse("\"diag\" must be an array".into()))?;
    let entries = diag.iter().map(|x| scalar(&job.ctx, x)).collect::<CliResult<Vec<_>>>()?;
    let m = maslov::Matrix::diagonal(job.ctx, &entries);
    Ok(witt::witt_class(&maslov::FormMatrix::new(m, job.ctx.eps)?)?)
}

pub fn witt(job: &Job) -> CliResult<Outcome> {
    Ok(Outcome::plain(witt_json(&witt_input(job)?)))
}

pub fn disc(job: &Job) -> CliResult<Outcome> {
    let w = witt_input(job)?;
    let d = w.signed_disc()?;
    Ok(Outcome::plain(json!({ "disc": shat_json(&d), "in_ii": d.is_identity() })))
}

/// `{"a": x, "b": y, "place"?: p | "inf"}` over `Q`; without a place every
/// place where the symbol can be nontrivial is listed.
pub fn hilbert(job: &Job) -> CliResult<Outcome> {
    if job.ctx.kind != FieldKind::RationalsId {
        return Err(maslov::Error::WrongContext("Hilbert symbols are computed over Q".into()).into());
    }
    let rat = |key: &str| -> CliResult<_> {
        let x = scalar(&job.ctx, job::field(job.input, key)?)?;
        Ok(x.to_rational().expect("rational scalar"))
    };
    let (a, b) = (rat("a")?, rat("b")?);
    let places = match job.input.get("place") {
        None => maslov::field::relevant_places(&[a.clone(), b.clone()]),
        Some(Value::String(s)) if s == "inf" => vec![Place::Infinite],
        Some(p) => {
            let p = p.as_u64().ok_or_else(|| CliError::Parse(format!("bad place {p}")))?;
            if !maslov::arith::is_prime_u64(p) {
                return Err(maslov::Error::ConstraintViolated(format!("{p} is not prime")).into());
            }
            vec![Place::prime(p)]
        }
    };
    let mut symbols = Vec::new();
    let mut product = 1i8;
    for place in &places {
        let v = hilbert_symbol(&a, &b, place)?;
        product *= v;
        symbols.push(json!({ "place": place.to_string(), "val": v }));
    }
    let mut checks = Vec::new();
    if job.input.get("place").is_none() {
        checks.push(check("product_formula", product == 1, json!(null)));
    }
    Ok(Outcome { result: json!({ "symbols": symbols }), checks })
}

fn harness(r: CheckReport) -> Outcome {
    Outcome { result: json!({ "trials": r.trials, "passed": r.passed }), checks: vec![report_check(&r)] }
}

pub fn boundary_check(job: &Job) -> CliResult<Outcome> {
    Ok(harness(verify::boundary_check(job.ctx, job.n, job.trials, job.seed)))
}

pub fn disc_defect_check(job: &Job) -> CliResult<Outcome> {
    if job.ctx.eps == Sign::Minus {
        return Err(maslov::Error::WrongContext("signed discriminants need eps = 1".into()).into());
    }
    Ok(harness(verify::disc_defect_check(job.ctx, job.n, job.trials, job.seed)))
}

pub fn reduced_check(job: &Job) -> CliResult<Outcome> {
    if !job.ctx.is_symplectic() {
        return Err(maslov::Error::WrongContext("the reduced cocycle needs Q with eps = 1".into()).into());
    }
    Ok(harness(verify::reduced_check(job.ctx, job.n, job.trials, job.seed)))
}

pub fn steinberg_check(job: &Job) -> CliResult<Outcome> {
    let ctx = job.ctx.with_eps(Sign::Plus);
    let (mode, r) = if job.exhaustive {
        ("exhaustive", symbols::steinberg_relations_report_exhaustive(ctx)?)
    } else {
        ("random", symbols::steinberg_relations_report_random(ctx, job.trials, job.seed)?)
    };
    Ok(Outcome {
        result: json!({ "mode": mode, "checked": r.checked, "violations": r.violations.len() }),
        checks: vec![relation_check("steinberg", &r)],
    })
}

/// A single pair `{"g1": M, "g2": M}`, or a harness otherwise.
pub fn compare(job: &Job) -> CliResult<Outcome> {
    let ctx = job.ctx.with_eps(Sign::Plus);
    if let (Some(g1), Some(g2)) = (job.input.get("g1"), job.input.get("g2")) {
        let (g1, g2) = (matrix(&ctx, g1)?, matrix(&ctx, g2)?);
        for g in [&g1, &g2] {
            if g.rows() != 2 || !g.is_square() || !g.det().is_one() {
                return Err(maslov::Error::ConstraintViolated(format!("{g} is not in SL_2")).into());
            }
        }
        let stbg = symbols::stbg(&g1, &g2)?;
        let c = symbols::compare_stbg_maslov(&g1, &g2)?;
        let result = json!({
            "stbg": stbg.to_string(),
            "r_stbg": witt_json(&c.r_stbg),
            "closed_form": witt_json(&c.closed_form),
            "reduced_maslov": witt_json(&c.reduced),
            "witness_route": witt_json(&c.witness_route),
        });
        return Ok(Outcome { result, checks: vec![check("routes_agree", c.agree(), json!(null))] });
    }
    let r = if job.exhaustive {
        verify::comparison_exhaustive(ctx)?
    } else {
        verify::comparison_random(ctx, job.trials, job.seed)
    };
    Ok(harness(r))
}

pub fn census(job: &Job) -> CliResult<Outcome> {
    let space = HyperbolicSpace::new(job.ctx, job.n);
    let c = cocycle::orbit_census(&space)?;
    let classes: Vec<Value> = c
        .classes
        .iter()
        .map(|k| json!({ "kappa": matrix_json(k.kappa.matrix()), "size": k.size, "orbits": k.orbits }))
        .collect();
    let result = json!({
        "lagrangians": c.lagrangians,
        "triples": c.triples,
        "classes": c.classes.len(),
        "orbit_sizes": c.orbit_sizes(),
        "kappa_classes": classes,
        "fibers_are_orbits": c.fibers_are_orbits,
    });
    Ok(Outcome { result, checks: vec![check("fibers_are_orbits", c.fibers_are_orbits, json!(null))] })
}

pub fn lagrangians_cmd(job: &Job) -> CliResult<Outcome> {
    let space = HyperbolicSpace::new(job.ctx, job.n);
    let all = enumerate_lagrangians(&space)?;
    let bases: Vec<Value> = all.iter().map(|l| matrix_json(l.basis())).collect();
    Ok(Outcome::plain(json!({ "count": all.len(), "lagrangians": bases })))
}
