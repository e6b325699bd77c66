//! Seeded verification harnesses. Each trial draws from its own generator
//! (seed, trial index), so reports do not depend on thread scheduling.

use rand_chacha::ChaCha8Rng;

use crate::cocycle::{
    boundary_defect, disc_defect, kashiwara_class, maslov, reduced_maslov, reduced_maslov_explicit, relation_check,
    tau_cocycle_defect,
};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, Sign};
use crate::forms::is_isometric;
use crate::lagrange::{kappa, random_unitary, HyperbolicSpace};
use crate::sampling::{self, run_trials};
use crate::symbols::{compare_stbg_maslov, random_sl2, sl2_elements};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_020_514;

/// Word length and entry bound used for random inputs.
const WORD: usize = 4;
const BOUND: i64 = 3;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.trials
    }

    fn collect(name: &str, outcomes: Vec<Result<()>>) -> CheckReport {
        let mut report = CheckReport { name: name.to_string(), trials: outcomes.len(), ..Default::default() };
        for (i, o) in outcomes.into_iter().enumerate() {
            match o {
                Ok(()) => report.passed += 1,
                Err(e) => report.failures.push(format!("trial {i}: {e}")),
            }
        }
        report
    }
}

fn fail(msg: impl Into<String>) -> Error {
    Error::ConstraintViolated(msg.into())
}

fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(fail(msg))
    }
}

fn sample<T>(rng: &mut ChaCha8Rng, what: &str, f: impl Fn(&mut ChaCha8Rng) -> Option<T>) -> Result<T> {
    f(rng).ok_or_else(|| Error::NotFound(format!("could not sample {what}")))
}

/// The Witt-valued cocycle vanishes on boundaries of random quadruples.
pub fn boundary_check(ctx: FieldCtx, n: usize, trials: usize, seed: u64) -> CheckReport {
    let space = HyperbolicSpace::new(ctx, n);
    let out = run_trials(trials, seed, |rng, _| {
        let [x, y, z, z1] = sample(rng, "a quadruple", |r| sampling::random_quadruple(r, &space, WORD, BOUND))?;
        ensure(boundary_defect(&x, &y, &z, &z1)?.is_zero(), "nonzero boundary")
    });
    CheckReport::collect("boundary", out)
}

/// `[r] + [-r] = 0` and the four-term relation for `r + s + t = 0`.
pub fn relation_harness(ctx: FieldCtx, n: usize, trials: usize, seed: u64) -> CheckReport {
    let out = run_trials(trials, seed, |rng, _| {
        let eps = ctx.eps;
        for _ in 0..500 {
            let r = sampling::random_hermitian(rng, ctx, eps, n, BOUND);
            let s = sampling::random_hermitian(rng, ctx, eps, n, BOUND);
            let t = r.add(&s)?.neg();
            if !(r.is_nondegenerate() && s.is_nondegenerate() && t.is_nondegenerate()) {
                continue;
            }
            let wr = crate::witt::witt_class(&r)?;
            ensure(wr.add(&crate::witt::witt_class(&r.neg())?)?.is_zero(), "[r] + [-r] ≠ 0")?;
            return ensure(relation_check(&r, &s, &t)?.is_zero(), "four-term relation fails");
        }
        Err(Error::NotFound("no admissible (r, s, t)".into()))
    });
    CheckReport::collect("relation", out)
}

/// Kashiwara's class agrees with the Maslov class on opposite triples.
pub fn kashiwara_check(n: usize, trials: usize, seed: u64) -> CheckReport {
    let space = HyperbolicSpace::new(FieldCtx::symplectic_q(), n);
    let out = run_trials(trials, seed, |rng, _| {
        let (x, y, z) = sample(rng, "a triple", |r| sampling::random_opposite_triple(r, &space, WORD, BOUND))?;
        ensure(kashiwara_class(&x, &y, &z)? == maslov(&x, &y, &z)?, "Kashiwara class differs from Maslov class")
    });
    CheckReport::collect("kashiwara", out)
}

/// The group 2-cocycle identity for τ on random (possibly non-generic)
/// unitary triples.
pub fn tau_check(n: usize, trials: usize, seed: u64) -> CheckReport {
    let space = HyperbolicSpace::new(FieldCtx::symplectic_q(), n);
    let o = space.standard_pair().0;
    let out = run_trials(trials, seed, |rng, _| {
        // short words keep many configurations non-generic
        let g = random_unitary(rng, &space, 2, 2);
        let h = random_unitary(rng, &space, 2, 2);
        let i = random_unitary(rng, &space, 2, 2);
        ensure(tau_cocycle_defect(&g, &h, &i, &o)?.is_zero(), "τ cocycle identity fails")
    });
    CheckReport::collect("tau", out)
}

/// `disc m + df` is the identity on random based triples.
pub fn disc_defect_check(ctx: FieldCtx, n: usize, trials: usize, seed: u64) -> CheckReport {
    let space = HyperbolicSpace::new(ctx.with_eps(Sign::Plus), n);
    let out = run_trials(trials, seed, |rng, _| {
        let bt = sample(rng, "a based triple", |r| sampling::random_based_triple(r, &space, WORD, BOUND))?;
        ensure(disc_defect(&bt)?.is_identity(), "disc m + df is not the identity")
    });
    CheckReport::collect("disc-defect", out)
}

/// The reduced cocycle lies in `II` and matches the witness formula.
pub fn reduced_check(ctx: FieldCtx, n: usize, trials: usize, seed: u64) -> CheckReport {
    let space = HyperbolicSpace::new(ctx, n);
    let out = run_trials(trials, seed, |rng, _| {
        let bt = sample(rng, "a based triple", |r| sampling::random_based_triple(r, &space, WORD, BOUND))?;
        let m = reduced_maslov(&bt)?;
        ensure(m.in_ii()?, "reduced value outside II")?;
        ensure(m == reduced_maslov_explicit(&space, &bt.witnesses()?)?, "witness formula disagrees")
    });
    CheckReport::collect("reduced", out)
}

/// Cyclic invariance, the swap law and unitary invariance of κ.
pub fn kappa_symmetry_check(ctx: FieldCtx, n: usize, trials: usize, seed: u64) -> CheckReport {
    let space = HyperbolicSpace::new(ctx, n);
    let out = run_trials(trials, seed, |rng, _| {
        let (x, y, z) = sample(rng, "a triple", |r| sampling::random_opposite_triple(r, &space, WORD, BOUND))?;
        let t = kappa(&x, &y, &z)?;
        ensure(is_isometric(&t, &kappa(&y, &z, &x)?)?, "κ not cyclic")?;
        ensure(is_isometric(&t.neg(), &kappa(&x, &z, &y)?)?, "κ swap law fails")?;
        let g = random_unitary(rng, &space, WORD, BOUND);
        ensure(is_isometric(&t, &kappa(&g.apply(&x), &g.apply(&y), &g.apply(&z))?)?, "κ not invariant")
    });
    CheckReport::collect("kappa-symmetry", out)
}

/// `R∘stbg` against the closed form and the reduced-Maslov routes on random
/// generic pairs; non-generic draws are resampled.
pub fn comparison_random(ctx: FieldCtx, trials: usize, seed: u64) -> CheckReport {
    let out = run_trials(trials, seed, |rng, _| {
        for _ in 0..1000 {
            let g1 = random_sl2(rng, ctx, 6);
            let g2 = random_sl2(rng, ctx, 6);
            match compare_stbg_maslov(&g1, &g2) {
                Err(Error::NonGeneric(_)) => continue,
                Err(e) => return Err(e),
                Ok(c) => return ensure(c.agree(), "comparison fails"),
            }
        }
        Err(Error::NotFound("no generic pair".into()))
    });
    CheckReport::collect("compare", out)
}

/// Every generic pair of `SL_2(F_p)`.
pub fn comparison_exhaustive(ctx: FieldCtx) -> Result<CheckReport> {
    use rayon::prelude::*;
    let all = sl2_elements(ctx)?;
    let out: Vec<Option<Result<()>>> = all
        .par_iter()
        .flat_map_iter(|g1| {
            all.iter().map(move |g2| match compare_stbg_maslov(g1, g2) {
                Err(Error::NonGeneric(_)) => None,
                Err(e) => Some(Err(e)),
                Ok(c) => Some(ensure(c.agree(), &format!("comparison fails at {g1} / {g2}"))),
            })
        })
        .collect();
    Ok(CheckReport::collect("compare", out.into_iter().flatten().collect()))
}
