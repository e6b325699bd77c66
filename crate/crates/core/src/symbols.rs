//! Symplectic Steinberg symbols, the reduction map to quaternion forms and
//! the comparison of the Steinberg cocycle of `SL_2` with the reduced Maslov
//! cocycle.

use std::collections::BTreeMap;
use std::fmt;

use crate::cocycle::{reduced_maslov, reduced_maslov_explicit, BasedTriple, Witnesses};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, Scalar, Sign};
use crate::forms::FormMatrix;
use crate::lagrange::HyperbolicSpace;
use crate::matrix::Matrix;
use crate::witt::{witt_class, WittClass};

/// `(x, y)_D = ⟨1, -x, -y, xy⟩`.
pub fn quaternion_form(ctx: FieldCtx, x: &Scalar, y: &Scalar) -> Result<FormMatrix> {
    if x.is_zero() || y.is_zero() {
        return Err(Error::ZeroInput);
    }
    let entries = [ctx.one(), -x, -y, x * y];
    FormMatrix::diagonal(ctx, &entries, Sign::Plus)
}

/// A formal integer combination of symbols `{x, y}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolSum {
    terms: BTreeMap<(Scalar, Scalar), i64>,
}

impl SymbolSum {
    pub fn new() -> SymbolSum {
        SymbolSum::default()
    }

    pub fn symbol(x: Scalar, y: Scalar) -> SymbolSum {
        SymbolSum::new().plus(1, x, y)
    }

    pub fn plus(mut self, k: i64, x: Scalar, y: Scalar) -> SymbolSum {
        let entry = self.terms.entry((x, y)).or_insert(0);
        *entry += k;
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
        self
    }

    pub fn add(&self, other: &SymbolSum) -> SymbolSum {
        other.terms.iter().fold(self.clone(), |acc, ((x, y), k)| acc.plus(*k, x.clone(), y.clone()))
    }

    pub fn neg(&self) -> SymbolSum {
        SymbolSum { terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect() }
    }

    pub fn sub(&self, other: &SymbolSum) -> SymbolSum {
        self.add(&other.neg())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Scalar, &Scalar, i64)> {
        self.terms.iter().map(|((x, y), k)| (x, y, *k))
    }
}

impl fmt::Display for SymbolSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(x, y, k)| match k {
                1 => format!("{{{x},{y}}}"),
                -1 => format!("-{{{x},{y}}}"),
                _ => format!("{k}{{{x},{y}}}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `R({x, y}) = [(x, y)_D]`, extended additively.
pub fn r_map(ctx: FieldCtx, sum: &SymbolSum) -> Result<WittClass> {
    let mut acc = WittClass::zero(ctx.with_eps(Sign::Plus));
    for (x, y, k) in sum.terms() {
        let class = witt_class(&quaternion_form(ctx, x, y)?)?;
        acc = acc.add(&class.times(k))?;
    }
    Ok(acc)
}

/// The five defining relations of `KSp_2`, as pairs of sides, for a choice
/// of units `s, t, r`. The last one is absent when `s = 1`.
pub fn steinberg_relations(s: &Scalar, t: &Scalar, r: &Scalar) -> Vec<(usize, SymbolSum, SymbolSum)> {
    let one = s.one_like();
    let sym = |a: &Scalar, b: &Scalar| SymbolSum::symbol(a.clone(), b.clone());
    let mut out = vec![
        (1, sym(&(s * t), r).add(&sym(s, t)), sym(s, &(t * r)).add(&sym(t, r))),
        (2, sym(s, &one), SymbolSum::new()),
        (2, sym(&one, s), SymbolSum::new()),
        (3, sym(s, t), sym(&t.inv().expect("unit"), s)),
        (4, sym(s, t), sym(s, &-(s * t))),
    ];
    if !s.is_one() {
        out.push((5, sym(s, t), sym(s, &(&(&one - s) * t))));
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationReport {
    /// Instances checked, per relation 1..=5.
    pub checked: [usize; 5],
    pub violations: Vec<String>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(&mut self, other: RelationReport) {
        for i in 0..5 {
            self.checked[i] += other.checked[i];
        }
        self.violations.extend(other.violations);
    }
}

/// Checks that `R` kills every relation instance built from `(s, t, r)`.
pub fn check_relations(ctx: FieldCtx, s: &Scalar, t: &Scalar, r: &Scalar) -> Result<RelationReport> {
    let mut report = RelationReport::default();
    for (k, lhs, rhs) in steinberg_relations(s, t, r) {
        report.checked[k - 1] += 1;
        if r_map(ctx, &lhs)? != r_map(ctx, &rhs)? {
            report.violations.push(format!("relation {k} at s={s}, t={t}, r={r}: {lhs} vs {rhs}"));
        }
    }
    Ok(report)
}

/// Every relation over all of `F_p^*` (all triples `(s, t, r)`).
pub fn steinberg_relations_report_exhaustive(ctx: FieldCtx) -> Result<RelationReport> {
    use rayon::prelude::*;
    let units: Vec<Scalar> = ctx
        .elements()
        .ok_or_else(|| Error::WrongContext("exhaustive check needs a finite field".into()))?
        .into_iter()
        .filter(|x| !x.is_zero())
        .collect();
    let reports: Vec<Result<RelationReport>> = units
        .par_iter()
        .map(|s| {
            let mut rep = RelationReport::default();
            for t in &units {
                for r in &units {
                    rep.merge(check_relations(ctx, s, t, r)?);
                }
            }
            Ok(rep)
        })
        .collect();
    let mut total = RelationReport::default();
    for r in reports {
        total.merge(r?);
    }
    Ok(total)
}

/// Seeded random relation instances.
pub fn steinberg_relations_report_random(ctx: FieldCtx, trials: usize, seed: u64) -> Result<RelationReport> {
    let reports = crate::sampling::run_trials(trials, seed, |rng, _| {
        let s = ctx.random_nonzero(rng, 12);
        let t = ctx.random_nonzero(rng, 12);
        let r = ctx.random_nonzero(rng, 12);
        check_relations(ctx, &s, &t, &r)
    });
    let mut total = RelationReport::default();
    for r in reports {
        total.merge(r?);
    }
    Ok(total)
}

/// `u_t`, `a_r`, `b_r` in `SL_2`.
pub fn sl2_u(ctx: FieldCtx, t: &Scalar) -> Matrix {
    Matrix::from_rows(ctx, vec![vec![ctx.one(), t.clone()], vec![ctx.zero(), ctx.one()]]).expect("2x2")
}

pub fn sl2_a(ctx: FieldCtx, r: &Scalar) -> Result<Matrix> {
    Matrix::from_rows(ctx, vec![vec![r.clone(), ctx.zero()], vec![ctx.zero(), r.inv()?]])
}

pub fn sl2_b(ctx: FieldCtx, r: &Scalar) -> Result<Matrix> {
    Matrix::from_rows(ctx, vec![vec![ctx.zero(), r.clone()], vec![-&r.inv()?, ctx.zero()]])
}

/// `g = a_r u_t` or `g = u_s b_r u_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sl2Factorization {
    A { r: Scalar, t: Scalar },
    Ub { s: Scalar, r: Scalar, t: Scalar },
}

impl Sl2Factorization {
    pub fn matrix(&self, ctx: FieldCtx) -> Result<Matrix> {
        Ok(match self {
            Sl2Factorization::A { r, t } => sl2_a(ctx, r)?.mul(&sl2_u(ctx, t)),
            Sl2Factorization::Ub { s, r, t } => sl2_u(ctx, s).mul(&sl2_b(ctx, r)?).mul(&sl2_u(ctx, t)),
        })
    }
}

fn require_sl2(g: &Matrix) -> Result<()> {
    if g.rows() != 2 || g.cols() != 2 {
        return Err(Error::DimensionMismatch("expected a 2x2 matrix".into()));
    }
    if !g.det().is_one() {
        return Err(Error::ConstraintViolated("determinant must be 1".into()));
    }
    if !g.ctx().involution_is_identity() {
        return Err(Error::WrongContext("SL_2 normal forms need the identity involution".into()));
    }
    Ok(())
}

/// Bruhat-type normal form of a determinant-one `2×2` matrix.
pub fn generic_decompose(g: &Matrix) -> Result<Sl2Factorization> {
    require_sl2(g)?;
    let (alpha, beta, gamma, delta) = (&g[(0, 0)], &g[(0, 1)], &g[(1, 0)], &g[(1, 1)]);
    if gamma.is_zero() {
        return Ok(Sl2Factorization::A { r: alpha.clone(), t: beta.div(alpha)? });
    }
    Ok(Sl2Factorization::Ub { s: alpha.div(gamma)?, r: -&gamma.inv()?, t: delta.div(gamma)? })
}

fn ub_parts(g: &Matrix) -> Result<(Scalar, Scalar, Scalar)> {
    match generic_decompose(g)? {
        Sl2Factorization::Ub { s, r, t } => Ok((s, r, t)),
        Sl2Factorization::A { .. } => Err(Error::NonGeneric("lower-left entry is zero".into())),
    }
}

/// `(r_1, r_2, t)` with `t = t_1 + s_2`, for a generic pair.
fn generic_parameters(g1: &Matrix, g2: &Matrix) -> Result<(Scalar, Scalar, Scalar)> {
    let (_, r1, t1) = ub_parts(g1)?;
    let (s2, r2, _) = ub_parts(g2)?;
    let t = &t1 + &s2;
    if t.is_zero() {
        return Err(Error::NonGeneric("t_1 + s_2 = 0".into()));
    }
    Ok((r1, r2, t))
}

/// Steinberg normal form `{t/(r_1 r_2), -r_1/r_2} - {-r_1, -r_2}` of the
/// universal cocycle on a generic pair.
pub fn stbg(g1: &Matrix, g2: &Matrix) -> Result<SymbolSum> {
    let (r1, r2, t) = generic_parameters(g1, g2)?;
    let r12 = &r1 * &r2;
    let first = SymbolSum::symbol(t.div(&r12)?, -&r1.div(&r2)?);
    Ok(first.sub(&SymbolSum::symbol(-&r1, -&r2)))
}

/// The three values compared on a generic pair.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub r_stbg: WittClass,
    /// `-[⟨t, r_1 r_2 t, r_1, r_2⟩]`.
    pub closed_form: WittClass,
    /// `m̃(o, g_1 o, g_1 g_2 o)` on based Lagrangians.
    pub reduced: WittClass,
    /// `-m̃` from the witnesses `a = 1, b = r_1^{-1}, c = -r_2^{-1}`.
    pub witness_route: WittClass,
}

impl Comparison {
    pub fn agree(&self) -> bool {
        self.r_stbg == self.closed_form && self.closed_form == self.reduced && self.reduced == self.witness_route
    }
}

pub fn compare_stbg_maslov(g1: &Matrix, g2: &Matrix) -> Result<Comparison> {
    let ctx = g1.ctx().with_eps(Sign::Plus);
    let (r1, r2, t) = generic_parameters(g1, g2)?;
    let r_stbg = r_map(ctx, &stbg(g1, g2)?)?;
    let closed_form = WittClass::from_diagonal(ctx, &[t.clone(), &(&r1 * &r2) * &t, r1.clone(), r2.clone()])?.neg();

    let space = HyperbolicSpace::new(ctx, 1);
    let o = space.standard_pair().0.based();
    let g1u = space.unitary(g1.clone())?;
    let g12 = g1u.compose(&space.unitary(g2.clone())?);
    let bt = BasedTriple::new(o.clone(), g1u.apply_based(&o), g12.apply_based(&o))?;
    let reduced = reduced_maslov(&bt)?;

    let one = Matrix::identity(ctx, 1);
    let w = Witnesses {
        a: one.clone(),
        b: one.scale(&r1.inv()?),
        c: one.scale(&-&r2.inv()?),
        t: FormMatrix::new(one.scale(&t), Sign::Plus)?,
    };
    let witness_route = reduced_maslov_explicit(&space, &w)?.neg();
    Ok(Comparison { r_stbg, closed_form, reduced, witness_route })
}

/// All determinant-one `2×2` matrices over a finite field.
pub fn sl2_elements(ctx: FieldCtx) -> Result<Vec<Matrix>> {
    let all = Matrix::all_matrices(ctx, 2, 2).ok_or_else(|| Error::TooLarge("SL_2 enumeration".into()))?;
    Ok(all.into_iter().filter(|m| m.det().is_one()).collect())
}

/// A random determinant-one matrix `u_s b_r u_t` or `a_r u_t`.
pub fn random_sl2<R: rand::Rng + ?Sized>(rng: &mut R, ctx: FieldCtx, bound: i64) -> Matrix {
    let s = ctx.random(rng, bound);
    let r = ctx.random_nonzero(rng, bound);
    let t = ctx.random(rng, bound);
    let f = if rng.gen_bool(0.9) { Sl2Factorization::Ub { s, r, t } } else { Sl2Factorization::A { r, t } };
    f.matrix(ctx).expect("r is a unit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::{hilbert_symbol, invariants, Place};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldCtx {
        FieldCtx::rationals()
    }

    fn qi(v: i64) -> Scalar {
        q().from_int(v)
    }

    #[test]
    fn quaternion_form_examples() {
        let f = quaternion_form(q(), &qi(1), &qi(7)).unwrap();
        assert!(witt_class(&f).unwrap().is_zero());
        let f = quaternion_form(q(), &qi(-1), &qi(-1)).unwrap();
        assert_eq!(f, FormMatrix::diagonal(q(), &[qi(1), qi(1), qi(1), qi(1)], Sign::Plus).unwrap());
        assert_eq!(witt_class(&f).unwrap().signature(), Some(4));
        let a = quaternion_form(q(), &qi(2), &qi(3)).unwrap();
        let b = quaternion_form(q(), &qi(3), &qi(2)).unwrap();
        assert!(crate::forms::is_isometric(&a, &b).unwrap());
        assert_eq!(quaternion_form(q(), &qi(0), &qi(2)), Err(Error::ZeroInput));
    }

    #[test]
    fn r_map_examples() {
        assert!(r_map(q(), &SymbolSum::symbol(qi(5), qi(1))).unwrap().is_zero());
        assert_eq!(r_map(q(), &SymbolSum::symbol(qi(-1), qi(-1))).unwrap(), WittClass::from_ints(q(), &[1, 1, 1, 1]));
        let sum = SymbolSum::symbol(qi(2), qi(3)).add(&SymbolSum::symbol(qi(3), qi(2)));
        let single = r_map(q(), &SymbolSum::symbol(qi(2), qi(3))).unwrap();
        assert_eq!(r_map(q(), &sum).unwrap(), single.times(2));
        assert!(r_map(q(), &sum).unwrap().in_ii().unwrap());
    }

    #[test]
    fn relation_four_instance() {
        let lhs = quaternion_form(q(), &qi(2), &qi(3)).unwrap();
        let rhs = FormMatrix::diagonal(q(), &[qi(1), qi(-2), qi(6), qi(-12)], Sign::Plus).unwrap();
        assert!(crate::forms::is_isometric(&lhs, &rhs).unwrap());
        assert!(check_relations(q(), &qi(2), &qi(3), &qi(5)).unwrap().passed());
    }

    #[test]
    fn relations_hold_over_small_prime_fields() {
        for p in [3u64, 5, 7] {
            let report = steinberg_relations_report_exhaustive(FieldCtx::prime(p).unwrap()).unwrap();
            assert!(report.passed(), "{:?}", report.violations);
            assert_eq!(report.checked[0], ((p - 1) as usize).pow(3));
        }
        assert!(steinberg_relations_report_random(q(), 40, 3).unwrap().passed());
    }

    #[test]
    fn decompose_examples() {
        let ctx = q();
        let w = Matrix::from_ints(ctx, &[&[0, 1], &[-1, 0]]);
        assert_eq!(generic_decompose(&w).unwrap(), Sl2Factorization::Ub { s: qi(0), r: qi(1), t: qi(0) });
        let m = Matrix::from_ints(ctx, &[&[1, 0], &[1, 1]]);
        let f = generic_decompose(&m).unwrap();
        assert_eq!(f, Sl2Factorization::Ub { s: qi(1), r: qi(-1), t: qi(1) });
        assert_eq!(f.matrix(ctx).unwrap(), m);
        let d = Matrix::from_rows(ctx, vec![vec![qi(2), qi(0)], vec![qi(0), ctx.parse_scalar("1/2").unwrap()]]).unwrap();
        assert_eq!(generic_decompose(&d).unwrap(), Sl2Factorization::A { r: qi(2), t: qi(0) });
        assert!(matches!(generic_decompose(&Matrix::from_ints(ctx, &[&[2, 0], &[0, 1]])), Err(Error::ConstraintViolated(_))));
    }

    #[test]
    fn decompositions_reassemble() {
        let f7 = FieldCtx::prime(7).unwrap();
        for g in sl2_elements(f7).unwrap() {
            assert_eq!(generic_decompose(&g).unwrap().matrix(f7).unwrap(), g);
        }
    }

    #[test]
    fn stbg_examples() {
        let ctx = q();
        let b1 = sl2_b(ctx, &qi(1)).unwrap();
        let g1 = b1.mul(&sl2_u(ctx, &qi(1)));
        let expected = SymbolSum::symbol(qi(1), qi(-1)).sub(&SymbolSum::symbol(qi(-1), qi(-1)));
        assert_eq!(stbg(&g1, &b1).unwrap(), expected);
        assert!(matches!(stbg(&b1, &b1), Err(Error::NonGeneric(_))));

        let bm = sl2_b(ctx, &qi(-1)).unwrap();
        let g1 = bm.mul(&sl2_u(ctx, &qi(1)));
        let expected = SymbolSum::symbol(qi(1), qi(-1)).sub(&SymbolSum::symbol(qi(1), qi(1)));
        assert_eq!(stbg(&g1, &bm).unwrap(), expected);
    }

    #[test]
    fn comparison_example() {
        let ctx = q();
        let b1 = sl2_b(ctx, &qi(1)).unwrap();
        let g1 = b1.mul(&sl2_u(ctx, &qi(1)));
        let c = compare_stbg_maslov(&g1, &b1).unwrap();
        assert!(c.agree());
        assert_eq!(c.r_stbg.signature(), Some(-4));
    }

    #[test]
    fn comparison_over_f5_exhaustive() {
        let f5 = FieldCtx::prime(5).unwrap();
        let all = sl2_elements(f5).unwrap();
        let mut generic = 0;
        for g1 in &all {
            for g2 in &all {
                match compare_stbg_maslov(g1, g2) {
                    Ok(c) => {
                        assert!(c.agree(), "{g1} {g2}");
                        generic += 1;
                    }
                    Err(Error::NonGeneric(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(generic > 0);
    }

    #[test]
    fn signature_law() {
        let grid = [1i64, -1, 2, -2, 3, -3, 5, -5, 30, -30];
        for &x in &grid {
            for &y in &grid {
                let class = witt_class(&quaternion_form(q(), &qi(x), &qi(y)).unwrap()).unwrap();
                let expected = if x < 0 && y < 0 { 4 } else { 0 };
                assert_eq!(class.signature(), Some(expected), "({x},{y})");
            }
        }
    }

    #[test]
    fn quaternion_invariant_is_the_hilbert_symbol() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..200 {
            let x = q().random_nonzero(&mut rng, 40).to_rational().unwrap();
            let y = q().random_nonzero(&mut rng, 40).to_rational().unwrap();
            let one = BigRational::from_integer(BigInt::from(1));
            let form = [one, -x.clone(), -y.clone(), &x * &y];
            let mut places = vec![Place::Infinite];
            places.extend(invariants::relevant_primes(&form).into_iter().map(Place::Finite));
            for v in places {
                assert_eq!(invariants::witt_invariant(&form, &v), hilbert_symbol(&x, &y, &v).unwrap(), "{x} {y} {v}");
            }
        }
    }
}
