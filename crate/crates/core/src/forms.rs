//! ε-hermitian forms: congruence, diagonalization, radicals and isometry.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldKind, Scalar, Sign};
use crate::matrix::Matrix;
use crate::witt::invariants;

/// A square matrix `t` with `t = ε t^J`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormMatrix {
    matrix: Matrix,
    eps: Sign,
}

impl FormMatrix {
    pub fn new(matrix: Matrix, eps: Sign) -> Result<FormMatrix> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!("{}x{} form", matrix.rows(), matrix.cols())));
        }
        let eps_s = matrix.ctx().from_int(eps.value());
        if matrix != matrix.conj_transpose().scale(&eps_s) {
            return Err(Error::NotHermitian);
        }
        Ok(FormMatrix { matrix, eps })
    }

    pub fn diagonal(ctx: FieldCtx, entries: &[Scalar], eps: Sign) -> Result<FormMatrix> {
        FormMatrix::new(Matrix::diagonal(ctx, entries), eps)
    }

    pub fn from_ints(ctx: FieldCtx, rows: &[&[i64]], eps: Sign) -> Result<FormMatrix> {
        FormMatrix::new(Matrix::from_ints(ctx, rows), eps)
    }

    pub fn empty(ctx: FieldCtx, eps: Sign) -> FormMatrix {
        FormMatrix { matrix: Matrix::zeros(ctx, 0, 0), eps }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.matrix.ctx()
    }

    pub fn eps(&self) -> Sign {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn det(&self) -> Scalar {
        self.matrix.det()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.matrix.is_invertible()
    }

    pub fn neg(&self) -> FormMatrix {
        FormMatrix { matrix: self.matrix.neg(), eps: self.eps }
    }

    pub fn direct_sum(&self, other: &FormMatrix) -> Result<FormMatrix> {
        if self.eps != other.eps || self.ctx().kind != other.ctx().kind {
            return Err(Error::ContextMismatch);
        }
        Ok(FormMatrix { matrix: self.matrix.direct_sum(&other.matrix), eps: self.eps })
    }

    /// `t^{-J}` of an invertible form, again ε-hermitian.
    pub fn inverse(&self) -> Result<FormMatrix> {
        Ok(FormMatrix { matrix: self.matrix.inverse()?, eps: self.eps })
    }

    pub fn add(&self, other: &FormMatrix) -> Result<FormMatrix> {
        if self.eps != other.eps || self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("form sum".into()));
        }
        Ok(FormMatrix { matrix: self.matrix.add(&other.matrix), eps: self.eps })
    }
}

impl fmt::Display for FormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.matrix)
    }
}

/// `g^J t g`.
pub fn congruence(t: &FormMatrix, g: &Matrix) -> Result<FormMatrix> {
    if !g.is_square() || g.rows() != t.dim() {
        return Err(Error::DimensionMismatch(format!("{}-dim form, {}x{} transform", t.dim(), g.rows(), g.cols())));
    }
    if !g.is_invertible() {
        return Err(Error::SingularTransform);
    }
    Ok(FormMatrix { matrix: g.conj_transpose().mul(&t.matrix).mul(g), eps: t.eps })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    pub diag: Vec<Scalar>,
    pub radical_dim: usize,
    /// `transform^J · t · transform = diag ⊕ 0`.
    pub transform: Matrix,
}

/// Symmetric Gaussian elimination.
///
/// Works for hermitian forms and, when the involution is nontrivial, for
/// skew-hermitian ones; skew forms under the identity involution have no
/// diagonal shape and are rejected.
pub fn diagonalize(t: &FormMatrix) -> Result<Diagonalization> {
    let ctx = t.ctx();
    let theta = ctx.theta();
    if t.eps == Sign::Minus && theta.is_none() {
        return Err(Error::WrongSymmetry);
    }
    let n = t.dim();
    let mut a = t.matrix.clone();
    let mut g = Matrix::identity(ctx, n);
    let mut k = 0;
    while k < n {
        if let Some(i) = (k..n).find(|&i| !a[(i, i)].is_zero()) {
            swap(&mut a, &mut g, k, i);
        } else {
            let Some((i, j)) = (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).find(|&(i, j)| !a[(i, j)].is_zero())
            else {
                break;
            };
            // v = e_i + e_j·λ with λ = a_ij^{-1} c has h(v,v) = c + ε c^J ≠ 0
            let c = match t.eps {
                Sign::Plus => ctx.one(),
                Sign::Minus => theta.clone().expect("checked above"),
            };
            let lambda = &a[(i, j)].inv()? * &c;
            add_multiple(&mut a, &mut g, j, i, &lambda);
            swap(&mut a, &mut g, k, i);
        }
        let pivot_inv = a[(k, k)].inv()?;
        for j in k + 1..n {
            if !a[(k, j)].is_zero() {
                let mu = -&(&pivot_inv * &a[(k, j)]);
                add_multiple(&mut a, &mut g, k, j, &mu);
            }
        }
        k += 1;
    }
    let diag = (0..k).map(|i| a[(i, i)].clone()).collect();
    Ok(Diagonalization { diag, radical_dim: n - k, transform: g })
}

/// Column `dst += column src · λ` together with the matching row operation.
fn add_multiple(a: &mut Matrix, g: &mut Matrix, src: usize, dst: usize, lambda: &Scalar) {
    let n = a.rows();
    for i in 0..n {
        let delta = &a[(i, src)] * lambda;
        a[(i, dst)] = &a[(i, dst)] + &delta;
        let delta = &g[(i, src)] * lambda;
        g[(i, dst)] = &g[(i, dst)] + &delta;
    }
    let lj = lambda.conj();
    for j in 0..n {
        let delta = &lj * &a[(src, j)];
        a[(dst, j)] = &a[(dst, j)] + &delta;
    }
}

fn swap(a: &mut Matrix, g: &mut Matrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap_rows(i, j);
    let n = a.rows();
    for r in 0..n {
        let tmp = a[(r, i)].clone();
        a[(r, i)] = a[(r, j)].clone();
        a[(r, j)] = tmp;
        let tmp = g[(r, i)].clone();
        g[(r, i)] = g[(r, j)].clone();
        g[(r, j)] = tmp;
    }
}

/// The form induced on a complement of the radical, and the radical's
/// dimension.
pub fn radical_split(t: &FormMatrix) -> (FormMatrix, usize) {
    let kernel = t.matrix.kernel();
    let c = kernel.complement_columns();
    let induced = c.conj_transpose().mul(&t.matrix).mul(&c);
    (FormMatrix { matrix: induced, eps: t.eps }, kernel.cols())
}

/// Decides whether two nondegenerate forms are congruent, by classical
/// invariants.
pub fn is_isometric(t1: &FormMatrix, t2: &FormMatrix) -> Result<bool> {
    if t1.ctx().kind != t2.ctx().kind || t1.eps != t2.eps {
        return Err(Error::ContextMismatch);
    }
    if !t1.is_nondegenerate() || !t2.is_nondegenerate() {
        return Err(Error::DegenerateInput);
    }
    if t1.dim() != t2.dim() {
        return Ok(false);
    }
    let ctx = t1.ctx();
    if t1.eps == Sign::Minus && ctx.involution_is_identity() {
        return Ok(true);
    }
    let d1 = hermitian_diagonal(t1)?;
    let d2 = hermitian_diagonal(t2)?;
    Ok(match ctx.kind {
        FieldKind::FrobeniusQuadratic(_) => true,
        FieldKind::PrimeFieldId(_) => {
            ctx.norm_class(&product(&d1, ctx))? == ctx.norm_class(&product(&d2, ctx))?
        }
        FieldKind::RationalsId => {
            let q1 = invariants::rationals(&d1);
            let q2 = invariants::rationals(&d2);
            invariants::isometric_over_q(&q1, &q2)
        }
        FieldKind::QuadExtConj(d) => {
            let q1 = invariants::trace_form(&invariants::rationals(&d1), d);
            let q2 = invariants::trace_form(&invariants::rationals(&d2), d);
            invariants::isometric_over_q(&q1, &q2)
        }
    })
}

/// Diagonal entries in the fixed field of a form isometric to `t`, or to
/// `θ·t` when `t` is skew-hermitian.
pub(crate) fn hermitian_diagonal(t: &FormMatrix) -> Result<Vec<Scalar>> {
    let d = diagonalize(t)?;
    Ok(match t.eps {
        Sign::Plus => d.diag,
        Sign::Minus => {
            let theta = t.ctx().theta().ok_or(Error::WrongSymmetry)?;
            d.diag.iter().map(|x| &theta * x).collect()
        }
    })
}

fn product(xs: &[Scalar], ctx: FieldCtx) -> Scalar {
    xs.iter().fold(ctx.one(), |acc, x| &acc * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldCtx {
        FieldCtx::rationals()
    }

    pub(crate) fn random_form<R: rand::Rng>(ctx: FieldCtx, eps: Sign, n: usize, rng: &mut R) -> FormMatrix {
        let m = Matrix::random(ctx, rng, n, n, 3);
        let e = ctx.from_int(eps.value());
        FormMatrix::new(m.add(&m.conj_transpose().scale(&e)), eps).unwrap()
    }

    #[test]
    fn congruence_examples() {
        let t = FormMatrix::from_ints(q(), &[&[1]], Sign::Plus).unwrap();
        let g = Matrix::from_ints(q(), &[&[2]]);
        assert_eq!(congruence(&t, &g).unwrap().matrix(), &Matrix::from_ints(q(), &[&[4]]));

        let skew = FormMatrix::from_ints(q(), &[&[0, -1], &[1, 0]], Sign::Minus).unwrap();
        assert_eq!(congruence(&skew, &Matrix::identity(q(), 2)).unwrap(), skew);

        let t = FormMatrix::from_ints(q(), &[&[-1, 0], &[0, 3]], Sign::Plus).unwrap();
        let g = Matrix::from_ints(q(), &[&[1, 1], &[0, 1]]);
        let expected = Matrix::from_ints(q(), &[&[-1, -1], &[-1, 2]]);
        assert_eq!(congruence(&t, &g).unwrap().matrix(), &expected);

        assert_eq!(congruence(&t, &Matrix::from_ints(q(), &[&[1, 1], &[1, 1]])), Err(Error::SingularTransform));
        assert!(matches!(congruence(&t, &Matrix::identity(q(), 3)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn rejects_non_hermitian() {
        assert_eq!(FormMatrix::from_ints(q(), &[&[0, 1], &[2, 0]], Sign::Plus), Err(Error::NotHermitian));
        assert_eq!(FormMatrix::from_ints(q(), &[&[1, 0], &[0, 1]], Sign::Minus), Err(Error::NotHermitian));
    }

    #[test]
    fn diagonalize_examples() {
        let h = FormMatrix::from_ints(q(), &[&[0, 1], &[1, 0]], Sign::Plus).unwrap();
        let d = diagonalize(&h).unwrap();
        assert_eq!(d.radical_dim, 0);
        let diag = FormMatrix::diagonal(q(), &d.diag, Sign::Plus).unwrap();
        let split = FormMatrix::from_ints(q(), &[&[1, 0], &[0, -1]], Sign::Plus).unwrap();
        assert!(is_isometric(&diag, &split).unwrap());

        let t = FormMatrix::from_ints(q(), &[&[1, 0, 0], &[0, 0, 0], &[0, 0, 3]], Sign::Plus).unwrap();
        let d = diagonalize(&t).unwrap();
        assert_eq!(d.diag, vec![q().from_int(1), q().from_int(3)]);
        assert_eq!(d.radical_dim, 1);

        let zero = FormMatrix::from_ints(q(), &[&[0, 0], &[0, 0]], Sign::Plus).unwrap();
        let d = diagonalize(&zero).unwrap();
        assert!(d.diag.is_empty());
        assert_eq!(d.radical_dim, 2);

        let skew = FormMatrix::from_ints(q(), &[&[0, -1], &[1, 0]], Sign::Minus).unwrap();
        assert_eq!(diagonalize(&skew), Err(Error::WrongSymmetry));
    }

    fn check_witness(t: &FormMatrix, d: &Diagonalization) {
        let ctx = t.ctx();
        let mut target = d.diag.clone();
        target.extend(std::iter::repeat_n(ctx.zero(), d.radical_dim));
        assert!(d.transform.is_invertible());
        let got = d.transform.conj_transpose().mul(t.matrix()).mul(&d.transform);
        assert_eq!(got, Matrix::diagonal(ctx, &target));
        assert!(d.diag.iter().all(|x| !x.is_zero()));
        assert_eq!(d.diag.len() + d.radical_dim, t.dim());
    }

    #[test]
    fn diagonalization_witness_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cases = [
            (FieldCtx::rationals(), Sign::Plus),
            (FieldCtx::prime(5).unwrap(), Sign::Plus),
            (FieldCtx::prime(3).unwrap(), Sign::Plus),
            (FieldCtx::frobenius(3).unwrap(), Sign::Plus),
            (FieldCtx::frobenius(3).unwrap(), Sign::Minus),
            (FieldCtx::quad(-1).unwrap(), Sign::Plus),
            (FieldCtx::quad(-1).unwrap(), Sign::Minus),
        ];
        for (ctx, eps) in cases {
            for trial in 0..500 {
                let n = 1 + trial % 4;
                let mut t = random_form(ctx, eps, n, &mut rng);
                if trial % 5 == 0 {
                    // force a zero diagonal so the off-diagonal fix is exercised
                    let mut m = t.matrix().clone();
                    for i in 0..n {
                        m[(i, i)] = ctx.zero();
                    }
                    t = FormMatrix::new(m, eps).unwrap();
                }
                check_witness(&t, &diagonalize(&t).unwrap());
            }
        }
    }

    #[test]
    fn isometry_examples() {
        let a = FormMatrix::from_ints(q(), &[&[1, 0], &[0, -1]], Sign::Plus).unwrap();
        let b = FormMatrix::from_ints(q(), &[&[0, 1], &[1, 0]], Sign::Plus).unwrap();
        assert!(is_isometric(&a, &b).unwrap());
        // explicit witness g = [[1,1],[1/2,-1/2]]
        let g = Matrix::from_rows(
            q(),
            vec![
                vec![q().from_int(1), q().from_int(1)],
                vec![q().parse_scalar("1/2").unwrap(), q().parse_scalar("-1/2").unwrap()],
            ],
        )
        .unwrap();
        assert_eq!(congruence(&b, &g).unwrap().matrix(), &Matrix::from_ints(q(), &[&[1, 0], &[0, -1]]));

        let f7 = FieldCtx::prime(7).unwrap();
        let one = FormMatrix::from_ints(f7, &[&[1]], Sign::Plus).unwrap();
        let two = FormMatrix::from_ints(f7, &[&[2]], Sign::Plus).unwrap();
        assert_eq!(f7.from_int(3).pow(2), f7.from_int(2));
        assert!(is_isometric(&one, &two).unwrap());

        let plus = FormMatrix::from_ints(q(), &[&[1, 0], &[0, 1]], Sign::Plus).unwrap();
        assert!(!is_isometric(&plus, &a).unwrap());

        let degenerate = FormMatrix::from_ints(q(), &[&[1, 0], &[0, 0]], Sign::Plus).unwrap();
        assert_eq!(is_isometric(&degenerate, &a), Err(Error::DegenerateInput));
    }

    #[test]
    fn rational_isometry_needs_hasse() {
        // all three agree in dimension, determinant class and signature;
        // (3,3)_3 = -1 separates ⟨3,3⟩, while 2 and 5 are sums of two squares
        let f = |a: i64, b: i64| FormMatrix::from_ints(q(), &[&[a, 0], &[0, b]], Sign::Plus).unwrap();
        assert!(is_isometric(&f(1, 1), &f(2, 2)).unwrap());
        assert!(!is_isometric(&f(1, 1), &f(3, 3)).unwrap());
        assert!(is_isometric(&f(1, 1), &f(5, 5)).unwrap());
    }

    #[test]
    fn congruent_forms_are_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (ctx, eps) in [
            (FieldCtx::rationals(), Sign::Plus),
            (FieldCtx::prime(5).unwrap(), Sign::Plus),
            (FieldCtx::frobenius(3).unwrap(), Sign::Minus),
            (FieldCtx::quad(-1).unwrap(), Sign::Plus),
            (FieldCtx::quad(-1).unwrap(), Sign::Minus),
            (FieldCtx::rationals(), Sign::Minus),
        ] {
            let mut done = 0;
            while done < 60 {
                let n = 1 + done % 3;
                let n = if eps == Sign::Minus && ctx.involution_is_identity() { 2 * n } else { n };
                let t = random_form(ctx, eps, n, &mut rng);
                if !t.is_nondegenerate() {
                    continue;
                }
                let g = Matrix::random_invertible(ctx, &mut rng, n, 2);
                assert!(is_isometric(&t, &congruence(&t, &g).unwrap()).unwrap());
                done += 1;
            }
        }
    }

    #[test]
    fn isometry_is_an_equivalence_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ctx = FieldCtx::prime(3).unwrap();
        let mut forms = Vec::new();
        while forms.len() < 20 {
            let t = random_form(ctx, Sign::Plus, 2, &mut rng);
            if t.is_nondegenerate() {
                forms.push(t);
            }
        }
        for a in &forms {
            assert!(is_isometric(a, a).unwrap());
            for b in &forms {
                let ab = is_isometric(a, b).unwrap();
                assert_eq!(ab, is_isometric(b, a).unwrap());
                for c in &forms {
                    if ab && is_isometric(b, c).unwrap() {
                        assert!(is_isometric(a, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn radical_split_examples() {
        let t = FormMatrix::from_ints(q(), &[&[1, 0], &[0, 0]], Sign::Plus).unwrap();
        let (nd, r) = radical_split(&t);
        assert_eq!(r, 1);
        assert_eq!(nd, FormMatrix::from_ints(q(), &[&[1]], Sign::Plus).unwrap());

        let zero = FormMatrix::new(Matrix::zeros(q(), 3, 3), Sign::Plus).unwrap();
        let (nd, r) = radical_split(&zero);
        assert_eq!((nd.dim(), r), (0, 3));

        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for k in 0..4 {
            let t = random_form(q(), Sign::Plus, 3, &mut rng);
            let padded = t.direct_sum(&FormMatrix::new(Matrix::zeros(q(), k, k), Sign::Plus).unwrap()).unwrap();
            let (nd, r) = radical_split(&padded);
            assert!(r >= k);
            assert!(nd.is_nondegenerate());
        }
    }
}
