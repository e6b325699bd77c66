//! Hyperbolic modules, Lagrangians, opposition and the invariant κ.
//!
//! Vectors of the module `M = D^{2n}` are columns in the standard basis
//! `x_1..x_n, y_1..y_n`, and the `(-ε)`-hermitian form is
//! `h(u, v) = u^J h v` with `h = [[0, -ε], [1, 0]]`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Sign};
use crate::forms::FormMatrix;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HyperbolicSpace {
    pub ctx: FieldCtx,
    pub n: usize,
}

impl HyperbolicSpace {
    pub fn new(ctx: FieldCtx, n: usize) -> HyperbolicSpace {
        HyperbolicSpace { ctx, n }
    }

    pub fn eps(&self) -> Sign {
        self.ctx.eps
    }

    pub fn gram(&self) -> Matrix {
        let ctx = self.ctx;
        let n = self.n;
        let zero = Matrix::zeros(ctx, n, n);
        let minus_eps = Matrix::scalar(ctx, n, &ctx.from_int(-self.eps().value()));
        Matrix::blocks(&zero, &minus_eps, &Matrix::identity(ctx, n), &zero)
    }

    /// `U^J h V` for blocks of column vectors.
    pub fn pairing(&self, u: &Matrix, v: &Matrix) -> Matrix {
        u.conj_transpose().mul(&self.gram()).mul(v)
    }

    pub fn standard_pair(&self) -> (Lagrangian, Lagrangian) {
        let ctx = self.ctx;
        let n = self.n;
        let i = Matrix::identity(ctx, n);
        let z = Matrix::zeros(ctx, n, n);
        (Lagrangian::from_basis_unchecked(*self, i.vstack(&z)), Lagrangian::from_basis_unchecked(*self, z.vstack(&i)))
    }

    /// Standard basis `x` of `X_0` and `y` of `Y_0`, with `h(y_i, x_j) = δ_ij`.
    pub fn standard_bases(&self) -> (Matrix, Matrix) {
        let i = Matrix::identity(self.ctx, self.n);
        let z = Matrix::zeros(self.ctx, self.n, self.n);
        (i.vstack(&z), z.vstack(&i))
    }

    /// `u_t = [[1, t], [0, 1]]` for an ε-hermitian `t`.
    pub fn u_t(&self, t: &FormMatrix) -> Result<Unitary> {
        self.check_form(t)?;
        let ctx = self.ctx;
        let n = self.n;
        let m = Matrix::blocks(&Matrix::identity(ctx, n), t.matrix(), &Matrix::zeros(ctx, n, n), &Matrix::identity(ctx, n));
        Ok(Unitary { matrix: m })
    }

    /// `ℓ_a = diag(a^{-J}, a)`.
    pub fn ell_a(&self, a: &Matrix) -> Result<Unitary> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::DimensionMismatch(format!("ℓ_a needs an {0}x{0} matrix", self.n)));
        }
        let inv = a.inverse()?;
        let z = Matrix::zeros(self.ctx, self.n, self.n);
        Ok(Unitary { matrix: Matrix::blocks(&inv.conj_transpose(), &z, &z, a) })
    }

    /// `w = [[0, 1], [-ε, 0]]`, exchanging `X_0` and `Y_0`.
    pub fn w_element(&self) -> Unitary {
        let ctx = self.ctx;
        let n = self.n;
        let z = Matrix::zeros(ctx, n, n);
        let m = Matrix::blocks(&z, &Matrix::identity(ctx, n), &Matrix::scalar(ctx, n, &ctx.from_int(-self.eps().value())), &z);
        Unitary { matrix: m }
    }

    pub fn identity(&self) -> Unitary {
        Unitary { matrix: Matrix::identity(self.ctx, 2 * self.n) }
    }

    pub fn unitary(&self, m: Matrix) -> Result<Unitary> {
        if m.rows() != 2 * self.n || m.cols() != 2 * self.n {
            return Err(Error::DimensionMismatch("unitary element size".into()));
        }
        if self.pairing(&m, &m) != self.gram() {
            return Err(Error::NotUnitary);
        }
        Ok(Unitary { matrix: m })
    }

    fn check_form(&self, t: &FormMatrix) -> Result<()> {
        if t.dim() != self.n {
            return Err(Error::DimensionMismatch(format!("expected an {0}x{0} form", self.n)));
        }
        if t.eps() != self.eps() {
            return Err(Error::NotHermitian);
        }
        Ok(())
    }

    /// The graph Lagrangian `u_t(Y_0)`, spanned by the columns of `[t; 1]`.
    pub fn graph(&self, t: &FormMatrix) -> Result<Lagrangian> {
        self.check_form(t)?;
        let basis = t.matrix().vstack(&Matrix::identity(self.ctx, self.n));
        Ok(Lagrangian::from_basis_unchecked(*self, basis))
    }

    pub fn lagrangian(&self, basis: Matrix) -> Result<Lagrangian> {
        Lagrangian::new(*self, basis)
    }
}

/// A matrix `g` with `g^J h g = h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Unitary {
    matrix: Matrix,
}

impl Unitary {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn compose(&self, other: &Unitary) -> Unitary {
        Unitary { matrix: self.matrix.mul(&other.matrix) }
    }

    pub fn inverse(&self) -> Unitary {
        Unitary { matrix: self.matrix.inverse().expect("unitary matrices are invertible") }
    }

    pub fn apply(&self, x: &Lagrangian) -> Lagrangian {
        Lagrangian::from_basis_unchecked(x.space, self.matrix.mul(&x.basis))
    }

    pub fn apply_based(&self, x: &BasedLagrangian) -> BasedLagrangian {
        BasedLagrangian { lagrangian: self.apply(&x.lagrangian), basis: self.matrix.mul(&x.basis) }
    }
}

/// A Lagrangian subspace, stored by its reduced column echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lagrangian {
    space: HyperbolicSpace,
    basis: Matrix,
}

impl Lagrangian {
    pub fn new(space: HyperbolicSpace, basis: Matrix) -> Result<Lagrangian> {
        if basis.rows() != 2 * space.n {
            return Err(Error::DimensionMismatch(format!("basis has {} rows, module rank is {}", basis.rows(), 2 * space.n)));
        }
        if basis.rank() != space.n {
            return Err(Error::NotLagrangian(format!("column rank {} instead of {}", basis.rank(), space.n)));
        }
        if !space.pairing(&basis, &basis).is_zero() {
            return Err(Error::NotLagrangian("not totally isotropic".into()));
        }
        Ok(Lagrangian::from_basis_unchecked(space, basis))
    }

    fn from_basis_unchecked(space: HyperbolicSpace, basis: Matrix) -> Lagrangian {
        Lagrangian { space, basis: basis.column_echelon() }
    }

    pub fn space(&self) -> HyperbolicSpace {
        self.space
    }

    /// Canonical basis (reduced column echelon form).
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn based(&self) -> BasedLagrangian {
        BasedLagrangian { lagrangian: self.clone(), basis: self.basis.clone() }
    }

    pub fn contains(&self, v: &Matrix) -> bool {
        self.basis.hstack(v).rank() == self.space.n
    }
}

/// A Lagrangian with a chosen ordered basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedLagrangian {
    lagrangian: Lagrangian,
    basis: Matrix,
}

impl BasedLagrangian {
    pub fn new(lagrangian: Lagrangian, basis: Matrix) -> Result<BasedLagrangian> {
        if basis.rows() != lagrangian.basis.rows() || basis.cols() != lagrangian.space.n {
            return Err(Error::DimensionMismatch("basis shape".into()));
        }
        if basis.rank() != lagrangian.space.n || !lagrangian.contains(&basis) {
            return Err(Error::NotLagrangian("basis does not span the Lagrangian".into()));
        }
        Ok(BasedLagrangian { lagrangian, basis })
    }

    pub fn from_basis(space: HyperbolicSpace, basis: Matrix) -> Result<BasedLagrangian> {
        let lagrangian = Lagrangian::new(space, basis.clone())?;
        Ok(BasedLagrangian { lagrangian, basis })
    }

    pub fn lagrangian(&self) -> &Lagrangian {
        &self.lagrangian
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Same subspace, basis changed to `basis · a`.
    pub fn rebase(&self, a: &Matrix) -> Result<BasedLagrangian> {
        if !a.is_invertible() {
            return Err(Error::SingularInput);
        }
        Ok(BasedLagrangian { lagrangian: self.lagrangian.clone(), basis: self.basis.mul(a) })
    }
}

fn same_space(x: &Lagrangian, y: &Lagrangian) -> Result<()> {
    if x.space != y.space {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

pub fn is_opposite(x: &Lagrangian, y: &Lagrangian) -> Result<bool> {
    same_space(x, y)?;
    Ok(x.basis.hstack(&y.basis).is_invertible())
}

fn require_pairwise_opposite(ls: &[&Lagrangian]) -> Result<()> {
    for i in 0..ls.len() {
        for j in i + 1..ls.len() {
            if !is_opposite(ls[i], ls[j])? {
                return Err(Error::NotPairwiseOpposite);
            }
        }
    }
    Ok(())
}

/// A unitary `g` with `g(X) = X_0` and `g(Y) = Y_0`.
///
/// Uses the echelon basis `x` of `X` and the basis `y` of `Y` with
/// `h(y_i, x_j) = δ_ij`; then `[x | y]` is unitary and `g` is its inverse.
pub fn standardize_pair(x: &Lagrangian, y: &Lagrangian) -> Result<Unitary> {
    let frame = opposite_frame(x, y)?;
    Ok(Unitary { matrix: frame.inverse()? })
}

/// The unitary frame `[x | y]` described in [`standardize_pair`].
pub fn opposite_frame(x: &Lagrangian, y: &Lagrangian) -> Result<Matrix> {
    if !is_opposite(x, y)? {
        return Err(Error::NotOpposite);
    }
    let space = x.space;
    let bx = x.basis.clone();
    let pair = space.pairing(&y.basis, &bx);
    let by = y.basis.mul(&pair.inverse()?.conj_transpose());
    Ok(bx.hstack(&by))
}

/// κ(X, Y, Z): the ε-hermitian `t` with `g(Z) = u_t(Y_0)` where
/// `g = standardize_pair(X, Y)`.
pub fn kappa(x: &Lagrangian, y: &Lagrangian, z: &Lagrangian) -> Result<FormMatrix> {
    require_pairwise_opposite(&[x, y, z])?;
    let g = standardize_pair(x, y)?;
    let n = x.space.n;
    let moved = g.matrix.mul(&z.basis);
    let p = moved.submatrix(0, 0, n, n);
    let q = moved.submatrix(n, 0, n, n);
    let t = p.mul(&q.inverse()?);
    FormMatrix::new(t, x.space.eps())
}

/// Matrix of the edge morphism `[B; A] : A_* -> B_*` in the graded bases
/// `(a, dual of a)` and `(b, dual of b)`.
///
/// Both graded spaces are identified with `M = A ⊕ B`: the dual of `a`
/// becomes the basis `b̃ = b (a^J h b)^{-1}` of `B`, and the dual of `b`
/// becomes `ã = a (b^J h a)^{-1}` of `A`.
pub fn edge_morphism(space: &HyperbolicSpace, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let b_dual = b.mul(&space.pairing(a, b).inverse()?);
    let a_dual = a.mul(&space.pairing(b, a).inverse()?);
    let s = a.hstack(&b_dual);
    let t = b.hstack(&a_dual);
    Ok(t.inverse()?.mul(&s))
}

/// Holonomy `[Y; Z; X; Y]` around the triangle, in the graded basis of
/// `Y_*` coming from `standardize_pair(X, Y)`; equals
/// `[[0, -t^{-1}], [t, 0]]` with `t = κ(X, Y, Z)`.
pub fn holonomy(x: &Lagrangian, y: &Lagrangian, z: &Lagrangian) -> Result<Matrix> {
    require_pairwise_opposite(&[x, y, z])?;
    let space = x.space;
    let frame = opposite_frame(x, y)?;
    let n = space.n;
    let bx = frame.submatrix(0, 0, 2 * n, n);
    let by = frame.submatrix(0, n, 2 * n, n);
    let bz = z.basis.clone();
    let xy = edge_morphism(&space, &by, &bx)?;
    let zx = edge_morphism(&space, &bx, &bz)?;
    let yz = edge_morphism(&space, &bz, &by)?;
    Ok(yz.mul(&zx).mul(&xy))
}

/// A Lagrangian opposite to `x`.
pub fn opposite_of(x: &Lagrangian) -> Lagrangian {
    let space = x.space;
    let bx = &x.basis;
    let w = bx.complement_columns();
    let g = space.pairing(&w, bx);
    let w1 = w.mul(&g.inverse().expect("complement pairs perfectly with a Lagrangian").conj_transpose());
    let s = space.pairing(&w1, &w1);
    let half = space.ctx.from_int(2).inv().expect("characteristic is odd");
    let y = w1.sub(&bx.mul(&s).scale(&half));
    Lagrangian::from_basis_unchecked(space, y)
}

/// Exhaustive list of all Lagrangians of a hyperbolic module over a finite
/// field.
pub fn enumerate_lagrangians(space: &HyperbolicSpace) -> Result<Vec<Lagrangian>> {
    const LIMIT: u128 = 200_000;
    let ctx = space.ctx;
    let elems = ctx.elements().ok_or_else(|| Error::WrongContext("enumeration needs a finite field".into()))?;
    let q = elems.len() as u128;
    let n = space.n;
    let dim = 2 * n;
    // subspaces of dimension n in D^{2n}: Gaussian binomial coefficient
    let mut count: u128 = 1;
    for i in 0..n as u32 {
        let num = q.checked_pow(dim as u32 - i).map(|v| v - 1);
        let den = q.pow(i + 1) - 1;
        count = match num.and_then(|v| count.checked_mul(v)) {
            Some(v) => v / den,
            None => return Err(Error::TooLarge("subspace count overflows".into())),
        };
        if count > LIMIT * 1000 {
            return Err(Error::TooLarge(format!("more than {LIMIT} candidate subspaces")));
        }
    }
    if count > LIMIT {
        return Err(Error::TooLarge(format!("{count} candidate subspaces")));
    }
    let mut out = Vec::new();
    for pivots in combinations(dim, n) {
        // free cells: below the pivot of column j, in non-pivot rows
        let cells: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| {
                let pj = pivots[j];
                let pivots = pivots.clone();
                (pj + 1..dim).filter(move |i| !pivots.contains(i)).map(move |i| (i, j))
            })
            .collect();
        let total = (q as usize).pow(cells.len() as u32);
        for mut code in 0..total {
            let mut b = Matrix::zeros(ctx, dim, n);
            for (j, &p) in pivots.iter().enumerate() {
                b[(p, j)] = ctx.one();
            }
            for &(i, j) in &cells {
                b[(i, j)] = elems[code % q as usize].clone();
                code /= q as usize;
            }
            if space.pairing(&b, &b).is_zero() {
                out.push(Lagrangian { space: *space, basis: b });
            }
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A Lagrangian opposite every member of `xs`.
///
/// Candidates are graphs `u_t(Y)` over a frame standardized from the first
/// input: `t = 0`, `t = 1`, then (finite fields) every ε-hermitian `t` when
/// there are few of them, otherwise seeded random `t` with growing entries.
pub fn common_opposite(xs: &[Lagrangian], seed: u64) -> Result<Lagrangian> {
    use rand::SeedableRng;
    let Some(first) = xs.first() else {
        return Err(Error::NotFound("empty list".into()));
    };
    let space = first.space;
    for x in xs {
        same_space(first, x)?;
    }
    let frame = Unitary { matrix: opposite_frame(first, &opposite_of(first))? };
    let accept = |t: &FormMatrix| -> Result<Option<Lagrangian>> {
        let cand = frame.apply(&space.graph(t)?);
        for x in xs {
            if !is_opposite(&cand, x)? {
                return Ok(None);
            }
        }
        Ok(Some(cand))
    };
    let ctx = space.ctx;
    let eps = space.eps();
    for t in [FormMatrix::new(Matrix::zeros(ctx, space.n, space.n), eps)?, hermitian_identity_like(&space)] {
        if let Some(found) = accept(&t)? {
            return Ok(found);
        }
    }
    if let Some(all) = all_hermitian(&space, 100_000) {
        for t in all {
            if let Some(found) = accept(&t)? {
                return Ok(found);
            }
        }
        return Err(Error::NotFound(format!("none of the Lagrangians opposite the first is opposite all {}", xs.len())));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..4000 {
        let bound = 1 + attempt as i64 / 50;
        let t = crate::sampling::random_hermitian(&mut rng, ctx, eps, space.n, bound);
        if let Some(found) = accept(&t)? {
            return Ok(found);
        }
    }
    Err(Error::NotFound("random search exhausted".into()))
}

/// An invertible ε-hermitian matrix built from units on the diagonal or, for
/// skew forms under the identity involution, from 2x2 blocks.
fn hermitian_identity_like(space: &HyperbolicSpace) -> FormMatrix {
    let ctx = space.ctx;
    let n = space.n;
    let eps = space.eps();
    let mut m = Matrix::zeros(ctx, n, n);
    match (eps, ctx.theta()) {
        (Sign::Plus, _) => m = Matrix::identity(ctx, n),
        (Sign::Minus, Some(theta)) => m = Matrix::scalar(ctx, n, &theta),
        (Sign::Minus, None) => {
            for k in 0..n / 2 {
                m[(2 * k, 2 * k + 1)] = ctx.one();
                m[(2 * k + 1, 2 * k)] = -ctx.one();
            }
        }
    }
    FormMatrix::new(m, eps).expect("ε-hermitian by construction")
}

/// Every ε-hermitian `n×n` matrix over a finite field, if there are at most
/// `limit` of them.
pub fn all_hermitian(space: &HyperbolicSpace, limit: usize) -> Option<Vec<FormMatrix>> {
    let ctx = space.ctx;
    let basis = hermitian_basis(ctx, space.eps(), space.n);
    let p = ctx.characteristic() as usize;
    if p == 0 {
        return None;
    }
    let total = p.checked_pow(basis.len() as u32)?;
    if total > limit {
        return None;
    }
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut m = Matrix::zeros(ctx, space.n, space.n);
        for b in &basis {
            let c = ctx.from_int((code % p) as i64);
            code /= p;
            if !c.is_zero() {
                m = m.add(&b.scale(&c));
            }
        }
        out.push(FormMatrix::new(m, space.eps()).expect("span of ε-hermitian matrices"));
    }
    Some(out)
}

/// A basis over the prime field of the ε-hermitian `n×n` matrices.
pub fn hermitian_basis(ctx: FieldCtx, eps: Sign, n: usize) -> Vec<Matrix> {
    let e = ctx.from_int(eps.value());
    let mut out = Vec::new();
    for i in 0..n {
        for c in ctx.fixed_basis(eps) {
            let mut m = Matrix::zeros(ctx, n, n);
            m[(i, i)] = c;
            out.push(m);
        }
        for j in i + 1..n {
            for c in ctx.prime_basis() {
                let mut m = Matrix::zeros(ctx, n, n);
                m[(i, j)] = c.clone();
                m[(j, i)] = &e * &c.conj();
                out.push(m);
            }
        }
    }
    out
}

/// Random word in the generators `u_t`, `ℓ_a`, `w`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, space: &HyperbolicSpace, length: usize, bound: i64) -> Unitary {
    let mut g = space.identity();
    for _ in 0..length {
        let step = match rng.gen_range(0..3) {
            0 => space
                .u_t(&crate::sampling::random_hermitian(rng, space.ctx, space.eps(), space.n, bound))
                .expect("hermitian"),
            1 => space
                .ell_a(&crate::sampling::random_invertible_small(rng, space.ctx, space.n, bound))
                .expect("invertible"),
            _ => space.w_element(),
        };
        g = g.compose(&step);
    }
    g
}
