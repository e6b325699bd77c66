//! The Maslov cocycle and its relatives: boundary and relation checks,
//! Kashiwara's form and group cocycle, the signed-discriminant reduction and
//! orbit censuses over finite fields.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Scalar, Sign};
use crate::forms::{is_isometric, radical_split, FormMatrix};
use crate::lagrange::{
    enumerate_lagrangians, hermitian_basis, is_opposite, kappa, opposite_frame, BasedLagrangian, HyperbolicSpace,
    Lagrangian, Unitary,
};
use crate::matrix::Matrix;
use crate::witt::{witt_class, SHatElement, WittClass};

/// An ordered tuple of Lagrangians with its opposition pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tuple {
    pub lagrangians: Vec<Lagrangian>,
    /// `opposite[i][j]` for `i < j`.
    pub opposite: Vec<Vec<bool>>,
}

impl Tuple {
    pub fn new(lagrangians: Vec<Lagrangian>) -> Result<Tuple> {
        let k = lagrangians.len();
        let mut opposite = vec![vec![false; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let o = is_opposite(&lagrangians[i], &lagrangians[j])?;
                opposite[i][j] = o;
                opposite[j][i] = o;
            }
        }
        Ok(Tuple { lagrangians, opposite })
    }

    pub fn is_pairwise_opposite(&self) -> bool {
        let k = self.lagrangians.len();
        (0..k).all(|i| (i + 1..k).all(|j| self.opposite[i][j]))
    }
}

/// `m⟨X, Y, Z⟩ = [κ(X, Y, Z)]` in `W^ε`.
pub fn maslov(x: &Lagrangian, y: &Lagrangian, z: &Lagrangian) -> Result<WittClass> {
    witt_class(&kappa(x, y, z)?)
}

/// `m⟨Y,Z,Z'⟩ - m⟨X,Z,Z'⟩ + m⟨X,Y,Z'⟩ - m⟨X,Y,Z⟩`; always zero.
pub fn boundary_defect(x: &Lagrangian, y: &Lagrangian, z: &Lagrangian, z1: &Lagrangian) -> Result<WittClass> {
    if !Tuple::new(vec![x.clone(), y.clone(), z.clone(), z1.clone()])?.is_pairwise_opposite() {
        return Err(Error::NotPairwiseOpposite);
    }
    maslov(y, z, z1)?
        .sub(&maslov(x, z, z1)?)?
        .add(&maslov(x, y, z1)?)?
        .sub(&maslov(x, y, z)?)
}

/// `[r] + [s] + [t] + [-r^{-J} - s^{-J}]` for invertible ε-hermitian
/// `r + s + t = 0`; always zero.
pub fn relation_check(r: &FormMatrix, s: &FormMatrix, t: &FormMatrix) -> Result<WittClass> {
    let sum = r.add(s)?.add(t)?;
    if !sum.matrix().is_zero() {
        return Err(Error::ConstraintViolated("r + s + t must vanish".into()));
    }
    for (name, m) in [("r", r), ("s", s), ("t", t)] {
        if !m.is_nondegenerate() {
            return Err(Error::ConstraintViolated(format!("{name} is not invertible")));
        }
    }
    let ri = r.matrix().inverse()?.conj_transpose();
    let si = s.matrix().inverse()?.conj_transpose();
    let fourth = FormMatrix::new(ri.add(&si).neg(), r.eps())?;
    witt_class(r)?.add(&witt_class(s)?)?.add(&witt_class(t)?)?.add(&witt_class(&fourth)?)
}

fn require_symplectic(space: &HyperbolicSpace) -> Result<()> {
    if !space.ctx.is_symplectic() {
        return Err(Error::WrongContext("needs the symplectic case ε = 1, J = id".into()));
    }
    Ok(())
}

/// Gram matrix of `q(x, y, z) = h(x, y) + h(y, z) + h(z, x)` on
/// `X ⊕ Y ⊕ Z` in the canonical bases.
pub fn kashiwara_form(x: &Lagrangian, y: &Lagrangian, z: &Lagrangian) -> Result<FormMatrix> {
    kashiwara_form_based(&x.based(), &y.based(), &z.based())
}

/// [`kashiwara_form`] in the chosen bases.
pub fn kashiwara_form_based(x: &BasedLagrangian, y: &BasedLagrangian, z: &BasedLagrangian) -> Result<FormMatrix> {
    let space = x.lagrangian().space();
    require_symplectic(&space)?;
    if y.lagrangian().space() != space || z.lagrangian().space() != space {
        return Err(Error::SpaceMismatch);
    }
    let n = space.n;
    let ctx = space.ctx;
    let zero = Matrix::zeros(ctx, n, n);
    let (bx, by, bz) = (x.basis(), y.basis(), z.basis());
    let row0 = zero.hstack(&space.pairing(bx, by)).hstack(&zero);
    let row1 = zero.hstack(&zero).hstack(&space.pairing(by, bz));
    let row2 = space.pairing(bz, bx).hstack(&zero).hstack(&zero);
    let a = row0.vstack(&row1).vstack(&row2);
    let half = ctx.from_int(2).inv()?;
    FormMatrix::new(a.add(&a.transpose()).scale(&half), Sign::Plus)
}

/// Witt class of the nondegenerate part of the Kashiwara form.
pub fn kashiwara_class(x: &Lagrangian, y: &Lagrangian, z: &Lagrangian) -> Result<WittClass> {
    let (nondeg, _) = radical_split(&kashiwara_form(x, y, z)?);
    if nondeg.dim() == 0 {
        return Ok(WittClass::zero(x.space().ctx.with_eps(Sign::Plus)));
    }
    witt_class(&nondeg)
}

/// `τ(g, h) = [q⁺_{o, g(o), gh(o)}]`.
///
/// Outside the symplectic case only generic pairs are accepted, where the
/// value is the Maslov class of the (pairwise opposite) triple.
pub fn tau(g: &Unitary, h: &Unitary, o: &Lagrangian) -> Result<WittClass> {
    let go = g.apply(o);
    let gho = g.compose(h).apply(o);
    if o.space().ctx.is_symplectic() {
        return kashiwara_class(o, &go, &gho);
    }
    match maslov(o, &go, &gho) {
        Err(Error::NotPairwiseOpposite) => {
            Err(Error::WrongContext("τ off the generic locus is only defined in the symplectic case".into()))
        }
        other => other,
    }
}

/// `τ(g,h) + τ(gh,i) - τ(h,i) - τ(g,hi)`; zero for a cocycle.
pub fn tau_cocycle_defect(g: &Unitary, h: &Unitary, i: &Unitary, o: &Lagrangian) -> Result<WittClass> {
    let gh = g.compose(h);
    let hi = h.compose(i);
    tau(g, h, o)?.add(&tau(&gh, i, o)?)?.sub(&tau(h, i, o)?)?.sub(&tau(g, &hi, o)?)
}

/// `det` of the upper-right block of the edge morphism `[X; Y]`, which is
/// `(y^J h x)^{-1}` for based Lagrangians `(X, x)` and `(Y, y)`.
fn edge_det(v: &BasedLagrangian, w: &BasedLagrangian) -> Result<Scalar> {
    if !is_opposite(v.lagrangian(), w.lagrangian())? {
        return Err(Error::NotOpposite);
    }
    let space = v.lagrangian().space();
    space.pairing(w.basis(), v.basis()).det().inv()
}

/// The cochain `f⟨(X, x), (Y, y)⟩ = (det u · (-1)^{n(n-1)/2}, (-1)^n)` with
/// `u` the upper-right block of the edge morphism `[X; Y]`.
pub fn based_cochain_f(v: &BasedLagrangian, w: &BasedLagrangian) -> Result<SHatElement> {
    let space = v.lagrangian().space();
    let n = space.n as u64;
    let mut d = edge_det(v, w)?;
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        d = -d;
    }
    SHatElement::new(space.ctx.with_eps(Sign::Plus), d, Sign::parity(n))
}

/// Three based Lagrangians in one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedTriple {
    pub x: BasedLagrangian,
    pub y: BasedLagrangian,
    pub z: BasedLagrangian,
}

/// Base-change witnesses relative to the frame standardized from `(X, Y)`:
/// `x' = x a`, `y' = y b`, `z' = u_t(y) c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witnesses {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub t: FormMatrix,
}

impl BasedTriple {
    pub fn new(x: BasedLagrangian, y: BasedLagrangian, z: BasedLagrangian) -> Result<BasedTriple> {
        let s = x.lagrangian().space();
        if y.lagrangian().space() != s || z.lagrangian().space() != s {
            return Err(Error::SpaceMismatch);
        }
        Ok(BasedTriple { x, y, z })
    }

    fn require_opposite(&self) -> Result<()> {
        let t = Tuple::new(vec![self.x.lagrangian().clone(), self.y.lagrangian().clone(), self.z.lagrangian().clone()])?;
        if !t.is_pairwise_opposite() {
            return Err(Error::NotPairwiseOpposite);
        }
        Ok(())
    }

    pub fn maslov(&self) -> Result<WittClass> {
        maslov(self.x.lagrangian(), self.y.lagrangian(), self.z.lagrangian())
    }

    pub fn witnesses(&self) -> Result<Witnesses> {
        self.require_opposite()?;
        let frame = opposite_frame(self.x.lagrangian(), self.y.lagrangian())?;
        let g = frame.inverse()?;
        let n = self.x.lagrangian().space().n;
        let block = |m: &Matrix, top: bool| {
            let moved = g.mul(m);
            if top {
                moved.submatrix(0, 0, n, n)
            } else {
                moved.submatrix(n, 0, n, n)
            }
        };
        let a = block(self.x.basis(), true);
        let b = block(self.y.basis(), false);
        let c = block(self.z.basis(), false);
        let tc = block(self.z.basis(), true);
        let t = FormMatrix::new(tc.mul(&c.inverse()?), self.x.lagrangian().space().eps())?;
        Ok(Witnesses { a, b, c, t })
    }
}

/// `disc m⟨X,Y,Z⟩ + f∂` where `f∂ = f(Y,Z) - f(X,Z) + f(X,Y)`; always the
/// identity of `Ŝ`.
pub fn disc_defect(bt: &BasedTriple) -> Result<SHatElement> {
    bt.require_opposite()?;
    let space = bt.x.lagrangian().space();
    if space.eps() != Sign::Plus {
        return Err(Error::WrongContext("the signed discriminant lives on W^1".into()));
    }
    let disc = bt.maslov()?.signed_disc()?;
    let df = based_cochain_f(&bt.y, &bt.z)?.sub(&based_cochain_f(&bt.x, &bt.z)?).add(&based_cochain_f(&bt.x, &bt.y)?);
    Ok(disc.add(&df))
}

/// `⟨d, 1, ..., 1⟩` of dimension `n`.
fn padded(ctx: FieldCtx, d: Scalar, n: usize) -> Result<WittClass> {
    let mut entries = vec![ctx.one(); n];
    entries[0] = d;
    WittClass::from_diagonal(ctx, &entries)
}

/// The reduced cocycle `m + f̃(X,Y) + f̃(Y,Z) + f̃(Z,X)`, where
/// `f̃(v, w) = ⟨det u, 1, ..., 1⟩` for the upper-right block `u` of the edge
/// morphism `[v; w]`. Lies in `II`.
pub fn reduced_maslov(bt: &BasedTriple) -> Result<WittClass> {
    let space = bt.x.lagrangian().space();
    require_symplectic(&space)?;
    bt.require_opposite()?;
    let ctx = space.ctx;
    let mut acc = bt.maslov()?;
    for (v, w) in [(&bt.x, &bt.y), (&bt.y, &bt.z), (&bt.z, &bt.x)] {
        acc = acc.add(&padded(ctx, edge_det(v, w)?, space.n)?)?;
    }
    Ok(acc)
}

/// The same value from the witnesses:
/// `⟨t⟩ + ⟨det(ab),1..⟩ + ⟨det(-btc),1..⟩ + ⟨det(-ca),1..⟩`.
pub fn reduced_maslov_explicit(space: &HyperbolicSpace, w: &Witnesses) -> Result<WittClass> {
    require_symplectic(space)?;
    let ctx = space.ctx;
    let n = space.n;
    let terms = [
        w.a.mul(&w.b).det(),
        w.b.mul(w.t.matrix()).mul(&w.c).neg().det(),
        w.c.mul(&w.a).neg().det(),
    ];
    let mut acc = witt_class(&w.t)?;
    for d in terms {
        acc = acc.add(&padded(ctx, d, n)?)?;
    }
    Ok(acc)
}

/// One κ-isometry class in a census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusClass {
    pub kappa: FormMatrix,
    pub size: usize,
    /// Number of unitary orbits meeting this fiber.
    pub orbits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub lagrangians: usize,
    pub triples: usize,
    pub classes: Vec<CensusClass>,
    /// Each fiber is one orbit and distinct fibers lie in distinct orbits.
    pub fibers_are_orbits: bool,
}

impl Census {
    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.size).collect()
    }
}

/// Generators of the unitary group: `u_t` for a prime-field basis of the
/// ε-hermitian matrices, `ℓ_a` for elementary transvections and
/// `diag(ζ, 1, ..., 1)` with `ζ` primitive, and `w`.
pub fn unitary_generators(space: &HyperbolicSpace) -> Result<Vec<Unitary>> {
    let ctx = space.ctx;
    let n = space.n;
    let mut gens = Vec::new();
    for t in hermitian_basis(ctx, space.eps(), n) {
        gens.push(space.u_t(&FormMatrix::new(t, space.eps())?)?);
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                for c in ctx.prime_basis() {
                    let mut a = Matrix::identity(ctx, n);
                    a[(i, j)] = c;
                    gens.push(space.ell_a(&a)?);
                }
            }
        }
    }
    let mut a = Matrix::identity(ctx, n);
    a[(0, 0)] = primitive_element(ctx)?;
    gens.push(space.ell_a(&a)?);
    gens.push(space.w_element());
    Ok(gens)
}

fn primitive_element(ctx: FieldCtx) -> Result<Scalar> {
    let elems = ctx.elements().ok_or_else(|| Error::WrongContext("needs a finite field".into()))?;
    let q = elems.len();
    for x in elems.iter().filter(|x| !x.is_zero()) {
        let mut y = x.clone();
        let mut order = 1;
        while !y.is_one() {
            y = &y * x;
            order += 1;
        }
        if order == q - 1 {
            return Ok(x.clone());
        }
    }
    unreachable!("finite fields have cyclic unit groups")
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn find(&mut self, mut i: u32) -> u32 {
        while self.0[i as usize] != i {
            let up = self.0[self.0[i as usize] as usize];
            self.0[i as usize] = up;
            i = up;
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb) as usize] = ra.min(rb);
        }
    }
}

/// Action of each generator on the list of Lagrangians, as permutations.
fn permutations(all: &[Lagrangian], gens: &[Unitary]) -> Vec<Vec<u32>> {
    let index: HashMap<&Lagrangian, u32> = all.iter().enumerate().map(|(i, l)| (l, i as u32)).collect();
    gens.iter()
        .map(|g| all.iter().map(|l| index[&g.apply(l)]).collect())
        .collect()
}

/// Exhaustive census of pairwise opposite ordered triples: groups them by
/// κ up to isometry and checks that these groups are exactly the orbits of
/// the group generated by [`unitary_generators`].
pub fn orbit_census(space: &HyperbolicSpace) -> Result<Census> {
    const MAX_CUBE: usize = 8_000_000;
    let all = enumerate_lagrangians(space)?;
    let l = all.len();
    if l.pow(3) > MAX_CUBE {
        return Err(Error::TooLarge(format!("{l} Lagrangians")));
    }
    let opp: Vec<Vec<bool>> =
        all.iter().map(|a| all.iter().map(|b| is_opposite(a, b).expect("same space")).collect()).collect();
    let code = |i: usize, j: usize, k: usize| (i * l * l + j * l + k) as u32;
    let mut triples = Vec::new();
    for i in 0..l {
        for j in 0..l {
            if !opp[i][j] {
                continue;
            }
            for k in 0..l {
                if opp[i][k] && opp[j][k] {
                    triples.push((i, j, k));
                }
            }
        }
    }
    let perms = permutations(&all, &unitary_generators(space)?);
    let mut uf = UnionFind((0..(l * l * l) as u32).collect());
    for &(i, j, k) in &triples {
        for p in &perms {
            uf.union(code(i, j, k), code(p[i] as usize, p[j] as usize, p[k] as usize));
        }
    }
    let mut classes: Vec<CensusClass> = Vec::new();
    let mut roots: Vec<Vec<u32>> = Vec::new();
    for &(i, j, k) in &triples {
        let t = kappa(&all[i], &all[j], &all[k])?;
        let root = uf.find(code(i, j, k));
        let mut slot = None;
        for (c, class) in classes.iter().enumerate() {
            if is_isometric(&class.kappa, &t)? {
                slot = Some(c);
                break;
            }
        }
        let c = slot.unwrap_or_else(|| {
            classes.push(CensusClass { kappa: t, size: 0, orbits: 0 });
            roots.push(Vec::new());
            classes.len() - 1
        });
        classes[c].size += 1;
        if !roots[c].contains(&root) {
            roots[c].push(root);
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut disjoint = true;
    for (class, r) in classes.iter_mut().zip(&roots) {
        class.orbits = r.len();
        for root in r {
            disjoint &= seen.insert(*root);
        }
    }
    let fibers_are_orbits = disjoint && classes.iter().all(|c| c.orbits == 1);
    Ok(Census { lagrangians: l, triples: triples.len(), classes, fibers_are_orbits })
}

/// Whether some unitary element maps `(X, Y, Z)` to `(X, Z, Y)`, i.e.
/// whether the set-stabilizer of the triple induces all of `Sym(3)`;
/// decided by exhaustive orbit computation.
pub fn transposition_in_stabilizer(space: &HyperbolicSpace, t: &FormMatrix) -> Result<bool> {
    let all = enumerate_lagrangians(space)?;
    let index: HashMap<&Lagrangian, usize> = all.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let (x0, y0) = space.standard_pair();
    let z0 = space.graph(t)?;
    let start = (index[&x0], index[&y0], index[&z0]);
    let target = (start.0, start.2, start.1);
    let perms = permutations(&all, &unitary_generators(space)?);
    let mut seen = std::collections::HashSet::from([start]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some((i, j, k)) = queue.pop_front() {
        if (i, j, k) == target {
            return Ok(true);
        }
        for p in &perms {
            let next = (p[i] as usize, p[j] as usize, p[k] as usize);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    Ok(false)
}

/// Whether `a^J t a = -t` has an invertible solution, by exhaustive search.
pub fn has_negating_congruence(t: &FormMatrix) -> Result<bool> {
    let ctx = t.ctx();
    let all = Matrix::all_matrices(ctx, t.dim(), t.dim())
        .ok_or_else(|| Error::TooLarge("exhaustive matrix search".into()))?;
    let minus = t.matrix().neg();
    Ok(all.iter().any(|a| a.is_invertible() && a.conj_transpose().mul(t.matrix()).mul(a) == minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrange::random_unitary;
    use crate::sampling::{self, random_based_triple, random_quadruple};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q_form(v: i64) -> FormMatrix {
        FormMatrix::from_ints(FieldCtx::rationals(), &[&[v]], Sign::Plus).unwrap()
    }

    fn standard_triple(space: &HyperbolicSpace, t: &FormMatrix) -> (Lagrangian, Lagrangian, Lagrangian) {
        let (x, y) = space.standard_pair();
        (x, y, space.graph(t).unwrap())
    }

    #[test]
    fn maslov_examples() {
        let space = HyperbolicSpace::new(FieldCtx::rationals(), 1);
        let (x, y, z) = standard_triple(&space, &q_form(1));
        let one = WittClass::from_ints(FieldCtx::rationals(), &[1]);
        assert_eq!(maslov(&x, &y, &z).unwrap(), one);
        assert_eq!(maslov(&x, &z, &y).unwrap(), one.neg());

        let f3 = FieldCtx::prime(3).unwrap();
        let space = HyperbolicSpace::new(f3, 1);
        let t1 = FormMatrix::from_ints(f3, &[&[1]], Sign::Plus).unwrap();
        let t2 = FormMatrix::from_ints(f3, &[&[2]], Sign::Plus).unwrap();
        let (x, y, z1) = standard_triple(&space, &t1);
        let z2 = space.graph(&t2).unwrap();
        assert_ne!(maslov(&x, &y, &z1).unwrap(), maslov(&x, &y, &z2).unwrap());
    }

    #[test]
    fn boundary_examples() {
        let space = HyperbolicSpace::new(FieldCtx::rationals(), 1);
        let (x, y, z) = standard_triple(&space, &q_form(1));
        let z1 = space.graph(&q_form(3)).unwrap();
        assert!(boundary_defect(&x, &y, &z, &z1).unwrap().is_zero());
        assert_eq!(boundary_defect(&x, &y, &z, &z), Err(Error::NotPairwiseOpposite));
    }

    #[test]
    fn boundary_vanishes_on_random_quadruples() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for ctx in [FieldCtx::prime(5).unwrap(), FieldCtx::quad(-1).unwrap(), FieldCtx::frobenius(3).unwrap()] {
            let space = HyperbolicSpace::new(ctx, 2);
            for _ in 0..20 {
                let [x, y, z, z1] = random_quadruple(&mut rng, &space, 4, 2).unwrap();
                assert!(boundary_defect(&x, &y, &z, &z1).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn relation_examples() {
        assert!(relation_check(&q_form(1), &q_form(1), &q_form(-2)).unwrap().is_zero());
        assert!(matches!(relation_check(&q_form(1), &q_form(-1), &q_form(0)), Err(Error::ConstraintViolated(_))));
        assert!(matches!(relation_check(&q_form(1), &q_form(1), &q_form(1)), Err(Error::ConstraintViolated(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let f7 = FieldCtx::prime(7).unwrap();
        let mut done = 0;
        while done < 30 {
            let r = sampling::random_hermitian(&mut rng, f7, Sign::Plus, 2, 1);
            let s = sampling::random_hermitian(&mut rng, f7, Sign::Plus, 2, 1);
            let t = r.add(&s).unwrap().neg();
            if let Ok(v) = relation_check(&r, &s, &t) {
                assert!(v.is_zero());
                done += 1;
            }
        }
    }

    #[test]
    fn kashiwara_examples() {
        let space = HyperbolicSpace::new(FieldCtx::rationals(), 1);
        let (x, y, z) = standard_triple(&space, &q_form(2));
        let zb = BasedLagrangian::from_basis(space, Matrix::from_ints(space.ctx, &[&[2], &[1]])).unwrap();
        let q = kashiwara_form_based(&x.based(), &y.based(), &zb).unwrap();
        let a = Matrix::from_ints(space.ctx, &[&[0, -1, 0], &[0, 0, 2], &[1, 0, 0]]);
        let half = space.ctx.parse_scalar("1/2").unwrap();
        assert_eq!(q.matrix(), &a.add(&a.transpose()).scale(&half));
        assert_eq!(kashiwara_class(&x, &y, &z).unwrap(), WittClass::from_ints(space.ctx, &[2]));
        assert!(kashiwara_form(&x, &x, &x).unwrap().matrix().is_zero());
        assert!(kashiwara_class(&x, &x, &x).unwrap().is_zero());
        assert!(kashiwara_class(&x, &y, &x).unwrap().is_zero());
        let hermitian = HyperbolicSpace::new(FieldCtx::quad(-1).unwrap(), 1);
        let (x, y) = hermitian.standard_pair();
        assert!(matches!(kashiwara_form(&x, &y, &x), Err(Error::WrongContext(_))));
    }

    #[test]
    fn kashiwara_agrees_with_maslov() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for n in 1..=3 {
            let space = HyperbolicSpace::new(FieldCtx::rationals(), n);
            for _ in 0..10 {
                let (x, y, z) = sampling::random_opposite_triple(&mut rng, &space, 4, 2).unwrap();
                assert_eq!(kashiwara_class(&x, &y, &z).unwrap(), maslov(&x, &y, &z).unwrap());
            }
        }
    }

    #[test]
    fn tau_examples_and_cocycle_identity() {
        let space = HyperbolicSpace::new(FieldCtx::rationals(), 1);
        let o = space.standard_pair().0;
        let id = space.identity();
        assert!(tau(&id, &id, &o).unwrap().is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        for n in 1..=2 {
            let space = HyperbolicSpace::new(FieldCtx::rationals(), n);
            let o = space.standard_pair().0;
            for _ in 0..15 {
                let g = random_unitary(&mut rng, &space, 3, 2);
                let h = random_unitary(&mut rng, &space, 3, 2);
                let i = random_unitary(&mut rng, &space, 3, 2);
                assert!(tau_cocycle_defect(&g, &h, &i, &o).unwrap().is_zero());
                let (go, gho) = (g.apply(&o), g.compose(&h).apply(&o));
                if let Ok(m) = maslov(&o, &go, &gho) {
                    assert_eq!(tau(&g, &h, &o).unwrap(), m);
                }
            }
        }
    }

    #[test]
    fn based_cochain_examples() {
        let ctx = FieldCtx::rationals();
        let space = HyperbolicSpace::new(ctx, 1);
        let (x, y) = space.standard_pair();
        let (xb, yb) = (x.based(), y.based());
        let f = based_cochain_f(&xb, &yb).unwrap();
        assert_eq!(f, SHatElement::new(ctx, ctx.from_int(1), Sign::Minus).unwrap());
        assert!(f.add(&based_cochain_f(&yb, &xb).unwrap()).is_identity());

        let space = HyperbolicSpace::new(ctx, 2);
        let (x, y) = space.standard_pair();
        let f = based_cochain_f(&x.based(), &y.based()).unwrap();
        assert_eq!(f, SHatElement::new(ctx, ctx.from_int(-1), Sign::Plus).unwrap());
        assert_eq!(based_cochain_f(&x.based(), &x.based()), Err(Error::NotOpposite));
    }

    #[test]
    fn based_cochain_is_alternating() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for ctx in [FieldCtx::rationals(), FieldCtx::prime(5).unwrap(), FieldCtx::quad(-1).unwrap()] {
            for n in 1..=2 {
                let space = HyperbolicSpace::new(ctx, n);
                for _ in 0..5 {
                    let bt = random_based_triple(&mut rng, &space, 4, 2).unwrap();
                    let there = based_cochain_f(&bt.x, &bt.y).unwrap();
                    let back = based_cochain_f(&bt.y, &bt.x).unwrap();
                    assert!(there.add(&back).is_identity());
                }
            }
        }
    }

    #[test]
    fn disc_defect_vanishes() {
        let ctx = FieldCtx::rationals();
        let space = HyperbolicSpace::new(ctx, 1);
        let (x, y, z) = standard_triple(&space, &q_form(1));
        let bt = BasedTriple::new(x.based(), y.based(), z.based()).unwrap();
        assert!(disc_defect(&bt).unwrap().is_identity());
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        for ctx in [FieldCtx::rationals(), FieldCtx::prime(5).unwrap(), FieldCtx::quad(-1).unwrap(), FieldCtx::frobenius(3).unwrap()] {
            for n in 1..=3 {
                let space = HyperbolicSpace::new(ctx, n);
                for _ in 0..5 {
                    let bt = random_based_triple(&mut rng, &space, 4, 2).unwrap();
                    assert!(disc_defect(&bt).unwrap().is_identity(), "{ctx:?} n={n}");
                }
            }
        }
    }

    #[test]
    fn reduced_examples() {
        let ctx = FieldCtx::rationals();
        let space = HyperbolicSpace::new(ctx, 1);
        for t in [1, -1] {
            let (x, y, z) = standard_triple(&space, &q_form(t));
            let bt = BasedTriple::new(x.based(), y.based(), z.based()).unwrap();
            let m = reduced_maslov(&bt).unwrap();
            assert_eq!(m.signature(), Some(0));
            assert!(m.in_ii().unwrap());
            assert_eq!(m, reduced_maslov_explicit(&space, &bt.witnesses().unwrap()).unwrap());
        }
    }

    #[test]
    fn reduced_lies_in_ii_and_matches_witness_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        for ctx in [FieldCtx::rationals(), FieldCtx::prime(7).unwrap()] {
            for n in 1..=3 {
                let space = HyperbolicSpace::new(ctx, n);
                for _ in 0..5 {
                    let bt = random_based_triple(&mut rng, &space, 4, 2).unwrap();
                    let m = reduced_maslov(&bt).unwrap();
                    assert!(m.in_ii().unwrap());
                    assert_eq!(m, reduced_maslov_explicit(&space, &bt.witnesses().unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn rebasing_changes_reduced_value_by_the_edge_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(58);
        let space = HyperbolicSpace::new(FieldCtx::rationals(), 2);
        for _ in 0..10 {
            let bt = random_based_triple(&mut rng, &space, 4, 2).unwrap();
            let a = sampling::random_invertible_small(&mut rng, space.ctx, 2, 3);
            let moved = BasedTriple::new(bt.x.rebase(&a).unwrap(), bt.y.clone(), bt.z.clone()).unwrap();
            let delta = reduced_maslov(&moved).unwrap().sub(&reduced_maslov(&bt).unwrap()).unwrap();
            let edge = |v: &BasedLagrangian, w: &BasedLagrangian| padded(space.ctx, edge_det(v, w).unwrap(), 2).unwrap();
            let expected = edge(&moved.x, &moved.y)
                .add(&edge(&moved.z, &moved.x))
                .unwrap()
                .sub(&edge(&bt.x, &bt.y))
                .unwrap()
                .sub(&edge(&bt.z, &bt.x))
                .unwrap();
            assert_eq!(delta, expected);
        }
    }

    #[test]
    fn census_small_fields() {
        let f3 = HyperbolicSpace::new(FieldCtx::prime(3).unwrap(), 1);
        let c = orbit_census(&f3).unwrap();
        assert_eq!(c.triples, 24);
        assert_eq!(c.orbit_sizes(), vec![12, 12]);
        assert!(c.fibers_are_orbits);

        let f5 = HyperbolicSpace::new(FieldCtx::prime(5).unwrap(), 1);
        let c = orbit_census(&f5).unwrap();
        assert_eq!(c.classes.len(), 2);
        assert_eq!(c.orbit_sizes().iter().sum::<usize>(), 120);
        assert!(c.fibers_are_orbits);

        let orth = HyperbolicSpace::new(FieldCtx::prime(3).unwrap().with_eps(Sign::Minus), 1);
        let c = orbit_census(&orth).unwrap();
        assert_eq!(c.triples, 0);
        assert!(c.classes.is_empty());
    }

    #[test]
    fn census_rank_two_over_f3() {
        let space = HyperbolicSpace::new(FieldCtx::prime(3).unwrap(), 2);
        let c = orbit_census(&space).unwrap();
        assert_eq!(c.lagrangians, 40);
        assert!(c.fibers_are_orbits);
        assert_eq!(c.classes.len(), 2);
    }

    #[test]
    fn sym3_criterion() {
        for (p, expected) in [(3u64, false), (5, true)] {
            let ctx = FieldCtx::prime(p).unwrap();
            let space = HyperbolicSpace::new(ctx, 1);
            let t = FormMatrix::from_ints(ctx, &[&[1]], Sign::Plus).unwrap();
            assert_eq!(has_negating_congruence(&t).unwrap(), expected);
            assert_eq!(transposition_in_stabilizer(&space, &t).unwrap(), expected);
        }
    }
}
