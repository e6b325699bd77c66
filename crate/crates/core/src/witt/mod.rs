//! Witt classes, the extended square-class group Ŝ, the signed
//! discriminant and the trace transfer.

pub mod hilbert;
pub mod invariants;

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldKind, NormClassRep, Scalar, Sign};
use crate::forms::{self, FormMatrix};

pub use hilbert::{hilbert_symbol, Place};

/// An element `(x, ±1)` of `Ŝ = E*/N × {±1}` with the twisted group law
/// `(x,(-1)^m) + (y,(-1)^n) = (xy(-1)^{mn}, (-1)^{m+n})`.
///
/// `x` is kept as a raw unit of the field; equality compares modulo norms.
#[derive(Clone, Debug)]
pub struct SHatElement {
    ctx: FieldCtx,
    value: Scalar,
    sign: Sign,
}

impl SHatElement {
    pub fn new(ctx: FieldCtx, value: Scalar, sign: Sign) -> Result<SHatElement> {
        if value.is_zero() {
            return Err(Error::ZeroScalar);
        }
        Ok(SHatElement { ctx, value, sign })
    }

    pub fn identity(ctx: FieldCtx) -> SHatElement {
        SHatElement { ctx, value: ctx.one(), sign: Sign::Plus }
    }

    pub fn value(&self) -> &Scalar {
        &self.value
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    /// Canonical class of the first coordinate, where one is available.
    pub fn class(&self) -> Option<NormClassRep> {
        self.ctx.norm_class(&self.value).ok()
    }

    pub fn is_identity(&self) -> bool {
        self.sign == Sign::Plus && self.ctx.is_norm(&self.value)
    }

    pub fn add(&self, other: &SHatElement) -> SHatElement {
        assert_eq!(self.ctx.kind, other.ctx.kind, "Ŝ elements over different fields");
        let mut value = &self.value * &other.value;
        if self.sign == Sign::Minus && other.sign == Sign::Minus {
            value = -value;
        }
        SHatElement { ctx: self.ctx, value, sign: self.sign * other.sign }
    }

    pub fn neg(&self) -> SHatElement {
        let mut value = self.value.inv().expect("unit");
        if self.sign == Sign::Minus {
            value = -value;
        }
        SHatElement { ctx: self.ctx, value, sign: self.sign }
    }

    pub fn sub(&self, other: &SHatElement) -> SHatElement {
        self.add(&other.neg())
    }

    /// `"s"` string for reports: the canonical class if known, otherwise the
    /// raw representative.
    pub fn class_string(&self) -> String {
        match self.class() {
            Some(c) => c.to_string(),
            None => self.value.to_string(),
        }
    }
}

impl PartialEq for SHatElement {
    fn eq(&self, other: &SHatElement) -> bool {
        self.ctx.kind == other.ctx.kind
            && self.sign == other.sign
            && self.ctx.is_norm(&self.value.div(&other.value).expect("unit"))
    }
}

impl Eq for SHatElement {}

impl fmt::Display for SHatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.class_string(), self.sign)
    }
}

/// Cached invariants deciding equality of Witt classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub dim: usize,
    pub signature: Option<i64>,
    /// Normalized Hasse–Witt invariants at the primes where they can be
    /// nontrivial (over `Q(sqrt d)`: those of the trace form).
    pub hasse: Vec<(BigUint, i8)>,
    pub is_zero: bool,
}

/// A class in `W^ε(D, J)`, represented by a diagonal form.
///
/// The stored entries are canonical representatives in the fixed field. For
/// ε = -1 with a nontrivial involution they are `θ·a_i` for the diagonal
/// entries `a_i` of a skew-hermitian representative; for ε = -1 with the
/// identity involution the group is zero and nothing is stored.
#[derive(Clone, Debug)]
pub struct WittClass {
    ctx: FieldCtx,
    entries: Vec<Scalar>,
    cert: OnceLock<Certificate>,
}

impl WittClass {
    pub fn zero(ctx: FieldCtx) -> WittClass {
        WittClass { ctx, entries: Vec::new(), cert: OnceLock::new() }
    }

    /// Class of a hermitian diagonal form `⟨a_1, ..., a_n⟩` in `W^1`.
    pub fn from_diagonal(ctx: FieldCtx, entries: &[Scalar]) -> Result<WittClass> {
        let ctx = ctx.with_eps(Sign::Plus);
        if entries.iter().any(|a| a.is_zero()) {
            return Err(Error::DegenerateInput);
        }
        if entries.iter().any(|a| !a.is_fixed()) {
            return Err(Error::NotHermitian);
        }
        Ok(WittClass::from_fixed(ctx, entries.to_vec()))
    }

    pub fn from_ints(ctx: FieldCtx, entries: &[i64]) -> WittClass {
        let xs: Vec<Scalar> = entries.iter().map(|&v| ctx.from_int(v)).collect();
        WittClass::from_diagonal(ctx, &xs).expect("nonzero integer entries")
    }

    fn from_fixed(ctx: FieldCtx, entries: Vec<Scalar>) -> WittClass {
        if ctx.eps == Sign::Minus && ctx.involution_is_identity() {
            return WittClass::zero(ctx);
        }
        let entries = strip_hyperbolic(entries.iter().map(canonical_entry).collect());
        WittClass { ctx, entries, cert: OnceLock::new() }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn eps(&self) -> Sign {
        self.ctx.eps
    }

    /// Canonical fixed-field diagonal entries of the stored representative.
    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// A diagonal ε-hermitian representative.
    pub fn representative(&self) -> FormMatrix {
        let eps = self.ctx.eps;
        let diag: Vec<Scalar> = match (eps, self.ctx.theta()) {
            (Sign::Minus, Some(theta)) => {
                let ti = theta.inv().expect("θ is a unit");
                self.entries.iter().map(|a| &ti * a).collect()
            }
            _ => self.entries.clone(),
        };
        FormMatrix::diagonal(self.ctx, &diag, eps).expect("diagonal representative is ε-hermitian")
    }

    pub fn certificate(&self) -> &Certificate {
        self.cert.get_or_init(|| compute_certificate(self.ctx, &self.entries))
    }

    pub fn is_zero(&self) -> bool {
        self.certificate().is_zero
    }

    pub fn signature(&self) -> Option<i64> {
        self.certificate().signature
    }

    pub fn add(&self, other: &WittClass) -> Result<WittClass> {
        if self.ctx.kind != other.ctx.kind || self.ctx.eps != other.ctx.eps {
            return Err(Error::ContextMismatch);
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(WittClass { ctx: self.ctx, entries: strip_hyperbolic(entries), cert: OnceLock::new() })
    }

    pub fn neg(&self) -> WittClass {
        let entries = self.entries.iter().map(|a| canonical_entry(&-a)).collect();
        WittClass { ctx: self.ctx, entries, cert: OnceLock::new() }
    }

    pub fn sub(&self, other: &WittClass) -> Result<WittClass> {
        self.add(&other.neg())
    }

    /// `k · self` for an integer `k`.
    pub fn times(&self, k: i64) -> WittClass {
        let base = if k < 0 { self.neg() } else { self.clone() };
        let mut acc = WittClass::zero(self.ctx);
        for _ in 0..k.unsigned_abs() {
            acc = acc.add(&base).expect("same context");
        }
        acc
    }

    /// Signed discriminant `(det(t)·(-1)^{n(n-1)/2}, (-1)^n)` of a hermitian
    /// class.
    pub fn signed_disc(&self) -> Result<SHatElement> {
        if self.ctx.eps == Sign::Minus {
            return Err(Error::WrongContext("signed discriminant is defined on hermitian classes".into()));
        }
        let n = self.entries.len() as u64;
        let mut det = self.entries.iter().fold(self.ctx.one(), |acc, a| &acc * a);
        if (n * n.saturating_sub(1) / 2) % 2 == 1 {
            det = -det;
        }
        SHatElement::new(self.ctx, det, Sign::parity(n))
    }

    /// Membership in the kernel `II` of the signed discriminant.
    pub fn in_ii(&self) -> Result<bool> {
        Ok(self.signed_disc()?.is_identity())
    }

    /// `⟨1, -d⟩ ⊗ ⟨a_1, ..., a_n⟩` over `Q` for a hermitian class over
    /// `Q(sqrt d)`.
    pub fn trace_transfer(&self) -> Result<WittClass> {
        let FieldKind::QuadExtConj(d) = self.ctx.kind else {
            return Err(Error::WrongContext("trace transfer needs Q(sqrt d)".into()));
        };
        if self.ctx.eps == Sign::Minus {
            return Err(Error::WrongContext("trace transfer of a skew-hermitian class".into()));
        }
        let rationals = invariants::trace_form(&invariants::rationals(&self.entries), d);
        let q = FieldCtx::rationals();
        let xs: Vec<Scalar> = rationals.into_iter().map(Scalar::Q).collect();
        WittClass::from_diagonal(q, &xs)
    }
}

impl PartialEq for WittClass {
    fn eq(&self, other: &WittClass) -> bool {
        self.ctx.kind == other.ctx.kind
            && self.ctx.eps == other.ctx.eps
            && self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

impl Eq for WittClass {}

impl fmt::Display for WittClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        write!(f, "[⟨{}⟩]", items.join(","))
    }
}

/// Class of a nondegenerate ε-hermitian form.
pub fn witt_class(t: &FormMatrix) -> Result<WittClass> {
    let ctx = t.ctx().with_eps(t.eps());
    if !t.is_nondegenerate() {
        return Err(Error::DegenerateInput);
    }
    if t.eps() == Sign::Minus && ctx.involution_is_identity() {
        return Ok(WittClass::zero(ctx));
    }
    Ok(WittClass::from_fixed(ctx, forms::hermitian_diagonal(t)?))
}

pub fn witt_sum(a: &WittClass, b: &WittClass) -> Result<WittClass> {
    a.add(b)
}

pub fn witt_neg(a: &WittClass) -> WittClass {
    a.neg()
}

pub fn witt_is_zero(a: &WittClass) -> bool {
    a.is_zero()
}

pub fn signed_disc(a: &WittClass) -> Result<SHatElement> {
    a.signed_disc()
}

pub fn in_ii(a: &WittClass) -> Result<bool> {
    a.in_ii()
}

pub fn trace_transfer(a: &WittClass) -> Result<WittClass> {
    a.trace_transfer()
}

fn canonical_entry(x: &Scalar) -> Scalar {
    match x {
        Scalar::Q(q) => Scalar::Q(BigRational::from_integer(crate::arith::squarefree_part(&(q.numer() * q.denom())))),
        Scalar::Fp { p, .. } => match FieldCtx::prime(*p).expect("valid prime").norm_class(x) {
            Ok(NormClassRep::Residue(r)) => Scalar::Fp { v: r, p: *p },
            _ => unreachable!("nonzero residue"),
        },
        Scalar::Fp2 { .. } => x.one_like(),
        Scalar::Qd { re, d, .. } => Scalar::Qd {
            re: BigRational::from_integer(crate::arith::squarefree_part(&(re.numer() * re.denom()))),
            im: num_traits::Zero::zero(),
            d: *d,
        },
    }
}

/// Greedily removes pairs `⟨a, -a⟩` of canonical entries.
fn strip_hyperbolic(entries: Vec<Scalar>) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = Vec::with_capacity(entries.len());
    for x in entries {
        let minus = canonical_entry(&-&x);
        if let Some(pos) = out.iter().position(|y| *y == minus) {
            out.remove(pos);
        } else {
            out.push(x);
        }
    }
    out.sort();
    out
}

fn compute_certificate(ctx: FieldCtx, entries: &[Scalar]) -> Certificate {
    let dim = entries.len();
    if ctx.eps == Sign::Minus && ctx.involution_is_identity() {
        return Certificate { dim: 0, signature: None, hasse: Vec::new(), is_zero: true };
    }
    match ctx.kind {
        FieldKind::PrimeFieldId(_) => {
            let det = entries.iter().fold(ctx.one(), |acc, a| &acc * a);
            let half = if (dim / 2) % 2 == 1 { -ctx.one() } else { ctx.one() };
            let is_zero = dim.is_multiple_of(2) && ctx.is_norm(&(&det * &half));
            Certificate { dim, signature: None, hasse: Vec::new(), is_zero }
        }
        FieldKind::FrobeniusQuadratic(_) => {
            Certificate { dim, signature: None, hasse: Vec::new(), is_zero: dim.is_multiple_of(2) }
        }
        FieldKind::RationalsId => {
            let q = invariants::rationals(entries);
            Certificate {
                dim,
                signature: Some(invariants::signature(&q)),
                hasse: hasse_table(&q),
                is_zero: invariants::witt_zero_over_q(&q),
            }
        }
        FieldKind::QuadExtConj(d) => {
            let q = invariants::rationals(entries);
            let trf = invariants::trace_form(&q, d);
            Certificate {
                dim,
                signature: (d < 0).then(|| invariants::signature(&q)),
                hasse: hasse_table(&trf),
                is_zero: dim.is_multiple_of(2) && invariants::witt_zero_over_q(&trf),
            }
        }
    }
}

fn hasse_table(q: &[BigRational]) -> Vec<(BigUint, i8)> {
    invariants::relevant_primes(q)
        .into_iter()
        .map(|p| {
            let v = invariants::witt_invariant(q, &Place::Finite(p.clone()));
            (p, v)
        })
        .collect()
}

/// Count of realizable local invariant tuples `(dim mod 2, signed
/// discriminant class, Hasse–Witt invariant)` over `Q_p` for diagonal forms
/// of dimension at most 4 with entries in `{1, u, p, up}`, `u` a non-residue.
pub fn local_tuple_count(p: u64) -> usize {
    let u = crate::field::least_nonresidue(p) as i64;
    let p = p as i64;
    let pool = [1, u, p, u * p];
    let mut seen = std::collections::BTreeSet::new();
    let mut stack: Vec<Vec<i64>> = vec![vec![]];
    while let Some(form) = stack.pop() {
        let q: Vec<BigRational> = form.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect();
        seen.insert(invariants::local_witt_tuple(&q, p as u64));
        if form.len() < 4 {
            for &a in &pool {
                if form.last().is_none_or(|&l| pool.iter().position(|&x| x == l) <= pool.iter().position(|&x| x == a)) {
                    let mut next = form.clone();
                    next.push(a);
                    stack.push(next);
                }
            }
        }
    }
    seen.len()
}
