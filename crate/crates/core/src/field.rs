//! Exact scalars over the supported fields with involution.
//!
//! Four families are available: the rationals and prime fields with the
//! identity involution, `F_{p^2}` over `F_p` with Frobenius, and `Q(sqrt d)`
//! with conjugation. A [`Scalar`] carries enough data to know its own field,
//! so arithmetic needs no context argument; mixing scalars from different
//! fields is a programming error and panics.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::witt::hilbert::{hilbert_symbol, Place};

/// A sign `±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    /// `(-1)^k`.
    pub fn parity(k: u64) -> Sign {
        if k.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    /// `Q` with the identity involution.
    RationalsId,
    /// `F_p` with the identity involution.
    PrimeFieldId(u64),
    /// `F_{p^2}` with `x -> x^p`.
    FrobeniusQuadratic(u64),
    /// `Q(sqrt d)` with `sqrt d -> -sqrt d`.
    QuadExtConj(i64),
}

/// A field with involution together with the sign `ε`.
///
/// The hyperbolic module built over this context carries a `(-ε)`-hermitian
/// form, and triples of Lagrangians are classified by `ε`-hermitian matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    pub kind: FieldKind,
    pub eps: Sign,
}

impl FieldCtx {
    pub fn new(kind: FieldKind, eps: Sign) -> Result<FieldCtx> {
        match kind {
            FieldKind::RationalsId => {}
            FieldKind::PrimeFieldId(p) | FieldKind::FrobeniusQuadratic(p) => {
                if p == 2 || !arith::is_prime_u64(p) {
                    return Err(Error::InvalidField(format!("{p} is not an odd prime")));
                }
                if p >= 1 << 31 {
                    return Err(Error::InvalidField(format!("prime {p} too large")));
                }
            }
            FieldKind::QuadExtConj(d) => {
                if d == 0 || d == 1 {
                    return Err(Error::InvalidField(format!("d = {d} gives no extension")));
                }
                if arith::squarefree_part(&BigInt::from(d)) != BigInt::from(d) {
                    return Err(Error::InvalidField(format!("d = {d} is not squarefree")));
                }
            }
        }
        Ok(FieldCtx { kind, eps })
    }

    pub fn rationals() -> FieldCtx {
        FieldCtx { kind: FieldKind::RationalsId, eps: Sign::Plus }
    }

    /// Symplectic context over `Q`: the module is skew, κ is symmetric.
    pub fn symplectic_q() -> FieldCtx {
        FieldCtx::rationals()
    }

    pub fn prime(p: u64) -> Result<FieldCtx> {
        FieldCtx::new(FieldKind::PrimeFieldId(p), Sign::Plus)
    }

    pub fn frobenius(p: u64) -> Result<FieldCtx> {
        FieldCtx::new(FieldKind::FrobeniusQuadratic(p), Sign::Plus)
    }

    pub fn quad(d: i64) -> Result<FieldCtx> {
        FieldCtx::new(FieldKind::QuadExtConj(d), Sign::Plus)
    }

    pub fn with_eps(self, eps: Sign) -> FieldCtx {
        FieldCtx { eps, ..self }
    }

    /// Same field, sign `+1`: the context in which Witt classes of the
    /// fixed field (or hermitian forms) are computed.
    pub fn hermitian(self) -> FieldCtx {
        self.with_eps(Sign::Plus)
    }

    pub fn involution_is_identity(&self) -> bool {
        matches!(self.kind, FieldKind::RationalsId | FieldKind::PrimeFieldId(_))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, FieldKind::PrimeFieldId(_) | FieldKind::FrobeniusQuadratic(_))
    }

    /// Characteristic; 0 for the number fields.
    pub fn characteristic(&self) -> u64 {
        match self.kind {
            FieldKind::PrimeFieldId(p) | FieldKind::FrobeniusQuadratic(p) => p,
            _ => 0,
        }
    }

    /// Number of elements for finite fields.
    pub fn order(&self) -> Option<u64> {
        match self.kind {
            FieldKind::PrimeFieldId(p) => Some(p),
            FieldKind::FrobeniusQuadratic(p) => Some(p * p),
            _ => None,
        }
    }

    /// Symplectic: identity involution and skew module.
    pub fn is_symplectic(&self) -> bool {
        self.involution_is_identity() && self.eps == Sign::Plus
    }

    pub fn zero(&self) -> Scalar {
        self.from_int(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> Scalar {
        match self.kind {
            FieldKind::RationalsId => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
            FieldKind::PrimeFieldId(p) => Scalar::Fp { v: reduce_i64(v, p), p },
            FieldKind::FrobeniusQuadratic(p) => Scalar::Fp2 {
                re: reduce_i64(v, p),
                im: 0,
                p,
                r: fp2_nonresidue(p),
            },
            FieldKind::QuadExtConj(d) => Scalar::Qd {
                re: BigRational::from_integer(BigInt::from(v)),
                im: BigRational::zero(),
                d,
            },
        }
    }

    /// Image of a rational number; fails in characteristic p if the
    /// denominator vanishes.
    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar> {
        match self.kind {
            FieldKind::RationalsId => Ok(Scalar::Q(q.clone())),
            FieldKind::QuadExtConj(d) => Ok(Scalar::Qd { re: q.clone(), im: BigRational::zero(), d }),
            FieldKind::PrimeFieldId(_) | FieldKind::FrobeniusQuadratic(_) => {
                let p = self.characteristic();
                let num = reduce_big(q.numer(), p);
                let den = reduce_big(q.denom(), p);
                if den == 0 {
                    return Err(Error::Parse(format!("denominator of {q} vanishes mod {p}")));
                }
                Ok(self.from_int(mul_mod(num, inv_mod(den, p), p) as i64))
            }
        }
    }

    /// `a + b·θ` where θ is the generator with `θ^J = -θ`.
    pub fn from_parts(&self, a: &BigRational, b: &BigRational) -> Result<Scalar> {
        let re = self.from_rational(a)?;
        if b.is_zero() {
            return Ok(re);
        }
        let theta = self
            .theta()
            .ok_or_else(|| Error::Parse("second coordinate given for a field without extension".into()))?;
        Ok(&re + &(&self.from_rational(b)? * &theta))
    }

    /// A nonzero element with `θ^J = -θ`, when the involution is nontrivial.
    pub fn theta(&self) -> Option<Scalar> {
        match self.kind {
            FieldKind::FrobeniusQuadratic(p) => Some(Scalar::Fp2 { re: 0, im: 1, p, r: fp2_nonresidue(p) }),
            FieldKind::QuadExtConj(d) => Some(Scalar::Qd { re: BigRational::zero(), im: BigRational::one(), d }),
            _ => None,
        }
    }

    /// Basis over the prime field of `D^ε = {a : a = ε a^J}` (for the
    /// given sign), used for diagonal entries of ε-hermitian matrices.
    pub fn fixed_basis(&self, eps: Sign) -> Vec<Scalar> {
        match (self.theta(), eps) {
            (_, Sign::Plus) => vec![self.one()],
            (None, Sign::Minus) => vec![],
            (Some(theta), Sign::Minus) => vec![theta],
        }
    }

    /// Basis of the field over its prime field (`Q` or `F_p`).
    pub fn prime_basis(&self) -> Vec<Scalar> {
        let mut out = vec![self.one()];
        out.extend(self.theta());
        out
    }

    /// All elements of a finite field in a fixed order (zero first).
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self.kind {
            FieldKind::PrimeFieldId(p) => Some((0..p).map(|v| Scalar::Fp { v, p }).collect()),
            FieldKind::FrobeniusQuadratic(p) => {
                let r = fp2_nonresidue(p);
                Some(
                    (0..p)
                        .flat_map(|im| (0..p).map(move |re| Scalar::Fp2 { re, im, p, r }))
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Elements of the fixed field `D^{J}` for a finite field.
    pub fn fixed_elements(&self) -> Option<Vec<Scalar>> {
        let p = self.characteristic();
        if p == 0 {
            return None;
        }
        Some((0..p as i64).map(|v| self.from_int(v)).collect())
    }

    /// A random element; over the number fields coordinates are small
    /// rationals with numerators in `[-bound, bound]`.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Scalar {
        match self.kind {
            FieldKind::RationalsId => Scalar::Q(random_rational(rng, bound)),
            FieldKind::PrimeFieldId(p) => Scalar::Fp { v: rng.gen_range(0..p), p },
            FieldKind::FrobeniusQuadratic(p) => Scalar::Fp2 {
                re: rng.gen_range(0..p),
                im: rng.gen_range(0..p),
                p,
                r: fp2_nonresidue(p),
            },
            FieldKind::QuadExtConj(d) => {
                let im = if rng.gen_bool(0.5) { random_rational(rng, bound) } else { BigRational::zero() };
                Scalar::Qd { re: random_rational(rng, bound), im, d }
            }
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Scalar {
        loop {
            let x = self.random(rng, bound);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// Random nonzero element of the fixed field.
    pub fn random_fixed_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Scalar {
        loop {
            let x = self.random(rng, bound).real_part();
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// Parses `"a"`, `"a/b"`, `"(a,b)"`, `"a+b*w"` or `"a+b*sqrt(d)"`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad pair {s}")))?;
            return self.from_parts(&parse_rational(a)?, &parse_rational(b)?);
        }
        let suffix = match self.kind {
            FieldKind::FrobeniusQuadratic(_) => Some("w".to_string()),
            FieldKind::QuadExtConj(d) => Some(format!("sqrt({d})")),
            _ => None,
        };
        if let Some(suffix) = suffix {
            if let Some(body) = s.strip_suffix(&suffix) {
                let body = body.strip_suffix('*').unwrap_or(body);
                let split = body
                    .char_indices()
                    .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
                    .map(|(i, _)| i)
                    .next_back();
                let (a, b) = match split {
                    Some(i) => (&body[..i], &body[i..]),
                    None => ("0", body),
                };
                let b = match b {
                    "" | "+" => "1",
                    "-" => "-1",
                    other => other.strip_prefix('+').unwrap_or(other),
                };
                return self.from_parts(&parse_rational(a)?, &parse_rational(b)?);
            }
        }
        self.from_rational(&parse_rational(&s)?)
    }

    /// Canonical representative of `x` modulo the norm group
    /// `N = {y^J y}` (see [`NormClassRep`]).
    pub fn norm_class(&self, x: &Scalar) -> Result<NormClassRep> {
        if x.is_zero() {
            return Err(Error::ZeroScalar);
        }
        match x {
            Scalar::Q(q) => Ok(NormClassRep::Square(arith::squarefree_part(&(q.numer() * q.denom())))),
            Scalar::Fp { v, p } => Ok(NormClassRep::Residue(if is_qr(*v, *p) { 1 } else { fp2_nonresidue(*p) })),
            Scalar::Fp2 { p, .. } => Ok(NormClassRep::Circle(x.pow(p - 1))),
            Scalar::Qd { re, im, d } => {
                if !im.is_zero() {
                    return Err(Error::WrongContext(
                        "norm class of an element outside the fixed field of Q(sqrt d)".into(),
                    ));
                }
                let dq = BigRational::from_integer(BigInt::from(*d));
                let mut places = BTreeSet::new();
                for place in relevant_places(&[re.clone(), dq.clone()]) {
                    if hilbert_symbol(re, &dq, &place)? == -1 {
                        places.insert(place);
                    }
                }
                Ok(NormClassRep::Symbols(places))
            }
        }
    }

    /// Whether a nonzero `x` lies in the norm group `N`.
    pub fn is_norm(&self, x: &Scalar) -> bool {
        if x.is_zero() || !x.is_fixed() {
            return false;
        }
        match self.norm_class(x) {
            Ok(c) => c.is_trivial(),
            Err(_) => false,
        }
    }
}

/// Representative of a class in `E*/N`, `N` the group of norms `y^J y`.
///
/// * over `Q`: the signed squarefree integer in the square class;
/// * over `F_p`: `1` or the least non-residue;
/// * over `F_{p^2}`: the value `x^{p-1}`, a norm-one element that determines
///   the class (it equals `1` exactly on `F_p^*`, the group of norms);
/// * over `Q(sqrt d)`, for rational `x`: the set of places where the Hilbert
///   symbol `(x, d)_v` is `-1` (empty iff `x` is a norm).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormClassRep {
    Square(BigInt),
    Residue(u64),
    Circle(Scalar),
    Symbols(BTreeSet<Place>),
}

impl NormClassRep {
    pub fn is_trivial(&self) -> bool {
        match self {
            NormClassRep::Square(s) => s.is_one(),
            NormClassRep::Residue(v) => *v == 1,
            NormClassRep::Circle(x) => x.is_one(),
            NormClassRep::Symbols(s) => s.is_empty(),
        }
    }

    /// Group law on classes.
    pub fn compose(&self, other: &NormClassRep) -> NormClassRep {
        match (self, other) {
            (NormClassRep::Square(a), NormClassRep::Square(b)) => {
                NormClassRep::Square(arith::squarefree_product(a, b))
            }
            (NormClassRep::Residue(a), NormClassRep::Residue(b)) => {
                // both classes are 1 or the fixed non-residue
                if (*a == 1) == (*b == 1) {
                    NormClassRep::Residue(1)
                } else {
                    NormClassRep::Residue(if *a == 1 { *b } else { *a })
                }
            }
            (NormClassRep::Circle(a), NormClassRep::Circle(b)) => NormClassRep::Circle(a * b),
            (NormClassRep::Symbols(a), NormClassRep::Symbols(b)) => {
                NormClassRep::Symbols(a.symmetric_difference(b).cloned().collect())
            }
            _ => panic!("composing norm classes from different fields"),
        }
    }
}

impl fmt::Display for NormClassRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormClassRep::Square(s) => write!(f, "{s}"),
            NormClassRep::Residue(v) => write!(f, "{v}"),
            NormClassRep::Circle(x) => write!(f, "{x}"),
            NormClassRep::Symbols(s) if s.is_empty() => write!(f, "1"),
            NormClassRep::Symbols(s) => {
                let names: Vec<String> = s.iter().map(|p| p.to_string()).collect();
                write!(f, "nonnorm[{}]", names.join(","))
            }
        }
    }
}

/// Places at which a Hilbert symbol of the given rationals can be nontrivial.
pub fn relevant_places(values: &[BigRational]) -> Vec<Place> {
    let mut primes: BTreeSet<BigUint> = BTreeSet::new();
    primes.insert(BigUint::from(2u32));
    for v in values {
        for part in [v.numer(), v.denom()] {
            if !part.is_zero() {
                primes.extend(arith::prime_divisors(part));
            }
        }
    }
    let mut out = vec![Place::Infinite];
    out.extend(primes.into_iter().map(Place::Finite));
    out
}

/// An exact scalar.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Q(BigRational),
    Fp { v: u64, p: u64 },
    /// `re + im·ω` with `ω² = r`, `r` the least non-residue mod `p`.
    Fp2 { re: u64, im: u64, p: u64, r: u64 },
    /// `re + im·sqrt(d)`.
    Qd { re: BigRational, im: BigRational, d: i64 },
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
            Scalar::Fp2 { re, im, .. } => *re == 0 && *im == 0,
            Scalar::Qd { re, im, .. } => re.is_zero() && im.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
            Scalar::Fp2 { re, im, .. } => *re == 1 && *im == 0,
            Scalar::Qd { re, im, .. } => re.is_one() && im.is_zero(),
        }
    }

    /// Zero of the same field.
    pub fn zero_like(&self) -> Scalar {
        self.int_like(0)
    }

    pub fn one_like(&self) -> Scalar {
        self.int_like(1)
    }

    pub fn int_like(&self, k: i64) -> Scalar {
        match self {
            Scalar::Q(_) => Scalar::Q(BigRational::from_integer(BigInt::from(k))),
            Scalar::Fp { p, .. } => Scalar::Fp { v: reduce_i64(k, *p), p: *p },
            Scalar::Fp2 { p, r, .. } => Scalar::Fp2 { re: reduce_i64(k, *p), im: 0, p: *p, r: *r },
            Scalar::Qd { d, .. } => Scalar::Qd {
                re: BigRational::from_integer(BigInt::from(k)),
                im: BigRational::zero(),
                d: *d,
            },
        }
    }

    /// The involution `x -> x^J`.
    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Q(_) | Scalar::Fp { .. } => self.clone(),
            Scalar::Fp2 { re, im, p, r } => Scalar::Fp2 { re: *re, im: neg_mod(*im, *p), p: *p, r: *r },
            Scalar::Qd { re, im, d } => Scalar::Qd { re: re.clone(), im: -im, d: *d },
        }
    }

    /// Fixed by the involution.
    pub fn is_fixed(&self) -> bool {
        match self {
            Scalar::Fp2 { im, .. } => *im == 0,
            Scalar::Qd { im, .. } => im.is_zero(),
            _ => true,
        }
    }

    /// `(x + x^J)/2`.
    pub fn real_part(&self) -> Scalar {
        match self {
            Scalar::Fp2 { re, p, r, .. } => Scalar::Fp2 { re: *re, im: 0, p: *p, r: *r },
            Scalar::Qd { re, d, .. } => Scalar::Qd { re: re.clone(), im: BigRational::zero(), d: *d },
            _ => self.clone(),
        }
    }

    /// `x · x^J`.
    pub fn norm(&self) -> Scalar {
        self * &self.conj()
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::ZeroScalar);
        }
        Ok(match self {
            Scalar::Q(q) => Scalar::Q(q.recip()),
            Scalar::Fp { v, p } => Scalar::Fp { v: inv_mod(*v, *p), p: *p },
            // x^{-1} = x^J / (x x^J), the norm lying in the fixed field
            Scalar::Fp2 { .. } | Scalar::Qd { .. } => {
                let n_inv = match self.norm() {
                    Scalar::Fp2 { re, p, r, .. } => Scalar::Fp2 { re: inv_mod(re, p), im: 0, p, r },
                    Scalar::Qd { re, d, .. } => Scalar::Qd { re: re.recip(), im: BigRational::zero(), d },
                    _ => unreachable!(),
                };
                &self.conj() * &n_inv
            }
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Rational value of a fixed element of `Q` or `Q(sqrt d)`.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Q(q) => Some(q.clone()),
            Scalar::Qd { re, im, .. } if im.is_zero() => Some(re.clone()),
            _ => None,
        }
    }

    /// Residue of a fixed element of a finite field.
    pub fn to_residue(&self) -> Option<u64> {
        match self {
            Scalar::Fp { v, .. } => Some(*v),
            Scalar::Fp2 { re, im: 0, .. } => Some(*re),
            _ => None,
        }
    }

    /// Coordinates `(a, b)` with `x = a + b·θ`, as display strings.
    pub fn parts(&self) -> (String, String) {
        match self {
            Scalar::Q(q) => (q.to_string(), "0".into()),
            Scalar::Fp { v, .. } => (v.to_string(), "0".into()),
            Scalar::Fp2 { re, im, .. } => (re.to_string(), im.to_string()),
            Scalar::Qd { re, im, .. } => (re.to_string(), im.to_string()),
        }
    }

    /// Sign of a nonzero real scalar (`Q`, or `Q(sqrt d)` fixed part with
    /// `d < 0`); `None` otherwise.
    pub fn real_sign(&self) -> Option<Sign> {
        let q = match self {
            Scalar::Q(q) => q,
            Scalar::Qd { re, im, .. } if im.is_zero() => re,
            _ => return None,
        };
        if q.is_zero() {
            None
        } else if q.is_positive() {
            Some(Sign::Plus)
        } else {
            Some(Sign::Minus)
        }
    }

    fn same_field(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Q(_), Scalar::Q(_)) => true,
            (Scalar::Fp { p: a, .. }, Scalar::Fp { p: b, .. }) => a == b,
            (Scalar::Fp2 { p: a, .. }, Scalar::Fp2 { p: b, .. }) => a == b,
            (Scalar::Qd { d: a, .. }, Scalar::Qd { d: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => write!(f, "{q}"),
            Scalar::Fp { v, .. } => write!(f, "{v}"),
            Scalar::Fp2 { re, im, .. } => match (re, im) {
                (_, 0) => write!(f, "{re}"),
                (0, _) => write!(f, "{im}*w"),
                _ => write!(f, "{re}+{im}*w"),
            },
            Scalar::Qd { re, im, d } => {
                if im.is_zero() {
                    write!(f, "{re}")
                } else if re.is_zero() {
                    write!(f, "{im}*sqrt({d})")
                } else if im.is_negative() {
                    write!(f, "{re}{im}*sqrt({d})")
                } else {
                    write!(f, "{re}+{im}*sqrt({d})")
                }
            }
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        assert!(self.same_field(rhs), "adding scalars of different fields");
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, .. }) => Scalar::Fp { v: (a + b) % p, p: *p },
            (Scalar::Fp2 { re: a, im: b, p, r }, Scalar::Fp2 { re: c, im: d, .. }) => {
                Scalar::Fp2 { re: (a + c) % p, im: (b + d) % p, p: *p, r: *r }
            }
            (Scalar::Qd { re: a, im: b, d }, Scalar::Qd { re: c, im: e, .. }) => {
                Scalar::Qd { re: a + c, im: b + e, d: *d }
            }
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { v, p } => Scalar::Fp { v: neg_mod(*v, *p), p: *p },
            Scalar::Fp2 { re, im, p, r } => Scalar::Fp2 { re: neg_mod(*re, *p), im: neg_mod(*im, *p), p: *p, r: *r },
            Scalar::Qd { re, im, d } => Scalar::Qd { re: -re, im: -im, d: *d },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        assert!(self.same_field(rhs), "multiplying scalars of different fields");
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, .. }) => Scalar::Fp { v: mul_mod(*a, *b, *p), p: *p },
            (Scalar::Fp2 { re: a, im: b, p, r }, Scalar::Fp2 { re: c, im: d, .. }) => {
                let p = *p;
                let re = (mul_mod(*a, *c, p) + mul_mod(mul_mod(*b, *d, p), *r, p)) % p;
                let im = (mul_mod(*a, *d, p) + mul_mod(*b, *c, p)) % p;
                Scalar::Fp2 { re, im, p, r: *r }
            }
            (Scalar::Qd { re: a, im: b, d }, Scalar::Qd { re: c, im: e, .. }) => {
                let dq = BigRational::from_integer(BigInt::from(*d));
                Scalar::Qd { re: a * c + b * e * dq, im: a * e + b * c, d: *d }
            }
            _ => unreachable!(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

/// `x^J`.
pub fn apply_involution(_ctx: &FieldCtx, x: &Scalar) -> Scalar {
    x.conj()
}

/// Canonical class of `x` modulo the norm group.
pub fn norm_subgroup_class(ctx: &FieldCtx, x: &Scalar) -> Result<NormClassRep> {
    ctx.norm_class(x)
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim_start_matches('+').parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> BigRational {
    let n = rng.gen_range(-bound..=bound);
    let d = if rng.gen_bool(0.25) { rng.gen_range(1..=bound.max(1)) } else { 1 };
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn fp2_nonresidue(p: u64) -> u64 {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<u64, u64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    *cache
        .lock()
        .expect("nonresidue cache poisoned")
        .entry(p)
        .or_insert_with(|| arith::least_nonresidue(p))
}

/// The fixed non-residue used as the nontrivial square-class representative.
pub fn least_nonresidue(p: u64) -> u64 {
    fp2_nonresidue(p)
}

fn is_qr(v: u64, p: u64) -> bool {
    arith::pow_mod_u64(v, (p - 1) / 2, p) == 1
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    arith::mul_mod_u64(a, b, p)
}

#[inline]
fn neg_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    arith::pow_mod_u64(a, p - 2, p)
}

fn reduce_i64(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

fn reduce_big(v: &BigInt, p: u64) -> u64 {
    use num_integer::Integer;
    v.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Q(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn involution_examples() {
        let ctx = FieldCtx::rationals();
        assert_eq!(apply_involution(&ctx, &q(3, 2)), q(3, 2));

        let gauss = FieldCtx::quad(-1).unwrap();
        let x = gauss.parse_scalar("1+2*sqrt(-1)").unwrap();
        assert_eq!(x.conj(), gauss.parse_scalar("1-2*sqrt(-1)").unwrap());

        let f9 = FieldCtx::frobenius(3).unwrap();
        let w = f9.theta().unwrap();
        assert_eq!(w.conj(), w.pow(3));
    }

    #[test]
    fn norm_class_examples() {
        let ctx = FieldCtx::rationals();
        assert_eq!(ctx.norm_class(&q(18, 1)).unwrap(), NormClassRep::Square(BigInt::from(2)));
        assert_eq!(ctx.norm_class(&q(-8, 27)).unwrap(), NormClassRep::Square(BigInt::from(-6)));

        let f5 = FieldCtx::prime(5).unwrap();
        let squares: Vec<u64> = (1..5u64).map(|x| x * x % 5).collect();
        assert!(!squares.contains(&3));
        assert_eq!(f5.norm_class(&f5.from_int(3)).unwrap(), NormClassRep::Residue(2));
        assert_eq!(f5.norm_class(&f5.from_int(4)).unwrap(), NormClassRep::Residue(1));

        let gauss = FieldCtx::quad(-1).unwrap();
        let found = (-3i64..=3).any(|a| (-3i64..=3).any(|b| a * a + b * b == 5));
        assert!(found);
        assert!(gauss.norm_class(&gauss.from_int(5)).unwrap().is_trivial());
        assert!(!gauss.norm_class(&gauss.from_int(3)).unwrap().is_trivial());
        assert!(!gauss.norm_class(&gauss.from_int(-1)).unwrap().is_trivial());
        assert_eq!(gauss.norm_class(&gauss.zero()), Err(Error::ZeroScalar));
    }

    #[test]
    fn norm_classes_over_quadratic_field_match_bounded_search() {
        // x is a norm from Q(i) iff x = a^2 + b^2 has a rational solution;
        // for small positive integers an integer search suffices.
        let gauss = FieldCtx::quad(-1).unwrap();
        for x in 1i64..60 {
            let brute = (0..8i64).any(|a| (0..8i64).any(|b| a * a + b * b == x));
            assert_eq!(gauss.is_norm(&gauss.from_int(x)), brute, "x = {x}");
        }
    }

    #[test]
    fn frobenius_norms_are_the_prime_field() {
        let f9 = FieldCtx::frobenius(3).unwrap();
        let mut norms: Vec<Scalar> = f9
            .elements()
            .unwrap()
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| x.norm())
            .collect();
        norms.sort();
        norms.dedup();
        assert_eq!(norms, vec![f9.from_int(1), f9.from_int(2)]);
        for x in f9.elements().unwrap().iter().filter(|x| !x.is_zero()) {
            assert_eq!(f9.is_norm(x), x.is_fixed());
        }
    }

    #[test]
    fn field_axioms_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for ctx in [
            FieldCtx::rationals(),
            FieldCtx::prime(7).unwrap(),
            FieldCtx::frobenius(5).unwrap(),
            FieldCtx::quad(-3).unwrap(),
            FieldCtx::quad(5).unwrap(),
        ] {
            for _ in 0..200 {
                let a = ctx.random_nonzero(&mut rng, 5);
                let b = ctx.random(&mut rng, 5);
                let c = ctx.random(&mut rng, 5);
                assert_eq!(&a * &a.inv().unwrap(), ctx.one());
                assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
                assert_eq!(a.conj().conj(), a);
                assert!(a.norm().is_fixed());
            }
        }
    }

    #[test]
    fn norm_class_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for ctx in [FieldCtx::rationals(), FieldCtx::prime(11).unwrap(), FieldCtx::quad(-1).unwrap(), FieldCtx::quad(2).unwrap()] {
            for _ in 0..100 {
                let x = ctx.random_fixed_nonzero(&mut rng, 30);
                let y = ctx.random_fixed_nonzero(&mut rng, 30);
                let z = ctx.random_nonzero(&mut rng, 4);
                let cx = ctx.norm_class(&x).unwrap();
                let cy = ctx.norm_class(&y).unwrap();
                assert_eq!(ctx.norm_class(&(&x * &y)).unwrap(), cx.compose(&cy));
                assert_eq!(ctx.norm_class(&(&x * &z.norm())).unwrap(), cx);
            }
        }
        let f25 = FieldCtx::frobenius(5).unwrap();
        for _ in 0..100 {
            let x = f25.random_nonzero(&mut rng, 0);
            let y = f25.random_nonzero(&mut rng, 0);
            let prod = f25.norm_class(&x).unwrap().compose(&f25.norm_class(&y).unwrap());
            assert_eq!(f25.norm_class(&(&x * &y)).unwrap(), prod);
            assert_eq!(f25.norm_class(&(&x * &y.norm())).unwrap(), f25.norm_class(&x).unwrap());
        }
    }

    #[test]
    fn parsing_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for ctx in [FieldCtx::rationals(), FieldCtx::frobenius(7).unwrap(), FieldCtx::quad(-5).unwrap()] {
            for _ in 0..50 {
                let x = ctx.random(&mut rng, 9);
                assert_eq!(ctx.parse_scalar(&x.to_string()).unwrap(), x, "{x}");
                let (a, b) = x.parts();
                assert_eq!(ctx.parse_scalar(&format!("({a},{b})")).unwrap(), x);
            }
        }
        let f5 = FieldCtx::prime(5).unwrap();
        assert_eq!(f5.parse_scalar("1/2").unwrap(), f5.from_int(3));
        assert!(f5.parse_scalar("1/5").is_err());
        assert!(FieldCtx::rationals().parse_scalar("(1,2)").is_err());
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(FieldCtx::prime(2).is_err());
        assert!(FieldCtx::prime(9).is_err());
        assert!(FieldCtx::quad(4).is_err());
        assert!(FieldCtx::quad(1).is_err());
    }
}
