//! Classical invariants of diagonal rational quadratic forms.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::field::Scalar;
use crate::witt::hilbert::{hilbert_symbol, Place};

/// Rational values of fixed-field scalars; panics on anything else.
pub fn rationals(entries: &[Scalar]) -> Vec<BigRational> {
    entries
        .iter()
        .map(|x| x.to_rational().expect("entry in Q or the rational part of Q(sqrt d)"))
        .collect()
}

/// Signed squarefree integers in the square classes of the entries.
pub fn square_classes(entries: &[BigRational]) -> Vec<BigInt> {
    entries.iter().map(|q| arith::squarefree_part(&(q.numer() * q.denom()))).collect()
}

/// `⟨1, -d⟩ ⊗ ⟨a_1, ..., a_n⟩`.
pub fn trace_form(entries: &[BigRational], d: i64) -> Vec<BigRational> {
    let md = BigRational::from_integer(BigInt::from(-d));
    entries.iter().flat_map(|a| [a.clone(), a * &md]).collect()
}

pub fn signature(entries: &[BigRational]) -> i64 {
    entries.iter().map(|a| if a.is_positive() { 1 } else { -1 }).sum()
}

/// Square class of the determinant.
pub fn det_class(entries: &[BigRational]) -> BigInt {
    square_classes(entries).iter().fold(BigInt::one(), |acc, c| arith::squarefree_product(&acc, c))
}

/// 2 together with every prime dividing some entry.
pub fn relevant_primes(entries: &[BigRational]) -> Vec<BigUint> {
    let mut primes = BTreeSet::new();
    primes.insert(BigUint::from(2u32));
    for c in square_classes(entries) {
        primes.extend(arith::prime_divisors(&c));
    }
    primes.into_iter().collect()
}

/// `s_v = ∏_{i<j} (a_i, a_j)_v`.
pub fn hasse(entries: &[BigRational], place: &Place) -> i8 {
    let classes: Vec<BigRational> =
        square_classes(entries).into_iter().map(BigRational::from_integer).collect();
    hasse_of_classes(&classes, place)
}

fn hasse_of_classes(classes: &[BigRational], place: &Place) -> i8 {
    // running product a_1 ... a_{j-1} turns the double product into one pass
    let mut acc: i8 = 1;
    let mut prefix = BigRational::one();
    for (j, a) in classes.iter().enumerate() {
        if j > 0 {
            acc *= hilbert_symbol(&prefix, a, place).expect("nonzero entries");
        }
        prefix = &prefix * a;
    }
    acc
}

/// The Hasse invariant normalized so that it is a Witt-class invariant:
/// it is `1` on every hyperbolic form and unchanged by adding `⟨a, -a⟩`.
pub fn witt_invariant(entries: &[BigRational], place: &Place) -> i8 {
    let n = entries.len();
    let s = hasse(entries, place);
    let minus_one = BigRational::from_integer(BigInt::from(-1));
    let d = BigRational::from_integer(det_class(entries));
    let mut f = s;
    if matches!(n % 8, 2..=5) {
        f *= hilbert_symbol(&minus_one, &minus_one, place).expect("nonzero");
    }
    if (n / 2) % 2 == 1 {
        f *= hilbert_symbol(&d, &minus_one, place).expect("nonzero");
    }
    f
}

/// Signed discriminant class `(-1)^{n(n-1)/2} det`.
pub fn signed_det_class(entries: &[BigRational]) -> BigInt {
    let n = entries.len();
    let d = det_class(entries);
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        -d
    } else {
        d
    }
}

/// Hasse–Minkowski: equal dimension, determinant class, signature and
/// Hasse invariants at every finite place.
pub fn isometric_over_q(a: &[BigRational], b: &[BigRational]) -> bool {
    if a.len() != b.len() || det_class(a) != det_class(b) || signature(a) != signature(b) {
        return false;
    }
    let mut primes: BTreeSet<BigUint> = relevant_primes(a).into_iter().collect();
    primes.extend(relevant_primes(b));
    primes.into_iter().all(|p| {
        let place = Place::Finite(p);
        hasse(a, &place) == hasse(b, &place)
    })
}

/// Whether the diagonal form is hyperbolic (zero in the Witt group of Q).
pub fn witt_zero_over_q(entries: &[BigRational]) -> bool {
    entries.len().is_multiple_of(2)
        && signature(entries) == 0
        && signed_det_class(entries).is_one()
        && relevant_primes(entries).into_iter().all(|p| witt_invariant(entries, &Place::Finite(p)) == 1)
}

/// Local invariants over `Q_p`, p odd: dimension parity, the signed
/// discriminant in `Q_p*/Q_p*²` as (valuation parity, residue symbol of the
/// unit part), and the normalized Hasse–Witt invariant.
pub fn local_witt_tuple(entries: &[BigRational], p: u64) -> (usize, (u32, i8), i8) {
    let pb = BigUint::from(p);
    let disc = signed_det_class(entries);
    let (v, unit) = arith::split_power(&disc, &pb);
    let unit_symbol = if unit.is_zero() { 0 } else { arith::legendre(&unit, &pb) };
    (entries.len() % 2, (v % 2, unit_symbol), witt_invariant(entries, &Place::Finite(pb)))
}
