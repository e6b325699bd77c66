//! Quadratic Hilbert symbols over the completions of `Q`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};

/// A place of `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinite,
    Finite(BigUint),
}

impl Place {
    pub fn prime(p: u64) -> Place {
        Place::Finite(BigUint::from(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// `(a, b)_v`: `+1` if `z² = a x² + b y²` has a nontrivial solution in the
/// completion `Q_v`, else `-1`.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: &Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    // n/d and n·d differ by the square d².
    let a = a.numer() * a.denom();
    let b = b.numer() * b.denom();
    Ok(match place {
        Place::Infinite => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) if *p == BigUint::from(2u32) => dyadic(&a, &b),
        Place::Finite(p) => odd(&a, &b, p),
    })
}

/// Integer convenience wrapper.
pub fn hilbert_symbol_int(a: i64, b: i64, place: &Place) -> Result<i8> {
    hilbert_symbol(&BigRational::from_integer(a.into()), &BigRational::from_integer(b.into()), place)
}

fn odd(a: &BigInt, b: &BigInt, p: &BigUint) -> i8 {
    let (alpha, u) = arith::split_power(a, p);
    let (beta, v) = arith::split_power(b, p);
    let mut s: i8 = 1;
    let half = ((p - 1u32) >> 1u32).is_odd();
    if alpha % 2 == 1 && beta % 2 == 1 && half {
        s = -s;
    }
    if beta % 2 == 1 {
        s *= arith::legendre(&u, p);
    }
    if alpha % 2 == 1 {
        s *= arith::legendre(&v, p);
    }
    s
}

fn dyadic(a: &BigInt, b: &BigInt) -> i8 {
    let two = BigUint::from(2u32);
    let (alpha, u) = arith::split_power(a, &two);
    let (beta, v) = arith::split_power(b, &two);
    let m8 = |x: &BigInt| x.mod_floor(&BigInt::from(8)).to_u32().expect("residue");
    let (u, v) = (m8(&u), m8(&v));
    // ε(x) = (x-1)/2 mod 2 and ω(x) = (x²-1)/8 mod 2 for odd x
    let eps = |x: u32| ((x - 1) / 2) % 2;
    let omega = |x: u32| ((x * x - 1) / 8) % 2;
    let e = eps(u) * eps(v) + (alpha % 2) * omega(v) + (beta % 2) * omega(u);
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_local(a: i64, b: i64, p: u64) -> i8 {
        // Primitive solutions of z² ≡ a x² + b y² modulo p^k decide
        // solvability over Q_p for squarefree inputs. Primitive means not all
        // of x, y, z are divisible by p.
        let k = if p == 2 { 5 } else { 2 };
        let m = (p as i64).pow(k);
        for x in 0..m {
            for y in 0..m {
                let rhs = (a * x * x + b * y * y).rem_euclid(m);
                for z in 0..m {
                    if (x % p as i64 != 0 || y % p as i64 != 0 || z % p as i64 != 0) && (z * z - rhs).rem_euclid(m) == 0
                    {
                        return 1;
                    }
                }
            }
        }
        -1
    }

    #[test]
    fn examples() {
        assert_eq!(hilbert_symbol_int(-1, -1, &Place::Infinite).unwrap(), -1);
        assert_eq!(hilbert_symbol_int(2, 5, &Place::prime(5)).unwrap(), -1);
        assert_eq!(brute_local(2, 5, 5), -1);
        for place in [Place::Infinite, Place::prime(2), Place::prime(3), Place::prime(7)] {
            assert_eq!(hilbert_symbol_int(1, 17, &place).unwrap(), 1);
        }
        assert_eq!(hilbert_symbol_int(0, 3, &Place::prime(3)), Err(Error::ZeroInput));
    }

    #[test]
    fn matches_brute_force_at_small_primes() {
        let values = [-6i64, -5, -3, -2, -1, 1, 2, 3, 5, 6, 10, 15];
        for p in [2u64, 3, 5] {
            for &a in &values {
                for &b in &values {
                    let expected = brute_local(a, b, p);
                    assert_eq!(hilbert_symbol_int(a, b, &Place::prime(p)).unwrap(), expected, "({a},{b})_{p}");
                }
            }
        }
    }

    fn places_for(a: i64, b: i64) -> Vec<Place> {
        let mut ps: Vec<u64> = vec![2];
        for x in [a, b] {
            for (p, _) in arith::factorize(&BigUint::from(x.unsigned_abs())) {
                ps.push(p.to_u64().unwrap());
            }
        }
        ps.sort();
        ps.dedup();
        let mut out = vec![Place::Infinite];
        out.extend(ps.into_iter().map(Place::prime));
        out
    }

    proptest! {
        #[test]
        fn product_formula(a in -500i64..500, b in -500i64..500) {
            prop_assume!(a != 0 && b != 0);
            let prod: i8 = places_for(a, b).iter().map(|v| hilbert_symbol_int(a, b, v).unwrap()).product();
            prop_assert_eq!(prod, 1);
        }

        #[test]
        fn steinberg_at_every_place(n in -200i64..200, d in 1i64..50) {
            let a = BigRational::new(n.into(), d.into());
            prop_assume!(!a.is_zero() && a != BigRational::from_integer(1.into()));
            let b = BigRational::from_integer(1.into()) - &a;
            for v in places_for(n * d, (d - n) * d) {
                prop_assert_eq!(hilbert_symbol(&a, &b, &v).unwrap(), 1);
            }
        }

        #[test]
        fn bimultiplicative_and_symmetric(a in -60i64..60, b in -60i64..60, c in -60i64..60) {
            prop_assume!(a != 0 && b != 0 && c != 0);
            for v in places_for(a * c, b) {
                let ab = hilbert_symbol_int(a, b, &v).unwrap();
                prop_assert_eq!(ab, hilbert_symbol_int(b, a, &v).unwrap());
                prop_assert_eq!(
                    hilbert_symbol_int(a * c, b, &v).unwrap(),
                    ab * hilbert_symbol_int(c, b, &v).unwrap()
                );
            }
        }
    }
}
