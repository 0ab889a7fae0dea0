//! Integer helpers shared by the oracle and the signature calculus.

use std::fmt::{Debug, Display};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

/// An exact integer ring element usable as a matrix entry.
///
/// Implemented for the machine integers (`i32`, `i64`, `i128`), which are
/// fast but can overflow (every operation is checked), and for [`BigInt`],
/// which cannot.
pub trait Scalar:
    Integer
    + Signed
    + Clone
    + Debug
    + Display
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
{
}

impl<T> Scalar for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
{
}

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub(crate) fn lcm_big(a: u64, b: u64) -> BigUint {
    BigUint::from(a).lcm(&BigUint::from(b))
}

/// Prime factorisation by trial division, primes ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest prime not dividing `m`.
pub fn least_prime_coprime_to(m: u64) -> u64 {
    let mut p = 2u64;
    loop {
        if !m.is_multiple_of(p) {
            return p;
        }
        p += 1;
        while !is_prime(p) {
            p += 1;
        }
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && factor_u64(n) == [(n, 1)]
}

pub(crate) fn log2_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return n.to_f64().unwrap_or(0.0).log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(0.0);
    top.log2() + shift as f64
}

pub(crate) fn to_bigint(n: &BigUint) -> BigInt {
    BigInt::from(n.clone())
}
