//! Exact arithmetic in GF(2^ell) for ell <= 64 and in prime fields F_p.
//!
//! Binary-field elements are u64 values read as polynomials over F2; contexts
//! carry the irreducible modulus. Moduli are found deterministically: the
//! numerically smallest irreducible polynomial of the requested degree, so
//! every run of the toolkit reduces against the same tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Gf2Elem = u64;

// ---------------------------------------------------------------------------
// Polynomials over F2, packed into u128 (degree <= 127).

fn poly_degree(f: u128) -> i32 {
    127 - f.leading_zeros() as i32
}

/// Carry-less product of two polynomials of degree <= 63.
fn poly_mul(a: u64, b: u64) -> u128 {
    let mut out = 0u128;
    let a = a as u128;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        let t = b.trailing_zeros();
        b >>= t;
        shift += t;
        out ^= a << shift;
        b &= !1;
    }
    out
}

/// Remainder of `a` modulo `m` (m != 0).
fn poly_mod(mut a: u128, m: u128) -> u128 {
    let dm = poly_degree(m);
    loop {
        let da = poly_degree(a);
        if da < dm {
            return a;
        }
        a ^= m << (da - dm);
    }
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_mod(a, b);
        a = b;
        b = r;
    }
    a
}

fn poly_mulmod(a: u64, b: u64, m: u128) -> u64 {
    poly_mod(poly_mul(a, b), m) as u64
}

/// x^(2^k) mod m by repeated squaring.
fn poly_frobenius(k: u32, m: u128) -> u64 {
    let mut x = poly_mod(0b10, m) as u64;
    for _ in 0..k {
        x = poly_mulmod(x, x, m);
    }
    x
}

/// Irreducibility over F2. Exhaustive trial division up to degree 16,
/// Rabin's test above that.
pub fn poly_is_irreducible(f: u128) -> bool {
    let n = poly_degree(f);
    if n <= 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    if f & 1 == 0 {
        return false; // divisible by x
    }
    if f.count_ones().is_multiple_of(2) {
        return false; // f(1) = 0, divisible by x + 1
    }
    if n <= 16 {
        for d in 1..=(n / 2) {
            for g in (1u128 << d)..(1u128 << (d + 1)) {
                if poly_mod(f, g) == 0 {
                    return false;
                }
            }
        }
        true
    } else {
        // Rabin: x^(2^n) == x mod f, and gcd(x^(2^(n/q)) - x, f) = 1
        // for every prime divisor q of n.
        let n = n as u32;
        if poly_frobenius(n, f) != poly_mod(0b10, f) as u64 {
            return false;
        }
        let mut rem = n;
        let mut q = 2;
        let mut primes = Vec::new();
        while q * q <= rem {
            if rem.is_multiple_of(q) {
                primes.push(q);
                while rem.is_multiple_of(q) {
                    rem /= q;
                }
            }
            q += 1;
        }
        if rem > 1 {
            primes.push(rem);
        }
        for q in primes {
            let h = poly_frobenius(n / q, f) ^ poly_mod(0b10, f) as u64;
            if poly_gcd(h as u128, f) != 1 {
                return false;
            }
        }
        true
    }
}

/// Numerically smallest irreducible polynomial of degree `ell`.
pub fn smallest_irreducible(ell: u32) -> u128 {
    assert!((1..=64).contains(&ell));
    let base = 1u128 << ell;
    let mut low = 1u128;
    loop {
        let f = base | low;
        if poly_is_irreducible(f) {
            return f;
        }
        low += 2;
        assert!(low < base, "no irreducible of degree {ell} found");
    }
}

// ---------------------------------------------------------------------------
// GF(2^ell)

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gf2Ctx {
    ell: u32,
    modulus: u128,
}

impl Gf2Ctx {
    /// Field of width `ell` with the deterministic smallest modulus.
    pub fn new(ell: u32) -> Self {
        Gf2Ctx {
            ell,
            modulus: smallest_irreducible(ell),
        }
    }

    pub fn with_modulus(ell: u32, modulus: u128) -> Result<Self> {
        if !(1..=64).contains(&ell) {
            return Err(Error::InvalidParam(format!("field width {ell} not in 1..=64")));
        }
        if poly_degree(modulus) != ell as i32 {
            return Err(Error::InvalidParam(format!(
                "modulus {modulus:#x} does not have degree {ell}"
            )));
        }
        if !poly_is_irreducible(modulus) {
            return Err(Error::InvalidParam(format!("modulus {modulus:#x} is reducible")));
        }
        Ok(Gf2Ctx { ell, modulus })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    /// Number of field elements, as u128 so ell = 64 does not overflow.
    pub fn size(&self) -> u128 {
        1u128 << self.ell
    }

    /// Order of the multiplicative group, 2^ell - 1.
    pub fn group_order(&self) -> u64 {
        ((1u128 << self.ell) - 1) as u64
    }

    pub fn contains(&self, a: Gf2Elem) -> bool {
        self.ell == 64 || a < (1u64 << self.ell)
    }

    pub fn add(&self, a: Gf2Elem, b: Gf2Elem) -> Gf2Elem {
        a ^ b
    }

    /// Carry-less polynomial product reduced modulo the field modulus.
    pub fn mul(&self, a: Gf2Elem, b: Gf2Elem) -> Gf2Elem {
        debug_assert!(self.contains(a) && self.contains(b));
        let mut acc = 0u128;
        let mut a = a as u128;
        let mut b = b;
        let top = 1u128 << self.ell;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc as u64
    }

    /// Square-and-multiply; `pow(a, 0) = 1` including for a = 0.
    pub fn pow(&self, a: Gf2Elem, mut e: u64) -> Gf2Elem {
        let mut base = a;
        let mut acc = 1u64;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The standard monomial basis 1, x, ..., x^(ell-1).
    pub fn basis(&self) -> Vec<Gf2Elem> {
        (0..self.ell).map(|i| 1u64 << i).collect()
    }

    /// Least-valued element of multiplicative order 2^ell - 1, verified by
    /// checking g^(order/q) != 1 for every prime factor q of the order.
    pub fn find_generator(&self) -> Result<Gf2Elem> {
        let order = self.group_order();
        if order == 1 {
            return Ok(1);
        }
        let factors = factor_u64(order).ok_or(Error::FactoringInfeasible { ell: self.ell })?;
        'cand: for g in 2..=order {
            for &q in factors.keys() {
                if self.pow(g, order / q) == 1 {
                    continue 'cand;
                }
            }
            return Ok(g);
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }
}

// ---------------------------------------------------------------------------
// u64 primality and factoring

fn mulmod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e != 0 {
        if e & 1 == 1 {
            acc = mulmod64(acc, a, m);
        }
        a = mulmod64(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (witness set proven sufficient
/// for all n < 3.3 * 10^24).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64, cap: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    let mut c = 1u64;
    loop {
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut steps = 0u64;
        while d == 1 {
            x = mulmod64(x, x, n).wrapping_add(c) % n;
            y = mulmod64(y, y, n).wrapping_add(c) % n;
            y = mulmod64(y, y, n).wrapping_add(c) % n;
            d = gcd64(x.abs_diff(y), n);
            steps += 1;
            if steps > cap {
                return None;
            }
        }
        if d != n {
            return Some(d);
        }
        c += 1;
        if c > 20 {
            return None;
        }
    }
}

fn gcd64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Prime factorization, or None if the rho step cap is exceeded.
pub fn factor_u64(mut n: u64) -> Option<BTreeMap<u64, u32>> {
    let mut out = BTreeMap::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        while n.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        let d = pollard_rho(m, 50_000_000)?;
        stack.push(d);
        stack.push(m / d);
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// F_p

pub type FpElem = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpCtx {
    p: u64,
}

impl FpCtx {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::InvalidParam(format!("{p} is not prime")));
        }
        Ok(FpCtx { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: FpElem, b: FpElem) -> FpElem {
        let s = (a % self.p) as u128 + (b % self.p) as u128;
        (s % self.p as u128) as u64
    }

    pub fn sub(&self, a: FpElem, b: FpElem) -> FpElem {
        let (a, b) = (a % self.p, b % self.p);
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    pub fn neg(&self, a: FpElem) -> FpElem {
        self.sub(0, a)
    }

    pub fn mul(&self, a: FpElem, b: FpElem) -> FpElem {
        mulmod64(a % self.p, b % self.p, self.p)
    }

    pub fn pow(&self, a: FpElem, e: u64) -> FpElem {
        powmod64(a, e, self.p)
    }

    /// Fermat inverse; inv(0) is a DivisionByZero error.
    pub fn inv(&self, a: FpElem) -> Result<FpElem> {
        if a.is_multiple_of(self.p) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.p - 2))
    }

    pub fn div(&self, a: FpElem, b: FpElem) -> Result<FpElem> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

/// Smallest prime in the open interval (lo, hi), by incremental scan with
/// deterministic primality testing.
pub fn fp_find_prime(lo: u64, hi: u64) -> Result<u64> {
    if lo >= hi {
        return Err(Error::InvalidParam(format!("empty range ({lo}, {hi})")));
    }
    let mut n = lo + 1;
    while n < hi {
        if is_prime_u64(n) {
            return Ok(n);
        }
        n += 1;
    }
    Err(Error::NoPrimeInRange { lo, hi })
}
