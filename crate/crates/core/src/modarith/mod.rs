//! Modular arithmetic modulo `p` and `p^2` for odd primes `p < 2^31`.
//!
//! All moduli used here stay below 2^62, so every product fits a `u128`
//! intermediate.

mod dlog;
mod montgomery;
pub mod primes;

pub use dlog::{discrete_log, BsgsTable};
pub use montgomery::Montgomery;
pub use primes::{factorize, is_prime, SpfSieve};

use crate::error::{Error, Result};

/// Largest prime (exclusive) accepted by [`PrimeContext`].
pub const MAX_PRIME: u64 = 1 << 31;

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b)) as u128 * b as u128
}

/// `base^exp mod modulus`; `exp = 0` gives `1 mod modulus`.
pub fn powmod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    assert!(modulus >= 1, "modulus must be positive");
    if modulus == 1 {
        return 0;
    }
    if modulus < 1 << 32 {
        let mut result = 1u64;
        let mut b = base % modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                result = result * b % modulus;
            }
            b = b * b % modulus;
            exp >>= 1;
        }
        return result;
    }
    if modulus % 2 == 1 && modulus < 1 << 63 {
        let mont = Montgomery::new(modulus);
        return mont.from_mont(mont.pow(mont.to_mont(base), exp));
    }
    let mut result = 1u64;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mulmod(result, b, modulus);
        }
        b = mulmod(b, b, modulus);
        exp >>= 1;
    }
    result
}

/// Inverse of `a` modulo `modulus` by the extended Euclidean algorithm.
pub fn invmod(a: u64, modulus: u64) -> Result<u64> {
    if modulus == 1 {
        return Ok(0);
    }
    let (mut old_r, mut r) = ((a % modulus) as i128, modulus as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible {
            value: a,
            modulus,
        });
    }
    Ok(old_s.rem_euclid(modulus as i128) as u64)
}

/// Least `t >= 1` with `a^t = 1 (mod modulus)`, given a multiple of that order.
pub fn mult_order(a: u64, modulus: u64, group_order: u64) -> Result<u64> {
    mult_order_with(a, modulus, group_order, &primes::prime_divisors(group_order))
}

pub(crate) fn mult_order_with(
    a: u64,
    modulus: u64,
    group_order: u64,
    order_primes: &[u64],
) -> Result<u64> {
    if gcd(a % modulus, modulus) != 1 {
        return Err(Error::NotInvertible { value: a, modulus });
    }
    if powmod(a, group_order, modulus) != 1 % modulus {
        return Err(Error::InvalidArgument(format!(
            "{group_order} is not a multiple of the order of {a} mod {modulus}"
        )));
    }
    let mut t = group_order;
    for &q in order_primes {
        while t.is_multiple_of(q) && powmod(a, t / q, modulus) == 1 % modulus {
            t /= q;
        }
    }
    Ok(t)
}

/// An odd prime `p` with the derived moduli `p^2` and `p(p-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: u64,
    p2: u64,
    mod_order: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Self::from_known_prime(p))
    }

    /// For primes that come out of a sieve; skips the primality check.
    pub(crate) fn from_known_prime(p: u64) -> Self {
        debug_assert!((3..MAX_PRIME).contains(&p) && is_prime(p));
        PrimeContext {
            p,
            p2: p * p,
            mod_order: p * (p - 1),
        }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn p2(&self) -> u64 {
        self.p2
    }

    /// `p(p-1)`, the order of the unit group mod `p^2`.
    #[inline]
    pub fn mod_order(&self) -> u64 {
        self.mod_order
    }

    /// Smallest primitive root modulo `p^2`. Recomputed on each call.
    pub fn primitive_root(&self) -> u64 {
        let mut qs = primes::prime_divisors(self.p - 1);
        qs.push(self.p);
        let mont = Montgomery::new(self.p2);
        let one = mont.one();
        (2..self.p2)
            .find(|&g| {
                if g % self.p == 0 {
                    return false;
                }
                let gm = mont.to_mont(g);
                qs.iter().all(|&q| mont.pow(gm, self.mod_order / q) != one)
            })
            .expect("(Z/p^2Z)^* is cyclic")
    }

    /// `x^(p-1) = 1 (mod p^2)`; false whenever `p | x`.
    pub fn is_pth_power(&self, x: u64) -> bool {
        !x.is_multiple_of(self.p) && powmod(x, self.p - 1, self.p2) == 1
    }

    /// The unique `p`-th power mod `p^2` congruent to `x` mod `p`, i.e. `x^p mod p^2`.
    pub fn pth_power_lift(&self, x: u64) -> u64 {
        powmod(x % self.p, self.p, self.p2)
    }

    pub(crate) fn montgomery(&self) -> Montgomery {
        Montgomery::new(self.p2)
    }
}

/// `s[x] = x^p mod p^2` for `0 <= x <= p`, with `s[0] = s[p] = 0`.
#[derive(Clone, Debug)]
pub struct PthPowerTable {
    ctx: PrimeContext,
    s: Vec<u64>,
}

impl PthPowerTable {
    pub fn new(ctx: PrimeContext) -> Self {
        let spf = SpfSieve::new(ctx.p() as u32);
        Self::with_sieve(ctx, &spf)
    }

    /// Reuses a smallest-prime-factor table covering `1..p`.
    pub fn with_sieve(ctx: PrimeContext, spf: &SpfSieve) -> Self {
        let mont = ctx.montgomery();
        let mut s = pth_powers_mont(ctx, &mont, spf);
        for v in s.iter_mut() {
            *v = mont.from_mont(*v);
        }
        PthPowerTable { ctx, s }
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    /// `x^p mod p^2` for `0 <= x <= p`.
    #[inline]
    pub fn at(&self, x: u64) -> u64 {
        self.s[x as usize]
    }

    /// Entries for `x = 1..=p-1`.
    pub fn values(&self) -> &[u64] {
        &self.s[1..self.s.len() - 1]
    }
}

/// Montgomery-form `x^p mod p^2` for `x = 0..=p`.
///
/// Primes get one exponentiation each; every composite `x = q * (x/q)` with
/// `q` its smallest prime factor reuses earlier entries, since `x -> x^p` is
/// multiplicative on the integers.
pub(crate) fn pth_powers_mont(ctx: PrimeContext, mont: &Montgomery, spf: &SpfSieve) -> Vec<u64> {
    let p = ctx.p();
    assert!(
        spf.limit() as u64 >= p - 1,
        "sieve limit {} does not cover p - 1 = {}",
        spf.limit(),
        p - 1
    );
    let mut s = vec![0u64; p as usize + 1];
    s[1] = mont.one();
    for x in 2..p as usize {
        let q = spf.spf(x as u32) as usize;
        s[x] = if q == x {
            mont.pow(mont.to_mont(x as u64), p)
        } else {
            mont.mul(s[q], s[x / q])
        };
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn powmod_examples() {
        assert_eq!(powmod(3, 59, 3481), 298);
        assert_eq!(powmod(2, 7, 49), 30);
        assert_eq!(powmod(12345, 0, 97), 1);
        assert_eq!(powmod(5, 0, 1), 0);
        // large odd and even moduli below 2^62
        let m = (1u64 << 61) - 1;
        assert_eq!(powmod(3, m - 1, m), 1);
        let even = 1u64 << 62;
        assert_eq!(powmod(3, 2, even), 9);
    }

    #[test]
    fn invmod_examples() {
        assert_eq!(invmod(1, 97).unwrap(), 1);
        assert_eq!(invmod(47, 83).unwrap(), 53);
        assert_eq!(invmod(19, 49).unwrap(), 31);
        assert!(matches!(invmod(14, 49), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn pth_power_examples() {
        let c7 = PrimeContext::new(7).unwrap();
        assert!(c7.is_pth_power(1));
        assert!(c7.is_pth_power(30));
        assert!(!c7.is_pth_power(7));
        assert_eq!(c7.pth_power_lift(2), 30);
        assert_eq!(c7.pth_power_lift(1), 1);
        let c59 = PrimeContext::new(59).unwrap();
        assert_eq!(c59.pth_power_lift(3), 298);
    }

    #[test]
    fn mult_order_examples() {
        assert_eq!(mult_order(2, 7, 6).unwrap(), 3);
        assert_eq!(mult_order(30, 49, 42).unwrap(), 3);
        for p in [3u64, 5, 7, 101, 7919] {
            assert_eq!(mult_order(p * p - 1, p * p, p * (p - 1)).unwrap(), 2);
        }
        assert!(mult_order(7, 49, 42).is_err());
    }

    #[test]
    fn context_rejects_non_primes() {
        for bad in [0u64, 1, 2, 9, 91, MAX_PRIME + 11] {
            assert!(PrimeContext::new(bad).is_err(), "{bad}");
        }
        let c = PrimeContext::new(2_147_483_647).unwrap();
        assert_eq!(c.p2(), 2_147_483_647u64 * 2_147_483_647);
    }

    #[test]
    fn primitive_roots_have_full_order() {
        for p in [3u64, 5, 7, 29, 59, 83, 1093, 3511, 40_487] {
            let ctx = PrimeContext::new(p).unwrap();
            let g = ctx.primitive_root();
            assert_eq!(mult_order(g, ctx.p2(), ctx.mod_order()).unwrap(), ctx.mod_order());
        }
        // 5 is the least primitive root mod 40487 but 5^40486 = 1 mod 40487^2
        assert_eq!(mult_order(5, 40_487, 40_486).unwrap(), 40_486);
        assert_eq!(powmod(5, 40_486, 40_487 * 40_487), 1);
        assert_ne!(PrimeContext::new(40_487).unwrap().primitive_root(), 5);
    }

    #[test]
    fn table_examples() {
        let t7 = PthPowerTable::new(PrimeContext::new(7).unwrap());
        assert_eq!(t7.values(), &[1, 30, 31, 18, 19, 48]);
        let t3 = PthPowerTable::new(PrimeContext::new(3).unwrap());
        assert_eq!(t3.values(), &[1, 8]);
        assert_eq!(t3.at(3), 0);
    }

    #[test]
    fn table_matches_per_entry_powmod() {
        let primes = primes::primes_up_to(10_000);
        let spf = SpfSieve::new(10_000);
        for &p in &primes[1..] {
            let ctx = PrimeContext::new(p).unwrap();
            let t = PthPowerTable::with_sieve(ctx, &spf);
            for x in 1..p {
                assert_eq!(t.at(x), powmod(x, p, p * p), "p={p} x={x}");
            }
        }
    }

    #[test]
    fn lift_order_matches_order_mod_p() {
        for &p in primes::primes_up_to(500).iter().skip(1) {
            let ctx = PrimeContext::new(p).unwrap();
            for x in 1..p {
                let lifted = ctx.pth_power_lift(x);
                assert!(ctx.is_pth_power(lifted));
                assert_eq!(
                    mult_order(lifted, ctx.p2(), ctx.mod_order()).unwrap(),
                    mult_order(x, p, p - 1).unwrap()
                );
            }
        }
    }

    fn odd_prime() -> impl Strategy<Value = u64> {
        (3u64..5000).prop_filter("prime", |&n| is_prime(n))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        // (x + p y)^(x + p z) = x^(x + p z) (1 + p y) mod p^2
        #[test]
        fn binomial_congruence(p in odd_prime(), x in 1u64..10_000, y in 0u64..10_000, z in 0u64..10_000) {
            prop_assume!(x % p != 0);
            let p2 = p * p;
            let exp = x + p * z;
            let lhs = powmod(x + p * y, exp, p2);
            let rhs = mulmod(powmod(x, exp, p2), (1 + p * y) % p2, p2);
            prop_assert_eq!(lhs, rhs);
            // exponent reduction mod p(p-1) agrees with the unreduced power
            let reduced = powmod(x + p * y, exp % (p * (p - 1)), p2);
            prop_assert_eq!(reduced, lhs);
        }

        #[test]
        fn invmod_is_inverse(m in 2u64..(1 << 40), a in 1u64..(1 << 40)) {
            match invmod(a, m) {
                Ok(b) => prop_assert_eq!(mulmod(a % m, b, m), 1),
                Err(_) => prop_assert!(gcd(a, m) > 1),
            }
        }
    }
}
