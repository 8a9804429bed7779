//! Montgomery multiplication for odd 64-bit moduli below 2^63.
//!
//! Residues are kept in the form `a * 2^64 mod m`. The map is additive, so
//! differences of Montgomery forms can be compared against `one()` without
//! converting back.

#[derive(Clone, Copy, Debug)]
pub struct Montgomery {
    m: u64,
    /// -m^{-1} mod 2^64
    neg_inv: u64,
    /// 2^128 mod m
    r2: u64,
    /// 2^64 mod m
    r1: u64,
}

impl Montgomery {
    pub fn new(m: u64) -> Self {
        assert!(m % 2 == 1 && m < (1 << 63), "Montgomery modulus must be odd and < 2^63");
        // Newton iteration for m^{-1} mod 2^64; each step doubles the correct bits.
        let mut inv: u64 = m;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        debug_assert_eq!(m.wrapping_mul(inv), 1);
        let r1 = ((1u128 << 64) % m as u128) as u64;
        let r2 = ((r1 as u128 * r1 as u128) % m as u128) as u64;
        Montgomery {
            m,
            neg_inv: inv.wrapping_neg(),
            r2,
            r1,
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.m
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let q = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + q as u128 * self.m as u128) >> 64) as u64;
        if u >= self.m {
            u - self.m
        } else {
            u
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.m, self.r2)
    }

    #[inline]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    /// Montgomery form of 1.
    #[inline]
    pub fn one(&self) -> u64 {
        self.r1
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    /// `base` and the result are in Montgomery form.
    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut result = self.r1;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_multiply() {
        for &m in &[3u64, 49, 3481, 1_000_003 * 1_000_003, (1 << 61) - 1] {
            let mont = Montgomery::new(m);
            for a in [0u64, 1, 2, m / 3, m - 1] {
                assert_eq!(mont.from_mont(mont.to_mont(a)), a % m);
                for b in [1u64, 7, m - 2] {
                    let expect = (a as u128 * b as u128 % m as u128) as u64;
                    let got = mont.from_mont(mont.mul(mont.to_mont(a), mont.to_mont(b)));
                    assert_eq!(got, expect, "m={m} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn pow_matches_naive() {
        let mont = Montgomery::new(3481);
        let r = mont.from_mont(mont.pow(mont.to_mont(3), 59));
        assert_eq!(r, 298);
    }
}
