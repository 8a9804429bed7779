//! Exact values of `D_eps(n, m)`, trinomial discriminants, cyclotomic factors
//! of `x^n + a x^m + b`, and the family `(n^2-n+1)/3` squared dividing
//! `n^n - (n-1)^(n-1)` for `n = 2 mod 6`.

mod poly;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

pub use poly::{discriminant, resultant, unsigned_discriminant, IntPoly};

use crate::correspondence::Sign;
use crate::error::{Error, Result};
use crate::modarith::{gcd, powmod};

/// Largest `n` accepted by [`d_value`].
pub const D_VALUE_MAX_N: u64 = 10_000;

/// `n^n + eps (n-m)^(n-m) m^m`, exactly.
pub fn d_value(n: u64, m: u64, eps: Sign) -> Result<BigInt> {
    if m == 0 || n <= m {
        return Err(Error::InvalidArgument(format!("need n > m >= 1, got n = {n}, m = {m}")));
    }
    if n > D_VALUE_MAX_N {
        return Err(Error::SizeGuard(format!("n = {n} exceeds {D_VALUE_MAX_N}")));
    }
    let big = |v: u64| BigInt::from(v);
    let first = big(n).pow(n as u32);
    let second = big(n - m).pow((n - m) as u32) * big(m).pow(m as u32);
    Ok(match eps {
        Sign::Plus => first + second,
        Sign::Minus => first - second,
    })
}

/// `(|Disc(x^n + a x^m + b)|, eps)` with `|Disc| = D_eps(n, m)` and
/// `eps = (-1)^(n-1) a^n b^(n-m)`.
pub fn trinomial_discriminant(n: u64, m: u64, a: Sign, b: Sign) -> Result<(BigInt, Sign)> {
    if m == 0 || n <= m {
        return Err(Error::InvalidArgument(format!("need n > m >= 1, got n = {n}, m = {m}")));
    }
    if gcd(n, m) != 1 {
        return Err(Error::NotCoprime { n, m });
    }
    let mut e = Sign::parity(n - 1).value();
    if n % 2 == 1 {
        e *= a.value();
    }
    if (n - m) % 2 == 1 {
        e *= b.value();
    }
    let eps = Sign::from_i64(e)?;
    Ok((d_value(n, m, eps)?, eps))
}

/// Factorization type of `x^n + a x^m + b` with `a, b` in `{1, -1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Irreducible,
    /// `x^n + a x^m + b = g(x^d) h(x^d)` with `g` quadratic cyclotomic and `d = gcd(n, m)`.
    CyclotomicFactor { g: IntPoly, d: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrinomialClass {
    pub n: u64,
    pub m: u64,
    pub a: Sign,
    pub b: Sign,
    pub verdict: Verdict,
}

impl TrinomialClass {
    pub fn trinomial(&self) -> IntPoly {
        IntPoly::trinomial(self.n as usize, self.m as usize, self.a.value(), self.b.value())
    }

    /// `g(x^d)`, if reducible.
    pub fn factor(&self) -> Option<IntPoly> {
        match &self.verdict {
            Verdict::Irreducible => None,
            Verdict::CyclotomicFactor { g, d } => Some(g.compose_power(*d as usize)),
        }
    }

    /// `h(x^d)`, if reducible.
    pub fn cofactor(&self) -> Option<IntPoly> {
        let f = self.factor()?;
        Some(self.trinomial().div_exact(&f).expect("cyclotomic factor divides exactly"))
    }

    pub fn is_reducible(&self) -> bool {
        self.verdict != Verdict::Irreducible
    }
}

/// Ljunggren's classification of `x^n + a x^m + b`.
pub fn ljunggren_classify(n: u64, m: u64, a: Sign, b: Sign) -> Result<TrinomialClass> {
    if m == 0 || n <= m {
        return Err(Error::InvalidArgument(format!("need n > m >= 1, got n = {n}, m = {m}")));
    }
    let d = gcd(n, m);
    let residues = ((n / d) % 6, (m / d) % 6);
    let quad = |c: Sign| IntPoly::from_i64(&[1, c.value(), 1]);
    let g = match residues {
        (1, 5) | (5, 1) if a == Sign::Plus => Some(quad(b)),
        (2, 1) | (4, 5) if b == Sign::Plus => Some(quad(a)),
        (1, 2) | (5, 4) if a == b => Some(quad(a)),
        _ => None,
    };
    Ok(TrinomialClass {
        n,
        m,
        a,
        b,
        verdict: match g {
            Some(g) => Verdict::CyclotomicFactor { g, d },
            None => Verdict::Irreducible,
        },
    })
}

/// `((n^2 - nm + m^2) / (3 d^2))^d`, the resultant of the cyclotomic factor
/// `g(x^d)` and its cofactor up to sign.
pub fn cyclotomic_resultant(n: u64, m: u64, a: Sign, b: Sign) -> Result<BigInt> {
    let class = ljunggren_classify(n, m, a, b)?;
    let Verdict::CyclotomicFactor { d, .. } = class.verdict else {
        return Err(Error::PreconditionFailed(format!(
            "x^{n} {} x^{m} {} 1 has no cyclotomic factor",
            sign_char(a),
            sign_char(b)
        )));
    };
    let (n, m) = (BigInt::from(n), BigInt::from(m));
    let q = &n * &n - &n * &m + &m * &m;
    let den = BigInt::from(3 * d * d);
    let (base, r) = q.div_rem(&den);
    assert!(r.is_zero(), "(n^2 - nm + m^2) not divisible by 3d^2");
    Ok(base.pow(d as u32))
}

fn sign_char(s: Sign) -> char {
    match s {
        Sign::Plus => '+',
        Sign::Minus => '-',
    }
}

/// With `n = 6k + 2` and `M = 12k^2 + 6k + 1`, whether `M^2 | n^n - (n-1)^(n-1)`.
pub fn strange_divisibility_check(k: u64) -> bool {
    let n = 6 * k as u128 + 2;
    let big_m = 12 * (k as u128) * (k as u128) + 6 * k as u128 + 1;
    let m2 = big_m * big_m;
    if m2 < 1 << 63 {
        let m2 = m2 as u64;
        let n = n as u64;
        powmod(n % m2, n, m2) == powmod((n - 1) % m2, n - 1, m2)
    } else {
        let m2 = BigUint::from(m2);
        let n = BigUint::from(n);
        let n1 = &n - 1u32;
        n.modpow(&n, &m2) == n1.modpow(&n1, &m2)
    }
}

/// Largest `k` for which [`abc_report`] materializes `n = 8^(7^k)` and checks
/// `M^2 | b` by modular exponentiation (`n` has `3 * 7^k` bits).
pub const ABC_SQUARE_CHECK_MAX_K: u32 = 4;
/// Largest `k` accepted by [`abc_report`].
pub const ABC_MAX_K: u32 = 12;

/// Checks behind the triple `a = (n-1)^(n-1)`, `b = n^n - (n-1)^(n-1)`,
/// `c = n^n` with `n = 8^(7^k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbcReport {
    pub k: u32,
    /// `n`, when small enough to write down.
    pub n: Option<BigUint>,
    /// `log2 n = 3 * 7^k`.
    pub n_log2: u64,
    /// `7^(k+1) | n - 1`.
    pub seven_power: bool,
    /// `((n^2-n+1)/3)^2 | b`; `None` above [`ABC_SQUARE_CHECK_MAX_K`].
    pub square_divides_b: Option<bool>,
    /// `ln ln c`, where `ln c = n ln n`.
    pub ln_ln_c: f64,
    /// `ln(6 ln 8 / ln c)`: the radical bound `6 ln 8 c / ln c`, relative to `c`, in natural log.
    pub bound_log_ratio: f64,
    pub note: String,
}

impl AbcReport {
    /// `ln(6 ln 8 c / ln c)`; infinite once `ln c` overflows a double.
    pub fn bound_log(&self) -> f64 {
        self.ln_ln_c.exp() + self.bound_log_ratio
    }
}

pub fn abc_report(k: u32) -> Result<AbcReport> {
    if k > ABC_MAX_K {
        return Err(Error::SizeGuard(format!("k = {k} exceeds {ABC_MAX_K}")));
    }
    let seven_k = 7u64.pow(k);
    let seven_power = powmod(8, seven_k, seven_k * 7) == 1;
    let n_log2 = 3 * seven_k;
    let ln8 = 8f64.ln();
    // ln c = n ln n = 8^(7^k) * 7^k * ln 8
    let ln_ln_c = n_log2 as f64 * 2f64.ln() + (seven_k as f64).ln() + ln8.ln();
    let bound_log_ratio = (6.0 * ln8).ln() - ln_ln_c;

    let (n, square_divides_b, note) = if k <= ABC_SQUARE_CHECK_MAX_K {
        let n = BigUint::one() << n_log2;
        let n1 = &n - 1u32;
        let big_m = (&n * &n - &n + 1u32) / 3u32;
        let m2 = &big_m * &big_m;
        let holds = n.modpow(&n, &m2) == n1.modpow(&n1, &m2);
        (Some(n), Some(holds), "a, b, c are not materialized; radicals are not computed".to_string())
    } else {
        (
            None,
            None,
            format!(
                "n has {n_log2} bits; the square check is skipped above k = {ABC_SQUARE_CHECK_MAX_K} and radicals are not computed"
            ),
        )
    };
    Ok(AbcReport {
        k,
        n,
        n_log2,
        seven_power,
        square_divides_b,
        ln_ln_c,
        bound_log_ratio,
        note,
    })
}
