//! Exact sums of many unit fractions.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// `sum c_i / d_i` kept over one growing common denominator.
///
/// Adding a term costs a few linear passes over the denominator instead of
/// the big gcd a normalized rational would run.
#[derive(Clone, Debug)]
pub struct FractionSum {
    num: BigInt,
    den: BigUint,
}

impl Default for FractionSum {
    fn default() -> Self {
        FractionSum {
            num: BigInt::zero(),
            den: BigUint::from(1u8),
        }
    }
}

impl FractionSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, c: i64, d: u128) {
        assert!(d > 0);
        if c == 0 {
            return;
        }
        let r = (&self.den % d).to_u128().expect("remainder below d");
        let g = r.gcd(&d);
        let f = d / g;
        let share = &self.den / g;
        if f != 1 {
            self.den *= f;
            self.num *= f;
        }
        self.num += BigInt::from(c) * BigInt::from(share);
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::from(self.den.clone()))
    }
}

/// Sums of nonnegative fractions bracketed on the grid `2^-FRAC_BITS`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: u128,
    hi: u128,
}

pub const FRAC_BITS: u32 = 120;

impl DyadicInterval {
    /// Adds `c / d` with the lower end rounded down and the upper end up.
    pub fn add(&mut self, c: u64, d: u128) {
        assert!(d > 0);
        let one = 1u128 << FRAC_BITS;
        let q = one / d;
        let up = if q * d == one { q } else { q + 1 };
        self.lo += c as u128 * q;
        self.hi += c as u128 * up;
    }

    pub fn add_interval(&mut self, other: &DyadicInterval) {
        self.lo += other.lo;
        self.hi += other.hi;
    }

    pub fn lower(&self) -> BigRational {
        dyadic(self.lo)
    }

    pub fn upper(&self) -> BigRational {
        dyadic(self.hi)
    }
}

fn dyadic(v: u128) -> BigRational {
    BigRational::new(BigInt::from(v), BigInt::from(1u8) << FRAC_BITS)
}

/// `floor(r * 10^digits) / 10^digits`, or the ceiling when `up`.
pub fn round_decimal(r: &BigRational, digits: u32, up: bool) -> BigRational {
    let scale = BigInt::from(10u8).pow(digits);
    let scaled = r * BigRational::from_integer(scale.clone());
    let v = if up { scaled.ceil() } else { scaled.floor() };
    BigRational::new(v.to_integer(), scale)
}

/// Rounds a positive `r` to `sig` significant decimal figures, down or up.
pub fn round_significant(r: &BigRational, sig: u32, up: bool) -> BigRational {
    assert!(r > &BigRational::zero() && sig > 0);
    // exponent e with 10^e <= r < 10^(e+1)
    let ten = BigRational::from_integer(BigInt::from(10u8));
    let mut e: i32 = r.to_f64().map(|f| f.log10().floor() as i32).unwrap_or(0);
    let pow = |e: i32| {
        if e >= 0 {
            ten.pow(e)
        } else {
            BigRational::from_integer(BigInt::from(1u8)) / ten.pow(-e)
        }
    };
    while &pow(e) > r {
        e -= 1;
    }
    while &pow(e + 1) <= r {
        e += 1;
    }
    let unit = pow(e + 1 - sig as i32);
    let q = r / &unit;
    let v = if up { q.ceil() } else { q.floor() };
    v * unit
}

/// Decimal rendering with `digits` places after the point, truncated toward zero.
pub fn to_decimal_string(r: &BigRational, digits: u32) -> String {
    let neg = r < &BigRational::zero();
    let a = if neg { -r.clone() } else { r.clone() };
    let scaled = round_decimal(&a, digits, false) * BigRational::from_integer(BigInt::from(10u8).pow(digits));
    let s = scaled.to_integer().to_string();
    let s = format!("{s:0>width$}", width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// `r` to `sig` significant figures, rounded down or up, as a decimal string.
pub fn render_significant(r: &BigRational, sig: u32, up: bool) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r < &BigRational::zero();
    let a = if neg { -r.clone() } else { r.clone() };
    // a negative value rounds the other way in magnitude
    let v = round_significant(&a, sig, up != neg);
    let mag = v.to_f64().map(|f| f.log10().floor() as i32).unwrap_or(0);
    let digits = (sig as i32 - 1 - mag).max(0) as u32;
    let s = to_decimal_string(&v, digits);
    if neg {
        format!("-{s}")
    } else {
        s
    }
}
