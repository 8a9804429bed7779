//! `sum 1/(p(p-1))` over primes in a range.

use std::ops::Add;

use num_rational::BigRational;

use super::exact::FractionSum;
use crate::error::{Error, Result};
use crate::modarith::primes::for_each_prime_in_range;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, about 106 bits of precision.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl DoubleDouble {
    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }

    /// `1/n`, accurate to a few units in 2^-104 relative.
    pub fn recip(n: u64) -> Self {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        let q1 = 1.0 / hi;
        let r = (-q1).mul_add(hi, 1.0) - q1 * lo;
        let (h, l) = quick_two_sum(q1, r * q1);
        DoubleDouble { hi: h, lo: l }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::from_float(self.hi).expect("finite")
            + BigRational::from_float(self.lo).expect("finite")
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;

    fn add(self, o: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, o.hi);
        let (h, l) = quick_two_sum(s, e + self.lo + o.lo);
        DoubleDouble { hi: h, lo: l }
    }
}

fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo < 2 || hi < lo || hi > 1 << 40 {
        return Err(Error::InvalidArgument(format!(
            "tail range [{lo}, {hi}) needs 2 <= lo <= hi <= 2^40"
        )));
    }
    Ok(())
}

/// `sum 1/(p(p-1))` over primes `lo <= p < hi`, by segmented sieve.
pub fn tail_sum(lo: u64, hi: u64) -> Result<DoubleDouble> {
    check_range(lo, hi)?;
    let mut acc = DoubleDouble::default();
    // block partial sums keep the double-double adds off the hot path
    let mut block = DoubleDouble::default();
    let mut count = 0u32;
    for_each_prime_in_range(lo, hi, |p| {
        block = block + DoubleDouble::recip(p * (p - 1));
        count += 1;
        if count == 4096 {
            acc = acc + block;
            block = DoubleDouble::default();
            count = 0;
        }
    });
    Ok(acc + block)
}

/// The same sum as an exact rational; only sensible for short ranges.
pub fn tail_sum_exact(lo: u64, hi: u64) -> Result<BigRational> {
    check_range(lo, hi)?;
    let mut acc = FractionSum::new();
    for_each_prime_in_range(lo, hi, |p| acc.add(1, p as u128 * (p as u128 - 1)));
    Ok(acc.to_rational())
}
