//! Inclusion-exclusion bounds for the density of `S(x)`, the `n` whose value
//! `n^n + (-1)^n (n-1)^(n-1)` has no square factor `p^2` with `p < x`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::exact::{render_significant, round_decimal, round_significant, DyadicInterval, FractionSum};
use super::{count_dpq, covered_cps, tail_sum, CpSet};
use crate::error::Result;
use crate::modarith::{factorize, gcd};

/// Above this many nonempty `C_p`, the pair and triple sums switch from exact
/// rationals to rigorous brackets.
pub const EXACT_SET_LIMIT: usize = 120;

/// Significant digits used when rendering bounds.
pub const RENDER_DIGITS: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumMode {
    Auto,
    /// Exact rationals throughout; cubic in the number of nonempty sets.
    Exact,
    /// Pair sum bracketed on a `2^-120` grid, triple sum bounded above by
    /// a divisor-sum regrouping in floating point with a proven error margin.
    Bracketed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityBounds {
    pub prime_bound: u64,
    pub lower: BigRational,
    pub upper: BigRational,
    /// `upper - lower`: the triple sum, plus the pair-sum bracket width when
    /// the pair sum was not computed exactly.
    pub triple_correction: BigRational,
    pub single_sum: BigRational,
    pub pair_sum: (BigRational, BigRational),
    pub triple_sum_upper: BigRational,
    pub exact: bool,
    pub nonempty_sets: usize,
    pub intersecting_pairs: u64,
}

impl DensityBounds {
    pub fn lower_decimal(&self) -> String {
        render_significant(&self.lower, RENDER_DIGITS, false)
    }

    pub fn upper_decimal(&self) -> String {
        render_significant(&self.upper, RENDER_DIGITS, true)
    }

    pub fn triple_decimal(&self) -> String {
        render_significant(&self.triple_correction, 4, true)
    }
}

pub fn ie_bounds(x: u64, cps: &[CpSet]) -> Result<DensityBounds> {
    ie_bounds_with(x, cps, SumMode::Auto)
}

struct Entry<'a> {
    p: u64,
    modulus: u64,
    residues: &'a [u64],
}

pub fn ie_bounds_with(x: u64, cps: &[CpSet], mode: SumMode) -> Result<DensityBounds> {
    let sets: Vec<Entry> = covered_cps(x, cps)?
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| Entry { p: c.p, modulus: c.modulus(), residues: &c.residues })
        .collect();
    let mut s1 = FractionSum::new();
    for e in &sets {
        s1.add(e.residues.len() as i64, e.modulus as u128);
    }
    let s1 = s1.to_rational();
    let exact = match mode {
        SumMode::Auto => sets.len() <= EXACT_SET_LIMIT,
        SumMode::Exact => true,
        SumMode::Bracketed => false,
    };
    let (s2, s3, pairs) = if exact { exact_sums(&sets) } else { bracketed_sums(&sets) };
    let one = BigRational::one();
    let upper = &one - &s1 + &s2.1;
    let lower = &one - &s1 + &s2.0 - &s3;
    Ok(DensityBounds {
        prime_bound: x,
        triple_correction: &upper - &lower,
        lower,
        upper,
        single_sum: s1,
        pair_sum: s2,
        triple_sum_upper: s3,
        exact,
        nonempty_sets: sets.len(),
        intersecting_pairs: pairs,
    })
}

type Sums = ((BigRational, BigRational), BigRational, u64);

fn exact_sums(sets: &[Entry]) -> Sums {
    let mut s2 = FractionSum::new();
    let mut s3 = FractionSum::new();
    let mut pairs = 0;
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate().skip(i + 1) {
            let g = gcd(a.modulus, b.modulus);
            let d = count_dpq(a.residues, b.residues, g);
            if d == 0 {
                continue;
            }
            pairs += 1;
            let l = (a.modulus / g) as u128 * b.modulus as u128;
            s2.add(d as i64, l);
            for c in &sets[j + 1..] {
                let h = gcd_u128(l, c.modulus as u128);
                let lll = (l / h).checked_mul(c.modulus as u128).expect("lcm fits in 128 bits");
                s3.add((d * c.residues.len() as u64) as i64, lll);
            }
        }
    }
    let s2 = s2.to_rational();
    ((s2.clone(), s2), s3.to_rational(), pairs)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `r` with `d | r - 1`, ascending, and suffix sums of `#C_r / (r(r-1))`.
#[derive(Default)]
struct DivisorList {
    rs: Vec<u64>,
    suffix: Vec<f64>,
}

impl DivisorList {
    /// Sum over the listed `r > q`.
    fn above(&self, q: u64) -> f64 {
        let i = self.rs.partition_point(|&r| r <= q);
        self.suffix.get(i).copied().unwrap_or(0.0)
    }
}

fn divisors(fac: &[(u64, u32)]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(q, e) in fac {
        let len = out.len();
        let mut pw = 1;
        for _ in 0..e {
            pw *= q;
            for i in 0..len {
                out.push(out[i] * pw);
            }
        }
    }
    out
}

fn merge_max(a: &[(u64, u32)], b: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1.max(b[j].1)));
            i += 1;
            j += 1;
        }
    }
    out
}

struct TripleIndex {
    lists: HashMap<u64, DivisorList>,
    longest: usize,
}

impl TripleIndex {
    fn new(sets: &[Entry]) -> Self {
        let mut lists: HashMap<u64, DivisorList> = HashMap::new();
        for e in sets {
            let w = e.residues.len() as f64 / e.modulus as f64;
            for d in divisors(&factorize(e.p - 1)) {
                let l = lists.entry(d).or_default();
                l.rs.push(e.p);
                l.suffix.push(w);
            }
        }
        let mut longest = 0;
        for l in lists.values_mut() {
            longest = longest.max(l.rs.len());
            for i in (0..l.suffix.len().saturating_sub(1)).rev() {
                l.suffix[i] += l.suffix[i + 1];
            }
        }
        TripleIndex { lists, longest }
    }

    /// `sum_{r > q} #C_r gcd(L, r-1) / (r(r-1))`, using
    /// `gcd(L, r-1) = sum_{d | gcd} phi(d)`. Returns the sum and the number of
    /// divisors visited.
    fn weight(&self, fac: &[(u64, u32)], q: u64) -> (f64, usize) {
        let mut acc = 0.0;
        let mut visited = 0;
        self.walk(fac, 0, 1, 1, q, &mut acc, &mut visited);
        (acc, visited)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(&self, fac: &[(u64, u32)], from: usize, d: u64, phi: u64, q: u64, acc: &mut f64, visited: &mut usize) {
        *visited += 1;
        *acc += phi as f64 * self.lists[&d].above(q);
        for (i, &(pr, e)) in fac.iter().enumerate().skip(from) {
            let (mut dd, mut ph) = (d, phi);
            for k in 0..e {
                dd *= pr;
                ph *= if k == 0 { pr - 1 } else { pr };
                // lists are closed under divisors, so a missing or exhausted
                // list rules out every multiple as well
                match self.lists.get(&dd) {
                    Some(l) if l.rs.last().is_some_and(|&r| r > q) => {}
                    _ => break,
                }
                self.walk(fac, i + 1, dd, ph, q, acc, visited);
            }
        }
    }
}

#[derive(Default)]
struct Partial {
    s2: DyadicInterval,
    s3: f64,
    pairs: u64,
    max_visited: usize,
}

fn bracketed_sums(sets: &[Entry]) -> Sums {
    let index = TripleIndex::new(sets);
    let facs: Vec<Vec<(u64, u32)>> = sets
        .iter()
        .map(|e| {
            let mut f = factorize(e.p - 1);
            f.push((e.p, 1));
            f
        })
        .collect();
    let partials: Vec<Partial> = (0..sets.len())
        .into_par_iter()
        .map(|i| {
            let a = &sets[i];
            let mut part = Partial::default();
            for (j, b) in sets.iter().enumerate().skip(i + 1) {
                let g = gcd(a.modulus, b.modulus);
                let d = count_dpq(a.residues, b.residues, g);
                if d == 0 {
                    continue;
                }
                part.pairs += 1;
                let l = (a.modulus / g) as u128 * b.modulus as u128;
                part.s2.add(d, l);
                let (w, visited) = index.weight(&merge_max(&facs[i], &facs[j]), b.p);
                part.max_visited = part.max_visited.max(visited);
                part.s3 += d as f64 / l as f64 * w;
            }
            part
        })
        .collect();
    let mut s2 = DyadicInterval::default();
    let (mut s3, mut pairs, mut visited) = (0.0f64, 0u64, 0usize);
    for part in &partials {
        s2.add_interval(&part.s2);
        s3 += part.s3;
        pairs += part.pairs;
        visited = visited.max(part.max_visited);
    }
    // Every term is a positive product or quotient of a few correctly rounded
    // operations and sums of at most `longest`, `visited` and `pairs` positive
    // terms, so the relative error stays below this many half-ulps.
    let ops = index.longest as u64 + visited as u64 + pairs + 16;
    let margin = BigRational::one() + BigRational::new(BigInt::from(ops), BigInt::one() << 52);
    let s3 = BigRational::from_float(s3).expect("finite") * margin;
    ((s2.lower(), s2.upper()), s3, pairs)
}

/// Primes at and beyond this bound enter the heuristic only through `1/X`.
pub const TAIL_CUTOFF: u64 = 1_000_000_000;

/// Decimal places used when bounds and the final interval are reported.
pub const ESTIMATE_DECIMALS: u32 = 8;

/// Heuristic interval for the density of squarefree values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub prime_bound: u64,
    /// `sum 1/(p(p-1))` over primes in `[x, TAIL_CUTOFF)`.
    pub tail: f64,
    /// `tail + 1/TAIL_CUTOFF`, an upper bound for the whole tail.
    pub tail_upper: f64,
    /// The bracket multiplied through at full precision.
    pub unrounded: (f64, f64),
    /// The same computation carried out on reported figures: bounds at 8
    /// decimals and tail terms at one significant figure, each rounded
    /// outward, and the result rounded outward to 8 decimals.
    pub reported: (f64, f64),
    pub reported_text: (String, String),
}

fn f(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).expect("finite")
}

fn bracket(lo: &BigRational, hi: &BigRational, t_lo: &BigRational, t_hi: &BigRational) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    (lo * (&one - t_hi), hi * (&one - t_lo + half * t_hi * t_hi))
}

pub fn density_estimate(x: u64, cps: &[CpSet]) -> Result<DensityEstimate> {
    let b = ie_bounds(x, cps)?;
    let lo_x = x.max(2);
    let t = if lo_x < TAIL_CUTOFF { tail_sum(lo_x, TAIL_CUTOFF)?.to_rational() } else { BigRational::zero() };
    let t_hi = &t + BigRational::new(1.into(), BigInt::from(TAIL_CUTOFF));
    let (ul, uu) = bracket(&b.lower, &b.upper, &t, &t_hi);
    let d = ESTIMATE_DECIMALS;
    let (rl, ru) = bracket(
        &round_decimal(&b.lower, d, false),
        &round_decimal(&b.upper, d, true),
        &if t.is_zero() { t.clone() } else { round_significant(&t, 1, false) },
        &round_significant(&t_hi, 1, true),
    );
    let (rl, ru) = (round_decimal(&rl, d, false), round_decimal(&ru, d, true));
    Ok(DensityEstimate {
        prime_bound: x,
        tail: f(&t),
        tail_upper: f(&t_hi),
        unrounded: (f(&ul), f(&uu)),
        reported: (f(&rl), f(&ru)),
        reported_text: (
            super::exact::to_decimal_string(&rl, d),
            super::exact::to_decimal_string(&ru, d),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::build_cp;
    use crate::modarith::primes::primes_up_to;

    fn cps(x: u64) -> Vec<CpSet> {
        primes_up_to(x - 1)
            .into_iter()
            .skip(1)
            .map(|p| build_cp(p).unwrap())
            .collect()
    }

    #[test]
    fn trivial_bound() {
        let c = cps(10);
        let b = ie_bounds(10, &c).unwrap();
        assert!(b.lower.is_one() && b.upper.is_one() && b.triple_correction.is_zero());
        assert_eq!(b.upper_decimal(), "1.000000000");
        assert!(ie_bounds(3, &[]).unwrap().upper.is_one());
        assert!(ie_bounds(12, &c).is_err());
    }

    /// Direct oracle: the three sums straight from the definitions with
    /// materialized pair sets and normalized rationals.
    fn oracle(c: &[CpSet]) -> (BigRational, BigRational) {
        use crate::density::build_dpq;
        let ne: Vec<&CpSet> = c.iter().filter(|s| !s.is_empty()).collect();
        let q = |n: u64, d: u128| BigRational::new(n.into(), BigInt::from(d));
        let lcm = |a: u128, b: u128| a / gcd_u128(a, b) * b;
        let (mut s1, mut s2, mut s3) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
        for (i, a) in ne.iter().enumerate() {
            s1 += q(a.len() as u64, a.modulus() as u128);
            for (j, b) in ne.iter().enumerate().skip(i + 1) {
                let d = build_dpq(a, b).pairs.len() as u64;
                let l = lcm(a.modulus() as u128, b.modulus() as u128);
                s2 += q(d, l);
                for r in &ne[j + 1..] {
                    s3 += q(d * r.len() as u64, lcm(l, r.modulus() as u128));
                }
            }
        }
        let up = BigRational::one() - s1 + s2;
        (&up - s3, up)
    }

    #[test]
    fn exact_mode_matches_oracle() {
        let c = cps(2000);
        let b = ie_bounds_with(2000, &c, SumMode::Exact).unwrap();
        let (lo, up) = oracle(&c);
        assert_eq!((b.lower.clone(), b.upper.clone()), (lo, up));
        assert_eq!(&b.upper - &b.lower, b.triple_correction);
        // float recomputation guards the rendering
        let fl: f64 = 1.0
            - c.iter().map(|s| s.len() as f64 / s.modulus() as f64).sum::<f64>()
            + f(&b.pair_sum.0);
        assert!(((f(&b.upper) - fl) / fl).abs() < 1e-12);
    }

    #[test]
    fn bracketed_mode_encloses_exact() {
        let c = cps(6000);
        let ex = ie_bounds_with(6000, &c, SumMode::Exact).unwrap();
        let br = ie_bounds_with(6000, &c, SumMode::Bracketed).unwrap();
        assert_eq!(ex.single_sum, br.single_sum);
        assert!(br.pair_sum.0 <= ex.pair_sum.0 && ex.pair_sum.0 <= br.pair_sum.1);
        assert!(br.triple_sum_upper >= ex.triple_sum_upper);
        let rel = f(&((&br.triple_sum_upper - &ex.triple_sum_upper) / &ex.triple_sum_upper));
        assert!(rel < 1e-9, "relative slack {rel}");
        assert!(br.lower <= ex.lower && ex.upper <= br.upper);
        assert!(f(&(&br.upper - &ex.upper)) < 1e-25);
    }

    #[test]
    fn upper_bound_decreases() {
        let c = cps(20_000);
        let mut prev = BigRational::one();
        for x in [100, 1000, 5000, 20_000] {
            let b = ie_bounds(x, &c).unwrap();
            assert!(b.lower <= b.upper);
            assert!(b.upper <= prev, "x = {x}");
            prev = b.upper;
        }
    }

    #[test]
    fn estimate_without_sets_is_the_tail_bracket() {
        let e = density_estimate(3, &[]).unwrap();
        let t = tail_sum(3, TAIL_CUTOFF).unwrap().value();
        assert!((e.tail - t).abs() < 1e-15);
        assert!((e.unrounded.0 - (1.0 - t - 1e-9)).abs() < 1e-12);
        assert!(e.unrounded.0 <= e.unrounded.1 && e.unrounded.1 <= 1.0);
        assert!(e.reported.0 <= e.unrounded.0 && e.unrounded.1 <= e.reported.1);
    }
}
