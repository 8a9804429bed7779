//! Exceptional residue sets for `n^n + (-1)^n (n-1)^(n-1)`, their pairwise
//! overlaps, inclusion-exclusion density bounds and root-count statistics.

mod bounds;
pub mod exact;
mod tail;

use serde::{Deserialize, Serialize};

pub use bounds::{
    density_estimate, ie_bounds, ie_bounds_with, DensityBounds, DensityEstimate, SumMode, EXACT_SET_LIMIT,
    TAIL_CUTOFF,
};
pub use tail::{tail_sum, tail_sum_exact, DoubleDouble};

use crate::correspondence::{a_sets_both_signs, d_eps_divisible_ctx, Sign};
use crate::error::{Error, Result};
use crate::modarith::primes::{first_primes, primes_up_to};
use crate::modarith::{gcd, is_prime, Montgomery, PrimeContext, MAX_PRIME};
use crate::roots::fp_roots_direct;

/// `C_p`: residues `a mod p(p-1)` with `p^2 | a^a + (-1)^a (a-1)^(a-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpSet {
    pub p: u64,
    /// Ascending, in `0..p(p-1)`.
    pub residues: Vec<u64>,
}

impl CpSet {
    pub fn modulus(&self) -> u64 {
        self.p * (self.p - 1)
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.residues.binary_search(&(n % self.modulus())).is_ok()
    }
}

pub fn build_cp(p: u64) -> Result<CpSet> {
    if p == 2 {
        // 4 never divides n^n + (-1)^n (n-1)^(n-1), which is odd
        return Ok(CpSet { p, residues: Vec::new() });
    }
    let ctx = PrimeContext::new(p)?;
    Ok(cp_from_roots(&ctx, &fp_roots_direct(ctx)))
}

/// `C_p` from the roots of `f_p`: the `m = 1` sets of both signs, each
/// filtered to the residues whose parity matches the sign.
pub(crate) fn cp_from_roots(ctx: &PrimeContext, roots: &[u64]) -> CpSet {
    let [plus, minus] = a_sets_both_signs(ctx, roots, 1);
    let mut residues: Vec<u64> = plus
        .into_iter()
        .filter(|a| a % 2 == 0)
        .chain(minus.into_iter().filter(|a| a % 2 == 1))
        .collect();
    residues.sort_unstable();
    CpSet { p: ctx.p(), residues }
}

/// Slow oracle: tests every residue mod `p(p-1)` directly.
pub fn build_cp_brute(p: u64) -> Result<CpSet> {
    let ctx = PrimeContext::new(p)?;
    let residues = (0..ctx.mod_order())
        .filter(|&a| d_eps_divisible_ctx(&ctx, a, 1, Sign::parity(a)))
        .collect();
    Ok(CpSet { p, residues })
}

/// `D_{p,q}`: pairs `(a, b)` in `C_p x C_q` with `gcd(p(p-1), q(q-1)) | a - b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpqSet {
    pub p: u64,
    pub q: u64,
    pub pairs: Vec<(u64, u64)>,
}

impl DpqSet {
    /// `lcm(p(p-1), q(q-1))`, the modulus of the intersected classes.
    pub fn modulus(&self) -> u128 {
        crate::modarith::lcm(self.p * (self.p - 1), self.q * (self.q - 1))
    }
}

pub fn build_dpq(cp: &CpSet, cq: &CpSet) -> DpqSet {
    let g = gcd(cp.modulus(), cq.modulus());
    let mut pairs = Vec::new();
    for &a in &cp.residues {
        for &b in &cq.residues {
            if a % g == b % g {
                pairs.push((a, b));
            }
        }
    }
    DpqSet { p: cp.p, q: cq.p, pairs }
}

/// `#D_{p,q}` without materializing the pairs.
pub(crate) fn count_dpq(a: &[u64], b: &[u64], g: u64) -> u64 {
    if a.len() * b.len() <= 16 {
        return a
            .iter()
            .map(|x| b.iter().filter(|y| x % g == *y % g).count() as u64)
            .sum();
    }
    let mut ra: Vec<u64> = a.iter().map(|x| x % g).collect();
    let mut rb: Vec<u64> = b.iter().map(|x| x % g).collect();
    ra.sort_unstable();
    rb.sort_unstable();
    let (mut i, mut j, mut n) = (0, 0, 0u64);
    while i < ra.len() && j < rb.len() {
        if ra[i] < rb[j] {
            i += 1;
        } else if ra[i] > rb[j] {
            j += 1;
        } else {
            let v = ra[i];
            let ci = ra[i..].iter().take_while(|&&x| x == v).count();
            let cj = rb[j..].iter().take_while(|&&x| x == v).count();
            n += (ci * cj) as u64;
            i += ci;
            j += cj;
        }
    }
    n
}

/// Checks that `ps` (ascending) lists exactly the odd primes below `x`.
pub(crate) fn check_coverage<I: IntoIterator<Item = u64>>(x: u64, ps: I) -> Result<()> {
    if x > MAX_PRIME {
        return Err(Error::InvalidArgument(format!("prime bound {x} exceeds 2^31")));
    }
    let mut cached = ps.into_iter().filter(|&p| p > 2 && p < x).peekable();
    for p in primes_up_to(x.saturating_sub(1)).into_iter().skip(1) {
        match cached.next() {
            Some(c) if c == p => {}
            _ => return Err(Error::IncompleteCache(p)),
        }
    }
    Ok(())
}

/// Cached sets for the odd primes below `x`, in order.
pub(crate) fn covered_cps(x: u64, cps: &[CpSet]) -> Result<Vec<&CpSet>> {
    check_coverage(x, cps.iter().map(|c| c.p))?;
    Ok(cps.iter().filter(|c| c.p > 2 && c.p < x).collect())
}

/// Every `(n, p)` with `2 <= n <= n_max` and `p` the smallest of the first
/// `prime_count` primes such that `p^2 | n^n + (-1)^n (n-1)^(n-1)`.
pub fn squarefree_scan(n_max: u64, prime_count: usize) -> Result<Vec<(u64, u64)>> {
    if n_max < 2 || prime_count == 0 {
        return Err(Error::InvalidArgument(
            "need n_max >= 2 and prime_count >= 1".into(),
        ));
    }
    let primes = first_primes(prime_count);
    if primes.last().is_some_and(|&p| p >= MAX_PRIME) {
        return Err(Error::InvalidArgument("prime_count too large".into()));
    }
    // 2^2 never divides an odd value; the rest run in Montgomery form mod p^2
    let monts: Vec<(u64, Montgomery)> = primes
        .iter()
        .filter(|&&p| p > 2)
        .map(|&p| (p, Montgomery::new(p * p)))
        .collect();
    let mut hits = Vec::new();
    for n in 2..=n_max {
        for (p, mont) in &monts {
            let p2 = p * p;
            let a = mont.pow(mont.to_mont(n % p2), n);
            let b = mont.pow(mont.to_mont((n - 1) % p2), n - 1);
            let hit = if n % 2 == 0 {
                mont.from_mont(a) == mont.from_mont(mont.sub(0, b))
            } else {
                a == b
            };
            if hit {
                hits.push((n, *p));
                break;
            }
        }
    }
    Ok(hits)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpStats {
    pub primes: usize,
    pub total: u64,
    pub mean: f64,
    pub std_error: f64,
}

/// Mean of `#C_p` over the odd primes below `x`, with its standard error.
pub fn cp_average(x: u64, cps: &[CpSet]) -> Result<CpStats> {
    let sets = covered_cps(x, cps)?;
    let n = sets.len();
    let total: u64 = sets.iter().map(|c| c.len() as u64).sum();
    if n == 0 {
        return Ok(CpStats { primes: 0, total: 0, mean: 0.0, std_error: 0.0 });
    }
    let mean = total as f64 / n as f64;
    let var = if n > 1 {
        sets.iter()
            .map(|c| (c.len() as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64
    } else {
        0.0
    };
    Ok(CpStats { primes: n, total, mean, std_error: (var / n as f64).sqrt() })
}

/// Predicted share of primes with `m` roots: `e^(-1/6) / (2 6^k k!)` for
/// `m = 6k+2` or `6k+4`, zero otherwise.
pub fn poisson_share(m: u64) -> f64 {
    if m % 6 != 2 && m % 6 != 4 {
        return 0.0;
    }
    let k = (m / 6) as i32;
    let fact: f64 = (1..=k).map(f64::from).product();
    (-1.0f64 / 6.0).exp() / (2.0 * 6f64.powi(k) * fact)
}

/// Root count at which the census stops listing rows one by one.
pub const CENSUS_TAIL_M: u64 = 26;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    /// Root count, or the lower end of the aggregated tail.
    pub m: u64,
    pub aggregate: bool,
    pub actual: u64,
    pub predicted: f64,
    pub sd: f64,
    /// Counts the Poisson model does not cover (Wieferich displacements).
    pub exempt: bool,
}

impl CensusRow {
    pub fn label(&self) -> String {
        if self.aggregate {
            format!(">={}", self.m)
        } else {
            self.m.to_string()
        }
    }

    pub fn within_sd(&self, k: f64) -> bool {
        self.exempt || (self.actual as f64 - self.predicted).abs() <= k * self.sd
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub x: u64,
    /// Odd primes below `x`.
    pub primes: u64,
    pub rows: Vec<CensusRow>,
}

impl Census {
    pub fn row(&self, m: u64) -> Option<&CensusRow> {
        self.rows.iter().find(|r| !r.aggregate && r.m == m)
    }

    pub fn tail(&self) -> &CensusRow {
        self.rows.last().expect("tail row is always present")
    }
}

fn census_row(m: u64, aggregate: bool, actual: u64, share: f64, n: u64, exempt: bool) -> CensusRow {
    let nf = n as f64;
    CensusRow {
        m,
        aggregate,
        actual,
        predicted: nf * share,
        sd: (nf * share * (1.0 - share)).sqrt(),
        exempt,
    }
}

/// Histogram of root counts for the odd primes below `x` against the Poisson
/// prediction. `counts` holds `(p, number of roots of f_p)`, ascending in `p`.
pub fn census(x: u64, counts: &[(u64, usize)]) -> Result<Census> {
    check_coverage(x, counts.iter().map(|c| c.0))?;
    let mut hist = std::collections::BTreeMap::<u64, u64>::new();
    let mut n = 0;
    for &(p, m) in counts.iter().filter(|c| c.0 > 2 && c.0 < x) {
        debug_assert!(is_prime(p));
        *hist.entry(m as u64).or_default() += 1;
        n += 1;
    }
    let mut rows = Vec::new();
    for m in 0..CENSUS_TAIL_M {
        let actual = hist.get(&m).copied().unwrap_or(0);
        let share = poisson_share(m);
        if share > 0.0 || actual > 0 {
            rows.push(census_row(m, false, actual, share, n, share == 0.0));
        }
    }
    let tail_actual = hist.range(CENSUS_TAIL_M..).map(|(_, c)| c).sum();
    let tail_share = 1.0 - (0..CENSUS_TAIL_M).map(poisson_share).sum::<f64>();
    rows.push(census_row(CENSUS_TAIL_M, true, tail_actual, tail_share.max(0.0), n, false));
    Ok(Census { x, primes: n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::d_eps_divisible;

    #[test]
    fn cp_examples() {
        assert!(build_cp(7).unwrap().is_empty());
        assert!(build_cp(2).unwrap().is_empty());
        let c83 = build_cp(83).unwrap();
        assert_eq!(c83.modulus(), 6806);
        assert!(c83.contains(130));
        let c59 = build_cp(59).unwrap();
        for a in [257, 487, 528, 815, 897] {
            assert!(c59.contains(a), "{a}");
        }
        for p in [3, 5, 7] {
            assert!(build_cp(p).unwrap().is_empty());
        }
    }

    #[test]
    fn cp_matches_brute_force_up_to_300() {
        for p in primes_up_to(300).into_iter().skip(1) {
            let fast = build_cp(p).unwrap();
            assert_eq!(fast, build_cp_brute(p).unwrap(), "p = {p}");
            let l = fast.modulus();
            for &a in &fast.residues {
                for rep in [a.max(2), a + l, a + 2 * l] {
                    assert!(d_eps_divisible(p, rep, 1, Sign::parity(rep)).unwrap());
                }
            }
        }
    }

    fn dpq_oracle(cp: &CpSet, cq: &CpSet) -> Vec<(u64, u64)> {
        let g = gcd(cp.modulus(), cq.modulus()) as i64;
        let mut v = Vec::new();
        for &a in &cp.residues {
            for &b in &cq.residues {
                if (a as i64 - b as i64).rem_euclid(g) == 0 {
                    v.push((a, b));
                }
            }
        }
        v
    }

    #[test]
    fn dpq_examples() {
        let c59 = build_cp(59).unwrap();
        let c83 = build_cp(83).unwrap();
        let d = build_dpq(&c59, &c83);
        assert_eq!(d.pairs, dpq_oracle(&c59, &c83));
        assert!(d.pairs.len() <= c59.len() * c83.len());
        let empty = build_cp(7).unwrap();
        assert!(build_dpq(&empty, &c83).pairs.is_empty());
        let swapped = build_dpq(&c83, &c59);
        let mut t: Vec<_> = swapped.pairs.iter().map(|&(a, b)| (b, a)).collect();
        t.sort_unstable();
        let mut orig = d.pairs.clone();
        orig.sort_unstable();
        assert_eq!(t, orig);
        assert_eq!(d.modulus(), 3422u128 * 6806 / gcd(3422, 6806) as u128);
    }

    #[test]
    fn dpq_counts_match_oracle() {
        let cps: Vec<CpSet> = primes_up_to(700)
            .into_iter()
            .skip(1)
            .map(|p| build_cp(p).unwrap())
            .filter(|c| !c.is_empty())
            .collect();
        for (i, a) in cps.iter().enumerate() {
            for b in &cps[i + 1..] {
                let g = gcd(a.modulus(), b.modulus());
                assert_eq!(
                    count_dpq(&a.residues, &b.residues, g),
                    dpq_oracle(a, b).len() as u64
                );
            }
        }
    }

    #[test]
    fn squarefree_examples() {
        let hits = squarefree_scan(1000, 10_000).unwrap();
        assert_eq!(
            hits,
            vec![(130, 83), (257, 59), (487, 59), (528, 59), (815, 59), (897, 59)]
        );
        for &(n, p) in &hits {
            assert!(d_eps_divisible(p, n, 1, Sign::parity(n)).unwrap());
        }
        assert!(squarefree_scan(10, 100).unwrap().is_empty());
        assert!(squarefree_scan(1, 5).is_err());
    }

    #[test]
    fn squarefree_scan_agrees_with_cp_sets() {
        let primes = first_primes(60);
        let cps: Vec<CpSet> = primes.iter().map(|&p| build_cp(p).unwrap()).collect();
        let hits = squarefree_scan(5000, 60).unwrap();
        for n in 2..=5000u64 {
            let first = cps.iter().find(|c| c.contains(n)).map(|c| c.p);
            let reported = hits.iter().find(|h| h.0 == n).map(|h| h.1);
            assert_eq!(first, reported, "n = {n}");
        }
    }

    #[test]
    fn averages_and_coverage() {
        let cps: Vec<CpSet> = [3, 5, 7].iter().map(|&p| build_cp(p).unwrap()).collect();
        let s = cp_average(10, &cps).unwrap();
        assert_eq!((s.primes, s.total, s.mean), (3, 0, 0.0));
        assert!(matches!(cp_average(12, &cps), Err(Error::IncompleteCache(11))));
        assert!(matches!(cp_average(10, &cps[1..]), Err(Error::IncompleteCache(3))));
    }

    #[test]
    fn poisson_shares() {
        let e = (-1.0f64 / 6.0).exp();
        assert!((poisson_share(2) - e / 2.0).abs() < 1e-15);
        assert!((poisson_share(10) - e / 12.0).abs() < 1e-15);
        assert!((poisson_share(20) - e / (2.0 * 216.0 * 6.0)).abs() < 1e-15);
        assert_eq!(poisson_share(7), 0.0);
        assert!((78_497.0 * poisson_share(2) - 33_223.1).abs() < 0.05);
        let total: f64 = (0..200).map(poisson_share).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn census_small() {
        let counts: Vec<(u64, usize)> = primes_up_to(3000)
            .into_iter()
            .skip(1)
            .map(|p| (p, fp_roots_direct(PrimeContext::new(p).unwrap()).len()))
            .collect();
        let c = census(3000, &counts).unwrap();
        assert_eq!(c.primes, counts.len() as u64);
        assert_eq!(c.rows.iter().map(|r| r.actual).sum::<u64>(), c.primes);
        let w = c.row(19).expect("1093 is Wieferich with two six-packs");
        assert_eq!((w.actual, w.exempt, w.predicted), (1, true, 0.0));
        assert!(c.rows.iter().all(|r| r.within_sd(4.0)));
        assert!(matches!(census(3002, &counts), Err(Error::IncompleteCache(3001))));
    }

}
