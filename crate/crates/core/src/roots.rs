//! Roots of `f_p(x) = ((x+1)^p - x^p - 1)/p` modulo `p` and their orbit structure.
//!
//! A residue `x` is a root exactly when `x^p` and `(x+1)^p` are consecutive
//! modulo `p^2`. Roots are closed under `x -> -x-1` and `x -> 1/x`, which
//! generate a group of six Möbius maps; generic orbits ("six-packs") have six
//! elements, and three degenerate orbits are handled separately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{invmod, powmod, pth_powers_mont, PrimeContext, SpfSieve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootMethod {
    /// Two modular exponentiations per residue.
    Direct,
    /// One pass over a table of `x^p mod p^2`.
    Sieve,
}

/// All `x` in `0..p` with `(x+1)^p - x^p = 1 (mod p^2)`, ascending.
pub fn fp_roots(p: u64, method: RootMethod) -> Result<Vec<u64>> {
    let ctx = PrimeContext::new(p)?;
    Ok(match method {
        RootMethod::Direct => fp_roots_direct(ctx),
        RootMethod::Sieve => {
            let spf = SpfSieve::new(p as u32);
            fp_roots_sieve(ctx, &spf)
        }
    })
}

pub(crate) fn fp_roots_direct(ctx: PrimeContext) -> Vec<u64> {
    let (p, p2) = (ctx.p(), ctx.p2());
    let mut roots = Vec::new();
    let mut lo = 0; // 0^p
    for x in 0..p {
        let hi = powmod(x + 1, p, p2);
        if (hi + p2 - lo) % p2 == 1 {
            roots.push(x);
        }
        lo = hi;
    }
    roots
}

/// Sieve method with a caller-supplied smallest-prime-factor table covering `p - 1`.
pub fn fp_roots_sieve(ctx: PrimeContext, spf: &SpfSieve) -> Vec<u64> {
    let mont = ctx.montgomery();
    let s = pth_powers_mont(ctx, &mont, spf);
    let one = mont.one();
    // s[p] = 0 stands in for (p-1+1)^p = 0 mod p^2
    (0..ctx.p())
        .filter(|&x| mont.sub(s[x as usize + 1], s[x as usize]) == one)
        .collect()
}

/// A point of the projective line over `Z/pZ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProjPoint {
    Finite(u64),
    Infinity,
}

/// The six images `x, -x-1, -1/(x+1), -x/(x+1), -(x+1)/x, 1/x`, with `1/0 = ∞`.
pub fn orbit_of(p: u64, x: ProjPoint) -> [ProjPoint; 6] {
    // homogeneous coordinates [a : b] represent a/b
    let (a, b) = match x {
        ProjPoint::Finite(v) => (v % p, 1),
        ProjPoint::Infinity => (1, 0),
    };
    let neg = |v: u64| (p - v % p) % p;
    let sum = (a + b) % p;
    let images = [
        (a, b),
        (neg(sum), b),
        (neg(b), sum),
        (neg(a), sum),
        (neg(sum), a),
        (b, a),
    ];
    images.map(|(num, den)| {
        if den == 0 {
            ProjPoint::Infinity
        } else {
            let inv = invmod(den, p).expect("nonzero mod prime");
            ProjPoint::Finite((num as u128 * inv as u128 % p as u128) as u64)
        }
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCounts {
    pub trivial: usize,
    pub cyclotomic: usize,
    pub wieferich: usize,
    pub sixpacks: usize,
}

/// Roots of `f_p` partitioned into orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCensus {
    pub p: u64,
    pub roots: Vec<u64>,
    pub counts: OrbitCounts,
    /// `{ζ, ζ^{-1}}`, primitive cube roots of unity (only when `p = 1 mod 6`).
    pub cyclotomic: Vec<u64>,
    /// `{1, -2, -1/2}` sorted (only for Wieferich primes).
    pub wieferich: Vec<u64>,
    /// Six-packs, each sorted, ordered by least element.
    pub sixpacks: Vec<[u64; 6]>,
}

impl RootCensus {
    pub fn total(&self) -> usize {
        self.roots.len()
    }

    /// Roots outside the trivial and cyclotomic orbits.
    pub fn sporadic_roots(&self) -> impl Iterator<Item = u64> + '_ {
        let p = self.p;
        self.roots
            .iter()
            .copied()
            .filter(move |&x| x != 0 && x != p - 1 && !self.cyclotomic.contains(&x))
    }
}

/// Partitions the root list of `f_p` into trivial, cyclotomic, Wieferich and six-pack orbits.
pub fn classify_roots(p: u64, roots: &[u64]) -> Result<RootCensus> {
    let ctx = PrimeContext::new(p)?;
    classify_roots_ctx(ctx, roots)
}

pub(crate) fn classify_roots_ctx(ctx: PrimeContext, roots: &[u64]) -> Result<RootCensus> {
    let p = ctx.p();
    let fail = |detail: String| Error::OrbitDecompositionFailure { p, detail };
    let mut remaining: std::collections::BTreeSet<u64> = roots.iter().copied().collect();
    if remaining.len() != roots.len() {
        return Err(fail("duplicate roots".into()));
    }
    if remaining.iter().any(|&x| x >= p) {
        return Err(fail("root out of range".into()));
    }

    for t in [0, p - 1] {
        if !remaining.remove(&t) {
            return Err(fail(format!("trivial root {t} missing")));
        }
    }
    let mut counts = OrbitCounts {
        trivial: 2,
        ..Default::default()
    };

    let mut cyclotomic = Vec::new();
    if p % 6 == 1 {
        let zetas: Vec<u64> = remaining
            .iter()
            .copied()
            .filter(|&x| (x as u128 * x as u128 + x as u128 + 1).is_multiple_of(p as u128))
            .collect();
        if zetas.len() != 2 {
            return Err(fail(format!("expected two cube roots of unity, found {zetas:?}")));
        }
        for z in &zetas {
            remaining.remove(z);
        }
        counts.cyclotomic = 2;
        cyclotomic = zetas;
    }

    let mut wieferich = Vec::new();
    if p > 3 {
        let minus_two = p - 2;
        let minus_half = invmod(minus_two, p)?;
        let mut orbit = vec![1, minus_two, minus_half];
        orbit.sort_unstable();
        let present: Vec<bool> = orbit.iter().map(|x| remaining.contains(x)).collect();
        if present.iter().all(|&b| b) {
            for x in &orbit {
                remaining.remove(x);
            }
            counts.wieferich = 3;
            wieferich = orbit;
        } else if present.iter().any(|&b| b) {
            return Err(fail(format!("partial Wieferich orbit among {orbit:?}")));
        }
    }

    let mut sixpacks = Vec::new();
    while let Some(&x) = remaining.iter().next() {
        let images = orbit_of(p, ProjPoint::Finite(x));
        let mut pack = [0u64; 6];
        for (slot, img) in pack.iter_mut().zip(images) {
            match img {
                ProjPoint::Finite(v) => *slot = v,
                ProjPoint::Infinity => return Err(fail(format!("orbit of {x} hits infinity"))),
            }
        }
        pack.sort_unstable();
        if pack.windows(2).any(|w| w[0] == w[1]) {
            return Err(fail(format!("orbit of {x} is degenerate: {pack:?}")));
        }
        for v in &pack {
            if !remaining.remove(v) {
                return Err(fail(format!("orbit of {x} contains non-root {v}")));
            }
        }
        sixpacks.push(pack);
    }
    counts.sixpacks = sixpacks.len();

    Ok(RootCensus {
        p,
        roots: roots.to_vec(),
        counts,
        cyclotomic,
        wieferich,
        sixpacks,
    })
}

/// `p^2 | 2^p - 2`.
pub fn is_wieferich(p: u64) -> bool {
    powmod(2, p, p * p) == 2
}

/// Two `p`-th powers mod `p^2` that differ by one, produced by the root `source_root`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsecutivePair {
    /// `x^p mod p^2`
    pub lo: u64,
    /// `(x+1)^p mod p^2`
    pub hi: u64,
    pub source_root: u64,
}

/// Pairs `(x^p, (x+1)^p) mod p^2` for every nontrivial root `x`.
pub fn consecutive_pairs(p: u64) -> Result<Vec<ConsecutivePair>> {
    let ctx = PrimeContext::new(p)?;
    let roots = fp_roots_direct(ctx);
    Ok(pairs_from_roots(ctx, &roots))
}

pub(crate) fn pairs_from_roots(ctx: PrimeContext, roots: &[u64]) -> Vec<ConsecutivePair> {
    let p = ctx.p();
    roots
        .iter()
        .filter(|&&x| x != 0 && x != p - 1)
        .map(|&x| ConsecutivePair {
            lo: ctx.pth_power_lift(x),
            hi: ctx.pth_power_lift(x + 1),
            source_root: x,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::primes::primes_up_to;

    fn fin(v: &[u64]) -> Vec<ProjPoint> {
        v.iter().map(|&x| ProjPoint::Finite(x)).collect()
    }

    fn distinct(orbit: [ProjPoint; 6]) -> Vec<ProjPoint> {
        let mut v = orbit.to_vec();
        v.sort();
        v.dedup();
        v
    }

    #[test]
    fn roots_examples() {
        assert_eq!(fp_roots(7, RootMethod::Direct).unwrap(), vec![0, 2, 4, 6]);
        assert_eq!(fp_roots(7, RootMethod::Sieve).unwrap(), vec![0, 2, 4, 6]);
        assert_eq!(fp_roots(5, RootMethod::Sieve).unwrap(), vec![0, 4]);
        let r59 = fp_roots(59, RootMethod::Sieve).unwrap();
        assert_eq!(r59.len(), 14);
        assert!(r59.contains(&3));
        assert!(matches!(fp_roots(2, RootMethod::Direct), Err(Error::InvalidPrime(2))));
        assert!(fp_roots(91, RootMethod::Sieve).is_err());
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(distinct(orbit_of(7, ProjPoint::Finite(1))), fin(&[1, 3, 5]));
        let mut o13 = orbit_of(13, ProjPoint::Finite(2)).to_vec();
        assert_eq!(o13, fin(&[2, 10, 4, 8, 5, 7]));
        o13.sort();
        o13.dedup();
        assert_eq!(o13.len(), 6);
        let mut triv = fin(&[0, 10]);
        triv.push(ProjPoint::Infinity);
        assert_eq!(distinct(orbit_of(11, ProjPoint::Finite(0))), triv);
        assert_eq!(distinct(orbit_of(11, ProjPoint::Infinity)), triv);
        // cyclotomic orbit: 2 is a primitive cube root of unity mod 7
        assert_eq!(distinct(orbit_of(7, ProjPoint::Finite(2))), fin(&[2, 4]));
    }

    #[test]
    fn classify_examples() {
        let c7 = classify_roots(7, &[0, 2, 4, 6]).unwrap();
        assert_eq!(
            c7.counts,
            OrbitCounts {
                trivial: 2,
                cyclotomic: 2,
                wieferich: 0,
                sixpacks: 0
            }
        );
        let r = fp_roots(1093, RootMethod::Sieve).unwrap();
        let c = classify_roots(1093, &r).unwrap();
        assert_eq!(c.total(), 19);
        assert_eq!(
            c.counts,
            OrbitCounts {
                trivial: 2,
                cyclotomic: 2,
                wieferich: 3,
                sixpacks: 2
            }
        );
        let r = fp_roots(3511, RootMethod::Sieve).unwrap();
        let c = classify_roots(3511, &r).unwrap();
        assert_eq!(c.total(), 7);
        assert_eq!((c.counts.sixpacks, c.counts.wieferich), (0, 3));
    }

    #[test]
    fn classify_rejects_broken_root_sets() {
        assert!(classify_roots(7, &[0, 2, 6]).is_err());
        assert!(classify_roots(13, &[0, 2, 12]).is_err());
        assert!(classify_roots(11, &[0, 10, 1]).is_err());
    }

    #[test]
    fn wieferich_examples() {
        assert!(is_wieferich(1093));
        assert!(is_wieferich(3511));
        assert!(!is_wieferich(7));
    }

    #[test]
    fn pair_examples() {
        let pairs = consecutive_pairs(7).unwrap();
        let lo_hi: Vec<(u64, u64)> = pairs.iter().map(|c| (c.lo, c.hi)).collect();
        assert_eq!(lo_hi, vec![(30, 31), (18, 19)]);
        let p59 = consecutive_pairs(59).unwrap();
        assert!(p59.iter().any(|c| (c.lo, c.hi) == (298, 299)));
        assert!(consecutive_pairs(5).unwrap().is_empty());
    }

    #[test]
    fn root_set_structure_up_to_10k() {
        let primes = primes_up_to(10_000);
        let spf = SpfSieve::new(10_000);
        for &p in &primes[1..] {
            let ctx = PrimeContext::new(p).unwrap();
            let roots = fp_roots_sieve(ctx, &spf);
            assert_eq!(roots, fp_roots_direct(ctx), "method mismatch at p={p}");
            let set: std::collections::HashSet<u64> = roots.iter().copied().collect();
            for &x in &roots {
                assert!(set.contains(&((2 * p - x - 1) % p)), "p={p}: -x-1 for {x}");
                if x != 0 {
                    assert!(set.contains(&invmod(x, p).unwrap()), "p={p}: 1/x for {x}");
                }
            }
            let census = classify_roots_ctx(ctx, &roots).unwrap();
            let base = match p % 6 {
                1 => 4,
                5 => 2,
                _ => 2, // p = 3
            };
            let extra = if is_wieferich(p) { 3 } else { 0 };
            assert_eq!(roots.len() % 6, (base + extra) % 6, "p={p}");
            assert_eq!(census.counts.wieferich == 3, is_wieferich(p));
            assert_eq!(census.counts.cyclotomic == 2, p % 6 == 1);
            for pair in pairs_from_roots(ctx, &roots) {
                assert_eq!((pair.hi + ctx.p2() - pair.lo) % ctx.p2(), 1);
                assert!(ctx.is_pth_power(pair.lo) && ctx.is_pth_power(pair.hi));
            }
        }
    }

    #[test]
    fn consecutive_pth_powers_come_from_consecutive_bases() {
        for &p in primes_up_to(200).iter().skip(1) {
            let ctx = PrimeContext::new(p).unwrap();
            let p2 = ctx.p2();
            let mut base_of = vec![None; p2 as usize];
            for a in 0..p {
                base_of[ctx.pth_power_lift(a) as usize] = Some(a);
            }
            for y in 0..p2 {
                let x = (y + p2 - 1) % p2;
                if let (Some(a), Some(b)) = (base_of[x as usize], base_of[y as usize]) {
                    assert_eq!((a + 1) % p, b, "p={p}: {x}, {y}");
                }
            }
        }
    }
}
