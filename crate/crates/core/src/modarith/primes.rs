//! Primality, factorization and prime enumeration.

use super::{gcd, mulmod, powmod};

const SMALL_LIMIT: u64 = 1 << 16;

/// Deterministic primality test for all of `u64`.
///
/// Below 2^16 this is plain trial division; above it a Miller-Rabin round over
/// a witness set known to be exact for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < SMALL_LIMIT {
        return trial_division_prime(n);
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn trial_division_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut q = 3;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 2;
    }
    true
}

/// Prime factorization as ascending `(prime, exponent)` pairs. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "cannot factor 0");
    let mut out = Vec::new();
    for q in [2u64, 3, 5] {
        push_power(&mut n, q, &mut out);
    }
    // wheel-free odd trial division up to a small bound, then Pollard-Brent
    let mut q = 7;
    while q <= 1000 && q * q <= n {
        push_power(&mut n, q, &mut out);
        q += 2;
    }
    if n > 1 {
        let mut stack = vec![n];
        let mut big = Vec::new();
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime(m) {
                big.push(m);
                continue;
            }
            let d = pollard_brent(m);
            stack.push(d);
            stack.push(m / d);
        }
        big.sort_unstable();
        for q in big {
            match out.last_mut() {
                Some((last, e)) if *last == q => *e += 1,
                _ => out.push((q, 1)),
            }
        }
    }
    out
}

fn push_power(n: &mut u64, q: u64, out: &mut Vec<(u64, u32)>) {
    let mut e = 0;
    while (*n).is_multiple_of(q) {
        *n /= q;
        e += 1;
    }
    if e > 0 {
        out.push((q, e));
    }
}

/// Returns a nontrivial factor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = 0u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Distinct prime divisors of `n`.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(q, _)| q).collect()
}

/// Smallest-prime-factor table for `0..=limit`, built by a linear sieve.
#[derive(Clone, Debug)]
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: u32) -> Self {
        let n = limit as usize + 1;
        let mut spf = vec![0u32; n];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &q in &primes {
                let j = i * q as usize;
                if q > si || j >= n {
                    break;
                }
                spf[j] = q;
            }
        }
        SpfSieve { spf }
    }

    pub fn limit(&self) -> u32 {
        (self.spf.len() - 1) as u32
    }

    /// Smallest prime factor of `n` for `2 <= n <= limit`.
    #[inline]
    pub fn spf(&self, n: u32) -> u32 {
        self.spf[n as usize]
    }

    #[inline]
    pub fn is_prime(&self, n: u32) -> bool {
        n >= 2 && self.spf[n as usize] == n
    }

    pub fn factorize(&self, mut n: u32) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let q = self.spf(n);
            n /= q;
            match out.last_mut() {
                Some((last, e)) if *last == q as u64 => *e += 1,
                _ => out.push((q as u64, 1)),
            }
        }
        out
    }
}

/// Odd-only sieve of Eratosthenes over `[2, limit]`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    primes_in_range(2, limit + 1)
}

/// All primes `p` with `lo <= p < hi`, via a segmented sieve.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime_in_range(lo, hi, |p| out.push(p));
    out
}

const SEGMENT: u64 = 1 << 18;

/// Calls `f` on every prime in `[lo, hi)` in ascending order, sieving in fixed
/// segments so memory stays O(sqrt(hi) + segment).
pub fn for_each_prime_in_range<F: FnMut(u64)>(lo: u64, hi: u64, mut f: F) {
    if hi <= lo || hi <= 2 {
        return;
    }
    if lo <= 2 {
        f(2);
    }
    let root = isqrt(hi - 1);
    let base: Vec<u64> = if root >= 3 {
        small_odd_primes(root)
    } else {
        Vec::new()
    };
    // odd numbers only: index i in a segment represents start + 2i
    let mut start = lo.max(3) | 1;
    let mut flags = vec![true; (SEGMENT / 2) as usize];
    while start < hi {
        let end = (start + SEGMENT).min(hi);
        let count = (end - start).div_ceil(2) as usize;
        flags[..count].iter_mut().for_each(|b| *b = true);
        for &q in &base {
            if q * q >= end {
                break;
            }
            let mut j = (start.div_ceil(q) * q).max(q * q);
            if j % 2 == 0 {
                j += q;
            }
            while j < end {
                flags[((j - start) / 2) as usize] = false;
                j += 2 * q;
            }
        }
        for (i, &is_p) in flags[..count].iter().enumerate() {
            let n = start + 2 * i as u64;
            if is_p && n < end && n > 1 {
                f(n);
            }
        }
        start = end | 1;
    }
}

fn small_odd_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize + 1;
    let mut sieve = vec![true; n];
    let mut out = Vec::new();
    let mut i = 3;
    while i < n {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

/// The first `count` primes, starting at 2.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_n < n (ln n + ln ln n) for n >= 6
    let n = count.max(6) as f64;
    let bound = (n * (n.ln() + n.ln().ln())).ceil() as u64 + 10;
    let mut primes = primes_up_to(bound);
    primes.truncate(count);
    primes
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}
