//! The correspondence between residue classes `n mod p(p-1)` with
//! `p^2 | D_eps(n, m)` and pairs `(x, k)` where `x - 1, x` are consecutive
//! nonzero `p`-th powers mod `p^2` and `x^k = -eps (1-x)^m`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{gcd, invmod, mulmod, powmod, BsgsTable, PrimeContext};
use crate::roots::{classify_roots_ctx, fp_roots_direct, ConsecutivePair};

/// The sign `eps` in `D_eps(n, m) = n^n + eps (n-m)^(n-m) m^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i64(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {v}"))),
        }
    }

    /// `(-1)^n`
    pub fn parity(n: u64) -> Sign {
        if n.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `self * v mod modulus` for a residue `v`.
    pub(crate) fn apply(self, v: u64, modulus: u64) -> u64 {
        match self {
            Sign::Plus => v % modulus,
            Sign::Minus => (modulus - v % modulus) % modulus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Sign> {
        match s.trim() {
            "+1" | "1" | "+" | "plus" => Ok(Sign::Plus),
            "-1" | "-" | "minus" => Ok(Sign::Minus),
            other => Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {other:?}"))),
        }
    }
}

/// An element `(x, k)` with `x^k = -eps (1-x)^m (mod p^2)`, `x` a nonzero `p`-th power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairWitness {
    pub x: u64,
    /// Stored in `1..=p-1`.
    pub k: u64,
    pub eps: Sign,
    pub m: u64,
}

impl PairWitness {
    pub fn holds(&self, ctx: &PrimeContext) -> bool {
        witness_congruence(ctx, self.x, self.k, self.m, self.eps)
    }
}

fn witness_congruence(ctx: &PrimeContext, x: u64, k: u64, m: u64, eps: Sign) -> bool {
    let p2 = ctx.p2();
    let x = x % p2;
    if !ctx.is_pth_power(x) {
        return false;
    }
    let one_minus = (1 + p2 - x) % p2;
    let rhs = eps.flip().apply(powmod(one_minus, m, p2), p2);
    powmod(x, k, p2) == rhs
}

/// A set of residues modulo `p(p-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSet {
    pub p: u64,
    pub m: u64,
    pub eps: Sign,
    /// Ascending, each in `0..p(p-1)`.
    pub residues: Vec<u64>,
}

impl ResidueSet {
    pub fn modulus(&self) -> u64 {
        self.p * (self.p - 1)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.residues.binary_search(&(n % self.modulus())).is_ok()
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

/// A pair `(n, m)` with `n > m >= 1`, `p` not dividing `m`, and `p^2 | D_eps(n, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityWitness {
    pub p: u64,
    pub n: u64,
    pub m: u64,
    pub eps: Sign,
}

fn check_m(p: u64, m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if m.is_multiple_of(p) {
        return Err(Error::InvalidArgument(format!("{p} divides m = {m}")));
    }
    Ok(())
}

/// Least representative of `n mod p(p-1)` exceeding `m`.
pub fn least_representative(p: u64, n: u64, m: u64) -> u64 {
    let l = p * (p - 1);
    let r = n % l;
    if r > m {
        r
    } else {
        r + (m - r) / l * l + l
    }
}

/// `p^2 | D_eps(n, m)`. If `n <= m`, `n` is read as a residue class and
/// lifted to its least representative above `m`.
pub fn d_eps_divisible(p: u64, n: u64, m: u64, eps: Sign) -> Result<bool> {
    let ctx = PrimeContext::new(p)?;
    check_m(p, m)?;
    Ok(d_eps_divisible_ctx(&ctx, n, m, eps))
}

pub(crate) fn d_eps_divisible_ctx(ctx: &PrimeContext, n: u64, m: u64, eps: Sign) -> bool {
    let (p, p2, l) = (ctx.p(), ctx.p2(), ctx.mod_order());
    let n = if n > m { n } else { least_representative(p, n, m) };
    if n % p == 0 {
        // then p divides n^n but not (n-m)^(n-m) m^m
        return false;
    }
    let d = n - m;
    let e1 = n % l;
    // Euler reduction only for bases prime to p
    let e2 = if d.is_multiple_of(p) { d } else { d % l };
    let e3 = m % l;
    let first = powmod(n % p2, e1, p2);
    let second = mulmod(powmod(d % p2, e2, p2), powmod(m % p2, e3, p2), p2);
    (first + eps.apply(second, p2)).is_multiple_of(p2)
}

/// The pair `(x, k)` attached to a class `n` in the divisibility set.
pub fn alpha(p: u64, m: u64, eps: Sign, n: u64) -> Result<PairWitness> {
    let ctx = PrimeContext::new(p)?;
    check_m(p, m)?;
    alpha_ctx(&ctx, m, eps, n)
}

pub(crate) fn alpha_ctx(ctx: &PrimeContext, m: u64, eps: Sign, n: u64) -> Result<PairWitness> {
    let p = ctx.p();
    if n.is_multiple_of(p) || !d_eps_divisible_ctx(ctx, n, m, eps) {
        return Err(Error::PreconditionFailed(format!(
            "{p}^2 does not divide D_{eps}({n}, {m})"
        )));
    }
    let n_inv = invmod(n % p, p)?;
    let x0 = (1 + p - mulmod(m % p, n_inv, p)) % p;
    let x = ctx.pth_power_lift(x0);
    let q = p - 1;
    let k = match (m % q + q - n % q) % q {
        0 => q,
        k => k,
    };
    Ok(PairWitness { x, k, eps, m })
}

/// The class `n mod p(p-1)` attached to a pair `(x, k)`.
pub fn beta(p: u64, m: u64, eps: Sign, x: u64, k: u64) -> Result<u64> {
    let ctx = PrimeContext::new(p)?;
    check_m(p, m)?;
    beta_ctx(&ctx, m, eps, x, k)
}

pub(crate) fn beta_ctx(ctx: &PrimeContext, m: u64, eps: Sign, x: u64, k: u64) -> Result<u64> {
    if !witness_congruence(ctx, x, k, m, eps) {
        return Err(Error::PreconditionFailed(format!(
            "x = {x}, k = {k} do not satisfy x^k = -eps (1-x)^m mod {}",
            ctx.p2()
        )));
    }
    Ok(beta_unchecked(ctx, m, x, k))
}

fn beta_unchecked(ctx: &PrimeContext, m: u64, x: u64, k: u64) -> u64 {
    BetaRow::new(ctx, m, x).at(k)
}

/// `beta(x, k)` for one `x` and many `k`: `((m - k) p - m (1-x)^{-1} (p-1)) mod p(p-1)`.
struct BetaRow {
    base: u64,
    p: u64,
    l: u64,
}

impl BetaRow {
    fn new(ctx: &PrimeContext, m: u64, x: u64) -> Self {
        let (p, l) = (ctx.p(), ctx.mod_order());
        // only (1-x)^{-1} mod p matters since it is multiplied by p-1
        let inv = invmod((1 + p - x % p) % p, p).expect("x != 1 mod p");
        let c = mulmod(mulmod(m % l, inv, l), p - 1, l);
        let base = (mulmod(m % l, p, l) + l - c) % l;
        BetaRow { base, p, l }
    }

    #[inline]
    fn at(&self, k: u64) -> u64 {
        (self.base + self.l - k * self.p % self.l) % self.l
    }
}

/// Logarithms to base `g^p` inside the subgroup of nonzero `p`-th powers mod `p^2`.
pub(crate) struct PthPowerLog {
    table: BsgsTable,
}

impl PthPowerLog {
    pub(crate) fn new(ctx: &PrimeContext) -> Self {
        let h = powmod(ctx.primitive_root(), ctx.p(), ctx.p2());
        PthPowerLog {
            table: BsgsTable::new(h, ctx.p2(), ctx.p() - 1).expect("valid generator"),
        }
    }

    /// Exponent in `0..p-1`; `None` if `x` is not a nonzero `p`-th power.
    pub(crate) fn log(&self, x: u64) -> Option<u64> {
        self.table.log(x)
    }
}

/// All `k` in `1..=q` with `a k = b (mod q)`, ascending.
fn solve_linear(a: u64, b: u64, q: u64) -> Vec<u64> {
    let d = gcd(a % q, q);
    if !b.is_multiple_of(d) {
        return Vec::new();
    }
    let step = q / d;
    let k0 = if step == 1 {
        0
    } else {
        mulmod((b / d) % step, invmod((a / d) % step, step).expect("coprime"), step)
    };
    let mut ks: Vec<u64> = (0..d).map(|i| match k0 + i * step {
        0 => q,
        k => k,
    }).collect();
    ks.sort_unstable();
    ks
}

/// Upper members `x` of the nontrivial consecutive pairs, in root order.
fn upper_members(ctx: &PrimeContext, roots: &[u64]) -> Vec<u64> {
    let p = ctx.p();
    roots
        .iter()
        .filter(|&&r| r != 0 && r != p - 1)
        .map(|&r| ctx.pth_power_lift(r + 1))
        .collect()
}

/// Every `(x, k)` with `x - 1, x` consecutive nonzero `p`-th powers and
/// `x^k = -eps (1-x)^m (mod p^2)`, `k` in `1..=p-1`.
pub fn b_set(p: u64, m: u64, eps: Sign) -> Result<Vec<PairWitness>> {
    let ctx = PrimeContext::new(p)?;
    check_m(p, m)?;
    let roots = fp_roots_direct(ctx);
    Ok(b_set_from_roots(&ctx, &roots, m, eps))
}

pub(crate) fn b_set_from_roots(ctx: &PrimeContext, roots: &[u64], m: u64, eps: Sign) -> Vec<PairWitness> {
    let xs = upper_members(ctx, roots);
    if xs.is_empty() {
        return Vec::new();
    }
    let logs = PthPowerLog::new(ctx);
    b_set_with_logs(ctx, &xs, &logs, m, eps)
}

fn b_set_with_logs(
    ctx: &PrimeContext,
    xs: &[u64],
    logs: &PthPowerLog,
    m: u64,
    eps: Sign,
) -> Vec<PairWitness> {
    let (p2, q) = (ctx.p2(), ctx.p() - 1);
    let mut out = Vec::new();
    for &x in xs {
        let target = eps.flip().apply(powmod((1 + p2 - x) % p2, m, p2), p2);
        let a = logs.log(x).expect("x is a p-th power");
        let b = logs.log(target).expect("-eps (1-x)^m is a p-th power");
        for k in solve_linear(a, b, q) {
            out.push(PairWitness { x, k, eps, m });
        }
    }
    out
}

/// `A(p, m, +1)` and `A(p, m, -1)` together, sharing one logarithm table.
pub(crate) fn a_sets_both_signs(ctx: &PrimeContext, roots: &[u64], m: u64) -> [Vec<u64>; 2] {
    let xs = upper_members(ctx, roots);
    if xs.is_empty() {
        return [Vec::new(), Vec::new()];
    }
    let logs = PthPowerLog::new(ctx);
    [Sign::Plus, Sign::Minus].map(|eps| a_set_with_logs(ctx, &xs, &logs, m, eps))
}

fn a_set_with_logs(ctx: &PrimeContext, xs: &[u64], logs: &PthPowerLog, m: u64, eps: Sign) -> Vec<u64> {
    let (p2, q) = (ctx.p2(), ctx.p() - 1);
    let mut out = Vec::new();
    for &x in xs {
        let target = eps.flip().apply(powmod((1 + p2 - x) % p2, m, p2), p2);
        let a = logs.log(x).expect("x is a p-th power");
        let b = logs.log(target).expect("-eps (1-x)^m is a p-th power");
        let ks = solve_linear(a, b, q);
        if ks.is_empty() {
            continue;
        }
        let row = BetaRow::new(ctx, m, x);
        out.extend(ks.into_iter().map(|k| row.at(k)));
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Same set as [`b_set`], found by stepping through the powers of each `x`
/// up to its order and repeating the hits with that period.
pub fn b_set_scan(p: u64, m: u64, eps: Sign) -> Result<Vec<PairWitness>> {
    let ctx = PrimeContext::new(p)?;
    check_m(p, m)?;
    let roots = fp_roots_direct(ctx);
    let (p2, q) = (ctx.p2(), p - 1);
    let mont = ctx.montgomery();
    let mut out = Vec::new();
    for x in upper_members(&ctx, &roots) {
        let target = mont.to_mont(eps.flip().apply(powmod((1 + p2 - x) % p2, m, p2), p2));
        let xm = mont.to_mont(x);
        let one = mont.one();
        let mut hits = Vec::new();
        let mut cur = xm;
        let mut k = 1;
        loop {
            if cur == target {
                hits.push(k);
            }
            if cur == one {
                break;
            }
            cur = mont.mul(cur, xm);
            k += 1;
        }
        let order = k;
        let mut ks: Vec<u64> = hits
            .iter()
            .flat_map(|&h| (0..q / order).map(move |i| h + i * order))
            .collect();
        ks.sort_unstable();
        out.extend(ks.into_iter().map(|k| PairWitness { x, k, eps, m }));
    }
    Ok(out)
}

/// The classes `n mod p(p-1)` with `p^2 | D_eps(n, m)`.
pub fn a_set(p: u64, m: u64, eps: Sign) -> Result<ResidueSet> {
    let ctx = PrimeContext::new(p)?;
    check_m(p, m)?;
    let roots = fp_roots_direct(ctx);
    Ok(a_set_from_roots(&ctx, &roots, m, eps))
}

pub(crate) fn a_set_from_roots(ctx: &PrimeContext, roots: &[u64], m: u64, eps: Sign) -> ResidueSet {
    let xs = upper_members(ctx, roots);
    let residues = if xs.is_empty() {
        Vec::new()
    } else {
        a_set_with_logs(ctx, &xs, &PthPowerLog::new(ctx), m, eps)
    };
    ResidueSet {
        p: ctx.p(),
        m,
        eps,
        residues,
    }
}

/// Whether there are consecutive nonzero `p`-th powers mod `p^2`.
pub fn in_p_cons(p: u64) -> Result<bool> {
    let ctx = PrimeContext::new(p)?;
    Ok(fp_roots_direct(ctx).len() > 2)
}

/// Whether some `D_eps(n, m)` with `p` not dividing `m` is divisible by `p^2`,
/// with an explicit `(n, m)` when it is.
pub fn in_p(p: u64, eps: Sign) -> Result<Option<DivisibilityWitness>> {
    let ctx = PrimeContext::new(p)?;
    let roots = fp_roots_direct(ctx);
    match roots.iter().find(|&&y| y != 0 && y != p - 1) {
        None => Ok(None),
        Some(&y) => witness_from_root(&ctx, y, eps).map(Some),
    }
}

/// Builds `(n, m)` from a nontrivial root `y` of `f_p`.
pub(crate) fn witness_from_root(ctx: &PrimeContext, y: u64, eps: Sign) -> Result<DivisibilityWitness> {
    let (p, p2, q) = (ctx.p(), ctx.p2(), ctx.p() - 1);
    let fail = |detail: String| Error::WitnessConstructionFailure { p, detail };
    let order_p = |a: u64| crate::modarith::mult_order(a % p, p, q);

    // choose x with x and 1-x nonzero p-th powers and 1-x of even order
    let neg_y = p - y;
    let base = if order_p(y + 1)? % 2 == 0 {
        neg_y
    } else if order_p(neg_y)? % 2 == 0 {
        y + 1
    } else {
        let z = invmod(y, p)?;
        if order_p(z + 1)? % 2 != 0 {
            return Err(fail(format!("no even-order choice from root {y}")));
        }
        p - z
    };
    let x = ctx.pth_power_lift(base);
    let one_minus = (1 + p2 - x) % p2;

    let logs = PthPowerLog::new(ctx);
    let j = logs.log(x).ok_or_else(|| fail(format!("{x} is not a p-th power")))?;
    let k = logs
        .log(one_minus)
        .ok_or_else(|| fail(format!("{one_minus} is not a p-th power")))?;
    let m = match eps {
        Sign::Minus => j,
        Sign::Plus => {
            let order = crate::modarith::mult_order(one_minus, p2, q)?;
            let t = order / 2;
            (j + q - t) % q
        }
    };
    let m = if m == 0 { q } else { m };
    let n = beta_ctx(ctx, m, eps, x, k).map_err(|e| fail(e.to_string()))?;
    let n = least_representative(p, n, m);
    if !d_eps_divisible_ctx(ctx, n, m, eps) {
        return Err(fail(format!("{p}^2 does not divide D_{eps}({n}, {m})")));
    }
    Ok(DivisibilityWitness { p, n, m, eps })
}

/// Whether `f_p` has a root other than `0`, `-1` and the primitive cube roots of unity.
pub fn in_p_tilde(p: u64) -> Result<bool> {
    let ctx = PrimeContext::new(p)?;
    Ok(sporadic_root(&ctx)?.is_some())
}

fn sporadic_root(ctx: &PrimeContext) -> Result<Option<u64>> {
    let roots = fp_roots_direct(*ctx);
    let census = classify_roots_ctx(*ctx, &roots)?;
    let first = census.sporadic_roots().next();
    Ok(first)
}

/// A witness `(n, m)` for the sporadic variant: `p^2 | D_eps(n, m)` while
/// `p^2` does not divide `(n^2 - nm + m^2)/gcd(n, m)^2`.
pub fn in_p_tilde_witness(p: u64, eps: Sign) -> Result<Option<DivisibilityWitness>> {
    let ctx = PrimeContext::new(p)?;
    let Some(y) = sporadic_root(&ctx)? else {
        return Ok(None);
    };
    let w = witness_from_root(&ctx, y, eps)?;
    if sixth_root_divisibility(p, w.n, w.m) {
        return Err(Error::WitnessConstructionFailure {
            p,
            detail: format!("({}, {}) comes from a sixth-root pair", w.n, w.m),
        });
    }
    Ok(Some(w))
}

/// `p^2 | (n^2 - nm + m^2) / gcd(n, m)^2`.
pub fn sixth_root_divisibility(p: u64, n: u64, m: u64) -> bool {
    let g = gcd(n, m).max(1);
    let (n, m) = ((n / g) as u128, (m / g) as u128);
    let p2 = p as u128 * p as u128;
    let q = (n * n + m * m - n * m) % p2;
    q == 0
}

/// The two pairs `(x - 1, x)` with `x` a primitive sixth root of unity mod `p^2`,
/// ordered by the root `x - 1 mod p` of `f_p`.
pub fn sixth_root_pairs(p: u64) -> Result<Vec<ConsecutivePair>> {
    let ctx = PrimeContext::new(p)?;
    if p % 6 != 1 {
        return Err(Error::InvalidArgument(format!("{p} is not 1 mod 6")));
    }
    let p2 = ctx.p2();
    // g^((p-1)/6) is a primitive sixth root mod p; its p-th power lift is one mod p^2
    let g = ctx.primitive_root() % p;
    let zeta6 = powmod(g, (p - 1) / 6, p);
    let mut pairs: Vec<ConsecutivePair> = [zeta6, powmod(zeta6, 5, p)]
        .iter()
        .map(|&s| {
            let x = ctx.pth_power_lift(s);
            ConsecutivePair {
                lo: (x + p2 - 1) % p2,
                hi: x,
                source_root: (s + p - 1) % p,
            }
        })
        .collect();
    pairs.sort_by_key(|c| c.source_root);
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::primes::primes_up_to;
    use crate::roots::consecutive_pairs;
    use Sign::{Minus, Plus};

    fn pw(x: u64, k: u64, eps: Sign) -> PairWitness {
        PairWitness { x, k, eps, m: 1 }
    }

    #[test]
    fn divisibility_examples() {
        assert!(d_eps_divisible(7, 5, 1, Plus).unwrap());
        assert!(d_eps_divisible(7, 10, 2, Minus).unwrap());
        assert!(d_eps_divisible(83, 130, 1, Plus).unwrap());
        assert!(d_eps_divisible(83, 130 + 83 * 82, 1, Plus).unwrap());
        assert!(d_eps_divisible(1093, 2185, 1, Plus).unwrap());
        assert!(d_eps_divisible(3511, 7021, 1, Plus).unwrap());
        assert!(!d_eps_divisible(7, 6, 1, Plus).unwrap());
        assert!(!d_eps_divisible(7, 14, 1, Plus).unwrap());
        assert!(d_eps_divisible(7, 5, 7, Plus).is_err());
        // p | n - m: no Euler reduction of that exponent
        assert_eq!(
            d_eps_divisible(3, 39497, 743, Plus).unwrap(),
            d_eps_divisible(3, 39503, 749, Plus).unwrap()
        );
    }

    #[test]
    fn alpha_beta_examples() {
        assert_eq!(alpha(7, 1, Plus, 5).unwrap(), pw(19, 2, Plus));
        let w = alpha(83, 1, Plus, 130).unwrap();
        let ctx = PrimeContext::new(83).unwrap();
        assert_eq!((w.x, w.k), (ctx.pth_power_lift(31), 35));
        assert!(alpha(7, 1, Plus, 6).is_err());

        assert_eq!(beta(7, 1, Plus, 19, 2).unwrap(), 5);
        assert_eq!(beta(7, 1, Plus, 31, 2).unwrap(), 17);
        assert_eq!((powmod(17, 17, 49) + powmod(16, 16, 49)) % 49, 0);
        assert!(beta(7, 1, Plus, 19, 3).is_err());
    }

    #[test]
    fn alpha_at_59_lands_on_a_consecutive_pair() {
        let eps = Sign::parity(257);
        assert!(d_eps_divisible(59, 257, 1, eps).unwrap());
        let w = alpha(59, 1, eps, 257).unwrap();
        let pairs = consecutive_pairs(59).unwrap();
        assert!(pairs.iter().any(|c| c.hi == w.x && c.lo == w.x - 1));
    }

    #[test]
    fn set_examples() {
        assert_eq!(b_set(7, 1, Plus).unwrap(), vec![pw(31, 2, Plus), pw(19, 2, Plus)]);
        assert_eq!(b_set(7, 1, Minus).unwrap(), vec![pw(31, 5, Minus), pw(19, 5, Minus)]);
        assert!(b_set(5, 1, Plus).unwrap().is_empty());
        assert_eq!(a_set(7, 1, Plus).unwrap().residues, vec![5, 17]);
        assert_eq!(a_set(7, 1, Minus).unwrap().residues, vec![26, 38]);
        assert!(a_set(83, 1, Plus).unwrap().contains(130));
    }

    #[test]
    fn membership_examples() {
        assert!(in_p_cons(7).unwrap());
        assert!(!in_p_cons(5).unwrap());
        assert!(in_p_cons(59).unwrap());
        for eps in [Plus, Minus] {
            let w = in_p(7, eps).unwrap().unwrap();
            assert!(d_eps_divisible(7, w.n, w.m, eps).unwrap());
            assert!(in_p(5, eps).unwrap().is_none());
        }
        assert!(!in_p_tilde(7).unwrap());
        assert!(in_p_tilde(59).unwrap());
        assert!(in_p_tilde(79).unwrap());
        assert!(in_p_tilde(1093).unwrap());
        let smallest: Vec<u64> = primes_up_to(80)
            .into_iter()
            .skip(1)
            .filter(|&p| in_p_tilde(p).unwrap())
            .collect();
        assert_eq!(smallest, vec![59, 79]);
    }

    #[test]
    fn sixth_root_examples() {
        let pairs = sixth_root_pairs(7).unwrap();
        let lo_hi: Vec<(u64, u64)> = pairs.iter().map(|c| (c.lo, c.hi)).collect();
        assert_eq!(lo_hi, vec![(30, 31), (18, 19)]);
        let ctx = PrimeContext::new(13).unwrap();
        for c in sixth_root_pairs(13).unwrap() {
            assert!(ctx.is_pth_power(c.lo) && ctx.is_pth_power(c.hi));
            assert_eq!((c.hi * c.hi + 169 - c.hi + 1) % 169, 0);
        }
        assert!(sixth_root_pairs(5).is_err());
        // the literal arithmetic exclusion: (17, 1) at p = 7 comes from x = 31
        assert!(d_eps_divisible(7, 17, 1, Plus).unwrap());
        assert!(!sixth_root_divisibility(7, 17, 1));
        assert!(sixth_root_divisibility(7, 5, 1) == ((25 - 5 + 1) == 0));
    }

    #[test]
    fn linear_congruence_solver() {
        assert_eq!(solve_linear(2, 4, 6), vec![2, 5]);
        assert_eq!(solve_linear(2, 3, 6), Vec::<u64>::new());
        assert_eq!(solve_linear(0, 0, 4), vec![1, 2, 3, 4]);
        assert_eq!(solve_linear(5, 0, 6), vec![6]);
    }

    #[test]
    fn round_trips_and_scan_agreement() {
        for p in primes_up_to(2000).into_iter().skip(1) {
            let ctx = PrimeContext::new(p).unwrap();
            for m in [1u64, 2, 3].into_iter().filter(|m| m % p != 0) {
                for eps in [Plus, Minus] {
                    let b = b_set(p, m, eps).unwrap();
                    if p < 400 {
                        assert_eq!(b, b_set_scan(p, m, eps).unwrap(), "p={p} m={m} eps={eps}");
                    }
                    for w in &b {
                        assert!(w.holds(&ctx));
                        assert!(ctx.is_pth_power((w.x + ctx.p2() - 1) % ctx.p2()));
                        let n = beta(p, m, eps, w.x, w.k).unwrap();
                        assert_eq!(alpha(p, m, eps, n).unwrap(), *w, "p={p}");
                    }
                    let a = a_set(p, m, eps).unwrap();
                    assert_eq!(a.len(), b.len());
                    for &n in &a.residues {
                        let w = alpha(p, m, eps, n).unwrap();
                        assert_eq!(beta(p, m, eps, w.x, w.k).unwrap(), n);
                    }
                }
            }
        }
    }

    #[test]
    fn bijection_pipeline_matches_brute_force() {
        for p in primes_up_to(300).into_iter().skip(1) {
            let ctx = PrimeContext::new(p).unwrap();
            for eps in [Plus, Minus] {
                let brute: Vec<u64> = (0..ctx.mod_order())
                    .filter(|&a| d_eps_divisible_ctx(&ctx, a, 1, eps))
                    .collect();
                assert_eq!(a_set(p, 1, eps).unwrap().residues, brute, "p={p} eps={eps}");
            }
        }
    }

    #[test]
    fn membership_equalities_up_to_2000() {
        for p in primes_up_to(2000).into_iter().skip(1) {
            let cons = in_p_cons(p).unwrap();
            let tilde = in_p_tilde(p).unwrap();
            for eps in [Plus, Minus] {
                let w = in_p(p, eps).unwrap();
                assert_eq!(w.is_some(), cons, "p={p}");
                if let Some(w) = w {
                    assert!(w.m % p != 0 && w.n > w.m);
                    assert!(d_eps_divisible(p, w.n, w.m, eps).unwrap());
                }
                let wt = in_p_tilde_witness(p, eps).unwrap();
                assert_eq!(wt.is_some(), tilde, "p={p}");
                if let Some(w) = wt {
                    assert!(d_eps_divisible(p, w.n, w.m, eps).unwrap());
                    assert!(!sixth_root_divisibility(p, w.n, w.m));
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_prime() -> impl Strategy<Value = u64> {
            prop::sample::select(primes_up_to(3000)[1..].to_vec())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn class_invariance(p in small_prime(), n in 2u64..1_000_000, m in 1u64..1_000) {
                prop_assume!(m % p != 0 && n > m);
                let l = p * (p - 1);
                for eps in [Plus, Minus] {
                    let base = d_eps_divisible(p, n, m, eps).unwrap();
                    prop_assert_eq!(base, d_eps_divisible(p, n + l, m, eps).unwrap());
                    prop_assert_eq!(base, d_eps_divisible(p, n + l, m + l, eps).unwrap());
                }
            }

            #[test]
            fn base_shift_invariance(p in small_prime(), n in 2u64..100_000, m in 1u64..1_000, l in 0u64..1_000_000) {
                prop_assume!(m % p != 0 && n > m);
                let p2 = p * p;
                let value = |r: u64| {
                    let a = powmod(r % p2, n, p2);
                    let b = mulmod(l % p2, powmod((r - m) % p2, n - m, p2), p2);
                    (a + b).is_multiple_of(p2)
                };
                prop_assert_eq!(value(n), value(n + p));
            }
        }
    }
}
