//! Parallel per-prime scan producing roots and `C_p` caches.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::time::{Duration, Instant};

use crate::cache::{read_cache, write_cache, Appender, RootsRecord};
use crate::density::{cp_from_roots, CpSet};
use crate::error::{Error, Result};
use crate::modarith::primes::primes_in_range;
use crate::modarith::{PrimeContext, SpfSieve, MAX_PRIME};
use crate::roots::fp_roots_sieve;

pub const DEFAULT_BLOCK: usize = 4096;

/// Progress after each flushed block.
#[derive(Clone, Copy, Debug)]
pub struct Progress {
    pub done: usize,
    pub total: usize,
    pub last_prime: u64,
}

pub struct ScanConfig {
    pub min_p: u64,
    pub max_p: u64,
    pub workers: usize,
    pub roots_path: Option<PathBuf>,
    pub cp_path: Option<PathBuf>,
    pub resume: bool,
    pub block: usize,
    pub cancel: Option<Arc<AtomicBool>>,
    pub on_block: Option<Box<dyn Fn(Progress) + Send + Sync>>,
}

impl ScanConfig {
    pub fn new(min_p: u64, max_p: u64) -> Self {
        ScanConfig {
            min_p,
            max_p,
            workers: 1,
            roots_path: None,
            cp_path: None,
            resume: false,
            block: DEFAULT_BLOCK,
            cancel: None,
            on_block: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanSummary {
    pub primes: usize,
    /// Primes computed in this run (the rest came from a resumed cache).
    pub computed: usize,
    pub nonempty_cp: usize,
    pub elapsed: Duration,
}

pub struct ScanOutput {
    pub summary: ScanSummary,
    pub roots: Vec<RootsRecord>,
    pub cps: Vec<CpSet>,
}

/// Roots of `f_p` (sieve method) and `C_p` for one odd prime.
pub fn scan_prime(p: u64, spf: &SpfSieve) -> (RootsRecord, CpSet) {
    let ctx = PrimeContext::from_known_prime(p);
    let roots = fp_roots_sieve(ctx, spf);
    let cp = cp_from_roots(&ctx, &roots);
    (RootsRecord { p, roots }, cp)
}

fn check(cfg: &ScanConfig) -> Result<()> {
    if cfg.min_p < 3 || cfg.min_p >= cfg.max_p || cfg.max_p >= MAX_PRIME {
        return Err(Error::InvalidArgument(format!(
            "scan range [{}, {}) needs 3 <= min < max < 2^31",
            cfg.min_p, cfg.max_p
        )));
    }
    if cfg.workers == 0 || cfg.block == 0 {
        return Err(Error::InvalidArgument("workers and block size must be positive".into()));
    }
    Ok(())
}

/// Longest prefix of `primes` present, in order, in the cache at `path`.
fn resumable<R: crate::cache::Record + Clone>(path: &Option<PathBuf>, primes: &[u64]) -> Result<Option<Vec<R>>> {
    let Some(path) = path else { return Ok(None) };
    if !path.exists() {
        return Ok(Some(Vec::new()));
    }
    let c = read_cache::<R>(path)?;
    let mut recs: Vec<R> = c.records.into_iter().filter(|r| r.prime() >= primes.first().copied().unwrap_or(0)).collect();
    let n = recs.iter().zip(primes).take_while(|(r, &p)| r.prime() == p).count();
    recs.truncate(n);
    Ok(Some(recs))
}

pub fn scan(cfg: &ScanConfig) -> Result<ScanOutput> {
    check(cfg)?;
    let start = Instant::now();
    let primes = primes_in_range(cfg.min_p, cfg.max_p);
    let mut roots: Vec<RootsRecord> = Vec::new();
    let mut cps: Vec<CpSet> = Vec::new();
    let mut done = 0;
    if cfg.resume {
        let r = resumable::<RootsRecord>(&cfg.roots_path, &primes)?;
        let c = resumable::<CpSet>(&cfg.cp_path, &primes)?;
        done = match (&r, &c) {
            (Some(r), Some(c)) => r.len().min(c.len()),
            (Some(r), None) => r.len(),
            (None, Some(c)) => c.len(),
            (None, None) => 0,
        };
        // a record in only one file has to be recomputed for the other anyway
        if let Some(c) = c {
            cps = c;
            cps.truncate(done);
        }
        if let Some(r) = r {
            roots = r;
            roots.truncate(done);
        }
        let needs_both = cfg.roots_path.is_none() || cfg.cp_path.is_none();
        if needs_both && done > 0 {
            // only one file kept: recompute the missing side for the prefix
            let spf = SpfSieve::new(primes[done - 1] as u32);
            if roots.is_empty() {
                roots = primes[..done].iter().map(|&p| scan_prime(p, &spf).0).collect();
            }
            if cps.is_empty() {
                cps = primes[..done].iter().map(|&p| scan_prime(p, &spf).1).collect();
            }
        }
    }
    if let Some(path) = &cfg.roots_path {
        write_cache(path, &roots, false)?;
    }
    if let Some(path) = &cfg.cp_path {
        write_cache(path, &cps, false)?;
    }
    let computed = primes.len() - done;
    run_blocks(cfg, &primes[done..], &mut roots, &mut cps)?;
    if let Some(path) = &cfg.roots_path {
        write_cache(path, &roots, true)?;
    }
    if let Some(path) = &cfg.cp_path {
        write_cache(path, &cps, true)?;
    }
    let summary = ScanSummary {
        primes: primes.len(),
        computed,
        nonempty_cp: cps.iter().filter(|c| !c.is_empty()).count(),
        elapsed: start.elapsed(),
    };
    Ok(ScanOutput { summary, roots, cps })
}

type BlockResult = (usize, Vec<(RootsRecord, CpSet)>);

fn run_blocks(cfg: &ScanConfig, todo: &[u64], roots: &mut Vec<RootsRecord>, cps: &mut Vec<CpSet>) -> Result<()> {
    if todo.is_empty() {
        return Ok(());
    }
    let total = roots.len() + todo.len();
    let spf = SpfSieve::new(*todo.last().unwrap() as u32);
    let blocks: Vec<&[u64]> = todo.chunks(cfg.block).collect();
    let next = AtomicUsize::new(0);
    let never = AtomicBool::new(false);
    let cancel: &AtomicBool = cfg.cancel.as_deref().unwrap_or(&never);
    let mut roots_out = cfg.roots_path.as_deref().map(Appender::open).transpose()?;
    let mut cp_out = cfg.cp_path.as_deref().map(Appender::open).transpose()?;
    let (tx, rx) = mpsc::channel::<BlockResult>();
    std::thread::scope(|s| -> Result<()> {
        for _ in 0..cfg.workers.min(blocks.len()) {
            let tx = tx.clone();
            let (blocks, next, spf) = (&blocks, &next, &spf);
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(block) = blocks.get(i) else { return };
                let mut out = Vec::with_capacity(block.len());
                for &p in *block {
                    if cancel.load(Ordering::Relaxed) {
                        return;
                    }
                    out.push(scan_prime(p, spf));
                }
                if tx.send((i, out)).is_err() {
                    return;
                }
            });
        }
        drop(tx);
        // sole writer: flush finished blocks in ascending order
        let mut pending = BTreeMap::new();
        let mut want = 0;
        for (i, recs) in rx {
            pending.insert(i, recs);
            while let Some(recs) = pending.remove(&want) {
                let (r, c): (Vec<RootsRecord>, Vec<CpSet>) = recs.into_iter().unzip();
                if let Some(a) = roots_out.as_mut() {
                    a.append(&r)?;
                }
                if let Some(a) = cp_out.as_mut() {
                    a.append(&c)?;
                }
                roots.extend(r);
                cps.extend(c);
                want += 1;
                if let Some(cb) = &cfg.on_block {
                    cb(Progress { done: roots.len(), total, last_prime: roots.last().map_or(0, |r| r.p) });
                }
            }
        }
        Ok(())
    })?;
    if roots.len() < total {
        return Err(Error::Interrupted { completed: roots.len() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::build_cp;
    use crate::roots::{fp_roots, RootMethod};

    fn paths(dir: &std::path::Path) -> (PathBuf, PathBuf) {
        (dir.join("roots.tsv"), dir.join("cp.tsv"))
    }

    fn cfg(min: u64, max: u64, dir: &std::path::Path) -> ScanConfig {
        let (r, c) = paths(dir);
        ScanConfig { roots_path: Some(r), cp_path: Some(c), ..ScanConfig::new(min, max) }
    }

    #[test]
    fn small_scans() {
        let dir = tempfile::tempdir().unwrap();
        let out = scan(&cfg(3, 100, dir.path())).unwrap();
        assert_eq!(out.summary.primes, 24);
        let r59 = out.roots.iter().find(|r| r.p == 59).unwrap();
        assert_eq!(r59.roots.len(), 14);
        for p in [59, 83] {
            let c = out.cps.iter().find(|c| c.p == p).unwrap();
            assert!(!c.is_empty());
            assert_eq!(c, &build_cp(p).unwrap());
        }
        for r in &out.roots {
            assert_eq!(r.roots, fp_roots(r.p, RootMethod::Direct).unwrap());
        }
        let out = scan(&cfg(3, 10, dir.path())).unwrap();
        assert_eq!(out.roots.iter().map(|r| r.p).collect::<Vec<_>>(), [3, 5, 7]);
        assert_eq!(out.summary.nonempty_cp, 0);
        let text = std::fs::read_to_string(dir.path().join("cp.tsv")).unwrap();
        assert_eq!(text, "#trinodisc-cache v1 cp\n3\t6\t\n5\t20\t\n7\t42\t\n#end 3\n");
        assert!(scan(&ScanConfig::new(10, 10)).is_err());
    }

    fn finalized_bytes(dir: &std::path::Path) -> (Vec<u8>, Vec<u8>) {
        let (r, c) = paths(dir);
        (std::fs::read(r).unwrap(), std::fs::read(c).unwrap())
    }

    #[test]
    fn worker_count_and_resume_do_not_change_output() {
        let a = tempfile::tempdir().unwrap();
        scan(&ScanConfig { block: 50, ..cfg(3, 6000, a.path()) }).unwrap();
        let reference = finalized_bytes(a.path());

        let b = tempfile::tempdir().unwrap();
        scan(&ScanConfig { block: 37, workers: 3, ..cfg(3, 6000, b.path()) }).unwrap();
        assert_eq!(finalized_bytes(b.path()), reference);

        // interrupt after the second flushed block, then resume
        let c = tempfile::tempdir().unwrap();
        let flag = Arc::new(AtomicBool::new(false));
        let f2 = flag.clone();
        let res = scan(&ScanConfig {
            block: 50,
            cancel: Some(flag),
            on_block: Some(Box::new(move |pr| {
                if pr.done >= 100 {
                    f2.store(true, Ordering::Relaxed);
                }
            })),
            ..cfg(3, 6000, c.path())
        });
        let Err(Error::Interrupted { completed }) = res else { panic!("expected interruption") };
        assert!((100..783).contains(&completed));
        let out = scan(&ScanConfig { resume: true, workers: 2, ..cfg(3, 6000, c.path()) }).unwrap();
        assert_eq!(out.summary.computed, out.summary.primes - completed);
        assert_eq!(finalized_bytes(c.path()), reference);

        // prefix-truncated caches at a record boundary, including mismatched lengths
        let (r, cp) = paths(c.path());
        let rt = std::fs::read_to_string(&r).unwrap();
        let ct = std::fs::read_to_string(&cp).unwrap();
        std::fs::write(&r, rt.lines().take(301).map(|l| format!("{l}\n")).collect::<String>()).unwrap();
        std::fs::write(&cp, ct.lines().take(120).map(|l| format!("{l}\n")).collect::<String>() + "41\t16").unwrap();
        let out = scan(&ScanConfig { resume: true, ..cfg(3, 6000, c.path()) }).unwrap();
        assert_eq!(out.summary.computed, out.summary.primes - 119);
        assert_eq!(finalized_bytes(c.path()), reference);
    }

    #[test]
    fn corrupt_cache_stops_resume() {
        let dir = tempfile::tempdir().unwrap();
        let (r, _) = paths(dir.path());
        std::fs::write(&r, "#trinodisc-cache v1 roots\n3\tx\t0\n").unwrap();
        assert!(matches!(
            scan(&ScanConfig { resume: true, ..cfg(3, 100, dir.path()) }),
            Err(Error::CacheCorrupt { line: 2, .. })
        ));
    }
}
