use std::io::Write;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use serde_json::{json, Value};
use trinodisc_core::cache::{read_cache, RootsRecord};
use trinodisc_core::correspondence::{self as corr, DivisibilityWitness};
use trinodisc_core::density::{self, CpSet};
use trinodisc_core::roots::{self, RootMethod};
use trinodisc_core::scan::{scan, ScanConfig};
use trinodisc_core::trinomials::{self, resultant, IntPoly, Verdict};
use trinodisc_core::{Error, Result};

use crate::{Command, Method};

/// Output of one subcommand: TSV lines and the equivalent JSON value.
pub struct Report {
    lines: Vec<String>,
    json: Value,
}

impl Report {
    fn new(lines: Vec<String>, json: Value) -> Self {
        Report { lines, json }
    }

    fn single(line: impl ToString, json: Value) -> Self {
        Report { lines: vec![line.to_string()], json }
    }

    /// Write errors (a closed pipe, say) end output silently.
    pub fn print(&self, as_json: bool) {
        let mut out = std::io::stdout().lock();
        let _ = if as_json {
            writeln!(out, "{}", serde_json::to_string_pretty(&self.json).expect("serializable"))
        } else {
            self.lines.iter().try_for_each(|l| writeln!(out, "{l}"))
        };
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn workers(flag: Option<usize>) -> Result<usize> {
    if let Ok(v) = std::env::var("TRINODISC_WORKERS") {
        return v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("TRINODISC_WORKERS={v:?} is not a positive integer")));
    }
    Ok(flag.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

fn load_cps(path: &std::path::Path) -> Result<Vec<CpSet>> {
    Ok(read_cache::<CpSet>(path)?.records)
}

fn witness_json(w: &Option<DivisibilityWitness>) -> Value {
    match w {
        Some(w) => json!({"member": true, "n": w.n, "m": w.m, "eps": w.eps.to_string()}),
        None => json!({"member": false}),
    }
}

fn witness_line(w: &Option<DivisibilityWitness>) -> String {
    match w {
        Some(w) => format!("true\t{}\t{}\t{}", w.n, w.m, w.eps),
        None => "false".into(),
    }
}

pub fn run(cmd: Command) -> Result<Report> {
    Ok(match cmd {
        Command::Scan { min, max, workers: w, roots_cache, cp_cache, resume, block, progress } => {
            let cfg = ScanConfig {
                workers: workers(w)?,
                roots_path: roots_cache,
                cp_path: cp_cache,
                resume,
                block,
                cancel: Some(Arc::new(AtomicBool::new(false))),
                on_block: progress.then(|| {
                    Box::new(|p: trinodisc_core::scan::Progress| {
                        eprintln!("{}/{} primes, last {}", p.done, p.total, p.last_prime)
                    }) as Box<dyn Fn(_) + Send + Sync>
                }),
                ..ScanConfig::new(min, max)
            };
            let s = scan(&cfg)?.summary;
            let secs = s.elapsed.as_secs_f64();
            Report::new(
                vec![
                    format!("primes\t{}", s.primes),
                    format!("computed\t{}", s.computed),
                    format!("nonempty_cp\t{}", s.nonempty_cp),
                    format!("seconds\t{secs:.3}"),
                ],
                json!({"primes": s.primes, "computed": s.computed, "nonempty_cp": s.nonempty_cp, "seconds": secs}),
            )
        }
        Command::Roots { prime, method } => {
            let method = match method {
                Method::Direct => RootMethod::Direct,
                Method::Sieve => RootMethod::Sieve,
            };
            let rs = roots::fp_roots(prime, method)?;
            let c = roots::classify_roots(prime, &rs)?;
            let six: Vec<String> = c
                .sixpacks
                .iter()
                .map(|s| join(s))
                .collect();
            Report::new(
                vec![
                    format!("roots\t{}", join(&rs)),
                    format!("count\t{}", rs.len()),
                    format!("cyclotomic\t{}", join(&c.cyclotomic)),
                    format!("wieferich\t{}", join(&c.wieferich)),
                    format!("sixpacks\t{}", six.join(";")),
                ],
                json!({
                    "p": prime,
                    "roots": rs,
                    "counts": {"trivial": c.counts.trivial, "cyclotomic": c.counts.cyclotomic,
                               "wieferich": c.counts.wieferich, "sixpacks": c.counts.sixpacks},
                    "cyclotomic": c.cyclotomic,
                    "wieferich": c.wieferich,
                    "sixpacks": c.sixpacks,
                }),
            )
        }
        Command::Census { max, roots_cache } => {
            let recs: Vec<RootsRecord> = read_cache(&roots_cache)?.records;
            let counts: Vec<(u64, usize)> = recs.iter().map(|r| (r.p, r.roots.len())).collect();
            let c = density::census(max, &counts)?;
            let mut lines = vec!["m\tactual\tpredicted\tsd\tnote".to_string()];
            let mut rows = Vec::new();
            for r in &c.rows {
                let note = if r.exempt { "wieferich" } else { "" };
                lines.push(format!("{}\t{}\t{:.1}\t{:.1}\t{note}", r.label(), r.actual, r.predicted, r.sd));
                rows.push(json!({"m": r.label(), "actual": r.actual, "predicted": r.predicted, "sd": r.sd, "exempt": r.exempt}));
            }
            lines.push(format!("total\t{}", c.primes));
            Report::new(lines, json!({"x": max, "primes": c.primes, "rows": rows}))
        }
        Command::Cp { prime, max, cp_cache } => match (prime, max) {
            (Some(p), _) => {
                let c = match &cp_cache {
                    Some(path) => load_cps(path)?
                        .into_iter()
                        .find(|c| c.p == p)
                        .ok_or(Error::IncompleteCache(p))?,
                    None => density::build_cp(p)?,
                };
                Report::single(
                    format!("{}\t{}\t{}", c.p, c.modulus(), join(&c.residues)),
                    json!({"p": c.p, "modulus": c.modulus(), "residues": c.residues}),
                )
            }
            (None, Some(x)) => {
                let cps = load_cps(cp_cache.as_deref().expect("required by clap"))?;
                let s = density::cp_average(x, &cps)?;
                Report::new(
                    vec![
                        format!("primes\t{}", s.primes),
                        format!("total\t{}", s.total),
                        format!("mean\t{:.6}", s.mean),
                        format!("std_error\t{:.6}", s.std_error),
                    ],
                    json!({"primes": s.primes, "total": s.total, "mean": s.mean, "std_error": s.std_error}),
                )
            }
            (None, None) => unreachable!("clap requires one of --prime, --max"),
        },
        Command::Dpq { p, q } => {
            let d = density::build_dpq(&density::build_cp(p)?, &density::build_cp(q)?);
            let lines = d.pairs.iter().map(|(a, b)| format!("{a}\t{b}")).collect();
            Report::new(
                lines,
                json!({"p": p, "q": q, "modulus": d.modulus().to_string(), "pairs": d.pairs}),
            )
        }
        Command::Density { max, cp_cache } => {
            let b = density::ie_bounds(max, &load_cps(&cp_cache)?)?;
            Report::new(
                vec![
                    format!("lower\t{}", b.lower_decimal()),
                    format!("upper\t{}", b.upper_decimal()),
                    format!("triple_correction\t{}", b.triple_decimal()),
                    format!("exact\t{}", b.exact),
                    format!("nonempty_sets\t{}", b.nonempty_sets),
                    format!("intersecting_pairs\t{}", b.intersecting_pairs),
                ],
                json!({
                    "x": max,
                    "lower": b.lower_decimal(),
                    "upper": b.upper_decimal(),
                    "triple_correction": b.triple_decimal(),
                    "exact": b.exact,
                    "nonempty_sets": b.nonempty_sets,
                    "intersecting_pairs": b.intersecting_pairs,
                }),
            )
        }
        Command::Estimate { max, cp_cache } => {
            let e = density::density_estimate(max, &load_cps(&cp_cache)?)?;
            Report::new(
                vec![
                    format!("lower\t{}", e.reported_text.0),
                    format!("upper\t{}", e.reported_text.1),
                    format!("unrounded_lower\t{:.10}", e.unrounded.0),
                    format!("unrounded_upper\t{:.10}", e.unrounded.1),
                    format!("tail\t{:.6e}", e.tail),
                    format!("tail_upper\t{:.6e}", e.tail_upper),
                ],
                json!({
                    "lower": e.reported_text.0, "upper": e.reported_text.1,
                    "unrounded": [e.unrounded.0, e.unrounded.1],
                    "tail": e.tail, "tail_upper": e.tail_upper,
                }),
            )
        }
        Command::Squarefree { max_n, prime_count } => {
            let hits = density::squarefree_scan(max_n, prime_count)?;
            Report::new(
                hits.iter().map(|(n, p)| format!("{n}\t{p}")).collect(),
                json!(hits.iter().map(|(n, p)| json!({"n": n, "p": p})).collect::<Vec<_>>()),
            )
        }
        Command::Tailsum { lo, hi, exact } => {
            if exact {
                let r = density::tail_sum_exact(lo, hi)?;
                Report::single(&r, json!({"value": r.to_string()}))
            } else {
                let v = density::tail_sum(lo, hi)?;
                let text = density::exact::render_significant(&v.to_rational(), 30, false);
                Report::single(&text, json!({"value": text, "hi": v.hi, "lo": v.lo}))
            }
        }
        Command::Verify { prime, n, m, eps } => {
            let v = corr::d_eps_divisible(prime, n, m, eps)?;
            Report::single(v, json!(v))
        }
        Command::Alpha { prime, m, eps, n } => {
            let w = corr::alpha(prime, m, eps, n)?;
            Report::single(format!("{}\t{}", w.x, w.k), json!({"x": w.x, "k": w.k}))
        }
        Command::Beta { prime, m, eps, x, k } => {
            let n = corr::beta(prime, m, eps, x, k)?;
            Report::single(n, json!({"n": n, "modulus": prime * (prime - 1)}))
        }
        Command::Classify { n, m, a, b } => {
            let c = trinomials::ljunggren_classify(n, m, a, b)?;
            let f = c.trinomial().to_string();
            match (&c.verdict, c.factor(), c.cofactor()) {
                (Verdict::CyclotomicFactor { .. }, Some(g), Some(h)) => Report::new(
                    vec![format!("reducible\t{f}\t{g}\t{h}")],
                    json!({"trinomial": f, "reducible": true, "factor": g.to_string(), "cofactor": h.to_string()}),
                ),
                _ => Report::single(
                    format!("irreducible\t{f}"),
                    json!({"trinomial": f, "reducible": false}),
                ),
            }
        }
        Command::Resultant { f, g } => {
            let (f, g) = (IntPoly::from_i64(&f), IntPoly::from_i64(&g));
            if f.is_zero() || g.is_zero() {
                return Err(Error::InvalidArgument("polynomials must be nonzero".into()));
            }
            let r = resultant(&f, &g);
            Report::single(&r, json!({"f": f.to_string(), "g": g.to_string(), "resultant": r.to_string()}))
        }
        Command::Strange { k, up_to } => {
            if up_to {
                let bad: Vec<u64> = (1..=k).filter(|&j| !trinomials::strange_divisibility_check(j)).collect();
                Report::single(bad.is_empty(), json!({"up_to": k, "all_hold": bad.is_empty(), "failures": bad}))
            } else {
                let v = trinomials::strange_divisibility_check(k);
                Report::single(v, json!(v))
            }
        }
        Command::Abc { k } => {
            let r = trinomials::abc_report(k)?;
            let sq = r.square_divides_b.map_or("unchecked".to_string(), |b| b.to_string());
            Report::new(
                vec![
                    format!("k\t{}", r.k),
                    format!("n_log2\t{}", r.n_log2),
                    format!("seven_power\t{}", r.seven_power),
                    format!("square_divides_b\t{sq}"),
                    format!("ln_ln_c\t{:.6}", r.ln_ln_c),
                    format!("bound_log_ratio\t{:.6}", r.bound_log_ratio),
                    format!("note\t{}", r.note),
                ],
                json!({
                    "k": r.k, "n": r.n.as_ref().map(|n| n.to_string()), "n_log2": r.n_log2,
                    "seven_power": r.seven_power, "square_divides_b": r.square_divides_b,
                    "ln_ln_c": r.ln_ln_c, "bound_log_ratio": r.bound_log_ratio, "note": r.note,
                }),
            )
        }
        Command::Wieferich { max } => {
            let ps: Vec<u64> = trinodisc_core::modarith::primes::primes_up_to(max.saturating_sub(1))
                .into_iter()
                .filter(|&p| p > 2 && roots::is_wieferich(p))
                .collect();
            Report::new(ps.iter().map(u64::to_string).collect(), json!(ps))
        }
        Command::Inp { prime, eps } => {
            let w = corr::in_p(prime, eps)?;
            Report::single(witness_line(&w), witness_json(&w))
        }
        Command::Inptilde { prime, eps } => {
            let w = corr::in_p_tilde_witness(prime, eps)?;
            Report::single(witness_line(&w), witness_json(&w))
        }
    })
}
