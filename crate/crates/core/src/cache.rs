//! Line-oriented cache files for per-prime scan results.
//!
//! ```text
//! #trinodisc-cache v1 roots
//! 7<TAB>4<TAB>0;2;4;6
//! #end 1
//! ```
//!
//! A file without the `#end` line is a partial cache left by an interrupted
//! scan; an unterminated last line is ignored.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::CpSet;
use crate::error::{Error, Result};

/// Roots of `f_p` for one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootsRecord {
    pub p: u64,
    pub roots: Vec<u64>,
}

pub trait Record: Sized {
    const KIND: &'static str;
    fn prime(&self) -> u64;
    fn to_line(&self) -> String;
    fn parse(line: &str) -> std::result::Result<Self, String>;
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

fn split_list(field: &str) -> std::result::Result<Vec<u64>, String> {
    if field.is_empty() {
        return Ok(Vec::new());
    }
    field
        .split(';')
        .map(|s| s.parse::<u64>().map_err(|e| format!("bad entry {s:?}: {e}")))
        .collect()
}

fn fields(line: &str) -> std::result::Result<(u64, u64, Vec<u64>), String> {
    let parts: Vec<&str> = line.split('\t').collect();
    let [p, second, list] = parts[..] else {
        return Err(format!("expected 3 tab-separated fields, found {}", parts.len()));
    };
    let p = p.parse().map_err(|e| format!("bad prime {p:?}: {e}"))?;
    let second = second.parse().map_err(|e| format!("bad field {second:?}: {e}"))?;
    Ok((p, second, split_list(list)?))
}

fn strictly_below(v: &[u64], bound: u64) -> bool {
    v.windows(2).all(|w| w[0] < w[1]) && v.last().is_none_or(|&x| x < bound)
}

impl Record for RootsRecord {
    const KIND: &'static str = "roots";

    fn prime(&self) -> u64 {
        self.p
    }

    fn to_line(&self) -> String {
        format!("{}\t{}\t{}", self.p, self.roots.len(), join(&self.roots))
    }

    fn parse(line: &str) -> std::result::Result<Self, String> {
        let (p, count, roots) = fields(line)?;
        if count != roots.len() as u64 {
            return Err(format!("count {count} but {} roots listed", roots.len()));
        }
        if !strictly_below(&roots, p) {
            return Err("roots must be strictly ascending and below p".into());
        }
        Ok(RootsRecord { p, roots })
    }
}

impl Record for CpSet {
    const KIND: &'static str = "cp";

    fn prime(&self) -> u64 {
        self.p
    }

    fn to_line(&self) -> String {
        format!("{}\t{}\t{}", self.p, self.modulus(), join(&self.residues))
    }

    fn parse(line: &str) -> std::result::Result<Self, String> {
        let (p, modulus, residues) = fields(line)?;
        if p < 2 || p.checked_mul(p - 1) != Some(modulus) {
            return Err(format!("modulus {modulus} is not p(p-1) for p = {p}"));
        }
        if !strictly_below(&residues, modulus) {
            return Err("residues must be strictly ascending and below the modulus".into());
        }
        Ok(CpSet { p, residues })
    }
}

pub fn header<R: Record>() -> String {
    format!("#trinodisc-cache v1 {}", R::KIND)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheContents<R> {
    pub records: Vec<R>,
    /// The file ended with a matching `#end` line.
    pub finalized: bool,
}

pub fn read_cache<R: Record>(path: &Path) -> Result<CacheContents<R>> {
    let text = fs::read_to_string(path)?;
    parse_cache(&text, &path.display().to_string())
}

pub fn parse_cache<R: Record>(text: &str, path: &str) -> Result<CacheContents<R>> {
    let corrupt = |line: usize, detail: String| Error::CacheCorrupt {
        path: path.to_string(),
        line,
        detail,
    };
    // drop an unterminated trailing line unless it is the end marker
    let body = match text.rfind('\n') {
        Some(i) if i + 1 < text.len() && !text[i + 1..].starts_with("#end ") => &text[..=i],
        None if !text.is_empty() => "",
        _ => text,
    };
    let mut lines = body.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == header::<R>() => {}
        Some((_, h)) => return Err(corrupt(1, format!("expected header {:?}, found {h:?}", header::<R>()))),
        None => return Ok(CacheContents { records: Vec::new(), finalized: false }),
    }
    let mut records: Vec<R> = Vec::new();
    let mut finalized = false;
    for (i, line) in lines {
        let lineno = i + 1;
        if finalized {
            return Err(corrupt(lineno, "content after #end".into()));
        }
        if let Some(n) = line.strip_prefix("#end ") {
            let n: usize = n.parse().map_err(|_| corrupt(lineno, format!("bad record count {n:?}")))?;
            if n != records.len() {
                return Err(corrupt(lineno, format!("#end says {n} records, file has {}", records.len())));
            }
            finalized = true;
            continue;
        }
        let rec = R::parse(line).map_err(|d| corrupt(lineno, d))?;
        if let Some(prev) = records.last() {
            if prev.prime() >= rec.prime() {
                return Err(corrupt(lineno, format!("prime {} out of order after {}", rec.prime(), prev.prime())));
            }
        }
        records.push(rec);
    }
    Ok(CacheContents { records, finalized })
}

pub fn render_cache<R: Record>(records: &[R], finalized: bool) -> String {
    let mut s = header::<R>();
    s.push('\n');
    for r in records {
        s.push_str(&r.to_line());
        s.push('\n');
    }
    if finalized {
        s.push_str(&format!("#end {}\n", records.len()));
    }
    s
}

/// Writes through a temporary file in the same directory and renames it over `path`.
pub fn write_cache<R: Record>(path: &Path, records: &[R], finalized: bool) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(e) => format!("{}.tmp", e.to_string_lossy()),
        None => "tmp".into(),
    });
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(render_cache(records, finalized).as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Appends records to a partial cache.
pub(crate) struct Appender {
    file: fs::File,
}

impl Appender {
    pub(crate) fn open(path: &Path) -> Result<Self> {
        Ok(Appender {
            file: fs::OpenOptions::new().append(true).open(path)?,
        })
    }

    pub(crate) fn append<R: Record>(&mut self, records: &[R]) -> Result<()> {
        let mut buf = String::new();
        for r in records {
            buf.push_str(&r.to_line());
            buf.push('\n');
        }
        self.file.write_all(buf.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}
