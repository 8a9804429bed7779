use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trinodisc_core::Sign;

mod commands;

#[derive(Parser)]
#[command(name = "trinodisc", version, about = "Square divisors of n^n ± (n-m)^(n-m) m^m and consecutive p-th powers mod p^2")]
struct Cli {
    /// Emit JSON instead of tab-separated lines.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute roots of f_p and C_p for every prime in [min, max), writing caches.
    Scan {
        #[arg(long, default_value_t = 3)]
        min: u64,
        #[arg(long)]
        max: u64,
        /// Worker threads; TRINODISC_WORKERS takes precedence.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        roots_cache: Option<PathBuf>,
        #[arg(long)]
        cp_cache: Option<PathBuf>,
        /// Keep records already present and compute only the rest.
        #[arg(long)]
        resume: bool,
        #[arg(long, default_value_t = trinodisc_core::scan::DEFAULT_BLOCK)]
        block: usize,
        /// Log one line per flushed block to stderr.
        #[arg(long)]
        progress: bool,
    },
    /// Roots of f_p mod p with their orbit decomposition.
    Roots {
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value_t = Method::Sieve)]
        method: Method,
    },
    /// Histogram of root counts against the Poisson prediction.
    Census {
        #[arg(long)]
        max: u64,
        #[arg(long)]
        roots_cache: PathBuf,
    },
    /// The exceptional set C_p, computed or summarized from a cache.
    Cp {
        #[arg(long, required_unless_present = "max")]
        prime: Option<u64>,
        /// Report the mean size of C_p over primes below this bound (needs --cp-cache).
        #[arg(long, requires = "cp_cache")]
        max: Option<u64>,
        #[arg(long)]
        cp_cache: Option<PathBuf>,
    },
    /// Pairs (a, b) in C_p x C_q agreeing modulo gcd(p(p-1), q(q-1)).
    Dpq {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// Inclusion-exclusion bounds for the density of S(max).
    Density {
        #[arg(long)]
        max: u64,
        #[arg(long)]
        cp_cache: PathBuf,
    },
    /// Heuristic interval for the density of squarefree n^n + (-1)^n (n-1)^(n-1).
    Estimate {
        #[arg(long)]
        max: u64,
        #[arg(long)]
        cp_cache: PathBuf,
    },
    /// n <= max-n whose value is divisible by p^2 for one of the first primes.
    Squarefree {
        #[arg(long)]
        max_n: u64,
        #[arg(long, default_value_t = 10_000)]
        prime_count: usize,
    },
    /// Sum of 1/(p(p-1)) over primes lo <= p < hi.
    Tailsum {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        /// Exact rational instead of double-double.
        #[arg(long)]
        exact: bool,
    },
    /// Whether p^2 divides n^n + eps (n-m)^(n-m) m^m.
    Verify {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true)]
        eps: Sign,
    },
    /// Map an exceptional n to its pair (x, k).
    Alpha {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true)]
        eps: Sign,
        #[arg(long)]
        n: u64,
    },
    /// Map a pair (x, k) back to n mod p(p-1).
    Beta {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true)]
        eps: Sign,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        k: u64,
    },
    /// Reducibility of x^n + a x^m + b with a, b = ±1.
    Classify {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true)]
        a: Sign,
        #[arg(long, allow_hyphen_values = true)]
        b: Sign,
    },
    /// Resultant of two integer polynomials, given as coefficient lists from the constant term up.
    Resultant {
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        f: Vec<i64>,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        g: Vec<i64>,
    },
    /// With n = 6k+2 and M = 12k^2+6k+1, check M^2 | n^n - (n-1)^(n-1).
    Strange {
        #[arg(long)]
        k: u64,
        /// Check every k from 1 up to this value instead.
        #[arg(long)]
        up_to: bool,
    },
    /// The abc triple built from n = 8^(7^k).
    Abc {
        #[arg(long)]
        k: u32,
    },
    /// Wieferich primes below a bound.
    Wieferich {
        #[arg(long)]
        max: u64,
    },
    /// Whether p^2 divides some D_eps(n, m), with a witness (n, m).
    Inp {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true)]
        eps: Sign,
    },
    /// Same question restricted to witnesses from sporadic roots of f_p.
    Inptilde {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true, default_value = "+1")]
        eps: Sign,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Method {
    Direct,
    Sieve,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(report) => {
            report.print(cli.json);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
