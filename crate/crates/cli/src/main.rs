use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chebrisk_cli::{
    cmd_approximate, cmd_eval, cmd_mc, cmd_table1, exit_code, resolve_cache_dir, DegreeChoice,
};

/// Certified risk bounds for polynomial level-set regions: offline
/// indicator certificates, online moment contraction.
#[derive(Parser)]
#[command(name = "chebrisk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an interval indicator certificate and store it in the cache.
    Approximate {
        /// Target interval as "l,u" inside [-1, 1].
        #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
        target: (f64, f64),
        /// Approximate the complement of the target instead.
        #[arg(long)]
        complement: bool,
        #[arg(long)]
        degree: usize,
        /// Certificate cache directory (or CHEBRISK_CACHE).
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Re-solve and overwrite any cached certificate.
        #[arg(long)]
        refresh: bool,
        /// Dump the assembled program in sparse triplet form.
        #[arg(long)]
        dump_sdp: Option<PathBuf>,
    },
    /// Compute risk bounds for a problem file.
    Eval {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Certificate degree: a number, or "auto" to grow until the
        /// moment validity degree or a time budget binds. Defaults to the
        /// degree in the problem file.
        #[arg(long)]
        degree: Option<String>,
        /// Solve certificates that are not in the cache.
        #[arg(long)]
        solve_missing: bool,
        /// Append a CSV row to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the true risk.
    Mc {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        /// Sampling seed; omitting it uses the fixed default so runs stay
        /// reproducible.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Reproduce the moving-hole bounds table across degrees.
    Table1 {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected \"l,u\"".into());
    }
    let l: f64 = parts[0].trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let u: f64 = parts[1].trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if !(-1.0..=1.0).contains(&l) || !(-1.0..=1.0).contains(&u) || l > u {
        return Err("need -1 <= l <= u <= 1".into());
    }
    Ok((l, u))
}

fn run(cli: Cli) -> chebrisk_core::Result<()> {
    match cli.command {
        Command::Approximate { target, complement, degree, cache, refresh, dump_sdp } => {
            let dir = resolve_cache_dir(cache);
            let report =
                cmd_approximate(target, complement, degree, &dir, dump_sdp.as_deref(), refresh)?;
            println!(
                "certificate {} degree={} objective={:.6} grid_violation={:.2e} {} in {:.2}s",
                report.key,
                report.degree,
                report.objective,
                report.grid_violation,
                if report.cached { "loaded from cache" } else { "solved" },
                report.seconds
            );
        }
        Command::Eval { problem, cache, degree, solve_missing, csv } => {
            let dir = resolve_cache_dir(cache);
            let choice = match degree.as_deref() {
                None => DegreeChoice::FromFile,
                Some("auto") => DegreeChoice::Auto,
                Some(s) => DegreeChoice::Fixed(
                    s.parse()
                        .map_err(|e| chebrisk_core::Error::InvalidProblem(format!("bad degree: {e}")))?,
                ),
            };
            let report = cmd_eval(&problem, &dir, choice, solve_missing, csv.as_deref())?;
            let b = &report.bounds;
            println!(
                "p_l={:.6} p_u={:.6} d_used={} validity_degree={} offline_s={:.3} online_s={:.6}",
                b.lower, b.upper, b.degree_used, b.validity_degree, b.offline_seconds, b.online_seconds
            );
            if b.lower_is_trivial {
                println!("note: multiple constraints, upper bound only (lower reported as 0)");
            }
            if b.clamped {
                println!("note: raw bounds [{:.6}, {:.6}] clamped to [0, 1]", b.raw_lower, b.raw_upper);
            }
        }
        Command::Mc { problem, samples, seed, csv } => {
            let report = cmd_mc(&problem, samples, seed, csv.as_deref())?;
            println!(
                "estimate={:.6} ci_halfwidth={:.6} n={} seed={} in {:.2}s",
                report.estimate.estimate,
                report.estimate.ci_halfwidth,
                report.estimate.n,
                report.estimate.seed,
                report.seconds
            );
        }
        Command::Table1 { out, cache } => {
            let dir = resolve_cache_dir(cache);
            let report = cmd_table1(&out, &dir)?;
            println!("d,p_u,p_l,ref_p_u,ref_p_l");
            for r in &report.rows {
                println!(
                    "{},{:.4},{:.4},{:.3},{:.3}",
                    r.degree, r.p_u, r.p_l, r.ref_p_u, r.ref_p_l
                );
            }
            println!("wrote {} in {:.1}s", out.display(), report.seconds);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
