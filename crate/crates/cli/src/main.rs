use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use minkbill::bench::{self, BenchConfig};
use minkbill::generate::generate_instance;
use minkbill::report::{self, Phases, RunReport};
use minkbill::verify::{self, brute_force_min, oracle_tolerance};
use minkbill::{obtuse, plot, tol, ConvexPolytope2, Parallelism, SearchOptions};

#[derive(Parser)]
#[command(
    name = "minkbill",
    version,
    about = "Shortest closed Minkowski billiard trajectories on convex polygons"
)]
struct Cli {
    /// Worker threads for the parallel searches (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Search {
    /// Table body K (polygon JSON).
    k: PathBuf,
    /// Body T defining the length (polygon JSON).
    t: PathBuf,
    /// Directions sampled per vertex normal cone of T.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u16).range(1..))]
    samples: u16,
    /// Certification threshold on the residuals.
    #[arg(long, default_value_t = tol::CERT, value_parser = positive)]
    tol: f64,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
}

impl Search {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            samples: self.samples as usize,
            parallelism: if self.sequential {
                Parallelism::Sequential
            } else {
                Parallelism::Parallel
            },
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Both searches, certification and the global minimum.
    Shortest(Search),
    /// Two-bounce search only.
    TwoBounce(Search),
    /// Three-bounce search only.
    ThreeBounce(Search),
    /// Re-certify every candidate of a report; optionally compare with the grid oracle.
    Verify {
        report: PathBuf,
        #[arg(long, default_value_t = tol::CERT, value_parser = positive)]
        tol: f64,
        /// Boundary points per edge of K for the brute-force oracle.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Random instance: writes K.json and T.json.
    Gen {
        nk: usize,
        nt: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short, default_value = ".")]
        out: PathBuf,
    },
    /// Timing table over random instances.
    Bench {
        /// Comma-separated `NKxNT` pairs; default is the three-block grid 5..=25 step 5.
        #[arg(long, value_delimiter = ',', value_parser = size_pair)]
        sizes: Vec<(usize, usize)>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        instances: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u16).range(1..))]
        samples: u16,
        #[arg(long)]
        sequential: bool,
        /// Emit rows as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// SVG of a report's winning pair.
    Plot {
        report: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Three-bounce existence in a triangle, by search and by the quarter-turn test.
    Obtuse {
        triangle: PathBuf,
        t: PathBuf,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u16).range(1..))]
        samples: u16,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("must be a positive finite number".into())
    }
}

fn size_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NKxNT, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    let (a, b) = (parse(a)?, parse(b)?);
    if a < 3 || b < 3 {
        return Err(format!("vertex counts must be at least 3, got {s}"));
    }
    Ok((a, b))
}

/// Input that failed to parse or validate; exits with code 2.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())).into())
}

fn load_polytope(path: &Path) -> Result<ConvexPolytope2> {
    read_json(path)
}

fn load_pair(s: &Search) -> Result<(ConvexPolytope2, ConvexPolytope2)> {
    Ok((load_polytope(&s.k)?, load_polytope(&s.t)?))
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run_search(s: &Search, phases: Phases) -> Result<()> {
    let (k, t) = load_pair(s)?;
    let r =
        report::run(&k, &t, &s.options(), s.tol, phases).map_err(|e| InputError(e.to_string()))?;
    print_json(&r)
}

fn verify_report(path: &Path, threshold: f64, grid: Option<usize>) -> Result<bool> {
    let r: RunReport = read_json(path)?;
    let k = r
        .inputs
        .k
        .polytope()
        .map_err(|e| InputError(format!("K: {e}")))?;
    let t = r
        .inputs
        .t
        .polytope()
        .map_err(|e| InputError(format!("T: {e}")))?;
    let digests_match =
        report::digest(&k) == r.inputs.k.sha256 && report::digest(&t) == r.inputs.t.sha256;
    let mut mismatched = Vec::new();
    let mut min: Option<f64> = None;
    for (i, c) in r.candidates.iter().enumerate() {
        let cert = verify::certify(&k, &t, &c.pair);
        let ok = cert.passes(threshold);
        if ok {
            min = Some(min.map_or(c.length, |m: f64| m.min(c.length)));
        }
        if ok != c.certified {
            mismatched.push(i);
        }
    }
    let min_matches = match (min, r.min) {
        (Some(a), Some(b)) => (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
        (None, None) => true,
        _ => false,
    };
    let mut out = json!({
        "candidates": r.candidates.len(),
        "digests_match": digests_match,
        "certification_mismatches": mismatched,
        "recomputed_min": min,
        "reported_min": r.min,
        "min_matches": min_matches,
    });
    let mut oracle_ok = true;
    if let Some(g) = grid {
        if g == 0 {
            bail!(InputError("--grid must be positive".into()));
        }
        let o2 = brute_force_min(&k, &t, 2, g, Parallelism::Parallel)?;
        let o3 = brute_force_min(&k, &t, 3, g, Parallelism::Parallel)?;
        let oracle = o2.length.min(o3.length);
        let bound = oracle_tolerance(&k, &t, 3, g);
        if let Some(m) = min {
            oracle_ok = (m - oracle).abs() <= bound && m <= oracle + 1e-6;
        }
        out["oracle"] = json!({
            "grid": g,
            "two_bounce": o2.length,
            "three_bounce": o3.length,
            "min": oracle,
            "bound": bound,
            "agrees": oracle_ok,
        });
    }
    print_json(&out)?;
    Ok(digests_match && mismatched.is_empty() && min_matches && oracle_ok)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.cmd {
        Cmd::Shortest(s) => run_search(&s, Phases::BOTH)?,
        Cmd::TwoBounce(s) => run_search(
            &s,
            Phases {
                two: true,
                three: false,
            },
        )?,
        Cmd::ThreeBounce(s) => run_search(
            &s,
            Phases {
                two: false,
                three: true,
            },
        )?,
        Cmd::Verify { report, tol, grid } => {
            if !verify_report(&report, tol, grid)? {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Gen { nk, nt, seed, out } => {
            let (k, t) = generate_instance(nk, nt, seed).map_err(|e| InputError(e.to_string()))?;
            fs::create_dir_all(&out)?;
            for (name, p) in [("K.json", &k), ("T.json", &t)] {
                let path = out.join(name);
                fs::write(&path, serde_json::to_string_pretty(p)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
        }
        Cmd::Bench {
            sizes,
            seed,
            instances,
            repeats,
            samples,
            sequential,
            json,
        } => {
            let cfg = BenchConfig {
                sizes: if sizes.is_empty() {
                    bench::table_sizes(5, 25, 5)
                } else {
                    sizes
                },
                seed,
                instances,
                repeats,
                opts: SearchOptions {
                    samples: samples as usize,
                    parallelism: if sequential {
                        Parallelism::Sequential
                    } else {
                        Parallelism::Parallel
                    },
                },
            };
            let rows = bench::run_bench(&cfg).map_err(|e| InputError(e.to_string()))?;
            let trends = bench::trends(&rows);
            if json {
                print_json(&json!({ "rows": rows, "trends": trends }))?;
            } else {
                print!("{}", bench::format_table(&rows));
                if let Some(tr) = trends {
                    println!(
                        "2-bounce swap rank {:.3}, ratio [{:.2}, {:.2}]; 3-bounce rank vs |V(K)| {:.3}, growth over T {:.2}, over K {:.2}",
                        tr.two_bounce_swap_rank,
                        tr.two_bounce_swap_ratio.0,
                        tr.two_bounce_swap_ratio.1,
                        tr.three_bounce_k_rank,
                        tr.three_bounce_t_growth,
                        tr.three_bounce_k_growth
                    );
                }
            }
        }
        Cmd::Plot { report, out } => {
            let r: RunReport = read_json(&report)?;
            fs::write(&out, plot::render_svg(&r))
                .with_context(|| format!("writing {}", out.display()))?;
            eprintln!("wrote {}", out.display());
        }
        Cmd::Obtuse {
            triangle,
            t,
            samples,
        } => {
            let tri = load_polytope(&triangle)?;
            if tri.len() != 3 {
                bail!(InputError(format!(
                    "{}: expected a triangle, got {} vertices",
                    triangle.display(),
                    tri.len()
                )));
            }
            let t = load_polytope(&t)?;
            let opts = SearchOptions {
                samples: samples as usize,
                ..SearchOptions::default()
            };
            print_json(&json!({
                "max_angle_deg": obtuse::max_angle_deg(&tri),
                "regular_three_bounce_exists": obtuse::regular_three_bounce_exists(&tri, &t, &opts),
                "in_family": obtuse::in_family_t(&tri, &t, opts.samples),
            }))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
