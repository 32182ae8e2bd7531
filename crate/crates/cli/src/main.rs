//! Command-line front end: every experiment is a subcommand with a fixed
//! seed, deterministic output ordering, and CSV or JSON reports.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use sievelab::analysis::{
    integral_case_bounds, numeric_fourier_phi, oscillatory_integral, phi, phi_hat, poisson_check,
};
use sievelab::bounds::{
    chain_random_scan, inclusion_random_scan, sieve_ratio_grid, window_bound_scan, BoundReport,
    WindowBoundGrid,
};
use sievelab::congruence::{count_scaled_roots, square_roots_mod};
use sievelab::expsum::{dyadic_cover, sieve_sum_dyadic, sieve_sum_squares, CoefficientSequence};
use sievelab::farey::{dirichlet_approx, FareyBlock};
use sievelab::gauss::gauss_scan;
use sievelab::report::Value;

#[derive(Parser)]
#[command(
    name = "sievelab",
    version,
    about = "Numerical laboratory for the large sieve with square moduli"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Seed for every randomized experiment.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (affects speed only, never results).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate a dyadic Farey block, count a window, or maximize it.
    Farey {
        /// Block base: fractions a/q^2 with q0 <= q^2 <= 2 q0.
        #[arg(long)]
        q0: f64,
        /// List the block fractions.
        #[arg(long)]
        list: bool,
        /// Count fractions within --delta of this point.
        #[arg(long)]
        alpha: Option<f64>,
        /// Window radius.
        #[arg(long)]
        delta: Option<f64>,
        /// Report the exact maximum window count over all centers.
        #[arg(long)]
        max_window: bool,
    },
    /// Dirichlet rational approximation of a real number.
    Approx {
        #[arg(long)]
        alpha: f64,
        /// Quality: denominator cap and error scale.
        #[arg(long)]
        tau: f64,
    },
    /// Scan |G(k,l;c)| / sqrt(2c) over all moduli up to --cmax.
    GaussScan {
        #[arg(long)]
        cmax: u64,
    },
    /// Square roots of l modulo k, or the count of g x^2 = c (mod k).
    Roots {
        #[arg(long)]
        k: u64,
        /// Solve x^2 = l (mod k), gcd(l, k) = 1.
        #[arg(long)]
        l: Option<i64>,
        /// Scale factor: count solutions of g x^2 = c (mod k).
        #[arg(long)]
        g: Option<u64>,
        /// Right-hand side for the scaled form.
        #[arg(long)]
        c: Option<i64>,
    },
    /// Verify the window kernel: transform pair, Poisson identity, floor.
    KernelCheck {
        #[arg(long, default_value_t = 1e4)]
        cutoff: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Frequencies for the transform comparison.
        #[arg(long, default_value = "0,0.25,0.5,0.9,1,1.5,2")]
        s_grid: String,
    },
    /// Oscillatory integrals against their case bounds on a grid.
    IntegralCheck {
        #[arg(long, default_value_t = 8)]
        jmax: i64,
        #[arg(long, default_value_t = 8)]
        lmax: i64,
        #[arg(long, default_value = "1,2,3,5")]
        rstars: String,
        #[arg(long, default_value = "1e-3,1e-2")]
        zs: String,
        #[arg(long, default_value = "100,1000")]
        q0s: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Random-draw verification of the window-congruence decomposition.
    InclusionVerify {
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        #[arg(long, default_value_t = 2000.0)]
        q0_max: f64,
        #[arg(long, default_value_t = 1e-6)]
        delta_min: f64,
        #[arg(long, default_value_t = 1e-3)]
        delta_max: f64,
    },
    /// Window-count bound shapes vs exact counts on a (q0, delta) grid.
    WindowBounds {
        #[arg(long, default_value = "10,100,1000,10000")]
        q0_list: String,
        #[arg(long, default_value = "1e-6,1e-5,1e-4,1e-3,1e-2")]
        delta_list: String,
        #[arg(long, default_value_t = 4)]
        alphas: usize,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Extra random (r, z) draws per cell for the inequality-chain check.
        #[arg(long, default_value_t = 8)]
        chain_draws: usize,
    },
    /// Evaluate the sieve sum for one coefficient sequence.
    Sieve {
        /// Sequence length N (for generated coefficients).
        #[arg(long)]
        n: Option<usize>,
        /// Generator: all-ones or unit-modulus random phases.
        #[arg(long, value_enum)]
        gen: Option<Gen>,
        /// Load coefficients from a `re im` per-line text file instead.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Full sum over all moduli q <= qmax.
        #[arg(long)]
        qmax: Option<u64>,
        /// Single dyadic block q0 <= q^2 <= 2 q0.
        #[arg(long)]
        q0: Option<f64>,
        /// Sum a disjoint dyadic cover and compare with the full sum.
        #[arg(long)]
        cover: bool,
    },
    /// Exact sieve sums vs the square-moduli bound shapes over a grid.
    RatioGrid {
        #[arg(long, default_value = "64,128,256,512,1024")]
        n_list: String,
        #[arg(long, default_value = "2,4,8,16,32")]
        q_list: String,
        /// Seeds for the random-phase coefficients (comma separated).
        #[arg(long, default_value = "0")]
        seeds: String,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Gen {
    Ones,
    RandomPhase,
}

struct Table {
    headers: &'static [&'static str],
    rows: Vec<Vec<Value>>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|e| anyhow!("bad {what} entry `{tok}`: {e}"))
        })
        .collect()
}

fn bound_report_row(rep: &BoundReport, keys: &[&str]) -> Vec<Value> {
    let mut row = vec![Value::Str(rep.kind.name().to_string())];
    for &key in keys {
        row.push(match rep.params.get(key) {
            Some(&v) => Value::Real(v),
            None => Value::Str(String::new()),
        });
    }
    row.push(Value::Real(rep.shape_value));
    row.push(Value::Real(rep.exact_value));
    row.push(match rep.ratio {
        Some(r) => Value::Real(r),
        None => Value::Str(String::new()),
    });
    row
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("sievelab: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("sievelab: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let (table, ok) = match &cli.cmd {
        Cmd::Farey {
            q0,
            list,
            alpha,
            delta,
            max_window,
        } => cmd_farey(*q0, *list, *alpha, *delta, *max_window)?,
        Cmd::Approx { alpha, tau } => cmd_approx(*alpha, *tau)?,
        Cmd::GaussScan { cmax } => cmd_gauss_scan(*cmax)?,
        Cmd::Roots { k, l, g, c } => cmd_roots(*k, *l, *g, *c)?,
        Cmd::KernelCheck {
            cutoff,
            tol,
            s_grid,
        } => cmd_kernel_check(*cutoff, *tol, s_grid)?,
        Cmd::IntegralCheck {
            jmax,
            lmax,
            rstars,
            zs,
            q0s,
            tol,
        } => cmd_integral_check(*jmax, *lmax, rstars, zs, q0s, *tol)?,
        Cmd::InclusionVerify {
            draws,
            q0_max,
            delta_min,
            delta_max,
        } => cmd_inclusion(*draws, cli.seed, *q0_max, *delta_min, *delta_max)?,
        Cmd::WindowBounds {
            q0_list,
            delta_list,
            alphas,
            eps,
            chain_draws,
        } => cmd_window_bounds(q0_list, delta_list, *alphas, *eps, *chain_draws, cli.seed)?,
        Cmd::Sieve {
            n,
            gen,
            coeffs,
            qmax,
            q0,
            cover,
        } => cmd_sieve(*n, *gen, coeffs.as_deref(), *qmax, *q0, *cover, cli.seed)?,
        Cmd::RatioGrid {
            n_list,
            q_list,
            seeds,
            eps,
        } => cmd_ratio_grid(n_list, q_list, seeds, *eps)?,
    };
    emit(cli, &table)?;
    Ok(ok)
}

fn cmd_farey(
    q0: f64,
    list: bool,
    alpha: Option<f64>,
    delta: Option<f64>,
    max_window: bool,
) -> Result<(Table, bool)> {
    let block = FareyBlock::enumerate(q0)?;
    if list {
        let rows = block
            .fractions()
            .iter()
            .map(|f| {
                vec![
                    Value::U64(f.q()),
                    Value::U64(f.a()),
                    Value::Real(f.value()),
                ]
            })
            .collect();
        return Ok((
            Table {
                headers: &["q", "a", "value"],
                rows,
            },
            true,
        ));
    }
    if max_window {
        let delta = delta.context("--max-window needs --delta")?;
        let w = block.max_window_count(delta)?;
        return Ok((
            Table {
                headers: &["delta", "q0", "max_count", "argmax_alpha"],
                rows: vec![vec![
                    Value::Real(w.delta),
                    Value::Real(w.q0),
                    Value::U64(w.max_count),
                    Value::Real(w.argmax_alpha),
                ]],
            },
            true,
        ));
    }
    if let (Some(alpha), Some(delta)) = (alpha, delta) {
        let count = block.count_in_interval(alpha, delta)?;
        return Ok((
            Table {
                headers: &["q0", "alpha", "delta", "count"],
                rows: vec![vec![
                    Value::Real(q0),
                    Value::Real(alpha),
                    Value::Real(delta),
                    Value::U64(count),
                ]],
            },
            true,
        ));
    }
    bail!("farey needs one of --list, --max-window (with --delta), or --alpha with --delta");
}

fn cmd_approx(alpha: f64, tau: f64) -> Result<(Table, bool)> {
    let a = dirichlet_approx(alpha, tau)?;
    Ok((
        Table {
            headers: &["alpha", "tau", "b", "r", "z", "z_cap"],
            rows: vec![vec![
                Value::Real(alpha),
                Value::Real(tau),
                Value::I64(a.b),
                Value::U64(a.r),
                Value::Real(a.z),
                Value::Real(1.0 / (a.r as f64 * tau)),
            ]],
        },
        true,
    ))
}

fn cmd_gauss_scan(cmax: u64) -> Result<(Table, bool)> {
    let report = gauss_scan(cmax)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                Value::U64(r.c),
                Value::U64(r.k),
                Value::U64(r.l),
                Value::Real(r.re),
                Value::Real(r.im),
                Value::Real(r.ratio),
            ]
        })
        .collect();
    let ok = report.max_ratio <= 1.0 + 1e-9;
    eprintln!(
        "gauss-scan: max |G|/sqrt(2c) = {:.12} at (c, k, l) = {:?}",
        report.max_ratio, report.argmax
    );
    Ok((
        Table {
            headers: &["c", "k", "l", "re", "im", "ratio"],
            rows,
        },
        ok,
    ))
}

fn cmd_roots(k: u64, l: Option<i64>, g: Option<u64>, c: Option<i64>) -> Result<(Table, bool)> {
    match (l, g, c) {
        (Some(l), None, None) => {
            let roots = square_roots_mod(l, k)?;
            let rows = roots
                .iter()
                .map(|&x| vec![Value::U64(k), Value::I64(l), Value::U64(x)])
                .collect();
            Ok((
                Table {
                    headers: &["k", "l", "x"],
                    rows,
                },
                true,
            ))
        }
        (None, Some(g), Some(c)) => {
            let count = count_scaled_roots(g, c, k)?;
            Ok((
                Table {
                    headers: &["g", "c", "k", "count"],
                    rows: vec![vec![
                        Value::U64(g),
                        Value::I64(c),
                        Value::U64(k),
                        Value::U64(count),
                    ]],
                },
                true,
            ))
        }
        _ => bail!("roots needs either --l, or --g with --c"),
    }
}

fn cmd_kernel_check(cutoff: f64, tol: f64, s_grid: &str) -> Result<(Table, bool)> {
    let s_values: Vec<f64> = parse_list(s_grid, "s-grid")?;
    let mut rows = Vec::new();
    let mut ok = true;
    for &s in &s_values {
        let numeric = numeric_fourier_phi(s, cutoff, tol)?;
        let exact = phi_hat(s);
        let err = (numeric - exact).abs();
        let pass = err <= 5e-3;
        ok &= pass;
        rows.push(vec![
            Value::Str("fourier".into()),
            Value::Real(s),
            Value::Real(cutoff),
            Value::Real(numeric),
            Value::Real(exact),
            Value::Real(err),
            Value::Bool(pass),
        ]);
    }
    for &w in &[0.3, 1.0, 3.0] {
        for &c in &[0.0, 0.37] {
            let check = poisson_check(w, c)?;
            let pass = check.abs_diff <= 1e-6;
            ok &= pass;
            rows.push(vec![
                Value::Str("poisson".into()),
                Value::Real(w),
                Value::Real(c),
                Value::Real(check.lhs),
                Value::Real(check.rhs),
                Value::Real(check.abs_diff),
                Value::Bool(pass),
            ]);
        }
    }
    let mut min_phi = f64::INFINITY;
    for i in 0..=1000 {
        let x = -0.5 + i as f64 / 1000.0;
        min_phi = min_phi.min(phi(x));
    }
    let pass = min_phi >= 1.0;
    ok &= pass;
    rows.push(vec![
        Value::Str("floor".into()),
        Value::Real(-0.5),
        Value::Real(0.5),
        Value::Real(min_phi),
        Value::Real(1.0),
        Value::Real((1.0 - min_phi).max(0.0)),
        Value::Bool(pass),
    ]);
    Ok((
        Table {
            headers: &["check", "x", "y", "lhs", "rhs", "err", "ok"],
            rows,
        },
        ok,
    ))
}

fn cmd_integral_check(
    jmax: i64,
    lmax: i64,
    rstars: &str,
    zs: &str,
    q0s: &str,
    tol: f64,
) -> Result<(Table, bool)> {
    let rstars: Vec<u64> = parse_list(rstars, "rstars")?;
    let zs: Vec<f64> = parse_list(zs, "zs")?;
    let q0s: Vec<f64> = parse_list(q0s, "q0s")?;
    let mut rows = Vec::new();
    let mut ok = true;
    for &q0 in &q0s {
        for &z in &zs {
            for &r_star in &rstars {
                for j in -jmax..=jmax {
                    for l in -lmax..=lmax {
                        let value = oscillatory_integral(j, l, r_star, z, q0, tol)?.norm();
                        let bound = integral_case_bounds(j, l, r_star, z, q0)?;
                        let mut pass = value <= bound.min(q0) + 1e-6;
                        if j == 0 && l == 0 {
                            pass &= (value - q0).abs() <= 1e-6;
                        }
                        ok &= pass;
                        rows.push(vec![
                            Value::I64(j),
                            Value::I64(l),
                            Value::U64(r_star),
                            Value::Real(z),
                            Value::Real(q0),
                            Value::Real(value),
                            Value::Real(bound),
                            Value::Bool(pass),
                        ]);
                    }
                }
            }
        }
    }
    Ok((
        Table {
            headers: &["j", "l", "r_star", "z", "q0", "abs_value", "case_bound", "ok"],
            rows,
        },
        ok,
    ))
}

fn cmd_inclusion(
    draws: usize,
    seed: u64,
    q0_max: f64,
    delta_min: f64,
    delta_max: f64,
) -> Result<(Table, bool)> {
    let reports = inclusion_random_scan(draws, seed, q0_max, delta_min, delta_max)?;
    let mut ok = true;
    let rows = reports
        .iter()
        .map(|r| {
            ok &= r.violations.is_empty();
            vec![
                Value::Real(r.q0),
                Value::Real(r.delta),
                Value::I64(r.approx.b),
                Value::U64(r.approx.r),
                Value::Real(r.approx.z),
                Value::Real(r.delta_window),
                Value::U64(r.counted),
                Value::U64(r.m_zero),
                Value::U64(r.violations.len() as u64),
            ]
        })
        .collect();
    Ok((
        Table {
            headers: &[
                "q0",
                "delta",
                "b",
                "r",
                "z",
                "delta_window",
                "counted",
                "m_zero",
                "violations",
            ],
            rows,
        },
        ok,
    ))
}

fn cmd_window_bounds(
    q0_list: &str,
    delta_list: &str,
    alphas: usize,
    eps: f64,
    chain_draws: usize,
    seed: u64,
) -> Result<(Table, bool)> {
    let grid = WindowBoundGrid {
        q0_list: parse_list(q0_list, "q0-list")?,
        delta_list: parse_list(delta_list, "delta-list")?,
        alphas_per_cell: alphas,
        seed,
        eps,
    };
    let reports = window_bound_scan(&grid)?;
    let mut ok = true;
    for check in chain_random_scan(&grid.q0_list, &grid.delta_list, chain_draws, seed) {
        if !check.ok() {
            eprintln!("window-bounds: inequality chain failed at {check:?}");
            ok = false;
        }
    }
    let rows = reports
        .iter()
        .map(|rep| bound_report_row(rep, &["q0", "delta", "r", "z", "eps"]))
        .collect();
    Ok((
        Table {
            headers: &[
                "kind",
                "q0",
                "delta",
                "r",
                "z",
                "eps",
                "shape_value",
                "exact_value",
                "ratio",
            ],
            rows,
        },
        ok,
    ))
}

fn load_sequence(
    n: Option<usize>,
    gen: Option<Gen>,
    coeffs: Option<&std::path::Path>,
    seed: u64,
) -> Result<CoefficientSequence> {
    match (coeffs, gen) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok(CoefficientSequence::from_text(&text)?)
        }
        (None, Some(gen)) => {
            let n = n.context("--gen needs --n")?;
            Ok(match gen {
                Gen::Ones => CoefficientSequence::ones(n)?,
                Gen::RandomPhase => CoefficientSequence::random_phases(n, seed)?,
            })
        }
        _ => bail!("sieve needs exactly one of --coeffs or --gen"),
    }
}

fn cmd_sieve(
    n: Option<usize>,
    gen: Option<Gen>,
    coeffs: Option<&std::path::Path>,
    qmax: Option<u64>,
    q0: Option<f64>,
    cover: bool,
    seed: u64,
) -> Result<(Table, bool)> {
    let seq = load_sequence(n, gen, coeffs, seed)?;
    let n = seq.n_max() as u64;
    let z = seq.z_value();
    let mut rows = Vec::new();
    let mut ok = true;
    match (qmax, q0, cover) {
        (Some(qmax), None, false) => {
            let value = sieve_sum_squares(&seq, qmax)?;
            rows.push(vec![
                Value::Str("full".into()),
                Value::U64(n),
                Value::Real(qmax as f64),
                Value::Real(z),
                Value::Real(value),
            ]);
        }
        (None, Some(q0), false) => {
            let value = sieve_sum_dyadic(&seq, q0)?;
            rows.push(vec![
                Value::Str("block".into()),
                Value::U64(n),
                Value::Real(q0),
                Value::Real(z),
                Value::Real(value),
            ]);
        }
        (Some(qmax), None, true) => {
            let (bases, q_end) = dyadic_cover(qmax)?;
            let mut total = 0.0;
            for &b in &bases {
                let value = sieve_sum_dyadic(&seq, b)?;
                total += value;
                rows.push(vec![
                    Value::Str("cover_block".into()),
                    Value::U64(n),
                    Value::Real(b),
                    Value::Real(z),
                    Value::Real(value),
                ]);
            }
            let full = sieve_sum_squares(&seq, q_end)?;
            rows.push(vec![
                Value::Str("cover_total".into()),
                Value::U64(n),
                Value::Real(q_end as f64),
                Value::Real(z),
                Value::Real(total),
            ]);
            rows.push(vec![
                Value::Str("full".into()),
                Value::U64(n),
                Value::Real(q_end as f64),
                Value::Real(z),
                Value::Real(full),
            ]);
            ok = (total - full).abs() <= 1e-9 * full.abs().max(1.0);
        }
        _ => bail!("sieve needs exactly one of --qmax, --q0, or --cover with --qmax"),
    }
    Ok((
        Table {
            headers: &["mode", "n", "param", "z", "value"],
            rows,
        },
        ok,
    ))
}

fn cmd_ratio_grid(n_list: &str, q_list: &str, seeds: &str, eps: f64) -> Result<(Table, bool)> {
    let n_list: Vec<usize> = parse_list(n_list, "n-list")?;
    let q_list: Vec<u64> = parse_list(q_list, "q-list")?;
    let seeds: Vec<u64> = parse_list(seeds, "seeds")?;
    let reports = sieve_ratio_grid(&n_list, &q_list, &seeds, eps)?;
    let rows = reports
        .iter()
        .map(|rep| bound_report_row(rep, &["N", "Q", "seed", "Z", "eps"]))
        .collect();
    Ok((
        Table {
            headers: &[
                "kind",
                "n",
                "q",
                "seed",
                "z",
                "eps",
                "shape_value",
                "exact_value",
                "ratio",
            ],
            rows,
        },
        true,
    ))
}

fn emit(cli: &Cli, table: &Table) -> Result<()> {
    let body = match cli.format {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&table.headers.join(","));
            out.push('\n');
            for row in &table.rows {
                let fields: Vec<String> = row.iter().map(Value::csv).collect();
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: serde_json::Map<String, serde_json::Value> = table
                        .headers
                        .iter()
                        .zip(row)
                        .map(|(&h, v)| (h.to_string(), json_value(v)))
                        .collect();
                    serde_json::Value::Object(obj)
                })
                .collect();
            let doc = serde_json::json!({
                "meta": {
                    "version": env!("CARGO_PKG_VERSION"),
                    "seed": cli.seed,
                    "flags": std::env::args().skip(1).collect::<Vec<String>>(),
                },
                "rows": rows,
            });
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
        }
    }
    Ok(())
}

fn json_value(v: &Value) -> serde_json::Value {
    match v {
        Value::U64(x) => serde_json::json!(x),
        Value::I64(x) => serde_json::json!(x),
        Value::Real(x) => serde_json::json!(x),
        Value::Str(s) => {
            if s.is_empty() {
                serde_json::Value::Null
            } else {
                serde_json::json!(s)
            }
        }
        Value::Bool(b) => serde_json::json!(b),
    }
}
