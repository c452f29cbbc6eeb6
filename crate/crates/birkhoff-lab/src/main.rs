//! Command-line front end: one binary dispatching the lab's subcommands,
//! writing CSV/JSON outputs plus a reproducibility manifest per run.

use birkhoff_lab::birkhoff::{
    birkhoff_series, discrepancy_star, hilbert_fourier_side, hilbert_partial,
};
use birkhoff_lab::cf::RotationNumber;
use birkhoff_lab::descriptor::{parse_hex_point, AuditableSpec, FunctionDescriptor};
use birkhoff_lab::dimension::{construction_cover_audit, pre_measure, slow_set_sample, Cover};
use birkhoff_lab::error::{Error, Result};
use birkhoff_lab::fixed::{Frac, Precision, FULL};
use birkhoff_lab::gauge::GrowthGauge;
use birkhoff_lab::stochastic::{
    dyadic_decay, key_lemma_demo, lil_horizon, menshov_check, orthonormality_check,
};
use birkhoff_lab::tower::{Family, TowerPartition};
use birkhoff_lab::zoo;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "birkhoff-lab", version, about = "Birkhoff-sum laboratory for irrational rotations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// fixed-point precision in bits for rotation numbers (16..=127)
    #[arg(long, global = true, default_value_t = 127)]
    precision: u32,
    /// master seed for all randomized subcommands
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// worker threads (default: BIRKHOFF_LAB_THREADS or all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// output directory
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Continued-fraction data: quotients, convergents, type exponents
    Cf {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        depth: usize,
        /// trailing window for the liminf estimate of tau
        #[arg(long, default_value_t = 5)]
        tau_window: usize,
    },
    /// Tower partition at one level, as CSV
    Partition {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = birkhoff_lab::tower::DEFAULT_ARC_BUDGET)]
        budget: u64,
    },
    /// Birkhoff series of a descriptor function
    Birkhoff {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        alpha: String,
        /// starting point as 32 hex digits (fixed point)
        #[arg(long, default_value = "00000000000000000000000000000000")]
        x: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        stride: u64,
        #[arg(long)]
        gauge: Option<String>,
    },
    /// Exact star discrepancy of (alpha, ..., n alpha)
    Discrepancy {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
    },
    /// One-sided ergodic Hilbert transform of the geometric example
    Hilbert {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
        /// direct | fourier | both
        #[arg(long, default_value = "both")]
        mode: String,
    },
    /// Build a construction and write its descriptor + spec record
    #[command(subcommand)]
    Zoo(ZooCmd),
    /// Monte Carlo checks
    #[command(subcommand)]
    Mc(McCmd),
    /// Pre-measures, cover audits, slow-set sampling
    #[command(subcommand)]
    Dim(DimCmd),
}

#[derive(Subcommand)]
enum ZooCmd {
    Plateau {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value = "nu=0.5")]
        gauge: String,
        #[arg(long, default_value_t = 1.0)]
        c_factor: f64,
    },
    Holder {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 0.25)]
        xi: f64,
        #[arg(long, default_value_t = 0.25)]
        nu: f64,
        #[arg(long, default_value_t = 2.0)]
        a_target: f64,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, default_value_t = 16.0)]
        eps_budget: f64,
        #[arg(long)]
        nu_prime: Option<f64>,
        /// force `one` or `two` instead of selecting by the tau window
        #[arg(long)]
        case: Option<String>,
        #[arg(long, default_value_t = 2)]
        min_level: usize,
        #[arg(long, default_value_t = 40)]
        max_level: usize,
    },
    Rademacher {
        #[arg(long)]
        arcs: u64,
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        measure_budget: f64,
        /// also write a smoothed continuous version with this delta
        #[arg(long)]
        smooth: Option<f64>,
    },
    Noncoboundary {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 0.25)]
        xi: f64,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 2000)]
        sep_inv: u64,
        #[arg(long, default_value_t = 100.0)]
        measure_base: f64,
    },
    Transfer {
        #[arg(long)]
        alpha: String,
        /// coefficients as k:re:im comma-separated, e.g. 1:0.5:0,-1:0.5:0
        #[arg(long)]
        coeffs: String,
    },
    HilbertExample {
        #[arg(long)]
        a: f64,
    },
}

#[derive(Subcommand)]
enum McCmd {
    Menshov {
        #[arg(long)]
        n: usize,
        /// flat | harmonic | random
        #[arg(long, default_value = "flat")]
        profile: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    Lil {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    Ortho {
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    Decay {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        kmax: u32,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// row used to fit the envelope constant
        #[arg(long, default_value_t = 6)]
        fit_k: u32,
    },
    Key {
        #[arg(long, default_value_t = 4096)]
        arcs: u64,
        #[arg(long, default_value_t = 256)]
        horizon: u64,
        #[arg(long, default_value_t = 64)]
        m: u64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0.5)]
        measure_budget: f64,
    },
}

#[derive(Subcommand)]
enum DimCmd {
    Premeasure {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        s: f64,
    },
    Audit {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eps: f64,
    },
    Slowset {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "nu=0.5")]
        gauge: String,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 10)]
        grid_log2: u32,
    },
}

#[derive(Serialize)]
struct Manifest {
    subcommand: String,
    argv: Vec<String>,
    precision: u32,
    seed: u64,
    version: &'static str,
    outputs: Vec<ManifestEntry>,
}

#[derive(Serialize)]
struct ManifestEntry {
    path: String,
    sha256: String,
}

struct Run {
    global: Global,
    outputs: Vec<(PathBuf, Vec<u8>)>,
}

impl Run {
    fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.outputs.push((self.global.out_dir.join(name), bytes));
    }

    fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(name, text.into_bytes());
        Ok(())
    }

    fn finish(self, subcommand: &str) -> Result<()> {
        std::fs::create_dir_all(&self.global.out_dir)?;
        let mut entries = Vec::new();
        for (path, bytes) in &self.outputs {
            std::fs::write(path, bytes)?;
            let mut hasher = Sha256::new();
            hasher.update(bytes);
            entries.push(ManifestEntry {
                path: path.display().to_string(),
                sha256: format!("{:x}", hasher.finalize()),
            });
            println!("wrote {}", path.display());
        }
        let manifest = Manifest {
            subcommand: subcommand.to_string(),
            argv: std::env::args().collect(),
            precision: self.global.precision,
            seed: self.global.seed,
            version: env!("CARGO_PKG_VERSION"),
            outputs: entries,
        };
        let path = self.global.out_dir.join(format!("{subcommand}.manifest.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(&cli.global) {
        eprintln!("{}", error_json(&e));
        std::process::exit(e.exit_code());
    }
    match dispatch(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{}", error_json(&e));
            std::process::exit(e.exit_code());
        }
    }
}

fn error_json(e: &Error) -> String {
    serde_json::json!({
        "error": e.to_string(),
        "exit_code": e.exit_code(),
    })
    .to_string()
}

fn configure_threads(global: &Global) -> Result<()> {
    let threads = global.threads.or_else(|| {
        std::env::var("BIRKHOFF_LAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn precision_of(global: &Global) -> Result<Precision> {
    Precision::new(global.precision)
        .ok_or_else(|| Error::InvalidInput("precision must be in 16..=127".into()))
}

fn dispatch(cli: Cli) -> Result<()> {
    let precision = precision_of(&cli.global)?;
    let mut run = Run {
        global: cli.global.clone(),
        outputs: Vec::new(),
    };
    let seed = cli.global.seed;
    match cli.command {
        Command::Cf {
            alpha,
            depth,
            tau_window,
        } => {
            let rot = RotationNumber::parse(&alpha, precision)?;
            let quotients = rot.partial_quotients(depth)?;
            let convs = rot.convergents(depth)?;
            let tau = rot.type_exponents(depth, tau_window).ok();
            let payload = serde_json::json!({
                "alpha": alpha,
                "value_hex": rot.value.to_hex(),
                "value": rot.value.to_f64(),
                "quotients": quotients,
                "convergents": convs.iter().map(|c| serde_json::json!({
                    "k": c.k,
                    "p": c.p.to_string(),
                    "q": c.q.to_string(),
                    "error": c.signed_error(),
                })).collect::<Vec<_>>(),
                "tau": tau.as_ref().map(|t| t.entries.clone()),
                "tau_liminf_estimate": tau.as_ref().map(|t| t.liminf_estimate),
            });
            run.add_json("cf.json", &payload)?;
            run.finish("cf")
        }
        Command::Partition {
            alpha,
            level,
            budget,
        } => {
            let rot = RotationNumber::parse(&alpha, precision)?;
            let part = TowerPartition::build_with_budget(&rot, level, budget)?;
            let mut csv = String::from("family,j,start_hex,start,length\n");
            for fam in [Family::Lower, Family::Upper] {
                let (label, count, len) = match fam {
                    Family::Lower => ("n", part.q_n1, part.d_n),
                    Family::Upper => ("n+1", part.q_n, part.d_n1),
                };
                for j in 0..count {
                    let arc = part.arc(fam, j as u32);
                    writeln!(
                        csv,
                        "{label},{j},{},{},{}",
                        arc.start.to_hex(),
                        arc.start.to_f64(),
                        len as f64 / FULL as f64
                    )
                    .unwrap();
                }
            }
            run.add("partition.csv", csv.into_bytes());
            run.finish("partition")
        }
        Command::Birkhoff {
            f,
            alpha,
            x,
            n,
            stride,
            gauge,
        } => {
            let rot = RotationNumber::parse(&alpha, precision)?;
            let x = parse_hex_point(&x)?;
            let gauge = gauge.map(|g| GrowthGauge::parse(&g)).transpose()?;
            let ev = FunctionDescriptor::load(&f)?.into_evaluator(precision)?;
            let series = birkhoff_series(|y| ev.eval(y), rot.value, x, n, stride, gauge.as_ref())?;
            let mut csv = String::from("n,s_n,running_max,gauge_ratio_max\n");
            for i in 0..series.values.len() {
                let ratio = series
                    .gauge_ratio_max
                    .as_ref()
                    .map_or(String::new(), |r| r[i].to_string());
                writeln!(
                    csv,
                    "{},{},{},{ratio}",
                    i + 1,
                    series.values[i],
                    series.running_max[i]
                )
                .unwrap();
            }
            run.add("birkhoff.csv", csv.into_bytes());
            run.finish("birkhoff")
        }
        Command::Discrepancy { alpha, n } => {
            let rot = RotationNumber::parse(&alpha, precision)?;
            let mut csv = String::from("n,d_star,achieving_index\n");
            let rep = discrepancy_star(rot.value, n)?;
            writeln!(csv, "{},{},{}", rep.n, rep.d_star, rep.achieving_index).unwrap();
            run.add("discrepancy.csv", csv.into_bytes());
            run.finish("discrepancy")
        }
        Command::Hilbert { a, alpha, n, mode } => {
            zoo::hilbert_example::check_param(a)?;
            let rot = RotationNumber::parse(&alpha, precision)?;
            let mut csv = String::from("n,direct,fourier\n");
            let checkpoints: Vec<u64> = decades(n);
            let direct = if mode == "direct" || mode == "both" {
                let h = hilbert_partial(
                    |y| zoo::hilbert_example_eval(a, y),
                    rot.value,
                    Frac::ZERO,
                    n,
                )?;
                Some(
                    checkpoints
                        .iter()
                        .map(|&c| h.partials[(c - 1) as usize])
                        .collect::<Vec<_>>(),
                )
            } else {
                None
            };
            let fourier = if mode == "fourier" || mode == "both" {
                Some(hilbert_fourier_side(a, rot.value, &checkpoints)?)
            } else {
                None
            };
            for (i, c) in checkpoints.iter().enumerate() {
                let d = direct.as_ref().map_or(String::new(), |v| v[i].to_string());
                let f = fourier.as_ref().map_or(String::new(), |v| v[i].to_string());
                writeln!(csv, "{c},{d},{f}").unwrap();
            }
            run.add("hilbert.csv", csv.into_bytes());
            run.finish("hilbert")
        }
        Command::Zoo(cmd) => run_zoo(run, cmd, precision, seed),
        Command::Mc(cmd) => run_mc(run, cmd, seed),
        Command::Dim(cmd) => run_dim(run, cmd, precision),
    }
}

fn decades(n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut c = 1u64;
    while c < n {
        out.push(c);
        c *= 10;
    }
    out.push(n);
    out
}

fn run_zoo(mut run: Run, cmd: ZooCmd, precision: Precision, seed: u64) -> Result<()> {
    match cmd {
        ZooCmd::Plateau {
            alpha,
            level,
            eps,
            eta,
            gauge,
            c_factor,
        } => {
            let rot = RotationNumber::parse(&alpha, precision)?;
            let gauge = GrowthGauge::parse(&gauge)?;
            let (f, spec, m) = zoo::build_plateau(&rot, level, eps, eta, &gauge, c_factor)?;
            println!("plateau: level {level}, m = {m}, good measure {:.6}", spec.good_measure);
            run.add_json("plateau_fn.json", &FunctionDescriptor::Piecewise { function: f })?;
            run.add_json("plateau_spec.json", &AuditableSpec::Plateau(spec))?;
            run.finish("zoo-plateau")
        }
        ZooCmd::Holder {
            alpha,
            xi,
            nu,
            a_target,
            s,
            eps_budget,
            nu_prime,
            case,
            min_level,
            max_level,
        } => {
            let rot = RotationNumber::parse(&alpha, precision)?;
            let case_override = match case.as_deref() {
                None => None,
                Some("one") => Some(zoo::HolderCase::One),
                Some("two") => Some(zoo::HolderCase::Two),
                Some(other) => {
                    return Err(Error::InvalidInput(format!("case must be one|two, got {other}")))
                }
            };
            let params = zoo::HolderParams {
                xi,
                nu,
                a_target,
                s: s.unwrap_or((xi / (1.0 - nu)).sqrt() + 0.05),
                eps_budget,
                nu_prime,
                case_override,
                min_level,
                max_level,
            };
            let (f, spec) = zoo::build_holder(&rot, &params)?;
            println!(
                "holder: case {:?}, level {}, m0 = {}, pre-measure {:.3}",
                spec.case, spec.level, spec.m0, spec.cover_pre_measure
            );
            run.add_json("holder_fn.json", &FunctionDescriptor::Piecewise { function: f })?;
            run.add_json("holder_spec.json", &AuditableSpec::Holder(spec))?;
            run.finish("zoo-holder")
        }
        ZooCmd::Rademacher {
            arcs,
            horizon,
            eps,
            measure_budget,
            smooth,
        } => {
            let (g, spec) = zoo::build_rademacher_step(arcs, horizon, eps, seed, measure_budget)?;
            println!(
                "rademacher: K = {arcs}, N = {horizon}, exact ergodic measure {:.6}",
                spec.ergodic_measure
            );
            run.add_json("rademacher_step.json", &g)?;
            run.add_json("rademacher_spec.json", &spec)?;
            if let Some(delta) = smooth {
                let f = zoo::smooth_step(&g.pieces(), delta)?;
                run.add_json(
                    "rademacher_smooth_fn.json",
                    &FunctionDescriptor::Piecewise { function: f },
                )?;
            }
            run.finish("zoo-rademacher")
        }
        ZooCmd::Noncoboundary {
            alpha,
            xi,
            depth,
            sep_inv,
            measure_base,
        } => {
            let rot = RotationNumber::parse(&alpha, precision)?;
            let params = zoo::NoncobParams {
                xi,
                depth,
                sep_inv,
                measure_base,
                ..Default::default()
            };
            let (_, spec) = zoo::build_noncoboundary(&rot, &params)?;
            println!(
                "noncoboundary: depth {depth}, n_(K+1) = {}, growth witness {:.3}",
                spec.stages.last().map(|s| s.n_hi).unwrap_or(0),
                spec.growth_witness
            );
            run.add_json(
                "noncoboundary_fn.json",
                &FunctionDescriptor::Noncoboundary {
                    alpha: alpha.clone(),
                    xi,
                    depth,
                    sep_inv,
                    measure_base,
                },
            )?;
            run.add_json("noncoboundary_spec.json", &spec)?;
            run.finish("zoo-noncoboundary")
        }
        ZooCmd::Transfer { alpha, coeffs } => {
            let rot = RotationNumber::parse(&alpha, precision)?;
            let parsed: Result<Vec<(i64, Complex64)>> = coeffs
                .split(',')
                .map(|triple| {
                    let parts: Vec<&str> = triple.split(':').collect();
                    if parts.len() != 3 {
                        return Err(Error::InvalidInput(format!("bad coefficient '{triple}'")));
                    }
                    let k = parts[0]
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad frequency '{}'", parts[0])))?;
                    let re: f64 = parts[1]
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad re '{}'", parts[1])))?;
                    let im: f64 = parts[2]
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad im '{}'", parts[2])))?;
                    Ok((k, Complex64::new(re, im)))
                })
                .collect();
            let result = zoo::trig_coboundary_transfer(&parsed?, rot.value)?;
            println!("transfer: sup bound {:.6}", result.sup_bound);
            run.add_json(
                "transfer_fn.json",
                &FunctionDescriptor::TrigPolynomial {
                    transfer: result.clone(),
                },
            )?;
            run.add_json("transfer.json", &result)?;
            run.finish("zoo-transfer")
        }
        ZooCmd::HilbertExample { a } => {
            zoo::hilbert_example::check_param(a)?;
            run.add_json("hilbert_example_fn.json", &FunctionDescriptor::HilbertExample { a })?;
            run.finish("zoo-hilbert-example")
        }
    }
}

fn run_mc(mut run: Run, cmd: McCmd, seed: u64) -> Result<()> {
    match cmd {
        McCmd::Menshov { n, profile, trials } => {
            let coeffs: Vec<f64> = match profile.as_str() {
                "flat" => vec![1.0; n],
                "harmonic" => (1..=n).map(|j| 1.0 / j as f64).collect(),
                "random" => {
                    use rand::{Rng, SeedableRng};
                    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed ^ 0xc0ffee);
                    (0..n).map(|_| rng.gen::<f64>()).collect()
                }
                other => {
                    return Err(Error::InvalidInput(format!(
                        "profile must be flat|harmonic|random, got {other}"
                    )))
                }
            };
            let rep = menshov_check(&coeffs, trials, seed)?;
            let mut csv = String::from("n,profile,estimate,std_err,bound,holds\n");
            writeln!(
                csv,
                "{n},{profile},{},{},{},{}",
                rep.empirical_mean, rep.std_err, rep.bound, rep.holds
            )
            .unwrap();
            run.add("mc_menshov.csv", csv.into_bytes());
            run.finish("mc-menshov")
        }
        McCmd::Lil { eps, m, trials } => {
            let rep = lil_horizon(eps, m, trials, seed)?;
            let mut csv = String::from("m,n,estimate,half_width,confirm_estimate,confirm_half_width\n");
            writeln!(
                csv,
                "{},{},{},{},{},{}",
                rep.m,
                rep.n,
                rep.first_run.estimate,
                rep.first_run.half_width,
                rep.confirmation.estimate,
                rep.confirmation.half_width
            )
            .unwrap();
            run.add("mc_lil.csv", csv.into_bytes());
            run.finish("mc-lil")
        }
        McCmd::Ortho { kmax, samples } => {
            let f = |x: f64| std::f64::consts::SQRT_2 * (2.0 * std::f64::consts::PI * x).cos();
            let rep = orthonormality_check(f, kmax, samples, seed)?;
            let mut csv = String::from("k,j,inner_product,target,tolerance\n");
            for k in 0..kmax {
                for j in 0..kmax {
                    let target = if k == j { 1.0 } else { 0.0 };
                    writeln!(
                        csv,
                        "{},{},{},{target},{}",
                        k + 1,
                        j + 1,
                        rep.gram[k][j],
                        rep.tolerance
                    )
                    .unwrap();
                }
            }
            run.add("mc_ortho.csv", csv.into_bytes());
            run.finish("mc-ortho")
        }
        McCmd::Decay {
            nu,
            kmax,
            samples,
            fit_k,
        } => {
            let f = |x: f64| std::f64::consts::SQRT_2 * (2.0 * std::f64::consts::PI * x).cos();
            let table = dyadic_decay(f, nu, kmax, samples, seed)?;
            let c = table.fitted_envelope_constant(fit_k).unwrap_or(f64::NAN);
            let mut csv = String::from("k,measure,half_width,envelope\n");
            for row in &table.rows {
                let envelope =
                    c * (row.k as f64).powi(2) * (2.0f64).powf(row.k as f64 * (1.0 - 2.0 * nu));
                writeln!(
                    csv,
                    "{},{},{},{envelope}",
                    row.k, row.measure.estimate, row.measure.half_width
                )
                .unwrap();
            }
            run.add("mc_decay.csv", csv.into_bytes());
            run.finish("mc-decay")
        }
        McCmd::Key {
            arcs,
            horizon,
            m,
            eps,
            samples,
            measure_budget,
        } => {
            let (g, spec) = zoo::build_rademacher_step(arcs, horizon, eps, seed, measure_budget)?;
            let rep = key_lemma_demo(&g, &spec, m, samples, seed ^ 0x5eed)?;
            let mut csv = String::from(
                "fraction,half_width,fraction_ergodic,fraction_non_ergodic,threshold,ergodic_measure\n",
            );
            writeln!(
                csv,
                "{},{},{},{},{},{}",
                rep.fraction.estimate,
                rep.fraction.half_width,
                rep.fraction_ergodic.estimate,
                rep.fraction_non_ergodic.estimate,
                rep.threshold,
                rep.ergodic_measure_exact
            )
            .unwrap();
            run.add("mc_key.csv", csv.into_bytes());
            run.finish("mc-key")
        }
    }
}

fn run_dim(mut run: Run, cmd: DimCmd, precision: Precision) -> Result<()> {
    match cmd {
        DimCmd::Premeasure { cover, s } => {
            let text = std::fs::read_to_string(&cover)?;
            let cover: Cover = serde_json::from_str(&text)?;
            let value = pre_measure(&cover, s)?;
            let mut csv = String::from("s,delta,intervals,pre_measure\n");
            writeln!(csv, "{s},{},{},{value}", cover.delta, cover.lengths.len()).unwrap();
            run.add("dim_premeasure.csv", csv.into_bytes());
            run.finish("dim-premeasure")
        }
        DimCmd::Audit {
            spec,
            s,
            delta,
            eps,
        } => {
            let spec = AuditableSpec::load(&spec)?;
            let audit = construction_cover_audit(&spec.good_set(), spec.cover(), s, delta, eps)?;
            let mut csv = String::from("class,declared_count,actual_arcs,length,contribution\n");
            for c in &audit.classes {
                writeln!(
                    csv,
                    "{},{},{},{},{}",
                    c.label, c.declared_count, c.actual_arcs, c.len, c.contribution
                )
                .unwrap();
            }
            writeln!(csv, "total,,,,{}", audit.pre_measure).unwrap();
            writeln!(csv, "pass,,,,{}", audit.pass).unwrap();
            println!(
                "audit: pre-measure {:.6} vs budget {eps}: {}",
                audit.pre_measure,
                if audit.pass { "pass" } else { "FAIL" }
            );
            run.add("dim_audit.csv", csv.into_bytes());
            run.finish("dim-audit")
        }
        DimCmd::Slowset {
            f,
            alpha,
            gauge,
            b,
            m,
            n,
            grid_log2,
        } => {
            let rot = RotationNumber::parse(&alpha, precision)?;
            let gauge = GrowthGauge::parse(&gauge)?;
            let ev = FunctionDescriptor::load(&f)?.into_evaluator(precision)?;
            let rep = slow_set_sample(
                |y| ev.eval(y),
                rot.value,
                &gauge,
                b,
                m,
                n,
                grid_log2,
                None,
            )?;
            let mut csv = String::from("grid,slow_cells,slow_fraction,dimension_estimate,fit_residual,scale_lo,scale_hi\n");
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                rep.grid,
                rep.slow_cells,
                rep.slow_fraction,
                rep.dimension_estimate.map_or(String::from("undefined"), |d| d.to_string()),
                rep.fit_residual,
                rep.scales.0,
                rep.scales.1
            )
            .unwrap();
            run.add("dim_slowset.csv", csv.into_bytes());
            run.finish("dim-slowset")
        }
    }
}
