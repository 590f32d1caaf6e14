//! The five operations. Each writes its artifacts into `out_dir` and returns
//! the metrics it wrote.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use advq::field::{FieldArray, GridSpec};
use advq::gates::{decompose, gate_report, GateReport};
use advq::oracle::{
    analytic_rotation, analytic_shear, analytic_shear3d, fd_solve, rel_l2, sample_initial,
    GaussianMixture,
};
use advq::postprocess::{counts_to_field, sample_field, savgol2d, threshold_mitigate};
use advq::transport::{assemble_step, evolve, Evolution, TransportSpec};

use crate::config::{ExperimentConfig, Oracle, Transport};
use crate::CliError;

/// Ordered `key = value` pairs.
pub type Metrics = Vec<(String, String)>;

fn put(m: &mut Metrics, k: &str, v: impl ToString) {
    m.push((k.to_string(), v.to_string()));
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| CliError::Io { path, source })
}

fn write_metrics(dir: &Path, name: &str, m: &Metrics) -> Result<(), CliError> {
    let text: String = m.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    write(dir, name, &text)
}

fn prepare_dir(cfg: &ExperimentConfig) -> Result<&Path, CliError> {
    let dir = cfg.out_dir.as_path();
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    Ok(dir)
}

/// Wall-clock time goes to its own file so the other artifacts stay
/// byte-identical between runs.
fn write_timing(dir: &Path, op: &str, secs: f64) -> Result<(), CliError> {
    write(dir, "timing.txt", &format!("operation = {op}\nwall_time_s = {secs:.3}\n"))
}

struct Setup {
    grid: GridSpec,
    spec: TransportSpec,
    mix: GaussianMixture,
    u0: FieldArray,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup, CliError> {
    let grid = cfg.grid()?;
    let spec = cfg.transport_spec()?;
    let mix = cfg.mixture()?;
    let u0 = sample_initial(&mix, &grid)?;
    Ok(Setup { grid, spec, mix, u0 })
}

/// Closed-form solution at `T`.
pub fn analytic(cfg: &ExperimentConfig, grid: &GridSpec, mix: &GaussianMixture) -> Result<FieldArray, CliError> {
    let (t, d) = (cfg.t, cfg.d);
    let half = cfg.side() / 2.0;
    Ok(match cfg.transport {
        Transport::None | Transport::Constant => {
            let v = if cfg.transport == Transport::None {
                vec![0.0; cfg.dim()]
            } else {
                cfg.velocity.clone()
            };
            let centers = mix
                .centers
                .iter()
                .map(|c| c.iter().zip(&v).map(|(x, vx)| x + vx * t).collect())
                .collect();
            let moved = GaussianMixture::new(centers, (mix.sigma * mix.sigma + 2.0 * d * t).sqrt());
            sample_initial(&moved, grid)?
        }
        Transport::Shear => {
            // a scale s shears like the unit-half-width field run for s (L/2) T;
            // the diffusion time is rescaled so the width still grows by 2 D T
            let s = cfg.shear_scale.unwrap_or(1.0 / half);
            let t_eff = s * half * t;
            if t_eff == 0.0 {
                let wide = GaussianMixture::new(mix.centers.clone(), (mix.sigma.powi(2) + 2.0 * d * t).sqrt());
                sample_initial(&wide, grid)?
            } else {
                analytic_shear(mix, grid, t_eff, d * t / t_eff)?
            }
        }
        Transport::Rotation => analytic_rotation(mix, grid, t, d)?,
        Transport::Shear3d => analytic_shear3d(mix, grid, t, d)?,
    })
}

fn reference(cfg: &ExperimentConfig, s: &Setup, dt: f64) -> Result<Option<FieldArray>, CliError> {
    Ok(match cfg.oracle {
        Oracle::Analytic => Some(analytic(cfg, &s.grid, &s.mix)?),
        Oracle::Fd => Some(fd_solve(&s.grid, &s.spec, cfg.d, dt, cfg.steps_for(dt)?, &s.u0)?.normalized()?),
        Oracle::None => None,
    })
}

fn run_evolve(cfg: &ExperimentConfig, s: &Setup, dt: f64) -> Result<Evolution, CliError> {
    Ok(evolve(&s.grid, &s.spec, cfg.d, dt, cfg.steps_for(dt)?, &s.u0, cfg.drop_cv1)?)
}

fn step_report(cfg: &ExperimentConfig, s: &Setup) -> Result<GateReport, CliError> {
    let step = assemble_step(&s.grid, &s.spec, cfg.d, cfg.dt, cfg.drop_cv1)?;
    Ok(gate_report(&decompose(&step))?)
}

fn oracle_name(o: Oracle) -> &'static str {
    match o {
        Oracle::Analytic => "analytic",
        Oracle::Fd => "fd",
        Oracle::None => "none",
    }
}

/// Field CSV, `step,energy` trace and metrics for one run at `dt`.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Metrics, CliError> {
    let t0 = Instant::now();
    let dir = prepare_dir(cfg)?;
    let s = setup(cfg)?;
    let ev = run_evolve(cfg, &s, cfg.dt)?;
    write(dir, "field.csv", &ev.field.to_csv())?;
    let mut trace = String::from("step,energy\n");
    for (i, e) in ev.energy.iter().enumerate() {
        let _ = writeln!(trace, "{},{}", i + 1, sci(*e));
    }
    write(dir, "energy.csv", &trace)?;

    let mut m = Metrics::new();
    put(&mut m, "qubits", cfg.total_qubits());
    put(&mut m, "steps", ev.energy.len());
    put(&mut m, "dt", cfg.dt);
    put(&mut m, "weight", sci(ev.weight));
    put(&mut m, "norm_drift", sci(ev.norm_drift));
    put(&mut m, "oracle", oracle_name(cfg.oracle));
    if let Some(r) = reference(cfg, &s, cfg.dt)? {
        put(&mut m, "rel_l2", sci(rel_l2(&ev.field, &r)?));
    }
    let g = step_report(cfg, &s)?;
    put(&mut m, "step_one_qubit", g.one_qubit);
    put(&mut m, "step_cnot", g.cnot);
    put(&mut m, "step_depth", g.depth);
    write_metrics(dir, "metrics.txt", &m)?;
    write_timing(dir, "simulate", t0.elapsed().as_secs_f64())?;
    Ok(m)
}

fn block_report(n_alpha: usize, n_p: usize, advection: bool) -> Result<GateReport, CliError> {
    let g = GridSpec::new(vec![n_alpha], n_p, 4.0)?;
    let (t, d) = if advection {
        (TransportSpec::constant(&[1.0]), 0.0)
    } else {
        (TransportSpec::none(1), 1.0)
    };
    Ok(gate_report(&decompose(&assemble_step(&g, &t, d, 0.1, false)?))?)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Per-block gate table across the `n_alpha` and `n_p` sweeps plus the
/// configured step, with fitted scaling exponents.
pub fn gatecount(cfg: &ExperimentConfig) -> Result<Metrics, CliError> {
    let t0 = Instant::now();
    let dir = prepare_dir(cfg)?;
    let (na, np) = (&cfg.gate_n_alpha, &cfg.gate_n_p);
    if na.is_empty() || np.is_empty() {
        return Err(CliError::Config("gate_n_alpha and gate_n_p must be non-empty".into()));
    }
    let np0 = np[0];
    let na_top = *na.iter().max().unwrap_or(&3);
    let mut csv = String::from("block,n_alpha,n_p,one_qubit,cnot,depth\n");
    let mut m = Metrics::new();
    for (name, adv) in [("advection", true), ("diffusion", false)] {
        let mut by_na = Vec::new();
        for &n in na {
            let r = block_report(n, np0, adv)?;
            let _ = writeln!(csv, "{name},{n},{np0},{},{},{}", r.one_qubit, r.cnot, r.depth);
            by_na.push(r);
        }
        let mut by_np = Vec::new();
        for &p in np {
            let r = block_report(na_top, p, adv)?;
            let _ = writeln!(csv, "{name},{na_top},{p},{},{},{}", r.one_qubit, r.cnot, r.depth);
            by_np.push(r);
        }
        if na.len() >= 2 {
            let x: Vec<f64> = na.iter().map(|&n| n as f64).collect();
            let y: Vec<f64> = by_na.iter().map(|r| r.cnot.max(1) as f64).collect();
            put(&mut m, &format!("{name}_cnot_slope_n_alpha"), format!("{:.4}", loglog_slope(&x, &y)));
        }
        if np.len() >= 2 {
            let ratios: Vec<String> = by_np
                .windows(2)
                .map(|w| format!("{:.4}", w[1].cnot as f64 / w[0].cnot.max(1) as f64))
                .collect();
            put(&mut m, &format!("{name}_cnot_ratio_n_p"), ratios.join(","));
            let x: Vec<f64> = np.iter().map(|&p| (1u64 << p) as f64).collect();
            let y: Vec<f64> = by_np.iter().map(|r| r.one_qubit.max(1) as f64).collect();
            put(&mut m, &format!("{name}_one_qubit_slope_slots"), format!("{:.4}", loglog_slope(&x, &y)));
        }
    }
    let s = setup(cfg)?;
    let r = step_report(cfg, &s)?;
    let dims: Vec<String> = cfg.n.iter().map(|n| n.to_string()).collect();
    let _ = writeln!(csv, "step,{},{},{},{},{}", dims.join("+"), cfg.n_p, r.one_qubit, r.cnot, r.depth);
    put(&mut m, "step_one_qubit", r.one_qubit);
    put(&mut m, "step_cnot", r.cnot);
    put(&mut m, "step_depth", r.depth);
    write(dir, "gatecount.csv", &csv)?;
    write_metrics(dir, "gatecount_metrics.txt", &m)?;
    write_timing(dir, "gatecount", t0.elapsed().as_secs_f64())?;
    Ok(m)
}

/// Samples the evolved field, reconstructs it and applies threshold plus
/// smoothing. Errors are against the statevector field.
pub fn sample(cfg: &ExperimentConfig) -> Result<Metrics, CliError> {
    if cfg.shots == 0 {
        return Err(CliError::Config("shots must be at least 1".into()));
    }
    let t0 = Instant::now();
    let dir = prepare_dir(cfg)?;
    let s = setup(cfg)?;
    let ev = run_evolve(cfg, &s, cfg.dt)?;
    let hist = sample_field(&ev.field, cfg.shots, cfg.seed)?;
    let raw = counts_to_field(&hist, ev.field.shape())?;
    let thresholded = threshold_mitigate(&raw, cfg.eps_cut)?;
    let mitigated = savgol2d(&thresholded, cfg.sg_window, cfg.sg_order)?.normalized()?;
    write(dir, "counts.txt", &hist.to_text())?;
    write(dir, "statevector.csv", &ev.field.to_csv())?;
    write(dir, "raw.csv", &raw.to_csv())?;
    write(dir, "mitigated.csv", &mitigated.to_csv())?;
    let mut m = Metrics::new();
    put(&mut m, "shots", cfg.shots);
    put(&mut m, "seed", cfg.seed);
    put(&mut m, "rel_l2_raw", sci(rel_l2(&raw, &ev.field)?));
    put(&mut m, "rel_l2_threshold", sci(rel_l2(&thresholded, &ev.field)?));
    put(&mut m, "rel_l2_mitigated", sci(rel_l2(&mitigated, &ev.field)?));
    write_metrics(dir, "metrics.txt", &m)?;
    write_timing(dir, "sample", t0.elapsed().as_secs_f64())?;
    Ok(m)
}

/// Pairwise errors between the emulator, the classical solver and the
/// closed-form solution. Entry `(row, col)` is `rel_l2(row, col)`.
pub fn compare(cfg: &ExperimentConfig) -> Result<Metrics, CliError> {
    let t0 = Instant::now();
    let dir = prepare_dir(cfg)?;
    let s = setup(cfg)?;
    let steps = cfg.steps_for(cfg.dt)?;
    let fields = [
        ("quantum", run_evolve(cfg, &s, cfg.dt)?.field),
        ("fd", fd_solve(&s.grid, &s.spec, cfg.d, cfg.dt, steps, &s.u0)?.normalized()?),
        ("analytic", analytic(cfg, &s.grid, &s.mix)?),
    ];
    let mut csv = String::from("num\\ref,quantum,fd,analytic\n");
    let mut m = Metrics::new();
    for (a, fa) in &fields {
        csv.push_str(a);
        for (b, fb) in &fields {
            let e = rel_l2(fa, fb)?;
            let _ = write!(csv, ",{}", sci(e));
            if a < b {
                put(&mut m, &format!("{a}_vs_{b}"), sci(e));
            }
        }
        csv.push('\n');
    }
    write(dir, "compare.csv", &csv)?;
    write_metrics(dir, "metrics.txt", &m)?;
    write_timing(dir, "compare", t0.elapsed().as_secs_f64())?;
    Ok(m)
}

/// One run per `sweep_dt` entry against the configured oracle.
pub fn sweep(cfg: &ExperimentConfig) -> Result<Metrics, CliError> {
    let t0 = Instant::now();
    let dir = prepare_dir(cfg)?;
    if cfg.oracle == Oracle::None {
        return Err(CliError::Config("sweep needs oracle = analytic or fd".into()));
    }
    let s = setup(cfg)?;
    let mut csv = String::from("dt,steps,rel_l2,weight\n");
    let mut errs = Vec::new();
    for &dt in &cfg.sweep_dt {
        let ev = run_evolve(cfg, &s, dt)?;
        let r = reference(cfg, &s, dt)?.expect("oracle checked above");
        let e = rel_l2(&ev.field, &r)?;
        let _ = writeln!(csv, "{dt},{},{},{}", ev.energy.len(), sci(e), sci(ev.weight));
        errs.push(e);
    }
    write(dir, "sweep.csv", &csv)?;
    let mut m = Metrics::new();
    put(&mut m, "oracle", oracle_name(cfg.oracle));
    let monotone = cfg
        .sweep_dt
        .iter()
        .zip(&errs)
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| (w[0].0 > w[1].0) == (w[0].1 > w[1].1));
    put(&mut m, "monotone_in_dt", monotone);
    if errs.len() >= 2 {
        put(&mut m, "order", format!("{:.4}", loglog_slope(&cfg.sweep_dt, &errs)));
    }
    write_metrics(dir, "metrics.txt", &m)?;
    write_timing(dir, "sweep", t0.elapsed().as_secs_f64())?;
    Ok(m)
}
