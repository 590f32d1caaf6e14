//! Flat `key = value` experiment configuration and the shipped presets.

use std::fmt;
use std::path::PathBuf;

use advq::field::GridSpec;
use advq::oracle::GaussianMixture;
use advq::transport::TransportSpec;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transport {
    None,
    Constant,
    /// `v_x = scale * y`; the default scale is `2 / L`.
    Shear,
    Rotation,
    Shear3d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    /// One Gaussian at the grid centre.
    Centered,
    /// Four Gaussians at `L/2 +- L/4` (2D only).
    Quad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    Analytic,
    Fd,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Qubits per axis.
    pub n: Vec<usize>,
    pub n_p: usize,
    pub r: f64,
    pub transport: Transport,
    pub velocity: Vec<f64>,
    pub shear_scale: Option<f64>,
    pub d: f64,
    pub dt: f64,
    pub t: f64,
    pub initial: Initial,
    /// Gaussian width in grid units; defaults to `L/4`.
    pub sigma: Option<f64>,
    pub drop_cv1: bool,
    pub seed: u64,
    pub shots: u64,
    pub eps_cut: f64,
    pub sg_window: usize,
    pub sg_order: usize,
    pub oracle: Oracle,
    pub sweep_dt: Vec<f64>,
    pub gate_n_alpha: Vec<usize>,
    pub gate_n_p: Vec<usize>,
    pub out_dir: PathBuf,
    pub max_qubits: Option<usize>,
    /// Full-scale run; refused without `--allow-long`.
    pub long: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: vec![6, 6],
            n_p: 1,
            r: 4.0,
            transport: Transport::Shear,
            velocity: Vec::new(),
            shear_scale: None,
            d: 0.0,
            dt: 0.1,
            t: 8.0,
            initial: Initial::Centered,
            sigma: None,
            drop_cv1: false,
            seed: 1,
            shots: 100_000,
            eps_cut: 1e-5,
            sg_window: 7,
            sg_order: 3,
            oracle: Oracle::Analytic,
            sweep_dt: vec![0.5, 0.1, 0.02],
            gate_n_alpha: vec![3, 4, 5, 6, 7, 8],
            gate_n_p: vec![1, 2, 3],
            out_dir: PathBuf::from("advq-out"),
            max_qubits: None,
            long: false,
        }
    }
}

pub const PRESETS: &[(&str, &str)] = &[
    (
        "shear-1024",
        "n = 10,10\nn_p = 1\nR = 4\ntransport = shear\nD = 0\ndt = 0.1\nT = 128\nsigma = 256\nsweep_dt = 0.5,0.1,0.02\nlong = true\n",
    ),
    (
        "rotation-1024",
        "n = 10,10\nn_p = 1\nR = 4\ntransport = rotation\nD = 0\ndt = 0.1\nT = 128\ninitial = quad\nsigma = 64\nsweep_dt = 0.5,0.1,0.02\nlong = true\n",
    ),
    (
        "advdiff-1024",
        "n = 10,10\nn_p = 3\nR = 4\ntransport = shear\nD = 1\ndt = 0.2\nT = 128\nsigma = 128\nsweep_dt = 0.2\nlong = true\n",
    ),
    (
        "shear3d-512",
        "n = 9,9,9\nn_p = 3\nR = 4\ntransport = shear3d\nD = 1\ndt = 0.1\nT = 64\nsigma = 64\nsweep_dt = 0.1\nlong = true\n",
    ),
    (
        "hw-16q",
        "n = 8,8\nn_p = 2\nR = 8\ntransport = shear\nshear_scale = 0.00390625\nD = 0\ndt = 1\nT = 40\ninitial = quad\nsigma = 32\ndrop_cv1 = true\nshots = 100000\neps_cut = 1e-5\n",
    ),
    (
        "hw-advdiff-19q",
        "n = 8,8\nn_p = 3\nR = 8\ntransport = shear\nshear_scale = 0.00390625\nD = 1\ndt = 1\nT = 40\ninitial = quad\nsigma = 32\ndrop_cv1 = true\n",
    ),
    (
        "desk-shear",
        "n = 6,6\nn_p = 1\nR = 4\ntransport = shear\nD = 0\ndt = 0.1\nT = 8\nsigma = 16\nsweep_dt = 0.5,0.1,0.02\n",
    ),
    (
        "desk-rotation",
        "n = 6,6\nn_p = 1\nR = 4\ntransport = rotation\nD = 0\ndt = 0.1\nT = 8\ninitial = quad\nsigma = 4\nsweep_dt = 0.5,0.1,0.02\n",
    ),
    (
        "desk-diffusion",
        "n = 8,8\nn_p = 3\nR = 4\ntransport = none\nD = 1\ndt = 0.2\nT = 32\nsigma = 32\n",
    ),
    (
        "desk-3dshear",
        "n = 6,6,6\nn_p = 3\nR = 4\ntransport = shear3d\nD = 1\ndt = 0.2\nT = 16\nsigma = 8\nsweep_dt = 0.4,0.2\n",
    ),
];

pub fn preset(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            CliError::Config(format!("unknown preset {name:?}; known: {}", names.join(", ")))
        })
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError>
where
    T::Err: fmt::Display,
{
    v.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| bad(key, v, e)))
        .collect()
}

fn one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e| bad(key, v, e))
}

fn bad(key: &str, v: &str, why: impl fmt::Display) -> CliError {
    CliError::Config(format!("{key} = {v:?}: {why}"))
}

impl ExperimentConfig {
    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply(&mut self, text: &str) -> Result<(), CliError> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "n" => self.n = list(key, v)?,
            "n_p" => self.n_p = one(key, v)?,
            "R" | "r" => self.r = one(key, v)?,
            "transport" => {
                self.transport = match v {
                    "none" => Transport::None,
                    "constant" => Transport::Constant,
                    "shear" => Transport::Shear,
                    "rotation" => Transport::Rotation,
                    "shear3d" => Transport::Shear3d,
                    _ => return Err(bad(key, v, "expected none|constant|shear|rotation|shear3d")),
                }
            }
            "velocity" => self.velocity = list(key, v)?,
            "shear_scale" => self.shear_scale = Some(one(key, v)?),
            "D" | "d" => self.d = one(key, v)?,
            "dt" => self.dt = one(key, v)?,
            "T" | "t" => self.t = one(key, v)?,
            "initial" => {
                self.initial = match v {
                    "centered" => Initial::Centered,
                    "quad" => Initial::Quad,
                    _ => return Err(bad(key, v, "expected centered|quad")),
                }
            }
            "sigma" => self.sigma = Some(one(key, v)?),
            "drop_cv1" => self.drop_cv1 = one(key, v)?,
            "seed" => self.seed = one(key, v)?,
            "shots" => self.shots = one(key, v)?,
            "eps_cut" => self.eps_cut = one(key, v)?,
            "sg_window" => self.sg_window = one(key, v)?,
            "sg_order" => self.sg_order = one(key, v)?,
            "oracle" => {
                self.oracle = match v {
                    "analytic" => Oracle::Analytic,
                    "fd" => Oracle::Fd,
                    "none" => Oracle::None,
                    _ => return Err(bad(key, v, "expected analytic|fd|none")),
                }
            }
            "sweep_dt" => self.sweep_dt = list(key, v)?,
            "gate_n_alpha" => self.gate_n_alpha = list(key, v)?,
            "gate_n_p" => self.gate_n_p = list(key, v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "max_qubits" => self.max_qubits = Some(one(key, v)?),
            "long" => self.long = one(key, v)?,
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    /// Side length of axis 0.
    pub fn side(&self) -> f64 {
        (1usize << self.n[0]) as f64
    }

    pub fn total_qubits(&self) -> usize {
        self.n.iter().sum::<usize>() + self.n_p
    }

    pub fn cap(&self) -> usize {
        self.max_qubits.unwrap_or_else(advq::statevec::max_qubits)
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        GridSpec::new(self.n.clone(), self.n_p, self.r).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn transport_spec(&self) -> Result<TransportSpec, CliError> {
        let d = self.dim();
        let l = self.side();
        let need = |k: usize, what: &str| {
            if d == k {
                Ok(())
            } else {
                Err(CliError::Config(format!("{what} transport needs {k} axes, got {d}")))
            }
        };
        Ok(match self.transport {
            Transport::None => TransportSpec::none(d),
            Transport::Constant => {
                if self.velocity.len() != d {
                    return Err(CliError::Config(format!(
                        "velocity has {} components for {d} axes",
                        self.velocity.len()
                    )));
                }
                TransportSpec::constant(&self.velocity)
            }
            Transport::Shear => {
                need(2, "shear")?;
                match self.shear_scale {
                    Some(s) => TransportSpec::shear_with_scale(2, 0, 1, s),
                    None => TransportSpec::shear2d(l),
                }
            }
            Transport::Rotation => {
                need(2, "rotation")?;
                TransportSpec::rotation2d(l)
            }
            Transport::Shear3d => {
                need(3, "shear3d")?;
                TransportSpec::shear3d(l)
            }
        })
    }

    pub fn mixture(&self) -> Result<GaussianMixture, CliError> {
        let l = self.side();
        let sigma = self.sigma.unwrap_or(l / 4.0);
        Ok(match self.initial {
            Initial::Centered => GaussianMixture::centered(self.dim(), l, sigma),
            Initial::Quad => {
                if self.dim() != 2 {
                    return Err(CliError::Config("initial = quad needs two axes".into()));
                }
                GaussianMixture::quad(l, sigma)
            }
        })
    }

    pub fn steps_for(&self, dt: f64) -> Result<usize, CliError> {
        if !(dt > 0.0 && dt.is_finite()) || !(self.t > 0.0 && self.t.is_finite()) {
            return Err(CliError::Config(format!("need dt > 0 and T > 0, got dt {dt}, T {}", self.t)));
        }
        let k = self.t / dt;
        if (k - k.round()).abs() > 1e-9 * k.max(1.0) {
            return Err(CliError::Config(format!("T / dt = {k} is not an integer")));
        }
        Ok(k.round() as usize)
    }

    /// Checks everything that can be checked without running: shapes,
    /// step count, CFL bounds and the qubit cap. `compare` additionally
    /// needs `D dt <= 1/2`, which the classical solver enforces itself.
    pub fn validate(&self, allow_long: bool) -> Result<(), CliError> {
        if self.n.is_empty() || self.n.len() > 3 || self.n.contains(&0) {
            return Err(CliError::Config(format!("n = {:?}: need 1 to 3 axes of >= 1 qubit", self.n)));
        }
        if self.n.iter().any(|&q| q != self.n[0]) {
            return Err(CliError::Config("all axes must have the same qubit count".into()));
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(CliError::Config(format!("D = {} must be >= 0", self.d)));
        }
        let grid = self.grid()?;
        let spec = self.transport_spec()?;
        self.mixture()?;
        for &dt in std::iter::once(&self.dt).chain(&self.sweep_dt) {
            self.steps_for(dt)?;
            spec.check_cfl(&grid, dt).map_err(|e| CliError::Config(e.to_string()))?;
            // the explicit solver needs this; the unitary evolution does not
            if self.oracle == Oracle::Fd && self.d * dt > 0.5 {
                return Err(CliError::Config(format!("D dt = {} > 0.5", self.d * dt)));
            }
        }
        let q = self.total_qubits();
        if q > self.cap() {
            return Err(CliError::Capacity(format!(
                "{q} qubits ({}) exceed the cap of {}; raise it with {} or max_qubits",
                human_bytes(q),
                self.cap(),
                advq::statevec::MAX_QUBITS_ENV
            )));
        }
        if self.long && !allow_long {
            return Err(CliError::Config(format!(
                "full-scale run: {q} qubits, {} state, {} steps at dt {}; pass --allow-long",
                human_bytes(q),
                self.steps_for(self.dt)?,
                self.dt
            )));
        }
        Ok(())
    }
}

/// Statevector size for `q` qubits.
pub fn human_bytes(q: usize) -> String {
    let b = 16.0 * (1u64 << q) as f64;
    let units = ["B", "KiB", "MiB", "GiB", "TiB"];
    let mut v = b;
    let mut i = 0;
    while v >= 1024.0 && i + 1 < units.len() {
        v /= 1024.0;
        i += 1;
    }
    format!("{v:.1} {}", units[i])
}
