//! Analytic benchmark solutions, a classical finite-difference solver and the
//! relative l2 metric. All lengths are in grid units and `L` is the axis length.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{FieldArray, GridSpec};
use crate::transport::TransportSpec;

/// Image sums stop once a term falls below this.
pub const IMAGE_CUTOFF: f64 = 1e-14;

/// Sum of isotropic Gaussians of common width.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub centers: Vec<Vec<f64>>,
    pub sigma: f64,
    pub normalized: bool,
}

impl GaussianMixture {
    pub fn new(centers: Vec<Vec<f64>>, sigma: f64) -> Self {
        Self {
            centers,
            sigma,
            normalized: true,
        }
    }

    /// One centre at `L/2` on every axis.
    pub fn centered(d: usize, l: f64, sigma: f64) -> Self {
        Self::new(vec![vec![l / 2.0; d]], sigma)
    }

    /// Four centres at `L/2 +- L/4` in 2D.
    pub fn quad(l: f64, sigma: f64) -> Self {
        let m = [l / 2.0 + l / 4.0, l / 2.0 - l / 4.0];
        let centers = m
            .iter()
            .flat_map(|&a| m.iter().map(move |&b| vec![a, b]))
            .collect();
        Self::new(centers, sigma)
    }

    fn check(&self, d: usize) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Invalid(format!("sigma {} must be positive", self.sigma)));
        }
        if self.centers.is_empty() {
            return Err(Error::Invalid("mixture has no centres".into()));
        }
        if let Some(c) = self.centers.iter().find(|c| c.len() != d) {
            return Err(Error::Shape(format!(
                "centre {c:?} does not match {d} dimensions"
            )));
        }
        Ok(())
    }
}

/// `sum_m exp(-(delta + m L)^2 / (2 sigma^2))`.
pub fn periodic_gaussian(delta: f64, l: f64, sigma: f64) -> f64 {
    let two_s2 = 2.0 * sigma * sigma;
    let base = delta - l * (delta / l).round();
    let mut sum = (-base * base / two_s2).exp();
    for m in 1.. {
        let a = base + m as f64 * l;
        let b = base - m as f64 * l;
        let ta = (-a * a / two_s2).exp();
        let tb = (-b * b / two_s2).exp();
        sum += ta + tb;
        if ta < IMAGE_CUTOFF && tb < IMAGE_CUTOFF {
            break;
        }
    }
    sum
}

/// Evaluates the mixture at the foot `foot(coords)` of the characteristic,
/// with width `sigma`.
fn evaluate(
    mix: &GaussianMixture,
    shape: &[usize],
    sigma: f64,
    normalize: bool,
    foot: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<FieldArray> {
    mix.check(shape.len())?;
    let ls: Vec<f64> = shape.iter().map(|&n| n as f64).collect();
    let f = FieldArray::from_fn(shape.to_vec(), |c| {
        let x: Vec<f64> = c.iter().map(|&v| v as f64).collect();
        let p = foot(&x);
        mix.centers
            .iter()
            .map(|mu| {
                p.iter()
                    .zip(mu)
                    .zip(&ls)
                    .map(|((&pi, &m), &l)| periodic_gaussian(pi - m, l, sigma))
                    .product::<f64>()
            })
            .sum()
    });
    if normalize {
        f.normalized()
    } else {
        Ok(f)
    }
}

fn sigma_t(sigma: f64, t: f64, d: f64) -> Result<f64> {
    if !(t >= 0.0 && d >= 0.0) {
        return Err(Error::Invalid(format!("need T >= 0 and D >= 0, got {t}, {d}")));
    }
    Ok((sigma * sigma + 2.0 * d * t).sqrt())
}

pub fn sample_initial(mix: &GaussianMixture, grid: &GridSpec) -> Result<FieldArray> {
    evaluate(mix, &grid.shape(), mix.sigma, mix.normalized, |x| x.to_vec())
}

/// Transport `(y/(L/2), 0)`: `x` is shifted back by `y T/(L/2)`.
pub fn analytic_shear(mix: &GaussianMixture, grid: &GridSpec, t: f64, d: f64) -> Result<FieldArray> {
    if grid.dim() != 2 {
        return Err(Error::Shape("shear solution is two-dimensional".into()));
    }
    let half = grid.axis_len(0) as f64 / 2.0;
    let s = sigma_t(mix.sigma, t, d)?;
    evaluate(mix, &grid.shape(), s, true, |x| vec![x[0] - x[1] / half * t, x[1]])
}

/// Transport `((y - L/2)/(L/2), -(x - L/2)/(L/2))`: clockwise rotation by
/// `2T/L` about the centre.
pub fn analytic_rotation(
    mix: &GaussianMixture,
    grid: &GridSpec,
    t: f64,
    d: f64,
) -> Result<FieldArray> {
    if grid.dim() != 2 {
        return Err(Error::Shape("rotation solution is two-dimensional".into()));
    }
    let l = grid.axis_len(0) as f64;
    let c = l / 2.0;
    let (sn, cs) = (2.0 * t / l).sin_cos();
    let s = sigma_t(mix.sigma, t, d)?;
    evaluate(mix, &grid.shape(), s, true, |x| {
        let (dx, dy) = (x[0] - c, x[1] - c);
        vec![dx * cs - dy * sn + c, dx * sn + dy * cs + c]
    })
}

/// Transport `(z/(L/2), z/(L/2), 0)`.
pub fn analytic_shear3d(
    mix: &GaussianMixture,
    grid: &GridSpec,
    t: f64,
    d: f64,
) -> Result<FieldArray> {
    if grid.dim() != 3 {
        return Err(Error::Shape("3D shear solution is three-dimensional".into()));
    }
    let half = grid.axis_len(2) as f64 / 2.0;
    let s = sigma_t(mix.sigma, t, d)?;
    evaluate(mix, &grid.shape(), s, true, |x| {
        let shift = x[2] / half * t;
        vec![x[0] - shift, x[1] - shift, x[2]]
    })
}

/// `||u_num - u_ref|| / ||u_ref||`.
pub fn rel_l2(u_num: &FieldArray, u_ref: &FieldArray) -> Result<f64> {
    if u_num.shape() != u_ref.shape() {
        return Err(Error::Shape(format!(
            "shapes {:?} and {:?} differ",
            u_num.shape(),
            u_ref.shape()
        )));
    }
    let r = u_ref.norm();
    if r == 0.0 {
        return Err(Error::ZeroInput("reference field"));
    }
    let diff = u_num
        .data()
        .iter()
        .zip(u_ref.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(diff / r)
}

/// Explicit upwind/central stepping of the same split the circuits use: per
/// axis a diffusion sub-step, the linear-velocity sub-step, then the constant
/// one. Velocities multiply the upwinded cell (flux form), so mass is
/// conserved exactly.
pub fn fd_solve(
    grid: &GridSpec,
    transport: &TransportSpec,
    d: f64,
    dt: f64,
    n_steps: usize,
    initial: &FieldArray,
) -> Result<FieldArray> {
    transport.validate(grid)?;
    if initial.shape() != grid.shape().as_slice() {
        return Err(Error::Shape(format!(
            "initial field {:?} does not match grid {:?}",
            initial.shape(),
            grid.shape()
        )));
    }
    if !(dt >= 0.0 && dt.is_finite() && d >= 0.0 && d.is_finite()) {
        return Err(Error::Invalid(format!("bad dt {dt} or D {d}")));
    }
    transport.check_cfl(grid, dt)?;
    if d * dt > 0.5 + 1e-12 {
        return Err(Error::Cfl(format!("D dt = {} > 1/2", d * dt)));
    }
    let shape = grid.shape();
    let mut u = initial.clone();
    let mut next = u.clone();
    for _ in 0..n_steps {
        for axis in 0..grid.dim() {
            let t = transport.axes[axis];
            if d > 0.0 {
                sweep(&u, &mut next, axis, &shape, |_, c, l, r| c + d * dt * (l - 2.0 * c + r));
                std::mem::swap(&mut u, &mut next);
            }
            if let Some(lin) = t.linear.filter(|l| l.scale != 0.0) {
                let v = |coords: &[usize]| lin.scale * coords[lin.axis] as f64;
                sweep(&u, &mut next, axis, &shape, |coords, c, l, r| {
                    upwind(v(coords) * dt, c, l, r)
                });
                std::mem::swap(&mut u, &mut next);
            }
            if t.constant != 0.0 {
                let cfl = t.constant * dt;
                sweep(&u, &mut next, axis, &shape, |_, c, l, r| upwind(cfl, c, l, r));
                std::mem::swap(&mut u, &mut next);
            }
        }
    }
    Ok(u)
}

/// One explicit upwind update with Courant number `c`; the velocity is
/// constant along the sweep axis.
fn upwind(c: f64, centre: f64, left: f64, right: f64) -> f64 {
    if c >= 0.0 {
        centre - c * (centre - left)
    } else {
        centre - c * (right - centre)
    }
}

fn sweep(
    u: &FieldArray,
    out: &mut FieldArray,
    axis: usize,
    shape: &[usize],
    f: impl Fn(&[usize], f64, f64, f64) -> f64,
) {
    let n = shape[axis];
    let stride: usize = shape[..axis].iter().product();
    let src = u.data();
    for i in 0..src.len() {
        let coords = u.coords(i);
        let k = coords[axis];
        let base = i - k * stride;
        let l = src[base + (k + n - 1) % n * stride];
        let r = src[base + (k + 1) % n * stride];
        out.data_mut()[i] = f(&coords, src[i], l, r);
    }
}

/// Per-axis variance about the circular mean, weighting each cell by its
/// field value.
pub fn fit_variance(field: &FieldArray) -> Result<Vec<f64>> {
    let total = field.sum();
    if total <= 0.0 {
        return Err(Error::ZeroInput("field with non-positive mass"));
    }
    let shape = field.shape().to_vec();
    let mut out = Vec::with_capacity(shape.len());
    for (axis, &n) in shape.iter().enumerate() {
        let l = n as f64;
        let (mut sc, mut ss) = (0.0, 0.0);
        for (i, &w) in field.data().iter().enumerate() {
            let th = 2.0 * PI * field.coords(i)[axis] as f64 / l;
            sc += w * th.cos();
            ss += w * th.sin();
        }
        let mean = (ss.atan2(sc) / (2.0 * PI) * l).rem_euclid(l);
        let var = field
            .data()
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let dx = field.coords(i)[axis] as f64 - mean;
                let dx = dx - l * (dx / l).round();
                w * dx * dx
            })
            .sum::<f64>()
            / total;
        out.push(var);
    }
    Ok(out)
}
