//! Pseudo-spectral solver for the periodic incompressible Navier-Stokes equations
//!
//! ```text
//! d_t u - nu Lap u + div(u (x) u) + grad q = div F,    div u = 0,
//! ```
//!
//! written as `d_t u = nu Lap u + P(-div(u (x) u) + div F)` with `P` the Leray
//! projection. The viscous term is integrated exactly (integrating factor),
//! the rest by classical RK4. `(div F)_i = sum_j d_j F_ij`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pressure::riesz_pressure;
use crate::spectral::snapshot::{read_snapshot, write_snapshot, Snapshot};
use crate::spectral::{
    divergence, gradient, laplacian, GridSpec, ScalarField, Spectrum, TensorField, TimeSeries,
    VectorField,
};
use crate::weights::{weighted_norm, WeightSpec};

/// Factor on `max(max |u_0|, 1)` beyond which a run is declared blown up.
pub const BLOW_UP_FACTOR: f64 = 1e6;

/// Tolerance on `max |div u|` for accepted states.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// Forcing tensor as a function of time.
pub trait Forcing: Sync {
    /// `None` stands for `F = 0`.
    fn at(&self, t: f64) -> Option<TensorField>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoForcing;

impl Forcing for NoForcing {
    fn at(&self, _t: f64) -> Option<TensorField> {
        None
    }
}

#[derive(Debug, Clone)]
pub struct SteadyForcing(pub TensorField);

impl Forcing for SteadyForcing {
    fn at(&self, _t: f64) -> Option<TensorField> {
        Some(self.0.clone())
    }
}

impl<F: Fn(f64) -> TensorField + Sync> Forcing for F {
    fn at(&self, t: f64) -> Option<TensorField> {
        Some(self(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub dt: f64,
    pub horizon: f64,
    pub viscosity: f64,
    /// 2/3-rule truncation of the quadratic term.
    pub dealias: bool,
    /// Steps between stored snapshots.
    pub snapshot_every: usize,
    /// Weight exponent of the recorded hypothesis norms.
    pub weight_gamma: f64,
    /// Upper bound on `dt max|u| / h`.
    pub cfl_limit: f64,
}

impl SimConfig {
    pub fn new(grid: GridSpec, dt: f64, horizon: f64) -> Self {
        Self {
            grid,
            dt,
            horizon,
            viscosity: 1.0,
            dealias: true,
            snapshot_every: 1,
            weight_gamma: 1.0,
            cfl_limit: 0.5,
        }
    }

    pub fn validate(&self) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("time step {}", self.dt)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon {}", self.horizon)));
        }
        if !(self.viscosity.is_finite() && self.viscosity >= 0.0) {
            return Err(Error::InvalidParameter(format!("viscosity {}", self.viscosity)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidParameter("snapshot_every must be positive".into()));
        }
        if !(self.cfl_limit > 0.0) {
            return Err(Error::InvalidParameter(format!("CFL limit {}", self.cfl_limit)));
        }
        let steps = (self.horizon / self.dt).round();
        if (steps * self.dt - self.horizon).abs() > 1e-9 * self.horizon || steps < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "horizon {} is not a multiple of dt = {}",
                self.horizon, self.dt
            )));
        }
        let steps = steps as usize;
        if steps % self.snapshot_every != 0 {
            return Err(Error::InvalidParameter(format!(
                "{steps} steps are not a multiple of snapshot_every = {}",
                self.snapshot_every
            )));
        }
        WeightSpec::new(self.grid.dim(), self.weight_gamma)?;
        Ok(steps)
    }
}

struct Integrator<'a> {
    config: SimConfig,
    forcing: &'a dyn Forcing,
    /// `|xi|^2` per half-spectrum bin.
    xi2: Vec<f64>,
    keep: Vec<bool>,
}

impl<'a> Integrator<'a> {
    fn new(config: SimConfig, forcing: &'a dyn Forcing) -> Self {
        let grid = config.grid;
        let d = grid.dim();
        let cutoff = (grid.n() / 3) as i64;
        let xi2 = (0..grid.spectral_len())
            .map(|s| grid.wavevector(s)[..d].iter().map(|v| v * v).sum())
            .collect();
        let keep = (0..grid.spectral_len())
            .map(|s| !config.dealias || grid.mode(s)[..d].iter().all(|m| m.abs() <= cutoff))
            .collect();
        Self { config, forcing, xi2, keep }
    }

    /// `P(-div(u (x) u) + div F)` and `max |u|`.
    fn rhs(&self, uhat: &[Spectrum], t: f64) -> Result<(Vec<Spectrum>, f64)> {
        let grid = self.config.grid;
        let d = grid.dim();
        let u: Vec<ScalarField> = uhat.par_iter().map(Spectrum::inverse).collect();
        let speed = (0..grid.len())
            .map(|k| u.iter().map(|c| c.values()[k] * c.values()[k]).sum::<f64>())
            .fold(0.0, f64::max)
            .sqrt();
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
        let products: Vec<Spectrum> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let prod = u[i].mul(&u[j]).expect("components share a grid");
                Spectrum::forward(&prod)
            })
            .collect();
        let product = |i: usize, j: usize| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            &products[pairs.iter().position(|&p| p == (a, b)).expect("pair")]
        };
        let forcing: Option<Vec<Spectrum>> = match self.forcing.at(t) {
            None => None,
            Some(f) => {
                if f.grid() != &grid {
                    return Err(Error::GridMismatch);
                }
                f.check_finite()?;
                Some(f.components().par_iter().map(Spectrum::forward).collect())
            }
        };
        let mut out: Vec<Spectrum> = (0..d).map(|_| Spectrum::zeros(grid)).collect();
        let mut n = vec![Complex64::new(0.0, 0.0); d];
        for s in 0..grid.spectral_len() {
            let xi = grid.wavevector(s);
            for i in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                if self.keep[s] {
                    for j in 0..d {
                        acc -= Complex64::new(0.0, xi[j]) * product(i, j).coeffs()[s];
                    }
                }
                if let Some(fs) = &forcing {
                    for j in 0..d {
                        acc += Complex64::new(0.0, xi[j]) * fs[i * d + j].coeffs()[s];
                    }
                }
                n[i] = acc;
            }
            let r2 = self.xi2[s];
            if r2 > 0.0 {
                let dot: Complex64 = (0..d).map(|k| n[k] * xi[k]).sum();
                for k in 0..d {
                    n[k] -= dot * (xi[k] / r2);
                }
            }
            for i in 0..d {
                out[i].coeffs_mut()[s] = n[i];
            }
        }
        Ok((out, speed))
    }

    fn decay(&self, tau: f64) -> Vec<f64> {
        self.xi2.iter().map(|k2| (-self.config.viscosity * k2 * tau).exp()).collect()
    }

    /// One integrating-factor RK4 step of size `dt` whose first stage is given.
    fn advance(&self, uhat: &[Spectrum], stage_a: Vec<Spectrum>, t: f64, dt: f64) -> Result<Vec<Spectrum>> {
        let e = self.decay(dt);
        let eh = self.decay(0.5 * dt);
        let combine = |parts: &[(&[Spectrum], &[f64], f64)]| -> Vec<Spectrum> {
            let grid = self.config.grid;
            (0..grid.dim())
                .map(|i| {
                    let mut s = Spectrum::zeros(grid);
                    for (src, factor, w) in parts {
                        for ((o, c), f) in s.coeffs_mut().iter_mut().zip(src[i].coeffs()).zip(factor.iter()) {
                            *o += c * (f * w);
                        }
                    }
                    s
                })
                .collect()
        };
        let ones = vec![1.0; e.len()];
        let a: Vec<Spectrum> = scale(&stage_a, dt);
        // b = dt N(E_h (u + a/2))
        let ub = combine(&[(uhat, &eh, 1.0), (&a, &eh, 0.5)]);
        let b = scale(&self.rhs(&ub, t + 0.5 * dt)?.0, dt);
        // c = dt N(E_h u + b/2)
        let uc = combine(&[(uhat, &eh, 1.0), (&b, &ones, 0.5)]);
        let c = scale(&self.rhs(&uc, t + 0.5 * dt)?.0, dt);
        // d = dt N(E u + E_h c)
        let ud = combine(&[(uhat, &e, 1.0), (&c, &eh, 1.0)]);
        let dd = scale(&self.rhs(&ud, t + dt)?.0, dt);
        Ok(combine(&[
            (uhat, &e, 1.0),
            (&a, &e, 1.0 / 6.0),
            (&b, &eh, 1.0 / 3.0),
            (&c, &eh, 1.0 / 3.0),
            (&dd, &ones, 1.0 / 6.0),
        ]))
    }
}

fn scale(v: &[Spectrum], s: f64) -> Vec<Spectrum> {
    v.iter()
        .map(|x| {
            let mut y = x.clone();
            y.coeffs_mut().iter_mut().for_each(|c| *c *= s);
            y
        })
        .collect()
}

fn check_state(u: &VectorField, grid: &GridSpec) -> Result<()> {
    if u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    u.check_finite()?;
    let div = divergence(u)?.max_abs();
    if div > DIVERGENCE_TOLERANCE * u.max_abs().max(1.0) {
        return Err(Error::InvalidParameter(format!("initial divergence {div:e}")));
    }
    Ok(())
}

fn to_field(uhat: &[Spectrum]) -> Result<VectorField> {
    VectorField::new(uhat.iter().map(Spectrum::inverse).collect())
}

/// One step of size `config.dt` from time `t`; fails on a CFL violation.
pub fn step(u: &VectorField, t: f64, config: &SimConfig, forcing: &dyn Forcing) -> Result<VectorField> {
    config.validate()?;
    check_state(u, &config.grid)?;
    let integ = Integrator::new(*config, forcing);
    let uhat: Vec<Spectrum> = u.components().iter().map(Spectrum::forward).collect();
    let (a, speed) = integ.rhs(&uhat, t)?;
    let cfl = config.dt * speed / config.grid.spacing();
    if cfl > config.cfl_limit {
        return Err(Error::CflViolation { cfl, limit: config.cfl_limit });
    }
    to_field(&integ.advance(&uhat, a, t, config.dt)?)
}

/// Quantities recorded along a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisNorms {
    /// `sup_t ||u(t)||_{L^2_{w_gamma}}`.
    pub sup_weighted_l2: f64,
    /// `int_0^T ||grad u||^2_{L^2_{w_gamma}} dt` (trapezoid over snapshots).
    pub grad_weighted_l2_sq: f64,
    /// `||u(t_k)||^2_{L^2}` per snapshot.
    pub energy: Vec<f64>,
    /// `max_k max |div u(t_k)|`.
    pub max_divergence: f64,
    /// Number of steps that were split to honour the CFL limit.
    pub cfl_substeps: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SimConfig,
    pub u: TimeSeries<VectorField>,
    /// Riesz pressure of each snapshot.
    pub q: TimeSeries<ScalarField>,
    pub forcing: TimeSeries<TensorField>,
    pub norms: HypothesisNorms,
}

fn grad_tensor(u: &VectorField) -> Result<Vec<ScalarField>> {
    let mut out = Vec::new();
    for c in u.components() {
        out.extend(gradient(c)?.into_components());
    }
    Ok(out)
}

fn record_norms(u: &TimeSeries<VectorField>, gamma: f64, cfl_substeps: usize) -> Result<HypothesisNorms> {
    let grid = *u.snapshots()[0].grid();
    let spec = WeightSpec::new(grid.dim(), gamma)?;
    let mut sup: f64 = 0.0;
    let mut grad_sq = Vec::with_capacity(u.len());
    let mut energy = Vec::with_capacity(u.len());
    let mut max_div: f64 = 0.0;
    for snap in u.snapshots() {
        sup = sup.max(weighted_norm(snap, 2.0, &spec)?);
        let g = grad_tensor(snap)?;
        let sq: f64 = g.iter().map(|c| weighted_norm(c, 2.0, &spec).map(|v| v * v)).sum::<Result<f64>>()?;
        grad_sq.push(sq);
        energy.push(snap.l2_norm().powi(2));
        max_div = max_div.max(divergence(snap)?.max_abs());
    }
    let dt = u.interval();
    let integral = if grad_sq.len() < 2 {
        0.0
    } else {
        dt * (grad_sq.iter().sum::<f64>() - 0.5 * (grad_sq[0] + grad_sq[grad_sq.len() - 1]))
    };
    Ok(HypothesisNorms {
        sup_weighted_l2: sup,
        grad_weighted_l2_sq: integral,
        energy,
        max_divergence: max_div,
        cfl_substeps,
    })
}

/// Integrates from `u0` to `config.horizon`, storing every `snapshot_every` steps.
///
/// Steps whose CFL number exceeds the limit are split into equal substeps.
pub fn run(config: &SimConfig, u0: &VectorField, forcing: &dyn Forcing) -> Result<Trajectory> {
    let steps = config.validate()?;
    let grid = config.grid;
    check_state(u0, &grid)?;
    let integ = Integrator::new(*config, forcing);
    let guard = BLOW_UP_FACTOR * u0.max_abs().max(1.0);
    let zero_forcing = TensorField::zeros(grid);
    let forcing_at = |t: f64| forcing.at(t).unwrap_or_else(|| zero_forcing.clone());

    let mut uhat: Vec<Spectrum> = u0.components().iter().map(Spectrum::forward).collect();
    let mut us = vec![u0.clone()];
    let mut fs = vec![forcing_at(0.0)];
    let mut substeps_taken = 0;
    let h = grid.spacing();
    for k in 0..steps {
        let t = k as f64 * config.dt;
        let (a, speed) = integ.rhs(&uhat, t)?;
        if !speed.is_finite() || speed > guard {
            return Err(Error::BlowUp { time: t, max_speed: speed });
        }
        let cfl = config.dt * speed / h;
        if cfl <= config.cfl_limit {
            uhat = integ.advance(&uhat, a, t, config.dt)?;
        } else {
            let m = (cfl / config.cfl_limit).ceil() as usize;
            substeps_taken += 1;
            let sub = config.dt / m as f64;
            let mut stage = a;
            for j in 0..m {
                let ts = t + j as f64 * sub;
                if j > 0 {
                    stage = integ.rhs(&uhat, ts)?.0;
                }
                uhat = integ.advance(&uhat, stage.clone(), ts, sub)?;
            }
        }
        if (k + 1) % config.snapshot_every == 0 {
            let u = to_field(&uhat)?;
            let t1 = (k + 1) as f64 * config.dt;
            let speed = u.max_abs();
            if !speed.is_finite() || speed > guard {
                return Err(Error::BlowUp { time: t1, max_speed: speed });
            }
            us.push(u);
            fs.push(forcing_at(t1));
        }
    }
    let interval = config.dt * config.snapshot_every as f64;
    let q: Vec<ScalarField> =
        us.par_iter().zip(fs.par_iter()).map(|(u, f)| riesz_pressure(u, f)).collect::<Result<_>>()?;
    let u = TimeSeries::uniform(interval, us)?;
    let norms = record_norms(&u, config.weight_gamma, substeps_taken)?;
    Ok(Trajectory {
        config: *config,
        q: TimeSeries::uniform(interval, q)?,
        forcing: TimeSeries::uniform(interval, fs)?,
        u,
        norms,
    })
}

/// `||d_t u - nu Lap u + (u . grad) u + grad q - div F||_{L^2}` at every
/// interior snapshot, `d_t` by centred differences.
pub fn momentum_residual(
    u: &TimeSeries<VectorField>,
    q: &TimeSeries<ScalarField>,
    forcing: &TimeSeries<TensorField>,
    viscosity: f64,
) -> Result<Vec<f64>> {
    if u.len() < 3 {
        return Err(Error::InsufficientData("centred differences need 3 snapshots".into()));
    }
    if q.len() != u.len() || forcing.len() != u.len() {
        return Err(Error::InvalidParameter("series of different lengths".into()));
    }
    let two_dt = 2.0 * u.interval();
    (1..u.len() - 1)
        .into_par_iter()
        .map(|k| {
            let snap = &u.snapshots()[k];
            let d = snap.dim();
            let grad_q = gradient(&q.snapshots()[k])?;
            let f = &forcing.snapshots()[k];
            let mut sq = 0.0;
            for i in 0..d {
                let dudt = u.snapshots()[k + 1].component(i).sub(u.snapshots()[k - 1].component(i))?.scale(1.0 / two_dt);
                let mut r = dudt.sub(&laplacian(snap.component(i))?.scale(viscosity))?;
                let grad_ui = gradient(snap.component(i))?;
                for j in 0..d {
                    r = r.add(&snap.component(j).mul(grad_ui.component(j))?)?;
                    r = r.sub(&gradient(f.entry(i, j))?.component(j).clone())?;
                }
                r = r.add(grad_q.component(i))?;
                sq += r.l2_norm().powi(2);
            }
            Ok(sq.sqrt())
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: SimConfig,
    pub times: Vec<f64>,
    pub snapshots: Vec<String>,
    pub norms: HypothesisNorms,
    pub momentum_residual: Vec<f64>,
}

fn component_names(d: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=d).map(|i| format!("u{i}")).collect();
    names.push("q".into());
    for i in 1..=d {
        for j in 1..=d {
            names.push(format!("F{i}{j}"));
        }
    }
    names
}

/// Writes `snap_XXXXX.{bin,json}` per snapshot and `manifest.json` into `dir`.
pub fn write_trajectory(dir: &Path, traj: &Trajectory) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let d = traj.config.grid.dim();
    let names = component_names(d);
    let mut stems = Vec::with_capacity(traj.u.len());
    for (k, ((u, q), f)) in traj
        .u
        .snapshots()
        .iter()
        .zip(traj.q.snapshots())
        .zip(traj.forcing.snapshots())
        .enumerate()
    {
        let stem = format!("snap_{k:05}");
        let mut components: Vec<ScalarField> = u.components().to_vec();
        components.push(q.clone());
        components.extend(f.components().iter().cloned());
        write_snapshot(
            &dir.join(&stem),
            &Snapshot { time: traj.u.times()[k], names: names.clone(), components },
        )?;
        stems.push(stem);
    }
    let residual = if traj.u.len() >= 3 {
        momentum_residual(&traj.u, &traj.q, &traj.forcing, traj.config.viscosity)?
    } else {
        Vec::new()
    };
    let manifest = Manifest {
        config: traj.config,
        times: traj.u.times().to_vec(),
        snapshots: stems,
        norms: traj.norms.clone(),
        momentum_residual: residual,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

pub fn read_trajectory(dir: &Path) -> Result<Trajectory> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let d = manifest.config.grid.dim();
    let mut us = Vec::new();
    let mut qs = Vec::new();
    let mut fs_ = Vec::new();
    for stem in &manifest.snapshots {
        let snap = read_snapshot(&dir.join(stem))?;
        if snap.names != component_names(d) {
            return Err(Error::InvalidParameter(format!("unexpected components in {stem}")));
        }
        let mut comps = snap.components.into_iter();
        us.push(VectorField::new(comps.by_ref().take(d).collect())?);
        qs.push(comps.next().expect("pressure component"));
        fs_.push(TensorField::new(comps.collect())?);
    }
    let interval = manifest.config.dt * manifest.config.snapshot_every as f64;
    Ok(Trajectory {
        config: manifest.config,
        u: TimeSeries::uniform(interval, us)?,
        q: TimeSeries::uniform(interval, qs)?,
        forcing: TimeSeries::uniform(interval, fs_)?,
        norms: manifest.norms,
    })
}

/// `(cos x_1 sin x_2, -sin x_1 cos x_2)` scaled by `exp(-2 nu t)`.
pub fn taylor_green_2d(grid: GridSpec, viscosity: f64, t: f64) -> VectorField {
    let a = (-2.0 * viscosity * t).exp();
    VectorField::from_fn(grid, |x, out| {
        out[0] = a * x[0].cos() * x[1].sin();
        out[1] = -a * x[0].sin() * x[1].cos();
    })
}

/// Taylor-Green vortex advected by the uniform flow `mean`:
/// `u = mean + TG(x - mean t, t)`, an exact solution with a non-trivial
/// advective term.
pub fn boosted_taylor_green_2d(grid: GridSpec, viscosity: f64, mean: [f64; 2], t: f64) -> VectorField {
    let a = (-2.0 * viscosity * t).exp();
    VectorField::from_fn(grid, |x, out| {
        let (y0, y1) = (x[0] - mean[0] * t, x[1] - mean[1] * t);
        out[0] = mean[0] + a * y0.cos() * y1.sin();
        out[1] = mean[1] - a * y0.sin() * y1.cos();
    })
}

/// Pressure of [`taylor_green_2d`]: `-(cos 2x_1 + cos 2x_2) exp(-4 nu t) / 4`.
pub fn taylor_green_pressure_2d(grid: GridSpec, viscosity: f64, t: f64) -> ScalarField {
    let a = (-4.0 * viscosity * t).exp();
    ScalarField::from_fn(grid, |x| -0.25 * a * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()))
}

/// Pressure of the initial [`taylor_green_3d`] field:
/// `(cos 2x_1 + cos 2x_2)(cos 2x_3 + 2) / 16`, mean-free.
pub fn taylor_green_pressure_3d(grid: GridSpec) -> ScalarField {
    ScalarField::from_fn(grid, |x| ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) * ((2.0 * x[2]).cos() + 2.0) / 16.0)
}

/// `(sin x_1 cos x_2 cos x_3, -cos x_1 sin x_2 cos x_3, 0)`.
pub fn taylor_green_3d(grid: GridSpec) -> VectorField {
    VectorField::from_fn(grid, |x, out| {
        out[0] = x[0].sin() * x[1].cos() * x[2].cos();
        out[1] = -x[0].cos() * x[1].sin() * x[2].cos();
        out[2] = 0.0;
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_green_pressures() {
        use crate::pressure::riesz_pressure;
        let g2 = GridSpec::periodic_2pi(2, 32).unwrap();
        let u = taylor_green_2d(g2, 1.0, 0.3);
        let p = riesz_pressure(&u, &TensorField::zeros(g2)).unwrap();
        assert!(p.relative_l2_error(&taylor_green_pressure_2d(g2, 1.0, 0.3)).unwrap() < 1e-12);
        let g3 = GridSpec::periodic_2pi(3, 16).unwrap();
        let p = riesz_pressure(&taylor_green_3d(g3), &TensorField::zeros(g3)).unwrap();
        assert!(p.relative_l2_error(&taylor_green_pressure_3d(g3)).unwrap() < 1e-12);
    }

    #[test]
    fn zero_state_stays_zero() {
        let grid = GridSpec::periodic_2pi(2, 16).unwrap();
        let cfg = SimConfig::new(grid, 0.01, 0.01);
        let u = step(&VectorField::zeros(grid), 0.0, &cfg, &NoForcing).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn shear_decays_as_heat_equation() {
        let grid = GridSpec::periodic_2pi(2, 32).unwrap();
        let cfg = SimConfig::new(grid, 0.01, 0.01);
        let u0 = VectorField::from_fn(grid, |x, out| {
            out[0] = x[1].sin();
            out[1] = 0.0;
        });
        let u1 = step(&u0, 0.0, &cfg, &NoForcing).unwrap();
        assert!(u1.relative_l2_error(&u0.scale((-0.01f64).exp())).unwrap() < 1e-13);
    }

    #[test]
    fn taylor_green_single_step() {
        let grid = GridSpec::periodic_2pi(2, 32).unwrap();
        let cfg = SimConfig::new(grid, 0.01, 0.01);
        let u1 = step(&taylor_green_2d(grid, 1.0, 0.0), 0.0, &cfg, &NoForcing).unwrap();
        let exact = taylor_green_2d(grid, 1.0, 0.01);
        assert!(u1.relative_l2_error(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn cfl_violation_reported() {
        let grid = GridSpec::periodic_2pi(2, 32).unwrap();
        let cfg = SimConfig::new(grid, 0.5, 0.5);
        let r = step(&taylor_green_2d(grid, 1.0, 0.0), 0.0, &cfg, &NoForcing);
        assert!(matches!(r, Err(Error::CflViolation { .. })));
    }

    #[test]
    fn rejects_divergent_initial_data() {
        let grid = GridSpec::periodic_2pi(2, 16).unwrap();
        let cfg = SimConfig::new(grid, 0.01, 0.01);
        let u = VectorField::from_fn(grid, |x, out| {
            out[0] = x[0].sin();
            out[1] = 0.0;
        });
        assert!(step(&u, 0.0, &cfg, &NoForcing).is_err());
    }

    #[test]
    fn config_validation() {
        let grid = GridSpec::periodic_2pi(2, 16).unwrap();
        assert!(SimConfig::new(grid, 0.03, 0.1).validate().is_err());
        let mut cfg = SimConfig::new(grid, 0.01, 0.1);
        cfg.snapshot_every = 3;
        assert!(cfg.validate().is_err());
        cfg.snapshot_every = 5;
        assert_eq!(cfg.validate().unwrap(), 10);
    }

    #[test]
    fn run_records_snapshots_and_pressure() {
        let grid = GridSpec::periodic_2pi(2, 32).unwrap();
        let mut cfg = SimConfig::new(grid, 0.01, 0.1);
        cfg.snapshot_every = 2;
        let traj = run(&cfg, &taylor_green_2d(grid, 1.0, 0.0), &NoForcing).unwrap();
        assert_eq!(traj.u.len(), 6);
        assert!((traj.u.times()[5] - 0.1).abs() < 1e-12);
        for w in traj.norms.energy.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(traj.norms.max_divergence < 1e-10);
        let expected = ScalarField::from_fn(grid, |x| -0.25 * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()));
        let a = (-4.0f64 * 0.1).exp();
        assert!(traj.q.snapshots()[5].relative_l2_error(&expected.scale(a)).unwrap() < 1e-10);
    }

    #[test]
    fn substeps_keep_cfl() {
        let grid = GridSpec::periodic_2pi(2, 32).unwrap();
        let cfg = SimConfig::new(grid, 0.2, 0.4);
        let u0 = boosted_taylor_green_2d(grid, 1.0, [1.0, 0.5], 0.0);
        let traj = run(&cfg, &u0, &NoForcing).unwrap();
        assert!(traj.norms.cfl_substeps > 0);
        let exact = boosted_taylor_green_2d(grid, 1.0, [1.0, 0.5], 0.4);
        assert!(traj.u.snapshots()[2].relative_l2_error(&exact).unwrap() < 1e-3);
    }

    #[test]
    fn trajectory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::periodic_2pi(2, 16).unwrap();
        let cfg = SimConfig::new(grid, 0.01, 0.03);
        let traj = run(&cfg, &taylor_green_2d(grid, 1.0, 0.0), &NoForcing).unwrap();
        let manifest = write_trajectory(dir.path(), &traj).unwrap();
        assert_eq!(manifest.snapshots.len(), 4);
        assert_eq!(manifest.momentum_residual.len(), 2);
        let back = read_trajectory(dir.path()).unwrap();
        assert_eq!(back.u.snapshots(), traj.u.snapshots());
        assert_eq!(back.q.snapshots(), traj.q.snapshots());
    }

    #[test]
    fn momentum_residual_needs_three_snapshots() {
        let grid = GridSpec::periodic_2pi(2, 16).unwrap();
        let u = TimeSeries::uniform(0.1, vec![VectorField::zeros(grid); 2]).unwrap();
        let q = TimeSeries::uniform(0.1, vec![ScalarField::zeros(grid); 2]).unwrap();
        let f = TimeSeries::uniform(0.1, vec![TensorField::zeros(grid); 2]).unwrap();
        assert!(matches!(momentum_residual(&u, &q, &f, 1.0), Err(Error::InsufficientData(_))));
    }
}
