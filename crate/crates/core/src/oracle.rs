//! Finite-difference eigensolver for `-k ψ'' + V ψ = E ψ` on a uniform grid,
//! used to cross-check the analytic levels.

use serde::Serialize;
use thiserror::Error;

/// Amplitude a normalized eigenfunction may keep at the domain edge before a
/// decay warning is attached.
pub const DECAY_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("requested {requested} eigenpairs but the grid has {available} unknowns")]
    TooManyStates { requested: usize, available: usize },
    #[error("potential is not finite at x = {0}")]
    NonFinitePotential(f64),
    #[error("grid too coarse: eigenvalue {index} moves by {shift:e} between h and 2h (tolerance {tolerance:e})")]
    GridTooCoarse { index: usize, shift: f64, tolerance: f64 },
    #[error("kinetic prefactor must be positive, got {0}")]
    InvalidKinetic(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub h: f64,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self, OracleError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(OracleError::InvalidGrid(format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        if points < 3 {
            return Err(OracleError::InvalidGrid(format!("need at least 3 points, got {points}")));
        }
        Ok(Grid1D { lo, hi, points, h: (hi - lo) / (points - 1) as f64 })
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.hi
        } else {
            self.lo + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.x(i))
    }

    /// Every other node, spacing `2h`; requires `points - 1` even.
    pub fn coarsened(&self) -> Option<Self> {
        ((self.points - 1).is_multiple_of(2) && self.points >= 5)
            .then(|| Grid1D::new(self.lo, self.hi, self.points.div_ceil(2)).unwrap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    /// `ψ(lo) = ψ(hi) = 0`.
    DirichletBoth,
    /// `ψ(lo) = 0`, free end at `hi`.
    DirichletLeft,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    /// `k` in `-k ψ''`.
    pub kinetic: f64,
    /// If set, fail with `GridTooCoarse` when the `h` vs `2h` Richardson error
    /// estimate of any returned eigenvalue exceeds this.
    pub richardson_tol: Option<f64>,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { kinetic: 0.5, richardson_tol: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub energy: f64,
    /// Values at every grid node, with `Σ ψ² h = 1`.
    pub wavefunction: Vec<f64>,
    /// Largest `|ψ|` at the outermost unknowns.
    pub boundary_amplitude: f64,
    pub decay_warning: bool,
}

impl EigenPair {
    pub fn nodes(&self) -> usize {
        let peak = self.wavefunction.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = 1e-10 * peak;
        let mut last = 0.0f64;
        let mut count = 0;
        for &v in &self.wavefunction {
            if v.abs() <= floor {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    // Number of eigenvalues strictly below x.
    fn count_below(&self, x: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - off2 / q };
            if q == 0.0 {
                q = f64::EPSILON * (d.abs() + self.off.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        self.diag.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d - r), hi.max(d + r)))
    }

    // j-th smallest eigenvalue (0-based) by Sturm bisection.
    fn eigenvalue(&self, j: usize, bounds: (f64, f64)) -> f64 {
        let (mut lo, mut hi) = bounds;
        while hi - lo > 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let scale = self.diag.iter().fold(self.off.abs(), |m, d| m.max(d.abs()));
        let shift = lambda + 1e-12 * scale;
        let mut x = vec![1.0; n];
        for _ in 0..3 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    // Solves (T - σ I) y = b with Gaussian elimination and partial pivoting.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let tiny = f64::EPSILON * self.off.abs().max(1.0);
        // Row i of U holds (u0, u1, u2) at columns i, i+1, i+2.
        let mut u = vec![[0.0f64; 3]; n];
        let mut rhs = b.to_vec();
        let mut cur = [self.diag[0] - sigma, if n > 1 { self.off } else { 0.0 }, 0.0];
        for i in 0..n {
            if i + 1 == n {
                if cur[0] == 0.0 {
                    cur[0] = tiny;
                }
                u[i] = cur;
                break;
            }
            let below = [self.off, self.diag[i + 1] - sigma, if i + 2 < n { self.off } else { 0.0 }];
            if below[0].abs() > cur[0].abs() {
                // swap rows i and i+1
                u[i] = below;
                let m = cur[0] / below[0];
                cur = [cur[1] - m * below[1], cur[2] - m * below[2], 0.0];
                rhs.swap(i, i + 1);
                rhs[i + 1] -= m * rhs[i];
            } else {
                if cur[0] == 0.0 {
                    cur[0] = tiny;
                }
                u[i] = cur;
                let m = below[0] / cur[0];
                cur = [below[1] - m * cur[1], below[2] - m * cur[2], 0.0];
                rhs[i + 1] -= m * rhs[i];
            }
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= u[i][1] * y[i + 1];
            }
            if i + 2 < n {
                s -= u[i][2] * y[i + 2];
            }
            y[i] = s / u[i][0];
        }
        y
    }
}

fn assemble<V: Fn(f64) -> f64>(
    potential: &V,
    grid: &Grid1D,
    bc: BoundaryCondition,
    kinetic: f64,
) -> Result<(Tridiagonal, usize), OracleError> {
    let h2 = grid.h * grid.h;
    let last = match bc {
        BoundaryCondition::DirichletBoth => grid.points - 2,
        BoundaryCondition::DirichletLeft => grid.points - 1,
    };
    let mut diag = Vec::with_capacity(last);
    for i in 1..=last {
        let x = grid.x(i);
        let v = potential(x);
        if !v.is_finite() {
            return Err(OracleError::NonFinitePotential(x));
        }
        diag.push(2.0 * kinetic / h2 + v);
    }
    if bc == BoundaryCondition::DirichletLeft {
        // mirror ghost node ψ_{N} = ψ_{N-1}
        *diag.last_mut().unwrap() -= kinetic / h2;
    }
    Ok((Tridiagonal { diag, off: -kinetic / h2 }, last))
}

fn eigenvalues_only<V: Fn(f64) -> f64>(
    potential: &V,
    grid: &Grid1D,
    k: usize,
    bc: BoundaryCondition,
    kinetic: f64,
) -> Result<Vec<f64>, OracleError> {
    let (t, n) = assemble(potential, grid, bc, kinetic)?;
    if k > n {
        return Err(OracleError::TooManyStates { requested: k, available: n });
    }
    let bounds = t.gershgorin();
    Ok((0..k).map(|j| t.eigenvalue(j, bounds)).collect())
}

/// Lowest `k` eigenpairs of `-k ψ'' + V ψ = E ψ` with the 3-point Laplacian.
pub fn fd_spectrum<V: Fn(f64) -> f64>(
    potential: V,
    grid: &Grid1D,
    k: usize,
    bc: BoundaryCondition,
    options: FdOptions,
) -> Result<Vec<EigenPair>, OracleError> {
    if !(options.kinetic.is_finite() && options.kinetic > 0.0) {
        return Err(OracleError::InvalidKinetic(options.kinetic));
    }
    if k == 0 {
        return Err(OracleError::TooManyStates { requested: 0, available: 0 });
    }
    let (t, n) = assemble(&potential, grid, bc, options.kinetic)?;
    if k > n {
        return Err(OracleError::TooManyStates { requested: k, available: n });
    }
    let bounds = t.gershgorin();
    let energies: Vec<f64> = (0..k).map(|j| t.eigenvalue(j, bounds)).collect();

    if let Some(tolerance) = options.richardson_tol {
        let coarse = grid
            .coarsened()
            .ok_or_else(|| OracleError::InvalidGrid("Richardson check needs an odd number of points ≥ 5".into()))?;
        let coarse_energies = eigenvalues_only(&potential, &coarse, k, bc, options.kinetic)?;
        for (index, (fine, rough)) in energies.iter().zip(&coarse_energies).enumerate() {
            let shift = (fine - rough).abs() / 3.0;
            if shift.is_nan() || shift > tolerance {
                return Err(OracleError::GridTooCoarse { index, shift, tolerance });
            }
        }
    }

    let inv_sqrt_h = grid.h.sqrt().recip();
    Ok(energies
        .into_iter()
        .map(|energy| {
            let v = t.eigenvector(energy);
            let mut wavefunction = vec![0.0; grid.points];
            wavefunction[1..=n].copy_from_slice(&v);
            // first appreciable lobe positive
            let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let sign = v.iter().find(|x| x.abs() > 1e-3 * peak).map_or(1.0, |x| x.signum());
            wavefunction.iter_mut().for_each(|x| *x *= sign * inv_sqrt_h);
            let boundary_amplitude = wavefunction[1].abs().max(wavefunction[n].abs());
            EigenPair { energy, wavefunction, boundary_amplitude, decay_warning: boundary_amplitude > DECAY_THRESHOLD }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{radial_level, RadialSpec};
    use crate::triangular::{solve_well, well_potential, well_wavefunction, Parity, WellSpec};

    fn schrodinger() -> FdOptions {
        FdOptions::default()
    }

    fn dimensionless() -> FdOptions {
        FdOptions { kinetic: 1.0, richardson_tol: None }
    }

    #[test]
    fn harmonic_oscillator() {
        let grid = Grid1D::new(-10.0, 10.0, 2001).unwrap();
        let pairs = fd_spectrum(|x| 0.5 * x * x, &grid, 4, BoundaryCondition::DirichletBoth, schrodinger()).unwrap();
        for (j, p) in pairs.iter().enumerate() {
            assert!((p.energy - (j as f64 + 0.5)).abs() < 1e-4 * (j as f64 + 1.0), "E{j} = {}", p.energy);
            assert_eq!(p.nodes(), j);
            assert!(!p.decay_warning);
            let norm: f64 = p.wavefunction.iter().map(|v| v * v).sum::<f64>() * grid.h;
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert!((pairs[0].energy - 0.5).abs() < 1e-5);
    }

    #[test]
    fn linear_half_line_matches_radial_levels() {
        let grid = Grid1D::new(0.0, 30.0, 4001).unwrap();
        let pairs = fd_spectrum(|r| 0.5 * r, &grid, 3, BoundaryCondition::DirichletLeft, schrodinger()).unwrap();
        let spec = RadialSpec::new(0.5, 1.0, 0.0).unwrap();
        for (j, p) in pairs.iter().enumerate() {
            let exact = radial_level(&spec, j + 1).unwrap().e0;
            assert!((p.energy - exact).abs() < 1e-4);
            assert_eq!(p.nodes(), j);
        }
        assert!((pairs[0].energy - 1.16905).abs() < 1e-4);
    }

    #[test]
    fn second_order_convergence() {
        let exact = radial_level(&RadialSpec::new(0.5, 1.0, 0.0).unwrap(), 1).unwrap().e0;
        let err = |points| {
            let grid = Grid1D::new(0.0, 20.0, points).unwrap();
            let p = fd_spectrum(|r| 0.5 * r, &grid, 1, BoundaryCondition::DirichletLeft, schrodinger()).unwrap();
            (p[0].energy - exact).abs()
        };
        let ratio = err(501) / err(1001);
        assert!((3.6..4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn triangular_depth_four() {
        let grid = Grid1D::new(-8.0, 8.0, 4001).unwrap();
        let spec = WellSpec::new(4.0, Parity::Even).unwrap();
        let pairs = fd_spectrum(|z| well_potential(&spec, z), &grid, 1, BoundaryCondition::DirichletBoth, dimensionless())
            .unwrap();
        assert!((pairs[0].energy + 1.53713).abs() < 1e-4);
    }

    #[test]
    fn triangular_wavefunctions_in_l2() {
        for &(v0, half_width) in &[(1.0, 25.0), (5.0, 15.0), (10.0, 10.0)] {
            let grid = Grid1D::new(-half_width, half_width, 2001).unwrap();
            let spec = WellSpec::new(v0, Parity::Even).unwrap();
            let state = solve_well(&spec).unwrap();
            let pairs =
                fd_spectrum(|z| well_potential(&spec, z), &grid, 1, BoundaryCondition::DirichletBoth, dimensionless())
                    .unwrap();
            let fd = &pairs[0].wavefunction;
            let dist = grid
                .nodes()
                .zip(fd)
                .map(|(z, v)| (v - well_wavefunction(&state, &spec, z)).powi(2))
                .sum::<f64>()
                * grid.h;
            assert!(dist.sqrt() <= 1e-3, "v0={v0}: {}", dist.sqrt());
            assert!((pairs[0].energy - state.eps_par).abs() < 1e-3);
        }
    }

    #[test]
    fn odd_state_has_one_node() {
        let grid = Grid1D::new(-10.0, 10.0, 2001).unwrap();
        let spec = WellSpec::new(10.0, Parity::Even).unwrap();
        let pairs =
            fd_spectrum(|z| well_potential(&spec, z), &grid, 2, BoundaryCondition::DirichletBoth, dimensionless()).unwrap();
        let odd = solve_well(&WellSpec::new(10.0, Parity::Odd).unwrap()).unwrap();
        assert_eq!(pairs[1].nodes(), 1);
        assert!((pairs[1].energy - odd.eps_par).abs() < 1e-3);
    }

    #[test]
    fn richardson_and_decay_diagnostics() {
        let grid = Grid1D::new(-10.0, 10.0, 41).unwrap();
        let opts = FdOptions { richardson_tol: Some(1e-6), ..schrodinger() };
        assert!(matches!(
            fd_spectrum(|x| 0.5 * x * x, &grid, 1, BoundaryCondition::DirichletBoth, opts),
            Err(OracleError::GridTooCoarse { index: 0, .. })
        ));
        let fine = Grid1D::new(-10.0, 10.0, 2001).unwrap();
        let opts = FdOptions { richardson_tol: Some(1e-5), ..schrodinger() };
        assert!(fd_spectrum(|x| 0.5 * x * x, &fine, 1, BoundaryCondition::DirichletBoth, opts).is_ok());

        let narrow = Grid1D::new(-2.0, 2.0, 401).unwrap();
        let p = fd_spectrum(|x| 0.5 * x * x, &narrow, 1, BoundaryCondition::DirichletBoth, schrodinger()).unwrap();
        assert!(p[0].decay_warning);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Grid1D::new(1.0, 0.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 2).is_err());
        let grid = Grid1D::new(0.0, 1.0, 5).unwrap();
        let bc = BoundaryCondition::DirichletBoth;
        assert!(fd_spectrum(|x| x, &grid, 0, bc, schrodinger()).is_err());
        assert!(fd_spectrum(|x| x, &grid, 4, bc, schrodinger()).is_err());
        assert!(fd_spectrum(|_| f64::NAN, &grid, 1, bc, schrodinger()).is_err());
        assert!(fd_spectrum(|x| x, &grid, 1, bc, FdOptions { kinetic: 0.0, richardson_tol: None }).is_err());
        assert_eq!(grid.x(4), 1.0);
        assert!((grid.h - 0.25).abs() < 1e-16);
    }
}
