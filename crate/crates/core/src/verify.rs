//! Cross-check battery behind the `verify` subcommand and the acceptance tests.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::gup::{minimal_length, saturated_delta_x, GupError, GupParams};
use crate::oracle::{fd_spectrum, BoundaryCondition, FdOptions, Grid1D};
use crate::radial::{airy_integrals, fig1_points, radial_brackets_quadrature, radial_level, RadialSpec};
use crate::triangular::{
    solve_well, table1, well_first_order, well_potential, BracketConvention, Parity, WellSpec,
};

/// Published even-parity rows: `v0, ζ0, ε, c_a, c_b, c, ⟨ε-v⟩₊₊, ⟨(ε-v)²⟩₊₊, ⟨ε+v⟩₋₋`.
pub const REFERENCE_TABLE1: [[f64; 9]; 10] = [
    [1.0, -0.826181, -0.173819, 1.02392, 0.170583, 0.661594, 0.123379, 0.132641, -0.0364646],
    [2.0, -0.918052, -0.542683, 1.30148, 0.116604, 0.918542, 0.3108, 0.578932, -0.290765],
    [3.0, -0.956877, -1.00962, 1.46048, 0.0813997, 1.12559, 0.494445, 1.24057, -0.869706],
    [4.0, -0.977389, -1.53713, 1.56976, 0.0588883, 1.3129, 0.665659, 2.04381, -1.79791],
    [5.0, -0.98958, -2.10645, 1.65245, 0.0439097, 1.4908, 0.824469, 2.94726, -3.07349],
    [6.0, -0.997388, -2.7067, 1.71884, 0.033551, 1.66409, 0.972408, 3.92678, -4.68648],
    [7.0, -1.00266, -3.33096, 1.77433, 0.0261487, 1.83537, 1.1111, 4.96745, -6.62507],
    [8.0, -1.00636, -3.97456, 1.82204, 0.0207187, 2.00625, 1.24194, 6.05954, -8.87749],
    [9.0, -1.00904, -4.63414, 1.86397, 0.0166413, 2.17775, 1.3661, 7.19637, -11.4331],
    [10.0, -1.01103, -5.30723, 1.90142, 0.0135208, 2.35058, 1.48452, 8.37319, -14.2822],
];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub elapsed_s: f64,
    pub time_limit_s: f64,
    /// Failing checks, or a one-line summary when everything passed.
    pub details: Vec<String>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{status} criterion {}: {} ({:.3} s, limit {} s)",
            self.id, self.name, self.elapsed_s, self.time_limit_s
        );
        if !self.passed {
            for d in &self.details {
                line.push_str("\n    ");
                line.push_str(d);
            }
        }
        line
    }
}

struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn new() -> Self {
        Checks { failures: Vec::new(), count: 0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn rel(&mut self, label: impl FnOnce() -> String, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs() / want.abs();
        self.check(err <= tol, || format!("{}: got {got:.10e}, want {want:.10e}, rel err {err:.2e} > {tol:e}", label()));
    }

    fn abs(&mut self, label: impl FnOnce() -> String, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.check(err <= tol, || format!("{}: got {got:.10e}, want {want:.10e}, abs err {err:.2e} > {tol:e}", label()));
    }

    fn fail(&mut self, what: String) {
        self.count += 1;
        self.failures.push(what);
    }
}

fn run(id: u8, name: &'static str, limit_s: f64, body: impl FnOnce(&mut Checks)) -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::new();
    body(&mut checks);
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs_f64(limit_s) {
        checks.failures.push(format!("runtime {:.3} s exceeds {limit_s} s", elapsed.as_secs_f64()));
    }
    let passed = checks.failures.is_empty();
    let details = if passed { vec![format!("{} checks passed", checks.count)] } else { checks.failures };
    CriterionResult { id, name, passed, elapsed_s: elapsed.as_secs_f64(), time_limit_s: limit_s, details }
}

pub fn table1_regression() -> CriterionResult {
    run(1, "ground-state table regression, v0 = 1..10", 5.0, |c| {
        let v0s: Vec<f64> = REFERENCE_TABLE1.iter().map(|r| r[0]).collect();
        for (row, reference) in table1(&v0s).into_iter().zip(REFERENCE_TABLE1.iter()) {
            let row = match row {
                Ok(r) => r,
                Err(e) => {
                    c.fail(format!("v0={}: {e}", reference[0]));
                    continue;
                }
            };
            let got = row.values();
            for col in 1..9 {
                let tol = if col == 8 { 1e-4 } else { 2e-5 };
                let name = crate::triangular::Table1Row::COLUMNS[col];
                c.rel(|| format!("v0={} {name}", reference[0]), got[col], reference[col], tol);
            }
        }
    })
}

pub fn airy_integral_identities() -> CriterionResult {
    run(2, "Airy integral identities, n = 1..10", 2.0, |c| {
        for n in 1..=10 {
            match airy_integrals(n, 1e-14) {
                Ok(i) => {
                    c.rel(|| format!("n={n} ∫Ai²"), i.norm, i.norm_closed, 1e-9);
                    c.rel(|| format!("n={n} ∫z²Ai²"), i.second_moment, i.second_moment_closed, 1e-8);
                    c.rel(|| format!("n={n} small component"), i.small_component, i.small_component_closed, 1e-7);
                }
                Err(e) => c.fail(format!("n={n}: {e}")),
            }
        }
    })
}

pub fn radial_closed_vs_quadrature() -> CriterionResult {
    run(3, "radial closed forms vs quadrature", 10.0, |c| {
        for &q in &[0.5, 1.0, 2.0] {
            let spec = RadialSpec::new(q, 1.0, 0.0).unwrap();
            for n in 1..=5 {
                match (radial_level(&spec, n), radial_brackets_quadrature(&spec, n)) {
                    (Ok(level), Ok((ev2, small))) => {
                        c.rel(|| format!("q={q} n={n} bracket_EV2"), ev2, level.bracket_ev2, 1e-7);
                        c.rel(|| format!("q={q} n={n} bracket_small"), small, level.bracket_small, 1e-7);
                    }
                    (Err(e), _) | (_, Err(e)) => c.fail(format!("q={q} n={n}: {e}")),
                }
            }
        }
    })
}

pub fn oracle_agreement() -> CriterionResult {
    run(4, "finite-difference oracle agreement", 30.0, |c| {
        let linear = RadialSpec::new(0.5, 1.0, 0.0).unwrap();
        let grid = Grid1D::new(0.0, 30.0, 4001).unwrap();
        match fd_spectrum(|r| 0.5 * r, &grid, 3, BoundaryCondition::DirichletLeft, FdOptions::default()) {
            Ok(pairs) => {
                for (j, p) in pairs.iter().enumerate() {
                    match radial_level(&linear, j + 1) {
                        Ok(l) => c.abs(|| format!("linear n={}", j + 1), p.energy, l.e0, 1e-4),
                        Err(e) => c.fail(format!("linear n={}: {e}", j + 1)),
                    }
                }
            }
            Err(e) => c.fail(format!("linear: {e}")),
        }
        let dimensionless = FdOptions { kinetic: 1.0, richardson_tol: None };
        for &(v0, half_width) in &[(1.0, 25.0), (4.0, 8.0), (10.0, 10.0)] {
            let spec = WellSpec::new(v0, Parity::Even).unwrap();
            let grid = Grid1D::new(-half_width, half_width, 4001).unwrap();
            let fd = fd_spectrum(|z| well_potential(&spec, z), &grid, 1, BoundaryCondition::DirichletBoth, dimensionless);
            match (fd, solve_well(&spec)) {
                (Ok(pairs), Ok(state)) => c.abs(|| format!("well v0={v0}"), pairs[0].energy, state.eps_par, 1e-4),
                (Err(e), _) => c.fail(format!("well v0={v0}: {e}")),
                (_, Err(e)) => c.fail(format!("well v0={v0}: {e}")),
            }
        }
    })
}

pub fn gup_algebra() -> CriterionResult {
    run(5, "minimal-length algebra", 2.0, |c| {
        for &(a, b) in &[(0.1, 0.02), (0.1, 0.04), (0.01, 1e-4), (0.5, 0.3)] {
            let g = GupParams::new(a, b).unwrap();
            match minimal_length(&g) {
                Ok(m) => {
                    c.rel(|| format!("a={a} b={b} ΔP_ext"), m.delta_p_ext, g.quadratic_coefficient().powf(-0.5), 1e-15);
                    let h = 1e-5 * m.delta_p_ext;
                    let slope = (saturated_delta_x(&g, m.delta_p_ext + h) - saturated_delta_x(&g, m.delta_p_ext - h))
                        / (2.0 * h);
                    c.check(slope.abs() <= 1e-8, || format!("a={a} b={b}: slope at ΔP_ext = {slope:e}"));
                }
                Err(e) => c.fail(format!("a={a} b={b}: {e}")),
            }
        }
        for &(a, hbar) in &[(0.1, 1.0), (0.25, 1.0), (1e-3, 2.0), (0.7, 0.5)] {
            let g = GupParams::with_hbar(a, 2.0 * a * a, hbar).unwrap();
            match minimal_length(&g) {
                Ok(m) => c.check(m.length == hbar * a, || format!("b=2a², a={a}: ℓ_min = {} ≠ ħa", m.length)),
                Err(e) => c.fail(format!("b=2a², a={a}: {e}")),
            }
        }
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..1000 {
            let a: f64 = rng.random_range(0.0..1.0);
            let b: f64 = rng.random_range(0.0..1.0);
            let g = GupParams::new(a, b).unwrap();
            match minimal_length(&g) {
                Ok(m) => c.check((m.length >= 0.0) == (b >= a * a), || {
                    format!("a={a} b={b}: ℓ_min = {} but b - a² = {}", m.length, b - a * a)
                }),
                Err(GupError::NoMinimum(_)) => c.check(b < a * a, || format!("a={a} b={b}: spurious NoMinimum")),
                Err(e) => c.fail(format!("a={a} b={b}: {e}")),
            }
        }
    })
}

pub fn fig1_series() -> CriterionResult {
    run(6, "level series (5z_n/6, -4z_n²/5), n = 1..10", 1.0, |c| match fig1_points(10) {
        Ok(pts) => {
            for p in &pts {
                c.check(p.small < 0.0 && p.gup < 0.0, || format!("n={}: non-negative point", p.n));
                c.check(p.gup.abs() > p.small.abs(), || format!("n={}: quadratic term does not dominate", p.n));
            }
            for w in pts.windows(2) {
                c.check(w[1].small < w[0].small, || format!("5z/6 not decreasing at n={}", w[1].n));
                c.check(w[1].gup < w[0].gup, || format!("-4z²/5 not decreasing at n={}", w[1].n));
            }
        }
        Err(e) => c.fail(e.to_string()),
    })
}

pub fn sign_structure() -> CriterionResult {
    run(7, "sign structure of first-order terms", 5.0, |c| {
        for &q in &[0.5, 1.0, 2.0] {
            for &cc in &[1.0, 137.036] {
                for &a in &[1e-3, 0.1, 1.0] {
                    let spec = RadialSpec::new(q, cc, a).unwrap();
                    for n in 1..=10 {
                        match radial_level(&spec, n) {
                            Ok(l) => {
                                c.check(l.e1_rel < 0.0, || format!("radial q={q} c={cc} a={a} n={n}: E1_rel ≥ 0"));
                                c.check(l.e1_gup < 0.0, || format!("radial q={q} c={cc} a={a} n={n}: E1_gup ≥ 0"));
                            }
                            Err(e) => c.fail(format!("radial q={q} n={n}: {e}")),
                        }
                    }
                }
            }
        }
        for v0 in 1..=10 {
            let v0 = v0 as f64;
            for &(cc, a) in &[(1.0, 0.1), (137.036, 1.0 / 137.036)] {
                let spec = WellSpec { c: cc, a, ..WellSpec::new(v0, Parity::Even).unwrap() };
                let e1 = solve_well(&spec).and_then(|s| well_first_order(&s, &spec, BracketConvention::Displayed));
                match e1 {
                    Ok(e1) => c.check(e1.relativistic * e1.gup < 0.0, || {
                        format!("well v0={v0} c={cc}: terms {} and {} share a sign", e1.relativistic, e1.gup)
                    }),
                    Err(e) => c.fail(format!("well v0={v0}: {e}")),
                }
            }
        }
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        table1_regression(),
        airy_integral_identities(),
        radial_closed_vs_quadrature(),
        oracle_agreement(),
        gup_algebra(),
        fig1_series(),
        sign_structure(),
    ]
}
