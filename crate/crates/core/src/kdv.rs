//! Crank–Nicolson relaxation scheme for the fast-time KdV equation
//!
//! ```text
//! u_t + u_x + eps [ 3/4 u u_x + 1/6 u_xxx ] = 0
//! ```
//!
//! and its variable-coefficient extension with the bottom terms
//! `- 1/2 b u_x - 1/4 b_x u` (right-going) or their mirror (left-going).
//!
//! The nonlinearity is linearized around a predictor `p = u^{n+1/2}` that
//! obeys `u^n = (p^{n+1/2} + p^{n-1/2}) / 2`, so every step is one banded
//! linear solve for the Crank–Nicolson average `w = (u^{n+1} + u^n) / 2`.

use crate::error::{Error, Result};
use crate::findiff::{make_d1, make_d3, CyclicBandedMatrix, CyclicBandedOperator};
use crate::grid::{BathymetryProfile, Field, Grid1D, TimeGrid};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Right => 1.0,
            Direction::Left => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KdvVariant {
    Classical,
    VariableCoefficient { bathymetry: BathymetryProfile, direction: Direction },
}

/// Discretization of `3/4 u u_x` around the predictor `p`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearForm {
    /// `1/4 (P D1 + D1 P) w`: skew-adjoint, conserves the discrete L2 norm exactly.
    #[default]
    SkewSymmetric,
    /// `1/4 (p_i + (p_{i+1} + p_{i-1})/2) (D1 w)_i + 1/4 w_i (D1 p)_i`.
    NodeAveraged,
}

#[derive(Debug, Clone)]
pub struct KdvProblem {
    epsilon: f64,
    grid: Grid1D,
    time_grid: TimeGrid,
    variant: KdvVariant,
    nonlinear: NonlinearForm,
    d1: CyclicBandedOperator,
    d3: CyclicBandedOperator,
    sign: f64,
    bottom: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KdvState {
    pub u_current: Field,
    pub u_predictor: Field,
    pub step_index: usize,
    pub time: f64,
}

impl KdvProblem {
    pub fn new(epsilon: f64, grid: Grid1D, time_grid: TimeGrid, variant: KdvVariant) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::config(format!("epsilon must be positive, got {epsilon}")));
        }
        let (sign, bottom) = match &variant {
            KdvVariant::Classical => (1.0, None),
            KdvVariant::VariableCoefficient { bathymetry, direction } => {
                let b = bathymetry.sample(&grid)?;
                let db = bathymetry.sample_derivative(&grid)?;
                (direction.sign(), Some((b, db)))
            }
        };
        Ok(KdvProblem {
            epsilon,
            grid,
            time_grid,
            variant,
            nonlinear: NonlinearForm::default(),
            d1: make_d1(&grid),
            d3: make_d3(&grid),
            sign,
            bottom,
        })
    }

    pub fn with_nonlinear_form(mut self, form: NonlinearForm) -> Self {
        self.nonlinear = form;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time_grid
    }

    pub fn variant(&self) -> &KdvVariant {
        &self.variant
    }

    pub fn nonlinear_form(&self) -> NonlinearForm {
        self.nonlinear
    }

    /// Spatial operator `L(p)` such that the equation reads `u_t + L(p) u = 0`.
    pub fn spatial_operator(&self, p: &[f64]) -> CyclicBandedMatrix {
        let n = self.grid.num_points();
        let eps = self.epsilon;
        let mut m = CyclicBandedMatrix::zeros(n, 2);
        m.add_operator(self.sign, &self.d1);
        m.add_operator(self.sign * eps / 6.0, &self.d3);
        match self.nonlinear {
            NonlinearForm::SkewSymmetric => {
                m.add_diag_operator(eps / 4.0, p, &self.d1);
                m.add_operator_diag(eps / 4.0, &self.d1, p);
            }
            NonlinearForm::NodeAveraged => {
                let averaged: Vec<f64> = (0..n).map(|i| p[i] + 0.5 * (p[(i + 1) % n] + p[(i + n - 1) % n])).collect();
                m.add_diag_operator(eps / 4.0, &averaged, &self.d1);
                let dp = self.d1.apply_slice(p).expect("predictor sized to grid");
                m.add_diagonal(eps / 4.0, &dp);
            }
        }
        if let Some((b, db)) = &self.bottom {
            m.add_diag_operator(-self.sign * eps / 2.0, b, &self.d1);
            m.add_diagonal(-self.sign * eps / 4.0, db);
        }
        m
    }

    /// Explicit right-hand side `F(u)` with the nonlinearity taken pointwise as `3/4 u D1 u`.
    pub fn rhs(&self, u: &Field) -> Result<Field> {
        self.grid.check_same(u.grid())?;
        let eps = self.epsilon;
        let du = self.d1.apply_slice(u.values())?;
        let d3u = self.d3.apply_slice(u.values())?;
        let values = (0..u.len())
            .map(|i| {
                let mut l = self.sign * du[i] + eps * (0.75 * u[i] * du[i] + self.sign * d3u[i] / 6.0);
                if let Some((b, db)) = &self.bottom {
                    l -= self.sign * eps * (0.5 * b[i] * du[i] + 0.25 * db[i] * u[i]);
                }
                -l
            })
            .collect();
        Field::new(self.grid, values).map_err(|_| Error::NonFinite { what: "KdV right-hand side".into() })
    }

    pub fn init_predictor(&self, u0: &Field) -> Result<KdvState> {
        self.grid.check_same(u0.grid())?;
        let f = self.rhs(u0)?;
        let predictor = u0
            .axpy(0.5 * self.time_grid.dt(), &f)
            .map_err(|_| Error::NonFinite { what: "initial KdV predictor".into() })?;
        Ok(KdvState { u_current: u0.clone(), u_predictor: predictor, step_index: 0, time: 0.0 })
    }

    pub fn step(&self, state: &KdvState) -> Result<KdvState> {
        let dt = self.time_grid.dt();
        let next_index = state.step_index + 1;
        let next_time = next_index as f64 * dt;
        let at_step = |e: Error| Error::AtStep { step: next_index, time: next_time, source: Box::new(e) };

        let mut a = self.spatial_operator(state.u_predictor.values());
        a.scale(0.5 * dt);
        a.add_identity(1.0);
        let w = a.solve(state.u_current.values()).map_err(at_step)?;
        let u_next: Vec<f64> = w.iter().zip(state.u_current.values()).map(|(w, u)| 2.0 * w - u).collect();
        let p_next: Vec<f64> = u_next.iter().zip(state.u_predictor.values()).map(|(u, p)| 2.0 * u - p).collect();
        let instability = || Error::Instability { step: next_index, time: next_time };
        Ok(KdvState {
            u_current: Field::new(self.grid, u_next).map_err(|_| instability())?,
            u_predictor: Field::new(self.grid, p_next).map_err(|_| instability())?,
            step_index: next_index,
            time: next_time,
        })
    }

    /// Integrates to the final time, storing every `stride`-th field and the last one.
    pub fn run(&self, u0: &Field, stride: usize) -> Result<Trajectory<Field>> {
        self.run_with(u0, stride, |_| {})
    }

    /// As [`KdvProblem::run`], calling `observe` on every state including the initial one.
    pub fn run_with(
        &self,
        u0: &Field,
        stride: usize,
        mut observe: impl FnMut(&KdvState),
    ) -> Result<Trajectory<Field>> {
        if stride == 0 {
            return Err(Error::config("snapshot stride must be at least 1"));
        }
        let mut state = self.init_predictor(u0)?;
        observe(&state);
        let mut traj = Trajectory::new(self.time_grid.dt(), stride);
        traj.push(0, state.u_current.clone());
        let steps = self.time_grid.num_steps();
        for _ in 0..steps {
            state = self.step(&state)?;
            observe(&state);
            if state.step_index % stride == 0 || state.step_index == steps {
                traj.push(state.step_index, state.u_current.clone());
            }
        }
        Ok(traj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{discrete_l2, SolitonSpec};
    use approx::assert_relative_eq;

    fn problem(eps: f64, n: usize, dx: f64, steps: usize) -> KdvProblem {
        let g = Grid1D::new(n, dx).unwrap();
        KdvProblem::new(eps, g, TimeGrid::new(dx, steps).unwrap(), KdvVariant::Classical).unwrap()
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let p = problem(0.1, 64, 0.1, 5);
        let traj = p.run(&Field::zeros(*p.grid()), 1).unwrap();
        assert!(traj.snapshots().iter().all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn constants_are_preserved() {
        let p = problem(0.1, 64, 0.1, 20);
        let c = Field::constant(*p.grid(), 0.3);
        let s0 = p.init_predictor(&c).unwrap();
        for v in s0.u_predictor.values() {
            assert_relative_eq!(*v, 0.3, epsilon = 1e-14);
        }
        let traj = p.run(&c, 20).unwrap();
        for v in traj.last().unwrap().1.values() {
            assert_relative_eq!(*v, 0.3, epsilon = 1e-12);
        }
    }

    #[test]
    fn predictor_matches_hand_assembly() {
        let (eps, dx) = (0.1, 0.1);
        let p = problem(eps, 400, dx, 1);
        let u0 = SolitonSpec::new(0.5, -20.0, eps).unwrap().field(p.grid(), 0.0);
        let u = u0.values();
        let n = u.len();
        let d1 = |i: usize| (u[(i + 1) % n] - u[(i + n - 1) % n]) / (2.0 * dx);
        let d3 = |i: usize| {
            (u[(i + 2) % n] - 2.0 * u[(i + 1) % n] + 2.0 * u[(i + n - 1) % n] - u[(i + n - 2) % n])
                / (2.0 * dx * dx * dx)
        };
        let s = p.init_predictor(&u0).unwrap();
        for i in 0..n {
            let du = d1(i);
            let f = -(du + eps * (0.75 * u[i] * du + d3(i) / 6.0));
            assert_relative_eq!(s.u_predictor[i], u[i] + 0.5 * dx * f, epsilon = 1e-14);
        }
    }

    #[test]
    fn one_step_conserves_l2() {
        for form in [NonlinearForm::SkewSymmetric, NonlinearForm::NodeAveraged] {
            let p = problem(0.05, 2667, 0.03, 1).with_nonlinear_form(form);
            let u0 = SolitonSpec::new(0.5, -20.0, 0.05).unwrap().field(p.grid(), 0.0);
            let s1 = p.step(&p.init_predictor(&u0).unwrap()).unwrap();
            let (a, b) = (discrete_l2(&u0), discrete_l2(&s1.u_current));
            assert!(((a - b) / a).abs() < 1e-10, "{form:?}: {a} -> {b}");
        }
    }

    #[test]
    fn left_variant_mirrors_right() {
        let g = Grid1D::new(300, 0.1).unwrap();
        let tg = TimeGrid::new(0.1, 1).unwrap();
        let right = KdvProblem::new(
            0.2,
            g,
            tg,
            KdvVariant::VariableCoefficient { bathymetry: BathymetryProfile::Flat, direction: Direction::Right },
        )
        .unwrap();
        let left = KdvProblem::new(
            0.2,
            g,
            tg,
            KdvVariant::VariableCoefficient { bathymetry: BathymetryProfile::Flat, direction: Direction::Left },
        )
        .unwrap();
        let u0 = SolitonSpec::new(0.5, -12.0, 0.2).unwrap().field(&g, 0.0);
        let r = right.step(&right.init_predictor(&u0).unwrap()).unwrap();
        // x -> -x maps the right-going variable u to minus the left-going one
        let n0 = u0.mirrored().scaled(-1.0);
        let l = left.step(&left.init_predictor(&n0).unwrap()).unwrap();
        let expect = r.u_current.mirrored().scaled(-1.0);
        for i in 0..g.num_points() {
            assert!((l.u_current[i] - expect[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_stride_is_rejected() {
        let p = problem(0.1, 64, 0.1, 2);
        assert!(matches!(p.run(&Field::zeros(*p.grid()), 0), Err(Error::Config(_))));
    }
}
