//! Crank–Nicolson relaxation scheme for the symmetric Boussinesq system
//!
//! ```text
//! (1 - eps a2 dxx) v_t + eta_x + eps [ 1/2 eta eta_x + 3/2 v v_x - 1/2 b eta_x + a1 eta_xxx ] = 0
//! (1 - eps a4 dxx) eta_t + v_x + eps [ 1/2 ((eta - b) v)_x + a3 v_xxx ] = 0
//! ```
//!
//! Quadratic terms are linearized around the predictors `p = v^{n+1/2}`,
//! `q = eta^{n+1/2}` in skew-adjoint form (`P D1 + D1 P`), so the discrete
//! energy `|v|^2 + |eta|^2 + eps a2 |grad v|^2 + eps a4 |grad eta|^2` is
//! preserved on a flat bottom. Both unknowns are solved together, interleaved
//! as `(v_0, eta_0, v_1, eta_1, ...)`.

use crate::error::{Error, Result};
use crate::findiff::{make_d1, make_d2, make_d3, CyclicBandedMatrix, CyclicBandedOperator};
use crate::grid::{BathymetryProfile, Field, Grid1D, ModelCoefficients, TimeGrid};
use crate::trajectory::Trajectory;

/// How the bottom enters the surface equation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BottomCoupling {
    /// `-eps/2 D1 (B v)`, the adjoint of the velocity equation's `-eps/2 B D1 eta`.
    #[default]
    Conservative,
    /// `-eps/2 B D1 v`, dropping the `b_x v` contribution.
    Advective,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoussinesqState {
    pub v_current: Field,
    pub eta_current: Field,
    pub v_predictor: Field,
    pub eta_predictor: Field,
    pub step_index: usize,
    pub time: f64,
}

/// Stored `(v, eta)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSnapshot {
    pub v: Field,
    pub eta: Field,
}

#[derive(Debug, Clone)]
pub struct BoussinesqProblem {
    coeffs: ModelCoefficients,
    bathymetry: BathymetryProfile,
    grid: Grid1D,
    time_grid: TimeGrid,
    coupling: BottomCoupling,
    bottom: Vec<f64>,
    d1: CyclicBandedOperator,
    d2: CyclicBandedOperator,
    d3: CyclicBandedOperator,
}

impl BoussinesqProblem {
    pub fn new(
        coeffs: ModelCoefficients,
        bathymetry: BathymetryProfile,
        grid: Grid1D,
        time_grid: TimeGrid,
    ) -> Result<Self> {
        let bottom = bathymetry.sample(&grid)?;
        Ok(BoussinesqProblem {
            coeffs,
            bathymetry,
            grid,
            time_grid,
            coupling: BottomCoupling::default(),
            bottom,
            d1: make_d1(&grid),
            d2: make_d2(&grid),
            d3: make_d3(&grid),
        })
    }

    pub fn with_bottom_coupling(mut self, coupling: BottomCoupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn coeffs(&self) -> &ModelCoefficients {
        &self.coeffs
    }

    pub fn bathymetry(&self) -> &BathymetryProfile {
        &self.bathymetry
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time_grid
    }

    pub fn bottom_coupling(&self) -> BottomCoupling {
        self.coupling
    }

    /// Diagonal of `B`, the bathymetry sampled at the nodes.
    pub fn bottom_matrix(&self) -> &[f64] {
        &self.bottom
    }

    fn mass(&self, a: f64) -> CyclicBandedMatrix {
        let mut m = CyclicBandedMatrix::identity(self.grid.num_points(), 2);
        m.add_operator(-self.coeffs.epsilon * a, &self.d2);
        m
    }

    fn skew(&self, scale: f64, p: &[f64], into: &mut CyclicBandedMatrix) {
        into.add_diag_operator(scale, p, &self.d1);
        into.add_operator_diag(scale, &self.d1, p);
    }

    /// Coupled Crank–Nicolson matrix acting on the interleaved averages.
    fn system_matrix(&self, p: &[f64], q: &[f64]) -> CyclicBandedMatrix {
        let n = self.grid.num_points();
        let eps = self.coeffs.epsilon;
        let h = 0.5 * self.time_grid.dt();

        let mut vv = CyclicBandedMatrix::zeros(n, 2);
        self.skew(0.5 * eps, p, &mut vv);

        let mut ve = CyclicBandedMatrix::zeros(n, 2);
        ve.add_operator(1.0, &self.d1);
        ve.add_diag_operator(-0.5 * eps, &self.bottom, &self.d1);
        self.skew(eps / 6.0, q, &mut ve);
        ve.add_operator(eps * self.coeffs.a1, &self.d3);

        let mut ev = CyclicBandedMatrix::zeros(n, 2);
        ev.add_operator(1.0, &self.d1);
        match self.coupling {
            BottomCoupling::Conservative => ev.add_operator_diag(-0.5 * eps, &self.d1, &self.bottom),
            BottomCoupling::Advective => ev.add_diag_operator(-0.5 * eps, &self.bottom, &self.d1),
        }
        self.skew(eps / 6.0, q, &mut ev);
        ev.add_operator(eps * self.coeffs.a3, &self.d3);

        let mut ee = CyclicBandedMatrix::zeros(n, 2);
        self.skew(eps / 6.0, p, &mut ee);

        for m in [&mut vv, &mut ve, &mut ev, &mut ee] {
            m.scale(h);
        }
        vv.add_operator(1.0, &CyclicBandedOperator::identity(n));
        vv.add_operator(-eps * self.coeffs.a2, &self.d2);
        ee.add_operator(1.0, &CyclicBandedOperator::identity(n));
        ee.add_operator(-eps * self.coeffs.a4, &self.d2);
        CyclicBandedMatrix::interleave([[&vv, &ve], [&ev, &ee]])
    }

    /// Explicit time derivatives `(v_t, eta_t)` with pointwise quadratic terms.
    pub fn time_derivative(&self, v: &Field, eta: &Field) -> Result<(Field, Field)> {
        self.grid.check_same(v.grid())?;
        self.grid.check_same(eta.grid())?;
        let eps = self.coeffs.epsilon;
        let (vs, es, b) = (v.values(), eta.values(), &self.bottom);
        let dv = self.d1.apply_slice(vs)?;
        let de = self.d1.apply_slice(es)?;
        let d3v = self.d3.apply_slice(vs)?;
        let d3e = self.d3.apply_slice(es)?;
        let flux: Vec<f64> = match self.coupling {
            BottomCoupling::Conservative => (0..vs.len()).map(|i| (es[i] - b[i]) * vs[i]).collect(),
            BottomCoupling::Advective => (0..vs.len()).map(|i| es[i] * vs[i]).collect(),
        };
        let dflux = self.d1.apply_slice(&flux)?;
        let n = vs.len();
        let mut fv = vec![0.0; n];
        let mut fe = vec![0.0; n];
        for i in 0..n {
            fv[i] = -(de[i]
                + eps * (0.5 * es[i] * de[i] + 1.5 * vs[i] * dv[i] - 0.5 * b[i] * de[i] + self.coeffs.a1 * d3e[i]));
            let bottom = match self.coupling {
                BottomCoupling::Conservative => 0.0,
                BottomCoupling::Advective => -0.5 * b[i] * dv[i],
            };
            fe[i] = -(dv[i] + eps * (0.5 * dflux[i] + bottom + self.coeffs.a3 * d3v[i]));
        }
        let v_t = self.mass(self.coeffs.a2).solve(&fv)?;
        let eta_t = self.mass(self.coeffs.a4).solve(&fe)?;
        let nonfinite = || Error::NonFinite { what: "Boussinesq time derivative".into() };
        Ok((
            Field::new(self.grid, v_t).map_err(|_| nonfinite())?,
            Field::new(self.grid, eta_t).map_err(|_| nonfinite())?,
        ))
    }

    pub fn init_boussinesq(&self, v0: &Field, eta0: &Field) -> Result<BoussinesqState> {
        let (v_t, eta_t) = self.time_derivative(v0, eta0)?;
        let h = 0.5 * self.time_grid.dt();
        Ok(BoussinesqState {
            v_current: v0.clone(),
            eta_current: eta0.clone(),
            v_predictor: v0.axpy(h, &v_t)?,
            eta_predictor: eta0.axpy(h, &eta_t)?,
            step_index: 0,
            time: 0.0,
        })
    }

    pub fn step_boussinesq(&self, state: &BoussinesqState) -> Result<BoussinesqState> {
        let n = self.grid.num_points();
        let next_index = state.step_index + 1;
        let next_time = next_index as f64 * self.time_grid.dt();
        let at_step = |e: Error| Error::AtStep { step: next_index, time: next_time, source: Box::new(e) };

        let a = self.system_matrix(state.v_predictor.values(), state.eta_predictor.values());
        let rv = self.mass(self.coeffs.a2).matvec(state.v_current.values());
        let re = self.mass(self.coeffs.a4).matvec(state.eta_current.values());
        let rhs: Vec<f64> = (0..2 * n).map(|k| if k % 2 == 0 { rv[k / 2] } else { re[k / 2] }).collect();
        let avg = a.solve(&rhs).map_err(at_step)?;

        let relax = |k: usize, cur: &Field, pred: &Field| -> (Vec<f64>, Vec<f64>) {
            let next: Vec<f64> = (0..n).map(|i| 2.0 * avg[2 * i + k] - cur[i]).collect();
            let p: Vec<f64> = (0..n).map(|i| 2.0 * next[i] - pred[i]).collect();
            (next, p)
        };
        let (v_next, v_pred) = relax(0, &state.v_current, &state.v_predictor);
        let (e_next, e_pred) = relax(1, &state.eta_current, &state.eta_predictor);
        let field = |vals| Field::new(self.grid, vals).map_err(|_| Error::Instability { step: next_index, time: next_time });
        Ok(BoussinesqState {
            v_current: field(v_next)?,
            eta_current: field(e_next)?,
            v_predictor: field(v_pred)?,
            eta_predictor: field(e_pred)?,
            step_index: next_index,
            time: next_time,
        })
    }

    pub fn run_boussinesq(&self, v0: &Field, eta0: &Field, stride: usize) -> Result<Trajectory<WaveSnapshot>> {
        self.run_with(v0, eta0, stride, |_| {})
    }

    /// As [`BoussinesqProblem::run_boussinesq`], calling `observe` on every state.
    pub fn run_with(
        &self,
        v0: &Field,
        eta0: &Field,
        stride: usize,
        mut observe: impl FnMut(&BoussinesqState),
    ) -> Result<Trajectory<WaveSnapshot>> {
        if stride == 0 {
            return Err(Error::config("snapshot stride must be at least 1"));
        }
        let snap = |s: &BoussinesqState| WaveSnapshot { v: s.v_current.clone(), eta: s.eta_current.clone() };
        let mut state = self.init_boussinesq(v0, eta0)?;
        observe(&state);
        let mut traj = Trajectory::new(self.time_grid.dt(), stride);
        traj.push(0, snap(&state));
        let steps = self.time_grid.num_steps();
        for _ in 0..steps {
            state = self.step_boussinesq(&state)?;
            observe(&state);
            if state.step_index % stride == 0 || state.step_index == steps {
                traj.push(state.step_index, snap(&state));
            }
        }
        Ok(traj)
    }
}
