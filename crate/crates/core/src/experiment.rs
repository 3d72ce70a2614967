//! Orchestration of the three models and the comparison metrics.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::approx::{classical_surfaces, growth_diagnostic, topo_modified_surfaces, GrowthSeries};
use crate::boussinesq::{BoussinesqProblem, WaveSnapshot};
use crate::error::{Error, Result};
use crate::grid::{discrete_h1_eps, discrete_l2, BathymetryProfile, Field, Grid1D, TimeGrid};
use crate::kdv::{KdvProblem, KdvVariant};
use crate::scenario::{ResolvedScenario, ScenarioConfig, ScenarioKind};
use crate::trajectory::Trajectory;

/// `max|a - b| / max|b|`, or `max|a|` when `b` vanishes.
pub fn relative_linf_error(a: &Field, b: &Field) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch(format!(
            "{} points at dx = {} vs {} points at dx = {}",
            a.len(),
            a.grid().dx(),
            b.len(),
            b.grid().dx()
        )));
    }
    let diff = a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = b.max_abs();
    Ok(if scale < 1e-14 { a.max_abs() } else { diff / scale })
}

/// Position of the largest value of `eta`, smallest index on ties.
pub fn main_wave_position(eta: &Field) -> f64 {
    let mut best = 0;
    for (i, v) in eta.values().iter().enumerate() {
        if *v > eta[best] {
            best = i;
        }
    }
    eta.grid().x(best)
}

/// Distance left of the main crest beyond which the reflected wave is sought, in soliton widths.
pub const REFLECTION_EXCLUSION_WIDTHS: f64 = 5.0;
/// Margin kept clear of the crest's right flank after wrapping around the domain, in widths.
pub const REFLECTION_WRAP_WIDTHS: f64 = 2.0;

/// Signed extreme of the left-going component `(eta - v)/2` over the nodes
/// lying between `5/k` and `L - 2/k` to the left of the main crest (periodic
/// distance). Returns 0 when the region is empty.
pub fn reflected_wave_metric(eta: &Field, v: &Field, main_wave_position: f64, width: f64) -> Result<f64> {
    if eta.grid() != v.grid() {
        return Err(Error::GridMismatch("reflected_wave_metric: eta and v differ".into()));
    }
    let grid = eta.grid();
    let length = grid.length();
    let (near, far) = (REFLECTION_EXCLUSION_WIDTHS / width, length - REFLECTION_WRAP_WIDTHS / width);
    let mut best = 0.0f64;
    for i in 0..grid.num_points() {
        let d = (main_wave_position - grid.x(i)).rem_euclid(length);
        if d >= near && d <= far {
            let left_going = 0.5 * (eta[i] - v[i]);
            if left_going.abs() > best.abs() {
                best = left_going;
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub t: f64,
    pub err_kdv: f64,
    pub err_kdv_topo: f64,
    pub refl_b: f64,
    pub refl_kdv: f64,
    pub refl_topo: f64,
    pub l2_drift: f64,
    pub h1eps_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    pub t: f64,
    pub eta_boussinesq: Field,
    pub eta_kdv: Field,
    pub eta_kdv_topo: Field,
    pub v_boussinesq: Field,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ModelTimings {
    pub kdv_seconds: f64,
    pub boussinesq_seconds: f64,
    pub topo_reconstruction_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub scenario: ResolvedScenario,
    pub grid: Grid1D,
    pub records: Vec<ErrorRecord>,
    pub snapshots: Vec<SnapshotRecord>,
    pub timings: ModelTimings,
    /// Right-going KdV solution at every record time.
    pub kdv: Trajectory<Field>,
    /// Boussinesq solution at every record time; empty for validation runs.
    pub boussinesq: Option<Trajectory<WaveSnapshot>>,
}

impl ComparisonReport {
    pub fn record_at(&self, t: f64) -> Option<&ErrorRecord> {
        self.records.iter().find(|r| (r.t - t).abs() < 1e-9 * self.grid.dx().max(1.0))
    }
}

/// Step indices at which the models are sampled.
fn record_steps(s: &ResolvedScenario, tg: &TimeGrid) -> BTreeSet<usize> {
    let every = tg.step_of(s.error_interval).expect("validated at resolution");
    let mut steps: BTreeSet<usize> = (0..=tg.num_steps()).step_by(every).collect();
    steps.insert(tg.num_steps());
    for &t in &s.snapshot_times {
        steps.insert(tg.step_of(t).expect("validated at resolution"));
    }
    steps
}

fn run_kdv(s: &ResolvedScenario, wanted: &BTreeSet<usize>) -> Result<(Trajectory<Field>, Vec<f64>)> {
    let grid = s.grid();
    let tg = s.time_grid();
    let problem = KdvProblem::new(s.epsilon, grid, tg, KdvVariant::Classical)?.with_nonlinear_form(s.nonlinear_form);
    let u0 = s.soliton().field(&grid, 0.0);
    let l0 = discrete_l2(&u0);
    let mut traj = Trajectory::new(tg.dt(), 1);
    let mut drift = Vec::new();
    problem.run_with(&u0, usize::MAX, |st| {
        if wanted.contains(&st.step_index) {
            traj.push(st.step_index, st.u_current.clone());
            drift.push((discrete_l2(&st.u_current) - l0) / l0);
        }
    })?;
    Ok((traj, drift))
}

fn run_boussinesq(s: &ResolvedScenario, wanted: &BTreeSet<usize>) -> Result<(Trajectory<WaveSnapshot>, Vec<f64>)> {
    let grid = s.grid();
    let tg = s.time_grid();
    let coeffs = s.model_coefficients();
    let problem =
        BoussinesqProblem::new(coeffs, s.bathymetry.clone(), grid, tg)?.with_bottom_coupling(s.bottom_coupling);
    let half = s.soliton().field(&grid, 0.0).scaled(0.5);
    let e0 = discrete_h1_eps(&half, &half, &coeffs)?;
    let mut traj = Trajectory::new(tg.dt(), 1);
    let mut drift = Vec::new();
    let mut failure = None;
    problem.run_with(&half, &half, usize::MAX, |st| {
        if wanted.contains(&st.step_index) {
            match discrete_h1_eps(&st.v_current, &st.eta_current, &coeffs) {
                Ok(e) => drift.push((e - e0) / e0),
                Err(e) => failure = Some(e),
            }
            traj.push(st.step_index, WaveSnapshot { v: st.v_current.clone(), eta: st.eta_current.clone() });
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok((traj, drift)),
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ComparisonReport> {
    run_resolved(&config.resolve()?)
}

pub fn run_resolved(s: &ResolvedScenario) -> Result<ComparisonReport> {
    match s.scenario {
        ScenarioKind::Validate => run_validation(s),
        ScenarioKind::Step | ScenarioKind::Sinusoid => run_comparison(s),
        ScenarioKind::Convergence | ScenarioKind::Growth => {
            Err(Error::config("convergence and growth scenarios have their own entry points"))
        }
    }
}

fn run_validation(s: &ResolvedScenario) -> Result<ComparisonReport> {
    let grid = s.grid();
    let tg = s.time_grid();
    let wanted = record_steps(s, &tg);
    let ((kdv, l2), kdv_seconds) = timed(|| run_kdv(s, &wanted))?;
    let soliton = s.soliton();
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    for ((t, u), drift) in kdv.iter().zip(l2) {
        let exact = soliton.field(&grid, t);
        records.push(ErrorRecord {
            t,
            err_kdv: relative_linf_error(u, &exact)?,
            err_kdv_topo: f64::NAN,
            refl_b: f64::NAN,
            refl_kdv: f64::NAN,
            refl_topo: f64::NAN,
            l2_drift: drift,
            h1eps_drift: f64::NAN,
        });
        if is_snapshot(s, t) {
            snapshots.push(SnapshotRecord {
                t,
                eta_boussinesq: exact.clone(),
                eta_kdv: u.clone(),
                eta_kdv_topo: u.clone(),
                v_boussinesq: exact,
            });
        }
    }
    Ok(ComparisonReport {
        scenario: s.clone(),
        grid,
        records,
        snapshots,
        timings: ModelTimings { kdv_seconds, ..Default::default() },
        kdv,
        boussinesq: None,
    })
}

fn is_snapshot(s: &ResolvedScenario, t: f64) -> bool {
    s.snapshot_times.iter().any(|&x| (x - t).abs() < 1e-9 * s.dx.max(1.0))
}

fn run_comparison(s: &ResolvedScenario) -> Result<ComparisonReport> {
    let grid = s.grid();
    let tg = s.time_grid();
    let wanted = record_steps(s, &tg);
    let (kdv_run, bous_run) = std::thread::scope(|scope| {
        let k = scope.spawn(|| timed(|| run_kdv(s, &wanted)));
        let b = timed(|| run_boussinesq(s, &wanted));
        (k.join().expect("KdV worker panicked"), b)
    });
    let ((kdv, l2), kdv_seconds) = kdv_run?;
    let ((bous, h1), boussinesq_seconds) = bous_run?;

    let zero = kdv.map(|f| Field::zeros(*f.grid()));
    let coeffs = s.model_coefficients();
    let width = s.soliton().width();
    let start = Instant::now();
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    for (k, (t, b)) in bous.iter().enumerate() {
        let classical = classical_surfaces(&kdv, &zero, t)?;
        let topo = topo_modified_surfaces(&kdv, &zero, &s.bathymetry, &coeffs, t, s.periodic_variant, s.topo_bracket)?;
        let crest = main_wave_position(&b.eta);
        records.push(ErrorRecord {
            t,
            err_kdv: relative_linf_error(&classical.eta, &b.eta)?,
            err_kdv_topo: relative_linf_error(&topo.eta, &b.eta)?,
            refl_b: reflected_wave_metric(&b.eta, &b.v, crest, width)?,
            refl_kdv: reflected_wave_metric(&classical.eta, &classical.v, main_wave_position(&classical.eta), width)?,
            refl_topo: reflected_wave_metric(&topo.eta, &topo.v, main_wave_position(&topo.eta), width)?,
            l2_drift: l2[k],
            h1eps_drift: h1[k],
        });
        if is_snapshot(s, t) {
            snapshots.push(SnapshotRecord {
                t,
                eta_boussinesq: b.eta.clone(),
                eta_kdv: classical.eta,
                eta_kdv_topo: topo.eta,
                v_boussinesq: b.v.clone(),
            });
        }
    }
    let topo_reconstruction_seconds = start.elapsed().as_secs_f64();
    Ok(ComparisonReport {
        scenario: s.clone(),
        grid,
        records,
        snapshots,
        timings: ModelTimings { kdv_seconds, boussinesq_seconds, topo_reconstruction_seconds },
        kdv,
        boussinesq: Some(bous),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub epsilon: f64,
    pub deltas: Vec<f64>,
    /// KdV final relative error against the analytic soliton, per level.
    pub kdv_errors: Vec<f64>,
    pub kdv_orders: Vec<f64>,
    /// Boussinesq final `eta` differences between consecutive levels, on the coarsest nodes.
    pub boussinesq_differences: Vec<f64>,
    pub boussinesq_orders: Vec<f64>,
    /// Human-readable notes on non-monotone error sequences.
    pub warnings: Vec<String>,
}

fn orders(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn coarse_restriction(fine: &Field, factor: usize, coarse: &Grid1D) -> Result<Field> {
    Field::new(*coarse, (0..coarse.num_points()).map(|i| fine[i * factor]).collect())
}

/// Runs the flat-bottom soliton problem at `dx, dx/2, dx/4, ...` with `dt = dx`.
pub fn convergence_study(config: &ScenarioConfig) -> Result<ConvergenceReport> {
    let s = config.resolve()?;
    if s.scenario != ScenarioKind::Convergence {
        return Err(Error::config("convergence_study expects a convergence scenario"));
    }
    if s.refinement_levels < 3 {
        return Err(Error::config("convergence needs at least 3 refinement levels"));
    }
    let coarse = s.grid();
    let mut deltas = Vec::new();
    let mut kdv_errors = Vec::new();
    let mut etas = Vec::new();
    for level in 0..s.refinement_levels {
        let factor = 1usize << level;
        let dx = s.dx / factor as f64;
        let grid = Grid1D::new(s.num_points * factor, dx)?;
        let tg = TimeGrid::new(dx, s.num_steps * factor)?;
        let soliton = s.soliton();
        let u0 = soliton.field(&grid, 0.0);
        let kdv = KdvProblem::new(s.epsilon, grid, tg, KdvVariant::Classical)?.with_nonlinear_form(s.nonlinear_form);
        let bous = BoussinesqProblem::new(s.model_coefficients(), BathymetryProfile::Flat, grid, tg)?
            .with_bottom_coupling(s.bottom_coupling);
        let half = u0.scaled(0.5);
        let (k, b) = std::thread::scope(|scope| {
            let k = scope.spawn(|| kdv.run(&u0, usize::MAX));
            let b = bous.run_boussinesq(&half, &half, usize::MAX);
            (k.join().expect("KdV worker panicked"), b)
        });
        let (t, u) = k?.last().map(|(t, u)| (t, u.clone())).expect("final state stored");
        kdv_errors.push(relative_linf_error(&u, &soliton.field(&grid, t))?);
        let b = b?;
        etas.push(coarse_restriction(&b.last().expect("final state stored").1.eta, factor, &coarse)?);
        deltas.push(dx);
    }
    let boussinesq_differences: Vec<f64> = etas
        .windows(2)
        .map(|w| relative_linf_error(&w[0], &w[1]))
        .collect::<Result<_>>()?;
    let mut warnings = Vec::new();
    for (name, seq) in [("kdv error", &kdv_errors), ("boussinesq difference", &boussinesq_differences)] {
        if seq.windows(2).any(|w| w[1] >= w[0]) {
            warnings.push(format!("{name} sequence is not decreasing: {seq:?}"));
        }
    }
    Ok(ConvergenceReport {
        epsilon: s.epsilon,
        deltas,
        kdv_orders: orders(&kdv_errors),
        kdv_errors,
        boussinesq_orders: orders(&boussinesq_differences),
        boussinesq_differences,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub scenario: ResolvedScenario,
    pub series: GrowthSeries,
    /// Right-going KdV solution at the sampled times.
    pub kdv: Trajectory<Field>,
}

/// Corrector growth study with a right-going wave only (`N0 = 0`).
pub fn growth_study(config: &ScenarioConfig) -> Result<GrowthReport> {
    let s = config.resolve()?;
    if s.scenario != ScenarioKind::Growth {
        return Err(Error::config("growth_study expects a growth scenario"));
    }
    let tg = s.time_grid();
    let wanted = record_steps(&s, &tg);
    let (kdv, _) = run_kdv(&s, &wanted)?;
    let zero = kdv.map(|f| Field::zeros(*f.grid()));
    let series = growth_diagnostic(&kdv, &zero, &s.bathymetry, &s.model_coefficients(), s.sobolev_order)?;
    Ok(GrowthReport { scenario: s, series, kdv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SolitonSpec;

    #[test]
    fn relative_error_cases() {
        let g = Grid1D::new(200, 0.1).unwrap();
        let s = SolitonSpec::new(0.5, -10.0, 0.1).unwrap();
        let b = s.field(&g, 0.0);
        assert_eq!(relative_linf_error(&b, &b).unwrap(), 0.0);
        assert!((relative_linf_error(&b.scaled(1.1), &b).unwrap() - 0.1).abs() < 1e-12);
        let shifted = SolitonSpec::new(0.5, -10.0 - g.dx(), 0.1).unwrap().field(&g, 0.0);
        let mut scan = 0.0f64;
        for i in 0..g.num_points() {
            scan = scan.max((shifted[i] - b[i]).abs());
        }
        assert_eq!(relative_linf_error(&shifted, &b).unwrap(), scan / b.max_abs());
        let z = Field::zeros(g);
        assert_eq!(relative_linf_error(&b, &z).unwrap(), b.max_abs());
        let other = Field::zeros(Grid1D::new(100, 0.1).unwrap());
        assert!(matches!(relative_linf_error(&other, &z), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn reflected_metric_picks_signed_left_going_extreme() {
        let g = Grid1D::new(800, 0.1).unwrap();
        let k = SolitonSpec::new(0.5, 0.0, 0.1).unwrap().width();
        let right = SolitonSpec::new(0.5, -60.0, 0.1).unwrap().field(&g, 0.0).scaled(0.5);
        assert_eq!(reflected_wave_metric(&right, &right, 60.0, k).unwrap(), 0.0);
        // a left-going depression 30 units behind the crest: eta = -v
        let dip = SolitonSpec::new(0.5, -30.0, 0.1).unwrap().field(&g, 0.0).scaled(0.04);
        let eta = right.axpy(-1.0, &dip).unwrap();
        let v = right.axpy(1.0, &dip).unwrap();
        let m = reflected_wave_metric(&eta, &v, main_wave_position(&eta), k).unwrap();
        assert!((m + 0.02).abs() < 1e-12, "{m}");
        // nothing is reported inside the exclusion zone
        let near = SolitonSpec::new(0.5, -58.0, 0.1).unwrap().field(&g, 0.0).scaled(0.04);
        let eta = right.axpy(-1.0, &near).unwrap();
        let v = right.axpy(1.0, &near).unwrap();
        let r = reflected_wave_metric(&eta, &v, 60.0, k).unwrap();
        assert!(r.abs() < 1e-3, "{r}");
    }

    #[test]
    fn main_wave_position_breaks_ties_left() {
        let g = Grid1D::new(10, 1.0).unwrap();
        let f = Field::new(g, vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(main_wave_position(&f), 1.0);
    }
}
