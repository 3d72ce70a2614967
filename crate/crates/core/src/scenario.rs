//! Scenario configuration and its resolution against per-scenario defaults.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::approx::TopoBracket;
use crate::boussinesq::BottomCoupling;
use crate::error::{Error, Result};
use crate::grid::{BathymetryProfile, Grid1D, ModelCoefficients, SolitonSpec, TimeGrid};
use crate::kdv::NonlinearForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Validate,
    Step,
    Sinusoid,
    Convergence,
    Growth,
}

/// Bottom used by a growth study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthBottom {
    Step,
    Sinusoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientTriple {
    pub theta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl CoefficientTriple {
    pub const EQUAL_TWELFTHS: CoefficientTriple =
        CoefficientTriple { theta: 0.816_496_580_927_726, lambda1: 0.5, lambda2: 0.5 };
    pub const PURE_DISPERSIVE: CoefficientTriple =
        CoefficientTriple { theta: 0.816_496_580_927_726, lambda1: 1.0, lambda2: 1.0 };
}

/// User-facing configuration; every optional field falls back to the scenario default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_length: Option<f64>,
    /// Grid spacing, also used as the time step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `d` in `alpha / cosh^2(k (x + d))`; the initial crest sits at `-d` (mod L).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bathymetry: Option<BathymetryProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientTriple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    /// Defaults to the first, middle and last time step.
    pub snapshot_times: Option<Vec<f64>>,
    /// Spacing of the rows of `errors.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_interval: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Extend a Step run to `T = eps^{-3/2}`.
    #[serde(default)]
    pub overtime: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement_levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_bottom: Option<GrowthBottom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sobolev_order: Option<usize>,
    #[serde(default)]
    pub periodic_variant: bool,
    #[serde(default)]
    pub nonlinear_form: NonlinearForm,
    #[serde(default)]
    pub bottom_coupling: BottomCoupling,
    #[serde(default)]
    pub topo_bracket: TopoBracket,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind, epsilon: f64) -> Self {
        ScenarioConfig {
            scenario,
            epsilon,
            final_time: None,
            domain_length: None,
            dx: None,
            alpha: None,
            shift: None,
            bathymetry: None,
            coefficients: None,
            snapshot_times: None,
            error_interval: None,
            output_dir: None,
            overtime: false,
            refinement_levels: None,
            growth_bottom: None,
            sobolev_order: None,
            periodic_variant: false,
            nonlinear_form: NonlinearForm::default(),
            bottom_coupling: BottomCoupling::default(),
            topo_bracket: TopoBracket::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self) -> Result<ResolvedScenario> {
        resolve(self)
    }
}

/// Fully determined scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedScenario {
    pub scenario: ScenarioKind,
    pub epsilon: f64,
    pub final_time: f64,
    pub domain_length: f64,
    pub dx: f64,
    pub num_points: usize,
    pub num_steps: usize,
    pub alpha: f64,
    pub shift: f64,
    pub bathymetry: BathymetryProfile,
    pub coefficients: CoefficientTriple,
    pub snapshot_times: Vec<f64>,
    pub error_interval: f64,
    pub output_dir: Option<PathBuf>,
    pub overtime: bool,
    pub refinement_levels: usize,
    pub growth_bottom: Option<GrowthBottom>,
    pub sobolev_order: usize,
    pub periodic_variant: bool,
    pub nonlinear_form: NonlinearForm,
    pub bottom_coupling: BottomCoupling,
    pub topo_bracket: TopoBracket,
}

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_BETA0: f64 = 0.5;
pub const STEP_RAMP_HALF_WIDTH: f64 = 1.5;
/// Default spacing of error records, in time steps.
pub const DEFAULT_ERROR_STEPS: usize = 5;

/// Wavelength `(1 + eps alpha / 4) / eps` of the sinusoidal bottom.
pub fn sinusoid_wavelength(epsilon: f64, alpha: f64) -> f64 {
    (1.0 + epsilon * alpha / 4.0) / epsilon
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

struct Defaults {
    final_time: f64,
    length: f64,
    dx: f64,
    crest: f64,
    bathymetry: Option<BathymetryProfile>,
    coefficients: CoefficientTriple,
}

fn defaults(cfg: &ScenarioConfig, alpha: f64) -> Defaults {
    let eps = cfg.epsilon;
    let twelfths = CoefficientTriple::EQUAL_TWELFTHS;
    match cfg.scenario {
        ScenarioKind::Validate | ScenarioKind::Convergence => {
            let (t, dx) = if approx_eq(eps, 0.05) {
                (20.0, 0.03)
            } else if approx_eq(eps, 0.2) {
                (5.0, 0.05)
            } else {
                ((1.0 / eps).min(20.0), 0.04)
            };
            Defaults { final_time: t, length: 80.0, dx, crest: 30.0, bathymetry: None, coefficients: twelfths }
        }
        ScenarioKind::Step => {
            let (t, length, dx) = if approx_eq(eps, 0.05) {
                (89.0, 140.0, 0.03)
            } else if approx_eq(eps, 0.2) {
                (12.0, 80.0, 0.05)
            } else {
                (1.0 / eps, 80.0, 0.05)
            };
            Defaults {
                final_time: t,
                length,
                dx,
                crest: step_crest(length, eps, alpha),
                bathymetry: Some(step_profile(length)),
                coefficients: twelfths,
            }
        }
        ScenarioKind::Sinusoid => {
            let l = sinusoid_wavelength(eps, alpha);
            let length = if approx_eq(eps, 0.1) { 20.0 } else { 2.0 * l };
            Defaults {
                final_time: 1.0 / eps,
                length,
                dx: 0.04,
                crest: length / 2.0,
                bathymetry: Some(BathymetryProfile::Sinusoid { b0: DEFAULT_BETA0, wavelength: l }),
                coefficients: twelfths,
            }
        }
        ScenarioKind::Growth => match cfg.growth_bottom.unwrap_or(GrowthBottom::Step) {
            GrowthBottom::Step => Defaults {
                final_time: 20.0,
                length: 80.0,
                dx: 0.05,
                crest: step_crest(80.0, eps, alpha),
                bathymetry: Some(step_profile(80.0)),
                coefficients: CoefficientTriple::PURE_DISPERSIVE,
            },
            GrowthBottom::Sinusoid => {
                let l = sinusoid_wavelength(eps, alpha);
                Defaults {
                    final_time: 1.0 / eps,
                    length: 2.0 * l,
                    dx: 0.04,
                    crest: 0.25 * l,
                    bathymetry: Some(BathymetryProfile::Sinusoid { b0: DEFAULT_BETA0, wavelength: l }),
                    coefficients: CoefficientTriple::PURE_DISPERSIVE,
                }
            }
        },
    }
}

/// Step centred in the domain, ramp of half-width 3/2, plateau `beta0`.
pub fn step_profile(length: f64) -> BathymetryProfile {
    BathymetryProfile::Step { beta0: DEFAULT_BETA0, center: length / 2.0, ramp_half_width: STEP_RAMP_HALF_WIDTH }
}

/// Default initial crest for Step runs: the soliton reaches the ramp centre
/// at slow time `eps t = 1/2`.
pub fn step_crest(length: f64, epsilon: f64, alpha: f64) -> f64 {
    length / 2.0 - 0.5 * (1.0 + epsilon * alpha / 4.0) / epsilon
}

fn resolve(cfg: &ScenarioConfig) -> Result<ResolvedScenario> {
    let eps = cfg.epsilon;
    if !(eps.is_finite() && eps > 0.0 && eps < 1.0) {
        return Err(Error::config(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    let alpha = cfg.alpha.unwrap_or(DEFAULT_ALPHA);
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::config(format!("soliton amplitude alpha must be > 0, got {alpha}")));
    }
    if cfg.overtime && cfg.scenario != ScenarioKind::Step {
        return Err(Error::config("overtime applies to step scenarios only"));
    }
    if cfg.growth_bottom.is_some() && cfg.scenario != ScenarioKind::Growth {
        return Err(Error::config("growth_bottom applies to growth scenarios only"));
    }
    let d = defaults(cfg, alpha);
    let dx = cfg.dx.unwrap_or(d.dx);
    let length = cfg.domain_length.unwrap_or(d.length);
    let final_time = if cfg.overtime {
        eps.powf(-1.5)
    } else {
        cfg.final_time.unwrap_or(d.final_time)
    };
    if !(final_time.is_finite() && final_time > 0.0) {
        return Err(Error::config(format!("final_time must be positive, got {final_time}")));
    }
    let grid = Grid1D::with_length(length, dx)?;
    let time_grid = TimeGrid::with_final_time(final_time, dx)?;
    let bathymetry = match (&cfg.bathymetry, d.bathymetry) {
        (Some(b), _) => b.clone(),
        (None, Some(b)) => b,
        (None, None) => BathymetryProfile::Flat,
    };
    bathymetry.validate()?;
    if matches!(cfg.scenario, ScenarioKind::Validate | ScenarioKind::Convergence) && !bathymetry.is_flat() {
        return Err(Error::config("validation and convergence scenarios use a flat bottom"));
    }
    let coefficients = cfg.coefficients.unwrap_or(d.coefficients);
    ModelCoefficients::new(coefficients.theta, coefficients.lambda1, coefficients.lambda2, eps)?;
    let shift = cfg.shift.unwrap_or(-d.crest);
    SolitonSpec::new(alpha, shift, eps)?;

    let t_end = time_grid.final_time();
    let mut snapshot_times = cfg.snapshot_times.clone().unwrap_or_else(|| {
        let n = time_grid.num_steps();
        [0, n / 2, n].iter().map(|&k| k as f64 * time_grid.dt()).collect()
    });
    for &t in &snapshot_times {
        if !(0.0..=t_end + 1e-9).contains(&t) || time_grid.step_of(t).is_none() {
            return Err(Error::config(format!("snapshot time {t} is not a time step within [0, {t_end}]")));
        }
    }
    snapshot_times.sort_by(f64::total_cmp);
    snapshot_times.dedup_by(|a, b| approx_eq(*a, *b));

    let error_interval = cfg.error_interval.unwrap_or(DEFAULT_ERROR_STEPS as f64 * dx);
    if time_grid.step_of(error_interval).is_none_or(|s| s == 0) {
        return Err(Error::config(format!("error_interval {error_interval} must be a positive multiple of dt = {dx}")));
    }
    let refinement_levels = cfg.refinement_levels.unwrap_or(3);
    if cfg.scenario == ScenarioKind::Convergence && refinement_levels < 3 {
        return Err(Error::config(format!("convergence needs at least 3 refinement levels, got {refinement_levels}")));
    }
    let sobolev_order = cfg.sobolev_order.unwrap_or(2);
    if sobolev_order > crate::approx::MAX_GROWTH_ORDER {
        return Err(Error::config(format!("sobolev_order {sobolev_order} exceeds {}", crate::approx::MAX_GROWTH_ORDER)));
    }

    Ok(ResolvedScenario {
        scenario: cfg.scenario,
        epsilon: eps,
        final_time: t_end,
        domain_length: grid.length(),
        dx,
        num_points: grid.num_points(),
        num_steps: time_grid.num_steps(),
        alpha,
        shift,
        bathymetry,
        coefficients,
        snapshot_times,
        error_interval,
        output_dir: cfg.output_dir.clone(),
        overtime: cfg.overtime,
        refinement_levels,
        growth_bottom: (cfg.scenario == ScenarioKind::Growth).then(|| cfg.growth_bottom.unwrap_or(GrowthBottom::Step)),
        sobolev_order,
        periodic_variant: cfg.periodic_variant,
        nonlinear_form: cfg.nonlinear_form,
        bottom_coupling: cfg.bottom_coupling,
        topo_bracket: cfg.topo_bracket,
    })
}

impl ResolvedScenario {
    pub fn grid(&self) -> Grid1D {
        Grid1D::new(self.num_points, self.dx).expect("validated at resolution")
    }

    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid::new(self.dx, self.num_steps).expect("validated at resolution")
    }

    pub fn soliton(&self) -> SolitonSpec {
        SolitonSpec::new(self.alpha, self.shift, self.epsilon).expect("validated at resolution")
    }

    pub fn model_coefficients(&self) -> ModelCoefficients {
        let c = self.coefficients;
        ModelCoefficients::new(c.theta, c.lambda1, c.lambda2, self.epsilon).expect("validated at resolution")
    }

    /// Initial crest position in `[0, L)`.
    pub fn initial_crest(&self) -> f64 {
        (-self.shift).rem_euclid(self.domain_length)
    }

    /// Time at which the crest reaches the step centre, for Step bottoms.
    pub fn step_crossing_time(&self) -> Option<f64> {
        match self.bathymetry {
            BathymetryProfile::Step { center, .. } => Some((center - self.initial_crest()) / self.soliton().speed()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_defaults() {
        let r = ScenarioConfig::new(ScenarioKind::Step, 0.05).resolve().unwrap();
        assert_eq!((r.num_steps, r.num_points, r.dx), (2967, 4667, 0.03));
        let r = ScenarioConfig::new(ScenarioKind::Step, 0.2).resolve().unwrap();
        assert_eq!((r.num_steps, r.num_points), (240, 1600));
        let r = ScenarioConfig::new(ScenarioKind::Sinusoid, 0.1).resolve().unwrap();
        assert_eq!((r.num_steps, r.num_points), (250, 500));
        assert!(matches!(r.bathymetry, BathymetryProfile::Sinusoid { wavelength, .. } if (wavelength - 10.125).abs() < 1e-12));
        assert_eq!(r.model_coefficients().a1, ModelCoefficients::equal_twelfths(0.1).unwrap().a1);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = ScenarioConfig::new(ScenarioKind::Validate, 0.1);
        c.alpha = Some(0.0);
        assert!(matches!(c.resolve(), Err(Error::Config(_))));
        let mut c = ScenarioConfig::new(ScenarioKind::Convergence, 0.1);
        c.refinement_levels = Some(1);
        assert!(matches!(c.resolve(), Err(Error::Config(_))));
        let mut c = ScenarioConfig::new(ScenarioKind::Step, 0.2);
        c.snapshot_times = Some(vec![0.07]);
        assert!(matches!(c.resolve(), Err(Error::Config(_))));
        assert!(ScenarioConfig::from_json(r#"{"scenario":"step","epsilon":0.2,"bogus":1}"#).is_err());
        let mut c = ScenarioConfig::new(ScenarioKind::Sinusoid, 0.1);
        c.overtime = true;
        assert!(c.resolve().is_err());
    }

    #[test]
    fn overtime_extends_step_runs() {
        let mut c = ScenarioConfig::new(ScenarioKind::Step, 0.2);
        c.overtime = true;
        let r = c.resolve().unwrap();
        assert!((r.final_time - 0.2f64.powf(-1.5)).abs() <= 0.5 * r.dx);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"scenario":"growth","epsilon":0.1,"growth_bottom":"sinusoid","bathymetry":{"kind":"flat"}}"#;
        let c = ScenarioConfig::from_json(text).unwrap();
        assert_eq!(c.bathymetry, Some(BathymetryProfile::Flat));
        let back = ScenarioConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
