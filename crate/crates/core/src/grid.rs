//! Grids, fields, bottom profiles, model coefficients and soliton data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, num_points * dx)`.
///
/// The length is always derived from the node count and spacing so that
/// `dx * num_points == length()` holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    num_points: usize,
    dx: f64,
}

pub const MIN_POINTS: usize = 8;

impl Grid1D {
    pub fn new(num_points: usize, dx: f64) -> Result<Self> {
        if num_points < MIN_POINTS {
            return Err(Error::config(format!(
                "grid needs at least {MIN_POINTS} points, got {num_points}"
            )));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::config(format!("grid spacing must be positive, got {dx}")));
        }
        Ok(Grid1D { num_points, dx })
    }

    /// Grid with spacing `dx` whose length is the multiple of `dx` closest to `length`.
    pub fn with_length(length: f64, dx: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::config(format!("domain length must be positive, got {length}")));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::config(format!("grid spacing must be positive, got {dx}")));
        }
        Grid1D::new((length / dx).round() as usize, dx)
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.dx * self.num_points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.num_points).map(|i| self.x(i)).collect()
    }

    /// Periodic index wrap for signed offsets.
    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.num_points as isize) as usize
    }

    pub(crate) fn check_same(&self, other: &Grid1D) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "{} points / dx {} vs {} points / dx {}",
                self.num_points, self.dx, other.num_points, other.dx
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    num_steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, num_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::config(format!("time step must be positive, got {dt}")));
        }
        Ok(TimeGrid { dt, num_steps })
    }

    /// Time grid with step `dt` and the step count closest to `final_time / dt`.
    pub fn with_final_time(final_time: f64, dt: f64) -> Result<Self> {
        if !(final_time.is_finite() && final_time >= 0.0) {
            return Err(Error::config(format!("final time must be nonnegative, got {final_time}")));
        }
        TimeGrid::new(dt, 0).map(|g| TimeGrid { num_steps: (final_time / dt).round() as usize, ..g })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn num_steps(&self) -> usize {
        self.num_steps
    }

    pub fn final_time(&self) -> f64 {
        self.num_steps as f64 * self.dt
    }

    /// Index `m` with `m * dt == t`, if `t` lies on the time grid.
    pub fn step_of(&self, t: f64) -> Option<usize> {
        let m = (t / self.dt).round();
        if m >= 0.0 && (m * self.dt - t).abs() <= 1e-9 * self.dt.max(t.abs()) {
            Some(m as usize)
        } else {
            None
        }
    }
}

/// Nodal values on a [`Grid1D`]. Always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    values: Vec<f64>,
    grid: Grid1D,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_points() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.num_points()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "field".into() });
        }
        Ok(Field { values, grid })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Field { values: vec![0.0; grid.num_points()], grid }
    }

    pub fn constant(grid: Grid1D, c: f64) -> Self {
        Field { values: vec![c; grid.num_points()], grid }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Field::new(grid, (0..grid.num_points()).map(|i| f(grid.x(i))).collect())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field { values: self.values.iter().map(|v| c * v).collect(), grid: self.grid }
    }

    /// `self + c * other`, node-wise.
    pub fn axpy(&self, c: f64, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Field::new(self.grid, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Periodic mirror `x -> -x` (node `i` goes to node `N - i`).
    pub fn mirrored(&self) -> Field {
        let n = self.values.len();
        let values = (0..n).map(|i| self.values[(n - i) % n]).collect();
        Field { values, grid: self.grid }
    }
}

impl std::ops::Index<usize> for Field {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Bottom topography `b(x)`, defined on the whole real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathymetryProfile {
    Flat,
    /// 0 left of the ramp, `beta0` right of it, joined by a half period of a sine.
    Step { beta0: f64, center: f64, ramp_half_width: f64 },
    /// `b0 * sin(pi/2 + 2 pi x / wavelength)`.
    Sinusoid { b0: f64, wavelength: f64 },
    /// `amplitude * sin(frequency * x)`.
    SlowSinusoid { amplitude: f64, frequency: f64 },
    /// Linear interpolation of samples, constant outside the sampled range.
    Sampled { nodes: Vec<f64>, values: Vec<f64> },
}

impl BathymetryProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            BathymetryProfile::Flat => Ok(()),
            BathymetryProfile::Step { beta0, center, ramp_half_width } => {
                if !(beta0.is_finite() && center.is_finite())
                    || !(ramp_half_width.is_finite() && *ramp_half_width > 0.0)
                {
                    return Err(Error::config("step needs finite height/center and a positive ramp half-width"));
                }
                Ok(())
            }
            BathymetryProfile::Sinusoid { b0, wavelength } => {
                if !b0.is_finite() || !(wavelength.is_finite() && *wavelength > 0.0) {
                    return Err(Error::config("sinusoid needs a finite amplitude and positive wavelength"));
                }
                Ok(())
            }
            BathymetryProfile::SlowSinusoid { amplitude, frequency } => {
                if !(amplitude.is_finite() && frequency.is_finite()) {
                    return Err(Error::config("slow sinusoid parameters must be finite"));
                }
                Ok(())
            }
            BathymetryProfile::Sampled { nodes, values } => {
                if nodes.is_empty() {
                    return Err(Error::config("sampled bathymetry has no nodes"));
                }
                if nodes.len() != values.len() {
                    return Err(Error::config("sampled bathymetry: nodes and values differ in length"));
                }
                if nodes.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::config("sampled bathymetry nodes must be strictly increasing"));
                }
                if nodes.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(Error::config("sampled bathymetry contains non-finite entries"));
                }
                Ok(())
            }
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, BathymetryProfile::Flat)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(match self {
            BathymetryProfile::Sampled { nodes, values } => {
                if nodes.is_empty() {
                    return Err(Error::config("sampled bathymetry has no nodes"));
                }
                interpolate(nodes, values, x)
            }
            _ => self.eval_analytic(x),
        })
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            BathymetryProfile::Sampled { nodes, values } => {
                if nodes.len() < 2 || x < nodes[0] || x > nodes[nodes.len() - 1] {
                    return 0.0;
                }
                let slopes = sampled_slopes(nodes, values);
                interpolate(nodes, &slopes, x)
            }
            BathymetryProfile::Flat => 0.0,
            BathymetryProfile::Step { beta0, center, ramp_half_width } => {
                let h = *ramp_half_width;
                if (x - center).abs() >= h {
                    0.0
                } else {
                    let k = std::f64::consts::PI / (2.0 * h);
                    0.5 * beta0 * k * (k * (x - center)).cos()
                }
            }
            BathymetryProfile::Sinusoid { b0, wavelength } => {
                let k = 2.0 * std::f64::consts::PI / wavelength;
                b0 * k * (std::f64::consts::FRAC_PI_2 + k * x).cos()
            }
            BathymetryProfile::SlowSinusoid { amplitude, frequency } => {
                amplitude * frequency * (frequency * x).cos()
            }
        }
    }

    /// Evaluation for the analytic variants; samples with no nodes evaluate to 0.
    fn eval_analytic(&self, x: f64) -> f64 {
        match self {
            BathymetryProfile::Flat => 0.0,
            BathymetryProfile::Step { beta0, center, ramp_half_width } => {
                let h = *ramp_half_width;
                if x <= center - h {
                    0.0
                } else if x >= center + h {
                    *beta0
                } else {
                    let k = std::f64::consts::PI / (2.0 * h);
                    0.5 * beta0 * (1.0 + (k * (x - center)).sin())
                }
            }
            BathymetryProfile::Sinusoid { b0, wavelength } => {
                b0 * (std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * x / wavelength).sin()
            }
            BathymetryProfile::SlowSinusoid { amplitude, frequency } => amplitude * (frequency * x).sin(),
            BathymetryProfile::Sampled { nodes, values } => {
                if nodes.is_empty() {
                    0.0
                } else {
                    interpolate(nodes, values, x)
                }
            }
        }
    }

    /// `b` at every node of `grid`.
    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        self.validate()?;
        Ok((0..grid.num_points()).map(|i| self.eval_analytic(grid.x(i))).collect())
    }

    /// `b'` at every node of `grid`.
    pub fn sample_derivative(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        self.validate()?;
        Ok((0..grid.num_points()).map(|i| self.derivative(grid.x(i))).collect())
    }

    /// Infallible evaluation for validated profiles.
    pub(crate) fn value(&self, x: f64) -> f64 {
        self.eval_analytic(x)
    }
}

fn interpolate(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    let last = nodes.len() - 1;
    if x <= nodes[0] {
        return values[0];
    }
    if x >= nodes[last] {
        return values[last];
    }
    let k = nodes.partition_point(|&n| n <= x) - 1;
    let s = (x - nodes[k]) / (nodes[k + 1] - nodes[k]);
    values[k] + s * (values[k + 1] - values[k])
}

// Centered differences inside, one-sided at the two ends.
fn sampled_slopes(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|k| {
            let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
            (values[b] - values[a]) / (nodes[b] - nodes[a])
        })
        .collect()
}

/// Coefficients of the symmetric Boussinesq family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelCoefficients {
    pub theta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub epsilon: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

const COEFF_TOL: f64 = 1e-12;

impl ModelCoefficients {
    pub fn new(theta: f64, lambda1: f64, lambda2: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::config(format!("theta must lie in [0, 1], got {theta}")));
        }
        if !(lambda1.is_finite() && lambda2.is_finite()) {
            return Err(Error::config("lambda parameters must be finite"));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::config(format!("epsilon must be positive, got {epsilon}")));
        }
        let t2 = theta * theta;
        let a1 = -lambda1 * (t2 - 1.0) / 2.0;
        let a2 = (lambda1 - 1.0) * (t2 - 1.0) / 2.0;
        let a3 = lambda2 * (t2 / 2.0 - 1.0 / 6.0);
        let a4 = (1.0 - lambda2) * (t2 / 2.0 - 1.0 / 6.0);
        if (a1 - a3).abs() > COEFF_TOL {
            return Err(Error::config(format!("inadmissible coefficients: a1 = {a1} but a3 = {a3}")));
        }
        if a2 < -COEFF_TOL || a4 < -COEFF_TOL {
            return Err(Error::config(format!("inadmissible coefficients: a2 = {a2}, a4 = {a4}")));
        }
        Ok(ModelCoefficients { theta, lambda1, lambda2, epsilon, a1, a2: a2.max(0.0), a3, a4: a4.max(0.0) })
    }

    /// theta = sqrt(2/3), lambda1 = lambda2 = 1/2: all four coefficients equal 1/12.
    pub fn equal_twelfths(epsilon: f64) -> Result<Self> {
        ModelCoefficients::new((2.0f64 / 3.0).sqrt(), 0.5, 0.5, epsilon)
    }

    /// theta = sqrt(2/3), lambda1 = lambda2 = 1: a1 = 1/6, a2 = a4 = 0.
    pub fn pure_dispersive(epsilon: f64) -> Result<Self> {
        ModelCoefficients::new((2.0f64 / 3.0).sqrt(), 1.0, 1.0, epsilon)
    }
}

/// KdV solitary wave `alpha / cosh^2(k (x - c t + shift))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonSpec {
    alpha: f64,
    shift: f64,
    epsilon: f64,
}

impl SolitonSpec {
    pub fn new(alpha: f64, shift: f64, epsilon: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::config(format!("soliton amplitude must be > 0, got {alpha}")));
        }
        if !shift.is_finite() {
            return Err(Error::config("soliton shift must be finite"));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::config(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(SolitonSpec { alpha, shift, epsilon })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn speed(&self) -> f64 {
        1.0 + self.epsilon * self.alpha / 4.0
    }

    pub fn width(&self) -> f64 {
        (3.0 * self.alpha / 8.0).sqrt()
    }

    /// Crest position at time `t` on the real line.
    pub fn crest(&self, t: f64) -> f64 {
        self.speed() * t - self.shift
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let c = (self.width() * (x - self.speed() * t + self.shift)).cosh();
        self.alpha / (c * c)
    }

    /// Samples the soliton on `grid`, using the periodic image nearest to the crest.
    pub fn field(&self, grid: &Grid1D, t: f64) -> Field {
        let length = grid.length();
        let crest = self.crest(t);
        let values = (0..grid.num_points())
            .map(|i| {
                let d = (grid.x(i) - crest).rem_euclid(length);
                let d = if d >= length / 2.0 { d - length } else { d };
                let c = (self.width() * d).cosh();
                self.alpha / (c * c)
            })
            .collect();
        Field { values, grid: *grid }
    }
}

/// Discrete inner product `dx * sum(a_i b_i)`.
pub fn inner(a: &Field, b: &Field) -> Result<f64> {
    a.grid.check_same(&b.grid)?;
    Ok(a.grid.dx() * a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum::<f64>())
}

pub fn discrete_l2(f: &Field) -> f64 {
    (f.grid.dx() * f.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// Squared gradient energy `-<D2 f, f> = dx * sum((f_{i+1} - f_i) / dx)^2`.
pub fn gradient_energy(f: &Field) -> f64 {
    let n = f.len();
    let dx = f.grid.dx();
    (0..n)
        .map(|i| {
            let d = (f.values[(i + 1) % n] - f.values[i]) / dx;
            d * d
        })
        .sum::<f64>()
        * dx
}

/// `sqrt(|v|^2 + |eta|^2 + eps a2 |dv|^2 + eps a4 |d eta|^2)`, with the gradient
/// terms measured by the quadratic form of the centered second difference.
pub fn discrete_h1_eps(v: &Field, eta: &Field, coeffs: &ModelCoefficients) -> Result<f64> {
    v.grid.check_same(&eta.grid)?;
    let l2 = discrete_l2(v).powi(2) + discrete_l2(eta).powi(2);
    let grad = coeffs.epsilon * (coeffs.a2 * gradient_energy(v) + coeffs.a4 * gradient_energy(eta));
    Ok((l2 + grad).sqrt())
}

pub const MAX_SOBOLEV_ORDER: usize = 5;

/// `sqrt(sum_{m <= s} |D1^m f|^2)` with the centered first difference.
pub fn discrete_sobolev(f: &Field, s: usize) -> Result<f64> {
    if s > MAX_SOBOLEV_ORDER {
        return Err(Error::config(format!("Sobolev order {s} exceeds {MAX_SOBOLEV_ORDER}")));
    }
    let d1 = crate::findiff::make_d1(f.grid());
    let mut current = f.clone();
    let mut total = discrete_l2(&current).powi(2);
    for _ in 0..s {
        current = d1.apply(&current)?;
        total += discrete_l2(&current).powi(2);
    }
    Ok(total.sqrt())
}
