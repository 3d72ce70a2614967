//! Reconstruction of `(v, eta)` from the two fast-time KdV solutions.
//!
//! The right-going solver field is `u(t, x) = U0(T, x - t)` and the left-going
//! one is `n(t, x) = N0(T, x + t)`. With `dx = dt`, every characteristic shift
//! `x +- t`, `x +- 2t` lands on a node, so profiles at shifted abscissae are read
//! off the snapshot at time `t` by periodic indexing. The slow time `T` is held
//! at its current value inside the corrector integrals.

use crate::error::{Error, Result};
use crate::findiff::{make_d1, make_d2};
use crate::grid::{discrete_sobolev, BathymetryProfile, Field, Grid1D, ModelCoefficients};
use crate::kdv::Direction;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproximationVariant {
    Classical,
    TopoModified,
    TopoModifiedPeriodic,
}

/// Sign convention for the bottom terms moved into the surface elevation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopoBracket {
    /// `eta` receives `eps/2 (S_U - S_N)`, as `eta = (U - N)/2` requires.
    #[default]
    Derived,
    /// `eta` receives the same bracket `eps/2 (S_U + S_N)` as `v`.
    Uniform,
}

/// Named terms of one explicit corrector at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectorBreakdown {
    pub quadratic_difference: Field,
    pub dispersive_difference: Field,
    pub cross_product: Field,
    pub bottom_jump: Field,
    pub counterprop_integral: Field,
    pub bottom_integral: Field,
    pub bottom_derivative_integral: Field,
}

impl CorrectorBreakdown {
    pub const TERM_NAMES: [&'static str; 7] = [
        "quadratic_difference",
        "dispersive_difference",
        "cross_product",
        "bottom_jump",
        "counterprop_integral",
        "bottom_integral",
        "bottom_derivative_integral",
    ];

    pub fn terms(&self) -> [&Field; 7] {
        [
            &self.quadratic_difference,
            &self.dispersive_difference,
            &self.cross_product,
            &self.bottom_jump,
            &self.counterprop_integral,
            &self.bottom_integral,
            &self.bottom_derivative_integral,
        ]
    }

    pub fn total(&self) -> Field {
        sum_fields(&self.terms())
    }

    /// The bottom terms that the modified approximation moves to leading order.
    pub fn bottom_part(&self) -> Field {
        sum_fields(&[&self.bottom_integral, &self.bottom_derivative_integral, &self.bottom_jump])
    }
}

fn sum_fields(fields: &[&Field]) -> Field {
    let grid = *fields[0].grid();
    let values = (0..grid.num_points()).map(|i| fields.iter().map(|f| f[i]).sum()).collect();
    Field::new(grid, values).expect("sum of finite fields")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceReconstruction {
    pub v: Field,
    pub eta: Field,
    pub variant: ApproximationVariant,
    pub correctors: Option<(CorrectorBreakdown, CorrectorBreakdown)>,
}

/// Number of time steps in `t`; `dt` must equal the grid spacing.
fn shift_steps(grid: &Grid1D, dt: f64, t: f64) -> Result<usize> {
    if (dt - grid.dx()).abs() > 1e-9 * grid.dx() {
        return Err(Error::config(format!("reconstruction needs dx = dt, got dx = {} and dt = {dt}", grid.dx())));
    }
    let m = t / dt;
    if t < 0.0 || (m - m.round()).abs() > 1e-9 {
        return Err(Error::config(format!("t = {t} is not a multiple of dt = {dt}")));
    }
    Ok(m.round() as usize)
}

fn snapshots<'a>(u: &'a Trajectory<Field>, n: &'a Trajectory<Field>, t: f64) -> Result<(&'a Field, &'a Field)> {
    let (us, ns) = (u.at(t)?, n.at(t)?);
    us.grid().check_same(ns.grid())?;
    Ok((us, ns))
}

pub fn classical_surfaces(u_traj: &Trajectory<Field>, n_traj: &Trajectory<Field>, t: f64) -> Result<SurfaceReconstruction> {
    let (u, n) = snapshots(u_traj, n_traj, t)?;
    Ok(SurfaceReconstruction {
        v: u.axpy(1.0, n)?.scaled(0.5),
        eta: u.axpy(-1.0, n)?.scaled(0.5),
        variant: ApproximationVariant::Classical,
        correctors: None,
    })
}

/// Composite trapezoid for `int_0^t b(x - t + s) ds` (Right) or `int_0^t b(x + t - s) ds` (Left).
pub fn bottom_shift_integral(b: &BathymetryProfile, t: f64, x: f64, direction: Direction, dt: f64) -> f64 {
    if t <= 0.0 || b.is_flat() {
        return 0.0;
    }
    let m = (t / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t / m as f64;
    let at = |s: f64| match direction {
        Direction::Right => b.value(x - t + s),
        Direction::Left => b.value(x + t - s),
    };
    let inner: f64 = (1..m).map(|j| at(j as f64 * h)).sum();
    h * (0.5 * (at(0.0) + at(t)) + inner)
}

/// Weight multiplying the counter-propagating field inside a cross integral.
#[derive(Debug, Clone, Copy)]
pub enum CrossWeight<'a> {
    One,
    BottomSlope(&'a BathymetryProfile),
}

/// Trapezoid quadrature at node `i` of
/// `int_0^t w(x - t + s) N0(T, x - t + 2s) ds` (Right, `counter = n(t, .)`) or
/// `int_0^t w(x + t - s) U0(T, x + t - 2s) ds` (Left, `counter = u(t, .)`).
pub fn characteristic_cross_integral(
    weight: CrossWeight<'_>,
    counter: &Field,
    t: f64,
    i: usize,
    direction: Direction,
    dt: f64,
) -> Result<f64> {
    let grid = counter.grid();
    let m = shift_steps(grid, dt, t)?;
    Ok(cross_at(weight, counter, m, i, direction))
}

fn cross_at(weight: CrossWeight<'_>, counter: &Field, m: usize, i: usize, direction: Direction) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let grid = counter.grid();
    let dx = grid.dx();
    let x = grid.x(i);
    let (mi, ii) = (m as isize, i as isize);
    let term = |j: isize| -> f64 {
        let (node, xw) = match direction {
            Direction::Right => (ii - 2 * mi + 2 * j, x + (j - mi) as f64 * dx),
            Direction::Left => (ii + 2 * mi - 2 * j, x + (mi - j) as f64 * dx),
        };
        let w = match weight {
            CrossWeight::One => 1.0,
            CrossWeight::BottomSlope(b) => b.derivative(xw),
        };
        w * counter[grid.wrap(node)]
    };
    let inner: f64 = (1..mi).map(term).sum();
    dx * (0.5 * (term(0) + term(mi)) + inner)
}

fn cross_field(weight: CrossWeight<'_>, counter: &Field, m: usize, direction: Direction) -> Vec<f64> {
    if let CrossWeight::BottomSlope(b) = weight {
        if b.is_flat() {
            return vec![0.0; counter.len()];
        }
    }
    (0..counter.len()).map(|i| cross_at(weight, counter, m, i, direction)).collect()
}

/// Explicit correctors `(U1, N1)` at time `t`, term by term.
pub fn corrector_fields(
    u_traj: &Trajectory<Field>,
    n_traj: &Trajectory<Field>,
    b: &BathymetryProfile,
    coeffs: &ModelCoefficients,
    t: f64,
) -> Result<(CorrectorBreakdown, CorrectorBreakdown)> {
    b.validate()?;
    let (u, n) = snapshots(u_traj, n_traj, t)?;
    let grid = *u.grid();
    let dt = u_traj.dt();
    let m = shift_steps(&grid, dt, t)? as isize;
    let d1 = make_d1(&grid);
    let d2 = make_d2(&grid);
    let (du, dn) = (d1.apply(u)?, d1.apply(n)?);
    let (d2u, d2n) = (d2.apply(u)?, d2.apply(n)?);
    let disp = (coeffs.a2 - coeffs.a4) / 4.0;
    let len = grid.num_points();
    let behind = |i: usize| grid.wrap(i as isize - 2 * m);
    let ahead = |i: usize| grid.wrap(i as isize + 2 * m);
    let bx = |i: usize| b.value(grid.x(i));
    let shift_int = |i: usize, dir| bottom_shift_integral(b, t, grid.x(i), dir, dt);

    let int_n = cross_field(CrossWeight::One, n, m as usize, Direction::Right);
    let int_bn = cross_field(CrossWeight::BottomSlope(b), n, m as usize, Direction::Right);
    let int_u = cross_field(CrossWeight::One, u, m as usize, Direction::Left);
    let int_bu = cross_field(CrossWeight::BottomSlope(b), u, m as usize, Direction::Left);

    let field = |f: &dyn Fn(usize) -> f64| Field::new(grid, (0..len).map(f).collect());
    let tt = t;
    let u1 = CorrectorBreakdown {
        quadratic_difference: field(&|i| -(n[i] * n[i] - n[behind(i)] * n[behind(i)]) / 16.0)?,
        dispersive_difference: field(&|i| disp * (d2n[i] - d2n[behind(i)]))?,
        cross_product: field(&|i| -u[i] * (n[i] - n[behind(i)]) / 8.0)?,
        bottom_jump: field(&|i| 0.25 * u[i] * (bx(i) - b.value(grid.x(i) - tt)))?,
        counterprop_integral: field(&|i| -0.25 * du[i] * int_n[i])?,
        bottom_integral: field(&|i| 0.5 * du[i] * shift_int(i, Direction::Right))?,
        bottom_derivative_integral: field(&|i| 0.25 * int_bn[i])?,
    };
    let n1 = CorrectorBreakdown {
        quadratic_difference: field(&|i| -(u[i] * u[i] - u[ahead(i)] * u[ahead(i)]) / 16.0)?,
        dispersive_difference: field(&|i| -disp * (d2u[i] - d2u[ahead(i)]))?,
        cross_product: field(&|i| -n[i] * (u[i] - u[ahead(i)]) / 8.0)?,
        bottom_jump: field(&|i| -0.25 * n[i] * (bx(i) - b.value(grid.x(i) + tt)))?,
        counterprop_integral: field(&|i| -0.25 * dn[i] * int_u[i])?,
        bottom_integral: field(&|i| -0.5 * dn[i] * shift_int(i, Direction::Left))?,
        bottom_derivative_integral: field(&|i| -0.25 * int_bu[i])?,
    };
    Ok((u1, n1))
}

/// Topographically modified surfaces; `periodic_variant` also moves the
/// counter-propagating integrals to leading order.
pub fn topo_modified_surfaces(
    u_traj: &Trajectory<Field>,
    n_traj: &Trajectory<Field>,
    b: &BathymetryProfile,
    coeffs: &ModelCoefficients,
    t: f64,
    periodic_variant: bool,
    bracket: TopoBracket,
) -> Result<SurfaceReconstruction> {
    let classical = classical_surfaces(u_traj, n_traj, t)?;
    let (u1, n1) = corrector_fields(u_traj, n_traj, b, coeffs, t)?;
    let half_eps = 0.5 * coeffs.epsilon;
    let (su, sn) = (u1.bottom_part(), n1.bottom_part());
    let mut v = classical.v.axpy(half_eps, &su)?.axpy(half_eps, &sn)?;
    let eta_sign = match bracket {
        TopoBracket::Derived => -1.0,
        TopoBracket::Uniform => 1.0,
    };
    let mut eta = classical.eta.axpy(half_eps, &su)?.axpy(eta_sign * half_eps, &sn)?;
    let variant = if periodic_variant {
        // counterprop terms already carry the -1/4 factor
        v = v.axpy(half_eps, &u1.counterprop_integral)?.axpy(half_eps, &n1.counterprop_integral)?;
        eta = eta.axpy(half_eps, &u1.counterprop_integral)?.axpy(-half_eps, &n1.counterprop_integral)?;
        ApproximationVariant::TopoModifiedPeriodic
    } else {
        ApproximationVariant::TopoModified
    };
    Ok(SurfaceReconstruction { v, eta, variant, correctors: Some((u1, n1)) })
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl LinearFit {
    pub fn fit(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Diagnostic("linear fit needs two or more paired samples".into()));
        }
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        if sxx == 0.0 {
            return Err(Error::Diagnostic("linear fit needs distinct abscissae".into()));
        }
        let slope = sxy / sxx;
        let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
        Ok(LinearFit { slope, intercept: my - slope * mx, r_squared })
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GrowthSeries {
    pub order: usize,
    pub times: Vec<f64>,
    /// `discrete_sobolev(U1, order)` per stored time.
    pub norms: Vec<f64>,
    /// Same norm of each named term of `U1`, ordered as [`CorrectorBreakdown::TERM_NAMES`].
    pub term_norms: Vec<[f64; 7]>,
    pub fit: LinearFit,
}

pub const MAX_GROWTH_ORDER: usize = 3;

pub fn growth_diagnostic(
    u_traj: &Trajectory<Field>,
    n_traj: &Trajectory<Field>,
    b: &BathymetryProfile,
    coeffs: &ModelCoefficients,
    s: usize,
) -> Result<GrowthSeries> {
    if s > MAX_GROWTH_ORDER {
        return Err(Error::config(format!("growth order {s} exceeds {MAX_GROWTH_ORDER}")));
    }
    if u_traj.len() < 4 {
        return Err(Error::Diagnostic(format!("growth fit needs at least 4 snapshots, got {}", u_traj.len())));
    }
    let times = u_traj.times();
    let mut norms = Vec::with_capacity(times.len());
    let mut term_norms = Vec::with_capacity(times.len());
    for &t in &times {
        let (u1, _) = corrector_fields(u_traj, n_traj, b, coeffs, t)?;
        norms.push(discrete_sobolev(&u1.total(), s)?);
        let mut per = [0.0; 7];
        for (k, f) in u1.terms().into_iter().enumerate() {
            per[k] = discrete_sobolev(f, s)?;
        }
        term_norms.push(per);
    }
    let fit = LinearFit::fit(&times, &norms)?;
    Ok(GrowthSeries { order: s, times, norms, term_norms, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SolitonSpec;
    use approx::assert_relative_eq;

    const DX: f64 = 0.05;

    fn grid() -> Grid1D {
        Grid1D::new(800, DX).unwrap()
    }

    fn traj_of(fields: Vec<Field>) -> Trajectory<Field> {
        let mut t = Trajectory::new(DX, 10);
        for (k, f) in fields.into_iter().enumerate() {
            t.push(10 * k, f);
        }
        t
    }

    fn soliton(x0: f64) -> Field {
        SolitonSpec::new(0.5, -x0, 0.2).unwrap().field(&grid(), 0.0)
    }

    fn step() -> BathymetryProfile {
        BathymetryProfile::Step { beta0: 0.5, center: 20.0, ramp_half_width: 1.5 }
    }

    #[test]
    fn classical_reduction_and_round_trip() {
        let u = traj_of(vec![soliton(10.0)]);
        let n = traj_of(vec![soliton(25.0).scaled(0.3)]);
        let z = u.map(|f| Field::zeros(*f.grid()));
        let s = classical_surfaces(&u, &z, 0.0).unwrap();
        assert_eq!(s.v, s.eta);
        assert!(classical_surfaces(&u, &u, 0.0).unwrap().eta.max_abs() == 0.0);
        let s = classical_surfaces(&u, &n, 0.0).unwrap();
        let back_u = s.v.axpy(1.0, &s.eta).unwrap();
        let back_n = s.v.axpy(-1.0, &s.eta).unwrap();
        for i in 0..back_u.len() {
            assert!((back_u[i] - u.at(0.0).unwrap()[i]).abs() < 1e-15);
            assert!((back_n[i] - n.at(0.0).unwrap()[i]).abs() < 1e-15);
        }
        assert!(matches!(classical_surfaces(&u, &n, 0.3), Err(Error::MissingSnapshot(_))));
    }

    #[test]
    fn shift_integral_cases() {
        assert_eq!(bottom_shift_integral(&BathymetryProfile::Flat, 3.0, 1.0, Direction::Right, DX), 0.0);
        // well past the ramp the integrand is the plateau everywhere
        let v = bottom_shift_integral(&step(), 2.0, 30.0, Direction::Right, DX);
        assert_relative_eq!(v, 0.5 * 2.0, epsilon = 1e-14);
        let (a, eps, t, x) = (0.5, 0.1, 7.3, 2.1);
        let slow = BathymetryProfile::SlowSinusoid { amplitude: a, frequency: eps };
        let exact = 2.0 * a / eps * (eps * (x - t / 2.0)).sin() * (eps * t / 2.0).sin();
        let coarse = (bottom_shift_integral(&slow, t, x, Direction::Right, 0.04) - exact).abs();
        let fine = (bottom_shift_integral(&slow, t, x, Direction::Right, 0.02) - exact).abs();
        assert!(coarse < 1e-4);
        assert!((3.0..5.0).contains(&(coarse / fine)), "{}", coarse / fine);
    }

    #[test]
    fn cross_integral_telescopes_for_constant_counter() {
        let c = Field::constant(grid(), 0.7);
        let t = 40.0 * DX;
        for i in [300, 400, 420] {
            let x = grid().x(i);
            let r = characteristic_cross_integral(CrossWeight::BottomSlope(&step()), &c, t, i, Direction::Right, DX)
                .unwrap();
            let expect = 0.7 * (step().value(x) - step().value(x - t));
            assert!((r - expect).abs() < 2e-3, "{r} vs {expect}");
            let l = characteristic_cross_integral(CrossWeight::BottomSlope(&step()), &c, t, i, Direction::Left, DX)
                .unwrap();
            assert!((l - 0.7 * (step().value(x + t) - step().value(x))).abs() < 2e-3);
        }
        let zero = Field::zeros(grid());
        assert_eq!(characteristic_cross_integral(CrossWeight::One, &zero, t, 5, Direction::Left, DX).unwrap(), 0.0);
        assert!(characteristic_cross_integral(CrossWeight::One, &zero, t, 5, Direction::Left, 0.04).is_err());
    }

    #[test]
    fn unidirectional_step_corrector_reduces() {
        let coeffs = ModelCoefficients::pure_dispersive(0.2).unwrap();
        let u = traj_of(vec![soliton(10.0), soliton(10.5), soliton(11.0)]);
        let z = u.map(|f| Field::zeros(*f.grid()));
        let t = 20.0 * DX;
        let (u1, _) = corrector_fields(&u, &z, &BathymetryProfile::Flat, &coeffs, t).unwrap();
        assert_eq!(u1.total().max_abs(), 0.0);

        let (u1, _) = corrector_fields(&u, &z, &step(), &coeffs, t).unwrap();
        let us = u.at(t).unwrap();
        let du = make_d1(&grid()).apply(us).unwrap();
        let total = u1.total();
        for i in 0..us.len() {
            let x = grid().x(i);
            let expect = 0.25 * us[i] * (step().value(x) - step().value(x - t))
                + 0.5 * du[i] * bottom_shift_integral(&step(), t, x, Direction::Right, DX);
            assert!((total[i] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn breakdown_sums_and_dispersive_term() {
        let coeffs = ModelCoefficients::equal_twelfths(0.2).unwrap();
        let u = traj_of(vec![soliton(10.0), soliton(10.5)]);
        let n = traj_of(vec![soliton(30.0).scaled(0.4), soliton(29.5).scaled(0.4)]);
        let (u1, n1) = corrector_fields(&u, &n, &step(), &coeffs, 10.0 * DX).unwrap();
        assert!(u1.dispersive_difference.max_abs() < 1e-14);
        assert!(n1.dispersive_difference.max_abs() < 1e-14);
        for c in [&u1, &n1] {
            let total = c.total();
            for i in 0..total.len() {
                let direct: f64 = c.terms().iter().map(|f| f[i]).sum();
                assert!((total[i] - direct).abs() <= 1e-12 * direct.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn topo_surfaces_match_term_oracle() {
        let eps = 0.2;
        let coeffs = ModelCoefficients::equal_twelfths(eps).unwrap();
        let u = traj_of(vec![soliton(10.0), soliton(10.5), soliton(11.0)]);
        let z = u.map(|f| Field::zeros(*f.grid()));
        let flat = topo_modified_surfaces(&u, &z, &BathymetryProfile::Flat, &coeffs, 0.5, false, TopoBracket::Derived)
            .unwrap();
        assert_eq!(flat.eta, classical_surfaces(&u, &z, 0.5).unwrap().eta);

        let t = 20.0 * DX;
        let topo = topo_modified_surfaces(&u, &z, &step(), &coeffs, t, false, TopoBracket::Derived).unwrap();
        let classical = classical_surfaces(&u, &z, t).unwrap();
        let us = u.at(t).unwrap();
        let du = make_d1(&grid()).apply(us).unwrap();
        for i in 0..us.len() {
            let x = grid().x(i);
            let expect = eps / 4.0
                * (du[i] * bottom_shift_integral(&step(), t, x, Direction::Right, DX)
                    + 0.5 * us[i] * (step().value(x) - step().value(x - t)));
            let left = characteristic_cross_integral(CrossWeight::BottomSlope(&step()), us, t, i, Direction::Left, DX)
                .unwrap();
            assert!((topo.v[i] - classical.v[i] - expect + eps / 8.0 * left).abs() < 1e-14);
            assert!((topo.eta[i] - classical.eta[i] - expect - eps / 8.0 * left).abs() < 1e-14);
        }
    }

    #[test]
    fn periodic_variant_adds_counterprop_terms() {
        let coeffs = ModelCoefficients::equal_twelfths(0.1).unwrap();
        let u = traj_of(vec![soliton(10.0), soliton(10.5)]);
        let n = traj_of(vec![soliton(30.0).scaled(0.4), soliton(29.5).scaled(0.4)]);
        let t = 10.0 * DX;
        let a = topo_modified_surfaces(&u, &n, &step(), &coeffs, t, false, TopoBracket::Uniform).unwrap();
        let p = topo_modified_surfaces(&u, &n, &step(), &coeffs, t, true, TopoBracket::Uniform).unwrap();
        assert_eq!(p.variant, ApproximationVariant::TopoModifiedPeriodic);
        let us = u.at(t).unwrap();
        let ns = n.at(t).unwrap();
        let d1 = make_d1(&grid());
        let (du, dn) = (d1.apply(us).unwrap(), d1.apply(ns).unwrap());
        for i in (0..us.len()).step_by(7) {
            let ia = characteristic_cross_integral(CrossWeight::One, ns, t, i, Direction::Right, DX).unwrap();
            let ib = characteristic_cross_integral(CrossWeight::One, us, t, i, Direction::Left, DX).unwrap();
            let (ta, tb) = (du[i] * ia, dn[i] * ib);
            assert!((p.v[i] - a.v[i] + 0.1 / 8.0 * (ta + tb)).abs() < 1e-14);
            assert!((p.eta[i] - a.eta[i] + 0.1 / 8.0 * (ta - tb)).abs() < 1e-14);
        }
    }

    #[test]
    fn growth_guards_and_linear_fit() {
        let coeffs = ModelCoefficients::pure_dispersive(0.2).unwrap();
        let u = traj_of(vec![soliton(10.0); 3]);
        let z = u.map(|f| Field::zeros(*f.grid()));
        assert!(matches!(growth_diagnostic(&u, &z, &step(), &coeffs, 2), Err(Error::Diagnostic(_))));
        let u = traj_of(vec![soliton(10.0); 5]);
        let z = u.map(|f| Field::zeros(*f.grid()));
        assert!(matches!(growth_diagnostic(&u, &z, &step(), &coeffs, 4), Err(Error::Config(_))));
        let g = growth_diagnostic(&u, &z, &BathymetryProfile::Flat, &coeffs, 2).unwrap();
        assert!(g.norms.iter().all(|&v| v == 0.0));
        assert_eq!(g.fit.slope, 0.0);

        let f = LinearFit::fit(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert_relative_eq!(f.slope, 2.0);
        assert_relative_eq!(f.intercept, 1.0);
        assert_relative_eq!(f.r_squared, 1.0);
    }
}
