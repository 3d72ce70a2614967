use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use longwave::approx::{corrector_fields, LinearFit};
use longwave::experiment::relative_linf_error;
use longwave::findiff::{make_d1, make_d2, make_d3, CyclicBandedMatrix};
use longwave::grid::{discrete_l2, discrete_sobolev, inner};
use longwave::kdv::{Direction, KdvProblem, KdvVariant};
use longwave::{BathymetryProfile, Field, Grid1D, ModelCoefficients, SolitonSpec, TimeGrid};

fn field_strategy() -> impl Strategy<Value = (Field, Field)> {
    (8usize..64, 0.01f64..1.0).prop_flat_map(|(n, dx)| {
        let v = prop::collection::vec(-10.0f64..10.0, n);
        (v.clone(), v).prop_map(move |(a, b)| {
            let g = Grid1D::new(n, dx).unwrap();
            (Field::new(g, a).unwrap(), Field::new(g, b).unwrap())
        })
    })
}

fn banded_strategy() -> impl Strategy<Value = (CyclicBandedMatrix, Vec<f64>)> {
    (1usize..4, 3usize..40).prop_flat_map(|(w, extra)| {
        let n = 2 * w + 1 + extra;
        let entries = prop::collection::vec(-1.0f64..1.0, n * (2 * w + 1));
        let rhs = prop::collection::vec(-5.0f64..5.0, n);
        (entries, rhs).prop_map(move |(e, rhs)| {
            let mut m = CyclicBandedMatrix::zeros(n, w);
            for i in 0..n {
                for (k, off) in (-(w as isize)..=w as isize).enumerate() {
                    m.add(i, off, e[i * (2 * w + 1) + k]);
                }
                m.add(i, 0, 2.0 * (2 * w + 1) as f64);
            }
            (m, rhs)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn odd_operators_are_antisymmetric((a, b) in field_strategy()) {
        let g = *a.grid();
        for op in [make_d1(&g), make_d3(&g)] {
            let lhs = inner(&op.apply(&a).unwrap(), &b).unwrap();
            let rhs = -inner(&a, &op.apply(&b).unwrap()).unwrap();
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn second_difference_is_symmetric_nonpositive((a, b) in field_strategy()) {
        let d2 = make_d2(a.grid());
        let ab = inner(&d2.apply(&a).unwrap(), &b).unwrap();
        let ba = inner(&a, &d2.apply(&b).unwrap()).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-10 * (1.0 + ab.abs()));
        prop_assert!(inner(&d2.apply(&a).unwrap(), &a).unwrap() <= 1e-9);
    }

    #[test]
    fn sobolev_norm_is_a_norm((a, b) in field_strategy(), c in -5.0f64..5.0, s in 0usize..4) {
        let na = discrete_sobolev(&a, s).unwrap();
        let nb = discrete_sobolev(&b, s).unwrap();
        let scaled = discrete_sobolev(&a.scaled(c), s).unwrap();
        prop_assert!((scaled - c.abs() * na).abs() <= 1e-10 * (1.0 + scaled));
        let sum = discrete_sobolev(&a.axpy(1.0, &b).unwrap(), s).unwrap();
        prop_assert!(sum <= (na + nb) * (1.0 + 1e-12) + 1e-12);
        prop_assert!(discrete_l2(&a) <= na * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn relative_error_is_nonnegative_and_reflexive((a, b) in field_strategy()) {
        prop_assert!(relative_linf_error(&a, &b).unwrap() >= 0.0);
        prop_assert_eq!(relative_linf_error(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn banded_solve_matches_dense_lu((m, rhs) in banded_strategy()) {
        let n = m.dim();
        let dense = m.to_dense();
        let a = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
        let expected = a.lu().solve(&DVector::from_vec(rhs.clone())).unwrap();
        let got = m.solve(&rhs).unwrap();
        for i in 0..n {
            prop_assert!((got[i] - expected[i]).abs() <= 1e-10 * (1.0 + expected[i].abs()));
        }
        let back = m.matvec(&got);
        for i in 0..n {
            prop_assert!((back[i] - rhs[i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn linear_fit_recovers_lines(slope in -10.0f64..10.0, intercept in -10.0f64..10.0) {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|x| slope * x + intercept).collect();
        let fit = LinearFit::fit(&x, &y).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!((fit.intercept - intercept).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kdv_step_conserves_l2(alpha in 0.05f64..1.0, shift in -30.0f64..-10.0, eps in 0.05f64..0.3) {
        let grid = Grid1D::new(400, 0.1).unwrap();
        let tg = TimeGrid::new(0.1, 20).unwrap();
        let u0 = SolitonSpec::new(alpha, shift, eps).unwrap().field(&grid, 0.0);
        let left = KdvVariant::VariableCoefficient { bathymetry: BathymetryProfile::Flat, direction: Direction::Left };
        for variant in [KdvVariant::Classical, left] {
            let traj = KdvProblem::new(eps, grid, tg, variant).unwrap().run(&u0, 20).unwrap();
            let drift = (discrete_l2(traj.last().unwrap().1) - discrete_l2(&u0)).abs() / discrete_l2(&u0);
            prop_assert!(drift < 1e-10);
        }
    }
}

#[test]
fn difference_operators_are_second_order() {
    let errors = |n: usize| {
        let length = 2.0 * std::f64::consts::PI;
        let g = Grid1D::new(n, length / n as f64).unwrap();
        let f = Field::from_fn(g, |x| x.sin()).unwrap();
        let exact = [|x: f64| x.cos(), |x: f64| -x.sin(), |x: f64| -x.cos()];
        let ops = [make_d1(&g), make_d2(&g), make_d3(&g)];
        let mut out = [0.0; 3];
        for k in 0..3 {
            let d = ops[k].apply(&f).unwrap();
            out[k] = (0..n).map(|i| (d[i] - exact[k](g.x(i))).abs()).fold(0.0, f64::max);
        }
        out
    };
    let (coarse, fine) = (errors(64), errors(128));
    for k in 0..3 {
        let order = (coarse[k] / fine[k]).log2();
        assert!((order - 2.0).abs() < 0.05, "operator {k}: order {order}");
    }
}

#[test]
fn corrector_breakdown_sums_to_total() {
    let eps = 0.2;
    let grid = Grid1D::new(800, 0.05).unwrap();
    let tg = TimeGrid::new(0.05, 40).unwrap();
    let u0 = SolitonSpec::new(0.5, -15.0, eps).unwrap().field(&grid, 0.0);
    let n0_mirror = SolitonSpec::new(0.3, -25.0, eps).unwrap().field(&grid, 0.0);
    let p = KdvProblem::new(eps, grid, tg, KdvVariant::Classical).unwrap();
    let u = p.run(&u0, 1).unwrap();
    let n = p.run(&n0_mirror, 1).unwrap().map(Field::mirrored);
    let b = BathymetryProfile::Step { beta0: 0.5, center: 20.0, ramp_half_width: 1.5 };
    let coeffs = ModelCoefficients::pure_dispersive(eps).unwrap();
    let (u1, n1) = corrector_fields(&u, &n, &b, &coeffs, 2.0).unwrap();
    for br in [&u1, &n1] {
        let total = br.total();
        let mut sum = Field::zeros(grid);
        for t in br.terms() {
            sum = sum.axpy(1.0, t).unwrap();
        }
        for i in 0..grid.num_points() {
            assert!((sum[i] - total[i]).abs() <= 1e-12 * (1.0 + total[i].abs()));
        }
    }
}
