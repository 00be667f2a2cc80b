use kanto_core::analysis::{
    audit, convergence_study, direct_error_bound, gbs_differential_bound, gbs_modulus_bound,
    remainder_bound, sup_error, AuditConfig, FunctionProfile, Operator, SUP_NORM_GRID,
};
use kanto_core::io::{read_grid_csv, write_grid_csv};
use kanto_core::kernel2d::algebraic_moment;
use kanto_core::operators::{apply_gbs, apply_gw, apply_sw, representation_residual};
use kanto_core::{fn_lookup, EvalGrid, GridField, Kernel1D, MomentTable, Rect, SourceField, TensorKernel2D};
use proptest::prelude::*;

const RATES: [f64; 3] = [5.0, 10.0, 20.0];

fn chi3() -> TensorKernel2D {
    TensorKernel2D::default_order3()
}

#[test]
fn bounds_dominate_on_catalog() {
    let kernel = chi3();
    let moments = MomentTable::compute(&kernel, 4, 64).unwrap();
    let r = moments.moment_order() as usize;
    let c = moments.moment_constant(r as u32).unwrap();
    for name in ["x2", "xy", "x2y2", "sin_x_cos_y", "sin_x_sin_y", "gauss"] {
        let f = fn_lookup(name).unwrap();
        let rect = f.default_box();
        for w in RATES {
            let grid = EvalGrid::on_rect(&rect, 20, w).unwrap();
            let exact: Vec<f64> = grid.points.iter().map(|&(x, y)| f.eval(x, y)).collect();
            let outer = rect.expand((kernel.reach() + 1.0) / w);
            let profile = FunctionProfile::estimate(f, &outer, 3, SUP_NORM_GRID).unwrap();

            // the bound is exactly 0 for polynomials the operator reproduces,
            // where only rounding remains
            let rounding = 1e-12;
            let g = apply_gw(SourceField::Analytic(f), &kernel, &grid).unwrap();
            let direct = direct_error_bound(&profile, &moments, r, c, w).unwrap();
            let err = sup_error(&g, &exact);
            assert!(err <= direct + rounding, "{name} w={w}: {err} > {direct}");

            let res = representation_residual(f, &kernel, &grid, 5).unwrap();
            let rem = remainder_bound(&profile, &moments, w).unwrap();
            assert!(res.iter().all(|v| v.abs() <= rem + rounding), "{name} w={w}");
        }
    }
}

#[test]
fn gbs_bounds_dominate_for_product() {
    let kernel = chi3();
    let moments = MomentTable::compute(&kernel, 4, 64).unwrap();
    let f = fn_lookup("xy").unwrap();
    for w in RATES {
        let d = 1.0 / w;
        let grid = EvalGrid::on_rect(&f.default_box(), 20, w).unwrap();
        let k = apply_gbs(f, &kernel, &grid, 5).unwrap();
        let exact: Vec<f64> = grid.points.iter().map(|&(x, y)| x * y).collect();
        let err = sup_error(&k, &exact);
        assert!(err <= gbs_modulus_bound(&moments, w, d, d, d * d).unwrap());
        assert!(err <= gbs_differential_bound(&moments, w, d, d, 1.0, 0.0).unwrap());
        // K_w(uv) - xy = -S_w(u - x) S_w(v - y) = -1/(4 w^2)
        assert!((err - 0.25 / (w * w)).abs() <= 1e-10, "{err}");
    }
}

#[test]
fn audit_report_is_consistent() {
    let cfg = AuditConfig {
        w: 10.0,
        rect: Rect::square(-1.0, 2.0),
        grid_n: 8,
        quad_order: 5,
        moment_grid: 32,
    };
    let report = audit(fn_lookup("sin_x_cos_y").unwrap(), &chi3(), &cfg).unwrap();
    let get = |k: &str| report.get(k).unwrap();
    assert!(get("measured_gw_error") <= get("direct_bound"));
    assert!(get("measured_residual") <= get("remainder_bound"));
    assert!(get("measured_gbs_error") <= get("gbs_modulus_bound"));
    assert!(get("measured_gbs_error") <= get("gbs_differential_bound"));
    let csv = report.to_csv().unwrap();
    assert!(csv.starts_with("name,value\nw,"));
}

#[test]
fn gw_slope_matches_moment_order() {
    for (kernel, r) in [
        (chi3(), 3.0),
        (TensorKernel2D::symmetric(Kernel1D::bspline(3).unwrap()), 2.0),
        (TensorKernel2D::symmetric(Kernel1D::bspline(2).unwrap()), 2.0),
    ] {
        let moments = MomentTable::compute(&kernel, 4, 32).unwrap();
        assert_eq!(moments.moment_order() as f64, r, "{}", kernel.describe());
        let t = convergence_study(
            fn_lookup("sin_x_cos_y").unwrap(),
            &kernel,
            Operator::Gw,
            &[5.0, 10.0, 20.0, 40.0],
            &Rect::square(-1.0, 2.0),
            20,
            5,
        )
        .unwrap();
        assert!((t.fitted_slope + r).abs() <= 0.5, "{}: {}", kernel.describe(), t.fitted_slope);
    }
}

#[test]
fn grid_file_round_trip_feeds_operators() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("avg.csv");
    let f = |x: f64, y: f64| (x - y).cos() + x;
    let field = GridField::cell_averages_of(f, 10.0, (-10, 30, -10, 30), 5).unwrap();
    write_grid_csv(&path, &field).unwrap();
    let back = read_grid_csv(&path).unwrap();
    let kernel = chi3();
    let rect = back.admissible_rect(&kernel).unwrap();
    let grid = EvalGrid::on_rect(&rect, 7, 10.0).unwrap();
    let from_file = apply_sw(SourceField::Grid(&back), &kernel, &grid, 5).unwrap();
    let direct = kanto_core::operators::apply_sw_fn(f, &kernel, &grid, 5).unwrap();
    assert_eq!(from_file, direct);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn partition_of_unity_at_random_points(u in -50.0f64..50.0, v in -50.0f64..50.0) {
        let m = algebraic_moment(&chi3(), 0, 0, u, v);
        prop_assert!((m - 1.0).abs() <= 1e-12);
    }
}
