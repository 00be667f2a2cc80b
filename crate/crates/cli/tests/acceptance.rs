//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any fails.
//!
//! Run with `cargo test -p kanto-cli --test acceptance`.

use std::process::Command;

use kanto_core::analysis::{
    convergence_study, direct_error_bound, gbs_differential_bound, gbs_modulus_bound,
    inverse_result_probe, kfunctional_constants, polynomial_reproduction_check,
    remainder_bound, sup_error, FunctionProfile, Operator, ReproductionMode,
};
use kanto_core::functions::DEFAULT_BOX;
use kanto_core::kernel2d::partition_of_unity_check;
use kanto_core::operators::{
    apply_gbs, apply_gw, apply_sw, kantorovich_local, representation_residual,
};
use kanto_core::quadrature::GaussLegendre;
use kanto_core::{fn_lookup, EvalGrid, GridField, MomentTable, Rect, SourceField, TensorKernel2D};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const RATES: [f64; 4] = [5.0, 10.0, 20.0, 40.0];
const QUAD: usize = 5;
const GRID_N: usize = 20;

fn chi3() -> TensorKernel2D {
    TensorKernel2D::default_order3()
}

fn moments() -> MomentTable {
    MomentTable::compute(&chi3(), 4, 64).expect("moment table")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn kernel_validity() -> Outcome {
    let k = chi3();
    let pou = partition_of_unity_check(&k, 64).map_err(|e| e.to_string())?;
    ensure(pou <= 1e-10, || format!("partition of unity deviation {pou:e}"))?;
    let t = MomentTable::compute(&k, 2, 64).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (&(p1, p2), e) in t.entries() {
        if p1 + p2 == 0 {
            continue;
        }
        worst = worst.max(e.algebraic_spread).max(e.algebraic_mean.abs());
    }
    ensure(worst <= 1e-9, || format!("order 1-2 moment spread/mean {worst:e}"))?;
    Ok(format!("pou {pou:.2e}, moments {worst:.2e}"))
}

fn polynomial_reproduction() -> Outcome {
    let err = polynomial_reproduction_check(
        &chi3(),
        3,
        10.0,
        &Rect::square(0.0, 1.0),
        GRID_N,
        ReproductionMode::Gw,
        QUAD,
    )
    .map_err(|e| e.to_string())?;
    ensure(err <= 1e-9, || format!("max |G_w p - p| = {err:e}"))?;
    Ok(format!("max error {err:.2e}"))
}

fn exact_kantorovich_shift() -> Outcome {
    let f = fn_lookup("x_plus_y").unwrap();
    let t = convergence_study(f, &chi3(), Operator::Sw, &RATES, &DEFAULT_BOX, GRID_N, QUAD)
        .map_err(|e| e.to_string())?;
    for &(w, e) in &t.rows {
        ensure((e - 1.0 / w).abs() <= 1e-9, || format!("w={w}: error {e} vs {}", 1.0 / w))?;
    }
    let s = t.fitted_slope;
    ensure((s + 1.0).abs() <= 1e-3, || format!("slope {s}"))?;
    Ok(format!("slope {s:.6}"))
}

fn representation_formula() -> Outcome {
    let m00 = moments().absolute(0, 0).map_err(|e| e.to_string())?;
    // closed-form second-order sups: max(|f_xx|, |f_xy|, |f_yy|)
    let cases = [("x2", 2.0), ("xy", 1.0), ("sin_x_cos_y", 1.0)];
    let mut worst_ratio: f64 = 0.0;
    for (name, m) in cases {
        let f = fn_lookup(name).unwrap();
        let profile = FunctionProfile::from_norms(
            DEFAULT_BOX,
            [((2, 0), m), ((1, 1), m), ((0, 2), m)],
        )
        .map_err(|e| e.to_string())?;
        for w in [5.0, 10.0, 20.0] {
            let grid = EvalGrid::on_rect(&DEFAULT_BOX, GRID_N, w).map_err(|e| e.to_string())?;
            let r = representation_residual(f, &chi3(), &grid, QUAD).map_err(|e| e.to_string())?;
            let measured = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let bound = remainder_bound(&profile, &moments(), w).map_err(|e| e.to_string())?;
            let expected = 7.0 * m / (12.0 * w * w) * m00;
            ensure((bound - expected).abs() <= 1e-12 * expected, || {
                format!("bound {bound} vs closed form {expected}")
            })?;
            ensure(measured <= bound, || format!("{name} w={w}: {measured:e} > {bound:e}"))?;
            worst_ratio = worst_ratio.max(measured / bound);
        }
    }
    Ok(format!("max measured/bound {worst_ratio:.2e}"))
}

fn direct_order() -> Outcome {
    let f = fn_lookup("sin_x_cos_y").unwrap();
    let t = convergence_study(f, &chi3(), Operator::Gw, &RATES, &DEFAULT_BOX, GRID_N, QUAD)
        .map_err(|e| e.to_string())?;
    let s = t.fitted_slope;
    ensure((-3.5..=-2.5).contains(&s), || format!("slope {s}"))?;
    let m = moments();
    let r = m.moment_order() as usize;
    ensure(r == 3, || format!("moment order {r}"))?;
    let c = m.moment_constant(3).map_err(|e| e.to_string())?;
    // every partial of sin x cos y has sup norm 1 on a box this size
    let norms = (1..=3).flat_map(|t| (0..=t).map(move |i| ((i, t - i), 1.0)));
    let profile = FunctionProfile::from_norms(DEFAULT_BOX, norms).map_err(|e| e.to_string())?;
    for &(w, e) in &t.rows {
        let b = direct_error_bound(&profile, &m, r, c, w).map_err(|e| e.to_string())?;
        ensure(e <= b, || format!("w={w}: error {e:e} > bound {b:e}"))?;
    }
    Ok(format!("slope {s:.4}"))
}

fn inverse_probe() -> Outcome {
    let p = inverse_result_probe(f64::sin, &chi3(), &RATES, &DEFAULT_BOX, GRID_N, QUAD)
        .map_err(|e| e.to_string())?;
    let s = p.table.fitted_slope;
    ensure(s <= -1.7, || format!("slope {s}"))?;
    ensure(p.strictly_decreasing, || format!("w*error not decreasing: {:?}", p.scaled_errors))?;
    let f = fn_lookup("x_plus_y").unwrap();
    let t = convergence_study(f, &chi3(), Operator::Sw, &RATES, &DEFAULT_BOX, GRID_N, QUAD)
        .map_err(|e| e.to_string())?;
    for we in t.scaled_errors() {
        ensure((we - 1.0).abs() <= 1e-6, || format!("x+y: w*error {we}"))?;
    }
    Ok(format!("slope {s:.4}"))
}

fn gbs_exactness() -> Outcome {
    let f = fn_lookup("sin_x_plus_cos_y").unwrap();
    let grid = EvalGrid::on_rect(&DEFAULT_BOX, GRID_N, 10.0).map_err(|e| e.to_string())?;
    let k = apply_gbs(f, &chi3(), &grid, QUAD).map_err(|e| e.to_string())?;
    let exact: Vec<f64> = grid.points.iter().map(|&(x, y)| f.eval(x, y)).collect();
    let e = sup_error(&k, &exact);
    ensure(e <= 1e-10, || format!("sup error {e:e}"))?;
    Ok(format!("sup error {e:.2e}"))
}

fn gbs_measured(w: f64) -> Result<f64, String> {
    let f = fn_lookup("xy").unwrap();
    let grid = EvalGrid::on_rect(&DEFAULT_BOX, GRID_N, w).map_err(|e| e.to_string())?;
    let k = apply_gbs(f, &chi3(), &grid, QUAD).map_err(|e| e.to_string())?;
    let exact: Vec<f64> = grid.points.iter().map(|&(x, y)| x * y).collect();
    Ok(sup_error(&k, &exact))
}

fn gbs_modulus() -> Outcome {
    let m = moments();
    let mut worst: f64 = 0.0;
    for w in [5.0, 10.0, 20.0] {
        let d = 1.0 / w;
        // omega_B(uv; d1, d2) = d1 d2 exactly
        let b = gbs_modulus_bound(&m, w, d, d, d * d).map_err(|e| e.to_string())?;
        let e = gbs_measured(w)?;
        ensure(e <= b, || format!("w={w}: {e:e} > {b:e}"))?;
        worst = worst.max(e / b);
    }
    Ok(format!("max measured/bound {worst:.2e}"))
}

fn gbs_differential() -> Outcome {
    let m = moments();
    let mut worst: f64 = 0.0;
    for w in [5.0, 10.0, 20.0] {
        let d = 1.0 / w;
        // D_B(uv) = 1 and its modulus vanishes, leaving 3D
        let b = gbs_differential_bound(&m, w, d, d, 1.0, 0.0).map_err(|e| e.to_string())?;
        let e = gbs_measured(w)?;
        ensure(e <= b, || format!("w={w}: {e:e} > {b:e}"))?;
        worst = worst.max(e / b);
    }
    Ok(format!("max measured/bound {worst:.2e}"))
}

fn kfunctional_constants_check() -> Outcome {
    let m = moments();
    let k = chi3();
    let w = 10.0;
    let c = kfunctional_constants(&m, w).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let p = (-0.6 + 0.29 * i as f64, 1.7 - 0.23 * i as f64);
        let h = kantorovich_local(&k, w, p, QUAD, |x, _, u, _| (u - x).powi(2)).map_err(|e| e.to_string())?;
        let j = kantorovich_local(&k, w, p, QUAD, |_, y, _, v| (v - y).powi(2)).map_err(|e| e.to_string())?;
        let l = kantorovich_local(&k, w, p, QUAD, |x, y, u, v| (u - x).powi(2) * (v - y).powi(2))
            .map_err(|e| e.to_string())?;
        worst = worst.max((h - c.h).abs()).max((j - c.j).abs()).max((l - c.l).abs());
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    let c20 = kfunctional_constants(&m, 20.0).map_err(|e| e.to_string())?;
    let (rh, rl) = (c.h / c20.h, c.l / c20.l);
    ensure((rh - 4.0).abs() <= 4e-12, || format!("H ratio {rh}"))?;
    ensure((rl - 16.0).abs() <= 16e-12, || format!("L ratio {rl}"))?;
    Ok(format!("max deviation {worst:.2e}"))
}

fn oracle_equivalence() -> Outcome {
    let k = chi3();
    let w = 10.0;
    let point = (0.49, 0.53);
    let bounds = (0, 4, 0, 4);
    let f = |x: f64, y: f64| (3.0 * x).sin() * (1.0 + y * y) - x * y;

    // independent dense double sums over the whole 5x5 patch
    let rule = GaussLegendre::new(QUAD);
    let h = 1.0 / w;
    let oracle_avg = |kk: i64, jj: i64| {
        let (a, b) = (kk as f64 / w, jj as f64 / w);
        let mut total = 0.0;
        for (&s, &ws) in rule.nodes().iter().zip(rule.weights()) {
            let mut inner = 0.0;
            for (&t, &wt) in rule.nodes().iter().zip(rule.weights()) {
                inner += wt * f(a + h * s, b + h * t);
            }
            total += ws * inner;
        }
        total
    };
    let (mut dense_g, mut dense_s) = (0.0, 0.0);
    for kk in bounds.0..=bounds.1 {
        for jj in bounds.2..=bounds.3 {
            let cx = k.kx().eval(w * point.0 - kk as f64);
            let cy = k.ky().eval(w * point.1 - jj as f64);
            dense_g += cx * cy * f(kk as f64 / w, jj as f64 / w);
            dense_s += cx * cy * oracle_avg(kk, jj);
        }
    }

    let grid = EvalGrid::new(vec![point], w).map_err(|e| e.to_string())?;
    let samples = GridField::samples_of(f, w, bounds).map_err(|e| e.to_string())?;
    let averages = GridField::cell_averages_of(f, w, bounds, QUAD).map_err(|e| e.to_string())?;
    let g = apply_gw(SourceField::Grid(&samples), &k, &grid).map_err(|e| e.to_string())?[0];
    let s = apply_sw(SourceField::Grid(&averages), &k, &grid, QUAD).map_err(|e| e.to_string())?[0];
    let g_fn = kanto_core::operators::apply_gw_fn(f, &k, &grid).map_err(|e| e.to_string())?[0];
    let s_fn = kanto_core::operators::apply_sw_fn(f, &k, &grid, QUAD).map_err(|e| e.to_string())?[0];
    for (name, got, want) in [
        ("G_w grid", g, dense_g),
        ("S_w grid", s, dense_s),
        ("G_w analytic", g_fn, dense_g),
        ("S_w analytic", s_fn, dense_s),
    ] {
        ensure(got.to_bits() == want.to_bits(), || format!("{name}: {got:e} vs oracle {want:e}"))?;
    }
    Ok(format!("G_w {dense_g:.6}, S_w {dense_s:.6}"))
}

fn run_reconstruct(threads: &str, extra: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kanto"))
        .arg("reconstruct")
        .args(extra)
        .env("KANTO_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let mut bytes = 0;
    for args in [
        &["--fn", "sin_x_cos_y", "--op", "sw", "--w", "10"][..],
        &["--fn", "gauss", "--op", "gbs", "--w", "7.5", "--grid-n", "33"][..],
        &["--fn", "x2y2", "--op", "gw", "--w", "20", "--quad-order", "3"][..],
    ] {
        let one = run_reconstruct("1", args)?;
        let eight = run_reconstruct("8", args)?;
        ensure(!one.is_empty(), || "empty output".into())?;
        ensure(one == eight, || format!("outputs differ for {args:?}"))?;
        bytes += one.len();
    }
    Ok(format!("{bytes} bytes identical"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("kernel validity", kernel_validity),
        ("polynomial reproduction", polynomial_reproduction),
        ("exact Kantorovich shift", exact_kantorovich_shift),
        ("representation formula remainder", representation_formula),
        ("direct order and bound", direct_order),
        ("inverse-result probe", inverse_probe),
        ("GBS exactness on additive f", gbs_exactness),
        ("GBS modulus bound", gbs_modulus),
        ("GBS differential bound", gbs_differential),
        ("K-functional constants", kfunctional_constants_check),
        ("oracle equivalence", oracle_equivalence),
        ("determinism across thread counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
