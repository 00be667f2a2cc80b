//! Closed-form error-bound constants built from kernel moments.
//!
//! The GBS constants `A..G` use absolute sup-moments `M_(p1,p2)`. The
//! K-functional constants `H, J, L` use the algebraic moment values, which
//! makes them equal to `S_w((u-x)^2)`, `S_w((v-y)^2)` and
//! `S_w((u-x)^2 (v-y)^2)` for kernels whose odd first moments vanish.

use super::smoothness::mixed_modulus_estimate;
use super::{sup_error, FunctionProfile, SUP_NORM_GRID};
use crate::error::{Error, Result};
use crate::functions::{Rect, TestFunction};
use crate::io::{csv_string, fmt_f64};
use crate::kernel2d::{MomentTable, TensorKernel2D};
use crate::operators::{
    apply_gbs, apply_gw, representation_residual, EvalGrid, SourceField,
};

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn check_rate(w: f64) -> Result<()> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("w must be positive, got {w}")))
    }
}

/// `(c / r!) * (M_r(chi) / w^r) * H` with
/// `H = sum_{i=0}^{r} C(r, i) A_{r-i} B_i`.
pub fn direct_error_bound(
    profile: &FunctionProfile,
    moments: &MomentTable,
    r: usize,
    c: f64,
    w: f64,
) -> Result<f64> {
    check_rate(w)?;
    let mut h = 0.0;
    for i in 0..=r {
        h += binomial(r, i) * profile.a(r - i)? * profile.b(i)?;
    }
    let m_r = moments.max_by_order(r as u32)?;
    Ok(c.abs() / factorial(r) * m_r / w.powi(r as i32) * h)
}

/// `(7 M / (12 w^2)) * M_(0,0)(chi)`
pub fn remainder_bound(profile: &FunctionProfile, moments: &MomentTable, w: f64) -> Result<f64> {
    check_rate(w)?;
    let m = profile.second_order_max()?;
    Ok(7.0 * m / (12.0 * w * w) * moments.absolute(0, 0)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn modulus_constants(moments: &MomentTable, w: f64) -> Result<ModulusConstants> {
    check_rate(w)?;
    let m = |p, q| moments.absolute(p, q);
    let (m00, m10, m01, m11) = (m(0, 0)?, m(1, 0)?, m(0, 1)?, m(1, 1)?);
    Ok(ModulusConstants {
        a: (m00 + 2.0 * m10) / (2.0 * w),
        b: (m00 + 2.0 * m01) / (2.0 * w),
        c: (m00 + 2.0 * m10 + 2.0 * m01 + 4.0 * m11) / (4.0 * w * w),
    })
}

/// `(1 + A/d1 + B/d2 + C/(d1 d2)) * omega`, where `omega` is the mixed
/// modulus of smoothness of `f` at `(d1, d2)`.
pub fn gbs_modulus_bound(
    moments: &MomentTable,
    w: f64,
    delta1: f64,
    delta2: f64,
    omega: f64,
) -> Result<f64> {
    if !(delta1 > 0.0 && delta2 > 0.0) || !(omega >= 0.0) {
        return Err(Error::InvalidParameter(
            "deltas must be positive and omega nonnegative".into(),
        ));
    }
    let k = modulus_constants(moments, w)?;
    Ok((1.0 + k.a / delta1 + k.b / delta2 + k.c / (delta1 * delta2)) * omega)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialConstants {
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

pub fn differential_constants(moments: &MomentTable, w: f64) -> Result<DifferentialConstants> {
    check_rate(w)?;
    let m = |p, q| moments.absolute(p, q);
    let m00 = m(0, 0)?;
    let (m10, m01, m11) = (m(1, 0)?, m(0, 1)?, m(1, 1)?);
    let (m20, m02) = (m(2, 0)?, m(0, 2)?);
    let (m21, m12, m22) = (m(2, 1)?, m(1, 2)?, m(2, 2)?);
    Ok(DifferentialConstants {
        d: (m00 + 2.0 * m10 + 2.0 * m01 + 4.0 * m11) / (4.0 * w * w),
        e: (m00 + 3.0 * m20 + 3.0 * m10 + 2.0 * m01 + 6.0 * m21 + 6.0 * m11) / (6.0 * w.powi(3)),
        f: (m00 + 3.0 * m02 + 3.0 * m01 + 2.0 * m10 + 6.0 * m12 + 6.0 * m11) / (6.0 * w.powi(3)),
        g: (m00
            + 3.0 * m20
            + 3.0 * m02
            + 3.0 * m01
            + 3.0 * m10
            + 9.0 * m22
            + 9.0 * m12
            + 9.0 * m21
            + 9.0 * m11)
            / (9.0 * w.powi(4)),
    })
}

/// `D (3 ||D_B f|| + omega_db) + (E/d1 + F/d2 + G/(d1 d2)) omega_db` where
/// `omega_db` is the mixed modulus of the B-differential `D_B f`.
pub fn gbs_differential_bound(
    moments: &MomentTable,
    w: f64,
    delta1: f64,
    delta2: f64,
    db_sup: f64,
    omega_db: f64,
) -> Result<f64> {
    if !(delta1 > 0.0 && delta2 > 0.0) || !(db_sup >= 0.0) || !(omega_db >= 0.0) {
        return Err(Error::InvalidParameter(
            "deltas must be positive, sup and modulus nonnegative".into(),
        ));
    }
    let k = differential_constants(moments, w)?;
    Ok(k.d * (3.0 * db_sup + omega_db)
        + (k.e / delta1 + k.f / delta2 + k.g / (delta1 * delta2)) * omega_db)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KFunctionalConstants {
    pub h: f64,
    pub j: f64,
    pub l: f64,
}

/// Weights `H, J, L` of the mixed K-functional estimate for the GBS
/// operator, from the algebraic moment values.
pub fn kfunctional_constants(moments: &MomentTable, w: f64) -> Result<KFunctionalConstants> {
    check_rate(w)?;
    let m = |p, q| moments.algebraic(p, q);
    let m00 = m(0, 0)?;
    let (m10, m01, m11) = (m(1, 0)?, m(0, 1)?, m(1, 1)?);
    let (m20, m02) = (m(2, 0)?, m(0, 2)?);
    let (m21, m12, m22) = (m(2, 1)?, m(1, 2)?, m(2, 2)?);
    Ok(KFunctionalConstants {
        h: (m00 + 3.0 * m20 + 3.0 * m10) / (3.0 * w * w),
        j: (m00 + 3.0 * m02 + 3.0 * m01) / (3.0 * w * w),
        l: (m00
            + 3.0 * m20
            + 3.0 * m02
            + 3.0 * m01
            + 3.0 * m10
            + 9.0 * m22
            + 9.0 * m12
            + 9.0 * m21
            + 9.0 * m11)
            / (9.0 * w.powi(4)),
    })
}

/// Named bound constants and measured errors, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundReport {
    constants: Vec<(String, f64)>,
    inputs: Vec<(String, f64)>,
}

impl BoundReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &str, value: f64) {
        self.constants.push((name.to_string(), value));
    }

    pub fn push_input(&mut self, name: &str, value: f64) {
        self.inputs.push((name.to_string(), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.constants
            .iter()
            .chain(&self.inputs)
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn constants(&self) -> &[(String, f64)] {
        &self.constants
    }

    pub fn inputs(&self) -> &[(String, f64)] {
        &self.inputs
    }

    /// `name,value` rows: inputs first, then constants.
    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<Vec<String>> = self
            .inputs
            .iter()
            .chain(&self.constants)
            .map(|(n, v)| vec![n.clone(), fmt_f64(*v)])
            .collect();
        csv_string(&["name", "value"], &rows)
    }
}

/// Node count per axis giving a modulus grid step of at most `delta / 4`,
/// capped to keep the pair search affordable.
fn modulus_grid(rect: &Rect, delta: f64) -> usize {
    let side = (rect.x1 - rect.x0).max(rect.y1 - rect.y0);
    ((4.0 * side / delta).ceil() as usize + 1).clamp(16, MODULUS_GRID_CAP)
}

const MODULUS_GRID_CAP: usize = 2001;

/// Parameters of a full bound audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditConfig {
    pub w: f64,
    pub rect: Rect,
    pub grid_n: usize,
    pub quad_order: usize,
    pub moment_grid: usize,
}

/// Evaluates every bound for `f` at rate `w` together with the measured
/// quantities each one is meant to dominate. Bounds whose inputs the
/// catalog cannot supply are left out.
///
/// Sup norms are taken over the evaluation box enlarged by the kernel
/// reach, which covers every sample the operators touch. The GBS bounds use
/// `delta1 = delta2 = 1/w` and grid estimates of the mixed moduli, which
/// are lower estimates of the true sup.
pub fn audit(f: &TestFunction, kernel: &TensorKernel2D, cfg: &AuditConfig) -> Result<BoundReport> {
    let w = cfg.w;
    check_rate(w)?;
    let moments = MomentTable::compute(kernel, 4, cfg.moment_grid)?;
    let outer = cfg.rect.expand((kernel.reach() + 1.0) / w);
    let profile = FunctionProfile::estimate(f, &outer, 3, SUP_NORM_GRID)?;
    let grid = EvalGrid::on_rect(&cfg.rect, cfg.grid_n, w)?;
    let exact: Vec<f64> = grid.points.iter().map(|&(x, y)| f.eval(x, y)).collect();

    let mut report = BoundReport::new();
    report.push_input("w", w);
    let r = moments.moment_order() as usize;
    report.push_input("moment_order", r as f64);
    report.push_input("M00", moments.absolute(0, 0)?);

    if let Ok(c) = moments.moment_constant(r as u32) {
        report.push_input("c", c);
        if let Ok(b) = direct_error_bound(&profile, &moments, r, c, w) {
            report.push("direct_bound", b);
        }
    }
    let gw = apply_gw(SourceField::Analytic(f), kernel, &grid)?;
    report.push("measured_gw_error", sup_error(&gw, &exact));

    report.push("remainder_bound", remainder_bound(&profile, &moments, w)?);
    let resid = representation_residual(f, kernel, &grid, cfg.quad_order)?;
    report.push(
        "measured_residual",
        resid.iter().fold(0.0, |m, v| m.max(v.abs())),
    );

    let mc = modulus_constants(&moments, w)?;
    report.push("A", mc.a);
    report.push("B", mc.b);
    report.push("C", mc.c);
    let dc = differential_constants(&moments, w)?;
    report.push("D", dc.d);
    report.push("E", dc.e);
    report.push("F", dc.f);
    report.push("G", dc.g);
    let kc = kfunctional_constants(&moments, w)?;
    report.push("kf_H", kc.h);
    report.push("kf_J", kc.j);
    report.push("kf_L", kc.l);

    let delta = 1.0 / w;
    let n_mod = modulus_grid(&outer, delta);
    let omega = mixed_modulus_estimate(|x, y| f.eval(x, y), delta, delta, &outer, n_mod)?;
    let db = f.partial_fn(1, 1)?;
    let omega_db = mixed_modulus_estimate(&db, delta, delta, &outer, n_mod)?;
    let db_sup = profile.sup(1, 1)?;
    report.push("omega_b", omega);
    report.push("db_sup", db_sup);
    report.push("omega_db", omega_db);
    report.push("gbs_modulus_bound", gbs_modulus_bound(&moments, w, delta, delta, omega)?);
    report.push(
        "gbs_differential_bound",
        gbs_differential_bound(&moments, w, delta, delta, db_sup, omega_db)?,
    );
    let k = apply_gbs(f, kernel, &grid, cfg.quad_order)?;
    report.push("measured_gbs_error", sup_error(&k, &exact));
    Ok(report)
}
