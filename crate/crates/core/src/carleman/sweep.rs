//! Test-field families and the large-parameter sweep.

use std::sync::Arc;

use rayon::prelude::*;

use crate::domain::{ComplexField, SpaceTimeGrid, Subboundary};
use crate::error::Result;
use crate::scalar::{lit, Cplx, Scalar};
use crate::weights::CarlemanWeights;

use super::sides::{
    carleman_sides_bounded, carleman_sides_cylinder, CarlemanReport,
};

/// Logarithmically spaced sweep points.
pub fn log_spaced(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let (a, b) = (min.ln(), max.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// One member of a sweep family.
pub struct TestField<T> {
    pub name: String,
    pub field: ComplexField<T>,
    /// Supplied operator image; when absent the sweep applies the
    /// free-operator stencil to the field.
    pub source: Option<ComplexField<T>>,
}

/// Which estimate a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Bounded,
    Cylinder,
}

/// Eigenfunction evolutions of the box (vanishing on the whole boundary of
/// the subgrid) plus one bump-modulated field.
pub fn bounded_family<T: Scalar>(grid: &Arc<SpaceTimeGrid<T>>, count: usize) -> Vec<TestField<T>> {
    let modes = [(1usize, 1usize), (1, 2), (2, 1), (2, 3), (1, 4)];
    let (a, b) = grid.omega;
    let width = b - a;
    let half = grid.axial_halfwidth;
    modes
        .iter()
        .take(count)
        .map(|&(jm, mm)| {
            let kx = lit::<T>(jm as f64) * T::PI() / width;
            let ka = lit::<T>(mm as f64) * T::PI() / (lit::<T>(2.0) * half);
            let mu = kx * kx + ka * ka;
            let field = ComplexField::from_fn(grid.clone(), move |t, xp, xn| {
                let sx = (kx * (xp - a)).sin();
                let sa = (ka * (xn + half)).sin();
                Cplx::new(T::zero(), -mu * t).exp() * (sx * sa)
            });
            TestField {
                name: format!("box_mode_{jm}_{mm}"),
                field,
                source: None,
            }
        })
        .collect()
}

/// Cylinder test fields: transverse eigenfunctions times axial standing
/// modes (vanishing at the truncation), plus one compact axial bump.
pub fn cylinder_family<T: Scalar>(grid: &Arc<SpaceTimeGrid<T>>, count: usize) -> Vec<TestField<T>> {
    let mut fields = bounded_family(grid, count.saturating_sub(1).max(1));
    for f in &mut fields {
        f.name = f.name.replace("box", "cyl");
    }
    if count > fields.len() {
        let (a, b) = grid.omega;
        let width = b - a;
        let half = grid.axial_halfwidth;
        let kx = T::PI() / width;
        let mu = kx * kx;
        let sigma = half * lit::<T>(0.45);
        let field = ComplexField::from_fn(grid.clone(), move |t, xp, xn| {
            let u = xn / sigma;
            let bump = if u.abs() >= T::one() {
                T::zero()
            } else {
                (-T::one() / (T::one() - u * u)).exp() * lit::<T>(std::f64::consts::E)
            };
            Cplx::new(T::zero(), -mu * t).exp() * ((kx * (xp - a)).sin() * bump)
        });
        fields.push(TestField {
            name: "cyl_bump".into(),
            field,
            source: None,
        });
    }
    fields
}

/// One sweep row: the family-aggregated terms at a single `s`.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub s: f64,
    pub lhs_grad: f64,
    pub lhs_s3: f64,
    pub lhs_m1: f64,
    pub lhs_m2: f64,
    pub rhs_boundary: f64,
    pub rhs_source: f64,
    /// Family-stacked ratio; `None` marks a degenerate (skipped) row.
    pub ratio: Option<f64>,
    pub per_field_ratios: Vec<Option<f64>>,
}

/// Sweep summary: rows per `s` and the fitted constant.
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub c_fit: Option<f64>,
}

/// Runs the sweep; per-`s` terms are summed over the family (the family
/// treated as one stacked field), and `c_fit` is the maximum finite ratio.
pub fn run_sweep<T: Scalar>(
    family: &[TestField<T>],
    w: &CarlemanWeights<T>,
    s_values: &[f64],
    observed: &Subboundary<T>,
    variant: Variant,
) -> Result<Vec<SweepRow>> {
    let rows: Vec<Result<SweepRow>> = s_values
        .par_iter()
        .map(|&s| {
            let mut agg = [0.0f64; 6];
            let mut per_field = Vec::with_capacity(family.len());
            for tf in family {
                let rep: CarlemanReport = match variant {
                    Variant::Bounded => carleman_sides_bounded(
                        &tf.field,
                        tf.source.as_ref(),
                        w,
                        lit::<T>(s),
                        observed,
                    )?,
                    Variant::Cylinder => carleman_sides_cylinder(
                        &tf.field,
                        tf.source.as_ref(),
                        w,
                        lit::<T>(s),
                        observed,
                    )?,
                };
                agg[0] += rep.lhs_grad;
                agg[1] += rep.lhs_s3;
                agg[2] += rep.lhs_m1;
                agg[3] += rep.lhs_m2;
                agg[4] += rep.rhs_boundary;
                agg[5] += rep.rhs_source;
                per_field.push(rep.ratio());
            }
            let lhs = agg[0] + agg[1] + agg[2] + agg[3];
            let rhs = agg[4] + agg[5];
            let ratio = if rhs > 0.0 && rhs.is_finite() && lhs.is_finite() {
                Some(lhs / rhs)
            } else {
                None
            };
            Ok(SweepRow {
                s,
                lhs_grad: agg[0],
                lhs_s3: agg[1],
                lhs_m1: agg[2],
                lhs_m2: agg[3],
                rhs_boundary: agg[4],
                rhs_source: agg[5],
                ratio,
                per_field_ratios: per_field,
            })
        })
        .collect();
    rows.into_iter().collect()
}

/// Maximum finite stacked ratio over the sweep.
pub fn c_fit(rows: &[SweepRow]) -> Option<f64> {
    rows.iter()
        .filter_map(|r| r.ratio)
        .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
}
