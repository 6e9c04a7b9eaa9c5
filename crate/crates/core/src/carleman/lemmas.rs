//! The two auxiliary integral identities behind the stability chain:
//! the initial-slice energy `J` equals an imaginary pairing of `M1` with
//! the conjugated field over negative times, and is bounded by
//! `s^(-3/2) I(w)`.

use ndarray::Array2;
use serde::Serialize;

use crate::domain::{ComplexField, Region, SpaceTimeGrid, TimeAxis};
use crate::error::{Error, Result};
use crate::scalar::{exp_clamped, lit, Cplx, Scalar};
use crate::weights::{apply_m1, conjugate_by_weight, CarlemanWeights};

use super::sides::{lhs_terms, GradientMode};

/// Value of the field interpolated to `t = 0` on a staggered span: the
/// node itself when one sits at zero, otherwise the mean of the two
/// straddling nodes.
pub fn slice_at_zero<T: Scalar>(f: &ComplexField<T>) -> Result<Array2<Cplx<T>>> {
    let grid = f.grid();
    if grid.time_axis != TimeAxis::Symmetric {
        return Err(Error::Carleman("expected a symmetric span".into()));
    }
    let k = grid.time_index_nearest_zero();
    let quarter = grid.dt() * lit::<T>(0.25);
    let v = f.values();
    let mut out = Array2::zeros((grid.n_xprime, grid.n_axial));
    if grid.time(k).abs() < quarter {
        for i in 0..grid.n_xprime {
            for j in 0..grid.n_axial {
                out[(i, j)] = v[(k, i, j)];
            }
        }
    } else {
        let (ka, kb) = if grid.time(k) < T::zero() {
            (k, k + 1)
        } else {
            (k - 1, k)
        };
        let (ta, tb) = (grid.time(ka), grid.time(kb));
        let wa = tb / (tb - ta);
        let wb = -ta / (tb - ta);
        for i in 0..grid.n_xprime {
            for j in 0..grid.n_axial {
                out[(i, j)] = v[(ka, i, j)] * wa + v[(kb, i, j)] * wb;
            }
        }
    }
    Ok(out)
}

/// `J = || exp(-s eta(0,.)) w(0,.) ||^2` by spatial quadrature.
pub fn j_direct<T: Scalar>(
    field: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
) -> Result<T> {
    let grid = field.grid().clone();
    let slice = slice_at_zero(field)?;
    let mut acc = T::zero();
    for i in 0..grid.n_xprime {
        let ew = exp_clamped(-s * w.eta0(grid.xprime(i)));
        let cw = grid.xprime_weight(i) * ew * ew;
        for j in 0..grid.n_axial {
            acc += cw * grid.axial_weight(j) * slice[(i, j)].norm_sqr();
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaOneReport {
    pub j_direct: f64,
    pub j_via_m1: f64,
    pub relative_gap: f64,
}

/// Both routes to `J`. The conjugated field must have decayed at the
/// earliest node, otherwise the time telescoping misses mass.
pub fn lemma1_identity<T: Scalar>(
    field: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
) -> Result<LemmaOneReport> {
    let grid = field.grid().clone();
    if grid.time_axis != TimeAxis::Symmetric {
        return Err(Error::Carleman("expected a symmetric span".into()));
    }
    let phi = conjugate_by_weight(field, w, s)?;
    let pv = phi.values();
    let mut max_phi = T::zero();
    let mut max_first = T::zero();
    for i in 0..grid.n_xprime {
        for j in 0..grid.n_axial {
            max_first = max_first.max(pv[(0, i, j)].norm());
        }
    }
    for z in pv.iter() {
        max_phi = max_phi.max(z.norm());
    }
    if max_first > lit::<T>(1e-10) * max_phi {
        return Err(Error::Carleman(
            "conjugated field has not decayed at the earliest node (s too small for the grid)"
                .into(),
        ));
    }
    let m1 = apply_m1(&phi, w, s)?;
    let half_dt = grid.dt() * lit::<T>(0.5);
    let quarter = grid.dt() * lit::<T>(0.25);
    let mut pairing = Cplx::new(T::zero(), T::zero());
    for k in 0..grid.n_time {
        let t = grid.time(k);
        let wt = if t < -quarter {
            grid.dt()
        } else if t.abs() <= quarter {
            // Node at zero: only the negative half of its cell counts.
            half_dt
        } else {
            continue;
        };
        for i in 0..grid.n_xprime {
            let cw = wt * grid.xprime_weight(i);
            for j in 0..grid.n_axial {
                let z = m1.values()[(k, i, j)] * pv[(k, i, j)].conj();
                pairing += z * (cw * grid.axial_weight(j));
            }
        }
    }
    let jd = j_direct(field, w, s)?;
    let jv = lit::<T>(2.0) * pairing.im;
    let jd64 = jd.to_f64().unwrap_or(f64::NAN);
    let jv64 = jv.to_f64().unwrap_or(f64::NAN);
    Ok(LemmaOneReport {
        j_direct: jd64,
        j_via_m1: jv64,
        relative_gap: if jd64 > 0.0 {
            (jd64 - jv64).abs() / jd64
        } else {
            jv64.abs()
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaTwoReport {
    pub j: f64,
    pub bound: f64,
    pub i_w: f64,
    pub holds: bool,
}

/// `J <= s^(-3/2) I(w)` with the stated slack.
pub fn lemma2_bound<T: Scalar>(
    field: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
    slack: f64,
) -> Result<LemmaTwoReport> {
    let j = j_direct(field, w, s)?.to_f64().unwrap_or(f64::NAN);
    let (g, s3, m1, m2) = lhs_terms(field, w, s, GradientMode::Full)?;
    let i_w = (g + s3 + m1 + m2).to_f64().unwrap_or(f64::NAN);
    let bound = s.to_f64().unwrap().powf(-1.5) * i_w;
    Ok(LemmaTwoReport {
        j,
        bound,
        i_w,
        holds: j <= bound * (1.0 + slack),
    })
}

/// The observation functional: flat-weighted boundary term plus the two
/// band-restricted volume terms of the original field.
#[derive(Debug, Clone, Serialize)]
pub struct ObsFunctional {
    pub boundary: f64,
    pub volume_l2: f64,
    pub volume_grad: f64,
    pub total: f64,
}

pub fn obs_functional<T: Scalar>(
    obs_boundary: f64,
    v: &ComplexField<T>,
    w: &CarlemanWeights<T>,
    s: T,
    band: (T, T),
) -> Result<ObsFunctional> {
    if v.region() != Region::Volume {
        return Err(Error::Region("observation functional needs a volume field".into()));
    }
    let grid = v.grid().clone();
    let vv = v.values();
    let dxp = crate::fd::diff1(vv, ndarray::Axis(1), grid.h_xprime());
    let dxn = crate::fd::diff1(vv, ndarray::Axis(2), grid.h_axial());
    let two = lit::<T>(2.0);
    let mut vol_l2 = T::zero();
    let mut vol_grad = T::zero();
    for i in 0..grid.n_xprime {
        let e0 = exp_clamped(-two * s * w.eta0(grid.xprime(i)));
        for j in 0..grid.n_axial {
            let a = grid.axial(j).abs();
            if a < band.0 || a > band.1 {
                continue;
            }
            let cw = grid.xprime_weight(i) * grid.axial_weight(j) * e0;
            for k in 0..grid.n_time {
                let cell = cw * grid.time_weight(k);
                vol_l2 += cell * vv[(k, i, j)].norm_sqr();
                vol_grad +=
                    cell * (dxp[(k, i, j)].norm_sqr() + dxn[(k, i, j)].norm_sqr());
            }
        }
    }
    let volume_l2 = vol_l2.to_f64().unwrap_or(f64::NAN);
    let volume_grad = vol_grad.to_f64().unwrap_or(f64::NAN);
    Ok(ObsFunctional {
        boundary: obs_boundary,
        volume_l2,
        volume_grad,
        total: obs_boundary + volume_l2 + volume_grad,
    })
}

/// Weighted norm of the initial-slice potential difference,
/// `|| exp(-s eta(0,.)) dq ||^2` over the core region `|x_n| < ell`.
pub fn weighted_dq_norm_sq<T: Scalar>(
    dq: &Array2<T>,
    grid: &SpaceTimeGrid<T>,
    w: &CarlemanWeights<T>,
    s: T,
    ell: T,
) -> T {
    let two = lit::<T>(2.0);
    let mut acc = T::zero();
    for i in 0..grid.n_xprime {
        let e0 = exp_clamped(-two * s * w.eta0(grid.xprime(i)));
        for j in 0..grid.n_axial {
            if grid.axial(j).abs() >= ell {
                continue;
            }
            acc += grid.xprime_weight(i) * grid.axial_weight(j) * e0 * dq[(i, j)] * dq[(i, j)];
        }
    }
    acc
}
