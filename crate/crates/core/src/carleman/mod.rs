//! Both sides of the weighted observability estimates, the axial cutoff
//! construction, and the auxiliary integral identities.

pub mod cutoff;
pub mod lemmas;
pub mod sides;
pub mod sweep;

pub use cutoff::{apply_cutoff, commutator_kv, CutoffChi};
pub use lemmas::{
    j_direct, lemma1_identity, lemma2_bound, obs_functional, slice_at_zero,
    weighted_dq_norm_sq, LemmaOneReport, LemmaTwoReport, ObsFunctional,
};
pub use sides::{
    carleman_sides_bounded, carleman_sides_cylinder, carleman_sides_transverse,
    default_gamma_tilde, extract_obox, lhs_terms, CarlemanReport, GradientMode,
    TransverseField,
};
pub use sweep::{
    bounded_family, c_fit, cylinder_family, log_spaced, run_sweep, SweepOutcome, SweepRow,
    TestField, Variant,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{
        make_grid, AxialExtent, ComplexField, GridConfig, Side, SpaceTimeGrid, Subboundary,
        TimeAxis,
    };
    use crate::scalar::Cplx;
    use crate::weights::build_weights;
    use std::sync::Arc;

    fn sym_grid(nt: usize, nx: usize, na: usize, x: f64) -> Arc<SpaceTimeGrid<f64>> {
        Arc::new(
            make_grid(&GridConfig {
                omega: (0.0, 1.0),
                axial_halfwidth: x,
                time_halfwidth: 1.0,
                support_halfwidth: x * 0.5,
                n_xprime: nx,
                n_axial: na,
                n_time: nt,
                time_axis: TimeAxis::Symmetric,
            })
            .unwrap(),
        )
    }

    fn gamma_hi() -> Subboundary<f64> {
        Subboundary::new(vec![Side::Hi], AxialExtent::Full).unwrap()
    }

    #[test]
    fn zero_field_zero_terms() {
        let g = sym_grid(8, 9, 17, 2.0);
        let w = build_weights(-0.5, 2.0, 0.1, 1.0, &g).unwrap();
        let f = ComplexField::zeros(g, crate::domain::Region::Volume);
        let rep = carleman_sides_cylinder(&f, None, &w, 5.0, &gamma_hi()).unwrap();
        assert_eq!(rep.lhs_total(), 0.0);
        assert_eq!(rep.rhs_total(), 0.0);
        assert!(rep.degenerate);
        assert!(rep.ratio().is_none());
    }

    #[test]
    fn quadratic_homogeneity() {
        let g = sym_grid(8, 9, 17, 2.0);
        let w = build_weights(-0.5, 2.0, 0.1, 1.0, &g).unwrap();
        let fam = cylinder_family(&g, 1);
        let f = &fam[0].field;
        let doubled = ComplexField::new(
            g.clone(),
            crate::domain::Region::Volume,
            f.values().mapv(|z| z * 2.0),
        )
        .unwrap();
        let r1 = carleman_sides_cylinder(f, None, &w, 5.0, &gamma_hi()).unwrap();
        let r2 = carleman_sides_cylinder(&doubled, None, &w, 5.0, &gamma_hi()).unwrap();
        for (a, b) in [
            (r1.lhs_grad, r2.lhs_grad),
            (r1.lhs_s3, r2.lhs_s3),
            (r1.lhs_m1, r2.lhs_m1),
            (r1.lhs_m2, r2.lhs_m2),
            (r1.rhs_boundary, r2.rhs_boundary),
            (r1.rhs_source, r2.rhs_source),
        ] {
            if a > 0.0 {
                assert!((b / a - 4.0).abs() < 1e-10, "{a} {b}");
            }
        }
    }

    #[test]
    fn nonvanishing_lateral_field_rejected() {
        let g = sym_grid(8, 9, 17, 2.0);
        let w = build_weights(-0.5, 2.0, 0.1, 1.0, &g).unwrap();
        let f = ComplexField::from_fn(g, |_, _, _| Cplx::new(1.0, 0.0));
        assert!(carleman_sides_cylinder(&f, None, &w, 5.0, &gamma_hi()).is_err());
        assert!(carleman_sides_bounded(&f, None, &w, 5.0, &gamma_hi()).is_err());
    }

    #[test]
    fn separability_oracle_xn_independent() {
        // An x_n-independent field: every cylinder term equals the
        // transverse term times the axial measure 2X.
        let g = sym_grid(16, 17, 33, 2.0);
        let w = build_weights(-0.5, 2.0, 0.1, 1.0, &g).unwrap();
        let psi = |t: f64, xp: f64| {
            Cplx::new(0.0, -9.87 * t).exp() * (std::f64::consts::PI * xp).sin()
        };
        let f3 = ComplexField::from_fn(g.clone(), |t, xp, _| psi(t, xp));
        let plane = TransverseField::from_fn(g.clone(), psi);
        let s = 7.0;
        let cyl = carleman_sides_cylinder(&f3, None, &w, s, &gamma_hi()).unwrap();
        let tr = carleman_sides_transverse(&plane, &w, s, &gamma_hi()).unwrap();
        let ax = 2.0 * g.axial_halfwidth;
        for (a, b, name) in [
            (cyl.lhs_grad, tr.lhs_grad * ax, "grad"),
            (cyl.lhs_s3, tr.lhs_s3 * ax, "s3"),
            (cyl.lhs_m1, tr.lhs_m1 * ax, "m1"),
            (cyl.lhs_m2, tr.lhs_m2 * ax, "m2"),
            (cyl.rhs_boundary, tr.rhs_boundary * ax, "boundary"),
            (cyl.rhs_source, tr.rhs_source * ax, "source"),
        ] {
            assert!(
                (a - b).abs() <= 1e-10 * b.abs().max(1e-300),
                "{name}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn obox_extraction_preserves_nodes() {
        let g = sym_grid(6, 7, 33, 4.0);
        let f = ComplexField::from_fn(g.clone(), |t, xp, xn| Cplx::new(t + xp, xn));
        let sub = extract_obox(&f, 2.0, 1.5).unwrap();
        let sg = sub.grid();
        assert!(sg.axial_halfwidth <= 2.0 + g.h_axial() * 0.5);
        assert_eq!(sg.h_axial(), g.h_axial());
        for j in 0..sg.n_axial {
            assert!((sub.values()[(3, 2, j)].im - sg.axial(j)).abs() < 1e-14);
        }
    }

    #[test]
    fn lemma1_gap_converges_second_order() {
        let gaps: Vec<f64> = [(16usize, 9usize, 17usize), (32, 17, 33), (64, 33, 65)]
            .iter()
            .map(|&(nt, nx, na)| {
                let g = sym_grid(nt, nx, na, 2.0);
                let w = build_weights(-0.5, 2.0, 0.1, 1.0, &g).unwrap();
                let fam = bounded_family(&g, 1);
                lemma1_identity(&fam[0].field, &w, 8.0)
                    .unwrap()
                    .relative_gap
            })
            .collect();
        let p1 = (gaps[0] / gaps[1]).log2();
        let p2 = (gaps[1] / gaps[2]).log2();
        assert!(
            (1.5..2.6).contains(&p1) && (1.5..2.6).contains(&p2),
            "orders {p1} {p2} ({gaps:?})"
        );
    }

    #[test]
    fn lemma1_scaling_and_zero() {
        let g = sym_grid(16, 17, 33, 2.0);
        let w = build_weights(-0.5, 2.0, 0.1, 1.0, &g).unwrap();
        let zero = ComplexField::zeros(g.clone(), crate::domain::Region::Volume);
        let rep = lemma1_identity(&zero, &w, 8.0).unwrap();
        assert_eq!(rep.j_direct, 0.0);
        assert_eq!(rep.j_via_m1, 0.0);
        let fam = bounded_family(&g, 1);
        let f = &fam[0].field;
        let doubled = ComplexField::new(
            g.clone(),
            crate::domain::Region::Volume,
            f.values().mapv(|z| z * 2.0),
        )
        .unwrap();
        let r1 = lemma1_identity(f, &w, 8.0).unwrap();
        let r2 = lemma1_identity(&doubled, &w, 8.0).unwrap();
        assert!((r2.j_direct / r1.j_direct - 4.0).abs() < 1e-9);
        assert!((r2.j_via_m1 / r1.j_via_m1 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn lemma2_bound_holds_with_slack() {
        let g = sym_grid(32, 17, 33, 2.0);
        let w = build_weights(-0.5, 2.0, 0.1, 1.0, &g).unwrap();
        let fam = bounded_family(&g, 2);
        for s in [5.0, 10.0, 20.0] {
            for tf in &fam {
                let rep = lemma2_bound(&tf.field, &w, s, 0.05).unwrap();
                assert!(rep.holds, "s={s} {}: J={} bound={}", tf.name, rep.j, rep.bound);
            }
        }
    }

    #[test]
    fn sweep_produces_finite_ratios() {
        let g = sym_grid(16, 17, 33, 2.0);
        let w = build_weights(-0.5, 2.0, 0.1, 1.0, &g).unwrap();
        let fam = cylinder_family(&g, 3);
        let svals = log_spaced(2.0, 40.0, 5);
        let rows = run_sweep(&fam, &w, &svals, &gamma_hi(), Variant::Cylinder).unwrap();
        assert_eq!(rows.len(), 5);
        for r in &rows {
            let ratio = r.ratio.expect("finite ratio");
            assert!(ratio.is_finite() && ratio > 0.0, "s={} ratio={ratio}", r.s);
        }
        let c = c_fit(&rows).unwrap();
        assert!(c.is_finite() && c > 0.0);
    }
}
