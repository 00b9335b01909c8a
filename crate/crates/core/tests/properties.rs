mod common;

use common::*;
use cylscat::config::preset;
use cylscat::experiment::{counting_csv, evaluate, resonances_csv};
use cylscat::potential::{Geometry, PotentialSpec, SeparableTerm, XProfile};
use cylscat::resolvent::{EngineOptions, ResolventContext};
use cylscat::sheet::SheetLabel;
use cylscat::transverse::{ModeBasis, YProfile};
use num_complex::Complex64;

fn engine() -> EngineOptions {
    EngineOptions { nodes_per_panel: 16, max_panel_width: 0.5, depth: 1, ..EngineOptions::default() }
}

/// Complex barrier times (1 + 0.3 cos y) plus a narrower cos y bump.
fn coupled(c: Complex64) -> PotentialSpec {
    let terms = vec![
        SeparableTerm { x: XProfile::constant(-1.0, 1.0, c), y: YProfile::Constant(cx(1.0, 0.0)) },
        SeparableTerm { x: XProfile::constant(-1.0, 1.0, c), y: YProfile::Trig(YProfile::cosine(1, cx(0.3, 0.0))) },
        SeparableTerm { x: XProfile::constant(-0.5, 0.5, cx(2.0, 0.0)), y: YProfile::Trig(YProfile::cosine(1, cx(1.0, 0.0))) },
    ];
    PotentialSpec::new(Geometry::Full, terms).unwrap()
}

#[test]
fn winding_is_additive_under_subdivision() {
    let rep = winding_additivity(200, 7);
    assert!(rep.failures.is_empty(), "{:?}", rep.failures);
    assert!(rep.checked >= 190, "{rep:?}");
}

#[test]
fn branch_signs_follow_the_sheet() {
    let rep = lift_sign_pattern(2000, 11);
    assert_eq!(rep.rejected, 0);
    assert_eq!(rep.sign_violations, 0);
    assert!(rep.max_identity_residual <= 1e-12, "{}", rep.max_identity_residual);
}

#[test]
fn gram_matrix_is_identity() {
    assert!(gram_deviation() <= 1e-12);
}

#[test]
fn determinant_satisfies_cauchy_riemann() {
    let basis = ModeBasis::build(circle(), 5).unwrap();
    let sheet = SheetLabel::new(&[1, 2], 1).unwrap();
    let ctx = ResolventContext::new(&coupled(cx(10.0, 0.0)), &basis, &sheet, engine()).unwrap();
    let h = 1e-4;
    for k in [cx(3.3, -0.6), cx(-7.1, -1.4), cx(12.2, -0.4), cx(0.7, -3.0)] {
        let f = |z: Complex64| ctx.det_fn(z).unwrap();
        let fx = (f(k + h) - f(k - h)) / (2.0 * h);
        let fy = (f(k + cx(0.0, h)) - f(k - cx(0.0, h))) / (2.0 * h);
        let res = (fy - cx(0.0, 1.0) * fx).norm() / (fx.norm() + fy.norm()).max(1.0);
        assert!(res <= 1e-6, "k = {k}: {res}");
    }
}

#[test]
fn conjugating_the_potential_reflects_the_determinant() {
    let basis = ModeBasis::build(circle(), 5).unwrap();
    let sheet = SheetLabel::single(1).unwrap();
    let v = coupled(cx(10.0, 2.0));
    let a = ResolventContext::new(&v, &basis, &sheet, engine()).unwrap();
    let b = ResolventContext::new(&v.conj(), &basis, &sheet, engine()).unwrap();
    for k in [cx(2.5, -0.5), cx(-6.0, -1.1), cx(9.4, -2.2)] {
        let lhs = b.det_fn(-k.conj()).unwrap();
        let rhs = a.det_fn(k).unwrap().conj();
        assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0), "k = {k}: {lhs} vs {rhs}");
    }
}

#[test]
fn entry_decay_and_growth() {
    let fits = entry_fits();
    for (e, s) in fits.decay_exponents.iter().zip(fits.scaled_spread) {
        assert!(*e < -0.5, "{fits:?}");
        assert!(s < 10.0, "{fits:?}");
    }
    assert!(fits.growth_rate > 0.0 && fits.growth_rate <= 2.0 + 0.1, "{fits:?}");
    let first = fits.growth_excess[0];
    assert!(fits.growth_excess.iter().all(|e| *e <= first + 1.0), "{fits:?}");
}

#[test]
fn identical_configs_give_identical_csvs() {
    let mut cfg = preset("barrier-compare").unwrap();
    cfg.region.r_max = 8.0;
    cfg.region.fit_window = Some([1.0, 8.0]);
    let a = evaluate(&cfg).unwrap();
    let b = evaluate(&cfg).unwrap();
    assert!(!a.list.zeros.is_empty());
    assert_eq!(resonances_csv(&a.list), resonances_csv(&b.list));
    assert_eq!(counting_csv(&a.counting), counting_csv(&b.counting));
}

#[test]
fn zeros_hugging_cell_edges_are_recovered() {
    // Ẽ = {0, ±1}: modes ±1 give double zeros about 0.1 from the simple
    // mode-0 zeros; some of them straddle cell edges.
    use cylscat::finder::{locate, LocateOptions, Region};
    use cylscat::oracle::{outgoing_defect, OracleDomain, OracleProfile};
    use cylscat::sheet::{lift, tilde_set};
    let profile = OracleProfile::new(
        OracleDomain::Line,
        vec![-0.38177465815667055, 0.3756602406952142, 1.133095139547099],
        vec![cx(11.301148829784385, -0.3100797174813521), cx(5.960248458212632, 0.30931132136579365)],
    )
    .unwrap();
    let basis = ModeBasis::build(circle(), 9).unwrap();
    let sheet = SheetLabel::new(&[1, 2], 1).unwrap();
    let tilde = tilde_set(&sheet, &basis);
    let f = |k: Complex64| {
        let p = lift(k, &sheet, &basis)?;
        Ok(tilde
            .members
            .iter()
            .map(|&l| outgoing_defect(&profile, p.r_tilde(l)) / outgoing_defect(&profile, -p.r_tilde(l)))
            .product())
    };
    let opts = LocateOptions::for_phase_rate(profile.width(), tilde.card());
    let list = locate(&Region::new(0.3, 12.0).unwrap(), &f, &opts);
    assert_eq!(list.total_winding, Some(30));
    assert_eq!(list.count(), 30);
    let hidden = cx(-4.689230739006908, -1.1472778532695047);
    assert!(list.zeros.iter().any(|z| (z.k - hidden).norm() < 1e-9));
    // a double zero 4e-5 inside a cell edge at the larger radius
    let list = locate(&Region::new(0.3, 25.0).unwrap(), &f, &opts);
    assert_eq!(list.total_winding, Some(66));
    assert_eq!(list.count(), 66);
    let double = cx(14.553518725167766, -3.00703611119799);
    assert!(list.zeros.iter().any(|z| (z.k - double).norm() < 1e-6 && z.multiplicity == 2));
}
