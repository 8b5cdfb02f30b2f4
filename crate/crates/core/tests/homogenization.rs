use std::f64::consts::PI;

use proptest::prelude::*;
use symhom::expr::{bump, periodic_diff, plateau};
use symhom::field::{apply_shear, CylinderField, GridSpec, Profile1D, ShearMap};
use symhom::homog::{
    c_minus, c_minus_oracle, c_plus, c_plus_oracle, eta, eta_mu, eta_oracle, homogenize,
    homogenize_general, hofer_asymptotic, perturb_to_nice, RadonMeasure, DEFAULT_MOLLIFICATION,
};
use symhom::Error;

const MOLL: f64 = DEFAULT_MOLLIFICATION;

fn cyl(n: usize) -> GridSpec {
    GridSpec::cylinder(n, n, -0.5, 0.5).unwrap()
}

fn blob(s: GridSpec, qc: f64, pc: f64, rad: f64, h: f64) -> CylinderField {
    CylinderField::from_fn(s, |q, p| {
        let d = periodic_diff(q, qc);
        h * bump((d * d + (p - pc) * (p - pc)).sqrt(), 0.0, rad)
    })
    .unwrap()
}

fn ring(s: GridSpec, h: f64, eps: f64) -> CylinderField {
    CylinderField::from_fn(s, |q, p| {
        h * bump(p, 0.02, 0.22) * (1.0 + eps * (2.0 * PI * q + 0.3).cos() * plateau(p, -0.1, 0.12, 0.06))
    })
    .unwrap()
}

fn sum(a: &CylinderField, b: &CylinderField) -> CylinderField {
    a.zip_with(b, |x, y| x + y).unwrap()
}

fn max_gap(s: GridSpec, a: &Profile1D, b: &Profile1D) -> f64 {
    (0..s.np).map(|j| (a.eval(s.p_center(j)) - b.eval(s.p_center(j))).abs()).fold(0.0, f64::max)
}

#[test]
fn invariant_profile_comes_back() {
    let s = cyl(128);
    for phi in [
        (|p: f64| bump(p, 0.0, 0.3)) as fn(f64) -> f64,
        |p| -0.4 * plateau(p, -0.2, 0.05, 0.1),
        |p| bump(p, -0.1, 0.15) - 0.5 * bump(p, 0.2, 0.1),
    ] {
        let f = CylinderField::from_fn(s, |_, p| phi(p)).unwrap();
        let h = homogenize_general(&f, MOLL).unwrap();
        for j in 0..s.np {
            let p = s.p_center(j);
            assert!((h.eval(p) - phi(p)).abs() <= 1e-3 + MOLL, "p = {p}");
        }
    }
}

#[test]
fn contractible_support_gives_zero() {
    let s = cyl(128);
    let f = sum(&blob(s, 0.3, 0.1, 0.15, 1.0), &blob(s, 0.8, -0.2, 0.1, -0.6));
    let h = homogenize_general(&f, MOLL).unwrap();
    assert!(h.max().abs() <= 1e-3 && h.min().abs() <= 1e-3);
}

#[test]
fn nice_field_uses_the_graph_directly() {
    let s = cyl(128);
    let f = ring(s, 1.0, 0.3);
    let h = homogenize(&f).unwrap();
    assert_eq!(h.eval(-0.45), 0.0);
    assert_eq!(h.eval(0.45), 0.0);
    // the lowest point of the crest bounds the profile
    assert!((h.max() - 0.7).abs() <= 2e-2, "{}", h.max());
    assert!(matches!(homogenize(&CylinderField::zeros(s)), Err(Error::ZeroField)));
    let flat = CylinderField::from_fn(s, |_, p| bump(p, 0.0, 0.2)).unwrap();
    assert!(matches!(homogenize(&flat), Err(Error::NotNice(_))));
    let g = perturb_to_nice(&flat, 1e-3).unwrap();
    assert!(g.zip_with(&flat, |a, b| a - b).unwrap().sup_norm() <= 1e-3);
    assert!(homogenize(&g).is_ok());
}

#[test]
fn eta_vanishes_outside_the_support() {
    let s = cyl(128);
    let f = ring(s, 0.8, 0.2);
    for p0 in [-0.4, -0.3, 0.35, 0.45] {
        assert_eq!(eta(&f, p0).unwrap(), 0.0);
    }
}

#[test]
fn eta_matches_quasi_integral_on_examples() {
    let s = cyl(128);
    for f in [ring(s, 1.0, 0.3), ring(s, -0.7, 0.25), sum(&ring(s, 0.6, 0.2), &blob(s, 0.5, 0.0, 0.08, 0.4))] {
        for p0 in [-0.1, 0.0, 0.05, 0.12] {
            let a = eta(&f, p0).unwrap();
            let b = eta_oracle(&f, p0, 512).unwrap();
            assert!((a - b).abs() <= 1e-2, "p0 = {p0}: {a} vs {b}");
        }
    }
    // negating the field negates eta
    let f = ring(s, 1.0, 0.3);
    for p0 in [-0.05, 0.04] {
        let a = eta(&f, p0).unwrap();
        let b = eta(&f.negate(), p0).unwrap();
        assert!((a + b).abs() <= 2.0 * MOLL, "{a} {b}");
    }
}

#[test]
fn eta_mu_is_linear_in_the_measure() {
    let s = cyl(96);
    let f = ring(s, 1.0, 0.3);
    let d1 = RadonMeasure::dirac(-0.05);
    let d2 = RadonMeasure::dirac(0.08);
    let both = RadonMeasure {
        atoms: vec![(-0.05, 2.0), (0.08, 0.5)],
        density: None,
    };
    let lhs = eta_mu(&f, &both).unwrap();
    let rhs = 2.0 * eta_mu(&f, &d1).unwrap() + 0.5 * eta_mu(&f, &d2).unwrap();
    assert!((lhs - rhs).abs() < 1e-12);
    assert!((eta_mu(&f, &d1).unwrap() - eta(&f, -0.05).unwrap()).abs() < 1e-12);
    let bad = RadonMeasure {
        atoms: vec![(0.0, -1.0)],
        density: None,
    };
    assert!(bad.validate().is_err());
}

#[test]
fn c_plus_and_c_minus_examples() {
    let s = cyl(128);
    let f = ring(s, 1.0, 0.2);
    let cp = c_plus(&f).unwrap();
    let cm = c_minus(&f).unwrap();
    assert!((cp - 0.8).abs() <= 2e-2, "{cp}");
    assert!(cm.abs() <= MOLL, "{cm}");
    let g = f.negate();
    assert!(c_plus(&g).unwrap().abs() <= MOLL);
    assert!((c_minus(&g).unwrap() + cp).abs() <= 2.0 * MOLL);
    let r = hofer_asymptotic(&f).unwrap();
    assert_eq!(r.norm, r.c_plus - r.c_minus);
}

#[test]
fn c_plus_is_the_highest_essential_level() {
    let s = cyl(128);
    let f = sum(&ring(s, 0.7, 0.3), &blob(s, 0.5, 0.3, 0.1, 1.5));
    let cp = c_plus(&f).unwrap();
    // the blob reaches higher but its superlevel sets are contractible
    assert!(f.max() > 1.4 && cp < 1.0);
    let oracle = c_plus_oracle(&f).unwrap();
    assert!((cp - oracle).abs() <= 1e-2, "{cp} vs {oracle}");
    let om = c_minus_oracle(&f).unwrap();
    assert!((c_minus(&f).unwrap() - om).abs() <= 1e-2);
}

fn arb_ring() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.3..1.5f64, 0.05..0.35f64, -0.05..0.05f64, 0.15..0.25f64)
}

fn ring_of(s: GridSpec, (h, eps, pc, w): (f64, f64, f64, f64)) -> CylinderField {
    CylinderField::from_fn(s, |q, p| {
        h * bump(p, pc, w) * (1.0 + eps * (2.0 * PI * q + 0.7).cos() * plateau(p, pc - 0.08, pc + 0.1, 0.05))
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn homogeneous_in_the_field(a in arb_ring(), lambda in prop::sample::select(vec![-2.0, -1.0, 0.5, 3.0])) {
        let s = cyl(96);
        let f = ring_of(s, a);
        let h = homogenize_general(&f, MOLL).unwrap();
        let hl = homogenize_general(&f.scale(lambda).unwrap(), MOLL).unwrap();
        for j in 0..s.np {
            let p = s.p_center(j);
            prop_assert!((hl.eval(p) - lambda * h.eval(p)).abs() <= 2e-2 * lambda.abs().max(1.0), "p = {}", p);
        }
    }

    #[test]
    fn shear_invariant(a in arb_ring(), amp in 0.05..0.5f64) {
        let s = cyl(96);
        let f = ring_of(s, a);
        let g = apply_shear(&f, &ShearMap::from_fn(&s, |p| amp * bump(p, 0.0, 0.4))).unwrap();
        let hf = homogenize_general(&f, MOLL).unwrap();
        let hg = homogenize_general(&g, MOLL).unwrap();
        prop_assert!(max_gap(s, &hf, &hg) <= 2e-2);
    }

    #[test]
    fn monotone_and_lipschitz(a in arb_ring(), qc in 0.0..1.0f64, amp in 0.05..0.5f64) {
        let s = cyl(96);
        let f = ring_of(s, a);
        let g = sum(&f, &blob(s, qc, 0.0, 0.08, amp));
        let hf = homogenize_general(&f, MOLL).unwrap();
        let hg = homogenize_general(&g, MOLL).unwrap();
        let bound = g.zip_with(&f, |x, y| x - y).unwrap().sup_norm();
        for j in 0..s.np {
            let p = s.p_center(j);
            prop_assert!(hf.eval(p) <= hg.eval(p) + 1e-2);
            prop_assert!((hf.eval(p) - hg.eval(p)).abs() <= bound + 1e-2);
        }
    }

    #[test]
    fn lagrangian_profiles(c in -0.1..0.1f64, w in 0.1..0.3f64, h in -1.5..1.5f64) {
        prop_assume!(h.abs() > 0.05);
        let s = cyl(96);
        let phi = |p: f64| h * bump(p, c, w);
        let f = CylinderField::from_fn(s, |_, p| phi(p)).unwrap();
        let hf = homogenize_general(&f, MOLL).unwrap();
        for j in 0..s.np {
            let p = s.p_center(j);
            prop_assert!((hf.eval(p) - phi(p)).abs() <= 1e-3 + MOLL * h.abs().max(1.0));
        }
    }
}
