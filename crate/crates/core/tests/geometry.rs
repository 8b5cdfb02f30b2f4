use proptest::prelude::*;
use symhom::contour::{area, boundary_circles, components, level_of_circle, superlevel_region, winding, Openness, Region};
use symhom::expr::{bump, parse_expression};
use symhom::field::{apply_shear, check_nice, pos_neg_split, sample_field, CylinderField, GridSpec, ShearMap};

fn cyl(n: usize) -> GridSpec {
    GridSpec::cylinder(n, n, -0.5, 0.5).unwrap()
}

fn disk_band_region(s: GridSpec, disks: &[(f64, f64, f64)], band: Option<(f64, f64)>) -> Region {
    let mut r = Region::empty(s).with_openness(Openness::Compact);
    for &(q, p, rad) in disks {
        r = r.union(&Region::disk(s, q, p, rad, Openness::Compact)).unwrap();
    }
    if let Some((a, b)) = band {
        r = r.union(&Region::band(s, a, b, Openness::Compact)).unwrap();
    }
    r
}

#[test]
fn u_r_has_area_2r_on_the_sphere() {
    let s = GridSpec::sphere(64, 200).unwrap();
    let u = Region::band(s, -0.2, 0.2, Openness::Open);
    assert!((area(&u) - 0.4).abs() <= s.dp());
    assert!((area(&Region::full(s)) - 1.0).abs() < 1e-12);
}

#[test]
fn refinement_keeps_windings() {
    let shape = |s: GridSpec| {
        Region::band(s, -0.2, 0.2, Openness::Compact)
            .difference(&Region::disk(s, 0.3, 0.0, 0.08, Openness::Open))
            .unwrap()
            .union(&Region::disk(s, 0.7, 0.35, 0.07, Openness::Compact))
            .unwrap()
    };
    let mut sigs = Vec::new();
    for n in [64, 128] {
        let mut w: Vec<i64> = boundary_circles(&shape(cyl(n)))
            .unwrap()
            .iter()
            .map(|c| winding(c).unwrap())
            .collect();
        w.sort();
        sigs.push(w);
    }
    assert_eq!(sigs[0], sigs[1]);
    assert_eq!(sigs[0], vec![-1, 0, 0, 1]);
}

#[test]
fn band_circles_sit_at_band_edges() {
    for (a, b) in [(-0.3, -0.1), (0.05, 0.4), (-0.2, 0.2)] {
        let s = cyl(100);
        let cs = boundary_circles(&Region::band(s, a, b, Openness::Compact)).unwrap();
        let mut levels: Vec<f64> = cs.iter().map(|c| level_of_circle(c).unwrap()).collect();
        levels.sort_by(f64::total_cmp);
        assert!((levels[0] - a).abs() <= s.dp() && (levels[1] - b).abs() <= s.dp(), "{levels:?}");
    }
}

#[test]
fn superlevel_of_sampled_expression() {
    let s = cyl(128);
    let f = sample_field(&parse_expression("bump(p, 0, 0.2) * (1 + 0.2*sin(2*pi*q))").unwrap(), s).unwrap();
    assert!(superlevel_region(&f, 2.0).is_empty());
    let r = superlevel_region(&f, 0.5);
    let d = components(&r).unwrap();
    assert_eq!(d.components.len(), 1);
    assert!(d.non_contractible[0]);
}

#[test]
fn nice_check_reports_critical_cells() {
    let s = cyl(96);
    let f = CylinderField::from_fn(s, |q, p| {
        let m = 1.0 + 0.3 * (2.0 * std::f64::consts::PI * q).cos() * symhom::expr::plateau(p, -0.1, 0.1, 0.05);
        bump(p, 0.0, 0.2) * m
    })
    .unwrap();
    let r = check_nice(&f, 1e-12).unwrap();
    assert!(r.is_nice, "{:?}", r.violations);
    assert_eq!(r.critical_cells.len(), 2);
    let g = CylinderField::from_fn(s, |_, p| bump(p, 0.0, 0.25)).unwrap();
    assert!(!check_nice(&g, 1e-12).unwrap().is_nice);
}

#[test]
fn shear_and_split() {
    let s = cyl(64);
    let f = CylinderField::from_fn(s, |q, p| bump(p, 0.0, 0.3) * (0.5 + (6.0 * q).sin())).unwrap();
    let m = ShearMap::from_fn(&s, |p| 0.3 * bump(p, 0.0, 0.35));
    let g = apply_shear(&f, &m).unwrap();
    assert!((g.integral() - f.integral()).abs() < 1e-12);
    let (pos, neg) = pos_neg_split(&f);
    for c in 0..s.len() {
        assert_eq!(pos.values[c] - neg.values[c], f.values[c]);
        assert!(pos.values[c] >= 0.0 && neg.values[c] >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn windings_sum_to_zero_and_components_partition(
        disks in prop::collection::vec((0.0..1.0f64, -0.35..0.35f64, 0.03..0.12f64), 1..4),
        band in prop::option::of((-0.3..0.0f64, 0.05..0.3f64)),
    ) {
        let s = cyl(64);
        let r = disk_band_region(s, &disks, band);
        let d = components(&r).unwrap();
        let mut cover = vec![false; s.len()];
        for c in &d.components {
            for (k, &m) in c.mask.iter().enumerate() {
                if m {
                    prop_assert!(!cover[k]);
                    cover[k] = true;
                }
            }
        }
        prop_assert_eq!(cover, r.mask.clone());
        for cs in &d.boundaries {
            prop_assert_eq!(cs.iter().map(|c| c.winding).sum::<i64>(), 0);
        }
    }

    #[test]
    fn area_is_additive_on_disjoint_masks(
        a in (0.0..1.0f64, -0.3..0.3f64, 0.05..0.15f64),
        b in (-0.45..-0.4f64, 0.4..0.45f64),
    ) {
        let s = cyl(64);
        let x = Region::disk(s, a.0, a.1, a.2, Openness::Compact);
        let y = Region::band(s, b.0, -0.38, Openness::Compact)
            .union(&Region::band(s, 0.38, b.1, Openness::Compact)).unwrap();
        prop_assume!(x.is_disjoint_from(&y));
        prop_assert_eq!(area(&x.union(&y).unwrap()), area(&x) + area(&y));
    }
}
