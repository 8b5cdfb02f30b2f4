use std::collections::HashMap;
use std::f64::consts::PI;

use symhom::contour::{area, boundary_circles, level_of_circle, superlevel_region};
use symhom::expr::{bump, plateau};
use symhom::field::{CylinderField, GridSpec};
use symhom::reeb::{build_reeb, export_dot, gamma0, iota, label_path, NodeKind, PathPoint, ReebGraph};
use symhom::Error;

fn cyl(n: usize) -> GridSpec {
    GridSpec::cylinder(n, n, -0.5, 0.5).unwrap()
}

fn modulated(n: usize, eps: f64) -> CylinderField {
    CylinderField::from_fn(cyl(n), |q, p| {
        bump(p, 0.0, 0.2) * (1.0 + eps * (2.0 * PI * q).cos() * plateau(p, -0.1, 0.1, 0.05))
    })
    .unwrap()
}

/// Two unequal lobes on a ring: two maxima and two saddles.
fn two_lobes(n: usize) -> CylinderField {
    CylinderField::from_fn(cyl(n), |q, p| {
        let m = 0.3 * (1.0 + (4.0 * PI * q).cos()) + 0.1 * (1.0 + (2.0 * PI * q + 0.4).cos());
        bump(p, 0.0, 0.25) * (1.0 + m * plateau(p, -0.1, 0.06, 0.06))
    })
    .unwrap()
}

/// Level-set components at `t` counted from the contours of `{f >= t}`.
fn level_components(f: &CylinderField, t: f64) -> usize {
    boundary_circles(&superlevel_region(f, t))
        .map(|cs| cs.iter().filter(|c| c.grid_edge.is_none()).count())
        .unwrap_or(0)
}

fn edges_crossing(g: &ReebGraph, t: f64) -> usize {
    g.edges.iter().filter(|e| e.f_range.0 < t && t < e.f_range.1).count()
}

fn sweep_matches(f: &CylinderField, g: &ReebGraph) {
    let crit: Vec<f64> = g.nodes.iter().map(|n| n.f_value).collect();
    let (lo, hi) = (0.0, f.max());
    let mut checked = 0;
    for k in 0..512 {
        let t = lo + (hi - lo) * (k as f64 + 0.5) / 512.0;
        if crit.iter().any(|&c| (c - t).abs() < 0.01 * hi) {
            continue;
        }
        assert_eq!(level_components(f, t), edges_crossing(g, t), "t = {t}");
        checked += 1;
    }
    assert!(checked > 400);
}

#[test]
fn single_max_against_level_sweep() {
    let f = modulated(128, 0.3);
    let g = build_reeb(&f).unwrap();
    assert!(g.is_tree);
    assert_eq!(g.count(NodeKind::VMinus), 1);
    assert_eq!(g.count(NodeKind::VPlus), 1);
    assert_eq!(g.nodes[g.v_minus()].f_value, 0.0);
    assert_eq!(g.nodes[g.v_plus()].f_value, 0.0);
    for e in &g.edges {
        let (a, b) = (g.nodes[e.a].f_value, g.nodes[e.b].f_value);
        assert_eq!(e.f_range, (a.min(b), a.max(b)));
    }
    sweep_matches(&f, &g);
}

#[test]
fn two_lobes_have_a_figure_eight() {
    let f = two_lobes(128);
    let g = build_reeb(&f).unwrap();
    assert_eq!(g.count(NodeKind::Max), 2);
    assert_eq!(g.count(NodeKind::Saddle), 2);
    assert!(g.nodes.iter().any(|n| n.kind == NodeKind::Saddle && g.degree(n.id) == 3));
    sweep_matches(&f, &g);

    // the path skips the branch holding both maxima
    let path = gamma0(&g).unwrap();
    assert_eq!(path.len(), 3);
    assert!(path.iter().all(|&v| g.nodes[v].kind != NodeKind::Max));

    // the label of the saddle on the path spans the area inside its figure-eight
    let lp = label_path(&g, &path, &f, 8).unwrap();
    let s = &lp.nodes[1];
    assert_eq!(s.kind, NodeKind::Saddle);
    assert!(s.label.lo < s.label.hi);
    let inside = area(&superlevel_region(&f, s.f_value + 1e-9));
    let dp = f.spec.dp();
    assert!((s.label.width() - inside).abs() <= 2.0 * dp, "{} vs {inside}", s.label.width());
}

#[test]
fn labels_agree_with_contour_levels_at_finer_resolution() {
    let f = modulated(64, 0.05);
    let g = build_reeb(&f).unwrap();
    let path = gamma0(&g).unwrap();
    let lp = label_path(&g, &path, &f, 12).unwrap();
    let fine = modulated(256, 0.05);
    let dp = f.spec.dp();
    for e in &lp.edges {
        for s in &e.samples {
            let cs = boundary_circles(&superlevel_region(&fine, s.t)).unwrap();
            let near = cs
                .iter()
                .filter(|c| c.winding.abs() == 1 && c.grid_edge.is_none())
                .map(|c| (level_of_circle(c).unwrap() - s.level).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(near <= 2.0 * dp, "t = {}: off by {near}", s.t);
        }
    }
    // labels cover the line, meet end to end and never run backwards
    assert_eq!(lp.nodes[0].label.lo, f64::NEG_INFINITY);
    assert_eq!(lp.nodes.last().unwrap().label.hi, f64::INFINITY);
    for w in lp.fine.windows(2) {
        assert_eq!(w[0].label.hi, w[1].label.lo);
        assert!(w[0].label.lo <= w[0].label.hi);
    }
}

#[test]
fn iota_ends_and_interior() {
    let f = modulated(96, 0.3);
    let g = build_reeb(&f).unwrap();
    let path = gamma0(&g).unwrap();
    let lp = label_path(&g, &path, &f, 8).unwrap();
    let (lo, hi) = lp.support;
    assert_eq!(iota(&lp, lo - 0.1).unwrap(), PathPoint::Vertex { node: g.v_minus() });
    assert_eq!(iota(&lp, hi + 0.1).unwrap(), PathPoint::Vertex { node: g.v_plus() });
    // on an edge the located value has a superlevel circle at p0, at a vertex p0 lies in its label
    let mut on_edges = 0;
    for k in 1..40 {
        let p0 = lo + (hi - lo) * k as f64 / 40.0;
        match iota(&lp, p0).unwrap() {
            PathPoint::Edge { f_value, .. } => {
                let cs = boundary_circles(&superlevel_region(&f, f_value)).unwrap();
                let near = cs
                    .iter()
                    .filter(|c| c.winding.abs() == 1 && c.grid_edge.is_none())
                    .map(|c| (level_of_circle(c).unwrap() - p0).abs())
                    .fold(f64::INFINITY, f64::min);
                assert!(near <= 2.0 * f.spec.dp(), "p0 = {p0}: {near}");
                on_edges += 1;
            }
            PathPoint::Vertex { node } => {
                let n = lp.nodes.iter().find(|n| n.node == node).unwrap();
                assert!(n.label.contains(p0), "p0 = {p0} outside {:?}", n.label);
            }
        }
    }
    assert!(on_edges > 20);
}

#[test]
fn dot_parses_back() {
    let f = two_lobes(64);
    let g = build_reeb(&f).unwrap();
    let dot = export_dot(&g);
    assert_eq!(dot, export_dot(&build_reeb(&two_lobes(64)).unwrap()));
    let mut nodes = HashMap::new();
    let mut edges = 0;
    for line in dot.lines().map(str::trim) {
        if let Some(rest) = line.strip_prefix('n') {
            if let Some((id, attrs)) = rest.split_once(" [") {
                let attrs: HashMap<&str, &str> = attrs
                    .trim_end_matches("];")
                    .split(", ")
                    .filter_map(|kv| kv.split_once('='))
                    .map(|(k, v)| (k, v.trim_matches('"')))
                    .collect();
                nodes.insert(id.parse::<usize>().unwrap(), (attrs["kind"].to_string(), attrs["f"].parse::<f64>().unwrap()));
            } else if rest.contains("->") {
                edges += 1;
            }
        }
    }
    assert_eq!(nodes.len(), g.nodes.len());
    assert_eq!(edges, g.edges.len());
    for n in &g.nodes {
        let (kind, fv) = &nodes[&n.id];
        assert_eq!(kind, n.kind.as_str());
        assert!((fv - n.f_value).abs() <= 1e-11 * n.f_value.abs().max(1.0));
    }
}

#[test]
fn degenerate_inputs_are_rejected() {
    assert!(matches!(build_reeb(&CylinderField::zeros(cyl(32))), Err(Error::ZeroField)));
    let flat = CylinderField::from_fn(cyl(64), |_, p| bump(p, 0.0, 0.2)).unwrap();
    assert!(matches!(build_reeb(&flat), Err(Error::NotNice(_))));
}
