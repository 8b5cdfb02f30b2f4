//! Topological measures on grid regions and the quasi-integrals they define.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{
    label_components, level_of_circle, superlevel_shared, trace_boundaries, Connectivity,
    GridSide, Openness, PinchRule, Region,
};
use crate::error::{Error, Result};
use crate::expr::parse_expression;
use crate::field::{pos_neg_split, sample_field, CylinderField, GridSpec, Space};

/// A set function on regions.
pub trait TopologicalMeasure: Send + Sync {
    fn name(&self) -> String;

    /// Space the measure lives on, `None` when it works on both.
    fn space(&self) -> Option<Space>;

    /// Total mass when the measure is bounded.
    fn total_mass(&self) -> Option<f64>;

    fn evaluate(&self, r: &Region) -> Result<f64>;

    /// Evaluation used by quadrature: cases inside a tolerance band score the
    /// average of the two possible outcomes and are flagged instead of raising.
    fn evaluate_lenient(&self, r: &Region) -> Result<(f64, bool)> {
        self.evaluate(r).map(|v| (v, false))
    }
}

fn check_space(tm: &dyn TopologicalMeasure, r: &Region) -> Result<()> {
    match tm.space() {
        Some(s) if s != r.spec.space => Err(Error::Invalid(format!(
            "{} is defined on the {:?}, region lives on the {:?}",
            tm.name(),
            s,
            r.spec.space
        ))),
        _ => Ok(()),
    }
}

/// `τ_{p0}`: 1 on a region with a component that separates the ends of the
/// cylinder and whose two boundary circles have levels bracketing `p0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauP0 {
    pub p0: f64,
}

impl TopologicalMeasure for TauP0 {
    fn name(&self) -> String {
        format!("tau_p0({})", self.p0)
    }

    fn space(&self) -> Option<Space> {
        Some(Space::Cylinder)
    }

    fn total_mass(&self) -> Option<f64> {
        Some(1.0)
    }

    fn evaluate(&self, r: &Region) -> Result<f64> {
        check_space(self, r)?;
        let spec = &r.spec;
        let lab = label_components(spec, &r.mask, Connectivity::Four, false, false);
        for k in 0..lab.count {
            if !lab.wraps[k] {
                continue;
            }
            let mask = lab.mask_of(k);
            let contours = trace_boundaries(spec, &mask, PinchRule::Four, r.source.as_ref())?;
            let mut levels = Vec::new();
            for c in contours.iter().filter(|c| c.winding.abs() == 1) {
                levels.push(match c.grid_edge {
                    Some(GridSide::Bottom) => f64::NEG_INFINITY,
                    Some(GridSide::Top) => f64::INFINITY,
                    None => level_of_circle(c)?,
                });
            }
            if levels.len() % 2 == 1 {
                return Err(Error::Topology(format!(
                    "component has {} non-contractible boundary circles",
                    levels.len()
                )));
            }
            if levels.is_empty() {
                continue;
            }
            levels.sort_by(f64::total_cmp);
            let (a, b) = (levels[0], levels[levels.len() - 1]);
            if a <= self.p0 && self.p0 <= b {
                return Ok(1.0);
            }
        }
        Ok(0.0)
    }
}

/// The topological measure of the Calabi quasi-state on the sphere of area 1.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TauCalabi;

impl TauCalabi {
    fn eval(&self, r: &Region, strict: bool) -> Result<(f64, bool)> {
        check_space(self, r)?;
        let spec = &r.spec;
        let (nq, np) = (spec.nq, spec.np);
        let cell = spec.cell_area();
        let band = 2.0 * cell;
        let lab = label_components(spec, &r.mask, Connectivity::Four, false, false);

        // column coverage per component, for the bounding-box shortcut
        let mut cols = vec![0usize; lab.count];
        let mut stamp = vec![u32::MAX; nq * lab.count.max(1)];
        for (c, &l) in lab.labels.iter().enumerate() {
            if l != crate::contour::NONE {
                let iq = c / np;
                let s = &mut stamp[l as usize * nq + iq];
                if *s != l {
                    *s = l;
                    cols[l as usize] += 1;
                }
            }
        }

        // decisions with the 1/2 threshold moved down and up by the band
        let (mut lo, mut hi) = (false, false);
        let mut ambiguous = false;
        for k in 0..lab.count {
            if !lab.touches_south[k] && !lab.touches_north[k] && cols[k] < nq {
                let (lo, hi) = lab.rows[k];
                let bbox = (hi - lo + 1) as f64 * cols[k] as f64 * cell;
                if bbox < 0.5 - band {
                    continue;
                }
            }
            let comp_south = (0..nq).all(|iq| lab.labels[spec.idx(iq, 0)] == k as u32);
            let comp_north = (0..nq).all(|iq| lab.labels[spec.idx(iq, np - 1)] == k as u32);
            let complement: Vec<bool> = lab.labels.iter().map(|&l| l != k as u32).collect();
            let holes = label_components(spec, &complement, Connectivity::Eight, !comp_south, !comp_north);
            let areas: Vec<f64> = holes.sizes.iter().map(|&s| s as f64 * cell).collect();
            let loose = areas.iter().all(|&a| a <= 0.5 + band);
            let tight = areas.iter().all(|&a| a <= 0.5 - band);
            if loose != tight {
                if strict {
                    let a = areas
                        .iter()
                        .copied()
                        .min_by(|x, y| (x - 0.5).abs().total_cmp(&(y - 0.5).abs()))
                        .unwrap_or(0.5);
                    return Err(Error::Ambiguous { area: a, band });
                }
                ambiguous = true;
            }
            lo |= tight;
            hi |= loose;
        }
        // an undecided stratum scores the midpoint of the two outcomes
        let value = 0.5 * (lo as u8 as f64 + hi as u8 as f64);
        Ok((value, ambiguous))
    }
}

impl TopologicalMeasure for TauCalabi {
    fn name(&self) -> String {
        "tau_calabi".into()
    }

    fn space(&self) -> Option<Space> {
        Some(Space::Sphere)
    }

    fn total_mass(&self) -> Option<f64> {
        Some(1.0)
    }

    fn evaluate(&self, r: &Region) -> Result<f64> {
        self.eval(r, true).map(|(v, _)| v)
    }

    fn evaluate_lenient(&self, r: &Region) -> Result<(f64, bool)> {
        self.eval(r, false)
    }
}

/// Integration of a nonnegative density over cells.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearTm {
    pub spec: GridSpec,
    pub density: Vec<f64>,
}

pub fn linear_tm(spec: GridSpec, density: Vec<f64>) -> Result<LinearTm> {
    if density.len() != spec.len() {
        return Err(Error::Grid("density does not match the grid".into()));
    }
    if density.iter().any(|&d| d.is_nan() || d < 0.0) {
        return Err(Error::Invalid("density must be nonnegative".into()));
    }
    Ok(LinearTm { spec, density })
}

pub fn linear_tm_uniform(spec: GridSpec, rho: f64) -> Result<LinearTm> {
    linear_tm(spec, vec![rho; spec.len()])
}

impl TopologicalMeasure for LinearTm {
    fn name(&self) -> String {
        "linear".into()
    }

    fn space(&self) -> Option<Space> {
        Some(self.spec.space)
    }

    fn total_mass(&self) -> Option<f64> {
        Some(self.density.iter().sum::<f64>() * self.spec.cell_area())
    }

    fn evaluate(&self, r: &Region) -> Result<f64> {
        check_space(self, r)?;
        if !r.spec.same_sampling(&self.spec) {
            return Err(Error::Grid("region and density grids differ".into()));
        }
        let s: f64 = r
            .mask
            .iter()
            .zip(&self.density)
            .filter(|(&m, _)| m)
            .map(|(_, &d)| d)
            .sum();
        Ok(s * self.spec.cell_area())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QiReport {
    pub value: f64,
    /// Strata whose measure was decided inside the tolerance band.
    pub ambiguous_strata: usize,
}

/// Layer-cake integral of `f` against `tm` with `n_levels` midpoint strata.
pub fn quasi_integral(tm: &dyn TopologicalMeasure, f: &CylinderField, n_levels: usize) -> Result<f64> {
    quasi_integral_report(tm, f, n_levels).map(|r| r.value)
}

pub fn quasi_integral_report(
    tm: &dyn TopologicalMeasure,
    f: &CylinderField,
    n_levels: usize,
) -> Result<QiReport> {
    if n_levels == 0 {
        return Err(Error::Invalid("need at least one quadrature level".into()));
    }
    let Some(total) = tm.total_mass() else {
        return Err(Error::Invalid(format!("{} is unbounded on the support", tm.name())));
    };
    if let Some(s) = tm.space() {
        if s != f.spec.space {
            return Err(Error::Invalid(format!(
                "{} needs a {:?} field",
                tm.name(),
                s
            )));
        }
    }
    match f.spec.space {
        Space::Sphere => {
            let (lo, hi) = (f.min(), f.max());
            let whole = tm.evaluate(&Region::full(f.spec))?;
            let _ = total;
            if hi == lo {
                return Ok(QiReport {
                    value: whole * lo,
                    ambiguous_strata: 0,
                });
            }
            let (s, amb) = strata_sum(tm, f.spec, &Arc::new(f.values.clone()), lo, hi, n_levels)?;
            Ok(QiReport {
                value: whole * lo + s,
                ambiguous_strata: amb,
            })
        }
        Space::Cylinder => {
            let (fp, fm) = pos_neg_split(f);
            let mut value = 0.0;
            let mut amb = 0;
            for (g, sign) in [(fp, 1.0), (fm, -1.0)] {
                let hi = g.max();
                if hi <= 0.0 {
                    continue;
                }
                let (s, a) = strata_sum(tm, g.spec, &Arc::new(g.values), 0.0, hi, n_levels)?;
                value += sign * s;
                amb += a;
            }
            Ok(QiReport {
                value,
                ambiguous_strata: amb,
            })
        }
    }
}

/// `Σ τ({g >= t_k}) Δ` over midpoints `t_k` of `n` strata of `[lo, hi]`,
/// evaluated in parallel and summed in level order.
fn strata_sum(
    tm: &dyn TopologicalMeasure,
    spec: GridSpec,
    values: &Arc<Vec<f64>>,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<(f64, usize)> {
    let step = (hi - lo) / n as f64;
    let taus: Vec<Result<(f64, bool)>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let t = lo + (k as f64 + 0.5) * step;
            tm.evaluate_lenient(&superlevel_shared(spec, values, t))
        })
        .collect();
    let mut sum = 0.0;
    let mut amb = 0;
    for r in taus {
        let (v, a) = r?;
        sum += v;
        amb += a as usize;
    }
    Ok((sum * step, amb))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauFromQi {
    pub value: f64,
    /// `(collar width in cells, quasi-integral)` in evaluation order.
    pub sequence: Vec<(usize, f64)>,
}

/// Chebyshev cell distance to the nearest cell of `k` (q periodic).
fn chebyshev_distance(k: &Region) -> Vec<usize> {
    let spec = &k.spec;
    let mut d = vec![usize::MAX; spec.len()];
    let mut queue = std::collections::VecDeque::new();
    for (c, &m) in k.mask.iter().enumerate() {
        if m {
            d[c] = 0;
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        let (iq, ip) = spec.coords(c);
        for dj in -1isize..=1 {
            let j = ip as isize + dj;
            if j < 0 || j >= spec.np as isize {
                continue;
            }
            for di in -1isize..=1 {
                let n = spec.idx(spec.wrap_q(iq as isize + di), j as usize);
                if d[n] == usize::MAX {
                    d[n] = d[c] + 1;
                    queue.push_back(n);
                }
            }
        }
    }
    d
}

/// Recover `τ(K)` from a quasi-integral as the infimum over plateau functions
/// equal to 1 on `K` that decay linearly over `h` cells, `h` halving from
/// `collar_cells` down to 1.
pub fn tau_from_qi<F>(qi: F, k: &Region, collar_cells: usize) -> Result<TauFromQi>
where
    F: Fn(&CylinderField) -> Result<f64>,
{
    if collar_cells == 0 {
        return Err(Error::Invalid("collar must be at least one cell".into()));
    }
    let d = chebyshev_distance(k);
    let mut sequence = Vec::new();
    let mut h = collar_cells;
    loop {
        let w = (h + 1) as f64;
        let values = d
            .iter()
            .map(|&x| if x == usize::MAX { 0.0 } else { (1.0 - x as f64 / w).max(0.0) })
            .collect();
        let f = CylinderField::new(k.spec, values)?;
        let v = qi(&f)?;
        if let Some(&(_, prev)) = sequence.last() {
            if v > prev + 1e-9 {
                return Err(Error::Invalid(format!(
                    "quasi-integral increased from {prev} to {v} on a smaller plateau"
                )));
            }
        }
        sequence.push((h, v));
        if h == 1 {
            break;
        }
        h /= 2;
    }
    Ok(TauFromQi {
        value: sequence.last().expect("nonempty").1,
        sequence,
    })
}

/// Regions of the one-point compactification of an open set `O`.
#[derive(Debug, Clone)]
pub enum HatRegion {
    /// A region inside `O`.
    Inside(Region),
    /// `(O - U) ∪ {∞}` for open `U ⊂ O`.
    AtInfinityFromOpen(Region),
    /// `(O - K) ∪ {∞}` for compact `K ⊂ O`.
    AtInfinityFromCompact(Region),
    /// The whole compactification.
    Whole,
}

pub struct CompactifiedTm<'a> {
    pub base: &'a dyn TopologicalMeasure,
    pub o: Region,
    pub total: f64,
}

/// Extend `tm` from the bounded open set `o` to its one-point compactification.
pub fn compactify<'a>(tm: &'a dyn TopologicalMeasure, o: &Region) -> Result<CompactifiedTm<'a>> {
    if o.openness != Openness::Open {
        return Err(Error::Invalid("compactification needs an open set".into()));
    }
    if o.spec.space == Space::Cylinder && o.touches_grid_edge() {
        return Err(Error::Invalid("open set must have compact closure inside the grid".into()));
    }
    let total = tm.evaluate(o)?;
    Ok(CompactifiedTm {
        base: tm,
        o: o.clone(),
        total,
    })
}

impl CompactifiedTm<'_> {
    fn inside(&self, r: &Region, what: &str) -> Result<()> {
        if !r.is_subset_of(&self.o) {
            return Err(Error::Invalid(format!("{what} is not contained in O")));
        }
        Ok(())
    }

    pub fn evaluate(&self, h: &HatRegion) -> Result<f64> {
        match h {
            HatRegion::Inside(a) => {
                self.inside(a, "region")?;
                self.base.evaluate(a)
            }
            HatRegion::AtInfinityFromOpen(u) => {
                self.inside(u, "U")?;
                if u.openness != Openness::Open {
                    return Err(Error::Invalid("(O - U) ∪ ∞ needs an open U".into()));
                }
                Ok(self.total - self.base.evaluate(u)?)
            }
            HatRegion::AtInfinityFromCompact(k) => {
                self.inside(k, "K")?;
                if k.openness != Openness::Compact {
                    return Err(Error::Invalid("(O - K) ∪ ∞ needs a compact K".into()));
                }
                self.base
                    .evaluate(&self.o.difference(k)?.with_openness(Openness::Open))
            }
            HatRegion::Whole => Ok(self.total),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AxiomCorpus {
    pub regions: Vec<Region>,
    pub disjoint_pairs: Vec<(usize, usize)>,
    pub nested_pairs: Vec<(usize, usize)>,
    /// `(K, O, K')` with `K ⊂ O ⊂ K'`.
    pub nested_triples: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomEntry {
    pub check: String,
    pub regions: Vec<usize>,
    pub expected: Option<f64>,
    pub got: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub entries: Vec<AxiomEntry>,
    pub all_pass: bool,
}

fn entry(check: &str, regions: Vec<usize>, expected: Option<f64>, got: Option<f64>, pass: bool, note: Option<String>) -> AxiomEntry {
    AxiomEntry {
        check: check.into(),
        regions,
        expected,
        got,
        pass,
        note,
    }
}

/// Additivity, monotonicity and nested regularity on a finite corpus.
pub fn check_tm_axioms(tm: &dyn TopologicalMeasure, corpus: &AxiomCorpus) -> AxiomReport {
    let eval = |r: &Region| tm.evaluate(r).map_err(|e| e.to_string());
    let rs = &corpus.regions;
    let mut entries = Vec::new();
    for &(a, b) in &corpus.disjoint_pairs {
        let ids = vec![a, b];
        if !rs[a].is_disjoint_from(&rs[b]) {
            entries.push(entry("additivity", ids, None, None, false, Some("regions overlap".into())));
            continue;
        }
        let union = rs[a].union(&rs[b]).expect("same grid");
        match (eval(&rs[a]), eval(&rs[b]), eval(&union)) {
            (Ok(x), Ok(y), Ok(z)) => {
                let pass = (x + y - z).abs() <= 1e-12 * (1.0 + z.abs());
                entries.push(entry("additivity", ids, Some(x + y), Some(z), pass, None));
            }
            (x, y, z) => {
                let msg = [x.err(), y.err(), z.err()].into_iter().flatten().collect::<Vec<_>>().join("; ");
                entries.push(entry("additivity", ids, None, None, false, Some(msg)));
            }
        }
    }
    for &(a, b) in &corpus.nested_pairs {
        let ids = vec![a, b];
        if !rs[a].is_subset_of(&rs[b]) {
            entries.push(entry("monotonicity", ids, None, None, false, Some("not nested".into())));
            continue;
        }
        match (eval(&rs[a]), eval(&rs[b])) {
            (Ok(x), Ok(y)) => {
                entries.push(entry("monotonicity", ids, Some(x), Some(y), y >= x - 1e-12, None));
            }
            (x, y) => {
                let msg = [x.err(), y.err()].into_iter().flatten().collect::<Vec<_>>().join("; ");
                entries.push(entry("monotonicity", ids, None, None, false, Some(msg)));
            }
        }
    }
    for &(k, o, k2) in &corpus.nested_triples {
        let ids = vec![k, o, k2];
        if !rs[k].is_subset_of(&rs[o]) || !rs[o].is_subset_of(&rs[k2]) {
            entries.push(entry("regularity", ids, None, None, false, Some("not nested".into())));
            continue;
        }
        match (eval(&rs[k]), eval(&rs[o]), eval(&rs[k2])) {
            (Ok(x), Ok(y), Ok(z)) => {
                let pass = x <= y + 1e-12 && y <= z + 1e-12;
                entries.push(entry("regularity", ids, Some(x), Some(y), pass, Some(format!("outer {z}"))));
            }
            (x, y, z) => {
                let msg = [x.err(), y.err(), z.err()].into_iter().flatten().collect::<Vec<_>>().join("; ");
                entries.push(entry("regularity", ids, None, None, false, Some(msg)));
            }
        }
    }
    let all_pass = entries.iter().all(|e| e.pass);
    AxiomReport { entries, all_pass }
}

/// JSON measure descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    TauP0 { p0: f64 },
    TauCalabi,
    /// Density given as an expression in `q` and `p`.
    Linear {
        #[serde(default = "one")]
        density: String,
    },
}

fn one() -> String {
    "1".into()
}

impl MeasureSpec {
    pub fn build(&self, spec: GridSpec) -> Result<Box<dyn TopologicalMeasure>> {
        Ok(match self {
            MeasureSpec::TauP0 { p0 } => Box::new(TauP0 { p0: *p0 }),
            MeasureSpec::TauCalabi => Box::new(TauCalabi),
            MeasureSpec::Linear { density } => {
                let d = sample_field(&parse_expression(density)?, spec)?;
                Box::new(linear_tm(spec, d.values)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::superlevel_region;
    use crate::expr::bump;

    fn cyl(n: usize) -> GridSpec {
        GridSpec::cylinder(n, n, -0.5, 0.5).unwrap()
    }

    fn sph(n: usize) -> GridSpec {
        GridSpec::sphere(n, n).unwrap()
    }

    #[test]
    fn tau_p0_on_annuli_and_disks() {
        let s = cyl(64);
        let ann = Region::band(s, 0.1, 0.2, Openness::Compact);
        assert_eq!(TauP0 { p0: 0.15 }.evaluate(&ann).unwrap(), 1.0);
        assert_eq!(TauP0 { p0: 0.0 }.evaluate(&ann).unwrap(), 0.0);
        let disk = Region::disk(s, 0.5, 0.0, 0.2, Openness::Compact);
        let holes = disk
            .difference(&Region::disk(s, 0.42, 0.0, 0.05, Openness::Open))
            .unwrap()
            .difference(&Region::disk(s, 0.58, 0.0, 0.05, Openness::Open))
            .unwrap();
        for p0 in [-0.1, 0.0, 0.1] {
            assert_eq!(TauP0 { p0 }.evaluate(&holes).unwrap(), 0.0);
        }
        // the whole cylinder has its ends at infinity
        assert_eq!(TauP0 { p0: 0.3 }.evaluate(&Region::full(s)).unwrap(), 1.0);
    }

    #[test]
    fn calabi_values_on_disks_and_caps() {
        let s = sph(128);
        // disk of area 0.4 / 0.6 as polar caps
        let cap4 = Region::band(s, 0.1, 0.5, Openness::Compact);
        let cap6 = Region::band(s, -0.1, 0.5, Openness::Compact);
        assert_eq!(TauCalabi.evaluate(&cap4).unwrap(), 0.0);
        assert_eq!(TauCalabi.evaluate(&cap6).unwrap(), 1.0);
        let off = Region::disk(s, 0.3, 0.0, (0.4 / std::f64::consts::PI).sqrt(), Openness::Compact);
        assert_eq!(TauCalabi.evaluate(&off).unwrap(), 0.0);
        // complement of caps of area 0.3 and 0.2
        let band = Region::band(s, -0.2, 0.3, Openness::Compact);
        assert_eq!(TauCalabi.evaluate(&band).unwrap(), 1.0);
        assert_eq!(TauCalabi.evaluate(&Region::full(s)).unwrap(), 1.0);
        assert_eq!(TauCalabi.evaluate(&Region::empty(s)).unwrap(), 0.0);
    }

    #[test]
    fn calabi_refuses_half_area() {
        let s = sph(64);
        let half = Region::band(s, 0.0, 0.5, Openness::Compact);
        assert!(matches!(TauCalabi.evaluate(&half), Err(Error::Ambiguous { .. })));
        let (v, amb) = TauCalabi.evaluate_lenient(&half).unwrap();
        assert!(amb && v == 0.5);
    }

    #[test]
    fn linear_measure() {
        let s = cyl(50);
        let tm = linear_tm_uniform(s, 1.0).unwrap();
        let ann = Region::band(s, 0.1, 0.3, Openness::Compact);
        assert!((tm.evaluate(&ann).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(tm.evaluate(&Region::empty(s)).unwrap(), 0.0);
        assert!(linear_tm(s, vec![-1.0; s.len()]).is_err());
    }

    #[test]
    fn layer_cake_against_linear_is_the_integral() {
        let s = cyl(64);
        let f = CylinderField::from_fn(s, |q, p| {
            bump(p, 0.0, 0.3) * (1.2 + (2.0 * std::f64::consts::PI * q).sin())
        })
        .unwrap();
        let tm = linear_tm_uniform(s, 1.0).unwrap();
        let qi = quasi_integral(&tm, &f, 512).unwrap();
        assert!((qi - f.integral()).abs() < 2.2 / 512.0 * 0.3, "{qi} {}", f.integral());
    }

    #[test]
    fn calabi_normalization_and_height() {
        let s = sph(64);
        let one = CylinderField::from_fn(s, |_, _| 1.0).unwrap();
        assert_eq!(quasi_integral(&TauCalabi, &one, 64).unwrap(), 1.0);
        let h = CylinderField::from_fn(s, |_, p| p).unwrap();
        let r = quasi_integral_report(&TauCalabi, &h, 512).unwrap();
        assert!(r.value.abs() <= s.dp(), "{r:?}");
    }

    #[test]
    fn tau_from_linear_qi_recovers_area() {
        let s = cyl(64);
        let tm = linear_tm_uniform(s, 1.0).unwrap();
        let k = Region::band(s, -0.1, 0.1, Openness::Compact);
        let out = tau_from_qi(|f| quasi_integral(&tm, f, 512), &k, 2).unwrap();
        let a = tm.evaluate(&k).unwrap();
        assert!(out.value >= a - 1e-12 && out.value - a <= 2.0 / 64.0, "{out:?}");
        assert_eq!(out.sequence.len(), 2);
    }

    #[test]
    fn superlevel_bands_under_tau_p0() {
        let s = cyl(128);
        let f = CylinderField::from_fn(s, |_, p| bump(p, 0.05, 0.2)).unwrap();
        let r = superlevel_region(&f, 0.5);
        assert_eq!(TauP0 { p0: 0.05 }.evaluate(&r).unwrap(), 1.0);
        assert_eq!(TauP0 { p0: -0.2 }.evaluate(&r).unwrap(), 0.0);
    }

    #[test]
    fn compactified_classes() {
        let s = cyl(64);
        let o = Region::band(s, -0.3, 0.3, Openness::Open);
        let u = Region::band(s, -0.1, 0.2, Openness::Open);
        let k = Region::band(s, -0.05, 0.05, Openness::Compact);
        let tm = TauP0 { p0: 0.0 };
        let hat = compactify(&tm, &o).unwrap();
        assert_eq!(hat.evaluate(&HatRegion::Whole).unwrap(), tm.evaluate(&o).unwrap());
        assert_eq!(hat.evaluate(&HatRegion::Inside(u.clone())).unwrap(), 1.0);
        let comp = hat.evaluate(&HatRegion::AtInfinityFromOpen(u.clone())).unwrap();
        assert_eq!(comp + hat.evaluate(&HatRegion::Inside(u)).unwrap(), 1.0);
        assert_eq!(hat.evaluate(&HatRegion::AtInfinityFromCompact(k)).unwrap(), 0.0);
        let outside = Region::band(s, 0.35, 0.4, Openness::Compact);
        assert!(hat.evaluate(&HatRegion::Inside(outside)).is_err());
    }

    #[test]
    fn axioms_on_small_corpus() {
        let s = cyl(64);
        let corpus = AxiomCorpus {
            regions: vec![
                Region::band(s, 0.1, 0.2, Openness::Compact),
                Region::disk(s, 0.5, -0.2, 0.05, Openness::Compact),
                Region::band(s, 0.05, 0.25, Openness::Compact),
            ],
            disjoint_pairs: vec![(0, 1)],
            nested_pairs: vec![(0, 2)],
            nested_triples: vec![],
        };
        let r = check_tm_axioms(&TauP0 { p0: 0.15 }, &corpus);
        assert!(r.all_pass, "{r:?}");
        assert_eq!(r.entries[0].got, Some(1.0));
    }
}
