//! Regions as cell masks, their connected components, boundary circles,
//! windings, levels and areas.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{CylinderField, GridSpec, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Openness {
    Compact,
    Open,
}

/// The scalar field and threshold a region was cut from, kept for
/// sub-cell accurate boundaries and areas.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub values: Arc<Vec<f64>>,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub spec: GridSpec,
    pub mask: Vec<bool>,
    pub openness: Openness,
    pub south_cap: bool,
    pub north_cap: bool,
    pub source: Option<Threshold>,
}

impl Region {
    pub fn new(spec: GridSpec, mask: Vec<bool>, openness: Openness) -> Result<Self> {
        if mask.len() != spec.len() {
            return Err(Error::Grid(format!(
                "mask has {} cells, grid has {}",
                mask.len(),
                spec.len()
            )));
        }
        let mut r = Region {
            spec,
            mask,
            openness,
            south_cap: false,
            north_cap: false,
            source: None,
        };
        r.refresh_caps();
        Ok(r)
    }

    fn refresh_caps(&mut self) {
        if self.spec.space == Space::Sphere {
            let np = self.spec.np;
            self.south_cap = (0..self.spec.nq).all(|iq| self.mask[self.spec.idx(iq, 0)]);
            self.north_cap = (0..self.spec.nq).all(|iq| self.mask[self.spec.idx(iq, np - 1)]);
        } else {
            self.south_cap = false;
            self.north_cap = false;
        }
    }

    pub fn from_predicate<F: Fn(f64, f64) -> bool>(
        spec: GridSpec,
        openness: Openness,
        pred: F,
    ) -> Self {
        let mut mask = vec![false; spec.len()];
        for iq in 0..spec.nq {
            for ip in 0..spec.np {
                mask[spec.idx(iq, ip)] = pred(spec.q_center(iq), spec.p_center(ip));
            }
        }
        Region::new(spec, mask, openness).expect("mask sized from spec")
    }

    pub fn empty(spec: GridSpec) -> Self {
        Region::new(spec, vec![false; spec.len()], Openness::Compact).expect("sized")
    }

    pub fn full(spec: GridSpec) -> Self {
        let openness = match spec.space {
            Space::Sphere => Openness::Compact,
            Space::Cylinder => Openness::Open,
        };
        Region::new(spec, vec![true; spec.len()], openness).expect("sized")
    }

    /// Cells whose centres satisfy `a <= p <= b`.
    pub fn band(spec: GridSpec, a: f64, b: f64, openness: Openness) -> Self {
        Self::from_predicate(spec, openness, |_, p| p >= a && p <= b)
    }

    /// Cells whose centres lie within `radius` of `(qc, pc)`, q measured periodically.
    pub fn disk(spec: GridSpec, qc: f64, pc: f64, radius: f64, openness: Openness) -> Self {
        Self::from_predicate(spec, openness, |q, p| {
            let dq = crate::expr::periodic_diff(q, qc);
            dq * dq + (p - pc) * (p - pc) <= radius * radius
        })
    }

    pub fn with_openness(mut self, openness: Openness) -> Self {
        self.openness = openness;
        self
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    fn combine(&self, other: &Region, op: impl Fn(bool, bool) -> bool) -> Result<Region> {
        if !self.spec.same_sampling(&other.spec) || self.spec.space != other.spec.space {
            return Err(Error::Grid("regions live on different grids".into()));
        }
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Region::new(self.spec, mask, self.openness)
    }

    pub fn union(&self, other: &Region) -> Result<Region> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Region) -> Result<Region> {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Region) -> Result<Region> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Region {
        let openness = match self.openness {
            Openness::Compact => Openness::Open,
            Openness::Open => Openness::Compact,
        };
        Region::new(self.spec, self.mask.iter().map(|b| !b).collect(), openness)
            .expect("same size")
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    pub fn is_disjoint_from(&self, other: &Region) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !(a && b))
    }

    /// Does the mask meet the first or last row of the grid?
    pub fn touches_grid_edge(&self) -> bool {
        let np = self.spec.np;
        (0..self.spec.nq).any(|iq| {
            self.mask[self.spec.idx(iq, 0)] || self.mask[self.spec.idx(iq, np - 1)]
        })
    }

    pub fn to_file(&self) -> RegionFile {
        let mut runs = Vec::new();
        let mut cur = false;
        let mut len = 0usize;
        for &b in &self.mask {
            if b == cur {
                len += 1;
            } else {
                runs.push(len);
                cur = b;
                len = 1;
            }
        }
        runs.push(len);
        RegionFile {
            nq: self.spec.nq,
            np: self.spec.np,
            p_min: self.spec.p_min,
            p_max: self.spec.p_max,
            space: self.spec.space,
            runs,
            openness: self.openness,
            south_cap: self.south_cap,
            north_cap: self.north_cap,
        }
    }
}

/// On-disk region: grid header plus run lengths of the q-major mask,
/// alternating false/true and starting with false.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionFile {
    pub nq: usize,
    pub np: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub space: Space,
    pub runs: Vec<usize>,
    pub openness: Openness,
    #[serde(default)]
    pub south_cap: bool,
    #[serde(default)]
    pub north_cap: bool,
}

impl RegionFile {
    pub fn into_region(self) -> Result<Region> {
        let spec = GridSpec::new(self.nq, self.np, self.p_min, self.p_max, self.space)?;
        let mut mask = Vec::with_capacity(spec.len());
        let mut cur = false;
        for &n in &self.runs {
            mask.extend(std::iter::repeat(cur).take(n));
            cur = !cur;
        }
        let r = Region::new(spec, mask, self.openness)?;
        if spec.space == Space::Sphere && (r.south_cap != self.south_cap || r.north_cap != self.north_cap)
        {
            return Err(Error::Invalid(
                "cap flags disagree with the mask's polar rows".into(),
            ));
        }
        Ok(r)
    }
}

/// `{f >= t}` with the threshold recorded.
pub fn superlevel_region(f: &CylinderField, t: f64) -> Region {
    let mask: Vec<bool> = f.values.iter().map(|&v| v >= t).collect();
    let openness = if t > 0.0 {
        Openness::Compact
    } else {
        Openness::Open
    };
    let mut r = Region::new(f.spec, mask, openness).expect("sized from field");
    r.source = Some(Threshold {
        values: Arc::new(f.values.clone()),
        t,
    });
    r
}

/// Same as [`superlevel_region`] but shares an existing value buffer.
pub(crate) fn superlevel_shared(spec: GridSpec, values: &Arc<Vec<f64>>, t: f64) -> Region {
    let mask: Vec<bool> = values.iter().map(|&v| v >= t).collect();
    let openness = if t > 0.0 {
        Openness::Compact
    } else {
        Openness::Open
    };
    let mut r = Region::new(spec, mask, openness).expect("sized from field");
    r.source = Some(Threshold {
        values: Arc::clone(values),
        t,
    });
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    /// The Freudenthal triangulation: 4-neighbours plus the (+1,+1) diagonal.
    Six,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
            Connectivity::Six => &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)],
            Connectivity::Eight => &[
                (1, 0),
                (-1, 0),
                (0, 1),
                (0, -1),
                (1, 1),
                (-1, -1),
                (1, -1),
                (-1, 1),
            ],
        }
    }
}

/// Component labels of a mask. `NONE` marks cells outside the mask.
#[derive(Debug, Clone)]
pub(crate) struct Labeling {
    pub labels: Vec<u32>,
    pub count: usize,
    /// Component contains a loop going once around the cylinder.
    pub wraps: Vec<bool>,
    pub sizes: Vec<usize>,
    pub touches_south: Vec<bool>,
    pub touches_north: Vec<bool>,
    /// Bounding rows and a flag for bounding-box computations.
    pub rows: Vec<(usize, usize)>,
}

pub(crate) const NONE: u32 = u32::MAX;

/// Breadth-first labeling with q-wraparound. `link_south`/`link_north` join all
/// masked cells of the polar row through the pole (sphere complements).
pub(crate) fn label_components(
    spec: &GridSpec,
    mask: &[bool],
    conn: Connectivity,
    link_south: bool,
    link_north: bool,
) -> Labeling {
    let (nq, np) = (spec.nq, spec.np);
    let mut labels = vec![NONE; mask.len()];
    let mut sheet = vec![0i32; mask.len()];
    let mut wraps = Vec::new();
    let mut sizes = Vec::new();
    let mut touches_south = Vec::new();
    let mut touches_north = Vec::new();
    let mut rows = Vec::new();
    let mut queue = VecDeque::new();
    let offsets = conn.offsets();
    let track_sheets = spec.space == Space::Cylinder;

    for start in 0..mask.len() {
        if !mask[start] || labels[start] != NONE {
            continue;
        }
        let id = wraps.len() as u32;
        let mut wrap = false;
        let mut size = 0usize;
        let mut south = false;
        let mut north = false;
        let mut row_lo = usize::MAX;
        let mut row_hi = 0usize;
        let mut south_linked = false;
        let mut north_linked = false;
        labels[start] = id;
        sheet[start] = 0;
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            size += 1;
            let (iq, ip) = (c / np, c % np);
            row_lo = row_lo.min(ip);
            row_hi = row_hi.max(ip);
            south |= ip == 0;
            north |= ip == np - 1;
            for &(di, dj) in offsets {
                let j = ip as isize + dj;
                if j < 0 || j >= np as isize {
                    continue;
                }
                let raw = iq as isize + di;
                let crossing = if raw < 0 {
                    -1
                } else if raw >= nq as isize {
                    1
                } else {
                    0
                };
                let n = spec.idx(raw.rem_euclid(nq as isize) as usize, j as usize);
                if !mask[n] {
                    continue;
                }
                let s = sheet[c] + crossing;
                if labels[n] == NONE {
                    labels[n] = id;
                    sheet[n] = s;
                    queue.push_back(n);
                } else if track_sheets && sheet[n] != s {
                    wrap = true;
                }
            }
            let pole_row = if ip == 0 && link_south && !south_linked {
                south_linked = true;
                Some(0)
            } else if ip == np - 1 && link_north && !north_linked {
                north_linked = true;
                Some(np - 1)
            } else {
                None
            };
            if let Some(row) = pole_row {
                for jq in 0..nq {
                    let n = spec.idx(jq, row);
                    if mask[n] && labels[n] == NONE {
                        labels[n] = id;
                        queue.push_back(n);
                    }
                }
            }
        }
        wraps.push(wrap);
        sizes.push(size);
        touches_south.push(south);
        touches_north.push(north);
        rows.push((row_lo, row_hi));
    }
    Labeling {
        count: wraps.len(),
        labels,
        wraps,
        sizes,
        touches_south,
        touches_north,
        rows,
    }
}

impl Labeling {
    pub fn mask_of(&self, k: usize) -> Vec<bool> {
        self.labels.iter().map(|&l| l == k as u32).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSide {
    Bottom,
    Top,
}

/// A closed boundary polyline in lifted coordinates: q lives on the universal
/// cover and the last point repeats the first shifted by the winding.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub polyline: Vec<(f64, f64)>,
    pub closed: bool,
    pub winding: i64,
    /// Set when the contour runs entirely along the bottom or top edge of the grid.
    pub grid_edge: Option<GridSide>,
}

#[derive(Debug, Clone)]
pub struct ComponentDecomposition {
    pub components: Vec<Region>,
    pub non_contractible: Vec<bool>,
    pub boundaries: Vec<Vec<Contour>>,
}

/// 4-connected components ordered by their smallest cell index.
pub fn components(r: &Region) -> Result<ComponentDecomposition> {
    let lab = label_components(&r.spec, &r.mask, Connectivity::Four, false, false);
    let mut comps = Vec::with_capacity(lab.count);
    let mut boundaries = Vec::with_capacity(lab.count);
    for k in 0..lab.count {
        let mut c = Region::new(r.spec, lab.mask_of(k), r.openness)?;
        c.source = r.source.clone();
        boundaries.push(boundary_circles(&c)?);
        comps.push(c);
    }
    Ok(ComponentDecomposition {
        components: comps,
        non_contractible: lab.wraps,
        boundaries,
    })
}

/// Which way to turn where the boundary touches itself at a lattice vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PinchRule {
    /// Keep diagonal cells apart (4-connected regions).
    Four,
    /// Join cells on the (+1,+1) diagonal, separate the others.
    Six,
}

// directions: 0 = +q, 1 = +p, 2 = -q, 3 = -p
const DIR: [(isize, isize); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

#[derive(Clone, Copy)]
struct Edge {
    dir: u8,
    cell: usize,
    /// Neighbour across the edge, `None` beyond the grid.
    across: Option<usize>,
}

/// Trace every boundary circle of a mask with the region on the left.
pub(crate) fn trace_boundaries(
    spec: &GridSpec,
    mask: &[bool],
    rule: PinchRule,
    source: Option<&Threshold>,
) -> Result<Vec<Contour>> {
    let (nq, np) = (spec.nq, spec.np);
    let nv = nq * (np + 1);
    let vid = |vi: usize, vj: usize| vi * (np + 1) + vj;
    // at most two outgoing edges per vertex
    let mut out: Vec<[Option<Edge>; 2]> = vec![[None, None]; nv];
    let sphere = spec.space == Space::Sphere;
    let mut n_edges = 0usize;
    let push = |v: usize, e: Edge, out: &mut Vec<[Option<Edge>; 2]>| -> Result<()> {
        let slot = &mut out[v];
        if slot[0].is_none() {
            slot[0] = Some(e);
        } else if slot[1].is_none() {
            slot[1] = Some(e);
        } else {
            return Err(Error::Resolution("more than two boundary edges at a vertex".into()));
        }
        Ok(())
    };
    for iq in 0..nq {
        let iq1 = (iq + 1) % nq;
        let iqm = (iq + nq - 1) % nq;
        for ip in 0..np {
            let c = spec.idx(iq, ip);
            if !mask[c] {
                continue;
            }
            // bottom
            if ip == 0 {
                if !sphere {
                    push(vid(iq, 0), Edge { dir: 0, cell: c, across: None }, &mut out)?;
                    n_edges += 1;
                }
            } else if !mask[spec.idx(iq, ip - 1)] {
                let e = Edge { dir: 0, cell: c, across: Some(spec.idx(iq, ip - 1)) };
                push(vid(iq, ip), e, &mut out)?;
                n_edges += 1;
            }
            // right
            let n = spec.idx(iq1, ip);
            if !mask[n] {
                push(vid(iq1, ip), Edge { dir: 1, cell: c, across: Some(n) }, &mut out)?;
                n_edges += 1;
            }
            // top
            if ip == np - 1 {
                if !sphere {
                    push(vid(iq1, np), Edge { dir: 2, cell: c, across: None }, &mut out)?;
                    n_edges += 1;
                }
            } else if !mask[spec.idx(iq, ip + 1)] {
                let e = Edge { dir: 2, cell: c, across: Some(spec.idx(iq, ip + 1)) };
                push(vid(iq1, ip + 1), e, &mut out)?;
                n_edges += 1;
            }
            // left
            let n = spec.idx(iqm, ip);
            if !mask[n] {
                push(vid(iq, ip + 1), Edge { dir: 3, cell: c, across: Some(n) }, &mut out)?;
                n_edges += 1;
            }
        }
    }

    let mut used = vec![[false; 2]; nv];
    let mut contours = Vec::new();
    let mut remaining = n_edges;
    for v0 in 0..nv {
        for s0 in 0..2 {
            if out[v0][s0].is_none() || used[v0][s0] {
                continue;
            }
            let (vi0, vj0) = (v0 / (np + 1), v0 % (np + 1));
            let mut lifted = vi0 as isize;
            let mut vj = vj0;
            let mut v = v0;
            let mut slot = s0;
            let mut points = Vec::new();
            let mut all_bottom = true;
            let mut all_top = true;
            loop {
                used[v][slot] = true;
                remaining -= 1;
                let e = out[v][slot].expect("edge present");
                let horizontal_edge = e.dir % 2 == 0;
                all_bottom &= e.across.is_none() && vj == 0 && horizontal_edge;
                all_top &= e.across.is_none() && vj == np && horizontal_edge;
                points.push(edge_point(spec, lifted, vj, &e, source));
                let (di, dj) = DIR[e.dir as usize];
                lifted += di;
                vj = (vj as isize + dj) as usize;
                let vi = lifted.rem_euclid(nq as isize) as usize;
                v = vid(vi, vj);
                let next = match (out[v][0].is_some(), out[v][1].is_some()) {
                    (true, true) => choose_turn(spec, mask, rule, e.dir, vi, vj, &out[v]),
                    (true, false) => 0,
                    _ => return Err(Error::Resolution("boundary trace did not close".into())),
                };
                if v == v0 && next == s0 {
                    break;
                }
                if used[v][next] {
                    return Err(Error::Resolution("boundary trace revisits an edge".into()));
                }
                slot = next;
            }
            let closed = true;
            let shift = lifted - vi0 as isize;
            if shift % nq as isize != 0 {
                return Err(Error::Resolution("boundary trace closed off-lattice".into()));
            }
            let winding = (shift / nq as isize) as i64;
            let first = points[0];
            points.push((first.0 + winding as f64, first.1));
            let grid_edge = if all_bottom {
                Some(GridSide::Bottom)
            } else if all_top {
                Some(GridSide::Top)
            } else {
                None
            };
            contours.push(Contour {
                polyline: points,
                closed,
                winding,
                grid_edge,
            });
        }
    }
    debug_assert_eq!(remaining, 0);
    Ok(contours)
}

fn choose_turn(
    spec: &GridSpec,
    mask: &[bool],
    rule: PinchRule,
    incoming: u8,
    vi: usize,
    vj: usize,
    cands: &[Option<Edge>; 2],
) -> usize {
    let left = (incoming + 1) % 4;
    let right = (incoming + 3) % 4;
    let want = match rule {
        PinchRule::Four => left,
        PinchRule::Six => {
            // cells meeting at this vertex: (vi-1, vj-1) and (vi, vj) form the (+1,+1) diagonal
            let c = |di: isize, dj: isize| {
                let j = vj as isize + dj;
                j >= 0
                    && j < spec.np as isize
                    && mask[spec.idx(spec.wrap_q(vi as isize + di), j as usize)]
            };
            if c(-1, -1) && c(0, 0) {
                right
            } else {
                left
            }
        }
    };
    if cands[0].map(|e| e.dir) == Some(want) {
        0
    } else {
        1
    }
}

/// Polyline point for one directed edge: the lattice vertex it starts at, or
/// the interpolated threshold crossing between the two cell centres.
fn edge_point(
    spec: &GridSpec,
    lifted: isize,
    vj: usize,
    e: &Edge,
    source: Option<&Threshold>,
) -> (f64, f64) {
    let nq = spec.nq as f64;
    let dp = spec.dp();
    let Some(th) = source else {
        return (lifted as f64 / nq, spec.p_edge(vj));
    };
    let vin = th.values[e.cell];
    let theta = match e.across {
        Some(n) => {
            let vout = th.values[n];
            if vin >= th.t && vout < th.t && vin > vout {
                ((vin - th.t) / (vin - vout)).clamp(0.0, 1.0)
            } else {
                0.5
            }
        }
        None => 0.5,
    };
    let l = lifted as f64;
    match e.dir {
        0 => ((l + 0.5) / nq, spec.p_edge(vj) + (0.5 - theta) * dp),
        1 => ((l - 0.5 + theta) / nq, spec.p_edge(vj) + 0.5 * dp),
        2 => ((l - 0.5) / nq, spec.p_edge(vj) - (0.5 - theta) * dp),
        _ => ((l + 0.5 - theta) / nq, spec.p_edge(vj) - 0.5 * dp),
    }
}

/// Boundary circles of a region, oriented with the region on the left.
pub fn boundary_circles(r: &Region) -> Result<Vec<Contour>> {
    if r.is_empty() {
        return Err(Error::Invalid("boundary of an empty region".into()));
    }
    trace_boundaries(&r.spec, &r.mask, PinchRule::Four, r.source.as_ref())
}

/// Total q-displacement of a closed simple contour on the universal cover.
pub fn winding(c: &Contour) -> Result<i64> {
    let n = c.polyline.len();
    if !c.closed || n < 2 {
        return Err(Error::Invalid("winding of an open polyline".into()));
    }
    let (q0, p0) = c.polyline[0];
    let (q1, p1) = c.polyline[n - 1];
    let shift = q1 - q0;
    let w = shift.round();
    if (shift - w).abs() > 1e-9 || (p1 - p0).abs() > 1e-12 {
        return Err(Error::Invalid("polyline does not close on the cylinder".into()));
    }
    let key = |(q, p): (f64, f64)| {
        (
            (q.rem_euclid(1.0) * 1e9).round() as i64,
            (p * 1e9).round() as i64,
        )
    };
    let mut seen = HashSet::with_capacity(n);
    for k in 0..n - 1 {
        let seg = (key(c.polyline[k]), key(c.polyline[k + 1]));
        if !seen.insert(seg) {
            return Err(Error::Invalid("contour is not simple".into()));
        }
    }
    Ok(w as i64)
}

/// `∮ p dq` over a non-contractible circle, oriented so that `∮ dq = 1`.
pub fn level_of_circle(c: &Contour) -> Result<f64> {
    let w = winding(c)?;
    if w.abs() != 1 {
        return Err(Error::Invalid(format!(
            "level needs a non-contractible circle, winding is {w}"
        )));
    }
    let s: f64 = c
        .polyline
        .windows(2)
        .map(|s| 0.5 * (s[0].1 + s[1].1) * (s[1].0 - s[0].0))
        .sum();
    Ok(s * w as f64)
}

/// Area of a region; sub-cell accurate when the region was cut from a field.
pub fn area(r: &Region) -> f64 {
    let cell = r.spec.cell_area();
    match &r.source {
        None => r.count() as f64 * cell,
        Some(th) => {
            let spec = &r.spec;
            let mut total = 0.0;
            for iq in 0..spec.nq {
                for ip in 0..spec.np {
                    let c = spec.idx(iq, ip);
                    let counted = r.mask[c] || near_mask(spec, &r.mask, iq, ip);
                    if counted {
                        total += cell_fraction(spec, &th.values, iq, ip, th.t);
                    }
                }
            }
            total * cell
        }
    }
}

fn near_mask(spec: &GridSpec, mask: &[bool], iq: usize, ip: usize) -> bool {
    for dj in -1isize..=1 {
        let j = ip as isize + dj;
        if j < 0 || j >= spec.np as isize {
            continue;
        }
        for di in -1isize..=1 {
            if mask[spec.idx(spec.wrap_q(iq as isize + di), j as usize)] {
                return true;
            }
        }
    }
    false
}

/// Fraction of a linear triangle with vertex values `a, b, c` lying in `{ >= t }`.
pub fn triangle_fraction_above(a: f64, b: f64, c: f64, t: f64) -> f64 {
    let mut v = [a, b, c];
    v.sort_by(f64::total_cmp);
    let [lo, mid, hi] = v;
    if lo >= t {
        1.0
    } else if hi < t {
        0.0
    } else if t <= mid {
        1.0 - (t - lo) * (t - lo) / ((mid - lo) * (hi - lo))
    } else {
        (hi - t) * (hi - t) / ((hi - lo) * (hi - mid))
    }
}

/// Fraction of cell `(iq, ip)` above `t` under the piecewise linear
/// interpolant through cell centres, edge midpoints and corner averages.
fn cell_fraction(spec: &GridSpec, values: &[f64], iq: usize, ip: usize, t: f64) -> f64 {
    let at = |di: isize, dj: isize| {
        let j = (ip as isize + dj).clamp(0, spec.np as isize - 1) as usize;
        values[spec.idx(spec.wrap_q(iq as isize + di), j)]
    };
    let c = at(0, 0);
    let mut frac = 0.0;
    for (sx, sy) in [(1isize, 1isize), (-1, 1), (-1, -1), (1, -1)] {
        let ex = 0.5 * (c + at(sx, 0));
        let ey = 0.5 * (c + at(0, sy));
        let corner = 0.25 * (c + at(sx, 0) + at(0, sy) + at(sx, sy));
        frac += 0.125 * triangle_fraction_above(c, ex, corner, t);
        frac += 0.125 * triangle_fraction_above(c, corner, ey, t);
    }
    frac
}

/// CSV export: one row per polyline vertex.
pub fn contours_to_csv(contours: &[Contour]) -> String {
    let mut s = String::from("contour,winding,q,p\n");
    for (k, c) in contours.iter().enumerate() {
        for &(q, p) in &c.polyline {
            s.push_str(&format!(
                "{k},{},{},{}\n",
                c.winding,
                crate::numfmt::g12(q),
                crate::numfmt::g12(p)
            ));
        }
    }
    s
}
