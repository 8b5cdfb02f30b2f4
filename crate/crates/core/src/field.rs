//! Grid fields on the cylinder `S^1 x [p_min, p_max]` and on the sphere in
//! area-true cylindrical coordinates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expression;

/// Absolute tolerance below which a sample counts as zero when locating the support.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Cylinder,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nq: usize,
    pub np: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub space: Space,
}

impl GridSpec {
    pub fn new(nq: usize, np: usize, p_min: f64, p_max: f64, space: Space) -> Result<Self> {
        if nq < 3 || np < 3 {
            return Err(Error::Grid(format!("need nq, np >= 3, got {nq}x{np}")));
        }
        if !(p_min.is_finite() && p_max.is_finite() && p_min < p_max) {
            return Err(Error::Grid(format!("bad p range [{p_min}, {p_max}]")));
        }
        if space == Space::Sphere && (p_min != -0.5 || p_max != 0.5) {
            return Err(Error::Grid("sphere grids span p in [-1/2, 1/2]".into()));
        }
        Ok(GridSpec {
            nq,
            np,
            p_min,
            p_max,
            space,
        })
    }

    pub fn cylinder(nq: usize, np: usize, p_min: f64, p_max: f64) -> Result<Self> {
        Self::new(nq, np, p_min, p_max, Space::Cylinder)
    }

    pub fn sphere(nq: usize, np: usize) -> Result<Self> {
        Self::new(nq, np, -0.5, 0.5, Space::Sphere)
    }

    /// Same sampling, other space tag. Only valid for p in [-1/2, 1/2].
    pub fn with_space(&self, space: Space) -> Result<Self> {
        Self::new(self.nq, self.np, self.p_min, self.p_max, space)
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dq(&self) -> f64 {
        1.0 / self.nq as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dq() * self.dp()
    }

    pub fn total_area(&self) -> f64 {
        self.p_max - self.p_min
    }

    pub fn q_center(&self, iq: usize) -> f64 {
        (iq as f64 + 0.5) / self.nq as f64
    }

    pub fn p_center(&self, ip: usize) -> f64 {
        self.p_min + (ip as f64 + 0.5) * self.dp()
    }

    /// Lower edge of row `ip` (also accepts `ip = np` for the top edge).
    pub fn p_edge(&self, ip: usize) -> f64 {
        self.p_min + ip as f64 * self.dp()
    }

    #[inline]
    pub fn idx(&self, iq: usize, ip: usize) -> usize {
        iq * self.np + ip
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.np, idx % self.np)
    }

    #[inline]
    pub fn wrap_q(&self, iq: isize) -> usize {
        iq.rem_euclid(self.nq as isize) as usize
    }

    /// Row whose cell contains `p`, clamped to the grid.
    pub fn row_of(&self, p: f64) -> usize {
        let j = ((p - self.p_min) / self.dp()).floor();
        j.clamp(0.0, (self.np - 1) as f64) as usize
    }

    pub fn same_sampling(&self, other: &GridSpec) -> bool {
        self.nq == other.nq
            && self.np == other.np
            && self.p_min == other.p_min
            && self.p_max == other.p_max
    }
}

/// Samples of `f(q, p)` at cell centres, stored q-major: `values[iq * np + ip]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    /// `[p', p'']` as row edges, `None` for a field that vanishes everywhere.
    pub support: Option<(f64, f64)>,
}

impl CylinderField {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Grid(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let (iq, ip) = spec.coords(k);
            return Err(Error::Invalid(format!("non-finite value at cell ({iq}, {ip})")));
        }
        let mut f = CylinderField {
            spec,
            values,
            support: None,
        };
        f.support = f.row_band().map(|(lo, hi)| (spec.p_edge(lo), spec.p_edge(hi + 1)));
        Ok(f)
    }

    pub fn zeros(spec: GridSpec) -> Self {
        CylinderField {
            spec,
            values: vec![0.0; spec.len()],
            support: None,
        }
    }

    /// Sample a closure at cell centres.
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let values: Vec<f64> = (0..spec.nq)
            .into_par_iter()
            .flat_map_iter(|iq| {
                let q = spec.q_center(iq);
                let f = &f;
                (0..spec.np).map(move |ip| f(q, spec.p_center(ip)))
            })
            .collect();
        Self::new(spec, values)
    }

    #[inline]
    pub fn at(&self, iq: usize, ip: usize) -> f64 {
        self.values[self.spec.idx(iq, ip)]
    }

    /// First and last rows holding a sample above the support tolerance.
    pub fn row_band(&self) -> Option<(usize, usize)> {
        let np = self.spec.np;
        let mut live = vec![false; np];
        for (k, v) in self.values.iter().enumerate() {
            if v.abs() > SUPPORT_TOL {
                live[k % np] = true;
            }
        }
        let lo = live.iter().position(|&b| b)?;
        let hi = live.iter().rposition(|&b| b)?;
        Some((lo, hi))
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_none()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Riemann sum over cells.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_area()
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::new(self.spec, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Result<Self> {
        if !self.spec.same_sampling(&other.spec) {
            return Err(Error::Grid("fields sampled on different grids".into()));
        }
        Self::new(
            self.spec,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        self.map(|v| s * v)
    }

    pub fn negate(&self) -> Self {
        CylinderField {
            spec: self.spec,
            values: self.values.iter().map(|v| -v).collect(),
            support: self.support,
        }
    }

    /// True when every row is constant in q.
    pub fn is_q_independent(&self) -> bool {
        (0..self.spec.np).all(|ip| {
            let v0 = self.at(0, ip);
            (1..self.spec.nq).all(|iq| self.at(iq, ip) == v0)
        })
    }

    pub fn to_file(&self) -> FieldFile {
        FieldFile {
            nq: self.spec.nq,
            np: self.spec.np,
            p_min: self.spec.p_min,
            p_max: self.spec.p_max,
            space: self.spec.space,
            values: self.values.clone(),
        }
    }
}

/// On-disk field description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldFile {
    pub nq: usize,
    pub np: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub space: Space,
    pub values: Vec<f64>,
}

impl FieldFile {
    pub fn into_field(self) -> Result<CylinderField> {
        let spec = GridSpec::new(self.nq, self.np, self.p_min, self.p_max, self.space)?;
        CylinderField::new(spec, self.values)
    }
}

/// Evaluate an expression at every cell centre.
pub fn sample_field(expr: &Expression, spec: GridSpec) -> Result<CylinderField> {
    let columns: Vec<Result<Vec<f64>>> = (0..spec.nq)
        .into_par_iter()
        .map(|iq| {
            let q = spec.q_center(iq);
            (0..spec.np)
                .map(|ip| {
                    expr.eval(q, spec.p_center(ip))
                        .map_err(|source| Error::Eval { iq, ip, source })
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(spec.len());
    for col in columns {
        values.extend(col?);
    }
    CylinderField::new(spec, values)
}

/// The map `(q, p) -> (q + s(p), p)` with `s` sampled at row centres.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearMap {
    pub shifts: Vec<f64>,
}

impl ShearMap {
    pub fn from_fn<F: Fn(f64) -> f64>(spec: &GridSpec, s: F) -> Self {
        ShearMap {
            shifts: (0..spec.np).map(|ip| s(spec.p_center(ip))).collect(),
        }
    }

    pub fn zero(spec: &GridSpec) -> Self {
        ShearMap {
            shifts: vec![0.0; spec.np],
        }
    }
}

/// Pull `f` back along a shear: `out(q, p) = f(q - s(p), p)`, periodic linear
/// interpolation in q. Rows are only translated, so each row sum is preserved.
pub fn apply_shear(f: &CylinderField, m: &ShearMap) -> Result<CylinderField> {
    let spec = f.spec;
    if m.shifts.len() != spec.np {
        return Err(Error::Invalid(format!(
            "shear profile has {} rows, grid has {}",
            m.shifts.len(),
            spec.np
        )));
    }
    if m.shifts.iter().any(|s| !s.is_finite()) {
        return Err(Error::Invalid("shear profile is not finite".into()));
    }
    if m.shifts[0] != 0.0 || m.shifts[spec.np - 1] != 0.0 {
        return Err(Error::Invalid(
            "shear profile must vanish on the boundary rows".into(),
        ));
    }
    let nq = spec.nq;
    let mut values = vec![0.0; spec.len()];
    for ip in 0..spec.np {
        let cells = m.shifts[ip] * nq as f64;
        if cells == 0.0 {
            for iq in 0..nq {
                values[spec.idx(iq, ip)] = f.at(iq, ip);
            }
            continue;
        }
        let k = cells.floor();
        let theta = cells - k;
        let k = k as isize;
        for iq in 0..nq {
            // source position iq - cells lies between iq-k-1 and iq-k
            let a = f.at(spec.wrap_q(iq as isize - k), ip);
            let b = f.at(spec.wrap_q(iq as isize - k - 1), ip);
            values[spec.idx(iq, ip)] = (1.0 - theta) * a + theta * b;
        }
    }
    let mut out = CylinderField::new(spec, values)?;
    out.support = f.support;
    Ok(out)
}

/// `f = f+ - f-` with both parts nonnegative.
pub fn pos_neg_split(f: &CylinderField) -> (CylinderField, CylinderField) {
    let plus: Vec<f64> = f.values.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect();
    let minus: Vec<f64> = f.values.iter().map(|&v| if v < 0.0 { -v } else { 0.0 }).collect();
    (
        CylinderField::new(f.spec, plus).expect("finite input"),
        CylinderField::new(f.spec, minus).expect("finite input"),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Min,
    Max,
    Saddle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalCell {
    pub cell: usize,
    pub kind: CriticalKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NiceReport {
    pub is_nice: bool,
    /// Width in p of the thinner q-independent collar.
    pub delta: f64,
    pub critical_cells: Vec<CriticalCell>,
    pub violations: Vec<String>,
}

impl NiceReport {
    pub fn count(&self, kind: CriticalKind) -> usize {
        self.critical_cells.iter().filter(|c| c.kind == kind).count()
    }
}

const COLLAR_ROWS: usize = 2;

/// Symbolic comparison: is cell `b` above cell `a`?
#[inline]
pub(crate) fn sos_above(va: f64, ia: usize, vb: f64, ib: usize) -> bool {
    vb > va || (vb == va && ib > ia)
}

/// Classify a cell by the sign changes of its 8-neighbour ring.
fn classify(f: &CylinderField, iq: usize, ip: usize) -> Option<CriticalKind> {
    const RING: [(isize, isize); 8] = [
        (1, 0),
        (1, 1),
        (0, 1),
        (-1, 1),
        (-1, 0),
        (-1, -1),
        (0, -1),
        (1, -1),
    ];
    let spec = &f.spec;
    let c = spec.idx(iq, ip);
    let v = f.values[c];
    let mut up = [false; 8];
    for (k, &(di, dj)) in RING.iter().enumerate() {
        let j = ip as isize + dj;
        up[k] = if j < 0 || j >= spec.np as isize {
            // outside the grid: value 0, ranked below every cell
            0.0 > v
        } else {
            let n = spec.idx(spec.wrap_q(iq as isize + di), j as usize);
            sos_above(v, c, f.values[n], n)
        };
    }
    let changes = (0..8).filter(|&k| up[k] != up[(k + 1) % 8]).count();
    match changes {
        0 if up[0] => Some(CriticalKind::Min),
        0 => Some(CriticalKind::Max),
        2 => None,
        _ => Some(CriticalKind::Saddle),
    }
}

/// Discrete genericity test for fields with q-independent collars.
pub fn check_nice(f: &CylinderField, tol: f64) -> Result<NiceReport> {
    let (lo, hi) = f.row_band().ok_or(Error::ZeroField)?;
    let spec = f.spec;
    let mut violations = Vec::new();

    let critical_cells: Vec<CriticalCell> = (0..spec.nq)
        .into_par_iter()
        .flat_map_iter(|iq| {
            (lo..=hi).filter_map(move |ip| {
                classify(f, iq, ip).map(|kind| CriticalCell {
                    cell: spec.idx(iq, ip),
                    kind,
                    value: f.at(iq, ip),
                })
            })
        })
        .collect();

    let row_const = |ip: usize| {
        let v0 = f.at(0, ip);
        (1..spec.nq).all(|iq| (f.at(iq, ip) - v0).abs() <= tol)
    };
    let bottom = (lo..=hi).take_while(|&ip| row_const(ip)).count();
    let top = (lo..=hi).rev().take_while(|&ip| row_const(ip)).count();
    if bottom < COLLAR_ROWS || top < COLLAR_ROWS {
        violations.push(format!(
            "collars not q-independent: {bottom} row(s) above p', {top} row(s) below p'' (need {COLLAR_ROWS})"
        ));
    }
    if lo == 0 || hi + 1 == spec.np {
        violations.push("support touches the edge of the grid".into());
    }
    for c in &critical_cells {
        let (_, ip) = spec.coords(c.cell);
        if ip < lo + COLLAR_ROWS || ip + COLLAR_ROWS > hi {
            violations.push(format!(
                "{:?} at cell {} lies in a collar row {}",
                c.kind, c.cell, ip
            ));
        }
    }

    let mut sorted: Vec<&CriticalCell> = critical_cells.iter().collect();
    sorted.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.cell.cmp(&b.cell)));
    for w in sorted.windows(2) {
        if (w[1].value - w[0].value).abs() <= tol {
            violations.push(format!(
                "critical values coincide: {:?} at cell {} and {:?} at cell {} (value {})",
                w[0].kind, w[0].cell, w[1].kind, w[1].cell, w[0].value
            ));
        }
    }

    Ok(NiceReport {
        is_nice: violations.is_empty(),
        delta: bottom.min(top) as f64 * spec.dp(),
        critical_cells,
        violations,
    })
}

/// A sampled function of one variable, linear between samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    pub p: Vec<f64>,
    pub values: Vec<f64>,
    /// Value used outside the sampled range.
    pub outside: f64,
}

impl Profile1D {
    pub fn new(p: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if p.len() != values.len() || p.is_empty() {
            return Err(Error::Invalid("profile needs matching nonempty samples".into()));
        }
        if p.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Invalid("profile samples must be ascending".into()));
        }
        Ok(Profile1D {
            p,
            values,
            outside: 0.0,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> Self {
        let p: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        let values = p.iter().map(|&x| f(x)).collect();
        Profile1D {
            p,
            values,
            outside: 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.p.len();
        if x < self.p[0] || x > self.p[n - 1] {
            return self.outside;
        }
        let k = self.p.partition_point(|&s| s <= x);
        if k == 0 {
            return self.values[0];
        }
        if k == n {
            return self.values[n - 1];
        }
        let (x0, x1) = (self.p[k - 1], self.p[k]);
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        if x1 == x0 {
            return y1;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(self.outside, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(self.outside, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,value\n");
        for (p, v) in self.p.iter().zip(&self.values) {
            s.push_str(&crate::numfmt::g12(*p));
            s.push(',');
            s.push_str(&crate::numfmt::g12(*v));
            s.push('\n');
        }
        s
    }
}

/// The q-independent field `(q, p) -> g(p)`.
pub fn pullback_profile(g: &Profile1D, spec: GridSpec) -> Result<CylinderField> {
    CylinderField::from_fn(spec, |_, p| g.eval(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{bump, parse_expression, plateau};

    fn spec(n: usize) -> GridSpec {
        GridSpec::cylinder(n, n, -0.5, 0.5).unwrap()
    }

    #[test]
    fn cell_areas_sum_to_total() {
        let s = GridSpec::cylinder(7, 9, -0.3, 0.6).unwrap();
        let total: f64 = (0..s.len()).map(|_| s.cell_area()).sum();
        assert!((total - 0.9).abs() < 1e-12);
        assert!(GridSpec::new(8, 8, -0.4, 0.5, Space::Sphere).is_err());
    }

    #[test]
    fn zero_field_has_no_support() {
        let f = sample_field(&parse_expression("0").unwrap(), spec(16)).unwrap();
        assert!(f.support.is_none());
        assert!(matches!(check_nice(&f, 1e-12), Err(Error::ZeroField)));
    }

    #[test]
    fn band_field_is_q_independent_with_bump_max() {
        let f = sample_field(&parse_expression("bump(p,0,0.1)").unwrap(), spec(64)).unwrap();
        assert!(f.is_q_independent());
        // dense scan of the profile
        let analytic = (0..=100_000)
            .map(|k| bump(-0.1 + 0.2 * k as f64 / 100_000.0, 0.0, 0.1))
            .fold(0.0, f64::max);
        assert!((f.max() - analytic).abs() <= 2.0 / 64.0);
        let (a, b) = f.support.unwrap();
        assert!(a >= -0.1 - 1e-12 && b <= 0.1 + 1e-12);
    }

    #[test]
    fn eval_error_reports_cell() {
        let e = parse_expression("1/(p-p)").unwrap();
        assert!(matches!(sample_field(&e, spec(8)), Err(Error::Eval { .. })));
    }

    #[test]
    fn zero_shear_and_band_fields_are_fixed() {
        let s = spec(32);
        let f = CylinderField::from_fn(s, |q, p| {
            bump(p, 0.0, 0.2) * (1.0 + 0.3 * (2.0 * std::f64::consts::PI * q).cos())
        })
        .unwrap();
        assert_eq!(apply_shear(&f, &ShearMap::zero(&s)).unwrap(), f);
        let band = CylinderField::from_fn(s, |_, p| bump(p, 0.0, 0.2)).unwrap();
        let m = ShearMap::from_fn(&s, |p| 0.37 * bump(p, 0.0, 0.4));
        let g = apply_shear(&band, &m).unwrap();
        for (a, b) in g.values.iter().zip(&band.values) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn shear_preserves_integral() {
        let s = spec(48);
        let f = CylinderField::from_fn(s, |q, p| {
            bump(p, 0.05, 0.2) * (1.0 + 0.5 * (2.0 * std::f64::consts::PI * q).sin())
        })
        .unwrap();
        let m = ShearMap::from_fn(&s, |p| 0.813 * bump(p, 0.0, 0.3));
        let g = apply_shear(&f, &m).unwrap();
        assert!((g.integral() - f.integral()).abs() < 1e-10);
        assert_eq!(g.support, f.support);
    }

    #[test]
    fn shear_must_vanish_at_boundary() {
        let s = spec(16);
        let f = CylinderField::zeros(s);
        let m = ShearMap {
            shifts: vec![0.1; 16],
        };
        assert!(apply_shear(&f, &m).is_err());
    }

    #[test]
    fn split_reconstructs_exactly() {
        let s = spec(32);
        let f = CylinderField::from_fn(s, |_, p| p * bump(p, 0.0, 0.3)).unwrap();
        let (fp, fm) = pos_neg_split(&f);
        for k in 0..s.len() {
            assert_eq!(fp.values[k] - fm.values[k], f.values[k]);
            assert!(fp.values[k] >= 0.0 && fm.values[k] >= 0.0);
        }
        let (a, b) = pos_neg_split(&fp);
        assert_eq!(a, fp);
        assert!(b.is_zero());
        let (a, b) = pos_neg_split(&fm.negate());
        assert!(a.is_zero());
        assert_eq!(b.values, fm.values);
    }

    #[test]
    fn q_independent_bump_is_degenerate() {
        let f = CylinderField::from_fn(spec(64), |_, p| bump(p, 0.0, 0.2)).unwrap();
        let r = check_nice(&f, 1e-12).unwrap();
        assert!(!r.is_nice);
        assert!(r.violations.iter().any(|v| v.contains("coincide")));
    }

    #[test]
    fn modulated_bump_with_collars_is_nice() {
        let f = CylinderField::from_fn(spec(128), |q, p| {
            bump(p, 0.0, 0.2)
                * (1.0
                    + 0.3 * (2.0 * std::f64::consts::PI * q).cos() * plateau(p, -0.1, 0.1, 0.05))
        })
        .unwrap();
        let r = check_nice(&f, 1e-12).unwrap();
        assert!(r.is_nice, "{:?}", r.violations);
        assert_eq!(r.count(CriticalKind::Max), 1);
        assert_eq!(r.count(CriticalKind::Saddle), 1);
        assert_eq!(r.count(CriticalKind::Min), 0);
        assert!(r.delta >= 2.0 / 128.0);
    }

    #[test]
    fn equal_maxima_are_reported() {
        let f = CylinderField::from_fn(spec(64), |q, p| {
            let collar = bump(p, 0.0, 0.3);
            let lobes = bump(dqw(q, 0.25), 0.0, 0.1) + bump(dqw(q, 0.75), 0.0, 0.1);
            collar * (1.0 + lobes * bump(p, 0.0, 0.15))
        })
        .unwrap();
        let r = check_nice(&f, 1e-12).unwrap();
        assert!(!r.is_nice);
        assert!(r
            .violations
            .iter()
            .any(|v| v.contains("coincide") && v.contains("Max")));
    }

    fn dqw(q: f64, c: f64) -> f64 {
        crate::expr::periodic_diff(q, c)
    }

    #[test]
    fn profile_interpolates() {
        let g = Profile1D::new(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        assert_eq!(g.eval(0.25), 0.5);
        assert_eq!(g.eval(1.5), 0.0);
        assert!(g.to_csv().starts_with("p,value\n0,0\n"));
    }
}
