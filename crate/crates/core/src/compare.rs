//! The annulus experiment: the Calabi quasi-state pulled back to `U_r`
//! against `η_0`, plus the disk counterexample, moment-map pullbacks and the
//! parameter solver for the four-arc curve.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{bump, periodic_diff, plateau};
use crate::field::{pullback_profile, CylinderField, GridSpec, Profile1D, Space};
use crate::homog::eta;
use crate::tmeasure::{quasi_integral, TauCalabi};

/// Place a field supported in `S¹×(-r, r)` on the sphere in cylindrical
/// coordinates, extending by zero.
pub fn embed_field(f: &CylinderField, r: f64) -> Result<CylinderField> {
    if !(r > 0.0 && r <= 0.5) {
        return Err(Error::Invalid(format!("r must lie in (0, 1/2], got {r}")));
    }
    if let Some((a, b)) = f.support {
        if a < -r - 1e-12 || b > r + 1e-12 {
            return Err(Error::Invalid(format!(
                "support [{a}, {b}] exceeds (-{r}, {r})"
            )));
        }
    }
    let s = f.spec;
    let dp = s.dp();
    let np = (1.0 / dp).round() as usize;
    let offset = (s.p_min + 0.5) / dp;
    let k = offset.round();
    if (np as f64 * dp - 1.0).abs() > 1e-9 || (offset - k).abs() > 1e-6 || k < 0.0 {
        return Err(Error::Grid(
            "field rows do not align with a sphere grid on [-1/2, 1/2]".into(),
        ));
    }
    let k = k as usize;
    if k + s.np > np {
        return Err(Error::Grid("field grid extends past the poles".into()));
    }
    let sphere = GridSpec::sphere(s.nq, np)?;
    let mut values = vec![0.0; sphere.len()];
    for iq in 0..s.nq {
        for ip in 0..s.np {
            values[sphere.idx(iq, ip + k)] = f.at(iq, ip);
        }
    }
    CylinderField::new(sphere, values)
}

/// `ζ_r(f) = ζ(j_! f)`.
pub fn zeta_r(f: &CylinderField, r: f64, n_levels: usize) -> Result<f64> {
    quasi_integral(&TauCalabi, &embed_field(f, r)?, n_levels)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub r: f64,
    pub grid: usize,
    pub corpus: usize,
    pub seed: u64,
    pub n_levels: usize,
    pub match_tol: f64,
    pub mismatch_margin: f64,
}

impl ExperimentConfig {
    pub fn new(r: f64, grid: usize, corpus: usize, seed: u64, n_levels: usize) -> Self {
        ExperimentConfig {
            r,
            grid,
            corpus,
            seed,
            n_levels,
            match_tol: 5e-2,
            mismatch_margin: 0.9,
        }
    }

    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::cylinder(self.grid, self.grid, -0.5, 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r <= 0.5) {
            return Err(Error::Invalid(format!("r must lie in (0, 1/2], got {}", self.r)));
        }
        if self.grid < 32 {
            return Err(Error::Invalid("grid must have at least 32 cells per side".into()));
        }
        if (self.r - 0.25).abs() <= 1.0 / self.grid as f64 {
            return Err(Error::Invalid(
                "r is within one cell of 1/4, where the answer is decided by the grid".into(),
            ));
        }
        if self.n_levels == 0 {
            return Err(Error::Invalid("need at least one quadrature level".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusKind {
    Band,
    Disk,
    Annulus,
    Ridge,
}

pub struct CorpusField {
    pub id: usize,
    pub kind: CorpusKind,
    pub field: CylinderField,
}

/// Seeded random fields supported in `S¹×(-r, r)`, cycling through four shapes:
/// q-independent bumps, off-centre disk bumps, wavy annular plateaus and
/// q-modulated ridges. Field `id` depends only on `(seed, id)`.
pub fn corpus_field(spec: GridSpec, r: f64, seed: u64, id: usize) -> Result<CorpusField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    let margin = 6.0 * spec.dp();
    let room = r - margin;
    if room <= 4.0 * spec.dp() {
        return Err(Error::Resolution(format!("r = {r} leaves no room at this grid")));
    }
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let height = sign * rng.gen_range(0.4..1.2);
    let kind = [CorpusKind::Band, CorpusKind::Disk, CorpusKind::Annulus, CorpusKind::Ridge][id % 4];
    let tau = 2.0 * PI;
    let field = match kind {
        CorpusKind::Band => {
            let w = rng.gen_range(0.3..0.9) * room;
            let c = rng.gen_range(-1.0..1.0) * (room - w);
            CylinderField::from_fn(spec, |_, p| height * bump(p, c, w))?
        }
        CorpusKind::Disk => {
            let rad = rng.gen_range(0.3..0.9) * room;
            let pc = rng.gen_range(-1.0..1.0) * (room - rad);
            let qc = rng.gen_range(0.0..1.0);
            CylinderField::from_fn(spec, move |q, p| {
                let d = periodic_diff(q, qc);
                height * bump((d * d + (p - pc) * (p - pc)).sqrt(), 0.0, rad)
            })?
        }
        CorpusKind::Annulus => {
            let amp = rng.gen_range(0.0..0.25) * room;
            let taper = rng.gen_range(0.1..0.25) * room;
            let avail = room - amp - taper;
            let half = rng.gen_range(0.2..0.8) * avail;
            let c = rng.gen_range(-1.0..1.0) * (avail - half);
            let phase = rng.gen_range(0.0..1.0);
            let base = rng.gen_range(0.2..0.5);
            CylinderField::from_fn(spec, move |q, p| {
                let s = p - amp * (tau * (q + phase)).sin();
                let ring = plateau(s, c - half, c + half, taper);
                height * ring * (base + (1.0 - base) * plateau(s, c - 0.5 * half, c + 0.5 * half, 0.5 * half))
            })?
        }
        CorpusKind::Ridge => {
            let w = rng.gen_range(0.3..0.9) * room;
            let c = rng.gen_range(-1.0..1.0) * (room - w);
            let second = rng.gen_range(0.0..0.3);
            let phase = rng.gen_range(0.0..1.0);
            CylinderField::from_fn(spec, move |q, p| {
                let m = 1.0 + 0.5 * (tau * q).cos() + second * (2.0 * tau * (q + phase)).cos();
                height * bump(p, c, w) * m
            })?
        }
    };
    Ok(CorpusField { id, kind, field })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldGap {
    pub id: usize,
    pub kind: CorpusKind,
    pub zeta_r: f64,
    pub eta0: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub plateau_area: f64,
    pub zeta_r: f64,
    pub eta0: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub config: ExperimentConfig,
    pub per_field: Vec<FieldGap>,
    /// `match`, `mismatch` or `inconclusive`.
    pub verdict: String,
    pub counterexample: Option<CounterexampleReport>,
}

/// Compare `ζ_r` and `η_0` on a seeded corpus, and for `r > 1/4` on the disk
/// counterexample as well.
pub fn run_comparison(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let mut per_field = (0..cfg.corpus)
        .into_par_iter()
        .map(|id| {
            let c = corpus_field(spec, cfg.r, cfg.seed, id)?;
            let z = zeta_r(&c.field, cfg.r, cfg.n_levels)?;
            let e = eta(&c.field, 0.0)?;
            Ok(FieldGap {
                id,
                kind: c.kind,
                zeta_r: z,
                eta0: e,
                gap: (z - e).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    per_field.sort_by_key(|g| g.id);
    let all_match = per_field.iter().all(|g| g.gap <= cfg.match_tol);
    let (verdict, counterexample) = if cfg.r > 0.25 {
        let f = counterexample_field(cfg.r, spec)?;
        let z = zeta_r(&f, cfg.r, cfg.n_levels)?;
        let e = eta(&f, 0.0)?;
        let rep = CounterexampleReport {
            plateau_area: plateau_area(&f),
            zeta_r: z,
            eta0: e,
            gap: z - e,
        };
        let v = if rep.gap >= cfg.mismatch_margin { "mismatch" } else { "inconclusive" };
        (v, Some(rep))
    } else if all_match {
        ("match", None)
    } else {
        ("mismatch", None)
    };
    Ok(ComparisonReport {
        config: *cfg,
        per_field,
        verdict: verdict.into(),
        counterexample,
    })
}

/// Area of the cells where the field equals its maximum 1.
pub fn plateau_area(f: &CylinderField) -> f64 {
    f.values.iter().filter(|&&v| v >= 1.0 - 1e-12).count() as f64 * f.spec.cell_area()
}

/// A bump equal to 1 on a topological disk of area above 1/2 inside `U_r`.
///
/// A round disk of that area does not fit in a band of height `2r < 1`, so the
/// plateau is a rectangle with smoothed edges: a product of plateaus in `q` and
/// `p`, its area aimed at the midpoint of `(1/2, 2r)` and shrunk when the
/// q-extent would close up around the cylinder.
pub fn counterexample_field(r: f64, spec: GridSpec) -> Result<CylinderField> {
    if spec.space != Space::Cylinder || spec.p_min > -r || spec.p_max < r {
        return Err(Error::Invalid("grid must be a cylinder covering (-r, r)".into()));
    }
    let (dq, dp) = (spec.dq(), spec.dp());
    let band = 2.0 * spec.cell_area();
    if 2.0 * r <= 0.5 + 4.0 * spec.cell_area() {
        return Err(Error::Invalid(format!(
            "r = {r} leaves no room for a disk of area 1/2 in U_r"
        )));
    }
    let target = 0.5 * (0.5 + 2.0 * r);
    for cells in [3.0, 2.0, 1.0] {
        let (wq, wp) = (cells * dq, cells * dp);
        let half_p = r - wp - dp;
        if half_p <= 0.0 {
            continue;
        }
        let l_max = 1.0 - 2.0 * wq - 2.0 * dq;
        let l = (target / (2.0 * half_p)).min(l_max);
        if 2.0 * half_p * l <= 0.5 + band {
            continue;
        }
        let f = CylinderField::from_fn(spec, |q, p| {
            plateau(periodic_diff(q, 0.5), -0.5 * l, 0.5 * l, wq) * plateau(p, -half_p, half_p, wp)
        })?;
        if plateau_area(&f) > 0.5 + band {
            return Ok(f);
        }
    }
    Err(Error::Infeasible(format!(
        "no plateau of area above 1/2 fits in U_r for r = {r} at {}x{}",
        spec.nq, spec.np
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub g_at_0: f64,
    pub g_at_p0: f64,
    pub eta_p0: f64,
    pub zeta_r: f64,
    pub eta_gap: f64,
    pub zeta_gap: f64,
}

/// Evaluate `η_{p0}` and `ζ_r` on the pullback of a profile in `p`: the first
/// should return `g(p0)`, the second `g(0)`.
pub fn moment_pullback_check(
    g: &Profile1D,
    r: f64,
    p0: f64,
    spec: GridSpec,
    n_levels: usize,
) -> Result<MomentReport> {
    let f = pullback_profile(g, spec)?;
    let e = eta(&f, p0)?;
    let z = zeta_r(&f, r, n_levels)?;
    let (g0, gp) = (g.eval(0.0), g.eval(p0));
    Ok(MomentReport {
        g_at_0: g0,
        g_at_p0: gp,
        eta_p0: e,
        zeta_r: z,
        eta_gap: (e - gp).abs(),
        zeta_gap: (z - g0).abs(),
    })
}

/// Radii and angle of the four-arc curve whose enclosed area matches the disk
/// `|z|² <= 1/(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gamma0Params {
    pub n: u32,
    pub epsilon: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub alpha: f64,
    /// Left minus right side of the area-balance equation.
    pub residual: f64,
    /// Area enclosed by the polygonal curve minus the disk area, over π.
    pub signed_area: f64,
}

/// Solve the area balance for `ρ1` given `(n, ε, ρ2, α)`.
pub fn solve_gamma0(n: u32, epsilon: f64, rho2: f64, alpha: f64) -> Result<Gamma0Params> {
    if n < 2 {
        return Err(Error::Invalid("n must be at least 2".into()));
    }
    let c = 1.0 / (n as f64 + 1.0);
    let r2 = rho2 * rho2;
    if !(epsilon > 0.0) || !(r2 > c && r2 < c + epsilon) {
        return Err(Error::Invalid(format!(
            "need 1/(n+1) < rho2^2 < 1/(n+1) + eps, got rho2^2 = {r2}"
        )));
    }
    if !(alpha > 0.0 && alpha < 0.5 * PI) {
        return Err(Error::Invalid(format!("need 0 < alpha < pi/2, got {alpha}")));
    }
    let a = alpha / PI;
    let r1 = ((1.0 - a) * (r2 - c) - a * c) / (1.0 - a);
    if r1 <= 0.0 {
        let bound = PI * (1.0 - c / r2);
        return Err(Error::Infeasible(format!(
            "alpha = {alpha} too large for rho2 = {rho2}: need alpha < {}",
            crate::numfmt::g12(bound)
        )));
    }
    let residual = (1.0 - a) * (r2 - c) - (r1 + a * (c - r1));
    let rho1 = r1.sqrt();
    let signed_area = gamma0_enclosed_area(rho1, rho2, alpha, 1 << 16) / PI - c;
    if signed_area.abs() > 1e-6 {
        return Err(Error::Infeasible(format!(
            "polygonal area check failed: {signed_area}"
        )));
    }
    Ok(Gamma0Params {
        n,
        epsilon,
        rho1,
        rho2,
        alpha,
        residual,
        signed_area,
    })
}

/// Vertices of the four-arc curve, each arc sampled with `per_arc` segments.
pub fn gamma0_polygon(rho1: f64, rho2: f64, alpha: f64, per_arc: usize) -> Vec<(f64, f64)> {
    let sweep = 2.0 * PI - 2.0 * alpha;
    let mut pts = Vec::with_capacity(2 * per_arc + 2);
    // counterclockwise on the outer circle from alpha to 2pi - alpha
    for k in 0..=per_arc {
        let t = alpha + sweep * k as f64 / per_arc as f64;
        pts.push((rho2 * t.cos(), rho2 * t.sin()));
    }
    // clockwise back on the inner circle; the straight pieces close the loop
    for k in 0..=per_arc {
        let t = 2.0 * PI - alpha - sweep * k as f64 / per_arc as f64;
        pts.push((rho1 * t.cos(), rho1 * t.sin()));
    }
    pts
}

fn gamma0_enclosed_area(rho1: f64, rho2: f64, alpha: f64, per_arc: usize) -> f64 {
    let pts = gamma0_polygon(rho1, rho2, alpha, per_arc);
    let n = pts.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (x0, y0) = pts[i];
            let (x1, y1) = pts[(i + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum();
    0.5 * twice
}

/// A random input inside the feasible set of `solve_gamma0`.
pub fn random_feasible_gamma0<R: Rng>(rng: &mut R) -> (u32, f64, f64, f64) {
    let n = rng.gen_range(2..=6u32);
    let c = 1.0 / (n as f64 + 1.0);
    let eps = rng.gen_range(0.01..0.2);
    let r2 = c + eps * rng.gen_range(0.05..0.95);
    let bound = (PI * (1.0 - c / r2)).min(0.5 * PI);
    let alpha = bound * rng.gen_range(0.01..0.95);
    (n, eps, r2.sqrt(), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{area, components, superlevel_region};

    fn spec(n: usize) -> GridSpec {
        GridSpec::cylinder(n, n, -0.5, 0.5).unwrap()
    }

    #[test]
    fn embedding_is_the_inclusion() {
        let s = GridSpec::cylinder(64, 32, -0.25, 0.25).unwrap();
        let f = CylinderField::from_fn(s, |q, p| bump(p, 0.0, 0.18) * (1.0 + 0.3 * (2.0 * PI * q).sin())).unwrap();
        let g = embed_field(&f, 0.2).unwrap();
        assert_eq!(g.spec.np, 64);
        assert_eq!(f.integral(), g.integral());
        assert_eq!(g.at(5, 32), f.at(5, 16));
        for t in [0.2, 0.7] {
            let a = superlevel_region(&f, t);
            let b = superlevel_region(&g, t);
            assert_eq!(area(&a), area(&b));
            assert_eq!(
                components(&a).unwrap().components.len(),
                components(&b).unwrap().components.len()
            );
        }
        assert!(embed_field(&f, 0.1).is_err());
    }

    #[test]
    fn zeta_r_of_band_is_center_value() {
        let s = spec(128);
        let f = CylinderField::from_fn(s, |_, p| bump(p, 0.02, 0.15)).unwrap();
        let z = zeta_r(&f, 0.2, 512).unwrap();
        assert!((z - bump(0.0, 0.02, 0.15)).abs() < 2e-2, "{z}");
    }

    #[test]
    fn small_negative_disk_has_zero_zeta() {
        let s = spec(128);
        let f = CylinderField::from_fn(s, |q, p| {
            let d = periodic_diff(q, 0.3);
            -bump((d * d + p * p).sqrt(), 0.0, 0.15)
        })
        .unwrap();
        assert_eq!(zeta_r(&f, 0.2, 256).unwrap(), 0.0);
    }

    #[test]
    fn corpus_is_deterministic_and_supported() {
        let s = spec(64);
        for id in 0..8 {
            let a = corpus_field(s, 0.2, 7, id).unwrap();
            let b = corpus_field(s, 0.2, 7, id).unwrap();
            assert_eq!(a.field, b.field);
            assert!(embed_field(&a.field, 0.2).is_ok());
            assert!(!a.field.is_zero());
        }
    }

    #[test]
    fn counterexample_plateau() {
        let s = spec(256);
        let f = counterexample_field(0.3, s).unwrap();
        let a = plateau_area(&f);
        assert!(a > 0.5 && a <= 0.56, "{a}");
        assert!(embed_field(&f, 0.3).is_ok());
        assert!(counterexample_field(0.2, s).is_err());
        assert!(matches!(counterexample_field(0.26, s), Err(Error::Infeasible(_))));
    }

    #[test]
    fn gamma0_closed_form() {
        let p = solve_gamma0(2, 0.05, 0.6, 0.1).unwrap();
        assert!(p.residual.abs() <= 1e-12);
        assert!(p.signed_area.abs() <= 1e-6);
        match solve_gamma0(2, 0.05, 0.6, 0.8) {
            Err(Error::Infeasible(m)) => assert!(m.contains("0.2327")),
            other => panic!("{other:?}"),
        }
        let tiny = solve_gamma0(3, 0.2, 0.6, 1e-9).unwrap();
        assert!((tiny.rho1 * tiny.rho1 - (0.36 - 0.25)).abs() < 1e-9);
    }

    #[test]
    fn random_feasible_inputs_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (n, e, r2, a) = random_feasible_gamma0(&mut rng);
            let p = solve_gamma0(n, e, r2, a).unwrap();
            assert!(p.residual.abs() <= 1e-12 && p.rho1 > 0.0);
        }
    }
}
