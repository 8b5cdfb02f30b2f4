//! Homogenized profiles and the spectral quantities read off them.

use serde::Serialize;

use crate::contour::{label_components, superlevel_region, Connectivity};
use crate::error::{Error, Result};
use crate::field::{check_nice, CylinderField, Profile1D, Space};
use crate::reeb::{build_reeb_unchecked, gamma0, label_path, LabeledPath, NodeKind};
use crate::tmeasure::{quasi_integral, TauP0};

/// Default size of the perturbation applied before homogenizing a general field.
pub const DEFAULT_MOLLIFICATION: f64 = 1e-3;

/// Samples per path edge used to verify labels.
const LABEL_SAMPLES: usize = 8;

/// `H(p)`: a profile in `p`, zero outside the support band.
pub type HomogenizedProfile = Profile1D;

fn profile_from_path(f: &CylinderField, lp: &LabeledPath) -> Result<HomogenizedProfile> {
    let spec = f.spec;
    let (lo, hi) = lp.support;
    let mut pts: Vec<(f64, f64)> = vec![(spec.p_min, 0.0), (spec.p_max, 0.0), (lo, 0.0), (hi, 0.0)];
    for j in 0..spec.np {
        let p = spec.p_center(j);
        if p > lo && p < hi {
            pts.push((p, lp.value_at(p)));
        }
    }
    for n in &lp.nodes {
        if n.kind == NodeKind::Saddle {
            for p in [n.label.lo, n.label.hi] {
                if p.is_finite() && p > lo && p < hi {
                    pts.push((p, n.f_value));
                }
            }
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (p, values) = pts.into_iter().unzip();
    Profile1D::new(p, values)
}

fn zero_profile(f: &CylinderField) -> HomogenizedProfile {
    Profile1D::new(vec![f.spec.p_min, f.spec.p_max], vec![0.0, 0.0]).expect("two samples")
}

fn require_cylinder(f: &CylinderField) -> Result<()> {
    if f.spec.space != Space::Cylinder {
        return Err(Error::Invalid("homogenization needs a cylinder field".into()));
    }
    Ok(())
}

/// Homogenization of a nice field through the labelled path of its Reeb graph.
pub fn homogenize(f: &CylinderField) -> Result<HomogenizedProfile> {
    require_cylinder(f)?;
    if f.is_zero() {
        return Err(Error::ZeroField);
    }
    let report = check_nice(f, 1e-12)?;
    if !report.is_nice {
        return Err(Error::NotNice(report.violations.join("; ")));
    }
    homogenize_unchecked(f)
}

fn homogenize_unchecked(f: &CylinderField) -> Result<HomogenizedProfile> {
    let g = build_reeb_unchecked(f)?;
    let path = gamma0(&g)?;
    let lp = label_path(&g, &path, f, LABEL_SAMPLES)?;
    profile_from_path(f, &lp)
}

/// Deterministic perturbation of size at most `eps` that makes `f` nice.
///
/// It adds a positive sine arch over the support band widened by three rows on
/// each side, plus a q-dependent wobble that vanishes on the two outer rows of
/// each side so the collars stay q-independent and regular.
pub fn perturb_to_nice(f: &CylinderField, eps: f64) -> Result<CylinderField> {
    let spec = f.spec;
    let (j_lo, j_hi) = f.row_band().unwrap_or((spec.np / 2, spec.np / 2));
    if j_lo < 4 || j_hi + 4 >= spec.np {
        return Err(Error::Resolution(
            "support too close to the grid edge to perturb; add zero rows".into(),
        ));
    }
    let (e_lo, e_hi) = (j_lo - 3, j_hi + 3);
    let (a, b) = (spec.p_edge(e_lo), spec.p_edge(e_hi + 1));
    let w = |j: usize| (std::f64::consts::PI * (spec.p_center(j) - a) / (b - a)).sin();
    let mut c = vec![0.0; spec.np];
    for cj in c.iter_mut().take(j_hi + 1).skip(j_lo) {
        *cj = 1.0;
    }
    c[e_lo + 2] = 0.75 * (w(e_lo + 2) - w(e_lo + 1));
    c[e_hi - 2] = 0.75 * (w(e_hi - 2) - w(e_hi - 1));
    let tau = 2.0 * std::f64::consts::PI;
    let mut values = f.values.clone();
    for iq in 0..spec.nq {
        let q = spec.q_center(iq);
        for j in e_lo..=e_hi {
            let p = spec.p_center(j);
            let wobble = 0.25 * (tau * (q - 0.137)).cos() + 0.15 * (tau * (2.0 * q + 0.31) + 5.0 * p).sin();
            values[spec.idx(iq, j)] += eps * (0.6 * w(j) + c[j] * wobble);
        }
    }
    CylinderField::new(spec, values)
}

/// Homogenization of an arbitrary field: a perturbation of size `mollification`
/// makes it nice first, which moves the profile by at most that much in sup norm.
/// A zero mollification requires `f` to be nice already.
pub fn homogenize_general(f: &CylinderField, mollification: f64) -> Result<HomogenizedProfile> {
    require_cylinder(f)?;
    if f.is_zero() {
        return Ok(zero_profile(f));
    }
    if mollification == 0.0 {
        return homogenize(f);
    }
    if !(mollification > 0.0 && mollification.is_finite()) {
        return Err(Error::Invalid("mollification must be positive".into()));
    }
    let g = perturb_to_nice(f, mollification)?;
    let report = check_nice(&g, 1e-12)?;
    if !report.is_nice {
        return Err(Error::NotNice(format!(
            "perturbed field is still degenerate: {}",
            report.violations.join("; ")
        )));
    }
    homogenize_unchecked(&g)
}

/// `η_{p0}(f) = H(p0)`.
pub fn eta(f: &CylinderField, p0: f64) -> Result<f64> {
    Ok(homogenize_general(f, DEFAULT_MOLLIFICATION)?.eval(p0))
}

/// `η_{p0}` computed independently as the quasi-integral against `τ_{p0}`.
pub fn eta_oracle(f: &CylinderField, p0: f64, n_levels: usize) -> Result<f64> {
    require_cylinder(f)?;
    quasi_integral(&TauP0 { p0 }, f, n_levels)
}

/// A finite measure on the line: atoms plus an optional density.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadonMeasure {
    pub atoms: Vec<(f64, f64)>,
    pub density: Option<Profile1D>,
}

impl RadonMeasure {
    pub fn dirac(p0: f64) -> Self {
        RadonMeasure {
            atoms: vec![(p0, 1.0)],
            density: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad_atom = self.atoms.iter().any(|&(p, w)| !p.is_finite() || !(w >= 0.0));
        let bad_density = self
            .density
            .as_ref()
            .is_some_and(|d| d.values.iter().any(|&v| !(v >= 0.0)) || !(d.outside == 0.0));
        if bad_atom || bad_density {
            return Err(Error::Invalid("measure must be nonnegative and finite".into()));
        }
        Ok(())
    }

    /// `∫ g dμ`, the density part by composite midpoint on its samples.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let mut s: f64 = self.atoms.iter().map(|&(p, w)| w * g(p)).sum();
        if let Some(d) = &self.density {
            const SUB: usize = 16;
            for w in d.p.windows(2) {
                let h = (w[1] - w[0]) / SUB as f64;
                for k in 0..SUB {
                    let x = w[0] + (k as f64 + 0.5) * h;
                    s += d.eval(x) * g(x) * h;
                }
            }
        }
        s
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }
}

/// `η_μ(f) = ∫ H dμ`.
pub fn eta_mu(f: &CylinderField, mu: &RadonMeasure) -> Result<f64> {
    mu.validate()?;
    let h = homogenize_general(f, DEFAULT_MOLLIFICATION)?;
    Ok(mu.integrate(|p| h.eval(p)))
}

pub fn c_plus(f: &CylinderField) -> Result<f64> {
    Ok(homogenize_general(f, DEFAULT_MOLLIFICATION)?.max())
}

pub fn c_minus(f: &CylinderField) -> Result<f64> {
    Ok(homogenize_general(f, DEFAULT_MOLLIFICATION)?.min())
}

/// Largest `t >= 0` for which some component of `{f >= t}` goes around the
/// cylinder, found by bisection to `(max f - min f) / 2^14`.
pub fn c_plus_oracle(f: &CylinderField) -> Result<f64> {
    require_cylinder(f)?;
    let top = f.max();
    if top <= 0.0 {
        return Ok(0.0);
    }
    let wraps = |t: f64| {
        let r = superlevel_region(f, t);
        let lab = label_components(&f.spec, &r.mask, Connectivity::Four, false, false);
        lab.wraps.iter().any(|&w| w)
    };
    if wraps(top) {
        return Ok(top);
    }
    let tol = (top - f.min()) / 16384.0;
    let (mut lo, mut hi) = (0.0, top);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if wraps(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `c_-` computed as `-c_+(-f)` through the oracle.
pub fn c_minus_oracle(f: &CylinderField) -> Result<f64> {
    Ok(-c_plus_oracle(&f.negate())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoferReport {
    pub c_plus: f64,
    pub c_minus: f64,
    /// `c_+ - c_-`, the asymptotic Hofer norm of the flow of `f`.
    pub norm: f64,
}

pub fn hofer_asymptotic(f: &CylinderField) -> Result<HoferReport> {
    let h = homogenize_general(f, DEFAULT_MOLLIFICATION)?;
    let (c_plus, c_minus) = (h.max(), h.min());
    Ok(HoferReport {
        c_plus,
        c_minus,
        norm: c_plus - c_minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{bump, plateau};
    use crate::field::GridSpec;
    use std::f64::consts::PI;

    fn spec(n: usize) -> GridSpec {
        GridSpec::cylinder(n, n, -0.5, 0.5).unwrap()
    }

    #[test]
    fn q_independent_field_homogenizes_to_itself() {
        let s = spec(128);
        let f = CylinderField::from_fn(s, |_, p| bump(p, 0.05, 0.25)).unwrap();
        let h = homogenize_general(&f, 1e-4).unwrap();
        for j in 0..s.np {
            let p = s.p_center(j);
            assert!((h.eval(p) - bump(p, 0.05, 0.25)).abs() < 2e-3, "p={p}");
        }
    }

    #[test]
    fn disk_bump_homogenizes_to_zero() {
        let s = spec(128);
        let f = CylinderField::from_fn(s, |q, p| {
            let d = crate::expr::periodic_diff(q, 0.5);
            bump((d * d + p * p).sqrt(), 0.0, 0.2)
        })
        .unwrap();
        let h = homogenize_general(&f, 1e-4).unwrap();
        assert!(h.max().abs() < 2e-3 && h.min().abs() < 2e-3, "{} {}", h.max(), h.min());
    }

    #[test]
    fn modulated_band_matches_oracle() {
        let s = spec(128);
        let f = CylinderField::from_fn(s, |q, p| {
            plateau(p, -0.2, 0.2, 0.08) * (0.8 + 0.3 * (2.0 * PI * q).cos())
        })
        .unwrap();
        let h = homogenize_general(&f, 1e-4).unwrap();
        for p0 in [-0.15, 0.0, 0.1] {
            let o = eta_oracle(&f, p0, 512).unwrap();
            assert!((h.eval(p0) - o).abs() < 1e-2, "p0={p0}: {} vs {o}", h.eval(p0));
        }
        let cp = c_plus_oracle(&f).unwrap();
        assert!((h.max() - cp).abs() < 1e-2, "{} {cp}", h.max());
    }

    #[test]
    fn zero_field() {
        let f = CylinderField::zeros(spec(32));
        assert_eq!(homogenize_general(&f, 1e-3).unwrap().max(), 0.0);
        assert!(matches!(homogenize(&f), Err(Error::ZeroField)));
        assert_eq!(c_plus_oracle(&f).unwrap(), 0.0);
    }

    #[test]
    fn radon_measure_integration() {
        let mu = RadonMeasure {
            atoms: vec![(0.1, 0.5)],
            density: Some(Profile1D::new(vec![-0.5, 0.5], vec![1.0, 1.0]).unwrap()),
        };
        assert!((mu.mass() - 1.5).abs() < 1e-12);
        assert!((mu.integrate(|p| p) - 0.05).abs() < 1e-12);
        let bad = RadonMeasure {
            atoms: vec![(0.0, -1.0)],
            density: None,
        };
        assert!(bad.validate().is_err());
    }
}
