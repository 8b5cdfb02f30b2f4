//! The invariant suite behind `symhom check`: each item runs one family of
//! numerical checks at a given resolution and reports its worst error.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compare::{
    corpus_field, counterexample_field, moment_pullback_check, random_feasible_gamma0,
    run_comparison, solve_gamma0, zeta_r, ExperimentConfig,
};
use crate::contour::{Openness, Region};
use crate::error::Result;
use crate::expr::{bump, periodic_diff, plateau};
use crate::field::{CylinderField, GridSpec, Profile1D};
use crate::homog::{
    c_minus_oracle, c_plus_oracle, eta_oracle, homogenize_general, hofer_asymptotic,
    RadonMeasure, DEFAULT_MOLLIFICATION,
};
use crate::numfmt::g12;
use crate::tmeasure::{
    compactify, linear_tm, quasi_integral, tau_from_qi, HatRegion, TauCalabi, TauP0,
    TopologicalMeasure,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub grid: usize,
    pub levels: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            grid: 256,
            levels: 512,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

type Check = fn(&SuiteConfig) -> Result<(bool, String)>;

pub const CHECKS: [(&str, Check); 12] = [
    ("lagrangian exactness", lagrangian),
    ("disk vanishing", disk_vanishing),
    ("annulus match for r = 0.2", forward),
    ("disk counterexample for r = 0.3", reverse),
    ("reeb path against quasi-integral", dual_path),
    ("hofer formula", hofer),
    ("quasi-integral axioms", qi_axioms),
    ("representation round trip", round_trip),
    ("calabi simplicity", simplicity),
    ("moment map pullbacks", moment),
    ("compactification", compactification),
    ("four-arc curve solver", gamma0_solver),
];

/// Run check `id` (1-based); errors count as failures.
pub fn run_one(id: usize, cfg: &SuiteConfig) -> Outcome {
    let (name, check) = CHECKS[id - 1];
    let (pass, detail) = match check(cfg) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome {
        id,
        name,
        pass,
        detail,
    }
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<Outcome> {
    (1..=CHECKS.len()).map(|id| run_one(id, cfg)).collect()
}

fn cylinder(cfg: &SuiteConfig) -> Result<GridSpec> {
    GridSpec::cylinder(cfg.grid, cfg.grid, -0.5, 0.5)
}

fn sphere(cfg: &SuiteConfig) -> Result<GridSpec> {
    GridSpec::sphere(cfg.grid, cfg.grid)
}

fn verdict(err: f64, tol: f64, what: &str) -> (bool, String) {
    (err <= tol, format!("{what} {} (tol {})", g12(err), g12(tol)))
}

fn lagrangian(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let s = cylinder(cfg)?;
    let profiles: [fn(f64) -> f64; 5] = [
        |p| bump(p, 0.0, 0.3),
        |p| -0.7 * bump(p, 0.1, 0.2),
        |p| plateau(p, -0.15, 0.1, 0.08),
        |p| bump(p, -0.15, 0.12) + 0.6 * bump(p, 0.15, 0.12),
        |p| 0.5 * bump(p, 0.05, 0.25) - 0.8 * bump(p, -0.2, 0.1),
    ];
    let mut worst: f64 = 0.0;
    for phi in profiles {
        let f = CylinderField::from_fn(s, |_, p| phi(p))?;
        let h = homogenize_general(&f, DEFAULT_MOLLIFICATION)?;
        for j in 0..s.np {
            let p = s.p_center(j);
            worst = worst.max((h.eval(p) - phi(p)).abs());
        }
    }
    Ok(verdict(worst, 1e-3 + DEFAULT_MOLLIFICATION, "max |H - phi|"))
}

fn disk_field(s: GridSpec, qc: f64, pc: f64, rad: f64, h: f64, stretch: f64) -> Result<CylinderField> {
    CylinderField::from_fn(s, move |q, p| {
        let d = periodic_diff(q, qc) * stretch;
        h * bump((d * d + (p - pc) * (p - pc)).sqrt(), 0.0, rad)
    })
}

fn disk_vanishing(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let s = cylinder(cfg)?;
    let fields = [
        disk_field(s, 0.5, 0.0, 0.2, 1.0, 1.0)?,
        disk_field(s, 0.2, 0.15, 0.1, -0.8, 1.0)?,
        disk_field(s, 0.7, -0.1, 0.3, 1.3, 1.0)?,
        disk_field(s, 0.4, 0.05, 0.25, 0.6, 2.0)?,
        disk_field(s, 0.5, 0.0, 0.2, 1.0, 1.0)?.zip_with(&disk_field(s, 0.0, 0.1, 0.12, -0.5, 1.0)?, |a, b| a + b)?,
    ];
    let mut worst: f64 = 0.0;
    for f in &fields {
        let h = homogenize_general(f, DEFAULT_MOLLIFICATION)?;
        worst = worst.max(h.max().abs()).max(h.min().abs());
    }
    Ok(verdict(worst, 5e-2, "max |H|"))
}

fn forward(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let rep = run_comparison(&ExperimentConfig::new(0.2, cfg.grid, 10, cfg.seed, cfg.levels))?;
    let worst = rep.per_field.iter().map(|g| g.gap).fold(0.0, f64::max);
    let (pass, detail) = verdict(worst, 5e-2, "max |zeta_r - eta_0|");
    Ok((pass && rep.verdict == "match", format!("{detail}, verdict {}", rep.verdict)))
}

fn reverse(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let s = cylinder(cfg)?;
    let f = counterexample_field(0.3, s)?;
    let e = crate::homog::eta(&f, 0.0)?;
    let z = zeta_r(&f, 0.3, cfg.levels)?;
    Ok((
        e.abs() <= 5e-2 && z >= 0.95,
        format!("eta_0 {} (tol 0.05), zeta_r {} (min 0.95)", g12(e), g12(z)),
    ))
}

fn corpus(cfg: &SuiteConfig) -> Result<Vec<CylinderField>> {
    let s = cylinder(cfg)?;
    (0..10)
        .map(|id| corpus_field(s, 0.2, cfg.seed, id).map(|c| c.field))
        .collect()
}

fn dual_path(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for f in corpus(cfg)? {
        let h = homogenize_general(&f, DEFAULT_MOLLIFICATION)?;
        for p0 in [-0.15, 0.0, 0.1] {
            worst = worst.max((h.eval(p0) - eta_oracle(&f, p0, cfg.levels)?).abs());
        }
    }
    Ok(verdict(worst, 5e-2, "max |eta - eta_oracle|"))
}

fn hofer(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for f in corpus(cfg)? {
        let r = hofer_asymptotic(&f)?;
        worst = worst
            .max((r.c_plus - c_plus_oracle(&f)?).abs())
            .max((r.c_minus - c_minus_oracle(&f)?).abs());
        exact &= r.norm == r.c_plus - r.c_minus;
    }
    let (pass, detail) = verdict(worst, 1e-2, "max |c - c_oracle|");
    Ok((pass && exact, format!("{detail}, norm identity {}", if exact { "exact" } else { "broken" })))
}

fn qi_axioms(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let s = cylinder(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(7);
    let mu = RadonMeasure {
        atoms: vec![(0.0, 0.5)],
        density: Some(Profile1D::new(vec![-0.2, 0.2], vec![1.0, 1.0])?),
    };
    let mass = mu.mass();
    let tol = 1e-2 + 2.0 * DEFAULT_MOLLIFICATION;
    let (mut mono, mut quasi, mut lip) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..20 {
        let f = corpus_field(s, 0.2, cfg.seed.wrapping_add(1000), k)?.field;
        let (qc, pc) = (rng.gen_range(0.0..1.0), rng.gen_range(-0.08..0.08));
        let (rad, amp) = (rng.gen_range(0.05..0.1), rng.gen_range(0.05..0.5));
        let g = f.zip_with(&disk_field(s, qc, pc, rad, amp, 1.0)?, |a, b| a + b)?;
        let hf = homogenize_general(&f, DEFAULT_MOLLIFICATION)?;
        let hg = homogenize_general(&g, DEFAULT_MOLLIFICATION)?;
        for j in 0..s.np {
            let p = s.p_center(j);
            mono = mono.max(hf.eval(p) - hg.eval(p));
        }
        let eta_mu = |h: &Profile1D| mu.integrate(|p| h.eval(p));
        let bound = mass * g.zip_with(&f, |a, b| a - b)?.sup_norm();
        lip = lip.max((eta_mu(&hf) - eta_mu(&hg)).abs() - bound);

        let a = rng.gen_range(0.5..2.0);
        let phi = move |t: f64| a * t * t.abs();
        let psi = |t: f64| (2.0 * t).sin();
        let h_sum = homogenize_general(&f.map(|t| phi(t) + psi(t))?, DEFAULT_MOLLIFICATION)?;
        let h_phi = homogenize_general(&f.map(phi)?, DEFAULT_MOLLIFICATION)?;
        let h_psi = homogenize_general(&f.map(psi)?, DEFAULT_MOLLIFICATION)?;
        for p0 in [-0.1, 0.0, 0.1] {
            quasi = quasi.max((h_sum.eval(p0) - h_phi.eval(p0) - h_psi.eval(p0)).abs());
        }
    }
    let pass = mono <= tol && lip <= tol && quasi <= 5e-2;
    Ok((
        pass,
        format!(
            "monotonicity excess {}, lipschitz excess {} (tol {}), quasi-linearity {} (tol 0.05)",
            g12(mono.max(0.0)),
            g12(lip.max(0.0)),
            g12(tol),
            g12(quasi)
        ),
    ))
}

/// Compact test regions on the cylinder, with `τ_0` values away from decisions.
pub fn cylinder_regions(s: GridSpec) -> Vec<Region> {
    let c = Openness::Compact;
    let band = |a, b| Region::band(s, a, b, c);
    let disk = |q, p, r| Region::disk(s, q, p, r, c);
    let gap = Region::from_predicate(s, c, |q, _| (q - 0.5).abs() <= 0.05);
    vec![
        band(-0.1, 0.1),
        band(0.15, 0.3),
        disk(0.5, 0.0, 0.2),
        Region::from_predicate(s, c, |q, p| (p - 0.05 * (2.0 * PI * q).sin()).abs() <= 0.08),
        band(-0.2, 0.2).difference(&disk(0.5, 0.0, 0.05)).unwrap(),
        band(0.2, 0.3).union(&disk(0.3, -0.1, 0.05)).unwrap(),
        band(-0.3, -0.05),
        band(-0.02, 0.02),
        disk(0.2, 0.0, 0.3),
        band(-0.3, -0.2).union(&band(-0.05, 0.05)).unwrap(),
        band(-0.05, 0.05).union(&disk(0.3, 0.1, 0.08)).unwrap(),
        band(-0.05, 0.05).difference(&gap).unwrap(),
    ]
}

/// Compact test regions on the sphere, all complementary areas away from 1/2.
pub fn sphere_regions(s: GridSpec) -> Vec<Region> {
    let c = Openness::Compact;
    let band = |a, b| Region::band(s, a, b, c);
    let disk = |q, p, r| Region::disk(s, q, p, r, c);
    let full = Region::full(s).with_openness(c);
    vec![
        band(0.2, 0.5),
        band(-0.2, 0.5),
        disk(0.5, 0.0, 0.25),
        full.difference(&disk(0.5, 0.1, 0.2)).unwrap(),
        band(-0.3, 0.3),
        band(0.1, 0.4),
        disk(0.2, -0.2, 0.1).union(&disk(0.7, 0.2, 0.1)).unwrap(),
        band(-0.5, -0.35).union(&band(0.35, 0.5)).unwrap(),
        band(-0.1, 0.1),
        band(-0.4, 0.4).difference(&disk(0.5, 0.0, 0.1)).unwrap(),
        band(-0.45, 0.1).difference(&band(-0.2, -0.1)).unwrap(),
        band(-0.5, 0.3).difference(&disk(0.25, -0.1, 0.05)).unwrap(),
    ]
}

fn round_trip(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let levels = cfg.levels;
    let collar = 2;
    let mut mismatches = 0;
    let mut worst_linear: f64 = 0.0;
    let mut linear_ok = true;

    let cs = cylinder(cfg)?;
    let tp = TauP0 { p0: 0.0 };
    let lin = linear_tm(cs, vec![1.0; cs.len()])?;
    for k in cylinder_regions(cs) {
        let got = tau_from_qi(|f| quasi_integral(&tp, f, levels), &k, collar)?.value;
        mismatches += (got != tp.evaluate(&k)?) as usize;
        let got = tau_from_qi(|f| quasi_integral(&lin, f, levels), &k, collar)?.value;
        let want = lin.evaluate(&k)?;
        let collar_area = collar_cells(&k, collar) as f64 * cs.cell_area();
        worst_linear = worst_linear.max((got - want).abs());
        linear_ok &= got >= want - 1e-9 && got - want <= collar_area;
    }
    let ss = sphere(cfg)?;
    for k in sphere_regions(ss) {
        let got = tau_from_qi(|f| quasi_integral(&TauCalabi, f, levels), &k, collar)?.value;
        mismatches += (got != TauCalabi.evaluate(&k)?) as usize;
    }
    Ok((
        mismatches == 0 && linear_ok,
        format!(
            "0/1 mismatches {mismatches} of 24, linear error {} within collar area: {}",
            g12(worst_linear),
            linear_ok
        ),
    ))
}

/// Cells within Chebyshev distance `h` of `k` but outside it.
fn collar_cells(k: &Region, h: usize) -> usize {
    let s = &k.spec;
    let mut count = 0;
    for c in 0..s.len() {
        if k.mask[c] {
            continue;
        }
        let (iq, ip) = s.coords(c);
        let near = (-(h as isize)..=h as isize).any(|dj| {
            let j = ip as isize + dj;
            j >= 0
                && j < s.np as isize
                && (-(h as isize)..=h as isize).any(|di| k.mask[s.idx(s.wrap_q(iq as isize + di), j as usize)])
        });
        count += near as usize;
    }
    count
}

fn simplicity(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let s = sphere(cfg)?;
    let tau = 2.0 * PI;
    let fields: [Box<dyn Fn(f64, f64) -> f64 + Sync>; 10] = [
        Box::new(|_, p| p),
        Box::new(|_, p| bump(p, 0.1, 0.3)),
        Box::new(|q, p| bump(p, 0.0, 0.4) * (1.0 + 0.4 * (tau * q).cos())),
        Box::new(|q, p| {
            let d = periodic_diff(q, 0.5);
            bump((d * d + p * p).sqrt(), 0.0, 0.3)
        }),
        Box::new(|q, p| p + 0.1 * (tau * q).sin() * (0.25 - p * p)),
        Box::new(|_, p| -bump(p, -0.1, 0.3)),
        Box::new(|q, p| (tau * q).cos() * (0.25 - p * p)),
        Box::new(|_, p| 0.5 + 0.3 * p),
        Box::new(|q, p| bump(p, 0.3, 0.15) - bump(p, -0.3, 0.15) * (1.0 + 0.2 * (tau * q).sin())),
        Box::new(|q, p| (tau * p).sin() + 0.2 * (tau * q).cos() * (0.25 - p * p)),
    ];
    let mut worst: f64 = 0.0;
    for f in &fields {
        let f = CylinderField::from_fn(s, f)?;
        let z = quasi_integral(&TauCalabi, &f, cfg.levels)?;
        let z2 = quasi_integral(&TauCalabi, &f.map(|v| v * v)?, cfg.levels)?;
        worst = worst.max((z2 - z * z).abs());
    }
    let one = quasi_integral(&TauCalabi, &CylinderField::from_fn(s, |_, _| 1.0)?, cfg.levels)?;
    let (pass, detail) = verdict(worst, 5e-2, "max |zeta(f^2) - zeta(f)^2|");
    Ok((pass && one == 1.0, format!("{detail}, zeta(1) = {}", g12(one))))
}

fn moment(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let s = cylinder(cfg)?;
    let profiles: [(fn(f64) -> f64, f64); 5] = [
        (|p| bump(p, 0.0, 0.18), 0.0),
        (|p| bump(p, 0.12, 0.06), 0.1),
        (|p| plateau(p, 0.04, 0.1, 0.08), 0.05),
        (|p| -0.8 * bump(p, -0.05, 0.12), -0.1),
        (|p| bump(p, -0.1, 0.08) + 0.5 * bump(p, 0.08, 0.1), 0.1),
    ];
    let mut worst: f64 = 0.0;
    for (g, p0) in profiles {
        let prof = Profile1D::from_fn(-0.5, 0.5, 8192, g);
        let r = moment_pullback_check(&prof, 0.2, p0, s, cfg.levels)?;
        worst = worst.max(r.eta_gap).max(r.zeta_gap);
    }
    Ok(verdict(worst, 5e-2, "max gap to g"))
}

struct Hat<'a> {
    name: &'static str,
    tm: &'a dyn TopologicalMeasure,
    o: Region,
    regions: Vec<Region>,
}

fn compactification(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let cs = cylinder(cfg)?;
    let ss = sphere(cfg)?;
    let (op, cp) = (Openness::Open, Openness::Compact);
    let tp = TauP0 { p0: 0.0 };
    // dyadic density values keep every sum exact
    let lin = linear_tm(
        cs,
        (0..cs.len())
            .map(|c| [0.5, 1.0, 1.25, 2.0][c % 4])
            .collect(),
    )?;
    let cyl_regions = |o: Openness| {
        vec![
            Region::band(cs, -0.1, 0.1, o),
            Region::band(cs, 0.1, 0.2, o),
            Region::disk(cs, 0.5, 0.0, 0.15, o),
            Region::band(cs, -0.25, 0.25, o),
            Region::band(cs, -0.05, 0.05, o).union(&Region::disk(cs, 0.2, -0.2, 0.05, o)).unwrap(),
        ]
    };
    let sph_regions = |o: Openness| {
        vec![
            Region::band(ss, -0.1, 0.1, o),
            Region::band(ss, 0.05, 0.3, o),
            Region::disk(ss, 0.5, 0.0, 0.2, o),
            Region::band(ss, -0.3, 0.3, o),
            Region::band(ss, -0.3, 0.3, o).difference(&Region::disk(ss, 0.2, 0.0, 0.1, o)).unwrap().with_openness(o),
        ]
    };
    let both = |f: &dyn Fn(Openness) -> Vec<Region>| {
        let mut v = f(cp);
        v.extend(f(op));
        v
    };
    let setups = [
        Hat { name: "tau_p0", tm: &tp, o: Region::band(cs, -0.35, 0.35, op), regions: both(&cyl_regions) },
        Hat { name: "linear", tm: &lin, o: Region::band(cs, -0.35, 0.35, op), regions: both(&cyl_regions) },
        Hat { name: "tau_calabi", tm: &TauCalabi, o: Region::band(ss, -0.4, 0.4, op), regions: both(&sph_regions) },
    ];
    let mut failures = Vec::new();
    let mut checks = 0;
    for h in &setups {
        let hat = compactify(h.tm, &h.o)?;
        let whole = hat.evaluate(&HatRegion::Whole)?;
        checks += 1;
        if whole != h.tm.evaluate(&h.o)? {
            failures.push(format!("{} whole", h.name));
        }
        for (i, r) in h.regions.iter().enumerate() {
            let inside = hat.evaluate(&HatRegion::Inside(r.clone()))?;
            let mut ok = inside == h.tm.evaluate(r)?;
            if r.openness == Openness::Open {
                let at_inf = hat.evaluate(&HatRegion::AtInfinityFromOpen(r.clone()))?;
                ok &= at_inf == whole - h.tm.evaluate(r)?;
                ok &= at_inf + inside == whole;
            } else {
                let at_inf = hat.evaluate(&HatRegion::AtInfinityFromCompact(r.clone()))?;
                ok &= at_inf == h.tm.evaluate(&h.o.difference(r)?.with_openness(op))?;
                ok &= inside + at_inf == whole;
            }
            checks += 1;
            if !ok {
                failures.push(format!("{} region {i}", h.name));
            }
        }
    }
    Ok((
        failures.is_empty(),
        if failures.is_empty() {
            format!("{checks} region classes exact")
        } else {
            format!("failed: {}", failures.join(", "))
        },
    ))
}

fn gamma0_solver(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(12);
    let (mut res, mut area): (f64, f64) = (0.0, 0.0);
    let mut constraints = true;
    for _ in 0..20 {
        let (n, eps, rho2, alpha) = random_feasible_gamma0(&mut rng);
        let p = solve_gamma0(n, eps, rho2, alpha)?;
        let c = 1.0 / (n as f64 + 1.0);
        res = res.max(p.residual.abs());
        area = area.max(p.signed_area.abs());
        constraints &= c < p.rho2 * p.rho2
            && p.rho2 * p.rho2 < c + p.epsilon
            && p.alpha < 0.5 * PI
            && p.rho1 > 0.0
            && p.rho1 < p.rho2;
    }
    Ok((
        res <= 1e-12 && area <= 1e-6 && constraints,
        format!(
            "max residual {}, max signed area {}, constraints {}",
            g12(res),
            g12(area),
            if constraints { "hold" } else { "violated" }
        ),
    ))
}
