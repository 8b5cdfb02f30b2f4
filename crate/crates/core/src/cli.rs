//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::compare::{run_comparison, solve_gamma0, ExperimentConfig};
use crate::contour::RegionFile;
use crate::error::{Error, Result};
use crate::expr::parse_expression;
use crate::field::{sample_field, CylinderField, FieldFile, GridSpec};
use crate::homog::{eta, eta_oracle, homogenize_general, hofer_asymptotic, DEFAULT_MOLLIFICATION};
use crate::numfmt::{g12, round12};
use crate::reeb::{build_reeb, export_dot, gamma0, label_path};
use crate::suite::{run_all, SuiteConfig};
use crate::tmeasure::{quasi_integral_report, MeasureSpec};

#[derive(Debug, Parser)]
#[command(name = "symhom", version, about = "Symplectic homogenization and quasi-integrals on the cylinder")]
pub struct Cli {
    /// Worker threads for parallel quadrature; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homogenized profile H(f) as CSV or JSON.
    Homog {
        #[command(flatten)]
        input: FieldInput,
        /// Size of the perturbation that makes the field nice.
        #[arg(long, default_value_t = DEFAULT_MOLLIFICATION)]
        mollification: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// eta_{p0}(f) from the Reeb graph and from the quasi-integral.
    Eta {
        #[command(flatten)]
        input: FieldInput,
        #[arg(long)]
        p0: f64,
        #[arg(long, default_value_t = 512)]
        levels: usize,
    },
    /// c_+, c_- and the asymptotic Hofer norm.
    Hofer {
        #[command(flatten)]
        input: FieldInput,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Reeb graph as DOT, or the labelled path between the ends as JSON.
    Reeb {
        #[command(flatten)]
        input: FieldInput,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a topological measure on a region file.
    Measure {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long)]
        region: PathBuf,
    },
    /// Quasi-integral of a field against a topological measure.
    Qintegral {
        #[command(flatten)]
        input: FieldInput,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 512)]
        levels: usize,
    },
    /// Compare zeta_r with eta_0 on a seeded corpus.
    Compare {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 10)]
        corpus: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 512)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the area balance of the four-arc curve for rho1.
    Gamma0 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        rho2: f64,
        #[arg(long)]
        alpha: f64,
    },
    /// Run the invariant suite and print one line per check.
    Check {
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, default_value_t = 256)]
        levels: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Cylinder,
    Sphere,
}

#[derive(Debug, Args)]
pub struct FieldInput {
    /// Field file (JSON with nq, np, p_min, p_max, space, values).
    #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
    pub field: Option<PathBuf>,
    /// Expression in q and p sampled on the grid.
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = SpaceArg::Cylinder)]
    pub space: SpaceArg,
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub p_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    TauP0,
    TauCalabi,
    Linear,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, allow_negative_numbers = true)]
    pub p0: Option<f64>,
    /// Density expression for the linear measure.
    #[arg(long, default_value = "1")]
    pub density: String,
}

impl MeasureArgs {
    fn spec(&self) -> Result<MeasureSpec> {
        Ok(match self.kind {
            Kind::TauP0 => MeasureSpec::TauP0 {
                p0: self
                    .p0
                    .ok_or_else(|| Error::Invalid("--kind tau-p0 needs --p0".into()))?,
            },
            Kind::TauCalabi => MeasureSpec::TauCalabi,
            Kind::Linear => MeasureSpec::Linear {
                density: self.density.clone(),
            },
        })
    }
}

impl FieldInput {
    fn load(&self) -> Result<CylinderField> {
        if let Some(path) = &self.field {
            let file: FieldFile = serde_json::from_str(&fs::read_to_string(path)?)?;
            return file.into_field();
        }
        let text = self.expr.as_deref().unwrap_or_default();
        let expr = parse_expression(text)?;
        let spec = match self.space {
            SpaceArg::Cylinder => GridSpec::cylinder(self.grid, self.grid, self.p_min, self.p_max)?,
            SpaceArg::Sphere => GridSpec::sphere(self.grid, self.grid)?,
        };
        sample_field(&expr, spec)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_text(v: &impl serde::Serialize) -> Result<String> {
    let mut v = serde_json::to_value(v)?;
    round_json(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Round every float in a JSON tree to 12 significant digits.
fn round_json(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round12(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn execute(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Homog {
            input,
            mollification,
            format,
            out,
        } => {
            let f = input.load()?;
            let h = homogenize_general(&f, *mollification)?;
            let text = match format {
                Format::Json => json_text(&h)?,
                _ => h.to_csv(),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Eta { input, p0, levels } => {
            let f = input.load()?;
            let a = eta(&f, *p0)?;
            let b = eta_oracle(&f, *p0, *levels)?;
            println!("eta {}", g12(a));
            println!("eta_oracle {}", g12(b));
            println!("difference {}", g12((a - b).abs()));
        }
        Command::Hofer { input, format } => {
            let r = hofer_asymptotic(&input.load()?)?;
            if *format == Format::Json {
                print!("{}", json_text(&serde_json::json!({
                    "c_plus": r.c_plus,
                    "c_minus": r.c_minus,
                    "mu_inf": r.norm,
                    "gamma_inf": r.norm,
                }))?);
            } else {
                println!("c_plus {}", g12(r.c_plus));
                println!("c_minus {}", g12(r.c_minus));
                println!("mu_inf {}", g12(r.norm));
                println!("gamma_inf {}", g12(r.norm));
            }
        }
        Command::Reeb { input, format, out } => {
            let f = input.load()?;
            let g = build_reeb(&f)?;
            let text = match format {
                Format::Json => {
                    let path = gamma0(&g)?;
                    let lp = label_path(&g, &path, &f, 8)?;
                    serde_json::to_string_pretty(&lp.to_json())? + "\n"
                }
                _ => export_dot(&g),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Measure { measure, region } => {
            let file: RegionFile = serde_json::from_str(&fs::read_to_string(region)?)?;
            let r = file.into_region()?;
            let tm = measure.spec()?.build(r.spec)?;
            println!("{}", g12(tm.evaluate(&r)?));
        }
        Command::Qintegral {
            input,
            measure,
            levels,
        } => {
            let f = input.load()?;
            let tm = measure.spec()?.build(f.spec)?;
            let r = quasi_integral_report(tm.as_ref(), &f, *levels)?;
            println!("value {}", g12(r.value));
            println!("ambiguous_strata {}", r.ambiguous_strata);
        }
        Command::Compare {
            r,
            corpus,
            seed,
            grid,
            levels,
            out,
        } => {
            let cfg = ExperimentConfig::new(*r, *grid, *corpus, *seed, *levels);
            let rep = run_comparison(&cfg)?;
            let text = json_text(&rep)?;
            match out {
                Some(p) => {
                    fs::write(p, &text)?;
                    println!("verdict {}", rep.verdict);
                }
                None => print!("{text}"),
            }
        }
        Command::Gamma0 { n, eps, rho2, alpha } => {
            let p = solve_gamma0(*n, *eps, *rho2, *alpha)?;
            print!("{}", json_text(&p)?);
        }
        Command::Check {
            grid,
            levels,
            seed,
            out,
        } => {
            let cfg = SuiteConfig {
                grid: *grid,
                levels: *levels,
                seed: *seed,
            };
            let outcomes = run_all(&cfg);
            let mut text = String::new();
            for o in &outcomes {
                text.push_str(&o.line());
                text.push('\n');
            }
            let failed = outcomes.iter().filter(|o| !o.pass).count();
            text.push_str(&format!(
                "{} of {} checks passed\n",
                outcomes.len() - failed,
                outcomes.len()
            ));
            emit(out.as_deref(), &text)?;
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    }
    Ok(0)
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Error::Invalid("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Invalid(e.to_string()))
            .and_then(|pool| pool.install(|| execute(&cli.command))),
        None => execute(&cli.command),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
