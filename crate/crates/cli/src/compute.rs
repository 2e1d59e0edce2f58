use std::path::{Path, PathBuf};

use bergman_hankel::analytic::kernel;
use bergman_hankel::hankelnorm::{
    default_test_grid, dual_norm_with, form_norm_22, form_norm_pq, hankel_measure_detector, AscentOptions, DualKind,
    HankelFormSpec, POWER_TOL,
};
use bergman_hankel::io::{parse_measure, parse_polynomial, parse_weight};
use bergman_hankel::norms::{bergman_norm_with_error, bloch_norm, garsia_bmo, QuadratureSpec};
use bergman_hankel::weights::{default_doubling_grid, doubling_report};
use bergman_hankel::{ComplexMeasure, RadialWeight, TaylorSeries, C64};
use clap::Subcommand;

use crate::CliError;

#[derive(Subcommand, Debug)]
pub enum Op {
    /// Tail ω̂(ρ) of a weight
    Tail {
        #[arg(long)]
        weight: String,
        #[arg(long)]
        rho: f64,
    },
    /// Moment ω_x = ∫ r^x ω(r) dr
    Moment {
        #[arg(long)]
        weight: String,
        #[arg(long)]
        x: f64,
    },
    /// Reproducing kernel B_a evaluated at z (default z = a)
    Kernel {
        #[arg(long)]
        weight: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        z: Option<String>,
        #[arg(long, default_value_t = 256)]
        trunc: usize,
        /// Write the Taylor coefficients here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Weighted Bergman norm of a polynomial
    BergmanNorm {
        #[arg(long)]
        f: String,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        p: f64,
    },
    /// Bloch norm |f(0)| + sup (1-|z|²)|f'(z)|
    Bloch {
        #[arg(long)]
        f: String,
    },
    /// Garsia-type BMOA norm
    Garsia {
        #[arg(long)]
        f: String,
    },
    /// Norm estimate of the Hankel form with symbol mu
    FormNorm {
        /// Measure file, or inline lines separated by `;`
        #[arg(long)]
        mu: String,
        #[arg(long, default_value = "const")]
        weight: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 32)]
        trunc: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dual-side norm of the projection of conj(mu)
    DualNorm {
        #[arg(long)]
        mu: String,
        #[arg(long, default_value = "const")]
        weight: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 32)]
        trunc: usize,
        /// Use the Bloch norm instead of the case-dictated space
        #[arg(long)]
        bloch: bool,
    },
    /// Hankel-measure test for 0 < p <= 2
    Detector {
        #[arg(long)]
        mu: String,
        #[arg(long, default_value = "const")]
        weight: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Doubling classification and tail curve
    Doubling {
        #[arg(long)]
        weight: String,
        /// Write rho,tail rows here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

pub struct Computed {
    pub value: String,
    pub provenance: String,
}

fn weight(s: &str) -> Result<RadialWeight, CliError> {
    parse_weight(s, Path::new(".")).map_err(|e| CliError::Usage(format!("--weight {s}: {e}")))
}

fn poly(s: &str) -> Result<TaylorSeries, CliError> {
    parse_polynomial(s).map_err(|e| CliError::Usage(format!("--f {s}: {e}")))
}

fn point(s: &str) -> Result<C64, CliError> {
    let p = parse_polynomial(s).map_err(|e| CliError::Usage(format!("{s}: {e}")))?;
    if p.trim().degree() > 0 {
        return Err(CliError::Usage(format!("`{s}` is not a complex number")));
    }
    Ok(p.coeff(0))
}

fn measure(s: &str) -> Result<ComplexMeasure, CliError> {
    let path = Path::new(s);
    let parsed = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{s}: {e}")))?;
        parse_measure(&text, path.parent().unwrap_or(Path::new(".")))
    } else {
        parse_measure(&s.replace(';', "\n"), Path::new("."))
    };
    parsed.map_err(|e| CliError::Usage(format!("--mu: {e}")))
}

fn fmt_c(z: C64) -> String {
    format!("{:?}{:+?}i", z.re, z.im)
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<(), CliError> {
    let mut text = format!("{header}\n");
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| CliError::Run(format!("{}: {e}", path.display())))
}

pub fn run(op: &Op) -> Result<Computed, CliError> {
    let sup_note = |n: usize| {
        let g = QuadratureSpec::default().sup_grid;
        format!("degree={n} grid={}x{} polish=golden-section", g.radii.len(), g.angles)
    };
    Ok(match op {
        Op::Tail { weight: w, rho } => {
            let w = weight(w)?;
            let how = if w.has_closed_form_tail() {
                "closed form"
            } else {
                "adaptive quadrature"
            };
            Computed {
                value: format!("{:?}", w.tail(*rho)?),
                provenance: format!("weight={} method={how}", w.descriptor()),
            }
        }
        Op::Moment { weight: w, x } => {
            let w = weight(w)?;
            Computed {
                value: format!("{:?}", w.moment(*x)?),
                provenance: format!("weight={}", w.descriptor()),
            }
        }
        Op::Kernel {
            weight: w,
            a,
            z,
            trunc,
            csv,
        } => {
            let w = weight(w)?;
            let a = point(a)?;
            let z = z.as_deref().map(point).transpose()?.unwrap_or(a);
            let k = kernel(&w, a, *trunc)?;
            if let Some(path) = csv {
                std::fs::write(path, k.to_csv_string())
                    .map_err(|e| CliError::Run(format!("{}: {e}", path.display())))?;
            }
            let tail = k.coeff(*trunc).norm();
            Computed {
                value: fmt_c(k.evaluate(z)),
                provenance: format!("weight={} truncation={trunc} last-coefficient={tail:e}", w.descriptor()),
            }
        }
        Op::BergmanNorm { f, weight: w, p } => {
            let (f, w) = (poly(f)?, weight(w)?);
            let (v, err) = bergman_norm_with_error(&f, &w, *p, &QuadratureSpec::default())?;
            Computed {
                value: format!("{v:?}"),
                provenance: format!(
                    "weight={} degree={} quadrature-error={err:e}",
                    w.descriptor(),
                    f.degree()
                ),
            }
        }
        Op::Bloch { f } => {
            let f = poly(f)?;
            let r = bloch_norm(&f, &QuadratureSpec::default());
            Computed {
                value: format!("{:?}", r.value),
                provenance: format!("{} argmax={}", sup_note(f.degree()), fmt_c(r.argmax)),
            }
        }
        Op::Garsia { f } => {
            let f = poly(f)?;
            let r = garsia_bmo(&f, &QuadratureSpec::default());
            Computed {
                value: format!("{:?}", r.value),
                provenance: format!("{} argmax={}", sup_note(f.degree()), fmt_c(r.argmax)),
            }
        }
        Op::FormNorm {
            mu,
            weight: w,
            p,
            q,
            trunc,
            seed,
        } => {
            let spec = HankelFormSpec::new(measure(mu)?, weight(w)?, *p, *q)?;
            let est = if *p == 2.0 && *q == 2.0 {
                form_norm_22(&spec, *trunc)?
            } else {
                let ascent = AscentOptions {
                    seed: *seed,
                    ..AscentOptions::default()
                };
                form_norm_pq(&spec, *trunc, &ascent, &QuadratureSpec::default())?
            };
            Computed {
                value: format!("{:?}", est.value),
                provenance: format!(
                    "case={} kind={:?} truncation={trunc} iterations={} power-tolerance={POWER_TOL:e}",
                    spec.case, est.kind, est.iterations
                ),
            }
        }
        Op::DualNorm {
            mu,
            weight: w,
            p,
            q,
            trunc,
            bloch,
        } => {
            let spec = HankelFormSpec::new(measure(mu)?, weight(w)?, *p, *q)?;
            let kind = if *bloch { DualKind::Bloch } else { DualKind::Theorem };
            let v = dual_norm_with(&spec, *trunc, kind, &QuadratureSpec::default())?;
            Computed {
                value: format!("{v:?}"),
                provenance: format!("case={} dual={kind:?} truncation={trunc}", spec.case),
            }
        }
        Op::Detector { mu, weight: w, p, beta } => {
            let w = weight(w)?;
            let t = hankel_measure_detector(&measure(mu)?, &w, *p, *beta, &default_test_grid())?;
            Computed {
                value: format!("{:?}", t.value),
                provenance: format!(
                    "divergent={} argmax={} weight={}",
                    t.divergent,
                    fmt_c(t.argmax),
                    w.descriptor()
                ),
            }
        }
        Op::Doubling { weight: w, csv } => {
            let w = weight(w)?;
            let grid = default_doubling_grid(50);
            let rep = doubling_report(&w, &[2.0, 4.0], &grid)?;
            if let Some(path) = csv {
                let rows = grid
                    .iter()
                    .map(|&r| w.tail(r).map(|t| format!("{r:?},{t:?}")))
                    .collect::<Result<Vec<_>, _>>()?;
                write_csv(path, "rho,tail", rows.into_iter())?;
            }
            Computed {
                value: format!("upper={} lower={}", rep.is_upper, rep.is_lower),
                provenance: format!(
                    "weight={} upper-constant={:?} growth-exponent={:?} grid-points={}",
                    w.descriptor(),
                    rep.upper_constant,
                    rep.growth_exponent_gamma,
                    grid.len()
                ),
            }
        }
    })
}
