use bergman_hankel::analytic::kernel;
use bergman_hankel::hankelnorm::{
    hankel_measure_detector, standard_criterion, theorem1_ratio_experiment, theorem2_ratio_experiment,
    ExperimentOptions, RatioTable,
};
use bergman_hankel::measures::project;
use bergman_hankel::norms::{
    default_radii, inner_product, kernel_norm_comparison, pairing_omega_omega, QuadratureSpec, SupGrid,
};
use bergman_hankel::operators::{d_lower, d_upper, frac_r};
use bergman_hankel::{RadialWeight, TaylorSeries, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::scenario::ScenarioConfig;
use crate::CliError;

pub const SUITES: &[&str] = &[
    "identities",
    "duality",
    "kernel-norms",
    "theorem1",
    "theorem2",
    "hankel-measure",
    "standard-criterion",
];

pub struct SuiteReport {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// One object per verdict, keys in output order.
    pub verdicts: Vec<Map<String, Value>>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(header: &[&'static str]) -> Self {
        SuiteReport {
            header: header.to_vec(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            pass: true,
        }
    }

    fn verdict(&mut self, pass: bool, fields: Value) {
        let mut m = match fields {
            Value::Object(m) => m,
            _ => unreachable!("verdict fields are an object"),
        };
        m.insert("verdict".into(), Value::from(if pass { "pass" } else { "fail" }));
        self.pass &= pass;
        self.verdicts.push(m);
    }
}

pub fn run(name: &str, cfg: &ScenarioConfig) -> Result<SuiteReport, CliError> {
    match name {
        "identities" => identities(cfg),
        "duality" => duality(cfg),
        "kernel-norms" => kernel_norms(cfg),
        "theorem1" => ratio_suite(cfg, false),
        "theorem2" => ratio_suite(cfg, true),
        "hankel-measure" => hankel_measure(cfg),
        "standard-criterion" => criterion(cfg),
        other => Err(CliError::Usage(format!(
            "unknown suite `{other}`; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn random_poly(r: &mut ChaCha8Rng, deg: usize) -> TaylorSeries {
    TaylorSeries::new(
        (0..=deg)
            .map(|_| C64::new(r.random::<f64>() * 2.0 - 1.0, r.random::<f64>() * 2.0 - 1.0))
            .collect(),
    )
}

/// Coefficientwise relative error; coefficients too small to carry a
/// relative error (below `1e-280` of the largest) are compared absolutely
/// against that scale.
fn coeff_rel(a: &TaylorSeries, b: &TaylorSeries) -> f64 {
    let scale = b.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let n = a.coeffs().len().max(b.coeffs().len());
    (0..n)
        .map(|k| {
            let d = (a.coeff(k) - b.coeff(k)).norm();
            d / b.coeff(k).norm().max(1e-280 * scale).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

const IDENTITY_TOL: f64 = 1e-13;

fn identities(cfg: &ScenarioConfig) -> Result<SuiteReport, CliError> {
    let mut rep = SuiteReport::new(&["identity", "omega", "nu", "max_rel_error"]);
    let n = cfg.identity_trunc;
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f = random_poly(&mut r, n);
    let a = C64::from_polar(
        0.9 * r.random::<f64>().sqrt(),
        std::f64::consts::TAU * r.random::<f64>(),
    );
    let mut worst: Vec<(&str, f64)> = ["inverse", "composition", "kernel", "projection", "d_upper"]
        .iter()
        .map(|&k| (k, 0.0))
        .collect();
    let mut bump = |rep: &mut SuiteReport, id: usize, w: &RadialWeight, v: Option<&RadialWeight>, e: f64| {
        worst[id].1 = worst[id].1.max(e);
        rep.rows.push(vec![
            worst[id].0.to_string(),
            w.descriptor(),
            v.map(RadialWeight::descriptor).unwrap_or_default(),
            num(e),
        ]);
    };
    for w in &cfg.identity_weights {
        for v in &cfg.identity_weights {
            let rf = frac_r(w, v, &f);
            bump(&mut rep, 0, w, Some(v), coeff_rel(&frac_r(v, w, &rf), &f));
            let e = coeff_rel(&d_upper(v, &d_lower(w, &f)), &rf).max(coeff_rel(&d_lower(w, &d_upper(v, &f)), &rf));
            bump(&mut rep, 1, w, Some(v), e);
            let kw = kernel(w, a, n)?;
            bump(
                &mut rep,
                2,
                w,
                Some(v),
                coeff_rel(&frac_r(w, v, &kw), &kernel(v, a, n)?),
            );
            let e = cfg
                .corpus
                .iter()
                .map(|s| {
                    coeff_rel(
                        &frac_r(w, v, &project(w, &s.measure, true, n)),
                        &project(v, &s.measure, true, n),
                    )
                })
                .fold(0.0, f64::max);
            bump(&mut rep, 3, w, Some(v), e);
        }
        let plus = RadialWeight::omega_plus(w);
        bump(
            &mut rep,
            4,
            w,
            None,
            coeff_rel(&frac_r(&RadialWeight::constant(), &plus, &f), &d_upper(w, &f)),
        );
    }
    for (name, e) in worst {
        rep.verdict(
            e <= IDENTITY_TOL,
            json!({"identity": name, "truncation": n, "max-rel-error": e, "tolerance": IDENTITY_TOL}),
        );
    }
    Ok(rep)
}

const REPRODUCING_TOL: f64 = 1e-8;
const PAIRING_TOL: f64 = 1e-10;

/// Reproducing property of the kernels and the two sides of the
/// `ω∘ω` pairing.
fn duality(cfg: &ScenarioConfig) -> Result<SuiteReport, CliError> {
    let mut rep = SuiteReport::new(&["check", "weight", "sample", "error"]);
    let quad = QuadratureSpec::default();
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut weights = vec![&cfg.omega];
    if cfg.nu.descriptor() != cfg.omega.descriptor() {
        weights.push(&cfg.nu);
    }
    for w in weights {
        let (mut repro, mut pair) = (0.0f64, 0.0f64);
        for i in 0..20 {
            let deg = r.random_range(0..=20);
            let f = random_poly(&mut r, deg);
            let g = random_poly(&mut r, deg);
            let a = C64::from_polar(
                0.9 * r.random::<f64>().sqrt(),
                std::f64::consts::TAU * r.random::<f64>(),
            );
            let k = kernel(w, a, 64)?;
            let e = (inner_product(&f, &k, w, &quad) - f.evaluate(a)).norm();
            repro = repro.max(e);
            rep.rows
                .push(vec!["reproducing".into(), w.descriptor(), i.to_string(), num(e)]);
            let rho = 0.5 + 0.45 * r.random::<f64>();
            let pr = pairing_omega_omega(&f, &g, w, rho, &quad)?;
            let e = (pr.quadrature - 2.0 * pr.sum).norm() / (2.0 * pr.sum).norm().max(1e-300);
            pair = pair.max(e);
            rep.rows
                .push(vec!["pairing".into(), w.descriptor(), i.to_string(), num(e)]);
        }
        rep.verdict(
            repro <= REPRODUCING_TOL,
            json!({"check": "reproducing", "weight": w.descriptor(), "max-error": repro, "tolerance": REPRODUCING_TOL}),
        );
        rep.verdict(
            pair <= PAIRING_TOL,
            json!({"check": "pairing", "weight": w.descriptor(), "max-error": pair, "tolerance": PAIRING_TOL}),
        );
    }
    Ok(rep)
}

fn kernel_norms(cfg: &ScenarioConfig) -> Result<SuiteReport, CliError> {
    let mut rep = SuiteReport::new(&[
        "radius",
        "truncation",
        "lhs",
        "rhs",
        "ratio",
        "rhs_simplified",
        "ratio_simplified",
    ]);
    let rows = kernel_norm_comparison(
        &cfg.omega,
        &cfg.nu,
        cfg.p,
        &cfg.kernel_radii,
        &QuadratureSpec::default(),
    )?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for row in &rows {
        rep.rows.push(vec![
            num(row.radius),
            row.truncation.to_string(),
            num(row.lhs),
            num(row.rhs),
            num(row.ratio),
            num(row.rhs_simplified),
            num(row.ratio_simplified),
        ]);
        if (0.5..=0.99).contains(&row.radius) {
            lo = lo.min(row.ratio);
            hi = hi.max(row.ratio);
        }
    }
    if !lo.is_finite() {
        return Err(CliError::Config("kernel_radii has no radius in [0.5, 0.99]".into()));
    }
    let band = hi / lo;
    rep.verdict(
        band <= cfg.kernel_band,
        json!({
            "omega": cfg.omega.descriptor(),
            "nu": cfg.nu.descriptor(),
            "p": cfg.p,
            "min-ratio": lo,
            "max-ratio": hi,
            "band": band,
            "limit": cfg.kernel_band,
        }),
    );
    Ok(rep)
}

fn ratio_suite(cfg: &ScenarioConfig, operator: bool) -> Result<SuiteReport, CliError> {
    let mut rep = SuiteReport::new(&["symbol", "truncation", "estimate", "kind", "dual", "ratio"]);
    let opts = ExperimentOptions {
        ladder: cfg.ladder.clone(),
        ascent: cfg.ascent.clone(),
        dual: cfg.dual,
        quad: QuadratureSpec::default(),
    };
    let corpus = cfg.measures();
    let table: RatioTable = if operator {
        theorem2_ratio_experiment(&corpus, &cfg.omega, cfg.p, cfg.q, &opts)?
    } else {
        theorem1_ratio_experiment(&corpus, &cfg.omega, cfg.p, cfg.q, &opts)?
    };
    for row in &table.rows {
        rep.rows.push(vec![
            cfg.corpus[row.symbol].name.clone(),
            row.truncation.to_string(),
            num(row.estimate),
            format!("{:?}", row.kind),
            num(row.dual),
            num(row.ratio),
        ]);
    }
    rep.verdict(
        table.verdict <= cfg.band,
        json!({
            "case": table.case.to_string(),
            "corpus-size": corpus.len(),
            "N-ladder": table.ladder,
            "min-ratio": table.min_ratio,
            "max-ratio": table.max_ratio,
            "band": table.verdict,
            "limit": cfg.band,
        }),
    );
    Ok(rep)
}

fn sup_grid(cfg: &ScenarioConfig) -> SupGrid {
    SupGrid {
        radii: default_radii(),
        angles: cfg.sup_angles,
    }
}

fn require_symbols(cfg: &ScenarioConfig) -> Result<(), CliError> {
    if cfg.corpus.is_empty() {
        return Err(CliError::Run("no symbols in corpus".into()));
    }
    Ok(())
}

fn hankel_measure(cfg: &ScenarioConfig) -> Result<SuiteReport, CliError> {
    require_symbols(cfg)?;
    let mut rep = SuiteReport::new(&["symbol", "value", "divergent", "argmax_re", "argmax_im"]);
    let grid = sup_grid(cfg);
    for s in &cfg.corpus {
        let t = hankel_measure_detector(&s.measure, &cfg.omega, cfg.p, cfg.beta, &grid)?;
        rep.rows.push(vec![
            s.name.clone(),
            num(t.value),
            t.divergent.to_string(),
            num(t.argmax.re),
            num(t.argmax.im),
        ]);
        rep.verdict(
            t.divergent == s.divergent,
            json!({"symbol": s.name, "value": t.value, "divergent": t.divergent, "expected-divergent": s.divergent}),
        );
    }
    Ok(rep)
}

/// The verdict of the standard-weight test must not depend on `t`.
fn criterion(cfg: &ScenarioConfig) -> Result<SuiteReport, CliError> {
    require_symbols(cfg)?;
    let mut rep = SuiteReport::new(&["symbol", "t", "value", "divergent"]);
    let grid = sup_grid(cfg);
    for s in &cfg.corpus {
        let mut flags = Vec::new();
        for &t in &cfg.t_values {
            let res = standard_criterion(&s.measure, cfg.alpha, t, &grid)?;
            rep.rows
                .push(vec![s.name.clone(), num(t), num(res.value), res.divergent.to_string()]);
            flags.push(res.divergent);
        }
        let same = flags.windows(2).all(|w| w[0] == w[1]);
        rep.verdict(
            same,
            json!({"symbol": s.name, "alpha": cfg.alpha, "t": cfg.t_values, "divergent": flags}),
        );
    }
    Ok(rep)
}
