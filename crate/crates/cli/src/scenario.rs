//! Scenario configs: `[section]` blocks of `key = value` lines, resolved
//! against command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bergman_hankel::hankelnorm::{default_corpus, AscentOptions, DualKind};
use bergman_hankel::io::{format_measure, parse_measure, parse_weight, Config};
use bergman_hankel::{ComplexMeasure, RadialWeight, C64};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Keys accepted in each section; anything else is reported with its line.
const KNOWN: &[(&str, &[&str])] = &[
    ("", &["seed", "out"]),
    ("weights", &["omega", "nu", "identity"]),
    ("exponents", &["p", "q", "alpha", "beta", "t"]),
    ("truncation", &["ladder", "identity"]),
    ("ascent", &["restarts", "steps", "initial_step", "radial_nodes"]),
    ("dual", &["kind"]),
    ("grids", &["kernel_radii", "sup_angles"]),
    ("corpus", &["builtin", "files", "expect_divergent"]),
    ("checks", &["band", "kernel_band"]),
];

#[derive(Clone, Debug)]
pub struct Symbol {
    pub name: String,
    pub measure: ComplexMeasure,
    /// The sup tests are expected to flag this symbol.
    pub divergent: bool,
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trunc: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub omega: RadialWeight,
    pub nu: RadialWeight,
    pub identity_weights: Vec<RadialWeight>,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub t_values: Vec<f64>,
    pub ladder: Vec<usize>,
    pub identity_trunc: usize,
    pub ascent: AscentOptions,
    pub dual: DualKind,
    pub kernel_radii: Vec<f64>,
    pub sup_angles: usize,
    pub corpus: Vec<Symbol>,
    pub band: f64,
    pub kernel_band: f64,
    /// Resolved settings, one `key = value` per entry; hashed into artifacts.
    pub canonical: BTreeMap<String, String>,
}

impl ScenarioConfig {
    pub fn load(path: Option<&Path>, ov: &Overrides) -> Result<Self, CliError> {
        let (cfg, dir, label) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                let cfg = Config::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                let dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
                (cfg, dir, p.display().to_string())
            }
            None => (Config::default(), PathBuf::from("."), "<defaults>".to_string()),
        };
        Resolver {
            cfg: &cfg,
            dir: &dir,
            label: &label,
            canonical: BTreeMap::new(),
        }
        .resolve(ov)
    }

    pub fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.canonical {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn measures(&self) -> Vec<ComplexMeasure> {
        self.corpus.iter().map(|s| s.measure.clone()).collect()
    }
}

/// Drops the inner `line 0` prefix when the outer message carries the line.
fn bare(e: bergman_hankel::Error) -> String {
    match e {
        bergman_hankel::Error::Parse { line: 0, msg } => msg,
        other => other.to_string(),
    }
}

struct Resolver<'a> {
    cfg: &'a Config,
    dir: &'a Path,
    label: &'a str,
    canonical: BTreeMap<String, String>,
}

impl Resolver<'_> {
    fn err_at(&self, section: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
        let line = self.cfg.line_of(section, key);
        CliError::Config(format!("{}: line {line}: {msg}", self.label))
    }

    fn check_keys(&self) -> Result<(), CliError> {
        for sec in self.cfg.sections() {
            let Some(allowed) = KNOWN.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k) else {
                return Err(CliError::Config(format!("{}: unknown section [{sec}]", self.label)));
            };
            for key in self.cfg.section(sec).into_iter().flat_map(|m| m.keys()) {
                if !allowed.contains(&key.as_str()) {
                    let shown = if sec.is_empty() {
                        key.clone()
                    } else {
                        format!("{sec}.{key}")
                    };
                    return Err(self.err_at(sec, key, format!("unknown key `{shown}`")));
                }
            }
        }
        Ok(())
    }

    fn record(&mut self, name: &str, value: impl std::fmt::Display) {
        self.canonical.insert(name.to_string(), value.to_string());
    }

    fn value<T: std::str::FromStr + std::fmt::Debug>(
        &mut self,
        section: &str,
        key: &str,
        default: T,
    ) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let v = self
            .cfg
            .parse_value(section, key)
            .map_err(|e| CliError::Config(format!("{}: {e}", self.label)))?
            .unwrap_or(default);
        self.record(&format!("{section}.{key}"), format!("{v:?}"));
        Ok(v)
    }

    fn list<T: std::str::FromStr + std::fmt::Debug>(
        &mut self,
        section: &str,
        key: &str,
        default: Vec<T>,
    ) -> Result<Vec<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let v = self
            .cfg
            .parse_list(section, key)
            .map_err(|e| CliError::Config(format!("{}: {e}", self.label)))?
            .unwrap_or(default);
        self.record(&format!("{section}.{key}"), format!("{v:?}"));
        Ok(v)
    }

    fn weight(&mut self, key: &str, default: &str) -> Result<RadialWeight, CliError> {
        let text = self.cfg.get("weights", key).unwrap_or(default).to_string();
        let w = parse_weight(&text, self.dir).map_err(|e| self.err_at("weights", key, bare(e)))?;
        self.record(&format!("weights.{key}"), w.descriptor());
        Ok(w)
    }

    fn resolve(mut self, ov: &Overrides) -> Result<ScenarioConfig, CliError> {
        self.check_keys()?;
        let seed = match ov.seed {
            Some(s) => s,
            None => self.value("", "seed", 0u64)?,
        };
        self.record(".seed", seed);
        let out = match &ov.out {
            Some(o) => o.clone(),
            None => PathBuf::from(self.cfg.get("", "out").unwrap_or("results")),
        };

        let omega = self.weight("omega", "const")?;
        let nu = self.weight("nu", "const")?;
        let identity_weights = match self.cfg.get("weights", "identity") {
            None => vec![
                RadialWeight::constant(),
                RadialWeight::standard(0.5).expect("valid"),
                RadialWeight::standard(1.0).expect("valid"),
                RadialWeight::weight_w(2.0, &RadialWeight::constant()).expect("valid"),
            ],
            Some(text) => text
                .split(';')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| parse_weight(t, self.dir).map_err(|e| self.err_at("weights", "identity", bare(e))))
                .collect::<Result<_, _>>()?,
        };
        let ids: Vec<String> = identity_weights.iter().map(RadialWeight::descriptor).collect();
        self.record("weights.identity", ids.join("; "));

        let mut p = self.value("exponents", "p", 2.0f64)?;
        let mut q = self.value("exponents", "q", 2.0f64)?;
        if let Some(v) = ov.p {
            p = v;
        }
        if let Some(v) = ov.q {
            q = v;
        }
        self.record("exponents.p", format!("{p:?}"));
        self.record("exponents.q", format!("{q:?}"));
        let alpha = self.value("exponents", "alpha", 0.0f64)?;
        let beta = self.value("exponents", "beta", 1.0f64)?;
        let t_values = self.list("exponents", "t", vec![0.5, 1.0, 2.0])?;

        let mut ladder = self.list("truncation", "ladder", vec![16usize, 32])?;
        let mut identity_trunc = self.value("truncation", "identity", 256usize)?;
        if let Some(n) = ov.trunc {
            ladder = vec![n];
            identity_trunc = n;
        }
        if ladder.is_empty() || ladder.contains(&0) {
            return Err(self.err_at("truncation", "ladder", "ladder needs positive truncations"));
        }
        self.record("truncation.ladder", format!("{ladder:?}"));
        self.record("truncation.identity", identity_trunc);

        let d = AscentOptions::default();
        let ascent = AscentOptions {
            restarts: self.value("ascent", "restarts", d.restarts)?,
            steps: self.value("ascent", "steps", d.steps)?,
            initial_step: self.value("ascent", "initial_step", d.initial_step)?,
            radial_nodes: self.value("ascent", "radial_nodes", d.radial_nodes)?,
            seed,
            warm_start: true,
        };
        let dual = match self.cfg.get("dual", "kind").unwrap_or("theorem") {
            "theorem" => DualKind::Theorem,
            "bloch" => DualKind::Bloch,
            other => {
                return Err(self.err_at(
                    "dual",
                    "kind",
                    format!("dual kind must be `theorem` or `bloch`, got `{other}`"),
                ))
            }
        };
        self.record("dual.kind", format!("{dual:?}"));

        let kernel_radii = self.list("grids", "kernel_radii", vec![0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99])?;
        if let Some(r) = kernel_radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return Err(self.err_at("grids", "kernel_radii", format!("radius {r} outside [0, 1)")));
        }
        let sup_angles = self.value("grids", "sup_angles", 64usize)?;
        let band = self.value("checks", "band", 10.0f64)?;
        let kernel_band = self.value("checks", "kernel_band", 4.0f64)?;

        let corpus = self.corpus(&omega)?;
        for s in &corpus {
            self.record(
                &format!("corpus.{}", s.name),
                format!("{}divergent={}", format_measure(&s.measure, None), s.divergent),
            );
        }

        Ok(ScenarioConfig {
            seed,
            out,
            omega,
            nu,
            identity_weights,
            p,
            q,
            alpha,
            beta,
            t_values,
            ladder,
            identity_trunc,
            ascent,
            dual,
            kernel_radii,
            sup_angles,
            corpus,
            band,
            kernel_band,
            canonical: self.canonical,
        })
    }

    /// Without a `[corpus]` section the built-in eight symbols are used; an
    /// explicit section lists exactly what it names.
    fn corpus(&self, omega: &RadialWeight) -> Result<Vec<Symbol>, CliError> {
        let (builtin, files) = match self.cfg.section("corpus") {
            None => ("default".to_string(), String::new()),
            Some(_) => (
                self.cfg.get("corpus", "builtin").unwrap_or("").to_string(),
                self.cfg.get("corpus", "files").unwrap_or("").to_string(),
            ),
        };
        let mut out = Vec::new();
        for name in builtin.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match name {
                "default" => out.extend(default_corpus(omega).into_iter().enumerate().map(|(i, m)| Symbol {
                    name: format!("default{i}"),
                    measure: m,
                    divergent: false,
                })),
                "escaping" => out.push(Symbol {
                    name: "escaping".into(),
                    measure: escaping_atoms(),
                    divergent: true,
                }),
                other => return Err(self.err_at("corpus", "builtin", format!("unknown builtin corpus `{other}`"))),
            }
        }
        for file in files.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let path = self.dir.join(file);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| self.err_at("corpus", "files", format!("{}: {e}", path.display())))?;
            let measure = parse_measure(&text, path.parent().unwrap_or(self.dir))
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            out.push(Symbol {
                name: file.to_string(),
                measure,
                divergent: false,
            });
        }
        let expect = self.cfg.get("corpus", "expect_divergent").unwrap_or("");
        for name in expect.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let s = out
                .iter_mut()
                .find(|s| s.name == name)
                .ok_or_else(|| self.err_at("corpus", "expect_divergent", format!("no symbol named `{name}`")))?;
            s.divergent = true;
        }
        Ok(out)
    }
}

/// `Σ_j (1-ρ_j)^{3/2} δ_{ρ_j}`, `ρ_j = 1 - 2^{-j}`: finite variation, but
/// the Hankel-measure test grows like `(1-ρ_j)^{-1/2}` along the atoms.
pub fn escaping_atoms() -> ComplexMeasure {
    let mut mu = ComplexMeasure::zero();
    for j in 1..=40 {
        let rho = 1.0 - 2f64.powi(-j);
        mu = mu
            .with_atom(C64::new(rho, 0.0), C64::new((1.0 - rho).powf(1.5), 0.0))
            .expect("atoms inside the disk");
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, ov: &Overrides) -> Result<ScenarioConfig, CliError> {
        let dir = std::env::temp_dir().join(format!("bhk-scenario-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{:x}.cfg", text.len() * 31 + ov.seed.unwrap_or(0) as usize));
        std::fs::write(&path, text).unwrap();
        ScenarioConfig::load(Some(&path), ov)
    }

    #[test]
    fn defaults_without_a_file() {
        let c = ScenarioConfig::load(None, &Overrides::default()).unwrap();
        assert_eq!(c.ladder, vec![16, 32]);
        assert_eq!(c.corpus.len(), 8);
        assert_eq!(c.identity_weights.len(), 4);
        assert_eq!((c.p, c.q), (2.0, 2.0));
    }

    #[test]
    fn flags_override_the_file() {
        let ov = Overrides {
            trunc: Some(12),
            p: Some(3.0),
            seed: Some(9),
            ..Default::default()
        };
        let c = load(
            "seed = 1\n[exponents]\np = 4\nq = 4\n[truncation]\nladder = 8, 16\n",
            &ov,
        )
        .unwrap();
        assert_eq!(c.ladder, vec![12]);
        assert_eq!(c.identity_trunc, 12);
        assert_eq!((c.p, c.q, c.seed, c.ascent.seed), (3.0, 4.0, 9, 9));
    }

    #[test]
    fn hash_ignores_comments_and_layout() {
        let a = load("[exponents]\np = 4\n", &Overrides::default()).unwrap();
        let b = load(
            "# note\n[exponents]\n  p   =   4.0  # same value\n",
            &Overrides::default(),
        )
        .unwrap();
        assert_eq!(a.config_hash(), b.config_hash());
        let c = load("[exponents]\np = 3\n", &Overrides::default()).unwrap();
        assert_ne!(a.config_hash(), c.config_hash());
    }

    #[test]
    fn escaping_builtin_is_marked_divergent() {
        let c = load("[corpus]\nbuiltin = default, escaping\n", &Overrides::default()).unwrap();
        assert_eq!(c.corpus.len(), 9);
        assert!(c.corpus.last().unwrap().divergent);
        assert!(c.corpus[..8].iter().all(|s| !s.divergent));
    }

    #[test]
    fn bad_dual_kind_reports_its_line() {
        let e = load("seed = 2\n[dual]\nkind = hilbert\n", &Overrides::default()).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }
}
