//! Radial weights on the unit disk: tails, moments, doubling classification
//! and the derived weights `W_{x,ω}` and `ω_+`.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature;

/// Relative tolerance for tails computed by quadrature.
pub const TAIL_REL_TOL: f64 = 1e-10;
/// Relative tolerance for moments computed by quadrature.
pub const MOMENT_REL_TOL: f64 = 1e-13;

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The closed-form families a weight can belong to.
#[derive(Clone)]
pub enum WeightKind {
    /// `(α+1)(1-r²)^α`, `α > -1`. `Standard(0)` is the constant weight.
    Standard { alpha: f64 },
    /// `(β+1)(1-r)^β`, `β > -1`, with tail `(1-ρ)^{β+1}`.
    Power { beta: f64 },
    /// `W_{x,ω}`; its tail is `ω̂(ρ)^x (1-ρ)^{x-1}`.
    WDerived { x: f64, base: RadialWeight },
    /// `ω_+(ρ) = ∫_ρ^1 ω(s) ds / s`.
    OmegaPlus { base: RadialWeight },
    /// Arbitrary profile; tails and moments by quadrature.
    Custom {
        name: String,
        profile: Profile,
        tail_tol: f64,
    },
    /// Piecewise-linear profile read from `(rho, value)` samples.
    Sampled {
        path: PathBuf,
        rho: Vec<f64>,
        values: Vec<f64>,
    },
}

struct Inner {
    kind: WeightKind,
    odd_moments: RwLock<Vec<f64>>,
    tails: RwLock<HashMap<u64, f64>>,
}

/// A radial weight `ω(z) = ω(|z|)` with memoized tails and moments.
///
/// Cloning is cheap and clones share the memo tables.
#[derive(Clone)]
pub struct RadialWeight(Arc<Inner>);

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialWeight({})", self.descriptor())
    }
}

impl RadialWeight {
    fn from_kind(kind: WeightKind) -> Self {
        RadialWeight(Arc::new(Inner {
            kind,
            odd_moments: RwLock::new(Vec::new()),
            tails: RwLock::new(HashMap::new()),
        }))
    }

    /// `ω ≡ 1`.
    pub fn constant() -> Self {
        Self::from_kind(WeightKind::Standard { alpha: 0.0 })
    }

    pub fn standard(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::domain("standard weight needs alpha > -1", alpha));
        }
        Ok(Self::from_kind(WeightKind::Standard { alpha }))
    }

    pub fn power(beta: f64) -> Result<Self> {
        if !(beta > -1.0) || !beta.is_finite() {
            return Err(Error::domain("power weight needs beta > -1", beta));
        }
        Ok(Self::from_kind(WeightKind::Power { beta }))
    }

    /// The weight `W_{x,ω} = (x-1)ω̂^x(1-ρ)^{x-2} + xωω̂^{x-1}(1-ρ)^{x-1}`.
    pub fn weight_w(x: f64, base: &RadialWeight) -> Result<Self> {
        if !(x >= 1.0) || !x.is_finite() {
            return Err(Error::domain("weight_W needs x >= 1", x));
        }
        Ok(Self::from_kind(WeightKind::WDerived { x, base: base.clone() }))
    }

    pub fn omega_plus(base: &RadialWeight) -> Self {
        Self::from_kind(WeightKind::OmegaPlus { base: base.clone() })
    }

    pub fn custom(name: impl Into<String>, profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::custom_with_tail_tolerance(name, TAIL_REL_TOL, profile)
    }

    /// Like [`RadialWeight::custom`] with a looser relative tolerance for the
    /// tail quadrature, for profiles with many jumps near the boundary.
    pub fn custom_with_tail_tolerance(
        name: impl Into<String>,
        tail_tol: f64,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::from_kind(WeightKind::Custom {
            name: name.into(),
            profile: Arc::new(profile),
            tail_tol,
        })
    }

    /// Piecewise-linear weight through `(rho, value)` samples; extended
    /// constantly beyond the first and last sample.
    pub fn sampled(path: impl Into<PathBuf>, rho: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if rho.len() != values.len() || rho.len() < 2 {
            return Err(Error::Shape {
                expected: "at least two (rho, value) samples".into(),
                got: format!("{} rho / {} values", rho.len(), values.len()),
            });
        }
        if rho.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("sample abscissae must increase".into()));
        }
        if let Some(&v) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::domain("weight samples must be nonnegative", v));
        }
        Ok(Self::from_kind(WeightKind::Sampled {
            path: path.into(),
            rho,
            values,
        }))
    }

    /// Reads a two-column `rho,value` CSV (an optional header row is skipped).
    pub fn load_samples(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut rho = Vec::new();
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = match (cols.next(), cols.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::parse(i + 1, "expected two columns")),
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(r), Ok(v)) => {
                    rho.push(r);
                    values.push(v);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::parse(i + 1, format!("bad number in `{line}`"))),
            }
        }
        Self::sampled(path, rho, values)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.0.kind
    }

    /// True when `tail` is evaluated from an exact formula.
    pub fn has_closed_form_tail(&self) -> bool {
        match &self.0.kind {
            WeightKind::Standard { .. } | WeightKind::Power { .. } => true,
            WeightKind::WDerived { base, .. } | WeightKind::OmegaPlus { base } => base.has_closed_form_tail(),
            WeightKind::Custom { .. } | WeightKind::Sampled { .. } => false,
        }
    }

    /// Pointwise value `ω(ρ)`.
    pub fn profile(&self, rho: f64) -> f64 {
        match &self.0.kind {
            WeightKind::Standard { alpha } => {
                if *alpha == 0.0 {
                    1.0
                } else {
                    (alpha + 1.0) * ((1.0 - rho) * (1.0 + rho)).powf(*alpha)
                }
            }
            WeightKind::Power { beta } => (beta + 1.0) * (1.0 - rho).powf(*beta),
            WeightKind::WDerived { x, base } => {
                let eps = 1.0 - rho;
                let t = base.tail(rho).unwrap_or(f64::NAN);
                let first = if *x == 1.0 {
                    0.0
                } else {
                    (x - 1.0) * t.powf(*x) * eps.powf(x - 2.0)
                };
                first + x * base.profile(rho) * t.powf(x - 1.0) * eps.powf(x - 1.0)
            }
            WeightKind::OmegaPlus { base } => omega_plus_profile(base, rho),
            WeightKind::Custom { profile, .. } => profile(rho),
            WeightKind::Sampled { rho: xs, values, .. } => interpolate(xs, values, rho),
        }
    }

    /// `ω̂(ρ) = ∫_ρ^1 ω(t) dt`.
    pub fn tail(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        match &self.0.kind {
            WeightKind::Standard { alpha } => Ok(standard_tail(*alpha, rho)),
            WeightKind::Power { beta } => Ok((1.0 - rho).powf(beta + 1.0)),
            WeightKind::WDerived { x, base } => Ok(base.tail(rho)?.powf(*x) * (1.0 - rho).powf(x - 1.0)),
            WeightKind::OmegaPlus { base } => {
                let t = base.tail(rho)?;
                if rho == 0.0 {
                    Ok(t)
                } else {
                    Ok(t - rho * omega_plus_profile(base, rho))
                }
            }
            WeightKind::Custom { .. } | WeightKind::Sampled { .. } => {
                let key = rho.to_bits();
                if let Some(&v) = self.0.tails.read().unwrap().get(&key) {
                    return Ok(v);
                }
                let v = self.tail_by_quadrature(rho)?;
                self.0.tails.write().unwrap().insert(key, v);
                Ok(v)
            }
        }
    }

    /// `ω(1 - d)`, without forming `1 - d` where the closed form allows it.
    fn profile_at_gap(&self, d: f64) -> f64 {
        match &self.0.kind {
            WeightKind::Standard { alpha } if *alpha != 0.0 => (alpha + 1.0) * (d * (2.0 - d)).powf(*alpha),
            WeightKind::Power { beta } => (beta + 1.0) * d.powf(*beta),
            _ => self.profile(1.0 - d),
        }
    }

    /// `∫_ρ^1 ω(s) ds` by adaptive quadrature of the profile, ignoring any
    /// closed form. Uses `s = 1 - (1-ρ)t^4`.
    pub fn tail_by_quadrature(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        let eps = 1.0 - rho;
        let tol = match &self.0.kind {
            WeightKind::Custom { tail_tol, .. } => *tail_tol,
            _ => TAIL_REL_TOL,
        };
        // the t^4 substitution tames algebraic blow-up of the profile at s = 1
        let v = quadrature::adaptive(
            |t| {
                let t3 = t * t * t;
                let v = 4.0 * t3 * self.profile_at_gap(eps * t3 * t);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
            tol,
        )?;
        Ok(eps * v)
    }

    /// The moment `ω_x = ∫_0^1 ω(s) s^x ds`.
    pub fn moment(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain("moment order must be >= 0", x));
        }
        match &self.0.kind {
            WeightKind::Standard { alpha } => {
                // (α+1)/2 · B((x+1)/2, α+1)
                let a = 0.5 * (x + 1.0);
                let b = alpha + 1.0;
                Ok(0.5 * b * (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
            }
            WeightKind::Power { beta } => {
                let a = x + 1.0;
                let b = beta + 1.0;
                Ok(b * (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
            }
            WeightKind::OmegaPlus { base } => Ok(base.moment(x)? / (x + 1.0)),
            _ => self.moment_by_quadrature(x),
        }
    }

    fn moment_by_quadrature(&self, x: f64) -> Result<f64> {
        if x >= 1.0 && self.has_closed_form_tail() {
            // ω_x = x ∫_0^1 ω̂(s) s^{x-1} ds, with s = 1 - u.
            let mut failure = None;
            let v = quadrature::adaptive(
                |u| {
                    let s = 1.0 - u;
                    match self.tail(s) {
                        Ok(t) => t * s.powf(x - 1.0),
                        Err(e) => {
                            failure.get_or_insert(e);
                            0.0
                        }
                    }
                },
                0.0,
                1.0,
                MOMENT_REL_TOL,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(x * v)
        } else {
            quadrature::adaptive(
                |u| {
                    let s = 1.0 - u;
                    self.profile(s) * s.powf(x)
                },
                0.0,
                1.0,
                MOMENT_REL_TOL,
            )
        }
    }

    /// `ω_{2n+1}`, memoized.
    pub fn odd_moment(&self, n: usize) -> f64 {
        self.odd_moments(n + 1)[n]
    }

    /// `(ω_1, ω_3, …, ω_{2len-1})`.
    pub fn odd_moments(&self, len: usize) -> Vec<f64> {
        {
            let table = self.0.odd_moments.read().unwrap();
            if table.len() >= len {
                return table[..len].to_vec();
            }
        }
        let mut table = self.0.odd_moments.write().unwrap();
        let start = table.len();
        for n in start..len {
            let v = self.compute_odd_moment(n, table.last().copied());
            table.push(v);
        }
        table[..len].to_vec()
    }

    fn compute_odd_moment(&self, n: usize, previous: Option<f64>) -> f64 {
        let nf = n as f64;
        match (&self.0.kind, previous) {
            (WeightKind::Standard { .. }, None) => 0.5,
            // ω_{2n+1}/ω_{2n-1} = n/(n+α+1)
            (WeightKind::Standard { alpha }, Some(p)) => p * nf / (nf + alpha + 1.0),
            (WeightKind::Power { beta }, None) => 1.0 / (beta + 2.0),
            (WeightKind::Power { beta }, Some(p)) => {
                let x = 2.0 * nf - 1.0;
                let b = beta + 1.0;
                p * (x + 2.0) * (x + 1.0) / ((x + 1.0 + b) * (x + 2.0 + b))
            }
            (WeightKind::OmegaPlus { base }, _) => base.odd_moment(n) / (2.0 * nf + 2.0),
            _ => self
                .moment_by_quadrature(2.0 * nf + 1.0)
                .unwrap_or_else(|e| panic!("moment {} of {:?} failed: {e}", 2 * n + 1, self)),
        }
    }

    /// `σ_n = 2ω_{2n+1}`, the squared `A²_ω` norm of `z^n`.
    pub fn sigma(&self, n: usize) -> f64 {
        2.0 * self.odd_moment(n)
    }

    pub fn sigmas(&self, len: usize) -> Vec<f64> {
        self.odd_moments(len).into_iter().map(|m| 2.0 * m).collect()
    }

    /// Plain-text descriptor, e.g. `kind=standard alpha=1`.
    pub fn descriptor(&self) -> String {
        match &self.0.kind {
            WeightKind::Standard { alpha } => format!("kind=standard alpha={alpha}"),
            WeightKind::Power { beta } => format!("kind=power beta={beta}"),
            WeightKind::WDerived { x, base } => {
                format!("kind=wderived x={x} base=({})", base.descriptor())
            }
            WeightKind::OmegaPlus { base } => format!("kind=omegaplus base=({})", base.descriptor()),
            WeightKind::Custom { name, .. } => format!("kind=custom name={name}"),
            WeightKind::Sampled { path, .. } => format!("kind=custom samples={}", path.display()),
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::domain("radius must lie in [0, 1)", rho));
    }
    Ok(())
}

/// `(α+1)∫_ρ^1 (1-t²)^α dt = (α+1) 2^α ε^{α+1} Σ_k C(α,k) (-ε/2)^k / (α+k+1)`
/// with `ε = 1-ρ`; the series ratio is at most 1/2.
fn standard_tail(alpha: f64, rho: f64) -> f64 {
    let eps = 1.0 - rho;
    if alpha == 0.0 {
        return eps;
    }
    let mut binom = 1.0;
    let mut pow = 1.0;
    let mut sum = 0.0;
    for k in 0..400 {
        let kf = k as f64;
        let term = binom * pow / (alpha + kf + 1.0);
        sum += term;
        if binom == 0.0 || (term.abs() < 1e-18 * sum.abs() && kf > alpha) {
            break;
        }
        binom *= (alpha - kf) / (kf + 1.0);
        pow *= -0.5 * eps;
    }
    (alpha + 1.0) * 2f64.powf(alpha) * eps.powf(alpha + 1.0) * sum
}

fn omega_plus_profile(base: &RadialWeight, rho: f64) -> f64 {
    if rho <= 0.0 {
        return f64::INFINITY;
    }
    if let WeightKind::Standard { alpha } = base.kind() {
        if *alpha == 0.0 {
            return -rho.ln();
        }
    }
    let eps = 1.0 - rho;
    quadrature::adaptive(
        |u| {
            let s = 1.0 - eps * u;
            base.profile(s) / s
        },
        0.0,
        1.0,
        TAIL_REL_TOL,
    )
    .map(|v| eps * v)
    .unwrap_or(f64::NAN)
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

/// Grid `ρ_i = 1 - 10^{-6i/(n-1)}`, `i = 0..n`, from 0 to `1 - 10^{-6}`.
pub fn default_doubling_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 1.0 - 10f64.powf(-6.0 * i as f64 / (n - 1) as f64))
        .collect()
}

/// Index splitting `grid` into the part before its last decade in `1-ρ` and
/// the last decade itself (`1-ρ ≤ 10(1-ρ_max)`).
pub(crate) fn last_decade_start(grid: &[f64]) -> usize {
    let gap = grid.iter().map(|r| 1.0 - r).fold(f64::INFINITY, f64::min);
    grid.iter().position(|r| 1.0 - r <= 10.0 * gap).unwrap_or(grid.len())
}

/// `max(last decade) ≤ (1+margin) · max(rest)`, all values finite.
pub(crate) fn stable_sup(values: &[f64], split: usize, margin: f64) -> bool {
    if values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let head = values[..split].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tail = values[split..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if split == 0 || split == values.len() {
        return true;
    }
    tail <= (1.0 + margin) * head
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpperDoubling {
    pub is_upper: bool,
    /// `max ω̂(ρ)/ω̂((1+ρ)/2)` over the grid.
    pub constant: f64,
    pub ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowerDoubling {
    pub is_lower: bool,
    pub c: f64,
    pub k: f64,
}

/// Combined classification on a fixed grid.
#[derive(Clone, Debug)]
pub struct DoublingReport {
    pub is_upper: bool,
    pub upper_constant: f64,
    pub is_lower: bool,
    pub lower_c: f64,
    pub lower_k: f64,
    pub growth_exponent_gamma: Option<f64>,
    pub grid: Vec<f64>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

/// Grid check of `ω̂(ρ) ≲ ω̂((1+ρ)/2)`, with a 5% stability margin over the
/// last decade of the grid.
pub fn upper_doubling(w: &RadialWeight, grid: &[f64]) -> Result<UpperDoubling> {
    let mut ratios = Vec::with_capacity(grid.len());
    for &rho in grid {
        ratios.push(ratio(w.tail(rho)?, w.tail(0.5 * (1.0 + rho))?));
    }
    let constant = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let is_upper = stable_sup(&ratios, last_decade_start(grid), 0.05);
    Ok(UpperDoubling {
        is_upper,
        constant: if constant.is_nan() { f64::INFINITY } else { constant },
        ratios,
    })
}

/// For each `K`, `C_K = min_grid ω̂(ρ)/ω̂(1-(1-ρ)/K)`; the weight is flagged
/// lower-doubling when some `C_K > 1 + 10^{-3}`. Reports the best pair.
pub fn lower_doubling(w: &RadialWeight, ks: &[f64], grid: &[f64]) -> Result<LowerDoubling> {
    let mut best = LowerDoubling {
        is_lower: false,
        c: f64::NEG_INFINITY,
        k: f64::NAN,
    };
    for &k in ks {
        if !(k > 1.0) {
            return Err(Error::domain("lower-doubling K must exceed 1", k));
        }
        let mut c = f64::INFINITY;
        for &rho in grid {
            let r = ratio(w.tail(rho)?, w.tail(1.0 - (1.0 - rho) / k)?);
            c = c.min(if r.is_nan() { f64::NEG_INFINITY } else { r });
        }
        if c > best.c {
            best = LowerDoubling { is_lower: false, c, k };
        }
    }
    best.is_lower = best.c > 1.0 + 1e-3 && best.c.is_finite();
    Ok(best)
}

/// Candidate exponents `0.25, 0.5, …, 16`.
pub fn gamma_ladder() -> impl Iterator<Item = f64> {
    (1..=64).map(|i| 0.25 * i as f64)
}

/// Smallest `γ` on the ladder with `ω̂(ρ₁)/(1-ρ₁)^γ ≤ 1.05 ω̂(ρ₂)/(1-ρ₂)^γ`
/// for all grid points `ρ₁ < ρ₂`.
pub fn growth_exponent(w: &RadialWeight, grid: &[f64]) -> Result<f64> {
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let tails = sorted.iter().map(|&r| w.tail(r)).collect::<Result<Vec<_>>>()?;
    for gamma in gamma_ladder() {
        let mut running = f64::NEG_INFINITY;
        let mut ok = true;
        for (&rho, &t) in sorted.iter().zip(&tails) {
            let h = t / (1.0 - rho).powf(gamma);
            if !h.is_finite() || running > 1.05 * h {
                ok = false;
                break;
            }
            running = running.max(h);
        }
        if ok {
            return Ok(gamma);
        }
    }
    Err(Error::Classification(format!(
        "no growth exponent up to 16 makes the tail ratio almost increasing; {:?} is likely not upper-doubling",
        w
    )))
}

/// Full classification with the given lower-doubling candidates.
pub fn doubling_report(w: &RadialWeight, ks: &[f64], grid: &[f64]) -> Result<DoublingReport> {
    let upper = upper_doubling(w, grid)?;
    let lower = lower_doubling(w, ks, grid)?;
    let gamma = if upper.is_upper {
        growth_exponent(w, grid).ok()
    } else {
        None
    };
    Ok(DoublingReport {
        is_upper: upper.is_upper,
        upper_constant: upper.constant,
        is_lower: lower.is_lower,
        lower_c: lower.c,
        lower_k: lower.k,
        growth_exponent_gamma: gamma,
        grid: grid.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn constant_tail_and_moments() {
        let w = RadialWeight::constant();
        assert_eq!(w.tail(0.5).unwrap(), 0.5);
        assert!(rel(w.moment(1.0).unwrap(), 0.5) < 1e-14);
        for n in 0..20 {
            let x = 2.0 * n as f64 + 1.0;
            assert!(rel(w.moment(x).unwrap(), 1.0 / (x + 1.0)) < 1e-12);
            assert!(rel(w.odd_moment(n), 1.0 / (x + 1.0)) < 1e-15);
        }
    }

    #[test]
    fn standard_one_tail_closed_form() {
        let w = RadialWeight::standard(1.0).unwrap();
        assert!(rel(w.tail(0.0).unwrap(), 4.0 / 3.0) < 1e-15);
        for i in 0..50 {
            let rho = i as f64 / 50.0;
            let want = 2.0 / 3.0 * (1.0 - rho).powi(2) * (2.0 + rho);
            assert!(rel(w.tail(rho).unwrap(), want) < 1e-13, "rho={rho}");
        }
        assert!(rel(w.moment(1.0).unwrap(), 0.5) < 1e-13);
    }

    #[test]
    fn wderived_tail_matches_antiderivative() {
        let w = RadialWeight::weight_w(2.0, &RadialWeight::constant()).unwrap();
        for rho in [0.0, 0.3, 0.9, 0.999] {
            assert!(rel(w.tail(rho).unwrap(), (1.0 - rho).powi(3)) < 1e-14);
            assert!(rel(w.profile(rho), 3.0 * (1.0 - rho).powi(2)) < 1e-14);
        }
    }

    #[test]
    fn weight_w_with_x_one_is_the_base() {
        let base = RadialWeight::standard(1.0).unwrap();
        let w = RadialWeight::weight_w(1.0, &base).unwrap();
        for rho in [0.0, 0.25, 0.75] {
            assert!(rel(w.tail(rho).unwrap(), base.tail(rho).unwrap()) < 1e-15);
            assert!(rel(w.profile(rho), base.profile(rho)) < 1e-15);
        }
    }

    #[test]
    fn weight_w_rejects_small_x() {
        assert!(matches!(
            RadialWeight::weight_w(0.5, &RadialWeight::constant()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn domain_errors() {
        let w = RadialWeight::constant();
        assert!(w.tail(1.0).is_err());
        assert!(w.tail(-0.1).is_err());
        assert!(w.moment(-1.0).is_err());
    }

    #[test]
    fn omega_plus_moments_via_fubini() {
        let w = RadialWeight::omega_plus(&RadialWeight::constant());
        assert!(rel(w.odd_moment(0), 0.25) < 1e-15);
        assert!(rel(w.odd_moment(1), 1.0 / 16.0) < 1e-15);
        // Tail by quadrature of -ln s is (1-ρ) + ρ ln ρ.
        for rho in [0.1f64, 0.5, 0.9] {
            let want = (1.0 - rho) + rho * rho.ln();
            assert!(rel(w.tail(rho).unwrap(), want) < 1e-12);
        }
    }

    #[test]
    fn custom_tail_cached_and_consistent() {
        let w = RadialWeight::custom("two-one-minus", |r| 2.0 * (1.0 - r));
        for rho in [0.0, 0.5, 0.99] {
            assert!(rel(w.tail(rho).unwrap(), (1.0 - rho).powi(2)) < 1e-12);
        }
        assert!(rel(w.odd_moment(1), 0.1) < 1e-13);
    }

    #[test]
    fn power_weight_moments() {
        let w = RadialWeight::power(1.0).unwrap();
        let c = RadialWeight::custom("p1", |r| 2.0 * (1.0 - r));
        for n in 0..40 {
            assert!(rel(w.odd_moment(n), c.odd_moment(n)) < 1e-12, "n={n}");
            let x = 2.0 * n as f64 + 1.0;
            assert!(rel(w.moment(x).unwrap(), w.odd_moment(n)) < 1e-12);
        }
    }

    #[test]
    fn constant_weight_doubling() {
        let w = RadialWeight::constant();
        let grid = default_doubling_grid(50);
        let up = upper_doubling(&w, &grid).unwrap();
        assert!(up.is_upper);
        assert!(rel(up.constant, 2.0) < 1e-9);
        let low = lower_doubling(&w, &[2.0], &grid).unwrap();
        assert!(low.is_lower);
        assert!(rel(low.c, 2.0) < 1e-9);
        assert_eq!(growth_exponent(&w, &grid).unwrap(), 1.0);
    }

    #[test]
    fn standard_weights_doubling() {
        let grid = default_doubling_grid(50);
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let w = RadialWeight::standard(alpha).unwrap();
            let up = upper_doubling(&w, &grid).unwrap();
            assert!(up.is_upper, "alpha={alpha}");
            assert!(
                rel(up.constant, 2f64.powf(alpha + 1.0)) < 1e-4,
                "alpha={alpha}: {}",
                up.constant
            );
            let low = lower_doubling(&w, &[2.0], &grid).unwrap();
            assert!(low.is_lower && low.c >= 2.0 - 1e-9, "alpha={alpha}");
            let gamma = growth_exponent(&w, &grid).unwrap();
            let want = ((alpha + 1.0) * 4.0).ceil() / 4.0;
            assert_eq!(gamma, want, "alpha={alpha}");
        }
        let std1 = RadialWeight::standard(1.0).unwrap();
        let low = lower_doubling(&std1, &[2.0], &grid).unwrap();
        // Endpoint ratio of the exact tails is 4.
        assert!(low.c < 4.0 && low.c > 3.0);
    }

    #[test]
    fn exponential_weight_is_not_upper_doubling() {
        let w = RadialWeight::custom("exp", |r: f64| (-1.0 / (1.0 - r)).exp());
        let grid = default_doubling_grid(50);
        let up = upper_doubling(&w, &grid).unwrap();
        assert!(!up.is_upper);
        let finite: Vec<f64> = up.ratios.iter().copied().take_while(|r| r.is_finite()).collect();
        assert!(finite.len() > 5);
        assert!(finite.windows(2).all(|p| p[1] > p[0]), "ratio must keep growing");
        assert!(matches!(growth_exponent(&w, &grid), Err(Error::Classification(_))));
    }

    #[test]
    fn oscillating_weight_report_is_computed() {
        // Grid heuristic only: mass switches on and off once per e^π in 1/(1-r).
        let w = RadialWeight::custom_with_tail_tolerance("osc", 1e-8, |r: f64| (-(1.0 - r).ln()).sin().max(0.0));
        let grid = default_doubling_grid(30);
        let report = doubling_report(&w, &[2.0, 4.0], &grid).unwrap();
        assert!(report.upper_constant.is_finite());
        assert!(report.lower_c.is_finite());
    }

    #[test]
    fn wderived_standard_is_doubling() {
        let grid = default_doubling_grid(50);
        for alpha in [0.0, 1.0] {
            let base = RadialWeight::standard(alpha).unwrap();
            let w = RadialWeight::weight_w(2.0, &base).unwrap();
            let report = doubling_report(&w, &[2.0], &grid).unwrap();
            assert!(report.is_upper && report.is_lower, "alpha={alpha}");
        }
        let w = RadialWeight::weight_w(2.0, &RadialWeight::constant()).unwrap();
        assert_eq!(growth_exponent(&w, &grid).unwrap(), 3.0);
    }

    #[test]
    fn sampled_weight_interpolates() {
        let rho: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let values = rho.iter().map(|r| 2.0 * (1.0 - r)).collect();
        let w = RadialWeight::sampled("inline", rho, values).unwrap();
        assert!(rel(w.tail(0.5).unwrap(), 0.25) < 1e-10);
        assert!(RadialWeight::sampled("x", vec![0.0], vec![1.0]).is_err());
    }
}
