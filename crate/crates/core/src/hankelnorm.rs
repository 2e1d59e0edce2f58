//! Norm estimates for Hankel forms and operators, the dual norms that
//! control them, and sup-type tests for Hankel measures.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::TaylorSeries;
use crate::error::{Error, Result};
use crate::measures::{project, ComplexMeasure};
use crate::norms::{
    bergman_norm, bloch_norm, d_omega_bmoa_norm, default_radii, sup_search, DiskRule, QuadratureSpec, SupGrid,
};
use crate::operators::{HankelMatrixView, HankelPlan};
use crate::par;
use crate::weights::{default_doubling_grid, growth_exponent, RadialWeight};

/// Which of the three exponent regimes a pair `(p, q)` falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormCase {
    /// `r > 1`: dual space `A^{r'}_ω`.
    I,
    /// `r = 1`: dual space `D_ω BMOA(∞, ω)`.
    II,
    /// `r < 1`: dual space the Bloch space, via `W_{1/r, ω}`.
    III,
}

impl std::fmt::Display for FormCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FormCase::I => "I",
            FormCase::II => "II",
            FormCase::III => "III",
        })
    }
}

#[derive(Clone, Debug)]
pub struct HankelFormSpec {
    pub mu: ComplexMeasure,
    pub omega: RadialWeight,
    pub p: f64,
    pub q: f64,
    /// `(1/p + 1/q)^{-1}`.
    pub r: f64,
    /// `r/(r-1)` when `r > 1`.
    pub r_prime: Option<f64>,
    pub case: FormCase,
}

impl HankelFormSpec {
    pub fn new(mu: ComplexMeasure, omega: RadialWeight, p: f64, q: f64) -> Result<Self> {
        for v in [p, q] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain("exponents must be positive and finite", v));
            }
        }
        let r = p * q / (p + q);
        let case = if p * q == p + q {
            FormCase::II
        } else if r > 1.0 {
            FormCase::I
        } else {
            FormCase::III
        };
        let r_prime = (case == FormCase::I).then(|| r / (r - 1.0));
        Ok(HankelFormSpec {
            mu,
            omega,
            p,
            q,
            r,
            r_prime,
            case,
        })
    }

    pub fn scaled(&self, lambda: C64) -> Self {
        HankelFormSpec {
            mu: self.mu.scale(lambda),
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateKind {
    LowerBound,
    Band,
}

#[derive(Clone, Debug)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub truncation: usize,
    pub iterations: usize,
    pub history: Vec<f64>,
}

pub const POWER_TOL: f64 = 1e-8;
pub const POWER_MAX_ITER: usize = 20_000;

struct Singular {
    value: f64,
    right: Vec<C64>,
    iterations: usize,
    history: Vec<f64>,
}

fn unit_random(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    normalize(&mut v);
    v
}

fn l2(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) -> f64 {
    let n = l2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|c| *c /= n);
    }
    n
}

/// Power iteration on `A*A`; the estimate is `‖A x_k‖`.
fn top_singular(view: &HankelMatrixView) -> Result<Singular> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0022);
    let mut x = unit_random(view.dim(), &mut rng);
    let mut history = Vec::new();
    let mut prev = f64::NAN;
    for it in 1..=POWER_MAX_ITER {
        let y = view.apply(&x);
        let s = l2(&y);
        history.push(s);
        if s == 0.0 {
            return Ok(Singular {
                value: 0.0,
                right: x,
                iterations: it,
                history,
            });
        }
        if (s - prev).abs() <= POWER_TOL * s {
            return Ok(Singular {
                value: s,
                right: x,
                iterations: it,
                history,
            });
        }
        prev = s;
        x = view.apply_adjoint(&y);
        normalize(&mut x);
    }
    let n = history.len();
    Err(Error::NonConvergence {
        iterations: POWER_MAX_ITER,
        previous: history[n - 2],
        last: history[n - 1],
    })
}

fn check_truncation(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("truncation must be at least 1", 0.0));
    }
    Ok(())
}

/// Norm of the form on `A²_ω × A²_ω` restricted to polynomials of degree `< n`:
/// the top singular value of `m_{j+k}/(σ_j σ_k)^{1/2}`.
pub fn form_norm_22(spec: &HankelFormSpec, n: usize) -> Result<NormEstimate> {
    if spec.p != 2.0 || spec.q != 2.0 {
        return Err(Error::Precondition(format!(
            "spectral estimate needs p = q = 2, got p = {}, q = {}",
            spec.p, spec.q
        )));
    }
    check_truncation(n)?;
    let view = HankelMatrixView::new(&spec.mu, &spec.omega, n)?;
    let s = top_singular(&view)?;
    Ok(NormEstimate {
        value: s.value,
        kind: EstimateKind::Band,
        truncation: n,
        iterations: s.iterations,
        history: s.history,
    })
}

/// The (f, g) pair attaining the (2,2) value: `g = D v`, `f = D conj(A v)/s`.
fn spectral_pair(view: &HankelMatrixView, omega: &RadialWeight) -> Result<(Vec<C64>, Vec<C64>)> {
    let s = top_singular(view)?;
    let n = view.dim();
    let d: Vec<f64> = omega.sigmas(n).iter().map(|v| 1.0 / v.sqrt()).collect();
    let av = view.apply(&s.right);
    let mut f: Vec<C64> = av.iter().zip(&d).map(|(v, di)| v.conj() * di).collect();
    let mut g: Vec<C64> = s.right.iter().zip(&d).map(|(v, di)| v * di).collect();
    normalize(&mut f);
    normalize(&mut g);
    Ok((f, g))
}

#[derive(Clone, Debug)]
pub struct AscentOptions {
    pub restarts: usize,
    pub steps: usize,
    /// Initial relative step; grows by 1.5 on success, halves on failure.
    pub initial_step: f64,
    pub seed: u64,
    /// Also start from the (2,2) extremal pair.
    pub warm_start: bool,
    pub radial_nodes: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            restarts: 8,
            steps: 200,
            initial_step: 0.25,
            seed: 0,
            warm_start: true,
            radial_nodes: 96,
        }
    }
}

/// One backtracking step along `grad` with relative step `*step`.
/// Returns the new value, or `None` when no trial improved.
fn backtrack<F: Fn(&[C64]) -> f64>(x: &mut Vec<C64>, grad: &[C64], value: f64, step: &mut f64, eval: F) -> Option<f64> {
    let gn = l2(grad);
    if !(gn > 0.0) || !gn.is_finite() {
        return None;
    }
    let xn = l2(x);
    for _ in 0..24 {
        let scale = *step * xn / gn;
        let mut trial: Vec<C64> = x.iter().zip(grad).map(|(a, g)| a + g * scale).collect();
        normalize(&mut trial);
        let v = eval(&trial);
        if v > value {
            *x = trial;
            *step = (*step * 1.5).min(1.0);
            return Some(v);
        }
        *step *= 0.5;
    }
    None
}

struct FormObjective<'a> {
    plan: &'a HankelPlan,
    rule: &'a DiskRule,
    p: f64,
    q: f64,
}

impl FormObjective<'_> {
    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.plan.apply(x).expect("dimensions fixed at construction")
    }

    /// `log|L| - log‖f‖_p - log‖g‖_q`.
    fn value(&self, f: &[C64], g: &[C64], mg: &[C64]) -> f64 {
        let l: C64 = f.iter().zip(mg).map(|(a, b)| a * b).sum();
        l.norm().ln() - self.rule.lp_pow(f, self.p).ln() / self.p - self.rule.lp_pow(g, self.q).ln() / self.q
    }

    /// Gradient in `f` for fixed `g` (`mg = M g`); the objective is
    /// symmetric so the same routine serves the `g` block.
    fn grad(&self, f: &[C64], mg: &[C64], p: f64) -> Vec<C64> {
        let l: C64 = f.iter().zip(mg).map(|(a, b)| a * b).sum();
        let (pp, gp) = self.rule.lp_pow_grad(f, p);
        let w = l / l.norm_sqr();
        mg.iter().zip(&gp).map(|(m, g)| m.conj() * w - g / (p * pp)).collect()
    }

    fn run(
        &self,
        mut f: Vec<C64>,
        mut g: Vec<C64>,
        steps: usize,
        step0: f64,
    ) -> (f64, Vec<C64>, Vec<C64>, usize, Vec<f64>) {
        let mut mg = self.apply(&g);
        let mut value = self.value(&f, &g, &mg);
        let mut history = vec![value];
        let (mut sf, mut sg) = (step0, step0);
        let mut it = 0;
        while it < steps && value.is_finite() {
            it += 1;
            let gf = self.grad(&f, &mg, self.p);
            let a = backtrack(&mut f, &gf, value, &mut sf, |t| self.value(t, &g, &mg));
            if let Some(v) = a {
                value = v;
            }
            let mf = self.apply(&f);
            let gg = self.grad(&g, &mf, self.q);
            let b = backtrack(&mut g, &gg, value, &mut sg, |t| {
                let mt = self.apply(t);
                self.value(&f, t, &mt)
            });
            if let Some(v) = b {
                value = v;
            }
            mg = self.apply(&g);
            history.push(value);
            if a.is_none() && b.is_none() {
                break;
            }
        }
        (value, f, g, it, history)
    }
}

/// Lower bound for `‖H_μ‖` on `A^p_ω × A^q_ω` by alternating ascent over
/// polynomials of degree `< n`. The best ratio is re-evaluated with `quad`.
pub fn form_norm_pq(
    spec: &HankelFormSpec,
    n: usize,
    ascent: &AscentOptions,
    quad: &QuadratureSpec,
) -> Result<NormEstimate> {
    check_truncation(n)?;
    let moments = spec.mu.moments(2 * n - 1);
    if moments.as_slice().iter().all(|m| m.norm() == 0.0) {
        return Ok(NormEstimate {
            value: 0.0,
            kind: EstimateKind::LowerBound,
            truncation: n,
            iterations: 0,
            history: vec![],
        });
    }
    let plan = HankelPlan::new(moments.as_slice(), n, n)?;
    let rule = DiskRule::new(&spec.omega, ascent.radial_nodes, (4 * n).next_power_of_two().max(64));
    let obj = FormObjective {
        plan: &plan,
        rule: &rule,
        p: spec.p,
        q: spec.q,
    };
    let mut starts: Vec<(Vec<C64>, Vec<C64>)> = (0..ascent.restarts)
        .map(|k| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(ascent.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k as u64));
            (unit_random(n, &mut rng), unit_random(n, &mut rng))
        })
        .collect();
    if ascent.warm_start {
        let view = HankelMatrixView::from_moments(&moments, &spec.omega, n)?;
        starts.push(spectral_pair(&view, &spec.omega)?);
    }
    let runs = par::map(&starts, |(f, g)| {
        obj.run(f.clone(), g.clone(), ascent.steps, ascent.initial_step)
    });
    let mut best: Option<(f64, usize)> = None;
    for (i, r) in runs.iter().enumerate() {
        if r.0.is_finite() && best.is_none_or(|(v, _)| r.0 > v) {
            best = Some((r.0, i));
        }
    }
    let Some((_, i)) = best else {
        return Ok(NormEstimate {
            value: 0.0,
            kind: EstimateKind::LowerBound,
            truncation: n,
            iterations: 0,
            history: vec![],
        });
    };
    let (_, f, g, iterations, history) = &runs[i];
    let f = TaylorSeries::new(f.clone());
    let g = TaylorSeries::new(g.clone());
    let l = crate::operators::hankel_form_eval(&spec.mu, &f, &g).norm();
    let value = l / (bergman_norm(&f, &spec.omega, spec.p, quad)? * bergman_norm(&g, &spec.omega, spec.q, quad)?);
    Ok(NormEstimate {
        value,
        kind: EstimateKind::LowerBound,
        truncation: n,
        iterations: *iterations,
        history: history.iter().map(|v| v.exp()).collect(),
    })
}

/// Lower bound for `‖H_μ^ω‖_{A^p_ω → conj(A^q_ω)}` by ascent on
/// `‖H_μ^ω f‖_q / ‖f‖_p` over polynomials of degree `< n` (outputs truncated
/// to degree `< n`). Needs `1 < q < ∞`.
pub fn operator_norm_pq(
    mu: &ComplexMeasure,
    omega: &RadialWeight,
    p: f64,
    q: f64,
    n: usize,
    ascent: &AscentOptions,
    quad: &QuadratureSpec,
) -> Result<NormEstimate> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::domain("operator estimate needs 1 < q < infinity", q));
    }
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::domain("exponent p must be positive", p));
    }
    check_truncation(n)?;
    let moments = mu.moments(2 * n - 1);
    let zero = NormEstimate {
        value: 0.0,
        kind: EstimateKind::LowerBound,
        truncation: n,
        iterations: 0,
        history: vec![],
    };
    if moments.as_slice().iter().all(|m| m.norm() == 0.0) {
        return Ok(zero);
    }
    let plan = HankelPlan::new(moments.as_slice(), n, n)?;
    let inv_sigma: Vec<f64> = omega.sigmas(n).iter().map(|s| 1.0 / s).collect();
    let rule = DiskRule::new(omega, ascent.radial_nodes, (4 * n).next_power_of_two().max(64));
    let image = |f: &[C64]| -> Vec<C64> {
        plan.apply(f)
            .expect("fixed dimensions")
            .iter()
            .zip(&inv_sigma)
            .map(|(v, s)| (v * s).conj())
            .collect()
    };
    let value = |f: &[C64]| rule.lp_pow(&image(f), q).ln() / q - rule.lp_pow(f, p).ln() / p;
    let grad = |f: &[C64]| -> Vec<C64> {
        let c = image(f);
        let (cq, gc) = rule.lp_pow_grad(&c, q);
        let sg: Vec<C64> = gc.iter().zip(&inv_sigma).map(|(g, s)| g * s).collect();
        let back = plan.apply(&sg).expect("fixed dimensions");
        let (fp, gf) = rule.lp_pow_grad(f, p);
        back.iter()
            .zip(&gf)
            .map(|(b, g)| b.conj() / (q * cq) - g / (p * fp))
            .collect()
    };
    let mut starts: Vec<Vec<C64>> = (0..ascent.restarts)
        .map(|k| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(ascent.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k as u64));
            unit_random(n, &mut rng)
        })
        .collect();
    if ascent.warm_start {
        let view = HankelMatrixView::from_moments(&moments, omega, n)?;
        starts.push(spectral_pair(&view, omega)?.1);
    }
    let runs = par::map(&starts, |f0| {
        let mut f = f0.clone();
        let mut v = value(&f);
        let mut history = vec![v];
        let mut step = ascent.initial_step;
        let mut it = 0;
        while it < ascent.steps && v.is_finite() {
            it += 1;
            let g = grad(&f);
            match backtrack(&mut f, &g, v, &mut step, value) {
                Some(nv) => v = nv,
                None => break,
            }
            history.push(v);
        }
        (v, f, it, history)
    });
    let mut best: Option<usize> = None;
    for (i, r) in runs.iter().enumerate() {
        if r.0.is_finite() && best.is_none_or(|b| r.0 > runs[b].0) {
            best = Some(i);
        }
    }
    let Some(i) = best else { return Ok(zero) };
    let (_, f, iterations, history) = &runs[i];
    let c = TaylorSeries::new(image(f));
    let f = TaylorSeries::new(f.clone());
    let value = bergman_norm(&c, omega, q, quad)? / bergman_norm(&f, omega, p, quad)?;
    Ok(NormEstimate {
        value,
        kind: EstimateKind::LowerBound,
        truncation: n,
        iterations: *iterations,
        history: history.iter().map(|v| v.exp()).collect(),
    })
}

/// Which norm of `P_ω(μ̄)` stands on the dual side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualKind {
    /// The space dictated by the exponent case.
    Theorem,
    /// Plain Bloch norm of `P_ω(μ̄)` (an alternative in case II).
    Bloch,
}

/// Norm of `P_ω(μ̄)` (or `P_W(μ̄)` in case III) in the dual space of the case.
pub fn dual_norm(spec: &HankelFormSpec, n: usize) -> Result<f64> {
    dual_norm_with(spec, n, DualKind::Theorem, &QuadratureSpec::default())
}

pub fn dual_norm_with(spec: &HankelFormSpec, n: usize, kind: DualKind, quad: &QuadratureSpec) -> Result<f64> {
    let proj = |w: &RadialWeight| project(w, &spec.mu, true, n);
    if kind == DualKind::Bloch {
        return Ok(bloch_norm(&proj(&spec.omega), quad).value);
    }
    match spec.case {
        FormCase::I => bergman_norm(
            &proj(&spec.omega),
            &spec.omega,
            spec.r_prime.expect("case I has r'"),
            quad,
        ),
        FormCase::II => d_omega_bmoa_norm(&proj(&spec.omega), &spec.omega, &default_radii()),
        FormCase::III => {
            let w = RadialWeight::weight_w(1.0 / spec.r, &spec.omega)?;
            Ok(bloch_norm(&proj(&w), quad).value)
        }
    }
}

/// Eight test symbols: atoms at several radii and arguments, a two-atom sum,
/// and two anti-analytic densities against `omega`.
pub fn default_corpus(omega: &RadialWeight) -> Vec<ComplexMeasure> {
    let atom = |z: C64, c: C64| ComplexMeasure::atom(z, c).expect("atoms inside the disk");
    vec![
        atom(C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        atom(C64::new(0.3, 0.0), C64::new(1.0, 0.0)),
        atom(C64::from_polar(0.5, 1.0), C64::new(0.0, 1.0)),
        atom(C64::new(-0.6, 0.0), C64::new(0.5, 0.0)),
        atom(C64::new(0.0, 0.7), C64::new(1.0, -1.0)),
        atom(C64::new(0.4, 0.0), C64::new(1.0, 0.0))
            .with_atom(C64::new(0.0, -0.2), C64::new(-0.5, 0.0))
            .expect("inside"),
        ComplexMeasure::anti_analytic(TaylorSeries::from_real(&[1.0, 1.0]), omega),
        ComplexMeasure::anti_analytic(
            TaylorSeries::new(vec![C64::new(0.0, 0.0), C64::new(0.0, -0.5), C64::new(1.0, 0.0)]),
            omega,
        ),
    ]
}

#[derive(Clone, Debug)]
pub struct RatioRow {
    pub symbol: usize,
    pub truncation: usize,
    pub estimate: f64,
    pub kind: EstimateKind,
    pub dual: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct RatioTable {
    pub case: FormCase,
    pub rows: Vec<RatioRow>,
    pub ladder: Vec<usize>,
    /// Min and max ratio at the largest truncation.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`.
    pub verdict: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOptions {
    pub ladder: Vec<usize>,
    pub ascent: AscentOptions,
    pub dual: DualKind,
    pub quad: QuadratureSpec,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            ladder: vec![16, 32],
            ascent: AscentOptions::default(),
            dual: DualKind::Theorem,
            quad: QuadratureSpec::default(),
        }
    }
}

fn summarize(case: FormCase, rows: Vec<RatioRow>, ladder: &[usize]) -> Result<RatioTable> {
    let top = *ladder
        .iter()
        .max()
        .ok_or_else(|| Error::Precondition("empty truncation ladder".into()))?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for r in rows.iter().filter(|r| r.truncation == top) {
        lo = lo.min(r.ratio);
        hi = hi.max(r.ratio);
    }
    Ok(RatioTable {
        case,
        rows,
        ladder: ladder.to_vec(),
        min_ratio: lo,
        max_ratio: hi,
        verdict: hi / lo,
    })
}

fn require_corpus(corpus: &[ComplexMeasure]) -> Result<()> {
    if corpus.is_empty() {
        return Err(Error::Precondition("no symbols in corpus".into()));
    }
    Ok(())
}

/// Form estimate against dual norm for every symbol and truncation.
pub fn theorem1_ratio_experiment(
    corpus: &[ComplexMeasure],
    omega: &RadialWeight,
    p: f64,
    q: f64,
    opts: &ExperimentOptions,
) -> Result<RatioTable> {
    require_corpus(corpus)?;
    let case = HankelFormSpec::new(ComplexMeasure::zero(), omega.clone(), p, q)?.case;
    let jobs: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|s| opts.ladder.iter().map(move |&n| (s, n)))
        .collect();
    let rows = par::map(&jobs, |&(s, n)| -> Result<RatioRow> {
        let spec = HankelFormSpec::new(corpus[s].clone(), omega.clone(), p, q)?;
        let est = if p == 2.0 && q == 2.0 {
            form_norm_22(&spec, n)?
        } else {
            form_norm_pq(&spec, n, &opts.ascent, &opts.quad)?
        };
        let dual = dual_norm_with(&spec, n, opts.dual, &opts.quad)?;
        Ok(RatioRow {
            symbol: s,
            truncation: n,
            estimate: est.value,
            kind: est.kind,
            dual,
            ratio: est.value / dual,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    summarize(case, rows, &opts.ladder)
}

/// Operator estimate `A^p → conj(A^q)` against the dual norm of the form on
/// `A^p × A^{q'}`. Needs `1 < q < ∞`.
pub fn theorem2_ratio_experiment(
    corpus: &[ComplexMeasure],
    omega: &RadialWeight,
    p: f64,
    q: f64,
    opts: &ExperimentOptions,
) -> Result<RatioTable> {
    require_corpus(corpus)?;
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::domain("operator experiment needs 1 < q < infinity", q));
    }
    let q_conj = q / (q - 1.0);
    let case = HankelFormSpec::new(ComplexMeasure::zero(), omega.clone(), p, q_conj)?.case;
    let jobs: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|s| opts.ladder.iter().map(move |&n| (s, n)))
        .collect();
    let rows = par::map(&jobs, |&(s, n)| -> Result<RatioRow> {
        let est = operator_norm_pq(&corpus[s], omega, p, q, n, &opts.ascent, &opts.quad)?;
        let spec = HankelFormSpec::new(corpus[s].clone(), omega.clone(), p, q_conj)?;
        let dual = dual_norm_with(&spec, n, opts.dual, &opts.quad)?;
        Ok(RatioRow {
            symbol: s,
            truncation: n,
            estimate: est.value,
            kind: est.kind,
            dual,
            ratio: est.value / dual,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    summarize(case, rows, &opts.ladder)
}

/// Value of a sup-type test and whether it looks divergent on the grid.
#[derive(Clone, Debug)]
pub struct SupTest {
    pub value: f64,
    pub divergent: bool,
    pub argmax: C64,
    pub radial_profile: Vec<(f64, f64)>,
}

/// Default z grid for the sup tests.
pub fn default_test_grid() -> SupGrid {
    SupGrid::default()
}

/// `sup_z |∫(1 - z̄ξ)^{-4-2β} dμ(ξ)| (1-|z|²)^{2β+4-2/p} / ω̂(|z|)^{2/p}`.
///
/// Requires `0 < p ≤ 2` and `p(β+1) + p > γ + 1`, where `γ` is the growth
/// exponent of `ω̂`.
pub fn hankel_measure_detector(
    mu: &ComplexMeasure,
    omega: &RadialWeight,
    p: f64,
    beta: f64,
    grid: &SupGrid,
) -> Result<SupTest> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::domain("detector needs 0 < p <= 2", p));
    }
    let gamma = growth_exponent(omega, &default_doubling_grid(50))?;
    if !(p * (beta + 1.0) + p > gamma + 1.0) {
        return Err(Error::Precondition(format!(
            "beta = {beta} too small: need p(beta+1)+p > gamma+1 with gamma = {gamma} (p = {p})"
        )));
    }
    let s = 4.0 + 2.0 * beta;
    let expo = 2.0 * beta + 4.0 - 2.0 / p;
    for &r in &grid.radii {
        omega.tail(r)?;
    }
    let point = |z: C64| -> f64 {
        let r2 = z.norm_sqr();
        let t = omega.tail(z.norm()).unwrap_or(f64::NAN);
        mu.kernel_integral(z, s).norm() * (1.0 - r2).powf(expo) / t.powf(2.0 / p)
    };
    Ok(run_sup(grid, point))
}

/// `sup_z (1-|z|²)^t |∫(1 - z ξ̄)^{-2-α-t} dμ̄(ξ)|`.
pub fn standard_criterion(mu: &ComplexMeasure, alpha: f64, t: f64, grid: &SupGrid) -> Result<SupTest> {
    if !(t > 0.0) {
        return Err(Error::domain("criterion needs t > 0", t));
    }
    if !(alpha > -1.0) {
        return Err(Error::domain("criterion needs alpha > -1", alpha));
    }
    let s = 2.0 + alpha + t;
    let point = |z: C64| mu.kernel_integral(z, s).norm() * (1.0 - z.norm_sqr()).powf(t);
    Ok(run_sup(grid, point))
}

fn run_sup<P: Fn(C64) -> f64 + Sync>(grid: &SupGrid, point: P) -> SupTest {
    let a = grid.angles;
    let res = sup_search(
        grid,
        |r| {
            (0..a)
                .map(|j| point(C64::from_polar(r, 2.0 * PI * j as f64 / a as f64)))
                .collect()
        },
        &point,
    );
    SupTest {
        value: res.value,
        divergent: res.grows_at_boundary(),
        argmax: res.argmax,
        radial_profile: res.radial_profile,
    }
}

/// `f = F^{r/p}`, `g = F^{r/q}` to degree `n`, for `F` without zeros on the
/// closed disk.
pub fn factor_zero_free(
    big_f: &TaylorSeries,
    r: f64,
    p: f64,
    q: f64,
    n: usize,
) -> Result<(TaylorSeries, TaylorSeries)> {
    for v in [r, p, q] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain("exponents must be positive", v));
        }
    }
    check_zero_free(big_f)?;
    Ok((big_f.powf(r / p, n)?, big_f.powf(r / q, n)?))
}

/// Minimum-modulus scan of the closed disk plus a winding-number count on the
/// unit circle.
fn check_zero_free(f: &TaylorSeries) -> Result<()> {
    const ANGLES: usize = 2048;
    let mut max_mod = 0.0f64;
    let mut min_mod = f64::INFINITY;
    let mut radii: Vec<f64> = (0..=64).map(|k| k as f64 / 64.0).collect();
    radii.extend([0.995, 0.999]);
    for &r in &radii {
        for j in 0..ANGLES {
            let v = f
                .evaluate(C64::from_polar(r, 2.0 * PI * j as f64 / ANGLES as f64))
                .norm();
            max_mod = max_mod.max(v);
            min_mod = min_mod.min(v);
        }
    }
    if !(min_mod > 1e-6 * max_mod) {
        return Err(Error::Unsupported(format!(
            "function has a zero (or near-zero, |F| = {min_mod:e}) in the closed disk; only zero-free inputs are factorized"
        )));
    }
    let mut winding = 0.0;
    let mut prev = f.evaluate(C64::new(1.0, 0.0));
    for j in 1..=ANGLES {
        let v = f.evaluate(C64::from_polar(1.0, 2.0 * PI * j as f64 / ANGLES as f64));
        winding += (v / prev).arg();
        prev = v;
    }
    let zeros = (winding / (2.0 * PI)).round();
    if zeros != 0.0 {
        return Err(Error::Unsupported(format!(
            "function has {zeros} zero(s) in the disk; only zero-free inputs are factorized"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn spec(mu: ComplexMeasure, omega: RadialWeight, p: f64, q: f64) -> HankelFormSpec {
        HankelFormSpec::new(mu, omega, p, q).unwrap()
    }

    #[test]
    fn case_split() {
        let mu = ComplexMeasure::zero();
        let w = RadialWeight::constant();
        let s = spec(mu.clone(), w.clone(), 4.0, 4.0);
        assert_eq!((s.case, s.r, s.r_prime), (FormCase::I, 2.0, Some(2.0)));
        assert_eq!(spec(mu.clone(), w.clone(), 2.0, 2.0).case, FormCase::II);
        assert_eq!(spec(mu.clone(), w.clone(), 3.0, 1.5).case, FormCase::II);
        let s = spec(mu, w, 1.0, 1.0);
        assert_eq!((s.case, s.r), (FormCase::III, 0.5));
    }

    #[test]
    fn spectral_examples() {
        let one = RadialWeight::constant();
        let s = spec(ComplexMeasure::dirac(c(0.0)).unwrap(), one.clone(), 2.0, 2.0);
        assert!((form_norm_22(&s, 32).unwrap().value - 1.0).abs() < 1e-12);
        let s = spec(ComplexMeasure::dirac(c(0.5)).unwrap(), one.clone(), 2.0, 2.0);
        let v = form_norm_22(&s, 200).unwrap().value;
        assert!((v - 16.0 / 9.0).abs() < 0.02 * 16.0 / 9.0, "{v}");
        let s = spec(ComplexMeasure::zero(), one.clone(), 2.0, 2.0);
        assert_eq!(form_norm_22(&s, 16).unwrap().value, 0.0);
        assert!(form_norm_22(&spec(ComplexMeasure::zero(), one, 4.0, 2.0), 8).is_err());
    }

    #[test]
    fn ascent_examples() {
        let one = RadialWeight::constant();
        let quad = QuadratureSpec::default();
        let opts = AscentOptions {
            steps: 60,
            ..AscentOptions::default()
        };
        let s = spec(ComplexMeasure::dirac(c(0.0)).unwrap(), one.clone(), 1.0, 1.0);
        let v = form_norm_pq(&s, 8, &opts, &quad).unwrap().value;
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        let s = spec(ComplexMeasure::dirac(C64::new(0.2, 0.3)).unwrap(), one, 2.0, 2.0);
        let a = form_norm_pq(&s, 16, &opts, &quad).unwrap().value;
        let b = form_norm_22(&s, 16).unwrap().value;
        assert!(a <= b + 1e-6 && a >= 0.99 * b, "{a} vs {b}");
    }

    #[test]
    fn dual_examples() {
        let one = RadialWeight::constant();
        let a = 0.5;
        let s = spec(ComplexMeasure::dirac(c(a)).unwrap(), one.clone(), 4.0, 4.0);
        let want = (1.0 / (1.0 - a * a)).powi(2).sqrt();
        assert!((dual_norm(&s, 80).unwrap() - want).abs() < 1e-8);
        let s = spec(ComplexMeasure::atom(c(0.0), c(3.0)).unwrap(), one.clone(), 1.0, 1.0);
        let w2 = RadialWeight::weight_w(2.0, &one).unwrap();
        assert!((dual_norm(&s, 8).unwrap() - 3.0 / w2.sigma(0)).abs() < 1e-12);
        let s = spec(ComplexMeasure::dirac(c(0.0)).unwrap(), one, 2.0, 2.0);
        assert!((dual_norm(&s, 8).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn detector_examples() {
        let one = RadialWeight::constant();
        let grid = default_test_grid();
        let d = hankel_measure_detector(&ComplexMeasure::dirac(c(0.0)).unwrap(), &one, 2.0, 1.0, &grid).unwrap();
        let oracle = (0..=100_000)
            .map(|i| {
                let r = i as f64 / 100_000.0 * 0.999;
                (1.0 - r * r).powi(5) / (1.0 - r)
            })
            .fold(0.0, f64::max);
        assert!((d.value - oracle).abs() < 1e-9 * oracle && !d.divergent);
        let z = hankel_measure_detector(&ComplexMeasure::zero(), &one, 2.0, 1.0, &grid).unwrap();
        assert_eq!(z.value, 0.0);
        let err = hankel_measure_detector(&ComplexMeasure::zero(), &one, 1.0, -0.5, &grid).unwrap_err();
        assert!(err.to_string().contains("gamma"));
    }

    #[test]
    fn criterion_examples() {
        let grid = default_test_grid();
        let d0 = standard_criterion(&ComplexMeasure::dirac(c(0.0)).unwrap(), 0.0, 1.5, &grid).unwrap();
        assert!((d0.value - 1.0).abs() < 1e-14);
        let a = 0.6;
        let (alpha, t) = (1.0, 2.0);
        let d = standard_criterion(&ComplexMeasure::dirac(c(a)).unwrap(), alpha, t, &grid).unwrap();
        let oracle = (0..=200_000)
            .map(|i| {
                let r = i as f64 / 200_000.0;
                (1.0 - r * r).powf(t) * (1.0 - r * a).powf(-2.0 - alpha - t)
            })
            .fold(0.0, f64::max);
        assert!((d.value - oracle).abs() < 1e-8 * oracle, "{} vs {oracle}", d.value);
    }

    #[test]
    fn factorization() {
        let one = TaylorSeries::constant(c(1.0));
        let (f, g) = factor_zero_free(&one, 1.0, 2.0, 2.0, 10).unwrap();
        assert!(f.max_coeff_diff(&one) < 1e-15 && g.max_coeff_diff(&one) < 1e-15);
        // (1 - z/2)^{-2} = Σ (n+1) z^n / 2^n
        let big: Vec<f64> = (0..200).map(|n| (n as f64 + 1.0) * 0.5f64.powi(n)).collect();
        let (f, _) = factor_zero_free(&TaylorSeries::from_real(&big), 1.0, 2.0, 2.0, 60).unwrap();
        let want: Vec<f64> = (0..=60).map(|n| 0.5f64.powi(n)).collect();
        assert!(f.max_coeff_diff(&TaylorSeries::from_real(&want)) < 1e-12);
        let with_zero = TaylorSeries::from_real(&[0.5, -1.0]);
        assert!(matches!(
            factor_zero_free(&with_zero, 1.0, 2.0, 2.0, 10),
            Err(Error::Unsupported(_))
        ));
    }
}
