//! Norms and condition functionals on the disk.
//!
//! Area integrals use a tensor rule: `R` Gauss–Legendre radii clustered at
//! the boundary through `t = 1 - (1-s)^3`, times a `T`-point trapezoid in
//! angle evaluated by FFT. Suprema are taken over a fixed polar grid and then
//! polished by golden-section search around the best grid points.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::analytic::{kernel, TaylorSeries};
use crate::error::{Error, Result};
use crate::operators::{d_lower, d_upper, frac_r};
use crate::par;
use crate::quadrature::{self, clustered_unit_rule};
use crate::weights::{last_decade_start, stable_sup, RadialWeight};

/// Polar grid for suprema over the disk.
#[derive(Clone, Debug)]
pub struct SupGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for SupGrid {
    /// Radii `j/256` for `j < 256` followed by `1 - 2^{-k}`, `k = 9..=20`;
    /// 64 equispaced angles.
    fn default() -> Self {
        SupGrid {
            radii: default_radii(),
            angles: 64,
        }
    }
}

/// `j/256` for `j < 256`, then `1 - 2^{-k}` for `k = 9..=20`.
pub fn default_radii() -> Vec<f64> {
    let mut radii: Vec<f64> = (0..256).map(|j| j as f64 / 256.0).collect();
    radii.extend((9..=20).map(|k| 1.0 - 2f64.powi(-k)));
    radii
}

/// The geometric ladder `1 - 2^{-k}`, `k = 1..=20`, preceded by 0.
pub fn boundary_ladder() -> Vec<f64> {
    let mut radii = vec![0.0];
    radii.extend((1..=20).map(|k| 1.0 - 2f64.powi(-k)));
    radii
}

#[derive(Clone, Debug)]
pub struct QuadratureSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub sup_grid: SupGrid,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_nodes: 400,
            angular_nodes: 1024,
            sup_grid: SupGrid::default(),
        }
    }
}

impl QuadratureSpec {
    /// Smaller rule for inner loops (norm ascent).
    pub fn coarse(max_degree: usize) -> Self {
        QuadratureSpec {
            radial_nodes: 96,
            angular_nodes: (4 * (max_degree + 1)).next_power_of_two().max(64),
            sup_grid: SupGrid::default(),
        }
    }
}

/// Tensor rule for `∫_D F dω` with precomputed radial weights.
pub struct DiskRule {
    radii: Vec<f64>,
    /// `2 r ω(r) w_r / T`
    weights: Vec<f64>,
    angular: usize,
    inverse: Arc<dyn Fft<f64>>,
    forward: Arc<dyn Fft<f64>>,
}

impl DiskRule {
    pub fn new(w: &RadialWeight, radial_nodes: usize, angular_nodes: usize) -> Self {
        let mut planner = FftPlanner::new();
        let inverse = planner.plan_fft_inverse(angular_nodes);
        let forward = planner.plan_fft_forward(angular_nodes);
        let (radii, weights) = clustered_unit_rule(radial_nodes)
            .into_iter()
            .map(|(t, wt)| (t, 2.0 * t * w.profile(t) * wt / angular_nodes as f64))
            .unzip();
        DiskRule {
            radii,
            weights,
            angular: angular_nodes,
            inverse,
            forward,
        }
    }

    pub fn for_spec(w: &RadialWeight, quad: &QuadratureSpec, degree: usize) -> Self {
        let t = quad.angular_nodes.max((2 * degree + 2).next_power_of_two());
        Self::new(w, quad.radial_nodes, t)
    }

    pub fn angular_nodes(&self) -> usize {
        self.angular
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Values of `f` at `r e^{2πij/T}`, `j < T`.
    pub fn circle(&self, f: &[C64], r: f64) -> Vec<C64> {
        circle_values(f, r, self.angular, self.inverse.as_ref())
    }

    /// `‖f‖_{p,ω}^p`.
    pub fn lp_pow(&self, f: &[C64], p: f64) -> f64 {
        let parts = par::map(&self.radii, |&r| {
            let vals = self.circle(f, r);
            vals.iter().map(|v| pow_abs(v.norm(), p)).sum::<f64>()
        });
        parts.iter().zip(&self.weights).map(|(m, w)| m * w).sum()
    }

    /// `‖f‖_{p,ω}^p` and its real gradient in coefficient space, written as
    /// the complex vector `∂/∂Re f_m + i ∂/∂Im f_m`.
    pub fn lp_pow_grad(&self, f: &[C64], p: f64) -> (f64, Vec<C64>) {
        let n = f.len();
        let t = self.angular;
        let parts = par::map(&(0..self.radii.len()).collect::<Vec<_>>(), |&i| {
            let r = self.radii[i];
            let w = self.weights[i];
            let mut vals = self.circle(f, r);
            let mut total = 0.0;
            for v in vals.iter_mut() {
                let a = v.norm();
                total += pow_abs(a, p);
                *v = if a > 0.0 {
                    *v * (p * w * a.powf(p - 2.0))
                } else {
                    C64::new(0.0, 0.0)
                };
            }
            // Σ_j h_j e^{-imθ_j}
            self.forward.process(&mut vals);
            let mut g = vec![C64::new(0.0, 0.0); n];
            let mut rp = 1.0;
            for (m, gm) in g.iter_mut().enumerate() {
                *gm = vals[m % t] * rp;
                rp *= r;
            }
            (total * w, g)
        });
        let mut value = 0.0;
        let mut grad = vec![C64::new(0.0, 0.0); n];
        for (v, g) in parts {
            value += v;
            for (a, b) in grad.iter_mut().zip(g) {
                *a += b;
            }
        }
        (value, grad)
    }

    /// `∫ f conj(g) dω`.
    pub fn inner(&self, f: &[C64], g: &[C64]) -> C64 {
        let parts = par::map(&self.radii, |&r| {
            let a = self.circle(f, r);
            let b = self.circle(g, r);
            a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum::<C64>()
        });
        parts.iter().zip(&self.weights).map(|(m, w)| m * w).sum()
    }
}

fn pow_abs(a: f64, p: f64) -> f64 {
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else if p == 4.0 {
        let s = a * a;
        s * s
    } else {
        a.powf(p)
    }
}

/// Folds `Σ f_n r^n e^{inθ}` modulo `T` and evaluates it with one inverse FFT.
fn circle_values(f: &[C64], r: f64, t: usize, inverse: &dyn Fft<f64>) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); t];
    let mut rp = 1.0;
    for (n, &c) in f.iter().enumerate() {
        buf[n % t] += c * rp;
        rp *= r;
        if rp == 0.0 {
            break;
        }
    }
    inverse.process(&mut buf);
    buf
}

/// `‖f‖_{p,ω}`.
pub fn bergman_norm(f: &TaylorSeries, w: &RadialWeight, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_p(p)?;
    let rule = DiskRule::for_spec(w, quad, f.degree());
    Ok(rule.lp_pow(f.coeffs(), p).powf(1.0 / p))
}

/// `‖f‖_{p,ω}` together with `|value(T) - value(2T)|`, the angular
/// resolution error for exponents that are not even integers.
pub fn bergman_norm_with_error(
    f: &TaylorSeries,
    w: &RadialWeight,
    p: f64,
    quad: &QuadratureSpec,
) -> Result<(f64, f64)> {
    check_p(p)?;
    let rule = DiskRule::for_spec(w, quad, f.degree());
    let v = rule.lp_pow(f.coeffs(), p).powf(1.0 / p);
    if p.fract() == 0.0 && (p as i64) % 2 == 0 {
        return Ok((v, 0.0));
    }
    let fine = DiskRule::new(w, quad.radial_nodes, 2 * rule.angular_nodes());
    let v2 = fine.lp_pow(f.coeffs(), p).powf(1.0 / p);
    Ok((v2, (v2 - v).abs()))
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::domain("exponent p must be positive", p));
    }
    Ok(())
}

/// `∫_D f conj(g) dω` on the quadrature grid.
pub fn inner_product(f: &TaylorSeries, g: &TaylorSeries, w: &RadialWeight, quad: &QuadratureSpec) -> C64 {
    let deg = f.degree().max(g.degree());
    let rule = DiskRule::for_spec(w, quad, deg);
    rule.inner(f.coeffs(), g.coeffs())
}

/// Supremum found over a polar grid.
#[derive(Clone, Debug)]
pub struct SupResult {
    pub value: f64,
    pub argmax: C64,
    /// Max over angles at each grid radius (before polishing).
    pub radial_profile: Vec<(f64, f64)>,
}

impl SupResult {
    /// True when the per-radius maxima increase strictly across the last
    /// decade of the grid and the last of them is the global grid maximum.
    pub fn grows_at_boundary(&self) -> bool {
        let radii: Vec<f64> = self.radial_profile.iter().map(|p| p.0).collect();
        let vals: Vec<f64> = self.radial_profile.iter().map(|p| p.1).collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return true;
        }
        let start = last_decade_start(&radii);
        let tail = &vals[start..];
        if tail.len() < 2 {
            return false;
        }
        let global = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        tail.windows(2).all(|w| w[1] > w[0]) && *tail.last().unwrap() >= global
    }
}

/// Grid search plus golden-section polish.
///
/// `on_circle(r)` returns the values at `r e^{2πij/A}`; `at_point` evaluates
/// one point and is used for the polish.
pub fn sup_search<C, P>(grid: &SupGrid, on_circle: C, at_point: P) -> SupResult
where
    C: Fn(f64) -> Vec<f64> + Sync,
    P: Fn(C64) -> f64,
{
    let a = grid.angles;
    let rows = par::map(&grid.radii, |&r| on_circle(r));
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    let mut radial_profile = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut best = (f64::NEG_INFINITY, 0);
        for (j, &v) in row.iter().enumerate() {
            if v > best.0 || v.is_nan() {
                best = (if v.is_nan() { f64::INFINITY } else { v }, j);
            }
        }
        radial_profile.push((grid.radii[i], best.0));
        cands.push((best.0, i, best.1));
    }
    // polish distinct peaks: grid points that dominate their 8 neighbours (angles wrap)
    let at = |i: usize, j: usize| rows[i][j % a];
    let mut peaks: Vec<(f64, usize, usize)> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(rows.len() - 1);
            let dominant = (lo..=hi).all(|ii| (a + j - 1..=a + j + 1).all(|jj| at(ii, jj) <= v));
            if dominant && v.is_finite() {
                peaks.push((v, i, j));
            }
        }
    }
    peaks.sort_by(|x, y| y.0.total_cmp(&x.0));
    cands.sort_by(|x, y| y.0.total_cmp(&x.0));
    let dtheta = 2.0 * PI / a as f64;
    let (mut value, mut argmax) = match cands.first() {
        Some(&(v, i, j)) => (v, C64::from_polar(grid.radii[i], j as f64 * dtheta)),
        None => (f64::NEG_INFINITY, C64::new(0.0, 0.0)),
    };
    if !value.is_finite() {
        return SupResult {
            value,
            argmax,
            radial_profile,
        };
    }
    let n = grid.radii.len();
    for &(_, i, j) in cands.iter().take(1).chain(peaks.iter().take(8)) {
        // bracket half-width: the wider neighbouring gap, re-centred on every sweep
        let dr = (grid.radii[i] - grid.radii[i.saturating_sub(1)]).max(grid.radii[(i + 1).min(n - 1)] - grid.radii[i]);
        let (r_min, r_max) = (grid.radii[0], grid.radii[n - 1]);
        let mut r = grid.radii[i];
        let mut th = j as f64 * dtheta;
        let mut best = at_point(C64::from_polar(r, th));
        // coordinate sweeps crawl along tilted ridges, so run them to convergence
        for _ in 0..64 {
            let start = best;
            let (rr, vr) = golden_max(
                |x| at_point(C64::from_polar(x, th)),
                (r - dr).max(r_min),
                (r + dr).min(r_max),
            );
            if vr > best {
                best = vr;
                r = rr;
            }
            let (tt, vt) = golden_max(|x| at_point(C64::from_polar(r, x)), th - dtheta, th + dtheta);
            if vt > best {
                best = vt;
                th = tt;
            }
            if best - start <= 1e-15 * best.abs() {
                break;
            }
        }
        if best > value {
            value = best;
            argmax = C64::from_polar(r, th);
        }
    }
    SupResult {
        value,
        argmax,
        radial_profile,
    }
}

/// Golden-section maximization on `[a, b]`; returns `(x, f(x))`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..80 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn angular_plan(a: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_inverse(a)
}

/// `sup (1-|z|²)|f'(z)| + |f(0)|`.
pub fn bloch_norm(f: &TaylorSeries, quad: &QuadratureSpec) -> SupResult {
    let df = f.derivative();
    let plan = angular_plan(quad.sup_grid.angles);
    let mut res = sup_search(
        &quad.sup_grid,
        |r| {
            circle_values(df.coeffs(), r, quad.sup_grid.angles, plan.as_ref())
                .iter()
                .map(|v| (1.0 - r * r) * v.norm())
                .collect()
        },
        |z| (1.0 - z.norm_sqr()) * df.evaluate(z).norm(),
    );
    res.value += f.coeff(0).norm();
    res
}

/// `b_k = Σ_n f_{n+k} conj(f_n)`, the nonnegative Fourier coefficients of
/// `|f(e^{iθ})|²`.
fn boundary_square_coeffs(f: &TaylorSeries) -> Vec<C64> {
    let c = f.coeffs();
    (0..c.len())
        .map(|k| (0..c.len() - k).map(|n| c[n + k] * c[n].conj()).sum())
        .collect()
}

/// Garsia norm `sup_z (P[|f|²](z) - |f(z)|²)^{1/2}`, computed from the exact
/// harmonic extension of the boundary trigonometric polynomial `|f|²`.
pub fn garsia_bmo(f: &TaylorSeries, quad: &QuadratureSpec) -> SupResult {
    let b = boundary_square_coeffs(f);
    let b0 = b[0].re;
    let mut tail = b.clone();
    tail[0] = C64::new(0.0, 0.0);
    let tail = TaylorSeries::new(tail);
    let a = quad.sup_grid.angles;
    let plan = angular_plan(a);
    let point = |z: C64| {
        let ext = b0 + 2.0 * tail.evaluate(z).re;
        (ext - f.evaluate(z).norm_sqr()).max(0.0).sqrt()
    };
    sup_search(
        &quad.sup_grid,
        |r| {
            let ext = circle_values(tail.coeffs(), r, a, plan.as_ref());
            let fv = circle_values(f.coeffs(), r, a, plan.as_ref());
            ext.iter()
                .zip(&fv)
                .map(|(e, v)| (b0 + 2.0 * e.re - v.norm_sqr()).max(0.0).sqrt())
                .collect()
        },
        point,
    )
}

/// Supremum over a dilation parameter.
#[derive(Clone, Debug)]
pub struct DilationSup {
    pub value: f64,
    pub rho: f64,
    pub profile: Vec<(f64, f64)>,
}

fn dilation_sup<F: Fn(f64) -> Result<f64> + Sync>(rho_grid: &[f64], g: F) -> Result<DilationSup> {
    for &r in rho_grid {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::domain("dilation radius must lie in [0, 1)", r));
        }
    }
    let values = par::map(rho_grid, |&r| g(r));
    let mut profile = Vec::with_capacity(values.len());
    for (r, v) in rho_grid.iter().zip(values) {
        profile.push((*r, v?));
    }
    let (i, &(mut rho, mut value)) = profile
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .ok_or_else(|| Error::Precondition("empty dilation grid".into()))?;
    if value > 0.0 {
        let lo = rho_grid[i.saturating_sub(1)].min(rho);
        let hi = rho_grid[(i + 1).min(rho_grid.len() - 1)].max(rho);
        let (r, v) = golden_max(|x| g(x).unwrap_or(f64::NEG_INFINITY), lo, hi);
        if v > value {
            value = v;
            rho = r;
        }
    }
    Ok(DilationSup { value, rho, profile })
}

/// Coarser grid used inside the dilation sweep of [`bmoa_infty_norm`].
fn inner_sup_spec() -> QuadratureSpec {
    let mut radii: Vec<f64> = (0..64).map(|j| j as f64 / 64.0).collect();
    radii.extend((7..=20).map(|k| 1.0 - 2f64.powi(-k)));
    QuadratureSpec {
        sup_grid: SupGrid { radii, angles: 32 },
        ..QuadratureSpec::default()
    }
}

/// `sup_ρ ‖f_ρ‖_{Garsia} ω̂(ρ)` over `rho_grid` (polished between grid points).
pub fn bmoa_infty_norm(f: &TaylorSeries, w: &RadialWeight, rho_grid: &[f64]) -> Result<DilationSup> {
    let spec = inner_sup_spec();
    dilation_sup(rho_grid, |rho| {
        Ok(garsia_bmo(&f.dilate(rho), &spec).value * w.tail(rho)?)
    })
}

/// `‖D^ω g‖_{BMOA(∞,ω)} + |g(0)|`.
pub fn d_omega_bmoa_norm(g: &TaylorSeries, w: &RadialWeight, rho_grid: &[f64]) -> Result<f64> {
    Ok(bmoa_infty_norm(&d_upper(w, g), w, rho_grid)?.value + g.coeff(0).norm())
}

/// Both sides of the `⟨f, g⟩_{ω∘ω}` pairing at a fixed `ρ`.
#[derive(Clone, Copy, Debug)]
pub struct Pairing {
    /// `Σ f_n conj(g_n) ρ^{2n+1} ω_{2n+1}²`.
    pub sum: C64,
    /// `ρ ∫ f_ρ conj((D_ω g)_ρ) dω` by quadrature; equals `2 · sum` because
    /// `‖z^n‖²_{A²_ω} = 2ω_{2n+1}` under normalized area measure.
    pub quadrature: C64,
}

pub fn pairing_omega_omega(
    f: &TaylorSeries,
    g: &TaylorSeries,
    w: &RadialWeight,
    rho: f64,
    quad: &QuadratureSpec,
) -> Result<Pairing> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::domain("pairing radius must lie in [0, 1)", rho));
    }
    let n = f.degree().min(g.degree());
    let m = w.odd_moments(n + 1);
    let sum = (0..=n)
        .map(|k| f.coeff(k) * g.coeff(k).conj() * rho.powi(2 * k as i32 + 1) * m[k] * m[k])
        .sum();
    let quadrature = inner_product(&f.dilate(rho), &d_lower(w, g).dilate(rho), w, quad) * rho;
    Ok(Pairing { sum, quadrature })
}

/// `sup_z (ν̂(|z|)/ω̂(|z|)) |R^{ω,ν} f(z)|`.
pub fn frac_bloch_sup(
    f: &TaylorSeries,
    omega: &RadialWeight,
    nu: &RadialWeight,
    quad: &QuadratureSpec,
) -> Result<SupResult> {
    let rf = frac_r(omega, nu, f);
    let factor = |r: f64| -> Result<f64> { Ok(nu.tail(r)? / omega.tail(r)?) };
    for &r in &quad.sup_grid.radii {
        factor(r)?;
    }
    let a = quad.sup_grid.angles;
    let plan = angular_plan(a);
    Ok(sup_search(
        &quad.sup_grid,
        |r| {
            let s = factor(r).unwrap_or(f64::NAN);
            circle_values(rf.coeffs(), r, a, plan.as_ref())
                .iter()
                .map(|v| s * v.norm())
                .collect()
        },
        |z| factor(z.norm()).unwrap_or(f64::NEG_INFINITY) * rf.evaluate(z).norm(),
    ))
}

/// Grid evaluation of `∫_0^ρ ω̂/(ν̂(1-t)) dt ≲ ω̂(ρ)/ν̂(ρ)`.
#[derive(Clone, Debug)]
pub struct BfracCondition {
    pub holds: bool,
    pub sup_ratio: f64,
    pub ratios: Vec<(f64, f64)>,
}

/// LHS/RHS on the grid; holds iff the max over the last decade of the grid is
/// within 10% of the max over the rest.
pub fn bfrac_condition(omega: &RadialWeight, nu: &RadialWeight, rho_grid: &[f64]) -> Result<BfracCondition> {
    let mut grid = rho_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut lhs = 0.0;
    let mut prev = 0.0;
    let mut ratios = Vec::with_capacity(grid.len());
    for &rho in &grid {
        let mut failure = None;
        let piece = quadrature::adaptive(
            |t| match (omega.tail(t), nu.tail(t)) {
                (Ok(a), Ok(b)) => a / (b * (1.0 - t)),
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            prev,
            rho,
            1e-10,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        lhs += piece;
        prev = rho;
        let rhs = omega.tail(rho)? / nu.tail(rho)?;
        ratios.push((rho, lhs / rhs));
    }
    let values: Vec<f64> = ratios.iter().map(|r| r.1).collect();
    let sup_ratio = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let holds = stable_sup(&values, last_decade_start(&grid), 0.10);
    Ok(BfracCondition {
        holds,
        sup_ratio,
        ratios,
    })
}

/// One row of a kernel-norm comparison.
#[derive(Clone, Debug)]
pub struct KernelNormRow {
    pub radius: f64,
    pub truncation: usize,
    /// `‖B_z^ν‖_{p,ω}^p`.
    pub lhs: f64,
    /// `∫_0^{|z|} ω̂/(ν̂^p (1-t)^p) dt`.
    pub rhs: f64,
    pub ratio: f64,
    /// `ω̂(|z|)/(ν̂(|z|)^p (1-|z|)^{p-1})`.
    pub rhs_simplified: f64,
    pub ratio_simplified: f64,
}

pub const KERNEL_TAIL_TOL: f64 = 1e-10;
pub const MAX_KERNEL_DEGREE: usize = 1 << 16;

/// Smallest `N` such that the coefficient tail of `B_a^ν` beyond `N` is below
/// `tol` relative to the coefficient sum.
pub fn kernel_truncation(nu: &RadialWeight, r: f64, tol: f64) -> Result<usize> {
    if r == 0.0 {
        return Ok(0);
    }
    let mut sum = 0.0;
    let mut coeff = 1.0 / nu.sigma(0);
    let mut block = 64;
    let mut n = 0;
    loop {
        let sig = nu.sigmas((n + block + 2).min(MAX_KERNEL_DEGREE + 2));
        while n + 1 < sig.len() {
            sum += coeff;
            let next = coeff * r * sig[n] / sig[n + 1];
            let q = next / coeff;
            if q < 1.0 && next / (1.0 - q) < tol * sum {
                return Ok(n);
            }
            coeff = next;
            n += 1;
        }
        if n >= MAX_KERNEL_DEGREE {
            let estimate = (tol.ln() / r.ln()).ceil() as usize;
            return Err(Error::Truncation {
                required: estimate.max(MAX_KERNEL_DEGREE + 1),
                limit: MAX_KERNEL_DEGREE,
            });
        }
        block *= 2;
    }
}

/// Kernel norms `‖B_z^ν‖^p_{p,ω}` against the radial integral that controls
/// them, for each radius in `ladder`.
pub fn kernel_norm_comparison(
    omega: &RadialWeight,
    nu: &RadialWeight,
    p: f64,
    ladder: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<KernelNormRow>> {
    check_p(p)?;
    let integrand = |t: f64| -> f64 {
        match (omega.tail(t), nu.tail(t)) {
            (Ok(a), Ok(b)) => a / (b.powf(p) * (1.0 - t).powf(p)),
            _ => f64::NAN,
        }
    };
    let mut rows = Vec::with_capacity(ladder.len());
    for &r in ladder {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::domain("kernel radius must lie in [0, 1)", r));
        }
        let n = kernel_truncation(nu, r, KERNEL_TAIL_TOL)?;
        let b = kernel(nu, C64::new(r, 0.0), n)?;
        let lhs = bergman_norm(&b, omega, p, quad)?.powf(p);
        let rhs = quadrature::adaptive(integrand, 0.0, r, 1e-10)?;
        let rhs_simplified = omega.tail(r)? / (nu.tail(r)?.powf(p) * (1.0 - r).powf(p - 1.0));
        rows.push(KernelNormRow {
            radius: r,
            truncation: n,
            lhs,
            rhs,
            ratio: if rhs > 0.0 { lhs / rhs } else { f64::INFINITY },
            rhs_simplified,
            ratio_simplified: lhs / rhs_simplified,
        });
    }
    Ok(rows)
}
