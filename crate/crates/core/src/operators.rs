//! Diagonal coefficient multipliers (`R^{ω,ν}`, `D^ω`, `D_ω`) and Hankel
//! forms, operators and fast Hankel matrix-vector products.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::analytic::TaylorSeries;
use crate::error::{Error, Result};
use crate::measures::{ComplexMeasure, MomentSequence};
use crate::weights::RadialWeight;

/// Coefficient multiplier `f_n ↦ r_n f_n`.
#[derive(Clone, Debug)]
pub struct DiagonalMultiplier {
    pub ratios: Vec<f64>,
}

impl DiagonalMultiplier {
    /// `r_n = ω_{2n+1}/ν_{2n+1}`, the symbol of `R^{ω,ν}`.
    pub fn fractional(omega: &RadialWeight, nu: &RadialWeight, len: usize) -> Self {
        let a = omega.odd_moments(len);
        let b = nu.odd_moments(len);
        DiagonalMultiplier {
            ratios: a.iter().zip(&b).map(|(x, y)| x / y).collect(),
        }
    }

    /// `r_n = 1/ω_{2n+1}` (`D^ω`).
    pub fn upper(omega: &RadialWeight, len: usize) -> Self {
        DiagonalMultiplier {
            ratios: omega.odd_moments(len).iter().map(|m| 1.0 / m).collect(),
        }
    }

    /// `r_n = ω_{2n+1}` (`D_ω`).
    pub fn lower(omega: &RadialWeight, len: usize) -> Self {
        DiagonalMultiplier {
            ratios: omega.odd_moments(len),
        }
    }

    pub fn apply(&self, f: &TaylorSeries) -> TaylorSeries {
        assert!(self.ratios.len() > f.degree(), "multiplier shorter than series");
        TaylorSeries::new(f.coeffs().iter().zip(&self.ratios).map(|(&c, &r)| c * r).collect())
    }

    /// `|r_N^{1/N} - 1|`, which tends to zero for moment ratios.
    pub fn root_defect(&self) -> f64 {
        let n = self.ratios.len() - 1;
        if n == 0 {
            return 0.0;
        }
        (self.ratios[n].powf(1.0 / n as f64) - 1.0).abs()
    }
}

/// `R^{ω,ν} f = Σ (ω_{2n+1}/ν_{2n+1}) f_n z^n`.
pub fn frac_r(omega: &RadialWeight, nu: &RadialWeight, f: &TaylorSeries) -> TaylorSeries {
    DiagonalMultiplier::fractional(omega, nu, f.degree() + 1).apply(f)
}

/// `D^ω f = Σ f_n/ω_{2n+1} z^n`.
pub fn d_upper(omega: &RadialWeight, f: &TaylorSeries) -> TaylorSeries {
    DiagonalMultiplier::upper(omega, f.degree() + 1).apply(f)
}

/// `D_ω f = Σ ω_{2n+1} f_n z^n`.
pub fn d_lower(omega: &RadialWeight, f: &TaylorSeries) -> TaylorSeries {
    DiagonalMultiplier::lower(omega, f.degree() + 1).apply(f)
}

/// `H_μ(f, g) = ∫ f g dμ = Σ_k (fg)_k m_k`.
pub fn hankel_form_eval(mu: &ComplexMeasure, f: &TaylorSeries, g: &TaylorSeries) -> C64 {
    mu.integrate(&f.multiply(g, None))
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Smallest `2^a 3^b >= n`.
fn smooth_length(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p3 = 1;
    while p3 < best {
        let mut v = p3;
        while v < n {
            v *= 2;
        }
        best = best.min(v);
        p3 *= 3;
    }
    best
}

/// FFT plan for `y_m = Σ_{n<n_in} m_{m+n} x_n`, `m < n_out`.
///
/// The moment transform is computed once; every product allocates its own
/// scratch, so a plan can be shared between threads.
pub struct HankelPlan {
    n_in: usize,
    n_out: usize,
    moments_hat: Vec<C64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl HankelPlan {
    pub fn new(moments: &[C64], n_in: usize, n_out: usize) -> Result<Self> {
        let needed = n_in + n_out - 1;
        if n_in == 0 || n_out == 0 || moments.len() < needed {
            return Err(Error::Shape {
                expected: format!("at least {needed} moments"),
                got: format!("{}", moments.len()),
            });
        }
        // 2N-1 points already avoid wrap-around; 3N+1 keeps a margin
        let len = smooth_length((needed + n_in - 1).max(3 * n_in.max(n_out) + 1));
        let (forward, inverse) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(len), p.plan_fft_inverse(len))
        });
        let mut moments_hat = vec![C64::new(0.0, 0.0); len];
        moments_hat[..needed].copy_from_slice(&moments[..needed]);
        forward.process(&mut moments_hat);
        Ok(HankelPlan {
            n_in,
            n_out,
            moments_hat,
            forward,
            inverse,
        })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.n_in {
            return Err(Error::Shape {
                expected: format!("vector of length {}", self.n_in),
                got: format!("{}", x.len()),
            });
        }
        let len = self.moments_hat.len();
        let mut buf = vec![C64::new(0.0, 0.0); len];
        for (j, &v) in x.iter().rev().enumerate() {
            buf[j] = v;
        }
        self.forward.process(&mut buf);
        for (b, m) in buf.iter_mut().zip(&self.moments_hat) {
            *b *= m;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / len as f64;
        Ok(buf[self.n_in - 1..self.n_in - 1 + self.n_out]
            .iter()
            .map(|v| v * scale)
            .collect())
    }
}

/// Square Hankel product `y_m = Σ_{n=0}^N m_{m+n} x_n` for `x` of length `N+1`.
///
/// Runs in `O(N log N)` through a cyclic convolution of length at least `3N+1`.
pub fn hankel_matvec(moments: &MomentSequence, x: &[C64]) -> Result<Vec<C64>> {
    let n = x.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if moments.len() < 2 * n - 1 {
        return Err(Error::Shape {
            expected: format!("at least {} moments for a vector of length {n}", 2 * n - 1),
            got: format!("{}", moments.len()),
        });
    }
    HankelPlan::new(moments.as_slice(), n, n)?.apply(x)
}

/// The conjugate (analytic) representative of the anti-analytic `H_μ^ω f`,
/// truncated to degree `n`: `c_k = conj(σ_k^{-1} Σ_j f_j m_{j+k})`.
pub fn hankel_operator_apply(
    mu: &ComplexMeasure,
    omega: &RadialWeight,
    f: &TaylorSeries,
    n: usize,
) -> Result<TaylorSeries> {
    let n_in = f.degree() + 1;
    let moments = mu.moments(f.degree() + n);
    let plan = HankelPlan::new(moments.as_slice(), n_in, n + 1)?;
    let y = plan.apply(f.coeffs())?;
    let sig = omega.sigmas(n + 1);
    Ok(TaylorSeries::new(
        y.iter().zip(&sig).map(|(v, s)| (v / s).conj()).collect(),
    ))
}

/// The matrix `A_{mn} = m_{m+n}/(σ_m σ_n)^{1/2}`, `m, n < N`, applied through
/// a [`HankelPlan`].
pub struct HankelMatrixView {
    plan: HankelPlan,
    scale: Vec<f64>,
}

impl HankelMatrixView {
    pub fn new(mu: &ComplexMeasure, omega: &RadialWeight, n: usize) -> Result<Self> {
        let moments = mu.moments(2 * n - 2);
        Self::from_moments(&moments, omega, n)
    }

    pub fn from_moments(moments: &MomentSequence, omega: &RadialWeight, n: usize) -> Result<Self> {
        let plan = HankelPlan::new(moments.as_slice(), n, n)?;
        let scale = omega.sigmas(n).iter().map(|s| 1.0 / s.sqrt()).collect();
        Ok(HankelMatrixView { plan, scale })
    }

    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    /// `A x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let scaled: Vec<C64> = x.iter().zip(&self.scale).map(|(v, s)| v * s).collect();
        let y = self.plan.apply(&scaled).expect("dimensions fixed at construction");
        y.iter().zip(&self.scale).map(|(v, s)| v * s).collect()
    }

    /// `A* x = conj(A conj(x))`, since `A` is complex symmetric.
    pub fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let xc: Vec<C64> = x.iter().map(|v| v.conj()).collect();
        self.apply(&xc).into_iter().map(|v| v.conj()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn naive(m: &[C64], x: &[C64]) -> Vec<C64> {
        (0..x.len())
            .map(|i| x.iter().enumerate().map(|(j, v)| m[i + j] * v).sum())
            .collect()
    }

    #[test]
    fn frac_r_examples() {
        let one = RadialWeight::constant();
        let f = TaylorSeries::from_real(&[0.0, 1.0]);
        assert_eq!(frac_r(&one, &one, &f), f);
        let nu = RadialWeight::custom("2(1-r)", |r| 2.0 * (1.0 - r));
        let out = frac_r(&one, &nu, &f);
        assert!((out.coeff(1) - c(2.5)).norm() < 1e-12);
        assert_eq!(out.coeff(0), c(0.0));
    }

    #[test]
    fn d_upper_on_constant_weight() {
        let one = RadialWeight::constant();
        for n in 0..10 {
            let z = TaylorSeries::monomial(n, c(1.0));
            let out = d_upper(&one, &z);
            assert!((out.coeff(n) - c(2.0 * n as f64 + 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn hankel_form_examples() {
        let a = C64::new(0.4, -0.3);
        let mu = ComplexMeasure::dirac(a).unwrap();
        let one = TaylorSeries::constant(c(1.0));
        let z = TaylorSeries::from_real(&[0.0, 1.0]);
        assert!((hankel_form_eval(&mu, &one, &one) - c(1.0)).norm() < 1e-15);
        assert!((hankel_form_eval(&mu, &z, &z) - a * a).norm() < 1e-15);
        let area = ComplexMeasure::anti_analytic(one.clone(), &RadialWeight::constant());
        let f = TaylorSeries::from_real(&[2.0, 1.0, 3.0]);
        let g = TaylorSeries::from_real(&[-1.5, 4.0]);
        assert!((hankel_form_eval(&area, &f, &g) - c(-3.0)).norm() < 1e-14);
    }

    #[test]
    fn matvec_examples() {
        let mut m = vec![c(0.0); 9];
        m[0] = c(1.0);
        let x: Vec<C64> = (0..5).map(|i| C64::new(i as f64 + 1.0, -1.0)).collect();
        let y = hankel_matvec(&MomentSequence(m), &x).unwrap();
        assert!((y[0] - x[0]).norm() < 1e-14);
        assert!(y[1..].iter().all(|v| v.norm() < 1e-14));

        let a = C64::new(0.7, 0.2);
        let m: Vec<C64> = (0..9).map(|k| a.powu(k)).collect();
        let mut e0 = vec![c(0.0); 5];
        e0[0] = c(1.0);
        let y = hankel_matvec(&MomentSequence(m), &e0).unwrap();
        for (k, v) in y.iter().enumerate() {
            assert!((v - a.powu(k as u32)).norm() < 1e-14);
        }
    }

    #[test]
    fn matvec_shape_error() {
        let m = MomentSequence(vec![c(1.0); 4]);
        assert!(matches!(hankel_matvec(&m, &[c(1.0); 3]), Err(Error::Shape { .. })));
    }

    #[test]
    fn rectangular_plan_matches_naive() {
        let m: Vec<C64> = (0..40)
            .map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let x: Vec<C64> = (0..7).map(|k| C64::new(k as f64, 1.0)).collect();
        let plan = HankelPlan::new(&m, 7, 20).unwrap();
        let y = plan.apply(&x).unwrap();
        for (i, yi) in y.iter().enumerate() {
            let want: C64 = x.iter().enumerate().map(|(j, v)| m[i + j] * v).sum();
            assert!((yi - want).norm() < 1e-12);
        }
        let sq = hankel_matvec(&MomentSequence(m[..13].to_vec()), &x).unwrap();
        let want = naive(&m, &x);
        for (a, b) in sq.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn operator_examples() {
        let one = RadialWeight::constant();
        let f = TaylorSeries::constant(c(1.0));
        let out = hankel_operator_apply(&ComplexMeasure::dirac(c(0.0)).unwrap(), &one, &f, 6).unwrap();
        assert!((out.coeff(0) - c(1.0)).norm() < 1e-14);
        assert!(out.coeffs()[1..].iter().all(|v| v.norm() < 1e-14));

        let a = C64::new(0.5, 0.25);
        let out = hankel_operator_apply(&ComplexMeasure::dirac(a).unwrap(), &one, &f, 12).unwrap();
        for n in 0..=12 {
            let want = (a.powu(n as u32) * (n as f64 + 1.0)).conj();
            assert!((out.coeff(n) - want).norm() < 1e-13);
        }
    }
}
