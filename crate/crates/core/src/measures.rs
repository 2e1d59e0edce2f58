//! Complex measures made of finitely many atoms plus an optional
//! anti-analytic density `conj(h) dν` against a radial weight.

use std::ops::Index;

use num_complex::Complex64 as C64;

use crate::analytic::TaylorSeries;
use crate::error::{Error, Result};
use crate::norms::{inner_product, QuadratureSpec};
use crate::weights::RadialWeight;

/// `dμ = conj(h) dν`.
#[derive(Clone, Debug)]
pub struct Density {
    pub h: TaylorSeries,
    pub base: RadialWeight,
}

#[derive(Clone, Debug, Default)]
pub struct ComplexMeasure {
    atoms: Vec<(C64, C64)>,
    density: Option<Density>,
}

/// Moments `m_k = ∫ ξ^k dμ(ξ)`, `k = 0..=K`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence(pub Vec<C64>);

impl MomentSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn get(&self, k: usize) -> C64 {
        self.0.get(k).copied().unwrap_or_default()
    }
}

impl Index<usize> for MomentSequence {
    type Output = C64;
    fn index(&self, k: usize) -> &C64 {
        &self.0[k]
    }
}

impl ComplexMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c δ_z`.
    pub fn atom(z: C64, c: C64) -> Result<Self> {
        Self::zero().with_atom(z, c)
    }

    /// Unit point mass at `z`.
    pub fn dirac(z: C64) -> Result<Self> {
        Self::atom(z, C64::new(1.0, 0.0))
    }

    pub fn with_atom(mut self, z: C64, c: C64) -> Result<Self> {
        if !(z.norm() < 1.0) {
            return Err(Error::domain("atoms must lie in the open disk", z.norm()));
        }
        self.atoms.push((z, c));
        Ok(self)
    }

    /// `conj(h) dν` (replacing any existing density part).
    pub fn anti_analytic(h: TaylorSeries, base: &RadialWeight) -> Self {
        Self::zero().with_density(h, base)
    }

    pub fn with_density(mut self, h: TaylorSeries, base: &RadialWeight) -> Self {
        self.density = Some(Density { h, base: base.clone() });
        self
    }

    pub fn atoms(&self) -> &[(C64, C64)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    /// `λμ`.
    pub fn scale(&self, lambda: C64) -> Self {
        ComplexMeasure {
            atoms: self.atoms.iter().map(|&(z, c)| (z, c * lambda)).collect(),
            // conj(h)·λ = conj(conj(λ) h)
            density: self.density.as_ref().map(|d| Density {
                h: d.h.scale(lambda.conj()),
                base: d.base.clone(),
            }),
        }
    }

    /// `Σ|c_j|`.
    pub fn atomic_variation(&self) -> f64 {
        self.atoms.iter().map(|(_, c)| c.norm()).sum()
    }

    /// `m_k = Σ c_j z_j^k + 2ν_{2k+1} conj(h_k)`.
    pub fn moments(&self, k_max: usize) -> MomentSequence {
        let mut m = vec![C64::new(0.0, 0.0); k_max + 1];
        for &(z, c) in &self.atoms {
            let mut p = c;
            for v in m.iter_mut() {
                *v += p;
                p *= z;
            }
        }
        if let Some(d) = &self.density {
            let top = d.h.degree().min(k_max);
            let sig = d.base.sigmas(top + 1);
            for k in 0..=top {
                m[k] += d.h.coeff(k).conj() * sig[k];
            }
        }
        MomentSequence(m)
    }

    /// `∫ conj(ξ)^k dμ(ξ)`. The density contributes only at `k = 0`.
    pub fn conjugate_moments(&self, k_max: usize) -> MomentSequence {
        let mut m = vec![C64::new(0.0, 0.0); k_max + 1];
        for &(z, c) in &self.atoms {
            let zc = z.conj();
            let mut p = c;
            for v in m.iter_mut() {
                *v += p;
                p *= zc;
            }
        }
        if let Some(d) = &self.density {
            m[0] += d.h.coeff(0).conj() * d.base.sigma(0);
        }
        MomentSequence(m)
    }

    /// `∫ (1 - conj(z) ξ)^{-s} dμ(ξ)`, exactly: closed form on the atoms and a
    /// finite binomial sum on the polynomial density.
    pub fn kernel_integral(&self, z: C64, s: f64) -> C64 {
        let zc = z.conj();
        let mut acc: C64 = self
            .atoms
            .iter()
            .map(|&(a, c)| c * (C64::new(1.0, 0.0) - zc * a).powf(-s))
            .sum();
        if let Some(d) = &self.density {
            let deg = d.h.degree();
            let sig = d.base.sigmas(deg + 1);
            // (s)_k / k!
            let mut binom = 1.0;
            let mut p = C64::new(1.0, 0.0);
            for (k, &sk) in sig.iter().enumerate() {
                acc += binom * p * d.h.coeff(k).conj() * sk;
                binom *= (s + k as f64) / (k as f64 + 1.0);
                p *= zc;
            }
        }
        acc
    }

    /// `∫ F dμ` from the moments.
    pub fn integrate(&self, f: &TaylorSeries) -> C64 {
        let m = self.moments(f.degree());
        f.coeffs().iter().zip(m.as_slice()).map(|(a, b)| a * b).sum()
    }
}

/// Bergman projection, truncated to degree `n`.
///
/// With `conjugated` this is `P_ν[μ̄]`, coefficients `conj(m_k)/σ_k(ν)`;
/// otherwise `P_ν[μ]`, coefficients `(∫ conj(ξ)^k dμ)/σ_k(ν)`.
pub fn project(nu: &RadialWeight, mu: &ComplexMeasure, conjugated: bool, n: usize) -> TaylorSeries {
    let sig = nu.sigmas(n + 1);
    let coeffs = if conjugated {
        mu.moments(n)
            .0
            .into_iter()
            .zip(&sig)
            .map(|(m, s)| m.conj() / s)
            .collect()
    } else {
        mu.conjugate_moments(n)
            .0
            .into_iter()
            .zip(&sig)
            .map(|(m, s)| m / s)
            .collect()
    };
    TaylorSeries::new(coeffs)
}

/// Residual of the dilated projection identity at a fixed `ρ`.
#[derive(Clone, Copy, Debug)]
pub struct ProjectionResidual {
    /// `|∫F dμ − ∫F · conj((P_ν μ̄)_ρ) dν|`.
    pub residual: f64,
    /// `|∫F_ρ dμ − ∫F · conj((P_ν μ̄)_ρ) dν|`; zero up to quadrature error.
    pub identity_error: f64,
}

/// Compares `∫F dμ` (exact, from moments) with the quadrature value of
/// `∫ F conj((P_ν μ̄)_ρ) dν`.
pub fn dilated_projection_residual(
    f: &TaylorSeries,
    mu: &ComplexMeasure,
    nu: &RadialWeight,
    rho: f64,
    quad: &QuadratureSpec,
) -> Result<ProjectionResidual> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::domain("dilation radius must lie in [0, 1)", rho));
    }
    let exact = mu.integrate(f);
    let projected = project(nu, mu, true, f.degree()).dilate(rho);
    let rhs = inner_product(f, &projected, nu, quad);
    let dilated = mu.integrate(&f.dilate(rho));
    Ok(ProjectionResidual {
        residual: (exact - rhs).norm(),
        identity_error: (dilated - rhs).norm(),
    })
}
