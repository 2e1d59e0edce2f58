//! Truncated Taylor series on the closed disk.

use std::io::Write;
use std::ops::{Add, Mul, Neg, Sub};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::weights::RadialWeight;

pub type C64 = Complex64;

/// Default kernel truncation degree.
pub const DEFAULT_KERNEL_DEGREE: usize = 256;

/// A polynomial `Σ_{n=0}^N f_n z^n` with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSeries {
    coeffs: Vec<C64>,
}

impl TaylorSeries {
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "a Taylor series needs at least one coefficient");
        TaylorSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0))
    }

    /// `c z^n`.
    pub fn monomial(n: usize, c: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient `f_n`, zero beyond the stored degree.
    pub fn coeff(&self, n: usize) -> C64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Horner evaluation.
    pub fn evaluate(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `f_ρ(z) = f(ρz)`.
    pub fn dilate(&self, rho: f64) -> Self {
        let mut p = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let v = c * p;
                p *= rho;
                v
            })
            .collect();
        Self::new(coeffs)
    }

    /// Cauchy product, of degree `deg f + deg g` unless `trunc` is given.
    pub fn multiply(&self, other: &Self, trunc: Option<usize>) -> Self {
        let full = self.degree() + other.degree();
        let deg = trunc.map_or(full, |t| t.min(full));
        let mut out = vec![C64::new(0.0, 0.0); deg + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(deg + 1) {
            for (j, &b) in other.coeffs.iter().enumerate().take(deg + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &c)| c * n as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Coefficient-wise conjugate, i.e. `z ↦ conj(f(conj z))`.
    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// `f(e^{iθ} z)`.
    pub fn rotate(&self, theta: f64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, &c)| c * C64::from_polar(1.0, theta * n as f64))
                .collect(),
        )
    }

    /// Keeps coefficients `0..=n`, zero-padding if needed.
    pub fn truncate(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, C64::new(0.0, 0.0));
        Self::new(coeffs)
    }

    /// Drops trailing zero coefficients (keeps at least the constant term).
    pub fn trim(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm_sqr() == 0.0) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// `f^s` to degree `n` with the principal value of `f_0^s`, through the
    /// recurrence `n f_0 g_n = Σ_{k=1}^n ((s+1)k - n) f_k g_{n-k}`.
    pub fn powf(&self, s: f64, n: usize) -> Result<Self> {
        let f0 = self.coeffs[0];
        if f0.norm() == 0.0 {
            return Err(Error::Unsupported("power series of f^s needs f(0) != 0".into()));
        }
        let mut g = Vec::with_capacity(n + 1);
        g.push(f0.powf(s));
        for m in 1..=n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=m.min(self.degree()) {
                acc += self.coeffs[k] * g[m - k] * ((s + 1.0) * k as f64 - m as f64);
            }
            g.push(acc / (f0 * m as f64));
        }
        Ok(Self::new(g))
    }

    /// Max modulus of the coefficient difference, padding the shorter side.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Writes rows `n,re,im` under a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,re,im")?;
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{n},{:?},{:?}", c.re, c.im)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    /// Parses rows `n,re,im`. Missing indices are zero.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::parse(i + 1, "expected `n,re,im`"));
            }
            let parsed = (cols[0].parse::<usize>(), cols[1].parse::<f64>(), cols[2].parse::<f64>());
            match parsed {
                (Ok(n), Ok(re), Ok(im)) => entries.push((n, C64::new(re, im))),
                _ if i == 0 => continue,
                _ => return Err(Error::parse(i + 1, format!("bad row `{line}`"))),
            }
        }
        let deg = entries
            .iter()
            .map(|e| e.0)
            .max()
            .ok_or_else(|| Error::parse(0, "no coefficient rows"))?;
        let mut coeffs = vec![C64::new(0.0, 0.0); deg + 1];
        for (n, c) in entries {
            coeffs[n] = c;
        }
        Ok(Self::new(coeffs))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }

    /// Parses shorthand such as `z2`, `1+0.5z`, `3z^4 - 2i z`, `(1-0.5i)z3`.
    pub fn parse_shorthand(text: &str) -> Result<Self> {
        crate::io::parse_polynomial(text)
    }
}

impl Add for &TaylorSeries {
    type Output = TaylorSeries;
    fn add(self, rhs: &TaylorSeries) -> TaylorSeries {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        TaylorSeries::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &TaylorSeries {
    type Output = TaylorSeries;
    fn sub(self, rhs: &TaylorSeries) -> TaylorSeries {
        self + &(-rhs)
    }
}

impl Neg for &TaylorSeries {
    type Output = TaylorSeries;
    fn neg(self) -> TaylorSeries {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &TaylorSeries {
    type Output = TaylorSeries;
    fn mul(self, rhs: &TaylorSeries) -> TaylorSeries {
        self.multiply(rhs, None)
    }
}

/// Reproducing kernel `B_a^ω(ξ) = Σ_{n≤N} conj(a)^n ξ^n / σ_n`, `σ_n = 2ω_{2n+1}`.
pub fn kernel(w: &RadialWeight, a: C64, n: usize) -> Result<TaylorSeries> {
    if !(a.norm() < 1.0) {
        return Err(Error::domain("kernel point must satisfy |a| < 1", a.norm()));
    }
    let sigmas = w.sigmas(n + 1);
    let ac = a.conj();
    let mut p = C64::new(1.0, 0.0);
    let coeffs = sigmas
        .iter()
        .map(|&s| {
            let v = p / s;
            p *= ac;
            v
        })
        .collect();
    Ok(TaylorSeries::new(coeffs))
}

/// Squared norms `σ_n` of the monomials in `A²_ω`.
#[derive(Clone, Debug)]
pub struct NormalizationConstant {
    pub sigma: Vec<f64>,
}

impl NormalizationConstant {
    pub fn new(w: &RadialWeight, len: usize) -> Self {
        NormalizationConstant { sigma: w.sigmas(len) }
    }

    /// `‖f‖²_{A²_ω} = Σ |f_n|² σ_n` (for `deg f < len`).
    pub fn norm_sqr(&self, f: &TaylorSeries) -> f64 {
        f.coeffs().iter().zip(&self.sigma).map(|(c, s)| c.norm_sqr() * s).sum()
    }
}
