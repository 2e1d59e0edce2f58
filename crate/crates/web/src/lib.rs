//! wasm-bindgen exports for the static demo page in `www/`.
//!
//! Every export returns a flat `Float64Array` of fixed-width rows so the page
//! can plot without a serialization layer.

use bergman_hankel::hankelnorm::{form_norm_22, HankelFormSpec};
use bergman_hankel::norms::{kernel_norm_comparison, QuadratureSpec};
use bergman_hankel::weights::{default_doubling_grid, doubling_report};
use bergman_hankel::{kernel, ComplexMeasure, RadialWeight, C64};
use wasm_bindgen::prelude::*;

fn weight(text: &str) -> Result<RadialWeight, String> {
    text.parse::<RadialWeight>().map_err(|e| match e {
        bergman_hankel::Error::Parse { line: 0, msg } => format!("weight `{text}`: {msg}"),
        other => format!("weight `{text}`: {other}"),
    })
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// Rows `[ρ, ω̂(ρ), ω̂(ρ)/ω̂((1+ρ)/2)]` on the doubling grid.
pub fn tail_rows(w: &str, points: usize) -> Result<Vec<f64>, String> {
    let w = weight(w)?;
    let mut out = Vec::with_capacity(3 * points);
    for rho in default_doubling_grid(points.clamp(2, 400)) {
        let t = w.tail(rho).map_err(err)?;
        let half = w.tail((1.0 + rho) / 2.0).map_err(err)?;
        out.extend([rho, t, t / half]);
    }
    Ok(out)
}

pub fn doubling_text(w: &str) -> Result<String, String> {
    let w = weight(w)?;
    let rep = doubling_report(&w, &[2.0, 4.0], &default_doubling_grid(50)).map_err(err)?;
    let gamma = rep
        .growth_exponent_gamma
        .map(|g| format!("{g}"))
        .unwrap_or_else(|| "none found".into());
    Ok(format!(
        "{}: upper doubling {} (constant {:.4}), lower doubling {}, growth exponent {gamma}",
        w.descriptor(),
        rep.is_upper,
        rep.upper_constant,
        rep.is_lower
    ))
}

/// Rows `[a, ‖Γ_{δ_a}‖, B_a(a)]`: the (2,2) norm of the point-mass form
/// against the kernel diagonal, which it must match.
pub fn rank_one_rows(w: &str, trunc: usize, steps: usize) -> Result<Vec<f64>, String> {
    let w = weight(w)?;
    let trunc = trunc.clamp(4, 1024);
    let steps = steps.clamp(2, 64);
    let mut out = Vec::with_capacity(3 * steps);
    for i in 0..steps {
        let a = 0.9 * i as f64 / (steps - 1) as f64;
        let mu = ComplexMeasure::dirac(C64::new(a, 0.0)).map_err(err)?;
        let spec = HankelFormSpec::new(mu, w.clone(), 2.0, 2.0).map_err(err)?;
        let est = form_norm_22(&spec, trunc).map_err(err)?;
        let diag = kernel(&w, C64::new(a, 0.0), 4 * trunc)
            .map_err(err)?
            .evaluate(C64::new(a, 0.0))
            .re;
        out.extend([a, est.value, diag]);
    }
    Ok(out)
}

/// Rows `[r, ratio, simplified ratio]` of the kernel-norm comparison.
pub fn kernel_rows(omega: &str, nu: &str, p: f64) -> Result<Vec<f64>, String> {
    let (omega, nu) = (weight(omega)?, weight(nu)?);
    let radii = [0.3, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99];
    let quad = QuadratureSpec {
        radial_nodes: 200,
        ..QuadratureSpec::default()
    };
    let rows = kernel_norm_comparison(&omega, &nu, p, &radii, &quad).map_err(err)?;
    Ok(rows
        .iter()
        .flat_map(|r| [r.radius, r.ratio, r.ratio_simplified])
        .collect())
}

#[wasm_bindgen(js_name = tailRows)]
pub fn tail_rows_js(w: &str, points: usize) -> Result<Vec<f64>, JsError> {
    tail_rows(w, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = doublingText)]
pub fn doubling_text_js(w: &str) -> Result<String, JsError> {
    doubling_text(w).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = rankOneRows)]
pub fn rank_one_rows_js(w: &str, trunc: usize, steps: usize) -> Result<Vec<f64>, JsError> {
    rank_one_rows(w, trunc, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = kernelRows)]
pub fn kernel_rows_js(omega: &str, nu: &str, p: f64) -> Result<Vec<f64>, JsError> {
    kernel_rows(omega, nu, p).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_rows_for_standard_weight() {
        let rows = tail_rows("standard:1", 20).unwrap();
        assert_eq!(rows.len(), 60);
        let w = RadialWeight::standard(1.0).unwrap();
        for r in rows.chunks(3) {
            let want = w.tail_by_quadrature(r[0]).unwrap();
            assert!((r[1] - want).abs() <= 1e-9 * want);
            // ω̂(ρ)/ω̂((1+ρ)/2) tends to 4 for this weight
            assert!(r[2] > 1.0 && r[2] < 4.0 + 1e-6);
        }
    }

    #[test]
    fn rank_one_matches_kernel_diagonal() {
        let rows = rank_one_rows("const", 200, 4).unwrap();
        for r in rows.chunks(3) {
            assert!((r[1] - r[2]).abs() <= 0.02 * r[2], "{r:?}");
        }
    }

    #[test]
    fn kernel_rows_have_three_columns() {
        let rows = kernel_rows("const", "const", 2.0).unwrap();
        assert_eq!(rows.len(), 27);
        assert!(rows.chunks(3).all(|r| r[1].is_finite() && r[1] > 0.0));
    }

    #[test]
    fn bad_weight_is_reported() {
        assert!(doubling_text("standard:x").unwrap_err().contains("standard:x"));
        assert!(doubling_text("standard:1").unwrap().contains("upper doubling true"));
    }
}
