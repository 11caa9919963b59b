//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON document; errors become JS exceptions. The
//! `*_json` functions carry the logic and also run natively for tests.

use gphase::eraser::{fringe_scan, EraserConfig, ExtractionMode};
use gphase::geomphase::{solid_angle_triangle, three_vertex_phase};
use gphase::statekit::{qubit_to_bloch, wrap_angle, BlochPoint};
use gphase::sweepfamily::{
    build_family_states, closed_form_phase, family_qubits, pipeline_phase, sweep_alpha,
    FamilyParams,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Triangle {
    vertices: [[f64; 3]; 3],
    phase: f64,
    solid_angle: Option<f64>,
}

#[derive(Serialize)]
struct Scene {
    points: Vec<[f64; 3]>,
    psi2: [f64; 3],
    psi3: [f64; 3],
    triangles: Vec<Triangle>,
    gamma1: f64,
    gamma2: f64,
    gamma: f64,
    pipeline_gamma: f64,
    direct_gamma: Option<f64>,
}

#[derive(Serialize)]
struct Curve {
    alphas: Vec<f64>,
    gamma1: Vec<f64>,
    gamma2: Vec<f64>,
    gamma_total: Vec<f64>,
    gamma_wrapped: Vec<f64>,
    singular_alphas: Vec<f64>,
    winding: f64,
    dual_path_deviation: f64,
}

#[derive(Serialize)]
struct Fringe {
    deltas: Vec<f64>,
    projected: Vec<f64>,
    unprojected: Vec<f64>,
    delta_f: f64,
    delta_m: f64,
    gamma: f64,
    grid_gamma: f64,
    visibility: f64,
}

fn params(theta: f64, phi: f64, alpha: f64) -> Result<FamilyParams, String> {
    FamilyParams::new(theta, phi, alpha).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Majorana points of the first state, the two product-state qubits and one
/// Bloch triangle per point.
pub fn family_scene_json(theta: f64, phi: f64, alpha: f64) -> Result<String, String> {
    let p = params(theta, phi, alpha)?;
    let q = family_qubits(&p);
    let b2 = qubit_to_bloch(&q.psi2).map_err(|e| e.to_string())?;
    let b3 = qubit_to_bloch(&q.psi3).map_err(|e| e.to_string())?;
    let decomposition = pipeline_phase(&p).map_err(|e| e.to_string())?;
    let triangles = decomposition
        .triangles
        .iter()
        .zip(&decomposition.qubit_phases)
        .map(|(t, phase)| Triangle {
            vertices: t.map(|v: BlochPoint| v.cartesian()),
            phase: *phase,
            solid_angle: solid_angle_triangle(&t[0], &t[1], &t[2]).ok(),
        })
        .collect();
    let (psi1, psi2, psi3) = build_family_states(&p);
    let (gamma1, gamma2, gamma) = closed_form_phase(&p);
    to_json(&Scene {
        points: decomposition.triangles.iter().map(|t| t[0].cartesian()).collect(),
        psi2: b2.cartesian(),
        psi3: b3.cartesian(),
        triangles,
        gamma1,
        gamma2,
        gamma: wrap_angle(gamma),
        pipeline_gamma: decomposition.total,
        direct_gamma: three_vertex_phase(&psi1, &psi2, &psi3).ok(),
    })
}

/// Unwrapped phase over a full turn of `alpha`.
pub fn sweep_curve_json(theta: f64, phi: f64, steps: usize) -> Result<String, String> {
    let s = sweep_alpha(theta, phi, steps).map_err(|e| e.to_string())?;
    let dual_path_deviation = s.dual_path_deviation();
    to_json(&Curve {
        alphas: s.alphas,
        gamma1: s.gamma1,
        gamma2: s.gamma2,
        gamma_total: s.gamma_total,
        gamma_wrapped: s.gamma_wrapped,
        singular_alphas: s.singular_alphas,
        winding: s.winding,
        dual_path_deviation,
    })
}

/// Interferometer fringes for the family triple, with and without the
/// projection of the internal state.
pub fn eraser_fringe_json(theta: f64, phi: f64, alpha: f64, grid: usize) -> Result<String, String> {
    let p = params(theta, phi, alpha)?;
    let (psi1, psi2, psi3) = build_family_states(&p);
    let cfg = EraserConfig::new(grid, ExtractionMode::Both).map_err(|e| e.to_string())?;
    let projected = fringe_scan(&psi1, &psi2, Some(&psi3), &cfg).map_err(|e| e.to_string())?;
    let unprojected = fringe_scan(&psi1, &psi2, None, &cfg).map_err(|e| e.to_string())?;
    let grid_gamma = projected
        .grid
        .as_ref()
        .and_then(|g| g.gamma)
        .ok_or("fringe has no sampled peak")?;
    to_json(&Fringe {
        delta_f: projected.delta_f.ok_or("projected fringe has no peak")?,
        delta_m: projected.delta_m,
        gamma: projected.gamma.ok_or("projected fringe has no peak")?,
        grid_gamma,
        visibility: projected.visibility,
        deltas: projected.deltas,
        projected: projected.probabilities,
        unprojected: unprojected.probabilities,
    })
}

#[wasm_bindgen]
pub fn family_scene(theta: f64, phi: f64, alpha: f64) -> Result<String, JsError> {
    family_scene_json(theta, phi, alpha).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep_curve(theta: f64, phi: f64, steps: usize) -> Result<String, JsError> {
    sweep_curve_json(theta, phi, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn eraser_fringe(theta: f64, phi: f64, alpha: f64, grid: usize) -> Result<String, JsError> {
    eraser_fringe_json(theta, phi, alpha, grid).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

    fn parse(text: Result<String, String>) -> Value {
        serde_json::from_str(&text.unwrap()).unwrap()
    }

    #[test]
    fn scene_has_two_triangles_whose_phases_add_up() {
        let v = parse(family_scene_json(FRAC_PI_6, FRAC_PI_4, 1.0));
        let triangles = v["triangles"].as_array().unwrap();
        assert_eq!(triangles.len(), 2);
        let sum: f64 = triangles.iter().map(|t| t["phase"].as_f64().unwrap()).sum();
        let gamma = v["gamma"].as_f64().unwrap();
        assert!((wrap_angle(sum) - gamma).abs() < 1e-9);
        assert!((v["direct_gamma"].as_f64().unwrap() - gamma).abs() < 1e-9);
        for t in triangles {
            let omega = t["solid_angle"].as_f64().unwrap();
            let phase = t["phase"].as_f64().unwrap();
            assert!((wrap_angle(phase + 0.5 * omega)).abs() < 1e-9);
        }
    }

    #[test]
    fn curve_winds_by_four_pi() {
        let v = parse(sweep_curve_json(FRAC_PI_6, FRAC_PI_4, 720));
        assert!((v["winding"].as_f64().unwrap() - 4.0 * PI).abs() < 1e-6);
        assert_eq!(v["alphas"].as_array().unwrap().len(), 721);
        assert_eq!(v["singular_alphas"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn fringe_reads_out_the_family_phase() {
        let v = parse(eraser_fringe_json(FRAC_PI_6, FRAC_PI_4, 1.0, 256));
        let scene = parse(family_scene_json(FRAC_PI_6, FRAC_PI_4, 1.0));
        let gamma = v["gamma"].as_f64().unwrap();
        assert!((gamma - scene["gamma"].as_f64().unwrap()).abs() < 1e-9);
        assert!((v["grid_gamma"].as_f64().unwrap() - gamma).abs() < 2.0 * PI / 256.0);
        assert_eq!(v["projected"].as_array().unwrap().len(), 256);
    }

    #[test]
    fn bad_parameters_are_reported() {
        assert!(family_scene_json(2.0, 0.0, 0.0).is_err());
        assert!(sweep_curve_json(0.0, 0.0, 720).is_err());
        assert!(eraser_fringe_json(0.3, 0.0, 0.0, 4).is_err());
    }
}
