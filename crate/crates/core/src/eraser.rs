//! Interferometric read-out of the three-vertex phase.
//!
//! A particle with internal state `psi1` enters a two-path interferometer.
//! The lower path turns the internal state into `psi2`; optionally the
//! internal state is then projected onto `psi3`; finally the path is measured
//! in the basis `(|0> + e^{i delta}|1>)/sqrt(2)`. The constructive points of the
//! fringes with and without projection differ by the geometric phase.
//!
//! Composite vectors are stored internal-major: amplitude of
//! `|internal i>|path p>` sits at index `2 i + p`.
//!
//! Every quantity is available twice: by explicit state algebra on composite
//! vectors, and by the closed forms for fringe probability, visibility and
//! constructive points. Tests hold the two against each other.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geomphase::NULL_THRESHOLD;
use crate::statekit::{inner_product, norm, wrap_angle, PureState};

pub const DEFAULT_GRID: usize = 4096;
pub const MIN_GRID: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMode {
    ClosedForm,
    GridArgmax,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EraserConfig {
    grid_size: usize,
    extraction_mode: ExtractionMode,
}

impl EraserConfig {
    pub fn new(grid_size: usize, extraction_mode: ExtractionMode) -> Result<Self> {
        if grid_size < MIN_GRID {
            return Err(Error::InvalidParameter(format!(
                "grid size {grid_size} below minimum {MIN_GRID}"
            )));
        }
        Ok(Self {
            grid_size,
            extraction_mode,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn extraction_mode(&self) -> ExtractionMode {
        self.extraction_mode
    }
}

impl Default for EraserConfig {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID,
            extraction_mode: ExtractionMode::ClosedForm,
        }
    }
}

/// Constructive points located on the sampled fringes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPeaks {
    pub delta_m: f64,
    pub delta_f: Option<f64>,
    pub gamma: Option<f64>,
}

/// A sampled fringe and the quantities read off it.
///
/// `probabilities` is the projected fringe when a projector was given and
/// the unprojected one otherwise. `delta_m`, `delta_f` and `gamma` are the
/// values reported under the configured extraction mode (closed form for
/// `Both`); `grid` holds the sampled-peak values whenever the mode uses them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FringeScan {
    pub deltas: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub visibility: f64,
    pub delta_m: f64,
    pub delta_f: Option<f64>,
    pub gamma: Option<f64>,
    pub grid: Option<GridPeaks>,
}

fn check_dims(a: &PureState, b: &PureState) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `(psi1 |0> + psi2 |1>) / sqrt(2)` on internal (x) path.
pub fn composite_intermediate(psi1: &PureState, psi2: &PureState) -> Result<Vec<Complex64>> {
    check_dims(psi1, psi2)?;
    Ok(psi1
        .amplitudes()
        .iter()
        .zip(psi2.amplitudes())
        .flat_map(|(a, b)| [a * FRAC_1_SQRT_2, b * FRAC_1_SQRT_2])
        .collect())
}

/// Applies `|psi3><psi3| (x) 1` to a composite vector and renormalizes.
pub fn project_internal(composite: &[Complex64], psi3: &PureState) -> Result<Vec<Complex64>> {
    let dim = psi3.dim();
    if composite.len() != 2 * dim {
        return Err(Error::DimensionMismatch {
            left: composite.len(),
            right: 2 * dim,
        });
    }
    let along: [Complex64; 2] = [0, 1].map(|p| {
        (0..dim)
            .map(|i| psi3.amplitudes()[i].conj() * composite[2 * i + p])
            .sum()
    });
    // the projected norm is sqrt(|<3|1>|^2 + |<3|2>|^2) / sqrt(2)
    if along.iter().all(|z| z.norm() * std::f64::consts::SQRT_2 <= NULL_THRESHOLD) {
        return Err(Error::ProjectionAnnihilates);
    }
    let mut out: Vec<Complex64> = psi3
        .amplitudes()
        .iter()
        .flat_map(|c| [c * along[0], c * along[1]])
        .collect();
    let n = norm(&out);
    out.iter_mut().for_each(|z| *z /= n);
    Ok(out)
}

/// `<Phi| 1 (x) |delta><delta| |Phi>` for a composite vector.
pub fn path_probability(composite: &[Complex64], delta: f64) -> f64 {
    let phase = Complex64::from_polar(1.0, -delta);
    composite
        .chunks_exact(2)
        .map(|pair| ((pair[0] + phase * pair[1]) * FRAC_1_SQRT_2).norm_sqr())
        .sum()
}

/// Fringe probability with the internal projection, by explicit state algebra.
pub fn output_probability(
    psi1: &PureState,
    psi2: &PureState,
    psi3: &PureState,
    delta: f64,
) -> Result<f64> {
    check_dims(psi1, psi3)?;
    let projected = project_internal(&composite_intermediate(psi1, psi2)?, psi3)?;
    Ok(path_probability(&projected, delta))
}

/// Fringe probability without projection, by explicit state algebra.
pub fn unprojected_probability(psi1: &PureState, psi2: &PureState, delta: f64) -> Result<f64> {
    Ok(path_probability(&composite_intermediate(psi1, psi2)?, delta))
}

/// `(<3|1>, <3|2>)`, failing when both vanish.
fn projector_overlaps(
    psi1: &PureState,
    psi2: &PureState,
    psi3: &PureState,
) -> Result<(Complex64, Complex64)> {
    check_dims(psi1, psi2)?;
    let a = inner_product(psi3, psi1)?;
    let b = inner_product(psi3, psi2)?;
    if a.norm() <= NULL_THRESHOLD && b.norm() <= NULL_THRESHOLD {
        return Err(Error::ProjectionAnnihilates);
    }
    Ok((a, b))
}

/// `V = 2|<1|3><3|2>| / (|<3|1>|^2 + |<3|2>|^2)`.
pub fn visibility(psi1: &PureState, psi2: &PureState, psi3: &PureState) -> Result<f64> {
    let (a, b) = projector_overlaps(psi1, psi2, psi3)?;
    Ok((2.0 * (a.conj() * b).norm() / (a.norm_sqr() + b.norm_sqr())).min(1.0))
}

/// `P(delta) = (1 + V cos(arg(<1|3><3|2>) - delta)) / 2`.
pub fn output_probability_closed_form(
    psi1: &PureState,
    psi2: &PureState,
    psi3: &PureState,
    delta: f64,
) -> Result<f64> {
    let (a, b) = projector_overlaps(psi1, psi2, psi3)?;
    let v = 2.0 * (a.conj() * b).norm() / (a.norm_sqr() + b.norm_sqr());
    Ok(0.5 * (1.0 + v * ((a.conj() * b).arg() - delta).cos()))
}

/// `arg(<1|3><3|2>)`, the constructive point with projection.
pub fn delta_f(psi1: &PureState, psi2: &PureState, psi3: &PureState) -> Result<f64> {
    let (a, b) = projector_overlaps(psi1, psi2, psi3)?;
    let z = a.conj() * b;
    if z.norm() <= NULL_THRESHOLD {
        return Err(Error::FringeUndefined(
            "projected fringe is flat: one overlap with psi3 vanishes",
        ));
    }
    Ok(wrap_angle(z.arg()))
}

/// `arg(<1|2>)`, the constructive point without projection.
pub fn delta_m(psi1: &PureState, psi2: &PureState) -> Result<f64> {
    let z = inner_product(psi1, psi2)?;
    if z.norm() <= NULL_THRESHOLD {
        return Err(Error::FringeUndefined(
            "unprojected fringe is flat: psi1 and psi2 are orthogonal",
        ));
    }
    Ok(wrap_angle(z.arg()))
}

fn sample_grid(grid: usize) -> Vec<f64> {
    (0..grid).map(|k| TAU * k as f64 / grid as f64).collect()
}

/// Location of the sampled maximum, refined by a parabola through the peak
/// sample and its two (cyclic) neighbours.
fn refined_argmax(deltas: &[f64], values: &[f64]) -> f64 {
    let g = values.len();
    let (k, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    let (left, mid, right) = (values[(k + g - 1) % g], values[k], values[(k + 1) % g]);
    let curvature = left - 2.0 * mid + right;
    let offset = if curvature < 0.0 {
        (0.5 * (left - right) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let step = TAU / g as f64;
    wrap_angle(deltas[k] + offset * step)
}

/// Samples the fringe over `delta in [0, 2pi)` and extracts its constructive
/// points. With `psi3` the projected fringe is sampled and `delta_f`,
/// `gamma = delta_f - delta_m` are filled in.
pub fn fringe_scan(
    psi1: &PureState,
    psi2: &PureState,
    psi3: Option<&PureState>,
    cfg: &EraserConfig,
) -> Result<FringeScan> {
    check_dims(psi1, psi2)?;
    let deltas = sample_grid(cfg.grid_size);
    let closed_m = delta_m(psi1, psi2)?;

    let unprojected = composite_intermediate(psi1, psi2)?;
    let unprojected_fringe: Vec<f64> = deltas
        .iter()
        .map(|&d| path_probability(&unprojected, d))
        .collect();

    let (probabilities, visibility, closed_f) = match psi3 {
        Some(psi3) => {
            check_dims(psi1, psi3)?;
            let closed_f = delta_f(psi1, psi2, psi3)?;
            let projected = project_internal(&unprojected, psi3)?;
            let fringe = deltas
                .iter()
                .map(|&d| path_probability(&projected, d))
                .collect();
            (fringe, visibility(psi1, psi2, psi3)?, Some(closed_f))
        }
        None => (
            unprojected_fringe.clone(),
            inner_product(psi1, psi2)?.norm().min(1.0),
            None,
        ),
    };
    let closed_gamma = closed_f.map(|f| wrap_angle(f - closed_m));

    let grid = match cfg.extraction_mode {
        ExtractionMode::ClosedForm => None,
        ExtractionMode::GridArgmax | ExtractionMode::Both => {
            let m = refined_argmax(&deltas, &unprojected_fringe);
            let f = psi3.map(|_| refined_argmax(&deltas, &probabilities));
            Some(GridPeaks {
                delta_m: m,
                delta_f: f,
                gamma: f.map(|f| wrap_angle(f - m)),
            })
        }
    };

    let (delta_m, delta_f, gamma) = match (&grid, cfg.extraction_mode) {
        (Some(peaks), ExtractionMode::GridArgmax) => (peaks.delta_m, peaks.delta_f, peaks.gamma),
        _ => (closed_m, closed_f, closed_gamma),
    };

    Ok(FringeScan {
        deltas,
        probabilities,
        visibility,
        delta_m,
        delta_f,
        gamma,
        grid,
    })
}

/// `gamma = delta_f - delta_m`, wrapped to `(-pi, pi]`.
pub fn extract_geometric_phase(
    psi1: &PureState,
    psi2: &PureState,
    psi3: &PureState,
    cfg: &EraserConfig,
) -> Result<f64> {
    if cfg.extraction_mode == ExtractionMode::ClosedForm {
        // no sampling needed
        return Ok(wrap_angle(delta_f(psi1, psi2, psi3)? - delta_m(psi1, psi2)?));
    }
    let scan = fringe_scan(psi1, psi2, Some(psi3), cfg)?;
    Ok(scan.gamma.expect("projected scan always carries gamma"))
}
