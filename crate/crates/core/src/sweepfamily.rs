//! A one-parameter family of qutrit triples and the sweep of its phase.
//!
//! The first state is the symmetrization of two equatorial qubits at
//! azimuths `phi + alpha` and `alpha - phi`; the other two are doubled copies
//! of qubits tilted by `-theta` and `+theta` from `|+>` towards `|->`.
//! Rotating the first state about the z axis by `alpha` drives each of its two
//! Majorana points around the equator. The per-qubit phases have closed forms
//!
//! ```text
//! gamma1 =  2 atan(tan(theta/2) tan((phi + alpha)/2))
//! gamma2 = -2 atan(tan(theta/2) tan((phi - alpha)/2))
//! ```
//!
//! and over one full turn of `alpha` their sum winds by `4 pi`, changing
//! steeply where a Majorana point passes behind the sphere.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geomphase::{decompose_phase, PhaseDecomposition};
use crate::majorana::{product_state, symmetric_state};
use crate::statekit::{angle_distance, wrap_angle, PureState};

/// Smallest sweep grid accepted by [`sweep_alpha`].
pub const MIN_STEPS: usize = 64;

/// Densification stops at this many subdivisions of the full turn.
pub const MAX_DENSITY_LOG2: u32 = 20;

/// Largest phase change tolerated across one (sub)interval during unwrapping.
const MAX_STEP_CHANGE: f64 = FRAC_PI_2;

/// A slope peak counts as singular when it exceeds this multiple of the
/// median slope of its component.
pub const SINGULAR_RATIO: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyParams {
    theta: f64,
    phi: f64,
    alpha: f64,
}

impl FamilyParams {
    /// `theta` must lie strictly inside `(-pi/2, pi/2)`; `phi` and `alpha` are
    /// any finite angles.
    pub fn new(theta: f64, phi: f64, alpha: f64) -> Result<Self> {
        if !(theta.is_finite() && theta.abs() < FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} must lie strictly inside (-pi/2, pi/2)"
            )));
        }
        if !(phi.is_finite() && alpha.is_finite()) {
            return Err(Error::InvalidParameter(
                "phi and alpha must be finite".into(),
            ));
        }
        Ok(Self { theta, phi, alpha })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.theta, self.phi, alpha)
    }
}

/// The four qubits that generate the family at one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyQubits {
    /// `(e^{-i(phi+alpha)/2}|0> + e^{i(phi+alpha)/2}|1>)/sqrt(2)`.
    pub first: PureState,
    /// `(e^{i(phi-alpha)/2}|0> + e^{-i(phi-alpha)/2}|1>)/sqrt(2)`.
    pub second: PureState,
    /// `cos(theta/2)|+> - sin(theta/2)|->`.
    pub psi2: PureState,
    /// `cos(theta/2)|+> + sin(theta/2)|->`.
    pub psi3: PureState,
}

fn equatorial(half_angle: f64) -> PureState {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    PureState::qubit(
        Complex64::from_polar(r, -half_angle),
        Complex64::from_polar(r, half_angle),
    )
    .expect("equatorial qubit is normalized")
}

fn tilted(theta: f64) -> PureState {
    // c|+> + s|-> = ((c + s)|0> + (c - s)|1>)/sqrt(2)
    let (s, c) = (0.5 * theta).sin_cos();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    PureState::normalized(vec![
        Complex64::new(r * (c + s), 0.0),
        Complex64::new(r * (c - s), 0.0),
    ])
    .expect("tilted qubit is nonzero")
}

pub fn family_qubits(p: &FamilyParams) -> FamilyQubits {
    FamilyQubits {
        first: equatorial(0.5 * (p.phi + p.alpha)),
        second: equatorial(-0.5 * (p.phi - p.alpha)),
        psi2: tilted(-p.theta),
        psi3: tilted(p.theta),
    }
}

/// `(Psi1, Psi2, Psi3)` in the three-level Dicke basis.
pub fn build_family_states(p: &FamilyParams) -> (PureState, PureState, PureState) {
    let q = family_qubits(p);
    let psi1 = symmetric_state(&[q.first, q.second]).expect("two qubits symmetrize");
    let psi2 = product_state(&q.psi2, 2).expect("qubit doubles");
    let psi3 = product_state(&q.psi3, 2).expect("qubit doubles");
    (psi1, psi2, psi3)
}

/// `2 atan(t tan(beta))`. At a pole of `tan` the quotient is infinite and
/// `atan` returns the limit, giving `+-pi`.
fn half_tan_phase(t: f64, beta: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let (s, c) = beta.sin_cos();
    2.0 * (t * s / c).atan()
}

/// `(gamma1, gamma2, gamma1 + gamma2)` with each term in `[-pi, pi]`; the sum
/// is not wrapped.
pub fn closed_form_phase(p: &FamilyParams) -> (f64, f64, f64) {
    let t = (0.5 * p.theta).tan();
    let g1 = half_tan_phase(t, 0.5 * (p.phi + p.alpha));
    let g2 = -half_tan_phase(t, 0.5 * (p.phi - p.alpha));
    (g1, g2, g1 + g2)
}

/// `d gamma1 / d alpha` and `d gamma2 / d alpha`.
pub fn closed_form_slopes(p: &FamilyParams) -> (f64, f64) {
    let t = (0.5 * p.theta).tan();
    let slope = |beta: f64| {
        let (s, c) = beta.sin_cos();
        t / (c * c + t * t * s * s)
    };
    (
        slope(0.5 * (p.phi + p.alpha)),
        slope(0.5 * (p.phi - p.alpha)),
    )
}

/// The phase of the family triple computed generically: Majorana points of
/// `Psi1` and one Bloch triangle per point.
pub fn pipeline_phase(p: &FamilyParams) -> Result<PhaseDecomposition> {
    let q = family_qubits(p);
    let (psi1, _, _) = build_family_states(p);
    decompose_phase(&psi1, &q.psi2, &q.psi3)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub theta: f64,
    pub phi: f64,
    /// `2 pi k / steps` for `k = 0..=steps`.
    pub alphas: Vec<f64>,
    /// Unwrapped per-qubit phases.
    pub gamma1: Vec<f64>,
    pub gamma2: Vec<f64>,
    /// `gamma1 + gamma2`, unwrapped.
    pub gamma_total: Vec<f64>,
    /// Closed-form total in `(-pi, pi]`.
    pub gamma_wrapped: Vec<f64>,
    /// Generic Majorana pipeline total in `(-pi, pi]`.
    pub pipeline_wrapped: Vec<f64>,
    /// Steep-slope locations in `[0, 2pi)`, ascending.
    pub singular_alphas: Vec<f64>,
    /// `gamma_total` at `2pi` minus at `0`.
    pub winding: f64,
}

impl SweepResult {
    pub fn steps(&self) -> usize {
        self.alphas.len() - 1
    }

    /// Largest wrapped disagreement between closed form and pipeline.
    pub fn dual_path_deviation(&self) -> f64 {
        self.gamma_wrapped
            .iter()
            .zip(&self.pipeline_wrapped)
            .map(|(a, b)| angle_distance(*a, *b))
            .fold(0.0, f64::max)
    }
}

/// Change of a closed-form component across `[a, b]`, resolved by
/// nearest-branch continuation over a subdivision fine enough that no piece
/// can change by more than `pi/2`. The bound uses the analytic slope, which
/// peaks where `tan` has its pole.
struct Unwrapper {
    t: f64,
    phi: f64,
    min_step: f64,
}

impl Unwrapper {
    fn beta(&self, component: usize, alpha: f64) -> f64 {
        match component {
            0 => 0.5 * (self.phi + alpha),
            _ => 0.5 * (self.phi - alpha),
        }
    }

    fn value(&self, component: usize, alpha: f64) -> f64 {
        let g = half_tan_phase(self.t, self.beta(component, alpha));
        if component == 0 {
            g
        } else {
            -g
        }
    }

    /// Upper bound on `|d gamma / d alpha|` over `[a, b]`.
    fn slope_bound(&self, component: usize, a: f64, b: f64) -> f64 {
        let t = self.t.abs();
        let slope = |beta: f64| {
            let (s, c) = beta.sin_cos();
            t / (c * c + t * t * s * s)
        };
        let (ba, bb) = (self.beta(component, a), self.beta(component, b));
        let (lo, hi) = if ba <= bb { (ba, bb) } else { (bb, ba) };
        // the slope is monotone between a pole of tan and the next zero
        let pole = ((lo - FRAC_PI_2) / PI).ceil() * PI + FRAC_PI_2;
        if pole <= hi {
            1.0 / t
        } else {
            slope(lo).max(slope(hi))
        }
    }

    fn delta(&self, component: usize, a: f64, ga: f64, b: f64, gb: f64) -> Result<f64> {
        let d = wrap_angle(gb - ga);
        let bound = self.slope_bound(component, a, b) * (b - a);
        if d.abs() <= MAX_STEP_CHANGE && bound <= MAX_STEP_CHANGE {
            return Ok(d);
        }
        if b - a <= self.min_step {
            return Err(Error::GridTooCoarse { alpha: a });
        }
        let m = 0.5 * (a + b);
        let gm = self.value(component, m);
        Ok(self.delta(component, a, ga, m, gm)? + self.delta(component, m, gm, b, gb)?)
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Peaks of the interval slopes of one unwrapped component, as refined
/// locations. Slopes are taken cyclically since the sweep covers a full turn.
fn slope_peaks(unwrapped: &[f64], h: f64) -> Vec<f64> {
    let n = unwrapped.len() - 1;
    let slopes: Vec<f64> = unwrapped
        .windows(2)
        .map(|w| ((w[1] - w[0]) / h).abs())
        .collect();
    let threshold = SINGULAR_RATIO * median(&slopes);
    let mut peaks = Vec::new();
    for k in 0..n {
        let (left, here, right) = (slopes[(k + n - 1) % n], slopes[k], slopes[(k + 1) % n]);
        if here <= threshold || here < left || here <= right {
            continue;
        }
        let curvature = left - 2.0 * here + right;
        let offset = if curvature < 0.0 {
            (0.5 * (left - right) / curvature).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        peaks.push(((k as f64 + 0.5 + offset) * h).rem_euclid(TAU));
    }
    peaks
}

/// Merges locations closer than `h` on the circle and sorts them.
fn merge_cyclic(mut alphas: Vec<f64>, h: f64) -> Vec<f64> {
    alphas.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(alphas.len());
    for a in alphas {
        if out.last().is_some_and(|last| a - last < h) {
            continue;
        }
        out.push(a);
    }
    if out.len() > 1 && out[0] + TAU - out[out.len() - 1] < h {
        out.pop();
    }
    out
}

/// Sweeps `alpha` over `[0, 2pi]` in `steps` equal intervals.
pub fn sweep_alpha(theta: f64, phi: f64, steps: usize) -> Result<SweepResult> {
    if steps < MIN_STEPS {
        return Err(Error::InvalidParameter(format!(
            "steps = {steps} is below the minimum of {MIN_STEPS}"
        )));
    }
    if theta == 0.0 {
        return Err(Error::InvalidParameter(
            "theta = 0 makes the family degenerate".into(),
        ));
    }
    let base = FamilyParams::new(theta, phi, 0.0)?;
    let h = TAU / steps as f64;
    let alphas: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();

    let mut wrapped = [Vec::with_capacity(steps + 1), Vec::with_capacity(steps + 1)];
    let mut gamma_wrapped = Vec::with_capacity(steps + 1);
    for &alpha in &alphas {
        let (g1, g2, g) = closed_form_phase(&base.with_alpha(alpha)?);
        wrapped[0].push(g1);
        wrapped[1].push(g2);
        gamma_wrapped.push(wrap_angle(g));
    }

    let unwrapper = Unwrapper {
        t: (0.5 * theta).tan(),
        phi,
        min_step: TAU / (1u64 << MAX_DENSITY_LOG2) as f64,
    };
    let mut unwrapped = [Vec::with_capacity(steps + 1), Vec::with_capacity(steps + 1)];
    for c in 0..2 {
        let mut acc = wrapped[c][0];
        unwrapped[c].push(acc);
        for k in 0..steps {
            acc += unwrapper.delta(c, alphas[k], wrapped[c][k], alphas[k + 1], wrapped[c][k + 1])?;
            unwrapped[c].push(acc);
        }
    }
    let [gamma1, gamma2] = unwrapped;
    let pipeline_wrapped = alphas
        .iter()
        .map(|&alpha| Ok(pipeline_phase(&base.with_alpha(alpha)?)?.total))
        .collect::<Result<Vec<f64>>>()?;
    let gamma_total: Vec<f64> = gamma1.iter().zip(&gamma2).map(|(a, b)| a + b).collect();

    let mut singular = slope_peaks(&gamma1, h);
    singular.extend(slope_peaks(&gamma2, h));
    let singular_alphas = merge_cyclic(singular, h);
    let winding = gamma_total[steps] - gamma_total[0];

    Ok(SweepResult {
        theta,
        phi,
        alphas,
        gamma1,
        gamma2,
        gamma_total,
        gamma_wrapped,
        pipeline_wrapped,
        singular_alphas,
        winding,
    })
}

/// Steepest point of one sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopePeak {
    pub theta: f64,
    /// Midpoint of the steepest interval.
    pub alpha: f64,
    /// `max |d gamma / d alpha|` by finite differences of the unwrapped total.
    pub slope: f64,
}

pub fn slope_profile(thetas: &[f64], phi: f64, steps: usize) -> Result<Vec<SlopePeak>> {
    thetas
        .iter()
        .map(|&theta| {
            if !(theta > 0.0 && theta < FRAC_PI_2) {
                return Err(Error::InvalidParameter(format!(
                    "theta = {theta} must lie in (0, pi/2)"
                )));
            }
            let sweep = sweep_alpha(theta, phi, steps)?;
            let h = TAU / steps as f64;
            let (k, slope) = sweep
                .gamma_total
                .windows(2)
                .map(|w| ((w[1] - w[0]) / h).abs())
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, s)| {
                    if s > best.1 {
                        (k, s)
                    } else {
                        best
                    }
                });
            Ok(SlopePeak {
                theta,
                alpha: (k as f64 + 0.5) * h,
                slope,
            })
        })
        .collect()
}
