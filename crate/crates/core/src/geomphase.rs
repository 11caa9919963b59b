//! Three-vertex geometric phases and their Bloch-sphere picture.
//!
//! The phase of three states is the argument of the Bargmann invariant
//! `<s1|s3><s3|s2><s2|s1>`. For a symmetric state against two symmetric
//! product states it splits into one qubit phase per Majorana point, and each
//! qubit phase is `-Omega/2` for the signed solid angle `Omega` of the
//! geodesic triangle on the Bloch sphere.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::majorana::{product_state, state_to_points};
use crate::statekit::{
    bloch_to_qubit, braket, inner_product, norm, qubit_to_bloch, wrap_angle, BlochPoint,
    PureState, Unitary,
};

/// `|B|` at or below this is treated as zero: the phase is undefined.
pub const NULL_THRESHOLD: f64 = 1e-12;

/// Two Bloch points closer than this (chord length) to antipodal have no
/// unique geodesic.
pub const ANTIPODAL_THRESHOLD: f64 = 1e-9;

/// Below this residual the second canonicalization frame vector is dropped.
const FRAME_THRESHOLD: f64 = 1e-12;

fn check_same_dim(states: &[&PureState]) -> Result<()> {
    let d = states[0].dim();
    match states.iter().find(|s| s.dim() != d) {
        Some(s) => Err(Error::DimensionMismatch {
            left: d,
            right: s.dim(),
        }),
        None => Ok(()),
    }
}

/// Product of the three factors in an order that depends only on their
/// values, so every cyclic rotation of the vertices gives bit-identical output.
fn ordered_product(mut factors: [Complex64; 3]) -> Complex64 {
    factors.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    factors[0] * factors[1] * factors[2]
}

/// `<s1|s3><s3|s2><s2|s1>`.
pub fn bargmann(s1: &PureState, s2: &PureState, s3: &PureState) -> Result<Complex64> {
    check_same_dim(&[s1, s2, s3])?;
    Ok(ordered_product([
        inner_product(s1, s3)?,
        inner_product(s3, s2)?,
        inner_product(s2, s1)?,
    ]))
}

/// Principal argument of the Bargmann invariant, in `(-pi, pi]`.
pub fn three_vertex_phase(s1: &PureState, s2: &PureState, s3: &PureState) -> Result<f64> {
    three_vertex_phase_with(s1, s2, s3, NULL_THRESHOLD)
}

/// [`three_vertex_phase`] with an explicit null threshold on `|B|`.
pub fn three_vertex_phase_with(
    s1: &PureState,
    s2: &PureState,
    s3: &PureState,
    null_threshold: f64,
) -> Result<f64> {
    let b = bargmann(s1, s2, s3)?;
    if b.norm() <= null_threshold {
        return Err(Error::UndefinedPhase { modulus: b.norm() });
    }
    Ok(wrap_angle(b.arg()))
}

/// Rough bound on the rounding error of [`three_vertex_phase`].
///
/// Each overlap `<a|b>` is a sum whose terms may be far larger than the
/// result; its relative error is then about `dim * eps * sum|a_k||b_k| / |<a|b>|`,
/// and the phase error is the sum over the three overlaps. Nearly orthogonal
/// pairs make the phase ill-conditioned long before `|B|` reaches the null
/// threshold. Infinite when an overlap vanishes.
pub fn phase_error_bound(s1: &PureState, s2: &PureState, s3: &PureState) -> Result<f64> {
    check_same_dim(&[s1, s2, s3])?;
    let scale = s1.dim() as f64 * f64::EPSILON;
    let mut bound = 0.0;
    for (a, b) in [(s1, s3), (s3, s2), (s2, s1)] {
        let magnitude: f64 = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x.norm() * y.norm())
            .sum();
        let overlap = inner_product(a, b)?.norm();
        if overlap == 0.0 {
            return Ok(f64::INFINITY);
        }
        bound += scale * magnitude / overlap;
    }
    Ok(bound)
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Signed solid angle of the geodesic triangle `p1 -> p2 -> p3`, in `(-2pi, 2pi]`.
///
/// Positive for counterclockwise vertex order seen from outside the sphere.
/// Uses `tan(Omega/2) = a.(b x c) / (1 + a.b + b.c + c.a)`; `atan2` supplies the
/// branch when the denominator is not positive. A triangle that is exactly a
/// hemisphere (three points on one great circle, not within a half circle)
/// reports `2pi`.
pub fn solid_angle_triangle(p1: &BlochPoint, p2: &BlochPoint, p3: &BlochPoint) -> Result<f64> {
    let v = [p1.cartesian(), p2.cartesian(), p3.cartesian()];
    for (first, second) in [(0, 1), (1, 2), (0, 2)] {
        let s = [
            v[first][0] + v[second][0],
            v[first][1] + v[second][1],
            v[first][2] + v[second][2],
        ];
        if dot(s, s).sqrt() < ANTIPODAL_THRESHOLD {
            return Err(Error::DegenerateGeodesic { first, second });
        }
    }
    let [a, b, c] = v;
    let triple = dot(a, cross(b, c));
    let denominator = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    let omega = 2.0 * triple.atan2(denominator);
    Ok(if omega <= -std::f64::consts::TAU {
        -omega
    } else {
        omega
    })
}

/// Qubit-level pieces of a three-vertex phase.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseDecomposition {
    /// One phase per Majorana point of the first state, each in `(-pi, pi]`.
    pub qubit_phases: Vec<f64>,
    /// Sum of `qubit_phases`, wrapped to `(-pi, pi]`.
    pub total: f64,
    /// `(Majorana point, psi2, psi3)` for each component.
    pub triangles: Vec<[BlochPoint; 3]>,
}

/// Splits the phase of `(sym1, q2^(x)n, q3^(x)n)` into `n = N - 1` qubit phases.
pub fn decompose_phase(
    sym1: &PureState,
    q2: &PureState,
    q3: &PureState,
) -> Result<PhaseDecomposition> {
    for q in [q2, q3] {
        if q.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: q.dim(),
                right: 2,
            });
        }
    }
    let points = state_to_points(sym1)?;
    let (b2, b3) = (qubit_to_bloch(q2)?, qubit_to_bloch(q3)?);
    let mut qubit_phases = Vec::with_capacity(points.len());
    let mut triangles = Vec::with_capacity(points.len());
    for (index, p) in points.points().iter().enumerate() {
        let b = bargmann(&bloch_to_qubit(p), q2, q3)?;
        if b.norm() <= NULL_THRESHOLD {
            return Err(Error::UndefinedComponentPhase {
                index,
                modulus: b.norm(),
            });
        }
        qubit_phases.push(wrap_angle(b.arg()));
        triangles.push([*p, b2, b3]);
    }
    let total = wrap_angle(qubit_phases.iter().sum());
    Ok(PhaseDecomposition {
        qubit_phases,
        total,
        triangles,
    })
}

/// A triple moved by one unitary into the form "symmetric state, product
/// state, product state".
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalTriple {
    /// `U phi1`.
    pub psi1: PureState,
    /// `psi2_qubit^(x)(N-1)`, equal to `U phi2`.
    pub psi2: PureState,
    /// `psi3_qubit^(x)(N-1)`, equal to `U phi3`.
    pub psi3: PureState,
    pub psi2_qubit: PureState,
    pub psi3_qubit: PureState,
    pub transform: Unitary,
    pub originals: [PureState; 3],
    /// `phi2` and `phi3` were parallel, so the frame had a single vector.
    pub degenerate_frame: bool,
}

/// How faithfully a [`CanonicalTriple`] reproduces its originals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalCheck {
    /// `| |<Psi_i|Psi_j>| - |<Phi_i|Phi_j>| |` for all nine pairs.
    pub gram_deltas: [[f64; 3]; 3],
    /// `|B(Psi) - B(Phi)|` for the complex Bargmann invariants.
    pub bargmann_delta: f64,
    /// `|<Psi2|Psi3> - <Phi2|Phi3>|`.
    pub overlap_delta: f64,
    /// Wrapped phase difference, `None` when the phase is undefined.
    pub phase_delta: Option<f64>,
    /// `max_k (1 - |<Psi_k|U Phi_k>|)`.
    pub mapping_delta: f64,
}

impl CanonicalTriple {
    pub fn transformed(&self) -> [&PureState; 3] {
        [&self.psi1, &self.psi2, &self.psi3]
    }

    pub fn check(&self) -> Result<CanonicalCheck> {
        let new = self.transformed();
        let old = &self.originals;
        let mut gram_deltas = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                gram_deltas[i][j] = (inner_product(new[i], new[j])?.norm()
                    - inner_product(&old[i], &old[j])?.norm())
                .abs();
            }
        }
        let b_new = bargmann(new[0], new[1], new[2])?;
        let b_old = bargmann(&old[0], &old[1], &old[2])?;
        let phase_delta = match (
            three_vertex_phase(new[0], new[1], new[2]),
            three_vertex_phase(&old[0], &old[1], &old[2]),
        ) {
            (Ok(a), Ok(b)) => Some(wrap_angle(a - b)),
            _ => None,
        };
        let overlap_delta =
            (inner_product(new[1], new[2])? - inner_product(&old[1], &old[2])?).norm();
        let mut mapping_delta: f64 = 0.0;
        for k in 0..3 {
            let moved = self.transform.apply_raw(old[k].amplitudes())?;
            mapping_delta = mapping_delta.max(1.0 - braket(new[k].amplitudes(), &moved).norm());
        }
        Ok(CanonicalCheck {
            gram_deltas,
            bargmann_delta: (b_new - b_old).norm(),
            overlap_delta,
            phase_delta,
            mapping_delta,
        })
    }
}

fn scaled(v: &[Complex64], f: f64) -> Vec<Complex64> {
    v.iter().map(|z| z * f).collect()
}

/// Removes the components of `v` along the orthonormal `frame` (two passes).
fn orthogonalize(v: &mut [Complex64], frame: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for f in frame {
            let proj = braket(f, v);
            v.iter_mut().zip(f).for_each(|(x, y)| *x -= proj * y);
        }
    }
}

/// `[first, remainder of second]`: the second vector is the part of `second`
/// orthogonal to `first`, scaled so that `second` has a positive real
/// coefficient along it. Returns a single vector when that part vanishes.
fn two_vector_frame(first: &[Complex64], second: &[Complex64], degenerate: bool) -> Vec<Vec<Complex64>> {
    let mut frame = vec![first.to_vec()];
    if !degenerate {
        let mut rest = second.to_vec();
        orthogonalize(&mut rest, &frame);
        let r = norm(&rest);
        frame.push(scaled(&rest, 1.0 / r));
    }
    frame
}

fn residual_norm(second: &[Complex64], first: &[Complex64]) -> f64 {
    let mut rest = second.to_vec();
    orthogonalize(&mut rest, &[first.to_vec()]);
    norm(&rest)
}

/// Extends an orthonormal frame to a basis, pivoting on the standard basis
/// vector with the largest residual at each step.
fn complete_basis(mut frame: Vec<Vec<Complex64>>, dim: usize) -> Vec<Vec<Complex64>> {
    while frame.len() < dim {
        let best = (0..dim)
            .map(|k| {
                let mut e = vec![Complex64::new(0.0, 0.0); dim];
                e[k] = Complex64::new(1.0, 0.0);
                orthogonalize(&mut e, &frame);
                e
            })
            .max_by(|a, b| norm(a).total_cmp(&norm(b)))
            .expect("dim > 0");
        let n = norm(&best);
        frame.push(scaled(&best, 1.0 / n));
    }
    frame
}

/// Finds a unitary taking `(phi1, phi2, phi3)` to `(Psi1, Psi2, Psi3)` with
/// `Psi2`, `Psi3` symmetric product states and `Psi1 = U phi1`.
///
/// With `g = <phi2|phi3>` and `n = N - 1`, the qubits are `psi2 = |0>` and
/// `psi3 = w|0> + sqrt(1 - |w|^2)|1>` where `w` is the principal `n`th root of
/// `g`, so `<Psi2|Psi3> = w^n = g`. `U` sends the frame `(phi2, phi3 remainder)`
/// onto `(Psi2, Psi3 remainder)` and completes both frames arbitrarily.
pub fn canonicalize_triple(
    phi1: &PureState,
    phi2: &PureState,
    phi3: &PureState,
) -> Result<CanonicalTriple> {
    check_same_dim(&[phi1, phi2, phi3])?;
    let dim = phi1.dim();
    let n = dim - 1;

    let g = inner_product(phi2, phi3)?;
    let degenerate_frame = residual_norm(phi3.amplitudes(), phi2.amplitudes()) <= FRAME_THRESHOLD;
    let w = if g.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else if degenerate_frame {
        // parallel pair: |g| = 1 up to rounding, which sqrt(1 - |w|^2) would amplify
        Complex64::from_polar(1.0, wrap_angle(g.arg()) / n as f64)
    } else {
        Complex64::from_polar(g.norm().min(1.0).powf(1.0 / n as f64), wrap_angle(g.arg()) / n as f64)
    };
    let psi2_qubit = PureState::basis(2, 0)?;
    let psi3_qubit = PureState::normalized(vec![w, Complex64::new((1.0 - w.norm_sqr()).max(0.0).sqrt(), 0.0)])?;
    let psi2 = product_state(&psi2_qubit, n)?;
    let psi3 = product_state(&psi3_qubit, n)?;

    let source = complete_basis(
        two_vector_frame(phi2.amplitudes(), phi3.amplitudes(), degenerate_frame),
        dim,
    );
    let target = complete_basis(
        two_vector_frame(psi2.amplitudes(), psi3.amplitudes(), degenerate_frame),
        dim,
    );

    // U = sum_j |f_j><e_j|
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (e, f) in source.iter().zip(&target) {
        for r in 0..dim {
            for c in 0..dim {
                entries[r * dim + c] += f[r] * e[c].conj();
            }
        }
    }
    let transform = Unitary::new(dim, entries)?;
    let psi1 = PureState::normalized(transform.apply_raw(phi1.amplitudes())?)?;

    Ok(CanonicalTriple {
        psi1,
        psi2,
        psi3,
        psi2_qubit,
        psi3_qubit,
        transform,
        originals: [phi1.clone(), phi2.clone(), phi3.clone()],
        degenerate_frame,
    })
}
