//! Majorana (stellar) representation of N-level pure states.
//!
//! An N-level state is identified with a permutation-symmetric state of
//! `n = N - 1` qubits: basis state `k` (zero based) is the normalized Dicke
//! state with `k` excitations. Every symmetric state is, up to normalization,
//! the symmetrization of a product of `n` qubits, and those qubits, drawn as
//! points on the Bloch sphere, are its Majorana points.
//!
//! # Convention
//!
//! With Dicke amplitudes `c_k`, the Majorana polynomial is
//!
//! ```text
//! P(w) = sum_k (-1)^k sqrt(C(n, k)) c_k w^(n-k)
//! ```
//!
//! Each root `w` is the qubit `|0> + w|1>`, i.e. `w = e^{i azimuth} tan(polar/2)`.
//! The north pole (`w = 0`) is `|0>` and the south pole (`w = infinity`) is
//! `|1>`. When the degree drops because `c_0, c_1, ...` vanish, each missing
//! degree is a root at infinity and lands on the south pole. Under this
//! convention `(1, 0, ..., 0)` has all points on the north pole and
//! `(0, ..., 0, 1)` all points on the south pole, and
//! [`points_to_state`] inverts [`state_to_points`].

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::polynomial_roots;
use crate::statekit::{bloch_to_qubit, norm, BlochPoint, PureState};

/// Tag recorded alongside serialized point sets.
pub const CONVENTION: &str = "P(w)=sum_k (-1)^k sqrt(C(n,k)) c_k w^(n-k); root w -> |0>+w|1>; w=0 north (|0>), w=inf south (|1>)";

/// Coefficients below this fraction of the largest one count as exact zeros.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Largest qubit count accepted by the brute-force symmetrizer.
pub const MAX_ORACLE_QUBITS: usize = 12;

/// Largest number of qubits routed through the explicit permutation sum;
/// larger inputs use Ryser's permanent formula for the same sum.
const EXPLICIT_PERMUTATION_LIMIT: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Unordered multiset of Bloch points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajoranaSet {
    points: Vec<BlochPoint>,
}

impl MajoranaSet {
    pub fn new(points: Vec<BlochPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter(
                "a Majorana set needs at least one point".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[BlochPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Dimension of the state this set represents.
    pub fn state_dim(&self) -> usize {
        self.points.len() + 1
    }

    /// Points ordered by polar angle, then azimuth.
    pub fn sorted(&self) -> Vec<BlochPoint> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| {
            a.polar()
                .total_cmp(&b.polar())
                .then(a.azimuth().total_cmp(&b.azimuth()))
        });
        pts
    }

    /// Largest great-circle distance between matched points under the
    /// minimum-total-distance pairing, or `None` for sets of different size.
    pub fn matching_distance(&self, other: &MajoranaSet) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let cost: Vec<Vec<f64>> = self
            .points
            .iter()
            .map(|p| other.points.iter().map(|q| p.distance(q)).collect())
            .collect();
        let assignment = min_cost_assignment(&cost);
        Some(
            assignment
                .iter()
                .enumerate()
                .map(|(i, &j)| cost[i][j])
                .fold(0.0, f64::max),
        )
    }

    /// Multiset equality with angular tolerance `tol` (radians).
    pub fn approx_eq(&self, other: &MajoranaSet, tol: f64) -> bool {
        self.matching_distance(other).is_some_and(|d| d <= tol)
    }
}

/// Hungarian algorithm with potentials; returns `assignment[row] = column`.
fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // 1-based arrays, index 0 is the virtual start column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
    }
    assignment
}

/// Majorana points of `s` (see the module docs for the convention).
pub fn state_to_points(s: &PureState) -> Result<MajoranaSet> {
    let c = s.amplitudes();
    let n = c.len() - 1;
    if norm(c) == 0.0 {
        return Err(Error::ZeroVector);
    }
    // ascending powers of w: coefficient of w^(n-k) comes from c_k
    let coeffs: Vec<Complex64> = (0..=n)
        .map(|j| {
            let k = n - j;
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            c[k] * (sign * binomial(n, k).sqrt())
        })
        .collect();
    let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let negligible = |z: &Complex64| z.norm() <= DEGENERACY_THRESHOLD * scale;

    let at_infinity = coeffs.iter().rev().take_while(|z| negligible(z)).count();
    let at_zero = coeffs.iter().take_while(|z| negligible(z)).count();
    let mut points = Vec::with_capacity(n);
    points.extend(std::iter::repeat_n(BlochPoint::SOUTH, at_infinity));
    points.extend(std::iter::repeat_n(BlochPoint::NORTH, at_zero));

    let core = &coeffs[at_zero..=n - at_infinity];
    if core.len() > 1 {
        for w in polynomial_roots(core) {
            points.push(BlochPoint::new(2.0 * w.norm().atan(), w.arg())?);
        }
    }
    MajoranaSet::new(points)
}

/// Ascending coefficients of `prod_i (a_i + b_i z)` for qubits `a_i|0> + b_i|1>`.
fn product_polynomial(qubits: &[&[Complex64]]) -> Vec<Complex64> {
    let mut coeffs = vec![ONE];
    for q in qubits {
        let mut next = vec![ZERO; coeffs.len() + 1];
        for (k, e) in coeffs.iter().enumerate() {
            next[k] += e * q[0];
            next[k + 1] += e * q[1];
        }
        coeffs = next;
    }
    coeffs
}

/// Normalized symmetrization of a product of qubits, in the Dicke basis.
///
/// Unlike [`points_to_state`] this keeps the phases of the input qubits, so
/// the result is the exact normalized ray-representative `K S(q_1 ... q_n)`.
pub fn symmetric_state(qubits: &[PureState]) -> Result<PureState> {
    if qubits.is_empty() {
        return Err(Error::InvalidParameter("no qubits to symmetrize".into()));
    }
    let mut raw: Vec<&[Complex64]> = Vec::with_capacity(qubits.len());
    for q in qubits {
        if q.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: q.dim(),
                right: 2,
            });
        }
        raw.push(q.amplitudes());
    }
    let n = qubits.len();
    let amplitudes = product_polynomial(&raw)
        .into_iter()
        .enumerate()
        .map(|(k, e)| e / binomial(n, k).sqrt())
        .collect();
    PureState::normalized(amplitudes)
}

/// The state whose Majorana points are `m`.
pub fn points_to_state(m: &MajoranaSet) -> PureState {
    let qubits: Vec<PureState> = m.points.iter().map(bloch_to_qubit).collect();
    // nonempty qubit list and Bloch qubits never cancel completely
    symmetric_state(&qubits).expect("symmetrized Bloch qubits are nonzero")
}

/// `|q>^(x)n` in the Dicke basis: amplitude `sqrt(C(n,k)) a^(n-k) b^k`.
pub fn product_state(q: &PureState, n: usize) -> Result<PureState> {
    if q.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: q.dim(),
            right: 2,
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "product state needs at least one copy".into(),
        ));
    }
    let (a, b) = (q.amplitudes()[0], q.amplitudes()[1]);
    let amplitudes = (0..=n)
        .map(|k| a.powu((n - k) as u32) * b.powu(k as u32) * binomial(n, k).sqrt())
        .collect();
    PureState::normalized(amplitudes)
}

/// Qubit `position` of bit string `x` over `n` qubits; qubit 0 is the most
/// significant bit, so two qubits order as `00, 01, 10, 11`.
fn bit(x: usize, position: usize, n: usize) -> usize {
    (x >> (n - 1 - position)) & 1
}

/// Average of all `n!` qubit-permuted tensor products, in the full `2^n`
/// space, without renormalization.
pub fn symmetrize_full(qubits: &[PureState]) -> Result<Vec<Complex64>> {
    let n = qubits.len();
    if n == 0 {
        return Err(Error::InvalidParameter("no qubits to symmetrize".into()));
    }
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::TooLarge {
            n,
            limit: MAX_ORACLE_QUBITS,
        });
    }
    if let Some(q) = qubits.iter().find(|q| q.dim() != 2) {
        return Err(Error::DimensionMismatch {
            left: q.dim(),
            right: 2,
        });
    }
    if n <= EXPLICIT_PERMUTATION_LIMIT {
        Ok(symmetrize_by_permutations(qubits))
    } else {
        Ok(symmetrize_by_permanents(qubits))
    }
}

fn tensor_product(qubits: &[&PureState]) -> Vec<Complex64> {
    let mut out = vec![ONE];
    for q in qubits {
        out = out
            .iter()
            .flat_map(|x| q.amplitudes().iter().map(move |y| x * y))
            .collect();
    }
    out
}

pub(crate) fn symmetrize_by_permutations(qubits: &[PureState]) -> Vec<Complex64> {
    let n = qubits.len();
    let mut order: Vec<&PureState> = qubits.iter().collect();
    let mut acc = vec![ZERO; 1 << n];
    let mut count = 0usize;
    let mut add = |order: &[&PureState]| {
        for (a, t) in acc.iter_mut().zip(tensor_product(order)) {
            *a += t;
        }
        count += 1;
    };
    // Heap's algorithm
    let mut stack = vec![0usize; n];
    add(&order);
    let mut i = 1;
    while i < n {
        if stack[i] < i {
            let j = if i % 2 == 0 { 0 } else { stack[i] };
            order.swap(j, i);
            add(&order);
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    let count = count as f64;
    acc.iter_mut().for_each(|z| *z /= count);
    acc
}

/// Same sum as [`symmetrize_by_permutations`]: the amplitude on bit string `x`
/// is `perm(M_x) / n!` with `M_x[i][j] = <x_i|q_j>`, evaluated by Ryser's
/// inclusion-exclusion formula.
pub(crate) fn symmetrize_by_permanents(qubits: &[PureState]) -> Vec<Complex64> {
    let n = qubits.len();
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    (0..1usize << n)
        .map(|x| {
            let mut total = ZERO;
            for subset in 1usize..(1 << n) {
                let mut prod = ONE;
                for i in 0..n {
                    let b = bit(x, i, n);
                    let row: Complex64 = (0..n)
                        .filter(|j| subset >> j & 1 == 1)
                        .map(|j| qubits[j].amplitudes()[b])
                        .sum();
                    prod *= row;
                }
                let sign = if (n - subset.count_ones() as usize).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                total += prod * sign;
            }
            total / factorial
        })
        .collect()
}

/// Embeds Dicke amplitudes into the full `2^(N-1)` qubit space; an isometry.
pub fn dicke_embed(s: &PureState) -> Result<Vec<Complex64>> {
    let n = s.dim() - 1;
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::TooLarge {
            n: s.dim(),
            limit: MAX_ORACLE_QUBITS + 1,
        });
    }
    let weights: Vec<Complex64> = s
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, c)| c / binomial(n, k).sqrt())
        .collect();
    Ok((0..1usize << n)
        .map(|x| weights[x.count_ones() as usize])
        .collect())
}
