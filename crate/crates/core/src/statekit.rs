//! Pure states, Bloch points and unitaries.
//!
//! Everything here is a plain value. Global phase is never treated as data:
//! two states are "equal" when `|<a|b>| = 1`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

/// Maximum allowed deviation of a stored state's norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Maximum entrywise deviation of `U^dagger U` from the identity.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Polar angles closer than this to a pole are snapped onto it.
pub const POLE_SNAP: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Wraps an angle onto the principal branch `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Distance between two angles on the circle, in `[0, pi]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// `<a|b>` on raw amplitude slices, conjugating the first argument.
pub fn braket(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A unit-norm amplitude vector of dimension at least 2.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized to within [`NORM_TOLERANCE`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let n = norm(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self { amplitudes })
    }

    /// Scales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let n = norm(&amplitudes);
        if !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Ok(Self { amplitudes })
    }

    /// Computational basis state `|k>` (zero based) of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        check_dim(dim)?;
        if k >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = ONE;
        Ok(Self { amplitudes })
    }

    /// Qubit `a|0> + b|1>`, normalized.
    pub fn qubit(a: Complex64, b: Complex64) -> Result<Self> {
        Self::normalized(vec![a, b])
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// The same ray with an extra global phase `e^{i angle}`.
    pub fn with_global_phase(&self, angle: f64) -> Self {
        let f = Complex64::from_polar(1.0, angle);
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * f).collect(),
        }
    }

    /// `|<self|other>|`, equal to 1 exactly when both describe the same ray.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        inner_product(self, other).map(|z| z.norm())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "pure states need at least two levels",
        });
    }
    Ok(())
}

/// `<a|b>`, antilinear in `a`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(braket(&a.amplitudes, &b.amplitudes))
}

/// A point on the unit sphere in polar/azimuthal coordinates.
///
/// `polar` lies in `[0, pi]`, `azimuth` in `[0, 2pi)`. At either pole the
/// azimuth is set to 0 so that equality is well defined there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochPoint {
    polar: f64,
    azimuth: f64,
}

impl BlochPoint {
    pub const NORTH: BlochPoint = BlochPoint {
        polar: 0.0,
        azimuth: 0.0,
    };
    pub const SOUTH: BlochPoint = BlochPoint {
        polar: PI,
        azimuth: 0.0,
    };

    pub fn new(polar: f64, azimuth: f64) -> Result<Self> {
        if !polar.is_finite() || !azimuth.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite Bloch angles ({polar}, {azimuth})"
            )));
        }
        if !(-POLE_SNAP..=PI + POLE_SNAP).contains(&polar) {
            return Err(Error::InvalidParameter(format!(
                "polar angle {polar} outside [0, pi]"
            )));
        }
        Ok(Self::normalize(polar, azimuth))
    }

    fn normalize(polar: f64, azimuth: f64) -> Self {
        if polar <= POLE_SNAP {
            return Self::NORTH;
        }
        if polar >= PI - POLE_SNAP {
            return Self::SOUTH;
        }
        let mut azimuth = azimuth.rem_euclid(TAU);
        if azimuth >= TAU {
            azimuth = 0.0;
        }
        Self { polar, azimuth }
    }

    /// Direction of a nonzero Cartesian vector.
    pub fn from_cartesian(v: [f64; 3]) -> Result<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::ZeroVector);
        }
        let rho = v[0].hypot(v[1]);
        Ok(Self::normalize(rho.atan2(v[2]), v[1].atan2(v[0])))
    }

    pub fn polar(&self) -> f64 {
        self.polar
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.polar.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn antipode(&self) -> Self {
        Self::normalize(PI - self.polar, self.azimuth + PI)
    }

    /// Great-circle distance in radians.
    pub fn distance(&self, other: &BlochPoint) -> f64 {
        let a = self.cartesian();
        let b = other.cartesian();
        let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
        2.0 * (0.5 * chord).min(1.0).asin()
    }
}

/// Bloch angles of a qubit ray: `cos(t/2)|0> + e^{ip} sin(t/2)|1>` maps to `(t, p)`.
pub fn qubit_to_bloch(q: &PureState) -> Result<BlochPoint> {
    if q.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: q.dim(),
            right: 2,
        });
    }
    let (a, b) = (q.amplitudes[0], q.amplitudes[1]);
    let polar = 2.0 * b.norm().atan2(a.norm());
    let azimuth = if a.norm() == 0.0 || b.norm() == 0.0 {
        0.0
    } else {
        b.arg() - a.arg()
    };
    Ok(BlochPoint::normalize(polar, azimuth))
}

/// The qubit `cos(t/2)|0> + e^{ip} sin(t/2)|1>` with real nonnegative `|0>` amplitude.
pub fn bloch_to_qubit(p: &BlochPoint) -> PureState {
    let half = 0.5 * p.polar;
    PureState {
        amplitudes: vec![
            Complex64::new(half.cos(), 0.0),
            Complex64::from_polar(half.sin(), p.azimuth),
        ],
    }
}

fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-random ray of dimension `dim`, deterministic in `seed`.
pub fn random_pure_state(dim: usize, seed: u64) -> Result<PureState> {
    check_dim(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PureState::normalized(gaussian_vector(&mut rng, dim))
}

/// Haar-random unitary of dimension `dim`, deterministic in `seed`.
///
/// Columns of a complex Gaussian matrix are orthonormalized by Gram-Schmidt.
/// Gram-Schmidt leaves the triangular factor with a positive real diagonal,
/// which is exactly the phase fix needed for the result to be Haar distributed.
pub fn random_unitary(dim: usize, seed: u64) -> Result<Unitary> {
    check_dim(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut v = gaussian_vector(&mut rng, dim);
        // two passes keep the columns orthogonal to machine precision
        for _ in 0..2 {
            for c in &columns {
                let proj = braket(c, &v);
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let n = norm(&v);
        v.iter_mut().for_each(|x| *x /= n);
        columns.push(v);
    }
    Ok(Unitary::from_columns(&columns))
}

/// A square unitary matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Unitary {
    /// Checks shape and unitarity to within [`UNITARY_TOLERANCE`].
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        if dim == 0 {
            return Err(Error::InvalidDimension {
                dim,
                reason: "empty matrix",
            });
        }
        let u = Self { dim, entries };
        let deviation = u.unitarity_deviation();
        if deviation.is_nan() || deviation > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        (0..dim).for_each(|i| entries[i * dim + i] = ONE);
        Self { dim, entries }
    }

    /// Builds the matrix whose `j`th column is `columns[j]`; the caller
    /// guarantees orthonormality.
    pub(crate) fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let dim = columns.len();
        let mut entries = vec![ZERO; dim * dim];
        for (c, col) in columns.iter().enumerate() {
            for (r, z) in col.iter().enumerate() {
                entries[r * dim + c] = *z;
            }
        }
        Self { dim, entries }
    }

    /// `exp(-i angle sigma_z / 2)`.
    pub fn z_rotation(angle: f64) -> Self {
        Self {
            dim: 2,
            entries: vec![
                Complex64::from_polar(1.0, -0.5 * angle),
                ZERO,
                ZERO,
                Complex64::from_polar(1.0, 0.5 * angle),
            ],
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            dim: 2,
            entries: vec![ZERO, ONE, ONE, ZERO],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        Self { dim: d, entries }
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Unitary) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                for c in 0..d {
                    entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        Ok(Self { dim: d, entries })
    }

    /// Tensor product `self (x) rhs`, with `rhs` on the fast index.
    pub fn kron(&self, rhs: &Unitary) -> Self {
        let (a, b) = (self.dim, rhs.dim);
        let d = a * b;
        let mut entries = vec![ZERO; d * d];
        for r1 in 0..a {
            for c1 in 0..a {
                let x = self.entries[r1 * a + c1];
                for r2 in 0..b {
                    for c2 in 0..b {
                        entries[(r1 * b + r2) * d + c1 * b + c2] = x * rhs.entries[r2 * b + c2];
                    }
                }
            }
        }
        Self { dim: d, entries }
    }

    /// Largest entrywise deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let s: Complex64 = (0..d)
                    .map(|k| self.entries[k * d + i].conj() * self.entries[k * d + j])
                    .sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn apply_raw(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| {
                self.entries[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }
}

/// `U|s>`, renormalized only to absorb rounding drift.
pub fn apply_unitary(u: &Unitary, s: &PureState) -> Result<PureState> {
    PureState::normalized(u.apply_raw(&s.amplitudes)?)
}
