//! Simultaneous root finding for complex polynomials (Aberth-Ehrlich).
//!
//! Polynomials are given as ascending coefficient slices
//! `c[0] + c[1] z + ... + c[n] z^n`.

use std::f64::consts::TAU;

use num_complex::Complex64;

const MAX_ITERATIONS: usize = 1000;

/// `p(z) / p'(z)`, evaluated on the reversed polynomial when `|z| > 1` so that
/// large roots do not overflow or lose precision. Returns `None` when `z` is
/// an exact root.
fn newton_ratio(coeffs: &[Complex64], z: Complex64) -> Option<Complex64> {
    let n = coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = coeffs[n];
        let mut dp = Complex64::new(0.0, 0.0);
        for c in coeffs[..n].iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        if p == Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(p / dp)
    } else {
        // p(z) = z^n r(y) with y = 1/z and r the reversed polynomial
        let y = z.inv();
        let mut r = coeffs[0];
        let mut dr = Complex64::new(0.0, 0.0);
        for c in coeffs[1..].iter() {
            dr = dr * y + r;
            r = r * y + c;
        }
        if r == Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(z * r / (r * n as f64 - y * dr))
    }
}

/// All `n` roots (with multiplicity) of a degree-`n` polynomial.
///
/// The leading coefficient must be nonzero. Simple roots converge to
/// machine precision. Estimates that cluster around a multiple root are
/// polished jointly and, when that fits the coefficients at least as well,
/// returned as exactly repeated values.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    assert!(n >= 1, "constant polynomial has no roots");
    assert!(coeffs[n].norm() > 0.0, "leading coefficient must be nonzero");

    if n == 1 {
        return vec![-coeffs[0] / coeffs[1]];
    }

    // start on a circle whose radius is the geometric mean of the root moduli
    let radius = match coeffs[0].norm() {
        0.0 => 1.0,
        c0 => (c0 / coeffs[n].norm()).powf(1.0 / n as f64),
    };
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / n as f64 + 0.4))
        .collect();
    let mut settled = vec![false; n];

    for _ in 0..MAX_ITERATIONS {
        let mut all_settled = true;
        for k in 0..n {
            if settled[k] {
                continue;
            }
            let zk = roots[k];
            let step = match newton_ratio(coeffs, zk) {
                None => Complex64::new(0.0, 0.0),
                Some(ratio) => {
                    let repulsion: Complex64 = roots
                        .iter()
                        .enumerate()
                        .filter(|&(j, zj)| j != k && *zj != zk)
                        .map(|(_, zj)| (zk - zj).inv())
                        .sum();
                    ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion)
                }
            };
            if !step.is_finite() {
                continue;
            }
            roots[k] = zk - step;
            if step.norm() <= 4.0 * f64::EPSILON * roots[k].norm().max(f64::MIN_POSITIVE) {
                settled[k] = true;
            } else {
                all_settled = false;
            }
        }
        if all_settled {
            break;
        }
    }
    refine_clusters(coeffs, roots)
}

/// Roots closer than this (relative to `max(1, |z|)`) are candidates for a
/// single multiple root.
const CLUSTER_RADIUS: f64 = 1e-3;

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// Expands `lead * prod (z - r)` into ascending coefficients.
fn expand(lead: Complex64, roots: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![lead];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); out.len() + 1];
        for (k, a) in out.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        out = next;
    }
    out
}

/// Coefficientwise distance between `coeffs` and the polynomial rebuilt from
/// `roots`, relative to the largest coefficient.
fn backward_error(coeffs: &[Complex64], roots: &[Complex64]) -> f64 {
    let rebuilt = expand(coeffs[coeffs.len() - 1], roots);
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    coeffs
        .iter()
        .zip(&rebuilt)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale
}

/// A root of multiplicity `k` is a simple root of the `(k-1)`th derivative;
/// Newton on that derivative from the cluster centroid recovers it to full
/// precision, where the individual estimates are only good to `eps^(1/k)`.
fn polish_multiple(coeffs: &[Complex64], start: Complex64, k: usize) -> Option<Complex64> {
    let (poly, start, inverted) = if start.norm() > 1.0 {
        let reversed: Vec<Complex64> = coeffs.iter().rev().copied().collect();
        (reversed, start.inv(), true)
    } else {
        (coeffs.to_vec(), start, false)
    };
    let mut target = poly;
    for _ in 1..k {
        target = derivative(&target);
    }
    let slope = derivative(&target);
    let mut z = start;
    for _ in 0..50 {
        let d = horner(&slope, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = horner(&target, z) / d;
        z -= step;
        if step.norm() <= 2.0 * f64::EPSILON * z.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    if !z.is_finite() {
        return None;
    }
    Some(if inverted { z.inv() } else { z })
}

/// Collapses clusters of nearby estimates onto one multiple root whenever that
/// does not increase the backward error.
fn refine_clusters(coeffs: &[Complex64], mut roots: Vec<Complex64>) -> Vec<Complex64> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    // single linkage
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() < CLUSTER_RADIUS * scale {
                let (from, to) = (label[j], label[i]);
                label.iter_mut().filter(|l| **l == from).for_each(|l| *l = to);
            }
        }
    }
    for cluster in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| label[i] == cluster).collect();
        let k = members.len();
        if k < 2 {
            continue;
        }
        let centroid = members.iter().map(|&i| roots[i]).sum::<Complex64>() / k as f64;
        let Some(z) = polish_multiple(coeffs, centroid, k) else {
            continue;
        };
        let mut candidate = roots.clone();
        members.iter().for_each(|&i| candidate[i] = z);
        if backward_error(coeffs, &candidate) <= backward_error(coeffs, &roots).max(4.0 * f64::EPSILON) {
            roots = candidate;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
        expand(c(1.0, 0.0), roots)
    }

    fn assert_same_roots(found: &[Complex64], expected: &[Complex64], tol: f64) {
        let mut used = vec![false; expected.len()];
        for f in found {
            let (j, d) = expected
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, e)| (j, (f - e).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < tol, "root {f} off by {d}");
            used[j] = true;
        }
    }

    #[test]
    fn linear_and_quadratic() {
        assert_eq!(polynomial_roots(&[c(-2.0, 0.0), c(1.0, 0.0)]), vec![c(2.0, 0.0)]);
        let r = polynomial_roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_same_roots(&r, &[c(0.0, 1.0), c(0.0, -1.0)], 1e-14);
    }

    #[test]
    fn recovers_known_roots_across_scales() {
        let expected = [
            c(0.3, -0.2),
            c(-1.5, 0.7),
            c(20.0, 5.0),
            c(0.0, 0.01),
            c(-0.4, -3.0),
            c(1.0, 1.0),
        ];
        let r = polynomial_roots(&from_roots(&expected));
        assert_same_roots(&r, &expected, 1e-11);
    }

    #[test]
    fn zero_root_and_repeated_root() {
        let r = polynomial_roots(&from_roots(&[c(0.0, 0.0), c(1.0, 2.0)]));
        assert_same_roots(&r, &[c(0.0, 0.0), c(1.0, 2.0)], 1e-14);
        let double = polynomial_roots(&from_roots(&[c(0.5, 0.5), c(0.5, 0.5), c(-1.0, 0.0)]));
        assert_same_roots(&double, &[c(0.5, 0.5), c(0.5, 0.5), c(-1.0, 0.0)], 1e-12);
    }

    #[test]
    fn quadruple_root_is_polished() {
        let z = c(-0.7, 2.3);
        let r = polynomial_roots(&from_roots(&[z, z, z, z, c(0.1, 0.0)]));
        assert_same_roots(&r, &[z, z, z, z, c(0.1, 0.0)], 1e-12);
    }

    #[test]
    fn close_but_distinct_roots_stay_apart() {
        let expected = [c(1.0, 0.0), c(1.0 + 1e-4, 0.0), c(-2.0, 0.5)];
        let r = polynomial_roots(&from_roots(&expected));
        assert_same_roots(&r, &expected, 1e-9);
    }

    #[test]
    fn unit_roots_of_degree_twelve() {
        let mut coeffs = vec![c(0.0, 0.0); 13];
        coeffs[0] = c(-1.0, 0.0);
        coeffs[12] = c(1.0, 0.0);
        let expected: Vec<_> = (0..12)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / 12.0))
            .collect();
        assert_same_roots(&polynomial_roots(&coeffs), &expected, 1e-13);
    }
}
