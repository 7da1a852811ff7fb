//! Adaptive quadrature of the Klein volume element over a convex region
//! containing the origin.
//!
//! Integrating `r^2 / (1 - r^2)^2` along rays from the origin turns the volume
//! into a sum of surface integrals, one per face:
//! `V = sum_f ∫_f G(|y|) h_f / |y|^3 dA`, with `h_f` the distance from the
//! origin to the face plane and `G` the radial antiderivative. Faces are fanned
//! into triangles, each triangle is collapsed onto its outermost vertex (so the
//! `1 / (1 - |y|)` blow-up at an ideal vertex cancels against the Jacobian), and
//! triangles are refined by 4-way splitting in order of their error estimate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::mink::Vec3;

const LOW: usize = 6;
const HIGH: usize = 10;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.reverse();
    out
}

fn rules() -> &'static (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    static RULES: OnceLock<(Vec<(f64, f64)>, Vec<(f64, f64)>)> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(LOW), gauss_legendre(HIGH)))
}

/// `∫_0^R r^2 / (1 - r^2)^2 dr`.
pub(crate) fn radial(r: f64) -> f64 {
    if r < 0.1 {
        let r2 = r * r;
        let mut term = r;
        let mut sum = 0.0;
        for k in 1..40 {
            term *= r2;
            let add = k as f64 * term / (2 * k + 1) as f64;
            sum += add;
            if add < 1e-18 * sum {
                break;
            }
        }
        sum
    } else {
        let r = r.min(1.0 - 1e-15);
        r / (2.0 * (1.0 - r * r)) - 0.5 * r.atanh()
    }
}

/// A triangle on a face at distance `h` from the origin. `apex` is the vertex
/// the Duffy collapse is centered on.
#[derive(Debug, Clone, Copy)]
struct Cell {
    apex: Vec3,
    a: Vec3,
    b: Vec3,
    h: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rule(apex: &Vec3, a: &Vec3, b: &Vec3, h: f64, nodes: &[(f64, f64)]) -> f64 {
    let u = a - apex;
    let w = b - a;
    let jac = u.cross(&w).norm();
    let mut sum = 0.0;
    for &(s, ws) in nodes {
        let mut inner = 0.0;
        for &(t, wt) in nodes {
            let y = apex + u * s + w * (s * t);
            let r = y.norm();
            inner += wt * radial(r) / (r * r * r);
        }
        sum += ws * s * inner;
    }
    sum * jac * h
}

fn cell(tri: [Vec3; 3], h: f64) -> Cell {
    // collapse onto the vertex nearest the sphere
    let k = (0..3).max_by(|&i, &j| tri[i].norm().total_cmp(&tri[j].norm())).unwrap();
    let (apex, a, b) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
    let (low, high) = rules();
    let q1 = rule(&apex, &a, &b, h, low);
    let q2 = rule(&apex, &a, &b, h, high);
    Cell { apex, a, b, h, value: q2, error: (q2 - q1).abs() }
}

const CELL_EVALS: usize = LOW * LOW + HIGH * HIGH;

/// Outcome of an adaptive run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Integrates over a convex polyhedron given as faces (vertex cycles in
/// any orientation) with the origin strictly inside. `ideal` marks vertices
/// on the sphere; triangles touching two of them are split so that every
/// triangle has at most one singular corner.
pub(crate) fn integrate(
    vertices: &[Vec3],
    faces: &[Vec<usize>],
    ideal: &[bool],
    tol: f64,
    budget: usize,
) -> Result<Quadrature> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for face in faces {
        let c = face.iter().map(|&v| vertices[v]).sum::<Vec3>() / face.len() as f64;
        let normal: Vec3 = (0..face.len())
            .map(|k| (vertices[face[k]] - c).cross(&(vertices[face[(k + 1) % face.len()]] - c)))
            .sum();
        let h = normal.normalize().dot(&c).abs();
        for k in 0..face.len() {
            let (i, j) = (face[k], face[(k + 1) % face.len()]);
            let (p, q) = (vertices[i], vertices[j]);
            let tris = if ideal[i] && ideal[j] {
                let m = 0.5 * (p + q);
                vec![[c, p, m], [c, m, q]]
            } else {
                vec![[c, p, q]]
            };
            for t in tris {
                heap.push(cell(t, h));
                evaluations += CELL_EVALS;
            }
        }
    }
    loop {
        let value: f64 = heap.iter().map(|c| c.value).sum();
        let error: f64 = heap.iter().map(|c| c.error).sum();
        if error <= tol {
            return Ok(Quadrature { value, error, evaluations });
        }
        if evaluations + 4 * CELL_EVALS > budget {
            return Err(Error::QuadratureBudgetExceeded { estimate: value, error });
        }
        // refine the worst cells in a batch before re-summing
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let Some(worst) = heap.pop() else { break };
            if evaluations + 4 * CELL_EVALS > budget {
                heap.push(worst);
                break;
            }
            let (p, q, r) = (worst.apex, worst.a, worst.b);
            let (pq, qr, rp) = (0.5 * (p + q), 0.5 * (q + r), 0.5 * (r + p));
            for t in [[p, pq, rp], [pq, q, qr], [rp, qr, r], [pq, qr, rp]] {
                heap.push(cell(t, worst.h));
                evaluations += CELL_EVALS;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        for n in [3, LOW, HIGH] {
            let nodes = gauss_legendre(n);
            let total: f64 = nodes.iter().map(|p| p.1).sum();
            assert!((total - 1.0).abs() < 1e-15);
            for deg in 0..2 * n {
                let q: f64 = nodes.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((q - 1.0 / (deg + 1) as f64).abs() < 1e-14, "n {n} deg {deg}");
            }
        }
    }

    #[test]
    fn radial_branches_agree() {
        for r in [0.0999999f64, 0.1, 0.1000001] {
            let r2 = r * r;
            let series: f64 = (1..60).map(|k| k as f64 * r2.powi(k) * r / (2 * k + 1) as f64).sum();
            assert!((radial(r) - series).abs() < 1e-16);
        }
        // derivative check against the integrand
        for r in [0.05, 0.3, 0.9] {
            let h = 1e-6;
            let d = (radial(r + h) - radial(r - h)) / (2.0 * h);
            assert!((d - r * r / (1.0 - r * r).powi(2)).abs() < 1e-7);
        }
    }

    #[test]
    fn cube_volume_is_bracketed_by_balls() {
        let s = 0.3;
        let mut vertices = Vec::new();
        for z in [-s, s] {
            for (x, y) in [(s, s), (-s, s), (-s, -s), (s, -s)] {
                vertices.push(Vec3::new(x, y, z));
            }
        }
        let faces = vec![
            vec![0, 1, 2, 3],
            vec![4, 5, 6, 7],
            vec![0, 1, 5, 4],
            vec![1, 2, 6, 5],
            vec![2, 3, 7, 6],
            vec![3, 0, 4, 7],
        ];
        let q = integrate(&vertices, &faces, &[false; 8], 1e-12, 10_000_000).unwrap();
        let ball = |rho: f64| 4.0 * std::f64::consts::PI * radial(rho);
        assert!(ball(s) < q.value && q.value < ball(s * 3f64.sqrt()));
        // Euclidean volume of the cube times the density range
        let e = (2.0 * s).powi(3);
        assert!(e < q.value && q.value < e / (1.0 - 3.0 * s * s).powi(2));
    }
}
