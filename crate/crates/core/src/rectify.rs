//! The rectification of a 3-connected planar graph: the projective polyhedron
//! with that skeleton whose edges are all tangent to the sphere at infinity.
//!
//! Its face circles and vertex circles form an orthogonal primal–dual circle
//! pattern on the sphere. The pattern is found in the plane after a
//! stereographic projection from the tangency point of edge 0, which turns the
//! four circles through that point into lines. The remaining radii solve a
//! Newton iteration on log-radii: around each circle the kites it forms with
//! its orthogonal neighbours must close up to `2π`, a kite with a circle of
//! radius `r'` having angle `2 atan(r' / r)` at the center and a line
//! contributing `π`.

use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::error::{Error, Result};
use crate::graphs::PlanarGraph;
use crate::mink::{rotation_between, rotation_z, Isometry, OrientedPlane, Vec3};
use crate::polyhedron::Polyhedron;
use crate::tolerances::{PACKING_DEFECT, PACKING_MAX_ITER};
use crate::volume::{truncation_volume, QuadratureOptions, VolumeResult};

/// Midsphere realization of a graph: circles of the vertices and faces on the
/// unit sphere, and the point where each edge touches it.
#[derive(Debug, Clone, PartialEq)]
pub struct MidspherePacking {
    /// Plane of each face circle, oriented away from the origin's side.
    pub face_circles: Vec<OrientedPlane>,
    /// Plane of each vertex circle; its pole is the vertex.
    pub vertex_circles: Vec<OrientedPlane>,
    /// Tangency point of each edge.
    pub tangency: Vec<Vec3>,
    /// Largest angle-sum defect of the planar pattern.
    pub angle_defect: f64,
    /// Largest deviation from 1 of the distance between an edge line and the
    /// origin, and from -1 of the pairing of adjacent face circles.
    pub tangency_residual: f64,
}

/// Node of the vertex–face incidence graph: vertices first, then faces.
struct Incidence {
    /// For each node, the neighbouring nodes in counter-clockwise order.
    kites: Vec<Vec<usize>>,
    /// For each node, the edge whose tangency point starts kite `i`.
    starts: Vec<Vec<usize>>,
}

fn incidence(g: &PlanarGraph) -> Incidence {
    let n = g.vertex_count();
    let mut kites = Vec::with_capacity(n + g.face_count());
    let mut starts = Vec::with_capacity(n + g.face_count());
    for v in 0..n {
        let nb = g.neighbors(v);
        kites.push(nb.iter().map(|&w| n + g.dart_face(v, w).unwrap()).collect());
        starts.push(nb.iter().map(|&w| g.edge_between(v, w).unwrap()).collect());
    }
    for f in 0..g.face_count() {
        let face = g.face(f);
        let k = face.len();
        kites.push(face.to_vec());
        starts.push((0..k).map(|i| g.edge_between(face[(i + k - 1) % k], face[i]).unwrap()).collect());
    }
    Incidence { kites, starts }
}

/// Solves the planar pattern; returns log-radii (`None` for the four lines)
/// and the largest angle defect.
fn solve_radii(inc: &Incidence, lines: &[usize; 4]) -> Result<(Vec<Option<f64>>, f64)> {
    let total = inc.kites.len();
    let inner: Vec<usize> = (0..total).filter(|j| !lines.contains(j)).collect();
    let mut index = vec![usize::MAX; total];
    for (i, &j) in inner.iter().enumerate() {
        index[j] = i;
    }
    let n = inner.len();
    let residual = |rho: &DVector<f64>| -> DVector<f64> {
        DVector::from_iterator(
            n,
            inner.iter().map(|&j| {
                let sum: f64 = inc.kites[j]
                    .iter()
                    .map(|&k| match index[k] {
                        usize::MAX => PI,
                        i => 2.0 * (rho[i] - rho[index[j]]).exp().atan(),
                    })
                    .sum();
                sum - 2.0 * PI
            }),
        )
    };
    let mut rho = DVector::zeros(n);
    let mut r = residual(&rho);
    for _ in 0..PACKING_MAX_ITER {
        let defect = r.amax();
        if defect < 1e-14 {
            break;
        }
        // weighted Laplacian, with the first node pinned
        let mut jac = DMatrix::zeros(n - 1, n - 1);
        for (a, &j) in inner.iter().enumerate().skip(1) {
            for &k in &inc.kites[j] {
                let b = index[k];
                if b == usize::MAX {
                    continue;
                }
                let w = 1.0 / (rho[b] - rho[a]).cosh();
                jac[(a - 1, a - 1)] += w;
                if b > 0 {
                    jac[(a - 1, b - 1)] -= w;
                }
            }
        }
        let rhs = DVector::from_iterator(n - 1, r.iter().skip(1).copied());
        let Some(step) = jac.cholesky().map(|c| c.solve(&rhs)) else {
            return Err(Error::SolverDiverged { residual: defect });
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = rho.clone();
            for i in 1..n {
                trial[i] += t * step[i - 1];
            }
            let rt = residual(&trial);
            if rt.norm() < r.norm() {
                rho = trial;
                r = rt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let defect = r.amax();
    if !(defect < PACKING_DEFECT) {
        return Err(Error::SolverDiverged { residual: defect });
    }
    let out = (0..total).map(|j| (index[j] != usize::MAX).then(|| rho[index[j]])).collect();
    Ok((out, defect))
}

/// Lays the pattern out in the plane and returns the tangency point of every
/// edge except `skip`, which sits at infinity.
fn layout(inc: &Incidence, rho: &[Option<f64>], edges: usize, skip: usize) -> Result<Vec<Option<(f64, f64)>>> {
    let total = inc.kites.len();
    let mut points: Vec<Option<(f64, f64)>> = vec![None; edges];
    let mut centers: Vec<Option<(f64, f64)>> = vec![None; total];
    let root = (0..total).find(|&j| rho[j].is_some()).unwrap();
    centers[root] = Some((0.0, 0.0));
    // angle of the first tangency point around each placed node
    let mut phase = vec![0.0f64; total];
    let mut queue = VecDeque::from([root]);
    let mut mismatch: f64 = 0.0;
    while let Some(j) = queue.pop_front() {
        let (cx, cy) = centers[j].unwrap();
        let rj = rho[j].unwrap().exp();
        let mut theta = phase[j];
        for (i, &k) in inc.kites[j].iter().enumerate() {
            let e = inc.starts[j][i];
            let p = (cx + rj * theta.cos(), cy + rj * theta.sin());
            match points[e] {
                Some(q) => mismatch = mismatch.max(((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt() / rj),
                None => points[e] = Some(p),
            }
            let width = match rho[k] {
                Some(rk) => 2.0 * (rk.exp() / rj).atan(),
                None => PI,
            };
            if let (Some(rk), None) = (rho[k], centers[k]) {
                let rk = rk.exp();
                let dir = theta + 0.5 * width;
                let dist = (rj * rj + rk * rk).sqrt();
                let c = (cx + dist * dir.cos(), cy + dist * dir.sin());
                centers[k] = Some(c);
                // the shared point is the end of this kite, seen from k
                let end = theta + width;
                let q = (cx + rj * end.cos(), cy + rj * end.sin());
                let pos = inc.starts[k].iter().position(|&x| x == inc.starts[j][(i + 1) % inc.starts[j].len()]).unwrap();
                let at = (q.1 - c.1).atan2(q.0 - c.0);
                // angles of the kites of k preceding the shared point
                let before: f64 = inc.kites[k][..pos]
                    .iter()
                    .map(|&m| match rho[m] {
                        Some(rm) => 2.0 * (rm.exp() / rk).atan(),
                        None => PI,
                    })
                    .sum();
                phase[k] = at - before;
                queue.push_back(k);
            }
            theta += width;
        }
    }
    if centers.iter().zip(rho).any(|(c, r)| r.is_some() && c.is_none()) {
        return Err(Error::SolverDiverged { residual: f64::INFINITY });
    }
    if (0..edges).any(|e| e != skip && points[e].is_none()) || mismatch > 1e-6 {
        return Err(Error::SolverDiverged { residual: mismatch });
    }
    Ok(points)
}

/// Boosts unit vectors so that their centroid is the origin.
fn center_points(points: &mut [Vec3]) -> Result<()> {
    for _ in 0..200 {
        let s: Vec3 = points.iter().sum();
        if s.norm() < 1e-15 * points.len() as f64 {
            return Ok(());
        }
        let mut h = Matrix3::identity() * points.len() as f64;
        for t in points.iter() {
            h -= t * t.transpose();
        }
        let Some(inv) = h.try_inverse() else {
            return Err(Error::SolverDiverged { residual: s.norm() });
        };
        let mut x = inv * s;
        if x.norm() > 0.5 {
            x *= 0.5 / x.norm();
        }
        let boost = Isometry::boost_to_origin(&x);
        for t in points.iter_mut() {
            *t = boost.apply_vec(t).normalize();
        }
    }
    let s: Vec3 = points.iter().sum();
    if s.norm() < 1e-12 * points.len() as f64 {
        Ok(())
    } else {
        Err(Error::SolverDiverged { residual: s.norm() })
    }
}

/// Plane through points on a circle, oriented so that the origin is inside.
fn circle_plane(points: &[Vec3]) -> OrientedPlane {
    let c = points.iter().sum::<Vec3>() / points.len() as f64;
    let m = if points.len() == 3 {
        (points[1] - points[0]).cross(&(points[2] - points[0])).normalize()
    } else {
        let mut a = DMatrix::zeros(points.len(), 3);
        for (i, p) in points.iter().enumerate() {
            for j in 0..3 {
                a[(i, j)] = p[j] - c[j];
            }
        }
        let svd = a.svd(false, true);
        let vt = svd.v_t.unwrap();
        let k = svd.singular_values.imin();
        Vec3::new(vt[(k, 0)], vt[(k, 1)], vt[(k, 2)])
    };
    let d = m.dot(&c);
    if d < 0.0 {
        OrientedPlane::from_affine(-m, -d)
    } else {
        OrientedPlane::from_affine(m, d)
    }
}

/// Solves for the midsphere pattern of `g`, gauge-fixed: tangency points
/// centered at the origin, face 0 facing `+z` with its tangency points
/// counter-clockwise seen from outside, and the tangency point of edge 0 in
/// the half-plane `y = 0, x > 0`.
pub fn solve_midsphere(g: &PlanarGraph) -> Result<MidspherePacking> {
    if !g.is_three_connected() {
        return Err(Error::NotPolyhedral("graph is not 3-connected".into()));
    }
    let n = g.vertex_count();
    let inc = incidence(g);
    let (a, b) = g.edge(0);
    let (f, h) = g.edge_faces(0);
    let (rho, angle_defect) = solve_radii(&inc, &[a, b, n + f, n + h])?;
    let planar = layout(&inc, &rho, g.edge_count(), 0)?;

    // normalize the planar scale before projecting back
    let known: Vec<(f64, f64)> = planar.iter().flatten().copied().collect();
    let (mx, my) = known.iter().fold((0.0, 0.0), |s, p| (s.0 + p.0, s.1 + p.1));
    let (mx, my) = (mx / known.len() as f64, my / known.len() as f64);
    let spread = (known.iter().map(|p| (p.0 - mx).powi(2) + (p.1 - my).powi(2)).sum::<f64>() / known.len() as f64).sqrt();
    let mut points: Vec<Vec3> = planar
        .iter()
        .map(|p| match p {
            None => Vec3::z(),
            Some((x, y)) => {
                let (x, y) = ((x - mx) / spread, (y - my) / spread);
                let q = x * x + y * y;
                Vec3::new(2.0 * x, 2.0 * y, q - 1.0) / (q + 1.0)
            }
        })
        .collect();
    center_points(&mut points)?;

    let face_points = |pts: &[Vec3], f: usize| -> Vec<Vec3> { g.face_edges(f).iter().map(|&e| pts[e]).collect() };
    let fp = face_points(&points, 0);
    let c0 = fp.iter().sum::<Vec3>();
    let newell: Vec3 = (0..fp.len()).map(|k| fp[k].cross(&fp[(k + 1) % fp.len()])).sum();
    if newell.dot(&c0) < 0.0 {
        for p in points.iter_mut() {
            p[1] = -p[1];
        }
    }
    let up = circle_plane(&face_points(&points, 0)).affine().0;
    let rot = rotation_between(&up, &Vec3::z());
    for p in points.iter_mut() {
        *p = (rot * *p).normalize();
    }
    let t0 = points[0];
    if t0[0].hypot(t0[1]) > 1e-12 {
        let spin = rotation_z(-t0[1].atan2(t0[0]));
        for p in points.iter_mut() {
            *p = spin * *p;
        }
    }

    let face_circles: Vec<OrientedPlane> = (0..g.face_count()).map(|f| circle_plane(&face_points(&points, f))).collect();
    let vertex_circles: Vec<OrientedPlane> =
        (0..n).map(|v| circle_plane(&g.vertex_edges(v).iter().map(|&e| points[e]).collect::<Vec<_>>())).collect();

    let mut tangency_residual: f64 = 0.0;
    for e in 0..g.edge_count() {
        let (f, h) = g.edge_faces(e);
        let pairing = crate::mink::minkowski(face_circles[f].normal(), face_circles[h].normal());
        tangency_residual = tangency_residual.max((pairing + 1.0).abs());
        let (mf, df) = face_circles[f].affine();
        let (mh, dh) = face_circles[h].affine();
        let dir = mf.cross(&mh);
        // closest point of the line f ∩ h to the origin
        let closest = (mh.cross(&dir) * df + dir.cross(&mf) * dh) / dir.norm_squared();
        tangency_residual = tangency_residual.max((closest.norm() - 1.0).abs());
    }
    Ok(MidspherePacking { face_circles, vertex_circles, tangency: points, angle_defect, tangency_residual })
}

/// The rectification of `g`, marked as rectified.
pub fn rectification(g: &PlanarGraph) -> Result<Polyhedron> {
    let packing = solve_midsphere(g)?;
    Polyhedron::build_rectified(packing.face_circles, g.clone())
}

/// Volume of the truncation of the rectification, an ideal right-angled
/// polyhedron with skeleton the medial graph of `g`.
pub fn rectification_volume(g: &PlanarGraph) -> Result<VolumeResult> {
    let t = rectification(g)?.truncate()?;
    truncation_volume(&t, &QuadratureOptions::default())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::graphs::{are_isomorphic, corpus};
    use crate::mink::PointKind;
    use crate::volume::{lobachevsky, VolumeMethod};

    fn antiprism_volume(n: usize) -> f64 {
        let (a, b) = (PI / 4.0, PI / (2.0 * n as f64));
        2.0 * n as f64 * (lobachevsky(a + b) + lobachevsky(a - b))
    }

    #[test]
    fn tetrahedron_volume_is_v8() {
        let r = rectification_volume(&corpus::tetrahedron()).unwrap();
        assert_eq!(r.method, VolumeMethod::IdealDecomposition);
        assert!((r.value - 8.0 * lobachevsky(PI / 4.0)).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn pyramids_give_antiprisms() {
        for n in 3..=8 {
            let r = rectification_volume(&corpus::pyramid(n)).unwrap();
            assert!((r.value - antiprism_volume(n)).abs() < 1e-9, "n = {n}: {} vs {}", r.value, antiprism_volume(n));
        }
    }

    #[test]
    fn pyramid_tangency_points_form_an_antiprism() {
        let n = 5;
        let g = corpus::pyramid(n);
        let p = solve_midsphere(&g).unwrap();
        let base = g.face_edges(0);
        let lateral: Vec<usize> = (0..g.edge_count()).filter(|e| !base.contains(e)).collect();
        let z0 = p.tangency[base[0]][2];
        let z1 = p.tangency[lateral[0]][2];
        assert!(base.iter().all(|&e| (p.tangency[e][2] - z0).abs() < 1e-10));
        assert!(lateral.iter().all(|&e| (p.tangency[e][2] - z1).abs() < 1e-10));
        let mut azimuths: Vec<f64> = p.tangency.iter().map(|t| t[1].atan2(t[0]).rem_euclid(2.0 * PI)).collect();
        azimuths.sort_by(f64::total_cmp);
        for k in 0..2 * n {
            let gap = (azimuths[(k + 1) % (2 * n)] - azimuths[k]).rem_euclid(2.0 * PI);
            assert!((gap - PI / n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn tetrahedron_tangency_points_form_an_octahedron() {
        let p = solve_midsphere(&corpus::tetrahedron()).unwrap();
        let t = &p.tangency;
        for i in 0..6 {
            let mut d: Vec<f64> = (0..6).filter(|&j| j != i).map(|j| (t[i] - t[j]).norm()).collect();
            d.sort_by(f64::total_cmp);
            for x in &d[..4] {
                assert!((x - 2f64.sqrt()).abs() < 1e-10);
            }
            assert!((d[4] - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn cube_matches_closed_form() {
        let p = solve_midsphere(&corpus::cube()).unwrap();
        let s = 1.0 / 2f64.sqrt();
        // edge midpoints of [-s, s]^3 lie on the unit sphere
        let mut mids = Vec::new();
        for i in 0..3 {
            for a in [-s, s] {
                for b in [-s, s] {
                    let mut v = Vec3::zeros();
                    v[(i + 1) % 3] = a;
                    v[(i + 2) % 3] = b;
                    mids.push(v);
                }
            }
        }
        let spectrum = |pts: &[Vec3]| {
            let mut d: Vec<f64> =
                (0..pts.len()).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| (pts[i] - pts[j]).norm()).collect();
            d.sort_by(f64::total_cmp);
            d
        };
        for (x, y) in spectrum(&p.tangency).iter().zip(spectrum(&mids)) {
            assert!((x - y).abs() < 1e-10);
        }
        let r = rectification(&corpus::cube()).unwrap();
        for v in r.vertices() {
            assert!((v.norm() - 3f64.sqrt() * s).abs() < 1e-10);
        }
    }

    #[test]
    fn gauge_is_fixed() {
        let p = solve_midsphere(&corpus::prism(5)).unwrap();
        let s: Vec3 = p.tangency.iter().sum();
        assert!(s.norm() < 1e-10);
        let m = p.face_circles[0].affine().0.normalize();
        assert!((m - Vec3::z()).norm() < 1e-12);
        assert!(p.tangency[0][1].abs() < 1e-12 && p.tangency[0][0] > 0.0);
    }

    #[test]
    fn corpus_rectifications_are_tangent() {
        for g in corpus::corpus_graphs() {
            let p = solve_midsphere(&g).unwrap();
            assert!(p.angle_defect < PACKING_DEFECT);
            assert!(p.tangency_residual < 1e-8, "{}", p.tangency_residual);
            let r = rectification(&g).unwrap();
            assert!(r.is_rectified());
            for a in r.dihedral_angles().unwrap() {
                assert!(a < 1e-7, "angle {a}");
            }
        }
    }

    #[test]
    fn truncation_is_ideal_right_angled_medial() {
        for g in corpus::corpus_graphs() {
            let t = rectification(&g).unwrap().truncate().unwrap();
            assert!(t.vertex_kinds().iter().all(|k| *k == PointKind::Ideal));
            for (angle, _) in t.edge_angles().unwrap() {
                assert!((angle - FRAC_PI_2).abs() < 1e-6);
            }
            assert!(are_isomorphic(t.skeleton().unwrap(), &g.medial().unwrap()));
        }
    }

    #[test]
    fn dual_graphs_have_equal_volume() {
        for g in corpus::corpus_graphs() {
            let a = rectification_volume(&g).unwrap().value;
            let b = rectification_volume(&g.dual().unwrap()).unwrap().value;
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn edge_collapses_do_not_increase_volume() {
        let mut checked = 0;
        for g in [corpus::cube(), corpus::prism(5), corpus::antiprism(4), corpus::pyramid(6), corpus::octahedron()] {
            let before = rectification_volume(&g).unwrap().value;
            for e in 0..g.edge_count() {
                let Ok(r) = g.edge_collapse(e) else { continue };
                if !r.three_connected {
                    continue;
                }
                let after = rectification_volume(&r.graph).unwrap().value;
                assert!(after <= before + 1e-8, "edge {e}: {after} > {before}");
                checked += 1;
            }
        }
        assert!(checked >= 10);
    }

    #[test]
    fn rejects_non_polyhedral_graphs() {
        let g = PlanarGraph::embedded(4, vec![vec![0, 1, 2, 3], vec![3, 2, 1, 0]]).unwrap();
        assert!(matches!(solve_midsphere(&g), Err(Error::NotPolyhedral(_))));
    }
}
