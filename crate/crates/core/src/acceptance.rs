//! End-to-end acceptance checks, shared by the `selftest` command and the
//! `acceptance` test target. Each criterion is deterministic: random inputs
//! come from fixed ChaCha seeds.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flow::{sup_volume_trace, FlowOptions};
use crate::graphs::{check_bao_bonahon, corpus, Admissibility, DualWitness, PlanarGraph};
use crate::mink::{classify_point_with, PointKind, Vec3};
use crate::numfmt::{format_general, format_sig};
use crate::polyhedron::{classify_vertex_by_angles_with, shapes, Polyhedron, Properness};
use crate::rectify::rectification_volume;
use crate::volume::{lobachevsky, schlafli_residual, VolumeMethod};

/// Result of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    /// `PASS <id> <name>: <detail> (<seconds> s)`, or `FAIL ...`.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{verdict} {} {}: {} ({:.2} s)", self.id, self.name, self.detail, self.seconds)
    }
}

type Check = fn() -> Result<(bool, String)>;

/// Identifier, short name, time limit in seconds and check of every criterion.
pub const CRITERIA: [(usize, &str, Option<f64>, Check); 9] = [
    (1, "tetrahedron-rectification", Some(5.0), tetrahedron_rectification),
    (2, "antiprism-family", Some(30.0), antiprism_family),
    (3, "duality", None, duality),
    (4, "schlafli-residual", Some(120.0), schlafli),
    (5, "flow-convergence", Some(600.0), flow_convergence),
    (6, "collapse-monotonicity", None, collapse_monotonicity),
    (7, "classification-consistency", None, classification_consistency),
    (8, "admissibility-convexity", None, admissibility_convexity),
    (9, "truncation-round-trip", None, round_trip),
];

/// Runs criterion `id`; `None` for an unknown id. Errors count as failures.
pub fn run_criterion(id: usize) -> Option<Outcome> {
    let &(id, name, limit, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let result = check();
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("ERR {} {e}", e.code())),
    };
    if let Some(limit) = limit {
        if seconds > limit {
            passed = false;
            detail.push_str(&format!("; over the {limit} s limit"));
        }
    }
    Some(Outcome { id, name, passed, detail, seconds })
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0)).collect()
}

fn g(x: f64) -> String {
    format_general(x, 4)
}

/// `2n (Λ(π/4 + π/2n) + Λ(π/4 − π/2n))`, the volume of the right-angled
/// ideal `n`-antiprism.
pub fn antiprism_volume(n: usize) -> f64 {
    let a = PI / (2.0 * n as f64);
    2.0 * n as f64 * (lobachevsky(PI / 4.0 + a) + lobachevsky(PI / 4.0 - a))
}

fn tetrahedron_rectification() -> Result<(bool, String)> {
    let v = rectification_volume(&corpus::tetrahedron())?;
    let want = 8.0 * lobachevsky(PI / 4.0);
    let diff = (v.value - want).abs();
    let passed = diff < 1e-6 && v.method == VolumeMethod::IdealDecomposition;
    let detail = format!("{} vs 8Λ(π/4) = {}, diff {} via {}", format_sig(v.value), format_sig(want), g(diff), v.method);
    Ok((passed, detail))
}

fn antiprism_family() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 3..=8 {
        let v = rectification_volume(&corpus::pyramid(n))?;
        worst = worst.max((v.value - antiprism_volume(n)).abs());
    }
    Ok((worst < 1e-6, format!("pyramids n = 3..8, max diff {}", g(worst))))
}

fn duality() -> Result<(bool, String)> {
    let mut graphs = vec![corpus::tetrahedron(), corpus::cube(), corpus::octahedron()];
    graphs.extend((3..=6).map(corpus::pyramid));
    graphs.push(corpus::prism(3));
    let mut worst: f64 = 0.0;
    for gr in &graphs {
        let a = rectification_volume(gr)?.value;
        let b = rectification_volume(&gr.dual()?)?.value;
        worst = worst.max((a - b).abs());
    }
    Ok((worst < 1e-8, format!("{} graphs, max diff {}", graphs.len(), g(worst))))
}

fn lerp_path(a: Vec<Vec3>, b: Vec<Vec3>) -> impl Fn(f64) -> Result<Polyhedron> {
    move |t| {
        let pts: Vec<Vec3> = a.iter().zip(&b).map(|(x, y)| x * (1.0 - t) + y * t).collect();
        Polyhedron::from_vertices(&pts, corpus::tetrahedron())
    }
}

fn proper_along<F: Fn(f64) -> Result<Polyhedron>>(path: &F, ts: &[f64]) -> bool {
    ts.iter().all(|&t| path(t).is_ok_and(|p| p.classify_vertices().overall == Properness::Proper))
}

/// Residuals on straight-line families between random tetrahedra, skipping
/// families whose vertex types change inside the differencing window.
fn schlafli() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (t0, h) = (0.5, 1e-4);
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for (radii, wanted) in [(0.3..0.9, 20), (1.05..1.5, 10)] {
        let mut done = 0;
        while done < wanted {
            let a = shapes::random_proper_tetrahedron(&mut rng, radii.clone());
            let b = shapes::random_proper_tetrahedron(&mut rng, radii.clone());
            let path = lerp_path(a.vertices().to_vec(), b.vertices().to_vec());
            if !proper_along(&path, &[t0 - h, t0, t0 + h]) {
                skipped += 1;
                continue;
            }
            match schlafli_residual(&path, t0, h) {
                Ok(r) => {
                    worst = worst.max(r);
                    done += 1;
                }
                Err(Error::PathDiscontinuous(_)) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok((worst < 1e-3, format!("30 families, max residual {}, {skipped} redrawn", g(worst))))
}

fn flow_convergence() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut passed = true;
    let mut parts = Vec::new();
    let kinds: [(&str, PlanarGraph); 3] =
        [("K4", corpus::tetrahedron()), ("pyramid", corpus::pyramid(4)), ("prism", corpus::prism(3))];
    for (label, gr) in kinds {
        let target = rectification_volume(&gr)?.value;
        let mut worst: f64 = 0.0;
        let mut monotone = true;
        for seed in 0..5u64 {
            let p0 = match label {
                "K4" => shapes::random_proper_tetrahedron(&mut rng, 0.2..1.4),
                "pyramid" => shapes::random_proper_pyramid(&mut rng),
                _ => shapes::random_proper_prism(&mut rng),
            };
            let trace = sup_volume_trace(&gr, &p0, &FlowOptions { seed, ..FlowOptions::default() })?;
            worst = worst.max((trace.sup_estimate - target).abs() / target);
            monotone &= trace.is_monotone();
        }
        passed &= worst < 0.01 && monotone;
        parts.push(format!("{label} max rel err {}{}", g(worst), if monotone { "" } else { " NOT monotone" }));
    }
    Ok((passed, parts.join(", ")))
}

/// The first few 3-connectivity preserving edge collapses of the corpus,
/// at most two per graph, ten in all.
pub fn collapse_instances() -> Vec<(PlanarGraph, usize, PlanarGraph)> {
    let mut graphs = corpus::corpus_graphs();
    graphs.push(corpus::prism(5));
    graphs.push(corpus::antiprism(4));
    graphs.push(corpus::cuboctahedron());
    let mut out = Vec::new();
    for gr in graphs {
        let mut taken = 0;
        for e in 0..gr.edge_count() {
            if taken == 2 || out.len() == 10 {
                break;
            }
            if let Ok(r) = gr.edge_collapse(e) {
                if r.three_connected {
                    out.push((gr.clone(), e, r.graph));
                    taken += 1;
                }
            }
        }
    }
    out
}

fn collapse_monotonicity() -> Result<(bool, String)> {
    let instances = collapse_instances();
    let mut worst = f64::NEG_INFINITY;
    for (before, _, after) in &instances {
        let gain = rectification_volume(after)?.value - rectification_volume(before)?.value;
        worst = worst.max(gain);
    }
    let passed = instances.len() == 10 && worst <= 1e-8;
    Ok((passed, format!("{} collapses, max volume change {}", instances.len(), g(worst))))
}

/// Random simple polyhedra with perturbed planes, all proper.
fn perturbed_polyhedra(count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Polyhedron>> {
    let mut out = Vec::new();
    while out.len() < count {
        // shapes whose edges miss the ball are redrawn
        let base = match rng.random_range(0..5) {
            0 => shapes::regular_tetrahedron(rng.random_range(0.3..1.6)),
            1 => shapes::tetrahedron_with_radii([
                rng.random_range(0.3..1.6),
                rng.random_range(0.3..1.6),
                rng.random_range(0.3..1.6),
                rng.random_range(0.3..1.6),
            ]),
            2 => shapes::prism(3, rng.random_range(0.3..0.9), rng.random_range(0.2..0.8)),
            3 => shapes::prism(5, rng.random_range(0.3..0.9), rng.random_range(0.2..0.8)),
            _ => shapes::cube(rng.random_range(0.2..0.75)),
        };
        let Ok(base) = base else { continue };
        if let Ok(p) = shapes::perturb_planes(&base, 0.02, rng) {
            if p.classify_vertices().overall == Properness::Proper {
                out.push(p);
            }
        }
    }
    Ok(out)
}

fn classification_consistency() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tau = 1e-6;
    let (mut vertices, mut mismatches) = (0, 0);
    let mut counts = [0usize; 3];
    for p in perturbed_polyhedra(200, &mut rng)? {
        for u in 0..p.vertices().len() {
            let by_angles = classify_vertex_by_angles_with(&p.incident_angles(u)?, tau)?;
            let geometric = classify_point_with(&p.vertex(u), tau);
            vertices += 1;
            counts[geometric as usize] += 1;
            if by_angles != geometric {
                mismatches += 1;
            }
        }
    }
    let detail = format!(
        "200 polyhedra, {vertices} vertices ({} real, {} hyperideal), {mismatches} mismatches",
        counts[PointKind::Real as usize],
        counts[PointKind::Hyperideal as usize]
    );
    Ok((mismatches == 0, detail))
}

/// Re-derives a violation from its witness alone: the faces and edges must
/// form a dual cycle or path and the angle sum must reach the bound.
pub fn witness_holds(gr: &PlanarGraph, theta: &[f64], verdict: &Admissibility) -> bool {
    let (w, closed): (&DualWitness, bool) = match verdict {
        Admissibility::ViolatedClosedCurve(w) => (w, true),
        Admissibility::ViolatedArc(w) => (w, false),
        _ => return false,
    };
    let k = w.edges.len();
    let hops = if closed { w.faces.len() } else { w.faces.len() - 1 };
    if k == 0 || hops != k {
        return false;
    }
    let mut seen = w.faces.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != w.faces.len() {
        return false;
    }
    for (i, &e) in w.edges.iter().enumerate() {
        let (a, b) = (w.faces[i], w.faces[(i + 1) % w.faces.len()]);
        let (f, h) = gr.edge_faces(e);
        if !((f, h) == (a, b) || (f, h) == (b, a)) {
            return false;
        }
    }
    let sum: f64 = w.edges.iter().map(|&e| theta[e]).sum();
    let bound = if closed { (k as f64 - 2.0) * PI } else { (k as f64 - 1.0) * PI };
    if !closed {
        let (first, last) = (gr.face(w.faces[0]), gr.face(*w.faces.last().unwrap()));
        if !first.iter().any(|v| last.contains(v)) {
            return false;
        }
    }
    sum >= bound - 1e-9
}

fn admissibility_convexity() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut passed = true;
    let mut parts = Vec::new();
    for (label, gr) in [("K4", corpus::tetrahedron()), ("cube", corpus::cube())] {
        let (mut admissible, mut inadmissible) = (Vec::new(), 0);
        let (mut bad_midpoints, mut bad_witnesses) = (0, 0);
        while admissible.len() < 100 || inadmissible < 50 {
            let theta: Vec<f64> = (0..gr.edge_count()).map(|_| rng.random_range(0.02..2.2)).collect();
            let verdict = check_bao_bonahon(&gr, &theta)?;
            match verdict {
                Admissibility::Admissible => {
                    if admissible.len() < 100 {
                        admissible.push(theta);
                    }
                }
                Admissibility::AdmissibleBoundary(_) => {}
                _ => {
                    if inadmissible < 50 {
                        inadmissible += 1;
                        if !witness_holds(&gr, &theta, &verdict) {
                            bad_witnesses += 1;
                        }
                    }
                }
            }
        }
        for pair in admissible.chunks(2) {
            let mid: Vec<f64> = pair[0].iter().zip(&pair[1]).map(|(a, b)| 0.5 * (a + b)).collect();
            if !check_bao_bonahon(&gr, &mid)?.is_admissible() {
                bad_midpoints += 1;
            }
        }
        passed &= bad_midpoints == 0 && bad_witnesses == 0;
        parts.push(format!(
            "{label}: 50 pairs with {bad_midpoints} bad midpoints, 50 witnesses with {bad_witnesses} failing"
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn round_trip() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = 0;
    let mut done = 0;
    while done < 50 {
        let p = if done % 2 == 0 {
            shapes::random_proper_tetrahedron(&mut rng, 0.5..1.5)
        } else {
            perturbed_polyhedra(1, &mut rng)?.remove(0)
        };
        if p.classify_vertices().count(PointKind::Hyperideal) == 0 {
            continue;
        }
        let t = p.truncate()?;
        let stripped = t.strip();
        let same = stripped.len() == p.planes().len()
            && stripped.iter().zip(p.planes()).all(|(a, b)| {
                a.normal().iter().zip(b.normal().iter()).all(|(x, y)| x.to_bits() == y.to_bits())
            });
        if !same {
            failures += 1;
        }
        done += 1;
    }
    Ok((failures == 0, format!("50 polyhedra, {failures} differences")))
}
