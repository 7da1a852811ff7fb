//! Exhaustive check of the Bao–Bonahon inequalities for dihedral angles of
//! hyperideal polyhedra.
//!
//! Closed curves crossing distinct edges once are simple cycles of the dual
//! graph; arcs between two faces are simple dual paths. Appending an edge with
//! angle `θ < π` lowers the slack `Σθ − bound` by `π − θ`, so the search stops
//! extending a path as soon as its slack is safely negative.

use std::f64::consts::PI;

use super::PlanarGraph;
use crate::error::{Error, Result};
use crate::tolerances::ADMISSIBILITY_EQ;

/// A dual cycle or path together with its angle sum and bound.
#[derive(Debug, Clone, PartialEq)]
pub struct DualWitness {
    /// Faces visited, in order (a cycle does not repeat its first face).
    pub faces: Vec<usize>,
    /// Edges crossed, in order.
    pub edges: Vec<usize>,
    pub sum: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Admissibility {
    Admissible,
    /// Admissible, but some closed curve attains its bound with all crossed
    /// edges at a common vertex (an ideal vertex).
    AdmissibleBoundary(DualWitness),
    ViolatedClosedCurve(DualWitness),
    ViolatedArc(DualWitness),
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible | Admissibility::AdmissibleBoundary(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Admissibility::Admissible => "Admissible",
            Admissibility::AdmissibleBoundary(_) => "AdmissibleBoundary",
            Admissibility::ViolatedClosedCurve(_) => "ViolatedClosedCurve",
            Admissibility::ViolatedArc(_) => "ViolatedArc",
        }
    }

    pub fn witness(&self) -> Option<&DualWitness> {
        match self {
            Admissibility::Admissible => None,
            Admissibility::AdmissibleBoundary(w)
            | Admissibility::ViolatedClosedCurve(w)
            | Admissibility::ViolatedArc(w) => Some(w),
        }
    }
}

/// True when some vertex is an endpoint of every listed edge.
pub(crate) fn edges_share_vertex(g: &PlanarGraph, edges: &[usize]) -> bool {
    let (a, b) = g.edge(edges[0]);
    [a, b].into_iter().any(|v| edges.iter().all(|&e| {
        let (x, y) = g.edge(e);
        x == v || y == v
    }))
}

struct Search<'a> {
    g: &'a PlanarGraph,
    theta: &'a [f64],
    dual: Vec<Vec<(usize, usize)>>,
    tol: f64,
    cycle_violation: Option<DualWitness>,
    boundary: Option<DualWitness>,
    arc_violation: Option<DualWitness>,
}

fn keep_shorter(slot: &mut Option<DualWitness>, w: DualWitness) {
    if slot.as_ref().is_none_or(|old| w.edges.len() < old.edges.len()) {
        *slot = Some(w);
    }
}

impl Search<'_> {
    fn cycles_from(&mut self, start: usize, faces: &mut Vec<usize>, edges: &mut Vec<usize>, sum: f64) {
        let cur = *faces.last().unwrap();
        for k in 0..self.dual[cur].len() {
            let (next, e) = self.dual[cur][k];
            let s = sum + self.theta[e];
            let h = edges.len() + 1;
            if next == start {
                // each cycle once: at least three faces, second face below the last
                if faces.len() >= 3 && faces[1] < cur {
                    edges.push(e);
                    self.judge_cycle(faces, edges, s, (h as f64 - 2.0) * PI);
                    edges.pop();
                }
                continue;
            }
            if next < start || faces.contains(&next) {
                continue;
            }
            // slack of any cycle through this prefix is below the prefix slack
            if s - (h as f64 - 2.0) * PI < -self.tol {
                continue;
            }
            faces.push(next);
            edges.push(e);
            self.cycles_from(start, faces, edges, s);
            faces.pop();
            edges.pop();
        }
    }

    fn judge_cycle(&mut self, faces: &[usize], edges: &[usize], sum: f64, bound: f64) {
        let excess = sum - bound;
        if excess < -self.tol {
            return;
        }
        let w = DualWitness { faces: faces.to_vec(), edges: edges.to_vec(), sum, bound };
        if excess <= self.tol && edges_share_vertex(self.g, edges) {
            keep_shorter(&mut self.boundary, w);
        } else {
            keep_shorter(&mut self.cycle_violation, w);
        }
    }

    fn arcs_from(&mut self, faces: &mut Vec<usize>, edges: &mut Vec<usize>, sum: f64) {
        let start = faces[0];
        let cur = *faces.last().unwrap();
        if !edges.is_empty() && start < cur {
            let shares = self.g.face(start).iter().any(|v| self.g.face(cur).contains(v));
            let bound = (edges.len() as f64 - 1.0) * PI;
            if shares && sum >= bound - self.tol && !edges_share_vertex(self.g, edges) {
                let w = DualWitness { faces: faces.clone(), edges: edges.clone(), sum, bound };
                keep_shorter(&mut self.arc_violation, w);
            }
        }
        for k in 0..self.dual[cur].len() {
            let (next, e) = self.dual[cur][k];
            if faces.contains(&next) {
                continue;
            }
            let s = sum + self.theta[e];
            if s - (edges.len() as f64) * PI < -self.tol {
                continue;
            }
            faces.push(next);
            edges.push(e);
            self.arcs_from(faces, edges, s);
            faces.pop();
            edges.pop();
        }
    }
}

/// Checks both families of inequalities exhaustively. Violations of the
/// closed-curve condition take precedence over arc violations, which take
/// precedence over boundary equalities; within a kind the shortest witness
/// is reported.
pub fn check_bao_bonahon(g: &PlanarGraph, theta: &[f64]) -> Result<Admissibility> {
    if theta.len() != g.edge_count() {
        return Err(Error::InvalidArgument(format!(
            "expected {} angles, got {}",
            g.edge_count(),
            theta.len()
        )));
    }
    for (edge, &angle) in theta.iter().enumerate() {
        if !(angle > 0.0 && angle < PI) {
            return Err(Error::AngleOutOfRange { edge, angle });
        }
    }
    let mut dual = vec![Vec::new(); g.face_count()];
    for e in 0..g.edge_count() {
        let (f, h) = g.edge_faces(e);
        dual[f].push((h, e));
        dual[h].push((f, e));
    }
    for adj in &mut dual {
        adj.sort_unstable();
    }
    let mut s = Search {
        g,
        theta,
        dual,
        tol: ADMISSIBILITY_EQ,
        cycle_violation: None,
        boundary: None,
        arc_violation: None,
    };
    for start in 0..g.face_count() {
        s.cycles_from(start, &mut vec![start], &mut Vec::new(), 0.0);
        s.arcs_from(&mut vec![start], &mut Vec::new(), 0.0);
    }
    Ok(if let Some(w) = s.cycle_violation {
        Admissibility::ViolatedClosedCurve(w)
    } else if let Some(w) = s.arc_violation {
        Admissibility::ViolatedArc(w)
    } else if let Some(w) = s.boundary {
        Admissibility::AdmissibleBoundary(w)
    } else {
        Admissibility::Admissible
    })
}
