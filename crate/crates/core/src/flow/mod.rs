//! The angle flow: prescribe dihedral angles `t θ` and follow the polyhedra
//! that realize them as `t` decreases, handling the ways the path can
//! degenerate. Volumes increase along the path and approach the volume of
//! the rectification.
//!
//! Steps are Newton continuations ([`realize_from_angles`]). When a step
//! changes the vertex types or creates a new almost proper incidence, the
//! change is localized by bisection and handled:
//!
//! * a real vertex reaching the sphere is pushed just past it by
//!   [`escape_to_sphere`], and the angle direction is re-read from the result;
//! * a real vertex reaching a polar plane is held on it from then on (its edge
//!   to the pole, if any, loses its prescribed angle);
//! * a step that cannot be taken because an edge or face shrinks away rewrites
//!   the skeleton by the matching collapse move and continues on the new one.

mod deform;
mod realize;
#[cfg(test)]
mod tests;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use deform::{escape_deformation, escape_to_sphere, nudge_adaptive, nudge_ideal_vertices};
pub use realize::{gauge_fix, realize_from_angles};

use crate::error::{Error, Result};
use crate::graphs::{AngleVector, CollapseResult, PlanarGraph};
use crate::mink::{lift, PointKind, Vec3};
use crate::numfmt::format_sig;
use crate::polyhedron::{Polyhedron, Properness};
use crate::tolerances::TAU_IDEAL;
use crate::volume::{volume_with, QuadratureOptions, VolumeResult};
use deform::{free_incidence, polar_gaps, ONSET_BAND};
use realize::{assemble, gauge_fix as fix, newton, realize_constrained, Config, Constraints};

/// Width in `t` to which a change of vertex types is localized.
const LOCALIZE: f64 = 1e-11;
/// How far past the sphere an escaping vertex is pushed.
const ESCAPE_ETA: f64 = 1e-7;
/// Length under which an edge or face counts as collapsing once the step
/// size has run out.
const STALL_COLLAPSE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowOptions {
    /// Seed of the random perturbation of the angle direction.
    pub seed: u64,
    /// Smallest scale factor visited.
    pub t_min: f64,
    pub initial_step: f64,
    /// Step size under which a stuck path is examined for collapses.
    pub min_step: f64,
    /// Defaults to ten times the edge count.
    pub max_events: Option<usize>,
    /// Size of the random offset added to every angle; below `1e-6`.
    pub perturbation: f64,
    pub trace_quadrature: QuadratureOptions,
    pub final_quadrature: QuadratureOptions,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            seed: 0,
            t_min: 0.02,
            initial_step: 1e-2,
            min_step: 1e-7,
            max_events: None,
            perturbation: 5e-7,
            trace_quadrature: QuadratureOptions::with_tol(1e-3),
            final_quadrature: QuadratureOptions::with_tol(1e-5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowEventKind {
    /// Edge of the skeleton current at the time of the event.
    EdgeCollapsed { edge: usize },
    /// Face flattened onto a segment between `ends`.
    FaceCollapsed { face: usize, ends: (usize, usize) },
    VertexBecameIdeal { vertex: usize },
    /// The real `vertex` reached the polar plane of `pole`.
    AlmostProperOnset { vertex: usize, pole: usize },
    BecameHyperidealOnly,
}

impl FlowEventKind {
    pub fn name(&self) -> &'static str {
        match self {
            FlowEventKind::EdgeCollapsed { .. } => "EdgeCollapsed",
            FlowEventKind::FaceCollapsed { .. } => "FaceCollapsed",
            FlowEventKind::VertexBecameIdeal { .. } => "VertexBecameIdeal",
            FlowEventKind::AlmostProperOnset { .. } => "AlmostProperOnset",
            FlowEventKind::BecameHyperidealOnly => "BecameHyperidealOnly",
        }
    }
}

impl fmt::Display for FlowEventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowEventKind::EdgeCollapsed { edge } => write!(f, "EdgeCollapsed({edge})"),
            FlowEventKind::FaceCollapsed { face, ends } => write!(f, "FaceCollapsed({face}; {}-{})", ends.0, ends.1),
            FlowEventKind::VertexBecameIdeal { vertex } => write!(f, "VertexBecameIdeal({vertex})"),
            FlowEventKind::AlmostProperOnset { vertex, pole } => write!(f, "AlmostProperOnset({vertex}, {pole})"),
            FlowEventKind::BecameHyperidealOnly => f.write_str("BecameHyperidealOnly"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowEvent {
    pub kind: FlowEventKind,
    pub t_value: f64,
    /// Volume of the state the flow continues from.
    pub volume_at_event: VolumeResult,
    /// Skeleton after the event.
    pub skeleton_hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowStep {
    pub t: f64,
    pub angles: AngleVector,
    pub polyhedron: Polyhedron,
    pub volume: VolumeResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub seed: u64,
    pub initial_skeleton: PlanarGraph,
    pub steps: Vec<FlowStep>,
    pub events: Vec<FlowEvent>,
    pub final_skeleton: PlanarGraph,
    /// Volume of the last state, integrated at the final tolerance.
    pub sup_estimate: f64,
    pub sup_error: f64,
    /// Why the path ended before reaching `t_min`, if it did.
    pub stopped_early: Option<String>,
}

impl FlowTrace {
    /// Whether every step's volume is at least the previous one's, up to the
    /// sum of their error estimates.
    pub fn is_monotone(&self) -> bool {
        self.worst_drop() <= 0.0
    }

    /// Largest decrease between consecutive steps beyond their error bars.
    pub fn worst_drop(&self) -> f64 {
        self.steps
            .windows(2)
            .map(|w| {
                let (a, b) = (&w[0].volume, &w[1].volume);
                a.value - b.value - a.error_estimate - b.error_estimate
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Applies the recorded collapses to the initial skeleton.
    pub fn replay_skeleton(&self) -> Result<PlanarGraph> {
        let mut g = self.initial_skeleton.clone();
        for ev in &self.events {
            match ev.kind {
                FlowEventKind::EdgeCollapsed { edge } => g = g.edge_collapse(edge)?.graph,
                FlowEventKind::FaceCollapsed { face, ends } => g = g.face_collapse(face, ends)?.graph,
                _ => {}
            }
        }
        Ok(g)
    }

    /// CSV with columns `t,volume,vol_error,event,skeleton_hash`: one row per
    /// step and one per event, in decreasing `t`.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(f64, usize, String)> = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            let line = format!(
                "{},{},{},,{}",
                format_sig(s.t),
                format_sig(s.volume.value),
                format_sig(s.volume.error_estimate),
                s.polyhedron.skeleton().skeleton_hash()
            );
            rows.push((s.t, 2 * i, line));
        }
        for (i, e) in self.events.iter().enumerate() {
            let line = format!(
                "{},{},{},{},{}",
                format_sig(e.t_value),
                format_sig(e.volume_at_event.value),
                format_sig(e.volume_at_event.error_estimate),
                e.kind.name(),
                e.skeleton_hash
            );
            rows.push((e.t_value, 2 * i + 1, line));
        }
        rows.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut out = String::from("t,volume,vol_error,event,skeleton_hash\n");
        for (_, _, line) in rows {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Vertex kinds and the real/polar incidences at or past the onset band.
#[derive(Debug, Clone, PartialEq)]
struct Regime {
    kinds: Vec<PointKind>,
    pairs: Vec<(usize, usize)>,
}

fn regime(p: &Polyhedron) -> Regime {
    let kinds = p.classify_vertices().kinds;
    let mut pairs: Vec<(usize, usize)> =
        polar_gaps(p, &kinds).into_iter().filter(|g| g.2 >= -ONSET_BAND).map(|g| (g.0, g.1)).collect();
    pairs.sort_unstable();
    Regime { kinds, pairs }
}

enum Change {
    BecameIdeal(usize),
    Onset(usize, usize),
    Other(String),
}

fn changes(before: &Regime, after: &Regime) -> Vec<Change> {
    let mut out = Vec::new();
    for (v, (b, a)) in before.kinds.iter().zip(&after.kinds).enumerate() {
        match (b, a) {
            (x, y) if x == y => {}
            (PointKind::Real, _) => out.push(Change::BecameIdeal(v)),
            _ => out.push(Change::Other(format!("vertex {v} went from {b} to {a}"))),
        }
    }
    for &(v, w) in &after.pairs {
        if !before.pairs.contains(&(v, w)) && after.kinds[v] == PointKind::Real {
            out.push(Change::Onset(v, w));
        }
    }
    out
}

struct Flow<'o> {
    opts: &'o FlowOptions,
    g: PlanarGraph,
    theta: Vec<f64>,
    /// Almost proper incidences held fixed, `(real vertex, pole)`.
    stratum: Vec<(usize, usize)>,
    t: f64,
    current: Polyhedron,
    steps: Vec<FlowStep>,
    events: Vec<FlowEvent>,
    hyperideal_only: bool,
}

impl Flow<'_> {
    fn targets(&self, t: f64) -> Vec<Option<f64>> {
        (0..self.g.edge_count())
            .map(|e| {
                let (a, b) = self.g.edge(e);
                let free = self.stratum.iter().any(|&(v, w)| (v, w) == (a, b) || (v, w) == (b, a));
                (!free).then(|| t * self.theta[e])
            })
            .collect()
    }

    fn solve(&self, t: f64, from: &Polyhedron) -> Result<Polyhedron> {
        let targets = self.targets(t);
        realize_constrained(from, &Constraints { angles: &targets, polar: &self.stratum })
    }

    fn volume(&self, p: &Polyhedron) -> Result<VolumeResult> {
        volume_with(p, &self.opts.trace_quadrature)
    }

    fn record_step(&mut self, t: f64, p: Polyhedron) -> Result<()> {
        let volume = self.volume(&p)?;
        let angles = AngleVector::new(p.dihedral_angles()?)?;
        let step = FlowStep { t, angles, polyhedron: p.clone(), volume };
        match self.steps.last_mut() {
            Some(last) if last.t <= t => *last = step,
            _ => self.steps.push(step),
        }
        self.t = t;
        self.current = p;
        Ok(())
    }

    fn record_event(&mut self, kind: FlowEventKind, t_value: f64) -> Result<()> {
        let volume_at_event = self.volume(&self.current)?;
        self.events.push(FlowEvent { kind, t_value, volume_at_event, skeleton_hash: self.g.skeleton_hash() });
        Ok(())
    }

    /// Re-reads the angle direction from the current state at the current `t`.
    fn rebase(&mut self) -> Result<()> {
        self.theta = self.current.dihedral_angles()?.iter().map(|a| a / self.t).collect();
        Ok(())
    }

    fn max_events(&self) -> usize {
        self.opts.max_events.unwrap_or(10 * self.g.edge_count())
    }

    fn run(&mut self) -> Result<Option<String>> {
        let mut dt = self.opts.initial_step;
        let mut floor = self.opts.t_min;
        loop {
            if self.events.len() > self.max_events() {
                return Err(Error::MaxEventsExceeded(self.events.len()));
            }
            let kinds = self.current.classify_vertices().kinds;
            let all_hyperideal = kinds.iter().all(|k| *k == PointKind::Hyperideal);
            // recorded once t has moved past the last event
            let fresh = self.events.last().is_none_or(|e| e.t_value > self.t);
            if all_hyperideal && !self.hyperideal_only && fresh {
                self.hyperideal_only = true;
                self.record_event(FlowEventKind::BecameHyperidealOnly, self.t)?;
            }
            if self.t <= floor * (1.0 + 1e-12) {
                if all_hyperideal {
                    if !self.hyperideal_only {
                        self.hyperideal_only = true;
                        self.record_event(FlowEventKind::BecameHyperidealOnly, self.t)?;
                    }
                    return Ok(None);
                }
                floor *= 0.5;
                if floor < 1e-4 {
                    return Err(Error::StallDetected { t: self.t });
                }
            }
            let next = (self.t - dt).max(floor);
            match self.solve(next, &self.current) {
                Ok(cand) => {
                    let (before, after) = (regime(&self.current), regime(&cand));
                    if before == after {
                        self.record_step(next, cand)?;
                        dt = (dt * 1.5).min(self.opts.initial_step);
                    } else if let Some(reason) = self.handle_change(next, cand, &before)? {
                        return Ok(Some(reason));
                    }
                }
                Err(_) => {
                    dt *= 0.5;
                    if dt < self.opts.min_step {
                        if let Some(reason) = self.handle_stall()? {
                            return Ok(Some(reason));
                        }
                        dt = self.opts.initial_step;
                    }
                }
            }
        }
    }

    /// Localizes a change of regime between the current state and `hi` and
    /// handles it. Returns a reason when the flow has to stop.
    fn handle_change(&mut self, hi_t: f64, hi: Polyhedron, before: &Regime) -> Result<Option<String>> {
        let (mut lo_t, mut lo) = (self.t, self.current.clone());
        let (mut hi_t, mut hi) = (hi_t, hi);
        loop {
            let width = lo_t - hi_t;
            let n = changes(before, &regime(&hi)).len();
            if width <= LOCALIZE || (width <= 1e-10 && n == 1) {
                break;
            }
            let mid = 0.5 * (lo_t + hi_t);
            match self.solve(mid, &lo) {
                Ok(m) if regime(&m) == *before => (lo_t, lo) = (mid, m),
                Ok(m) => (hi_t, hi) = (mid, m),
                Err(_) => break,
            }
        }
        if lo_t < self.t {
            self.record_step(lo_t, lo.clone())?;
        }
        let after = regime(&hi);
        let list = changes(before, &after);
        let first = list
            .iter()
            .find(|c| matches!(c, Change::BecameIdeal(_)))
            .or_else(|| list.first())
            .expect("regimes differ");
        match *first {
            Change::BecameIdeal(v) => self.vertex_became_ideal(v, &lo, hi_t, &hi),
            Change::Onset(v, w) => self.onset(v, w, lo_t, &lo, hi_t),
            Change::Other(ref s) => Ok(Some(s.clone())),
        }
    }

    fn acceptable(&self, p: &Polyhedron, stratum: &[(usize, usize)]) -> bool {
        let r = regime(p);
        let report = p.classify_vertices();
        !r.kinds.contains(&PointKind::Ideal)
            && report.overall != Properness::Improper
            && r.pairs.iter().all(|pair| stratum.contains(pair))
    }

    /// Vertices that went from real to hyperideal between `before` and `q`,
    /// provided `v` is among them, nothing else changed and `q` is usable.
    fn crossed(&self, before: &[PointKind], q: &Polyhedron, v: usize) -> Option<Vec<usize>> {
        let mut moved = Vec::new();
        for (u, (b, a)) in before.iter().zip(&regime(q).kinds).enumerate() {
            match (b, a) {
                (PointKind::Real, PointKind::Hyperideal) => moved.push(u),
                (x, y) if x == y => {}
                _ => return None,
            }
        }
        (moved.contains(&v) && self.acceptable(q, &self.stratum)).then_some(moved)
    }

    /// Continues from `q` at `t` after the vertices in `moved` crossed the
    /// sphere.
    fn after_crossing(&mut self, q: Polyhedron, t: f64, moved: Vec<usize>, t_value: f64, rebase: bool) -> Result<()> {
        self.stratum.retain(|&(a, _)| !moved.contains(&a));
        self.current = q;
        self.t = t;
        if rebase {
            self.rebase()?;
        }
        let p = self.current.clone();
        self.record_step(t, p)?;
        for u in moved {
            self.record_event(FlowEventKind::VertexBecameIdeal { vertex: u }, t_value)?;
        }
        Ok(())
    }

    fn vertex_became_ideal(&mut self, v: usize, lo: &Polyhedron, hi_t: f64, hi: &Polyhedron) -> Result<Option<String>> {
        let kinds = regime(lo).kinds;
        let escaped = escape_to_sphere(lo, v, ESCAPE_ETA)
            .and_then(|q| fix(&q))
            .ok()
            .and_then(|q| self.crossed(&kinds, &q, v).map(|moved| (q, moved)));
        if let Some((q, moved)) = escaped {
            // the escaped polyhedron becomes the state at hi_t
            self.after_crossing(q, hi_t, moved, hi_t, true)?;
            return Ok(None);
        }
        // otherwise follow the path itself a little past the crossing
        for offset in [1e-6, 4e-6, 1.6e-5, 6.4e-5, 2.56e-4] {
            let past = hi_t - offset;
            if past <= 0.0 {
                break;
            }
            let Ok(q) = self.solve(past, hi) else { continue };
            if let Some(moved) = self.crossed(&kinds, &q, v) {
                self.after_crossing(q, past, moved, hi_t, false)?;
                return Ok(None);
            }
        }
        Ok(Some(format!("vertex {v} reached the sphere at t = {hi_t} and could not be moved past it")))
    }

    fn onset(&mut self, v: usize, w: usize, lo_t: f64, lo: &Polyhedron, hi_t: f64) -> Result<Option<String>> {
        let mut stratum = self.stratum.clone();
        stratum.push((v, w));
        stratum.sort_unstable();
        let adjacent = self.g.edge_between(v, w).is_some();
        let held = if adjacent {
            let saved = std::mem::replace(&mut self.stratum, stratum.clone());
            let r = self.solve(lo_t, lo).ok().filter(|q| self.acceptable(q, &stratum));
            if r.is_none() {
                self.stratum = saved;
            }
            r
        } else {
            None
        };
        match held {
            Some(q) => {
                self.record_step(lo_t, q)?;
            }
            None => {
                // move the vertex back inside and keep the proper stratum
                let q = free_incidence(lo, v, w, 1e-7).and_then(|q| fix(&q));
                match q {
                    Ok(q) if self.acceptable(&q, &self.stratum) => {
                        self.current = q;
                        self.t = lo_t;
                        self.rebase()?;
                        let p = self.current.clone();
                        self.record_step(lo_t, p)?;
                    }
                    _ => return Ok(Some(format!("vertex {v} reached the polar plane of {w} at t = {hi_t}"))),
                }
            }
        }
        self.record_event(FlowEventKind::AlmostProperOnset { vertex: v, pole: w }, lo_t)?;
        Ok(None)
    }

    /// The path cannot be continued: look for a collapsing edge or face.
    fn handle_stall(&mut self) -> Result<Option<String>> {
        let p = self.current.clone();
        let kinds = p.classify_vertices().kinds;
        let lengths = p.edge_lengths()?;
        let mut edge = None;
        for (e, &(a, b)) in self.g.edges().iter().enumerate() {
            let chart = (p.vertices()[a] - p.vertices()[b]).norm();
            let short = if kinds[a] == PointKind::Real || kinds[b] == PointKind::Real {
                lengths[e].min(chart)
            } else {
                chart
            };
            if short < STALL_COLLAPSE && edge.is_none_or(|(_, s)| short < s) {
                edge = Some((e, short));
            }
        }
        let (face, width) = p.min_face_width();
        if let Some((e, _)) = edge.filter(|&(_, s)| s <= width) {
            let result = self.g.edge_collapse(e)?;
            return self.rewrite(result, FlowEventKind::EdgeCollapsed { edge: e });
        }
        if width < STALL_COLLAPSE {
            let verts = self.g.face(face).to_vec();
            let mut ends = (verts[0], verts[1]);
            let mut best = -1.0;
            for (i, &a) in verts.iter().enumerate() {
                for &b in &verts[i + 1..] {
                    let d = (p.vertices()[a] - p.vertices()[b]).norm();
                    if d > best {
                        best = d;
                        ends = (a, b);
                    }
                }
            }
            let result = self.g.face_collapse(face, ends)?;
            return self.rewrite(result, FlowEventKind::FaceCollapsed { face, ends });
        }
        Err(Error::StallDetected { t: self.t })
    }

    fn rewrite(&mut self, result: CollapseResult, kind: FlowEventKind) -> Result<Option<String>> {
        if !result.three_connected {
            return Ok(Some(format!("{kind} leaves a skeleton that is not 3-connected")));
        }
        let q = rebuild_after_collapse(&self.current, &result)?;
        self.g = result.graph;
        self.stratum.clear();
        self.current = fix(&q)?;
        self.rebase()?;
        let p = self.current.clone();
        let t = self.t;
        self.record_step(t, p)?;
        self.record_event(kind, t)?;
        Ok(None)
    }
}

/// Moves a nearly collapsed polyhedron onto the collapsed skeleton: faces keep
/// their planes, merged vertices are averaged, and a Newton solve restores the
/// incidences while holding the angles of edges with a single preimage.
pub(crate) fn rebuild_after_collapse(p: &Polyhedron, result: &CollapseResult) -> Result<Polyhedron> {
    let old = p.skeleton();
    let g = &result.graph;
    let mut normals = vec![None; g.face_count()];
    for (f, m) in result.face_map.iter().enumerate() {
        if let Some(k) = m {
            normals[*k] = Some(*p.planes()[f].normal());
        }
    }
    let mut sums = vec![(Vec3::zeros(), 0usize); g.vertex_count()];
    for (v, m) in result.vertex_map.iter().enumerate() {
        if let Some(k) = m {
            sums[*k].0 += p.vertices()[v];
            sums[*k].1 += 1;
        }
    }
    let config = Config {
        normals: normals.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| {
            Error::SkeletonChanged("a face of the collapsed skeleton has no preimage".into())
        })?,
        lifts: sums.iter().map(|(s, n)| lift(&(s / *n as f64)).normalize()).collect(),
    };
    let angles = p.dihedral_angles()?;
    let mut preimages = vec![Vec::new(); g.edge_count()];
    for (e, m) in result.edge_map(old).iter().enumerate() {
        if let Some(k) = m {
            preimages[*k].push(e);
        }
    }
    let targets: Vec<Option<f64>> =
        preimages.iter().map(|pre| if pre.len() == 1 { Some(angles[pre[0]]) } else { None }).collect();
    let k = Constraints { angles: &targets, polar: &[] };
    let c = newton(g, &config, &k)?;
    assemble(g, &c, &k)
}

/// Follows `t ↦ t θ` from `p0`, where `θ` is the angle vector of `p0` plus a
/// random offset below `1e-6`, down to `opts.t_min`.
pub fn run_flow(p0: &Polyhedron, opts: &FlowOptions) -> Result<FlowTrace> {
    if !(opts.perturbation >= 0.0 && opts.perturbation < 1e-6) {
        return Err(Error::InvalidArgument("perturbation must lie in [0, 1e-6)".into()));
    }
    if !(opts.t_min > 0.0 && opts.t_min < 1.0) {
        return Err(Error::InvalidArgument("t_min must lie in (0, 1)".into()));
    }
    let report = p0.classify_vertices();
    if let Some((vertex, pole)) = report.improper_witness() {
        return Err(Error::ImproperInput { vertex, pole });
    }
    if report.count(PointKind::Ideal) > 0 {
        return Err(Error::InvalidArgument("seed has ideal vertices; nudge it first".into()));
    }
    let g = p0.skeleton().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let theta: Vec<f64> = p0
        .dihedral_angles()?
        .iter()
        .map(|a| if opts.perturbation > 0.0 { a + rng.random_range(-opts.perturbation..opts.perturbation) } else { *a })
        .collect();
    let stratum: Vec<(usize, usize)> =
        polar_gaps(p0, &report.kinds).into_iter().filter(|x| x.2.abs() <= TAU_IDEAL).map(|x| (x.0, x.1)).collect();
    let mut flow = Flow {
        opts,
        g: g.clone(),
        theta,
        stratum,
        t: 1.0,
        current: p0.clone(),
        steps: Vec::new(),
        events: Vec::new(),
        hyperideal_only: false,
    };
    let start = flow.solve(1.0, p0)?;
    flow.record_step(1.0, start)?;
    let stopped_early = flow.run()?;
    let last = volume_with(&flow.current, &opts.final_quadrature)?;
    Ok(FlowTrace {
        seed: opts.seed,
        initial_skeleton: g,
        steps: flow.steps,
        events: flow.events,
        final_skeleton: flow.g,
        sup_estimate: last.value,
        sup_error: last.error_estimate,
        stopped_early,
    })
}

/// Estimate of the supremum of volumes over proper polyhedra with skeleton
/// `g`: the final volume of the flow started at `seed` (expanded slightly
/// first if it has ideal vertices).
pub fn sup_volume(g: &PlanarGraph, seed: &Polyhedron) -> Result<f64> {
    Ok(sup_volume_trace(g, seed, &FlowOptions::default())?.sup_estimate)
}

pub fn sup_volume_trace(g: &PlanarGraph, seed: &Polyhedron, opts: &FlowOptions) -> Result<FlowTrace> {
    if seed.skeleton() != g {
        return Err(Error::SkeletonMismatch("seed has a different skeleton".into()));
    }
    if seed.classify_vertices().count(PointKind::Ideal) > 0 {
        let (p, _) = nudge_adaptive(seed)?;
        return run_flow(&p, opts);
    }
    run_flow(seed, opts)
}
