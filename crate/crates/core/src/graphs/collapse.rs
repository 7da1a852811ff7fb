//! Edge and face collapses.
//!
//! Both moves identify vertices, then clean up: faces that shrink to digons
//! are dropped (which merges the two parallel edges they bounded), and
//! vertices left with degree two are absorbed into a single edge when that
//! keeps the graph simple.

use std::collections::HashSet;

use super::PlanarGraph;
use crate::error::{Error, Result};

/// Outcome of a collapse move, with index maps from the old graph.
#[derive(Debug, Clone)]
pub struct CollapseResult {
    pub graph: PlanarGraph,
    /// New index of each old vertex; `None` for absorbed vertices.
    pub vertex_map: Vec<Option<usize>>,
    /// New index of each old face; `None` for faces that vanished.
    pub face_map: Vec<Option<usize>>,
    pub three_connected: bool,
}

impl CollapseResult {
    /// New index of each old edge whose endpoints both survive as distinct
    /// adjacent vertices.
    pub fn edge_map(&self, old: &PlanarGraph) -> Vec<Option<usize>> {
        old.edges()
            .iter()
            .map(|&(u, w)| match (self.vertex_map[u], self.vertex_map[w]) {
                (Some(a), Some(b)) if a != b => self.graph.edge_between(a, b),
                _ => None,
            })
            .collect()
    }
}

fn degenerate(detail: impl Into<String>) -> Error {
    Error::CollapseMakesDegenerate(detail.into())
}

impl PlanarGraph {
    /// Contracts edge `e`, identifying its endpoints.
    pub fn edge_collapse(&self, e: usize) -> Result<CollapseResult> {
        if e >= self.edge_count() {
            return Err(Error::InvalidArgument(format!("no edge {e}")));
        }
        let (u, w) = self.edge(e);
        let mut rep: Vec<usize> = (0..self.vertex_count()).collect();
        rep[w] = u;
        identify(self, &rep, None)
    }

    /// Flattens face `f` onto an edge joining `ends.0` and `ends.1`. The two
    /// boundary arcs between the ends are zipped together starting from
    /// `ends.0`; vertices left over on the longer arc land on `ends.1`.
    pub fn face_collapse(&self, f: usize, ends: (usize, usize)) -> Result<CollapseResult> {
        if f >= self.face_count() {
            return Err(Error::InvalidArgument(format!("no face {f}")));
        }
        let face = self.face(f);
        let (a, b) = ends;
        let (Some(ia), Some(ib)) = (face.iter().position(|&v| v == a), face.iter().position(|&v| v == b)) else {
            return Err(Error::InvalidArgument(format!("vertices {a}, {b} are not both on face {f}")));
        };
        if a == b {
            return Err(Error::InvalidArgument("collapse ends must differ".into()));
        }
        let len = face.len();
        let forward: Vec<usize> = (1..len).map(|k| face[(ia + k) % len]).take_while(|&v| v != b).collect();
        let backward: Vec<usize> = (1..len).map(|k| face[(ia + len - k) % len]).take_while(|&v| v != b).collect();
        debug_assert_eq!(forward.len() + backward.len() + 2, len);
        let _ = ib;

        let mut rep: Vec<usize> = (0..self.vertex_count()).collect();
        let paired = forward.len().min(backward.len());
        for i in 0..paired {
            rep[backward[i]] = forward[i];
        }
        for &v in forward[paired..].iter().chain(&backward[paired..]) {
            rep[v] = b;
        }
        identify(self, &rep, Some(f))
    }
}

fn identify(g: &PlanarGraph, rep: &[usize], drop_face: Option<usize>) -> Result<CollapseResult> {
    // rename and drop faces that collapse to digons
    let mut faces: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, f) in g.faces().iter().enumerate() {
        if Some(i) == drop_face {
            continue;
        }
        let mut c: Vec<usize> = Vec::with_capacity(f.len());
        for &v in f {
            let r = rep[v];
            if c.last() != Some(&r) {
                c.push(r);
            }
        }
        while c.len() > 1 && c.first() == c.last() {
            c.pop();
        }
        if c.len() <= 2 {
            continue;
        }
        let distinct: HashSet<usize> = c.iter().copied().collect();
        if distinct.len() != c.len() {
            return Err(degenerate(format!("face {i} becomes non-simple")));
        }
        faces.push((i, c));
    }

    // absorb degree-two vertices
    let mut removed: HashSet<usize> = HashSet::new();
    loop {
        let mut nbrs: Vec<HashSet<usize>> = vec![HashSet::new(); g.vertex_count()];
        for (_, f) in &faces {
            for k in 0..f.len() {
                let (a, b) = (f[k], f[(k + 1) % f.len()]);
                nbrs[a].insert(b);
                nbrs[b].insert(a);
            }
        }
        let alive = |v: usize| rep[v] == v && !removed.contains(&v);
        let Some(x) = (0..g.vertex_count()).find(|&v| alive(v) && nbrs[v].len() < 3) else {
            break;
        };
        if nbrs[x].len() != 2 {
            return Err(degenerate(format!("vertex {x} is left with degree {}", nbrs[x].len())));
        }
        let mut it = nbrs[x].iter();
        let (a, b) = (*it.next().unwrap(), *it.next().unwrap());
        let holders: Vec<usize> = (0..faces.len()).filter(|&i| faces[i].1.contains(&x)).collect();
        if nbrs[a].contains(&b) || holders.iter().any(|&i| faces[i].1.len() < 4) {
            return Err(degenerate(format!("vertex {x} of degree 2 cannot be absorbed")));
        }
        for i in holders {
            faces[i].1.retain(|&v| v != x);
        }
        removed.insert(x);
    }

    let mut vertex_new = vec![None; g.vertex_count()];
    let mut next = 0;
    for v in 0..g.vertex_count() {
        if rep[v] == v && !removed.contains(&v) {
            vertex_new[v] = Some(next);
            next += 1;
        }
    }
    let vertex_map: Vec<Option<usize>> = (0..g.vertex_count()).map(|v| vertex_new[rep[v]]).collect();
    let mut face_map = vec![None; g.face_count()];
    let mut new_faces = Vec::with_capacity(faces.len());
    for (k, (i, f)) in faces.iter().enumerate() {
        face_map[*i] = Some(k);
        new_faces.push(f.iter().map(|&v| vertex_new[v].unwrap()).collect());
    }
    let graph = PlanarGraph::embedded(next, new_faces).map_err(|e| degenerate(e.to_string()))?;
    if !graph.is_two_connected() {
        return Err(degenerate("result is not 2-connected"));
    }
    let three_connected = graph.is_three_connected();
    Ok(CollapseResult { graph, vertex_map, face_map, three_connected })
}
