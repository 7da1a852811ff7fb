//! Planar graphs given by oriented face lists.
//!
//! A [`PlanarGraph`] stores its faces as cyclic vertex lists. The constructor
//! orients them consistently (every undirected edge is traversed once in each
//! direction), and the rotation system at every vertex is read off the faces:
//! the dart after `u -> w` around `u` is `u -> x`, where `x` precedes `u` in the
//! face containing `u -> w`.

mod admissibility;
mod collapse;
pub mod corpus;
mod iso;
mod text;

use std::collections::{HashMap, VecDeque};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use admissibility::{check_bao_bonahon, Admissibility, DualWitness};
pub use collapse::CollapseResult;
pub use iso::are_isomorphic;
pub use text::parse_graph;
pub(crate) use text::parse_graph_lines as text_lines;

/// A cellularly embedded planar graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarGraph {
    n: usize,
    faces: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    dart_face: HashMap<(usize, usize), usize>,
}

impl PlanarGraph {
    /// Builds a 3-connected polyhedral graph from face cycles.
    pub fn new(n: usize, faces: Vec<Vec<usize>>) -> Result<Self> {
        let g = Self::embedded(n, faces)?;
        for u in 0..g.n {
            if g.degree(u) < 3 {
                return Err(Error::NotPolyhedral(format!("vertex {u} has degree {}", g.degree(u))));
            }
        }
        if !g.is_three_connected() {
            return Err(Error::NotPolyhedral("graph is not 3-connected".into()));
        }
        Ok(g)
    }

    /// Builds a simple graph cellularly embedded in the sphere, without the
    /// 3-connectivity requirement.
    pub fn embedded(n: usize, mut faces: Vec<Vec<usize>>) -> Result<Self> {
        for (i, f) in faces.iter().enumerate() {
            if f.len() < 3 {
                return Err(Error::NotPolyhedral(format!("face {i} has fewer than 3 vertices")));
            }
            let mut seen = f.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != f.len() {
                return Err(Error::NotPolyhedral(format!("face {i} repeats a vertex")));
            }
            if let Some(&v) = f.iter().find(|&&v| v >= n) {
                return Err(Error::NotPolyhedral(format!("face {i} uses vertex {v} >= {n}")));
            }
        }
        orient_faces(&mut faces)?;

        let mut dart_face = HashMap::new();
        for (i, f) in faces.iter().enumerate() {
            for k in 0..f.len() {
                let d = (f[k], f[(k + 1) % f.len()]);
                if dart_face.insert(d, i).is_some() {
                    return Err(Error::NotPolyhedral(format!("dart {}->{} lies on two faces", d.0, d.1)));
                }
            }
        }
        let mut edges: Vec<(usize, usize)> = dart_face.keys().filter(|(u, w)| u < w).copied().collect();
        for &(u, w) in dart_face.keys() {
            if !dart_face.contains_key(&(w, u)) {
                return Err(Error::NotPolyhedral(format!("edge {u}-{w} borders only one face")));
            }
        }
        edges.sort_unstable();
        let edge_index = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

        let g = PlanarGraph { n, faces, edges, edge_index, dart_face };
        for u in 0..n {
            if g.degree(u) == 0 {
                return Err(Error::NotPolyhedral(format!("vertex {u} is isolated")));
            }
        }
        if !g.is_connected() {
            return Err(Error::NotPolyhedral("graph is disconnected".into()));
        }
        let euler = n as i64 - g.edges.len() as i64 + g.faces.len() as i64;
        if euler != 2 {
            return Err(Error::NotPolyhedral(format!("Euler characteristic {euler}")));
        }
        // each vertex must have a single disk neighbourhood
        for u in 0..n {
            if g.neighbors(u).len() != g.degree(u) {
                return Err(Error::NotPolyhedral(format!("vertex {u} is pinched")));
            }
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    /// Edges as sorted endpoint pairs `(u, w)` with `u < w`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edge_between(&self, u: usize, w: usize) -> Option<usize> {
        self.edge_index.get(&(u.min(w), u.max(w))).copied()
    }

    /// Face containing the dart `u -> w`.
    pub fn dart_face(&self, u: usize, w: usize) -> Option<usize> {
        self.dart_face.get(&(u, w)).copied()
    }

    /// The two faces on either side of edge `e = (u, w)`: the one containing
    /// `u -> w` first.
    pub fn edge_faces(&self, e: usize) -> (usize, usize) {
        let (u, w) = self.edges[e];
        (self.dart_face[&(u, w)], self.dart_face[&(w, u)])
    }

    pub fn degree(&self, u: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == u || b == u).count()
    }

    fn predecessor(&self, f: usize, u: usize) -> usize {
        let face = &self.faces[f];
        let k = face.iter().position(|&x| x == u).expect("vertex on face");
        face[(k + face.len() - 1) % face.len()]
    }

    /// Neighbours of `u` in rotation order, starting from the smallest.
    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        let Some(start) = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == u { Some(b) } else if b == u { Some(a) } else { None })
            .min()
        else {
            return Vec::new();
        };
        let mut out = vec![start];
        let mut w = start;
        loop {
            let f = self.dart_face[&(u, w)];
            w = self.predecessor(f, u);
            if w == start || out.len() > self.edges.len() {
                break;
            }
            out.push(w);
        }
        out
    }

    /// Faces around `u`, aligned with [`neighbors`](Self::neighbors): entry `i`
    /// is the face containing the dart `u -> neighbors[i]`.
    pub fn vertex_faces(&self, u: usize) -> Vec<usize> {
        self.neighbors(u).iter().map(|&w| self.dart_face[&(u, w)]).collect()
    }

    /// Edge ids around `u` in rotation order.
    pub fn vertex_edges(&self, u: usize) -> Vec<usize> {
        self.neighbors(u).iter().map(|&w| self.edge_between(u, w).unwrap()).collect()
    }

    /// Edge ids along face `f`; entry `k` joins `face[k]` and `face[k + 1]`.
    pub fn face_edges(&self, f: usize) -> Vec<usize> {
        let face = &self.faces[f];
        (0..face.len()).map(|k| self.edge_between(face[k], face[(k + 1) % face.len()]).unwrap()).collect()
    }

    /// Faces containing vertex `u`, sorted.
    pub fn faces_at(&self, u: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.faces.len()).filter(|&f| self.faces[f].contains(&u)).collect();
        out.sort_unstable();
        out
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.n]; self.n];
        for &(u, w) in &self.edges {
            adj[u][w] = true;
            adj[w][u] = true;
        }
        adj
    }

    fn is_connected(&self) -> bool {
        connected_without(self.n, &self.edges, &[])
    }

    /// True iff no set of at most two vertices disconnects the graph.
    pub fn is_three_connected(&self) -> bool {
        is_three_connected(self.n, &self.edges)
    }

    /// True iff no single vertex disconnects the graph.
    pub fn is_two_connected(&self) -> bool {
        self.n >= 3 && (0..self.n).all(|a| connected_without(self.n, &self.edges, &[a]))
    }

    /// The dual graph: one vertex per face, one face per vertex.
    pub fn dual(&self) -> Result<PlanarGraph> {
        if !self.is_three_connected() {
            return Err(Error::NotPolyhedral("dual requires a 3-connected graph".into()));
        }
        let faces = (0..self.n).map(|u| self.vertex_faces(u)).collect();
        PlanarGraph::new(self.faces.len(), faces)
    }

    /// The medial graph: one vertex per edge, adjacent when the edges share an
    /// angle. Faces `0..V` come from vertices and `V..V+F` from faces.
    pub fn medial(&self) -> Result<PlanarGraph> {
        if !self.is_three_connected() {
            return Err(Error::NotPolyhedral("medial graph requires a 3-connected graph".into()));
        }
        let mut faces: Vec<Vec<usize>> = (0..self.n).map(|u| self.vertex_edges(u)).collect();
        faces.extend((0..self.faces.len()).map(|f| self.face_edges(f)));
        PlanarGraph::new(self.edges.len(), faces)
    }

    /// Short hex digest of the face lists, used to tag skeleta in traces.
    pub fn skeleton_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_text().as_bytes());
        hasher.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Maximum vertex degree.
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).max().unwrap_or(0)
    }
}

/// Flips faces so that adjacent faces traverse their common edge in opposite
/// directions. Face 0 keeps its given orientation.
fn orient_faces(faces: &mut [Vec<usize>]) -> Result<()> {
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..f.len() {
            let (a, b) = (f[k], f[(k + 1) % f.len()]);
            by_edge.entry((a.min(b), a.max(b))).or_default().push(i);
        }
    }
    for (e, fs) in &by_edge {
        if fs.len() != 2 || fs[0] == fs[1] {
            return Err(Error::NotPolyhedral(format!("edge {}-{} borders {} faces", e.0, e.1, fs.len())));
        }
    }
    let has_dart = |f: &[usize], a: usize, b: usize| (0..f.len()).any(|k| f[k] == a && f[(k + 1) % f.len()] == b);
    let mut done = vec![false; faces.len()];
    for root in 0..faces.len() {
        if done[root] {
            continue;
        }
        done[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let f = faces[i].clone();
            for k in 0..f.len() {
                let (a, b) = (f[k], f[(k + 1) % f.len()]);
                let fs = &by_edge[&(a.min(b), a.max(b))];
                let j = if fs[0] == i { fs[1] } else { fs[0] };
                let same = has_dart(&faces[j], a, b);
                if done[j] {
                    if same {
                        return Err(Error::NotPolyhedral("face cycles are not orientable".into()));
                    }
                    continue;
                }
                if same {
                    faces[j].reverse();
                }
                done[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok(())
}

fn connected_without(n: usize, edges: &[(usize, usize)], removed: &[usize]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(u, w) in edges {
        if removed.contains(&u) || removed.contains(&w) {
            continue;
        }
        adj[u].push(w);
        adj[w].push(u);
    }
    let Some(start) = (0..n).find(|v| !removed.contains(v)) else {
        return true;
    };
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..n).all(|v| seen[v] || removed.contains(&v))
}

/// Brute-force 3-connectivity test on an edge list: at least four vertices,
/// connected, and no pair of vertices whose removal disconnects the rest.
pub fn is_three_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n < 4 || !connected_without(n, edges, &[]) {
        return false;
    }
    for a in 0..n {
        for b in a..n {
            if !connected_without(n, edges, &[a, b]) {
                return false;
            }
        }
    }
    true
}

/// Dihedral angles indexed by edge id, each strictly inside `(0, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector(Vec<f64>);

impl AngleVector {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        for (edge, &angle) in angles.iter().enumerate() {
            if !(angle > 0.0 && angle < std::f64::consts::PI) {
                return Err(Error::AngleOutOfRange { edge, angle });
            }
        }
        Ok(AngleVector(angles))
    }

    /// The same angle on every one of `edges` edges.
    pub fn constant(edges: usize, angle: f64) -> Result<Self> {
        Self::new(vec![angle; edges])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|a| a * t).collect())
    }
}

impl std::ops::Index<usize> for AngleVector {
    type Output = f64;
    fn index(&self, e: usize) -> &f64 {
        &self.0[e]
    }
}
