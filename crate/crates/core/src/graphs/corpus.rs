//! Standard small polyhedral graphs.

use super::PlanarGraph;

fn build(n: usize, faces: Vec<Vec<usize>>) -> PlanarGraph {
    PlanarGraph::new(n, faces).expect("corpus graph is polyhedral")
}

/// The complete graph on four vertices.
pub fn tetrahedron() -> PlanarGraph {
    build(4, vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]])
}

/// Pyramid over an `n`-gon: base vertices `0..n`, apex `n`, base face first.
pub fn pyramid(n: usize) -> PlanarGraph {
    let mut faces = vec![(0..n).rev().collect::<Vec<_>>()];
    faces.extend((0..n).map(|i| vec![i, (i + 1) % n, n]));
    build(n + 1, faces)
}

/// Prism over an `n`-gon: bottom `0..n`, top `n..2n`.
pub fn prism(n: usize) -> PlanarGraph {
    let mut faces = vec![(0..n).rev().collect::<Vec<_>>(), (n..2 * n).collect()];
    faces.extend((0..n).map(|i| vec![i, (i + 1) % n, n + (i + 1) % n, n + i]));
    build(2 * n, faces)
}

pub fn cube() -> PlanarGraph {
    prism(4)
}

/// Antiprism over an `n`-gon: top `0..n`, bottom `n..2n`, with bottom vertex
/// `n + i` between top vertices `i` and `i + 1`.
pub fn antiprism(n: usize) -> PlanarGraph {
    let mut faces = vec![(0..n).collect::<Vec<_>>(), (n..2 * n).rev().collect()];
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push(vec![j, i, n + i]);
        faces.push(vec![j, n + i, n + j]);
    }
    build(2 * n, faces)
}

/// Vertices `±x, ±y, ±z` as `0..6`.
pub fn octahedron() -> PlanarGraph {
    let mut faces = Vec::new();
    for x in [0, 1] {
        for y in [2, 3] {
            for z in [4, 5] {
                faces.push(vec![x, y, z]);
            }
        }
    }
    build(6, faces)
}

/// Vertices are the points with coordinates a permutation of `(±1, ±1, 0)`.
pub fn cuboctahedron() -> PlanarGraph {
    let mut pts: Vec<[i32; 3]> = Vec::new();
    for zero in 0..3 {
        for a in [-1, 1] {
            for b in [-1, 1] {
                let mut p = [0; 3];
                p[(zero + 1) % 3] = a;
                p[(zero + 2) % 3] = b;
                pts.push(p);
            }
        }
    }
    let idx = |p: [i32; 3]| pts.iter().position(|q| *q == p).unwrap();
    let mut faces = Vec::new();
    for sx in [-1, 1] {
        for sy in [-1, 1] {
            for sz in [-1, 1] {
                faces.push(vec![idx([sx, sy, 0]), idx([sx, 0, sz]), idx([0, sy, sz])]);
            }
        }
    }
    for axis in 0..3 {
        for s in [-1, 1] {
            let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
            let mut face = Vec::new();
            for (a, b) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
                let mut p = [0; 3];
                p[axis] = s;
                p[i] = a;
                p[j] = b;
                face.push(idx(p));
            }
            faces.push(face);
        }
    }
    build(12, faces)
}

/// Graphs used throughout the tests and the acceptance suite.
pub fn corpus_graphs() -> Vec<PlanarGraph> {
    let mut out = vec![tetrahedron(), cube(), octahedron(), prism(3)];
    out.extend((3..=8).map(pyramid));
    out
}
