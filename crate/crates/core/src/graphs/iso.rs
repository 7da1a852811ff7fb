use super::PlanarGraph;

/// Brute-force graph isomorphism by backtracking over vertex images, pruned
/// by degree and adjacency consistency. Intended for graphs of a few dozen
/// vertices.
pub fn are_isomorphic(a: &PlanarGraph, b: &PlanarGraph) -> bool {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() || a.face_count() != b.face_count() {
        return false;
    }
    let (adj_a, adj_b) = (a.adjacency(), b.adjacency());
    let deg_a: Vec<usize> = (0..n).map(|u| a.degree(u)).collect();
    let deg_b: Vec<usize> = (0..n).map(|u| b.degree(u)).collect();
    let mut sa = deg_a.clone();
    let mut sb = deg_b.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }

    // visit vertices of `a` in BFS order so each new vertex has a mapped neighbour
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        order.push(root);
        let mut k = order.len() - 1;
        while k < order.len() {
            let u = order[k];
            for w in 0..n {
                if adj_a[u][w] && !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
            k += 1;
        }
    }

    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(0, &order, &adj_a, &adj_b, &deg_a, &deg_b, &mut image, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    k: usize,
    order: &[usize],
    adj_a: &[Vec<bool>],
    adj_b: &[Vec<bool>],
    deg_a: &[usize],
    deg_b: &[usize],
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    if k == order.len() {
        return true;
    }
    let u = order[k];
    for c in 0..adj_b.len() {
        if used[c] || deg_b[c] != deg_a[u] {
            continue;
        }
        let consistent = order[..k].iter().all(|&p| adj_a[u][p] == adj_b[c][image[p]]);
        if !consistent {
            continue;
        }
        image[u] = c;
        used[c] = true;
        if extend(k + 1, order, adj_a, adj_b, deg_a, deg_b, image, used) {
            return true;
        }
        used[c] = false;
    }
    image[u] = usize::MAX;
    false
}
