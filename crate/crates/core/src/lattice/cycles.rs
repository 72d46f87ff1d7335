use std::collections::VecDeque;

use super::{LatticeError, LatticeGraph};

/// Dimension `E − V + 1` of the cycle space of a connected graph.
pub fn cycle_rank(g: &LatticeGraph) -> Result<usize, LatticeError> {
    if !g.is_connected() {
        return Err(LatticeError::Disconnected);
    }
    Ok((g.edge_count() + 1).saturating_sub(g.vertex_count().max(1)))
}

/// The recorded plaquette cycles. On an open-boundary flake cut from a disk
/// tiling they are independent and span the cycle space.
pub fn plaquette_cycles(g: &LatticeGraph) -> Vec<Vec<usize>> {
    g.faces().to_vec()
}

/// BFS two-colouring; `None` when an odd cycle exists.
pub fn bipartition(g: &LatticeGraph) -> Option<Vec<u8>> {
    let adj = g.adjacency_lists();
    let mut colour: Vec<Option<u8>> = vec![None; g.vertex_count()];
    for start in 0..g.vertex_count() {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let c = colour[v]?;
            for &w in &adj[v] {
                match colour[w] {
                    None => {
                        colour[w] = Some(1 - c);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == c => return None,
                    Some(_) => {}
                }
            }
        }
    }
    colour.into_iter().collect()
}

pub fn is_bipartite(g: &LatticeGraph) -> bool {
    bipartition(g).is_some()
}
