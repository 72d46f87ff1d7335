use super::CircuitError;
use crate::lattice::LatticeGraph;

/// Picks `count` boundary vertices spread around the flake by farthest-point
/// sampling on hop distance, starting from the lowest-index boundary vertex.
/// Ties go to the lower index, so the choice is deterministic.
pub fn select_port_vertices(g: &LatticeGraph, count: usize) -> Result<Vec<usize>, CircuitError> {
    let mut candidates = g.boundary_vertices();
    if candidates.is_empty() {
        candidates = (0..g.vertex_count()).collect();
    }
    if count > candidates.len() {
        return Err(CircuitError::InvalidValue(format!(
            "{count} ports requested but only {} candidate sites",
            candidates.len()
        )));
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(count);
    let mut nearest = vec![usize::MAX; g.vertex_count()];
    while chosen.len() < count {
        let next = if chosen.is_empty() {
            candidates[0]
        } else {
            *candidates
                .iter()
                .filter(|v| !chosen.contains(v))
                .max_by(|&&a, &&b| nearest[a].cmp(&nearest[b]).then(b.cmp(&a)))
                .expect("enough candidates")
        };
        chosen.push(next);
        for (v, d) in g.hop_distances(next).into_iter().enumerate() {
            nearest[v] = nearest[v].min(d);
        }
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeo::TilingSpec;
    use crate::lattice::{FaceSelection, FlakeSpec};

    #[test]
    fn four_ports_on_the_octagon_flake_are_far_apart() {
        let g = FlakeSpec {
            base: TilingSpec::new(8, 3, 1).unwrap(),
            selection: FaceSelection::CenterPlusEdgeNeighbors,
        }
        .build()
        .unwrap();
        let ports = select_port_vertices(&g, 4).unwrap();
        assert_eq!(ports.len(), 4);
        let boundary = g.boundary_vertices();
        assert!(ports.iter().all(|p| boundary.contains(p)));
        for (k, &a) in ports.iter().enumerate() {
            let d = g.hop_distances(a);
            for &b in &ports[k + 1..] {
                assert!(d[b] >= 4, "ports {a} and {b} only {} hops apart", d[b]);
            }
        }
        assert_eq!(select_port_vertices(&g, 4).unwrap(), ports);
    }
}
