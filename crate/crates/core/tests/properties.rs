//! Structural invariants checked over presets and random flakes.

mod common;

use std::collections::HashMap;

use hypercirc::hypgeo::{generate_tiling, hyperbolic_distance, reflect, DiskPoint, Tiling, TilingSpec};
use hypercirc::lattice::{build_flake, cycle_rank, is_bipartite, medial_lattice, random_patch, FaceSelection, LatticeGraph};
use hypercirc::spectrum::{adjacency_energies, dos, ipr, Weighting};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::asymmetry;

fn point() -> impl Strategy<Value = DiskPoint> {
    (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| DiskPoint::from_polar(r, a).unwrap())
}

fn tilings() -> Vec<Tiling> {
    [(8, 3, 2), (7, 3, 2), (12, 4, 1), (5, 4, 2), (6, 4, 2)]
        .into_iter()
        .map(|(p, q, d)| generate_tiling(&TilingSpec::new(p, q, d).unwrap()).unwrap())
        .collect()
}

thread_local! {
    static TILINGS: Vec<Tiling> = tilings();
}

fn random_flake(which: usize, size: usize, seed: u64) -> LatticeGraph {
    TILINGS.with(|t| {
        let tiling = &t[which % t.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ids = random_patch(tiling, size, &mut rng);
        build_flake(tiling, &FaceSelection::Explicit(ids)).unwrap()
    })
}

fn check_bipartite_symmetry(g: &LatticeGraph) {
    let spec = adjacency_energies(g, Weighting::Uniform).unwrap();
    let symmetric = asymmetry(spec.energies()) < 1e-9;
    assert_eq!(is_bipartite(g), symmetric, "V={} E={}", g.vertex_count(), g.edge_count());
}

fn check_medial_identities(parent: &LatticeGraph) {
    let m = medial_lattice(parent).unwrap();
    let degrees = parent.degrees();
    assert_eq!(m.vertex_count(), parent.edge_count());
    let pairs: usize = degrees.iter().map(|d| d * d.saturating_sub(1) / 2).sum();
    assert_eq!(m.edge_count(), pairs);
    let clique_rank: usize = degrees.iter().map(|&d| d.saturating_sub(1) * d.saturating_sub(2) / 2).sum();
    assert_eq!(cycle_rank(&m).unwrap(), parent.face_count() + clique_rank);
}

#[test]
fn presets_bipartite_iff_symmetric() {
    for g in [common::paper_83(), common::paper_124(), common::kagome_83(), common::kagome_124()] {
        check_bipartite_symmetry(&g);
    }
    assert!(is_bipartite(&common::paper_83()));
    assert!(!is_bipartite(&common::kagome_83()));
}

#[test]
fn preset_medial_identities() {
    check_medial_identities(&common::paper_83());
    check_medial_identities(&common::paper_124());
}

#[test]
fn tiling_edges_have_one_hyperbolic_length() {
    for t in tilings() {
        let lengths: Vec<f64> =
            t.edges().iter().map(|&(a, b)| hyperbolic_distance(&t.vertices[a], &t.vertices[b])).collect();
        let lo = lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = lengths.iter().copied().fold(0.0, f64::max);
        assert!(hi - lo < 1e-8, "{:?}: spread {}", t.spec, hi - lo);
    }
}

/// Edges belong to the generation of the first face that contains them.
/// Their projected lengths shrink outward: both the longest and the mean
/// edge of each generation are below those of the previous one.
#[test]
fn projected_edges_shrink_with_generation() {
    for (p, q) in [(8, 3), (7, 3), (12, 4), (5, 4)] {
        let t = generate_tiling(&TilingSpec::new(p, q, 3).unwrap()).unwrap();
        let mut generation_of: HashMap<(usize, usize), u32> = HashMap::new();
        for (face, &g) in t.faces.iter().zip(&t.generation) {
            for k in 0..face.len() {
                let (a, b) = (face[k], face[(k + 1) % face.len()]);
                let slot = generation_of.entry((a.min(b), a.max(b))).or_insert(g);
                *slot = (*slot).min(g);
            }
        }
        let depth = t.spec.depth as usize;
        let mut max = vec![0.0f64; depth + 1];
        let mut sum = vec![0.0f64; depth + 1];
        let mut count = vec![0usize; depth + 1];
        for (&(a, b), &g) in &generation_of {
            let d = t.vertices[a].euclidean_distance(&t.vertices[b]);
            let g = g as usize;
            max[g] = max[g].max(d);
            sum[g] += d;
            count[g] += 1;
        }
        for g in 1..=depth {
            assert!(count[g] > 0);
            assert!(max[g] < max[g - 1], "{{{p},{q}}} generation {g}: max {} vs {}", max[g], max[g - 1]);
            let (mean, prev) = (sum[g] / count[g] as f64, sum[g - 1] / count[g - 1] as f64);
            assert!(mean < prev, "{{{p},{q}}} generation {g}: mean {mean} vs {prev}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflection_is_an_involutive_isometry(x in point(), y in point(), a in point(), b in point()) {
        prop_assume!(a.euclidean_distance(&b) > 1e-3);
        let rx = reflect(&x, (&a, &b)).unwrap();
        let ry = reflect(&y, (&a, &b)).unwrap();
        let back = reflect(&rx, (&a, &b)).unwrap();
        prop_assert!(back.euclidean_distance(&x) < 1e-9);
        let d = hyperbolic_distance(&x, &y);
        prop_assert!((hyperbolic_distance(&rx, &ry) - d).abs() < 1e-9 * d.max(1.0));
        prop_assert!(reflect(&a, (&a, &b)).unwrap().euclidean_distance(&a) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn random_flakes_obey_invariants(which in 0usize..5, size in 1usize..9, seed in any::<u64>(), medial in any::<bool>()) {
        let parent = random_flake(which, size, seed);
        prop_assert!(parent.is_connected());
        prop_assert_eq!(
            parent.vertex_count() as i64 - parent.edge_count() as i64 + parent.face_count() as i64,
            1
        );
        check_medial_identities(&parent);
        let g = if medial { medial_lattice(&parent).unwrap() } else { parent };
        check_bipartite_symmetry(&g);

        let spec = adjacency_energies(&g, Weighting::Uniform).unwrap();
        let n = spec.len() as f64;
        let hist = dos(&spec, 0.1).unwrap();
        let total: f64 = hist.bins.iter().map(|b| b.1).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for value in ipr(&spec) {
            prop_assert!(value >= 1.0 / n - 1e-12 && value <= 1.0 + 1e-12, "ipr {}", value);
        }
    }
}
