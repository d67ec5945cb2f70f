use mengerlab::construction::*;
use mengerlab::geometry::angle;
use mengerlab::measure::{lipschitz_graph, GraphSpec};
use nalgebra::DVector;

fn graph_state(eps: f64) -> StoppingState {
    let spec = GraphSpec { coeffs: vec![0.125], n: 1, ambient: 2, half_width: 1.0, n_points: 150 };
    let mu = lipschitz_graph(&spec, 11).unwrap();
    build_stopping_state(&mu, &StoppingParams::new(eps, 0.25, 4.0).unwrap()).unwrap()
}

#[test]
fn mixed_state_has_consistent_labels_and_cubes() {
    let state = graph_state(0.1);
    let masses = state.label_masses();
    let z = masses.iter().find(|(l, _)| *l == Label::Z).unwrap().1;
    assert!(z > 0.0 && z < state.measure.total_mass());
    for i in 0..state.measure.len() {
        assert_eq!(state.labels[i] == Label::Z, state.h[i] == 0.0);
    }
    let cubes = whitney_decompose(&state, &WhitneyOptions::default());
    assert!(!cubes.is_empty());
    let check = verify_whitney(&state, &cubes);
    assert_eq!(check.violations(), 0, "{check:?}");
}

#[test]
fn graph_reproduces_z_and_uses_flat_planes() {
    let state = graph_state(0.1);
    let cubes = whitney_decompose(&state, &WhitneyOptions::default());
    let graph = build_graph(&state, &cubes).unwrap();
    for i in (0..state.measure.len()).filter(|&i| state.labels[i] == Label::Z) {
        let x = state.measure.point(i);
        assert!(graph.vertical_distance(x).unwrap() < 1e-12);
    }
    for patch in graph.patches() {
        assert!(angle(&patch.ball.plane, &state.reference).unwrap() <= state.alpha + 1e-12);
        assert!(patch.map.lipschitz() <= 2.0 * state.alpha);
        assert!(patch.ball.radius >= 0.5 * patch.cube.diam());
    }
}

#[test]
fn gamma_is_controlled_by_its_plane_variant_on_the_built_graph() {
    let state = graph_state(0.1);
    let cubes = whitney_decompose(&state, &WhitneyOptions { domain: WhitneyDomain::Ball12 });
    let graph = build_graph(&state, &cubes).unwrap();
    let opts = GammaOptions { cells_per_axis: Some(256), ..Default::default() };
    let f = |a: &DVector<f64>| graph.value_coords(a);
    for (q, t) in [(-0.5, 0.3), (0.0, 0.5), (0.4, 0.2), (0.0, 1.0)] {
        let q = DVector::from_element(1, q);
        let g = gamma(f, &q, t, &opts).unwrap().value;
        let gt = gamma_tilde(f, &q, t, &opts).unwrap();
        assert!(g <= 3.0 * gt + 1e-12, "γ = {g}, γ̃ = {gt}");
    }
    assert!(matches!(gamma(f, &DVector::from_element(1, 0.0), 40.0, &opts), Err(mengerlab::Error::OutOfDomain)));
}

#[test]
fn scale_and_translation_do_not_change_labels() {
    let spec = GraphSpec { coeffs: vec![0.125], n: 1, ambient: 2, half_width: 1.0, n_points: 120 };
    let mu = lipschitz_graph(&spec, 2).unwrap();
    let params = StoppingParams::new(0.1, 0.25, 4.0).unwrap();
    let base = build_stopping_state(&mu, &params).unwrap();
    let moved = mu.translated(&DVector::from_vec(vec![3.0, -1.0])).unwrap();
    let other = build_stopping_state(&moved, &params).unwrap();
    assert_eq!(base.labels, other.labels);
}
