//! How much of the measure lies on the constructed graph.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{graph::GraphFunction, Label, StoppingState, G_FACTOR};

#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub tol: f64,
    pub total_mass: f64,
    /// Mass fraction within vertical distance `tol` of the graph.
    pub covered_fraction: f64,
    /// Atoms over which the graph is undefined.
    pub undefined: usize,
    pub label_masses: BTreeMap<&'static str, f64>,
    /// Mass of atoms far from every selected ball over their projection.
    pub g_mass: f64,
    /// Mass of the part of `F ∖ G` within `√ε · d(x)` of the graph.
    pub f_tilde_mass: f64,
}

/// Coverage diagnostics in the normalized frame of `state`.
pub fn coverage_report(state: &StoppingState, graph: &GraphFunction, tol: f64) -> CoverageReport {
    let mu = &state.measure;
    let vertical: Vec<f64> = mu
        .points()
        .par_iter()
        .map(|x| graph.vertical_distance(x).unwrap_or(f64::INFINITY))
        .collect();
    let total = mu.total_mass();
    let mass = |pred: &dyn Fn(usize) -> bool| -> f64 { (0..mu.len()).filter(|&i| pred(i)).map(|i| mu.weight(i)).fold(0.0, |a, b| a + b) };
    let covered = mass(&|i| vertical[i] <= tol);
    let in_g: Vec<bool> = (0..mu.len())
        .map(|i| {
            if state.labels[i] == Label::Z {
                return false;
            }
            let x = mu.point(i);
            let a = graph.reference().coordinates(x);
            if graph.on_z(&a) {
                return true;
            }
            graph.patches_containing(&a).into_iter().all(|j| {
                let p = &graph.patches()[j];
                (x - mu.point(p.ball.atom)).norm() > G_FACTOR * p.ball.radius
            })
        })
        .collect();
    let g_mass = mass(&|i| in_g[i]);
    let root_eps = state.epsilon.sqrt();
    let f_tilde_mass = mass(&|i| state.labels[i] != Label::Z && !in_g[i] && vertical[i] <= root_eps * state.d[i]);
    let label_masses = state.label_masses().into_iter().map(|(l, m)| (l.as_str(), m)).collect();
    CoverageReport {
        tol,
        total_mass: total,
        covered_fraction: covered / total,
        undefined: vertical.iter().filter(|v| v.is_infinite()).count(),
        label_masses,
        g_mass,
        f_tilde_mass,
    }
}
