//! Disjoint-union metric in action: axiom checks on a random family and a
//! convergence trace illustrating the space-settling dichotomy.
//!
//! Run with: cargo run --release --example metric_axioms

use rmtk::union_metric::{TaggedPoint, UnionSpace};

fn main() {
    // Six Euclidean components of assorted dimensions; eps_n = 1/n.
    let space = UnionSpace::euclidean(vec![3, 1, 4, 8, 5, 2]).unwrap();
    let report = space.metric_axiom_suite(1, 10_000).unwrap();
    println!("axiom suite over {} random triples:", report.triples);
    println!("  max triangle violation : {:e}", report.max_triangle_violation);
    println!("  max symmetry violation : {:e}", report.max_symmetry_violation);
    println!("  zero-distance failures : {}", report.zero_distance_failures);

    // A sequence escaping to ever-higher component spaces whose images
    // converge in the base space: delta decays exactly like eps_n.
    let tower = UnionSpace::from_dim_rule(12, |n| if n == 0 { 2 } else { 3 }).unwrap();
    let limit = TaggedPoint::new(0, vec![0.7, -0.2]);
    let seq: Vec<TaggedPoint> = (1..12)
        .map(|n| TaggedPoint::new(n, vec![0.7, -0.2, n as f64]))
        .collect();
    println!("\nsequence with phi_n(x_n) = x0 exactly (limit in the base space):");
    println!("{:>4} {:>10} {:>10}", "s(x)", "delta", "rho0");
    for entry in tower.convergence_trace(&seq, &limit).unwrap() {
        println!("{:>4} {:>10.6} {:>10.6}", entry.space_index, entry.delta, entry.rho0);
    }
}
