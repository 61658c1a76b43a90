//! Run the genetic search on a generated overlay and watch it trade coding
//! resources away. Coding at every merging node always reaches the target
//! rate; the search keeps the rate and sheds nearly all of the mixing.

use ncmin::eval::{count_resources, CodingAssignment, FitnessCoefficients};
use ncmin::ga::{run_ga, GaParams};
use ncmin::graph::generate_random_dag;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = generate_random_dag(20, 48, 8, 3, 7)?;
    let everywhere = count_resources(&net, &CodingAssignment::all_ones(&net))?;
    println!(
        "network: {} nodes, {} merging; coding everywhere costs {:?}",
        net.node_count(),
        net.merging_nodes().len(),
        everywhere
    );

    let params = GaParams::default();
    let coeffs = FitnessCoefficients::with_target(net.target_rate());
    let result = run_ga(&net, &params, &coeffs, 3)?;

    for row in result.history.iter().step_by(4) {
        println!(
            "gen {:>3}: best F {:>8.3}, mean F {:>8.3}, best ({}, {}) at min rate {}",
            row.generation,
            row.best_fitness,
            row.mean_fitness,
            row.best_coding_nodes,
            row.best_coding_links,
            row.best_min_rate
        );
    }
    println!(
        "\nfinal: ({}, {}) coding nodes/links, min rate {} (target {}), {:?} after {} generations",
        result.report.coding_nodes,
        result.report.coding_links,
        result.report.min_rate,
        net.target_rate(),
        result.terminated_by,
        result.generations
    );
    Ok(())
}
