//! Link churn, two ways. First the structural invariant: downing a link
//! that no mask draws from cannot change any receiver's achieved rate.
//! Then the behavioral effect: when a receiver's direct path dies
//! mid-download, the coded relay path keeps every peer completing.

use ncmin::eval::{evaluate_rates, CodingAssignment};
use ncmin::graph::{apply_churn, butterfly, ChurnAction, ChurnEvent, ChurnSchedule, LinkId};
use ncmin::sim::{run_simulation, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = butterfly();
    let all = CodingAssignment::all_ones(&net);

    // mask out one of the merging node's inputs; the masked link becomes
    // non-contributing and its failure is invisible to the rate map
    let merging = net.merging_nodes()[0];
    let out = net.out_links(merging)[0];
    let mut masks = std::collections::BTreeMap::new();
    for (&key, mask) in all.masks() {
        masks.insert(key, mask.clone());
    }
    masks.insert((merging, out), vec![true, false]);
    let skewed = CodingAssignment::new(&net, masks)?;
    let ignored = net.in_links(merging)[1];

    let before = evaluate_rates(&net, &skewed, 8, 3, 99)?;
    let down = apply_churn(
        &net,
        &ChurnSchedule::new(vec![ChurnEvent {
            time: 1,
            link: ignored,
            action: ChurnAction::Down,
        }]),
        1,
    );
    let after = evaluate_rates(&down, &skewed, 8, 3, 99)?;
    println!("rates with {ignored} up:   {before:?}");
    println!("rates with {ignored} down: {after:?}");
    assert_eq!(before, after);

    // now break a contributing link mid-run: r1 loses its direct feed at
    // round 2 and finishes later than its twin, but still finishes
    let direct_to_r1 = LinkId(2);
    let mut cfg = SimConfig::new(128, 16, 4);
    cfg.seed = 5;
    cfg.churn = ChurnSchedule::new(vec![ChurnEvent {
        time: 2,
        link: direct_to_r1,
        action: ChurnAction::Down,
    }]);
    let report = run_simulation(&net, &all, &cfg)?;
    println!("\nwith {direct_to_r1} down from round 2:");
    for (peer, round) in &report.completions {
        println!("  {peer} finished in round {round}");
    }
    assert_eq!(report.metrics.failure_rate, 0.0);
    Ok(())
}
