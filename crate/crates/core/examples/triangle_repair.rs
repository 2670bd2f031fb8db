// The repaired triangle inequality as an opt-in, heuristic pruning rule.
// DTW is not a metric, so the stretch constant `c` is estimated from
// training triples; any flip found with its help is re-verified without it.

use dtw_explain::synth::bench_problem;
use dtw_explain::{estimate_triangle_repair, find_min_deletion, DtwConfig, Optimizations};

pub fn run_example() -> dtw_explain::Result<()> {
    let (dataset, query) = bench_problem(30, 24, 3)?;
    let cfg = DtwConfig::unconstrained();

    let exhaustive = estimate_triangle_repair(&dataset, cfg, None, 0)?;
    let sampled = estimate_triangle_repair(&dataset, cfg, Some(500), 0)?;
    println!("stretch: exhaustive {:.4}, 500 sampled triples {:.4}", exhaustive.stretch(), sampled.stretch());

    let sound = find_min_deletion(&dataset, &query, 1, cfg, Optimizations::default())?;
    let heuristic = find_min_deletion(&dataset, &query, 1, cfg, Optimizations::default().with_unsound_triangle())?;
    println!("sound bounds:    {}", sound.outcome);
    println!("  {}", sound.stats);
    println!("with triangle:   {}", heuristic.outcome);
    println!("  {}", heuristic.stats);
    assert_eq!(sound.outcome, heuristic.outcome);
    Ok(())
}

fn main() -> dtw_explain::Result<()> {
    run_example()
}
