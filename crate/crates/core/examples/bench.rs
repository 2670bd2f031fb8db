// A small scalability grid. Every variant reports the same digest; the
// work counters show what each optimisation saves.

use dtw_explain::bench::{run_bench, BenchConfig};

pub fn run_example() -> dtw_explain::Result<()> {
    let cfg = BenchConfig {
        sizes: vec![16, 64],
        lengths: vec![20, 40],
        seed: 1,
        ..BenchConfig::default()
    };
    let report = run_bench(&cfg)?;
    print!("{}", report.to_csv());
    Ok(())
}

fn main() -> dtw_explain::Result<()> {
    run_example()
}
