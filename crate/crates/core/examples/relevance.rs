// Per-point relevance of a query, exact and strided, written as CSV and
// SVG into the system temp directory.

use dtw_explain::io::write_relevance;
use dtw_explain::synth::bench_problem;
use dtw_explain::{compute_relevance, DtwConfig, RelevanceConfig};

pub fn run_example() -> dtw_explain::Result<()> {
    let (dataset, query) = bench_problem(20, 32, 7)?;
    let cfg = DtwConfig::unconstrained();

    let exact = compute_relevance(&dataset, &query, 1, cfg, RelevanceConfig::default())?;
    let strided = compute_relevance(&dataset, &query, 1, cfg, RelevanceConfig::default().with_stride(2))?;
    let short = compute_relevance(&dataset, &query, 1, cfg, RelevanceConfig::default().with_max_length(4))?;

    for (name, rv) in [("exact", &exact), ("stride 2", &strided), ("length <= 4", &short)] {
        println!(
            "{name:>12}: {} flipping deletions, most relevant point {}, digest {}",
            rv.flips,
            rv.argmax(),
            rv.digest()
        );
    }

    let path = std::env::temp_dir().join("dtw-explain-relevance.csv");
    write_relevance(&path, &query, &exact, true)?;
    println!("wrote {} and {}", path.display(), path.with_extension("svg").display());
    Ok(())
}

fn main() -> dtw_explain::Result<()> {
    run_example()
}
