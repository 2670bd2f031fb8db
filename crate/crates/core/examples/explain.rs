// Shortest deletion that changes a 1-NN decision, under each set of
// optimisations. The outcome is identical; only the work differs.

use dtw_explain::{find_min_deletion, ClassLabel, DtwConfig, LabeledDataset, Optimizations, TimeSeries};

pub fn run_example() -> dtw_explain::Result<()> {
    let a = ClassLabel::new("A")?;
    let b = ClassLabel::new("B")?;
    let dataset = LabeledDataset::new(
        "tiny",
        vec![
            TimeSeries::labeled(vec![0., 0., 0., 0., 0.], a)?,
            TimeSeries::labeled(vec![0., 0., 5., 0., 0.], b)?,
        ],
    )?;
    let query = TimeSeries::new(vec![0., 0., 5., 0., 0.])?;

    for (name, opts) in [
        ("naive", Optimizations::naive()),
        ("abandon", Optimizations::abandon_only()),
        ("abandon+bounds", Optimizations::abandon_and_bounds()),
        ("abandon+bounds+reuse", Optimizations::default()),
        ("+split bound", Optimizations::default().with_split_bound()),
    ] {
        let result = find_min_deletion(&dataset, &query, 1, DtwConfig::unconstrained(), opts)?;
        println!("{name:>22}: {}", result.outcome);
        println!("{:>22}  {}", "", result.stats);
    }
    Ok(())
}

fn main() -> dtw_explain::Result<()> {
    run_example()
}
