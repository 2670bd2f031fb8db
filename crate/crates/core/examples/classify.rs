// Nearest-neighbour classification under DTW, with and without a window.

use dtw_explain::{classify, BoundProvider, ClassLabel, DtwConfig, LabeledDataset, TimeSeries};

fn labeled(values: &[f64], label: &str) -> dtw_explain::Result<TimeSeries> {
    TimeSeries::labeled(values.to_vec(), ClassLabel::new(label)?)
}

pub fn run_example() -> dtw_explain::Result<()> {
    let dataset = LabeledDataset::new(
        "shapes",
        vec![
            labeled(&[0., 0., 0., 0., 0., 0.], "flat")?,
            labeled(&[0., 0.2, -0.1, 0., 0.1, 0.], "flat")?,
            labeled(&[0., 1., 3., 1., 0., 0.], "peak")?,
            labeled(&[0., 0., 1., 3., 1., 0.], "peak")?,
        ],
    )?;
    let query = TimeSeries::new(vec![0., 0., 0., 2., 3., 0.])?;

    for (name, cfg) in [
        ("unconstrained", DtwConfig::unconstrained()),
        ("window 1", DtwConfig::with_window(1)),
    ] {
        let result = classify(&dataset, &query, 3, cfg, &BoundProvider::sound(), false)?;
        println!("{name}: label {}", result.label);
        for n in &result.neighbors {
            println!("  #{} {} at {:.3}", n.index + 1, n.label, n.distance);
        }
        println!("  {} distance evaluations, {} abandoned", result.stats.dtw_calls, result.stats.abandons);
    }
    Ok(())
}

fn main() -> dtw_explain::Result<()> {
    run_example()
}
