// Locating an annotated kind of segment in unseen series. Training beats
// carry a bump whose position is known; relevance against the
// WITH/WITHOUT dataset points at the bump in a new beat.

use dtw_explain::synth::{bump_detection_trial, jaccard};
use dtw_explain::{detect_segment, DtwConfig, Error, RelevanceConfig};

pub fn run_example() -> dtw_explain::Result<()> {
    for seed in 0..5 {
        let trial = bump_detection_trial(seed, 40, 6)?;
        match detect_segment(&trial.dataset, &trial.query, DtwConfig::unconstrained(), RelevanceConfig::default(), 2.0) {
            Ok(found) => match found.segment {
                Some(seg) => println!(
                    "seed {seed}: bump {:?}, detected {seg:?}, jaccard {:.2}",
                    trial.bump,
                    jaccard(seg, trial.bump)
                ),
                None => println!("seed {seed}: bump {:?}, nothing above {:.3}", trial.bump, found.threshold),
            },
            Err(Error::WrongClass { label }) => println!("seed {seed}: query classified {label}"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn main() -> dtw_explain::Result<()> {
    run_example()
}
