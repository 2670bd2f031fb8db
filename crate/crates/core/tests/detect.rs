mod common;

use common::*;
use dtw_explain::detect::{build_detection_dataset, detect_segment, SegmentAnnotation, WITH, WITHOUT};
use dtw_explain::synth::{bump_detection_trial, jaccard};
use dtw_explain::{DtwConfig, Error, RelevanceConfig};

#[test]
fn worked_fixture_detects_the_spike() {
    let beat = series(&[0., 0., 5., 0., 0.]).with_id("1");
    let ds = build_detection_dataset(&[(beat.clone(), SegmentAnnotation::new("1", 3, 3))]).unwrap();
    let r = detect_segment(&ds, &beat, DtwConfig::unconstrained(), RelevanceConfig::default(), 2.0).unwrap();
    assert_eq!(r.segment, Some((3, 3)));
    let none = detect_segment(&ds, &beat, DtwConfig::unconstrained(), RelevanceConfig::default(), 1000.0).unwrap();
    assert_eq!(none.segment, None);
}

#[test]
fn dataset_layout() {
    let a = series(&[1., 2., 3., 4., 5., 6.]).with_id("a");
    let b = series(&[6., 5., 4., 3., 2., 1.]).with_id("b");
    let ds = build_detection_dataset(&[
        (a, SegmentAnnotation::new("a", 2, 3)),
        (b, SegmentAnnotation::new("b", 4, 5)),
    ])
    .unwrap();
    let labels: Vec<&str> = (0..4).map(|i| ds.label(i).as_str()).collect();
    assert_eq!(labels, [WITH, WITH, WITHOUT, WITHOUT]);
    assert_eq!(ds.instance(2).values(), &[1., 4., 5., 6.]);
    assert_eq!(ds.instance(3).values(), &[6., 5., 4., 1.]);
}

#[test]
fn flat_query_is_wrong_class() {
    let beat = series(&[0., 0., 5., 0., 0.]).with_id("1");
    let ds = build_detection_dataset(&[(beat, SegmentAnnotation::new("1", 3, 3))]).unwrap();
    let r = detect_segment(&ds, &series(&[0., 0., 0., 0.]), DtwConfig::unconstrained(), RelevanceConfig::default(), 2.0);
    assert!(matches!(r, Err(Error::WrongClass { label }) if label == WITHOUT));
}

#[test]
fn bump_trials_localise_reasonably() {
    let mut good = 0;
    for seed in 0..10 {
        let trial = bump_detection_trial(seed, 32, 6).unwrap();
        match detect_segment(&trial.dataset, &trial.query, DtwConfig::unconstrained(), RelevanceConfig::default(), 2.0) {
            Ok(r) => {
                if r.segment.is_some_and(|s| jaccard(s, trial.bump) >= 0.3) {
                    good += 1;
                }
            }
            Err(Error::WrongClass { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(good >= 6, "{good}/10");
}
