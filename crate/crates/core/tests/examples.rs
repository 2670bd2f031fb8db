macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(classify_example, "classify.rs", classify_example_runs);
example!(explain_example, "explain.rs", explain_example_runs);
example!(relevance_example, "relevance.rs", relevance_example_runs);
example!(segment_example, "segment_detection.rs", segment_detection_example_runs);
example!(bench_example, "bench.rs", bench_example_runs);
example!(triangle_example, "triangle_repair.rs", triangle_repair_example_runs);
