use std::time::Instant;
use porebench::classify::AlgorithmKind;
use porebench::tune::{tuned_benchmark, Objective, SearchSpace, Strategy, TuneMode};
use porebench::*;

fn main() {
    let t0 = Instant::now();
    let data = generate_dataset(&GenConfig::default()).unwrap();
    println!("gen: {:?}", t0.elapsed());
    let split = SplitConfig::default();
    let t0 = Instant::now();
    let (report, tunes) = tuned_benchmark(
        &data,
        &split,
        &AlgorithmKind::ALL,
        &SearchSpace::default(),
        TuneMode::PaperFaithful,
        Objective::Accuracy,
        512,
        512,
        Strategy::Grid,
        3,
    )
    .unwrap();
    println!("tuned benchmark: {:?}", t0.elapsed());
    for e in &report.entries {
        println!(
            "{:22} train={:.4} test={:.4} best={:.4} config={}",
            e.algorithm,
            e.train_score.unwrap(),
            e.test_score.unwrap(),
            e.best_accuracy.unwrap(),
            serde_json::to_string(&e.config).unwrap()
        );
    }
    for t in &tunes {
        println!("{:22} trials={} stopping={:?}", t.algorithm, t.trials.len(), t.stopping);
    }
}
