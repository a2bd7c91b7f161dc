use porebench::classify::AlgorithmKind;
use porebench::tune::{tuned_benchmark, Objective, SearchSpace, Strategy, TuneMode};
use porebench::*;

fn main() {
    let grid: Vec<(f64, f64, f64)> = vec![
        (2.0, 1.0, 0.02),
        (5.0, 3.0, 0.02),
        (8.0, 5.0, 0.02),
        (15.0, 8.0, 0.02),
        (25.0, 14.0, 0.02),
        (2.0, 1.0, 0.06),
        (5.0, 3.0, 0.06),
        (8.0, 5.0, 0.06),
        (15.0, 8.0, 0.06),
        (2.0, 1.0, 0.10),
        (5.0, 3.0, 0.10),
        (15.0, 8.0, 0.10),
    ];
    println!("jp    jg    pf    | RF      KNN     LR      SVM     GNB     | RF-LR   RF-SVM  knn_rank ok");
    for (jp, jg, pf) in grid {
        let cfg = GenConfig {
            jitter_pixel_sd: jp,
            jitter_grad_sd: jg,
            p_flip: pf,
            ..GenConfig::default()
        };
        let data = generate_dataset(&cfg).unwrap();
        let (report, _) = tuned_benchmark(
            &data,
            &SplitConfig::default(),
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
        let best = |name: &str| -> f64 {
            report
                .entries
                .iter()
                .find(|e| e.algorithm == name)
                .and_then(|e| e.best_accuracy)
                .unwrap()
        };
        let rf = best("RandomForest");
        let knn = best("KNN");
        let lr = best("LogisticRegression");
        let svm = best("LinearSVM");
        let gnb = best("GaussianNB");
        let others = [gnb, lr, svm, rf];
        let knn_rank = 1 + others.iter().filter(|&&v| v > knn).count();
        let ok = rf > knn
            && rf > lr
            && rf > svm
            && rf > gnb
            && rf - lr >= 0.01
            && rf - svm >= 0.01
            && knn_rank >= 4;
        println!(
            "{jp:<5} {jg:<5} {pf:<5} | {rf:.4}  {knn:.4}  {lr:.4}  {svm:.4}  {gnb:.4}  | {:+.4} {:+.4} {knn_rank}        {ok}",
            rf - lr,
            rf - svm
        );
    }
}
