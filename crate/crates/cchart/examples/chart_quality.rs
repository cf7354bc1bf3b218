//! How the three chart-quality scores respond to controlled damage. A
//! similarity transform of the truth is a perfect chart; adding noise or
//! folding the map degrades trustworthiness, continuity, and stress in
//! characteristic ways.

use cchart::metrics::{default_k, evaluate};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn score(label: &str, truth: &[[f64; 2]], chart: &[[f64; 2]]) {
    let r = evaluate(truth, chart, None).expect("inputs are consistent");
    println!("{label:<28} tw {:.4}  ct {:.4}  ks {:.4}", r.tw, r.ct, r.ks);
}

fn main() {
    let n = 400;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let truth: Vec<[f64; 2]> =
        (0..n).map(|_| [rng.random::<f64>() * 100.0, rng.random::<f64>() * 60.0]).collect();
    println!("{n} points, k = {} neighbors\n", default_k(n));

    // Rotation + scale + shift: rank metrics are exactly one, stress zero.
    let (c, s) = (0.6f64.cos(), 0.6f64.sin());
    let similar: Vec<[f64; 2]> = truth
        .iter()
        .map(|p| [3.0 * (c * p[0] - s * p[1]) + 50.0, 3.0 * (s * p[0] + c * p[1]) - 20.0])
        .collect();
    score("similarity transform", &truth, &similar);

    // Mild jitter: all three degrade a little.
    let jitter: Vec<[f64; 2]> = truth
        .iter()
        .map(|p| [p[0] + rng.random::<f64>() * 4.0 - 2.0, p[1] + rng.random::<f64>() * 4.0 - 2.0])
        .collect();
    score("2 m uniform jitter", &truth, &jitter);

    // Fold the map along x = 50: distant points land on top of each other,
    // which trustworthiness punishes hardest (false neighbors appear).
    let folded: Vec<[f64; 2]> =
        truth.iter().map(|p| [(p[0] - 50.0).abs(), p[1]]).collect();
    score("fold along x = 50", &truth, &folded);

    // Collapse one axis: neighborhoods merge, continuity suffers too.
    let collapsed: Vec<[f64; 2]> = truth.iter().map(|p| [p[0], 0.0]).collect();
    score("collapse y axis", &truth, &collapsed);

    // A random chart carries no structure at all; the rank metrics hover
    // near their chance level rather than at zero.
    let shuffled: Vec<[f64; 2]> =
        (0..n).map(|_| [rng.random::<f64>() * 100.0, rng.random::<f64>() * 60.0]).collect();
    score("unrelated random chart", &truth, &shuffled);
}
