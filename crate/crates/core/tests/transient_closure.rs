use isophonon::transient::{fit_lifetime, simulate_transient, LifetimeFit, TransientParams};
use rayon::prelude::*;

fn ensemble(lifetime: f64, t_max: f64, seeds: std::ops::Range<u64>) -> Vec<LifetimeFit> {
    let params = TransientParams {
        lifetime,
        amplitude: 1e4,
        background: 10.0,
    };
    seeds
        .into_par_iter()
        .map(|seed| {
            let hist = simulate_transient(params, 500, t_max, seed).unwrap();
            fit_lifetime(&hist, None).unwrap_or_else(|e| panic!("seed {seed}: {e}"))
        })
        .collect()
}

#[test]
fn deuterium_interval_coverage() {
    let tau = 4.807;
    let fits = ensemble(tau, 50.0, 0..100);
    let covered = fits
        .iter()
        .filter(|f| (f.lifetime - tau).abs() <= f.lifetime_uncertainty)
        .count();
    // binomial(100, 0.683): mean 68.3, σ ≈ 4.7
    assert!(
        (54..=82).contains(&covered),
        "{covered} of 100 intervals cover τ"
    );
}

#[test]
fn ensemble_mean_closure() {
    for (tau, t_max) in [(0.885, 10.0), (4.807, 50.0)] {
        let fits = ensemble(tau, t_max, 0..100);
        let n = fits.len() as f64;
        let mean = fits.iter().map(|f| f.lifetime).sum::<f64>() / n;
        let var = fits
            .iter()
            .map(|f| (f.lifetime - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        let stderr = (var / n).sqrt();
        assert!(
            (mean - tau).abs() < 3.0 * stderr,
            "τ={tau}: mean {mean} ± {stderr}"
        );
        let quality = fits.iter().map(|f| f.fit_quality).sum::<f64>() / n;
        assert!((quality - 1.0).abs() < 0.1, "mean reduced χ² {quality}");
    }
}

#[test]
fn fits_are_reproducible() {
    let a = ensemble(0.885, 10.0, 5..8);
    let b = ensemble(0.885, 10.0, 5..8);
    assert_eq!(a, b);
}
