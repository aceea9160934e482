//! Independent oracles for the estimation routines: brute-force U-statistic
//! enumeration, Monte-Carlo unbiasedness against known covariances, and
//! closed-form population checks.

use gmrf::{
    cov_shrink_identity, cov_shrink_spd, band_pattern, population_covariance_ar1,
    population_covariance_arp, population_precision_ar1, prec_nll, prec_sparse, sample_covariance,
    simulate_ar, simulate_mixed_effect_ar, trace_statistics, ArProcessSpec, MixedEffectArSpec,
    PrecisionOptions, SparseSymmetricMatrix, StopRule,
};
use ndarray::Array2;

fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol})");
}

/// Standard-normal matrix via the order-0 simulator (seed-deterministic).
fn standard_normal(n: usize, p: usize, seed: u64) -> Array2<f64> {
    simulate_ar(&ArProcessSpec::new(vec![], p), n, seed).unwrap()
}

/// Brute-force evaluation of the trace statistics from their defining sums
/// over tuples of distinct observation indices. O(n^4 p): test sizes only.
fn naive_trace_statistics(x: &Array2<f64>) -> (f64, f64, f64) {
    let n = x.nrows();
    let p = x.ncols();
    let nf = n as f64;
    let p2 = nf * (nf - 1.0);
    let p3 = p2 * (nf - 2.0);
    let p4 = p3 * (nf - 3.0);
    let dot = |i: usize, j: usize| -> f64 { (0..p).map(|r| x[[i, r]] * x[[j, r]]).sum() };

    let u1: f64 = (0..n).map(|i| dot(i, i)).sum::<f64>() / nf;
    let mut u2 = 0.0;
    let mut u4 = 0.0;
    let mut u5 = 0.0;
    let mut u6 = 0.0;
    let mut y3_second = vec![0.0; p];
    let mut y3_first = vec![0.0; p];
    let mut y3_third = vec![0.0; p];
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            let dij = dot(i, j);
            u2 += dij * dij;
            u4 += dij;
            for r in 0..p {
                let prod = x[[i, r]] * x[[j, r]];
                y3_first[r] += prod * prod;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                u5 += dij * dot(j, k);
                for r in 0..p {
                    y3_second[r] += x[[i, r]] * x[[j, r]] * x[[j, r]] * x[[k, r]];
                }
                for l in 0..n {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    u6 += dij * dot(k, l);
                    for r in 0..p {
                        y3_third[r] += x[[i, r]] * x[[j, r]] * x[[k, r]] * x[[l, r]];
                    }
                }
            }
        }
    }
    let y1 = u1 - u4 / p2;
    let y2 = u2 / p2 - 2.0 * u5 / p3 + u6 / p4;
    let y3 = (0..p)
        .map(|r| y3_first[r] / p2 - 2.0 * y3_second[r] / p3 + y3_third[r] / p4)
        .sum();
    (y1, y2, y3)
}

#[test]
fn trace_statistics_match_brute_force_enumeration() {
    for (case, (n, p, seed, shift)) in [
        (4usize, 1usize, 11u64, 0.0),
        (5, 2, 12, 3.5),
        (6, 3, 13, -2.0),
        (8, 4, 14, 10.0),
    ]
    .into_iter()
    .enumerate()
    {
        let x = standard_normal(n, p, seed) + shift;
        let stats = trace_statistics(&x).unwrap();
        let (y1, y2, y3) = naive_trace_statistics(&x);
        let tol = |v: f64| 1e-10 * v.abs().max(1.0);
        assert_close(stats.y1, y1, tol(y1), &format!("case {case}: y1"));
        assert_close(stats.y2, y2, tol(y2), &format!("case {case}: y2"));
        assert_close(stats.y3, y3, tol(y3), &format!("case {case}: y3"));
    }
}

#[test]
fn trace_statistics_unbiased_under_identity_covariance() {
    // 500 seeds of n = 200, p = 5, Sigma = I: tr = 5, tr^2 = 5, sum var^2 = 5.
    let seeds = 500;
    let (n, p) = (200, 5);
    let mut y1s = Vec::with_capacity(seeds);
    let mut y2s = Vec::with_capacity(seeds);
    let mut y3s = Vec::with_capacity(seeds);
    for seed in 0..seeds {
        let x = standard_normal(n, p, seed as u64);
        let stats = trace_statistics(&x).unwrap();
        y1s.push(stats.y1);
        y2s.push(stats.y2);
        y3s.push(stats.y3);
    }
    for (values, truth, name) in [(&y1s, 5.0, "y1"), (&y2s, 5.0, "y2"), (&y3s, 5.0, "y3")] {
        let mean = values.iter().sum::<f64>() / seeds as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (seeds - 1) as f64;
        let se = (var / seeds as f64).sqrt();
        assert!(
            (mean - truth).abs() <= 3.0 * se,
            "{name}: Monte-Carlo mean {mean} vs {truth} (3se = {})",
            3.0 * se
        );
    }
}

#[test]
fn trace_statistics_unbiased_under_diagonal_covariance() {
    // Sigma = diag(1, 4): tr = 5, tr(Sigma^2) = 17, sum of sigma_ii^2 = 17.
    let seeds = 500;
    let (n, p) = (200, 2);
    let sd = [1.0, 2.0];
    let mut y1s = Vec::with_capacity(seeds);
    let mut y2s = Vec::with_capacity(seeds);
    let mut y3s = Vec::with_capacity(seeds);
    for seed in 0..seeds {
        let mut x = standard_normal(n, p, 1000 + seed as u64);
        for (j, &s) in sd.iter().enumerate() {
            x.column_mut(j).mapv_inplace(|v| v * s);
        }
        let stats = trace_statistics(&x).unwrap();
        y1s.push(stats.y1);
        y2s.push(stats.y2);
        y3s.push(stats.y3);
    }
    for (values, truth, name) in [(&y1s, 5.0, "y1"), (&y2s, 17.0, "y2"), (&y3s, 17.0, "y3")] {
        let mean = values.iter().sum::<f64>() / seeds as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (seeds - 1) as f64;
        let se = (var / seeds as f64).sqrt();
        assert!(
            (mean - truth).abs() <= 3.0 * se,
            "{name}: Monte-Carlo mean {mean} vs {truth} (3se = {})",
            3.0 * se
        );
    }
}

#[test]
fn sample_covariance_converges_to_ar1_closed_form() {
    // 1000 AR(1) rows: entrywise agreement with B(i,j) = phi^|i-j|/(1-phi^2)
    // within 5 Monte-Carlo standard errors.
    let (phi, t, n) = (0.8, 5, 1000);
    let spec = ArProcessSpec::new(vec![phi], t);
    let x = simulate_ar(&spec, n, 77).unwrap();
    let s = sample_covariance(&x).unwrap();
    let truth = population_covariance_ar1(phi, t).unwrap();
    for i in 0..t {
        for j in 0..t {
            // Var(s_ij) for Gaussian data: (sigma_ij^2 + sigma_ii sigma_jj)/(n-1)
            let var = (truth.get(i, j).powi(2) + truth.get(i, i) * truth.get(j, j))
                / (n - 1) as f64;
            let se = var.sqrt();
            assert_close(
                s.get(i, j),
                truth.get(i, j),
                5.0 * se,
                &format!("S[{i}{j}]"),
            );
        }
    }
}

#[test]
fn shrinkage_intensity_vanishes_with_sample_size() {
    // lambda(n = 50) > lambda(n = 5000) for the same correlated population,
    // in at least 19 of 20 seeds. The population must have off-diagonal mass:
    // when the target family contains the truth (e.g. diagonal Sigma), the
    // optimal intensity is 1 at every sample size and no ordering exists.
    let spec = ArProcessSpec::new(vec![0.8], 50);
    let mut wins = 0;
    for seed in 0..20 {
        let small = cov_shrink_spd(&simulate_ar(&spec, 50, 2000 + seed).unwrap()).unwrap();
        let large = cov_shrink_spd(&simulate_ar(&spec, 5000, 3000 + seed).unwrap()).unwrap();
        if small.lambda > large.lambda {
            wins += 1;
        }
    }
    assert!(wins >= 19, "lambda decreased in only {wins}/20 seeds");
}

#[test]
fn shrunk_covariance_is_positive_definite_when_rank_deficient() {
    // n = 10 < p = 50: the sample covariance is singular, the shrunk one is
    // positive definite in every seed.
    for seed in 0..20 {
        let x = standard_normal(10, 50, 4000 + seed);
        let est = cov_shrink_spd(&x).unwrap();
        let eig = nalgebra::SymmetricEigen::new(nalgebra::DMatrix::from_fn(50, 50, |i, j| {
            est.covariance.get(i, j)
        }));
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(
            min_eig > 0.0,
            "seed {seed}: smallest eigenvalue {min_eig} not positive (lambda = {})",
            est.lambda
        );
    }
}

#[test]
fn identity_target_scale_estimates_average_variance() {
    // Sigma = 2I in dimension 4: nu estimates tr(Sigma)/p = 2.
    let seeds = 200;
    let mut nus = Vec::with_capacity(seeds);
    for seed in 0..seeds {
        let x = standard_normal(5000, 4, 5000 + seed as u64).mapv(|v| v * 2f64.sqrt());
        nus.push(cov_shrink_identity(&x).unwrap().nu.unwrap());
    }
    let mean = nus.iter().sum::<f64>() / seeds as f64;
    let var = nus.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (seeds - 1) as f64;
    let se = (var / seeds as f64).sqrt();
    assert!(
        (mean - 2.0).abs() <= 3.0 * se,
        "nu Monte-Carlo mean {mean} vs 2 (3se = {})",
        3.0 * se
    );
}

#[test]
fn identity_target_estimate_is_consistent() {
    // Sigma = I, n = 10000, p = 4: estimate entrywise within 0.05 of I.
    let x = standard_normal(10_000, 4, 999);
    let est = cov_shrink_identity(&x).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert_close(est.covariance.get(i, j), want, 0.05, "identity-target entry");
        }
    }
}

#[test]
fn arp_population_covariance_matches_simulation() {
    // AR(2), psi = (0.4, 0.4): Toeplitz covariance within 5 standard errors
    // of the sample covariance over 200000 simulated paths.
    let spec = ArProcessSpec::new(vec![0.4, 0.4], 6);
    let truth = population_covariance_arp(&spec, 6).unwrap();
    let n = 200_000;
    let x = simulate_ar(&spec, n, 31).unwrap();
    let s = sample_covariance(&x).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let var = (truth.get(i, j).powi(2) + truth.get(i, i) * truth.get(j, j))
                / (n - 1) as f64;
            assert_close(
                s.get(i, j),
                truth.get(i, j),
                5.0 * var.sqrt(),
                &format!("gamma[{i}{j}]"),
            );
        }
    }
    // and the matrix is PD Toeplitz
    assert!(nalgebra::Cholesky::new(nalgebra::DMatrix::from_fn(6, 6, |i, j| truth.get(i, j)))
        .is_some());
}

#[test]
fn prec_sparse_is_consistent_for_ar1() {
    // n = 1000 rows of a T = 50 AR(1): interior entries of the estimate land
    // within 0.15 of the population values 1.64 and -0.8.
    let (phi, t, n) = (0.8, 50, 1000);
    let spec = ArProcessSpec::new(vec![phi], t);
    let x = simulate_ar(&spec, n, 10).unwrap();
    let g = band_pattern(t, 1).unwrap();
    let est = prec_sparse(&x, &g, &PrecisionOptions::default()).unwrap();
    for i in 1..t - 1 {
        assert_close(est.get(i, i), 1.64, 0.15, &format!("diag {i}"));
        assert_close(est.get(i, i - 1), -0.8, 0.15, &format!("offdiag {i}"));
    }
}

#[test]
fn population_precision_dominates_perturbations_in_likelihood() {
    // nll at the true precision beats a banded perturbation for large n.
    let (phi, t, n) = (0.8, 10, 5000);
    let spec = ArProcessSpec::new(vec![phi], t);
    let truth = population_precision_ar1(phi, t).unwrap();
    let mut diag = vec![1.0 + phi * phi; t];
    diag[0] = 1.0;
    diag[t - 1] = 1.0;
    let perturbed =
        SparseSymmetricMatrix::tridiagonal(&diag, &vec![-phi + 0.3; t - 1]).unwrap();
    for seed in 0..10 {
        let x = simulate_ar(&spec, n, 6000 + seed).unwrap();
        let nll_truth = prec_nll(&x, &truth).unwrap();
        let nll_perturbed = prec_nll(&x, &perturbed).unwrap();
        assert!(
            nll_truth < nll_perturbed,
            "seed {seed}: {nll_truth} !< {nll_perturbed}"
        );
    }
}

#[test]
fn white_noise_selects_independence_in_most_seeds() {
    // i.i.d. standard normal data (n = 200, T = 30): the population precision
    // is diagonal, so the exhaustive search picks order 0 in >= 18/20 seeds.
    let g = band_pattern(30, 1).unwrap();
    let mut zeros = 0;
    for seed in 0..20 {
        let x = standard_normal(200, 30, 8000 + seed);
        let trace = gmrf::select_markov_order(&x, &g, 5, StopRule::Exhaustive).unwrap();
        if trace.selected == 0 {
            zeros += 1;
        }
    }
    assert!(zeros >= 18, "independence selected in only {zeros}/20 seeds");
}

#[test]
fn nll_is_monotone_in_markov_order_on_mixed_effect_data() {
    let spec = MixedEffectArSpec {
        coefficients: vec![1.0 / 3.0; 3],
        horizon: 60,
        realisations: 100,
        seed: 20,
        u_seed: None,
    };
    let x = simulate_mixed_effect_ar(&spec).unwrap();
    let g = band_pattern(60, 1).unwrap();
    let trace = gmrf::select_markov_order(&x, &g, 8, StopRule::Exhaustive).unwrap();
    assert!(trace.skipped.is_empty(), "skipped orders: {:?}", trace.skipped);
    for pair in trace.evaluations.windows(2) {
        assert!(
            pair[1].nll <= pair[0].nll + 1e-6,
            "nll rose from order {} ({}) to order {} ({})",
            pair[0].order,
            pair[0].nll,
            pair[1].order,
            pair[1].nll
        );
    }
}
