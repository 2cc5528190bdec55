use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use subho_core::comparators::{iw_posterior_precision, IwConfig};
use subho_core::graph::roundtrip_psi;
use subho_core::linalg::{min_eigenvalue, spd_inverse};
use subho_core::rng::seeded;
use subho_core::simgen::{ar1_truth, generate_replicate, gwishart_sample, mvn_sample, random_graph, rescale_unit_diag, Design, Scenario};
use subho_core::GraphEstimate;

#[test]
fn gwishart_draws_stay_in_the_cone() {
    let mut rng = seeded(31);
    for _ in 0..60 {
        let p = rng.random_range(2..=15);
        let prob = rng.random_range(0.05..0.6);
        let g = random_graph(p, prob, &mut rng);
        for _ in 0..3 {
            let omega = gwishart_sample(&g, 3.0, &DMatrix::identity(p, p), &mut rng).unwrap();
            assert!(min_eigenvalue(&omega) > 0.0);
            for i in 0..p {
                for j in 0..p {
                    if i != j && !g.has_edge(i, j) {
                        assert_eq!(omega[(i, j)], 0.0);
                    }
                }
            }
        }
    }
}

#[test]
fn complete_graph_mean_matches_wishart() {
    let p = 3;
    let complete = GraphEstimate::from_edges(p, [(0, 1), (0, 2), (1, 2)]).unwrap();
    let d = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 1.5]);
    let s = spd_inverse(&d, "scale").unwrap();
    let b = 3.0;
    let df = b + p as f64 - 1.0;
    let n = 10_000;
    let mut rng = seeded(32);
    let mut sum = DMatrix::zeros(p, p);
    for _ in 0..n {
        sum += gwishart_sample(&complete, b, &d, &mut rng).unwrap();
    }
    let mean = sum / n as f64;
    for i in 0..p {
        for j in 0..p {
            let target = df * s[(i, j)];
            let se = (df * (s[(i, j)].powi(2) + s[(i, i)] * s[(j, j)]) / n as f64).sqrt();
            assert!((mean[(i, j)] - target).abs() < 3.0 * se, "({i},{j}) {} vs {target}", mean[(i, j)]);
        }
    }
}

#[test]
fn edge_density_matches_probability() {
    let mut rng = seeded(33);
    let (p, prob, reps) = (20, 0.15, 10_000);
    let slots = p * (p - 1) / 2;
    let total: usize = (0..reps).map(|_| random_graph(p, prob, &mut rng).edge_count()).sum();
    let density = total as f64 / (reps * slots) as f64;
    let se = (prob * (1.0 - prob) / (reps * slots) as f64).sqrt();
    assert!((density - prob).abs() < 3.0 * se, "{density}");
}

#[test]
fn identity_covariance_sample_moments() {
    let mut truth = ar1_truth(3, 0.5).unwrap();
    truth.sigma = DMatrix::identity(3, 3);
    let n = 50_000;
    let x = mvn_sample(n, &truth, &mut seeded(34)).unwrap();
    let cov = x.tr_mul(&x) / n as f64;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            let se = ((1.0 + target * target) / n as f64).sqrt();
            assert!((cov[(i, j)] - target).abs() < 3.0 * se, "({i},{j}) {}", cov[(i, j)]);
        }
    }
    assert_eq!(x, mvn_sample(n, &truth, &mut seeded(34)).unwrap());
}

#[test]
fn ar1_partial_correlations_from_dense_inversion() {
    let t = ar1_truth(5, 0.7).unwrap();
    let omega = spd_inverse(&t.sigma, "ar1").unwrap();
    let expected = 0.7 / (1.0 + 0.49);
    for i in 1..3 {
        let direct = -omega[(i, i + 1)] / (omega[(i, i)] * omega[(i + 1, i + 1)]).sqrt();
        assert!((direct - expected).abs() < 1e-12);
        assert!((t.psi.get(i, i + 1) - direct).abs() < 1e-12);
    }
    let rt = roundtrip_psi(&t.omega).unwrap();
    assert!((rt.matrix() - t.psi.matrix()).amax() < 1e-12);
}

#[test]
fn rescale_preserves_partial_correlations_and_is_idempotent() {
    let mut rng = seeded(35);
    let g = random_graph(8, 0.3, &mut rng);
    let omega = gwishart_sample(&g, 3.0, &DMatrix::identity(8, 8), &mut rng).unwrap();
    let once = rescale_unit_diag(&omega).unwrap();
    let sigma = spd_inverse(&once.omega, "rescaled").unwrap();
    assert!((0..8).all(|i| (sigma[(i, i)] - 1.0).abs() < 1e-10));
    let before = roundtrip_psi(&omega).unwrap();
    assert!((before.matrix() - once.psi.matrix()).amax() < 1e-12);
    let twice = rescale_unit_diag(&once.omega).unwrap();
    assert!((twice.omega - &once.omega).amax() < 1e-12);
    assert_eq!(once.graph, g);
}

#[test]
fn inverse_wishart_posterior_moments() {
    let mut rng = seeded(36);
    let (n, p) = (6, 3);
    let x = DMatrix::from_fn(n, p, |_, _| {
        let z: f64 = StandardNormal.sample(&mut rng);
        z
    });
    let post = iw_posterior_precision(&x, &IwConfig::default()).unwrap();
    let scale = DMatrix::identity(p, p) + x.tr_mul(&x);
    let m = (p + 2) as f64;
    let df = m + n as f64;
    let draws = 20_000;
    let mut sum_sigma = DMatrix::zeros(p, p);
    for _ in 0..draws {
        sum_sigma += spd_inverse(&post.sample(&mut rng), "draw").unwrap();
    }
    let mean_sigma = sum_sigma / draws as f64;
    let target = &scale / (df - p as f64 - 1.0);
    // inverse-Wishart variances, df' = df - p - 1
    let dp = df - p as f64;
    for i in 0..p {
        for j in 0..p {
            let var = ((dp + 1.0) * scale[(i, j)].powi(2) + (dp - 1.0) * scale[(i, i)] * scale[(j, j)])
                / ((dp) * (dp - 1.0).powi(2) * (dp - 3.0));
            let se = (var / draws as f64).sqrt();
            assert!((mean_sigma[(i, j)] - target[(i, j)]).abs() < 3.0 * se, "({i},{j})");
        }
    }
}

#[test]
fn replicates_are_reproducible_and_distinct() {
    let s = Scenario {
        name: "gw".into(),
        design: Design::GWishart { edge_prob: 0.2, dof: 3.0 },
        n: 30,
        p: 10,
        replicates: 2,
        seed: 4,
    };
    let (t0, d0) = generate_replicate(&s, 0).unwrap();
    let (t0b, d0b) = generate_replicate(&s, 0).unwrap();
    let (_, d1) = generate_replicate(&s, 1).unwrap();
    assert_eq!((t0.omega.clone(), d0.values().clone()), (t0b.omega, d0b.values().clone()));
    assert_ne!(d0.values(), d1.values());
    assert!((0..10).all(|i| (t0.sigma[(i, i)] - 1.0).abs() < 1e-10));
}
