use benney_core::elliptic::EllipticModulus;
use benney_core::stability::{
    assemble_d, closed_form_f, closed_form_h, dnoidal_d22_ratio, krein_verdict, snoidal_beta_continuation,
    snoidal_det_d_asymptotics, Verdict,
};
use benney_core::sweep::{map_ordered, Execution};
use benney_core::{Family, WaveParameters, WaveProfile};

fn modulus(k: f64) -> EllipticModulus {
    EllipticModulus::new(k).unwrap()
}

fn wave(family: Family, c: f64, beta: f64, sigma: f64, kappa: f64, n: usize) -> WaveProfile {
    WaveProfile::new(WaveParameters::new(family, c, beta, sigma, 0.0, modulus(kappa)).unwrap(), n).unwrap()
}

#[test]
fn d_matrix_is_grid_independent() {
    for (family, c, beta, sigma) in [(Family::Dnoidal, 1.0, 0.0, 1.0), (Family::Snoidal, 1.0, 2.0, -1.0)] {
        for kappa in [0.3, 0.7] {
            let a = assemble_d(&wave(family, c, beta, sigma, kappa, 256)).unwrap();
            let b = assemble_d(&wave(family, c, beta, sigma, kappa, 512)).unwrap();
            assert_eq!(a.entries[1][2], 0.0);
            assert_eq!(a.entries[2][1], 0.0);
            assert!((a.det - b.det).abs() <= 1e-8 * a.det.abs(), "{family} kappa={kappa}: {} vs {}", a.det, b.det);
            assert_eq!(a.n_d, b.n_d);
        }
    }
}

#[test]
fn dnoidal_reference_verdict() {
    let r = krein_verdict(&wave(Family::Dnoidal, 1.0, 0.0, 1.0, 0.5, 256)).unwrap();
    assert_eq!((r.n_h, r.n_d, r.k_ham), (1, 1, 0));
    assert_eq!(r.verdict, Verdict::Stable);
}

#[test]
fn snoidal_near_threshold_is_unstable() {
    let r = krein_verdict(&wave(Family::Snoidal, 1.0, 1.01, -1.0, 0.5, 256)).unwrap();
    assert_eq!(r.n_h, 3);
    assert!(r.det_d > 0.0);
    assert!(r.k_ham == 1 || r.k_ham == 3, "kHam = {}", r.k_ham);
    assert_eq!(r.verdict, Verdict::Unstable);
}

#[test]
fn snoidal_far_from_threshold_is_unstable() {
    let r = krein_verdict(&wave(Family::Snoidal, 1.0, 2.0, -1.0, 0.5, 256)).unwrap();
    assert_eq!(r.verdict, Verdict::Unstable);
    assert!(r.max_real_part > 0.1);
}

#[test]
fn det_d_leading_order_at_one_percent() {
    let rows = snoidal_det_d_asymptotics(1.0, -1.0, modulus(0.5), &[1e-2], 256).unwrap();
    assert!(rows[0].det_d > 0.0);
    assert!((rows[0].ratio - 1.0).abs() <= 0.1, "ratio {}", rows[0].ratio);
}

#[test]
fn det_d_leading_order_at_one_permille() {
    let rows = snoidal_det_d_asymptotics(1.0, -1.0, modulus(0.5), &[1e-3], 256).unwrap();
    assert!(rows[0].det_d > 0.0);
    assert!((rows[0].ratio - 1.0).abs() <= 0.02, "ratio {}", rows[0].ratio);
}

#[test]
fn det_d_ratio_approaches_one() {
    let eps = [1e-3, 1e-4, 1e-5];
    let rows = snoidal_det_d_asymptotics(1.0, -1.0, modulus(0.5), &eps, 256).unwrap();
    let dev: Vec<f64> = rows.iter().map(|r| (r.ratio - 1.0).abs()).collect();
    assert!(dev[0] > dev[1] && dev[1] > dev[2] && dev[2] < 1e-3, "{dev:?}");
    assert!(rows.iter().all(|r| r.det_d > 0.0));
}

#[test]
fn continuation_keeps_zero_cluster_and_instability() {
    let betas = [1.01, 1.1, 1.5, 2.0, 3.0];
    let check = snoidal_beta_continuation(1.0, -1.0, modulus(0.5), &betas, 128).unwrap();
    assert!(check.zero_cluster_intact);
    assert_eq!(check.points.len(), betas.len());
    assert!(check.points.iter().all(|p| p.max_real_part > 1e-3));
}

#[test]
fn index_counts_are_consistent() {
    let mut cases = vec![];
    for kappa in [0.2, 0.5, 0.8] {
        cases.push((Family::Dnoidal, 1.0, 0.0, 1.0, kappa));
        cases.push((Family::Dnoidal, 1.0, 0.5, 2.0, kappa));
        cases.push((Family::Snoidal, 1.0, 1.1, -1.0, kappa));
        cases.push((Family::Snoidal, 1.0, 2.0, -1.0, kappa));
    }
    let reports = map_ordered(&cases, Execution::default(), |&(f, c, b, s, k)| krein_verdict(&wave(f, c, b, s, k, 128)).unwrap());
    for r in reports {
        assert!(r.consistency, "{r:?}");
        let direct = (r.k_real + 2 * r.k_complex_quadruplets) as i64;
        assert!(direct <= r.k_ham && (r.k_ham - direct) % 2 == 0);
        assert_eq!(r.zero_cluster_dim, 5);
    }
}

#[test]
fn closed_form_signs() {
    for i in 0..=90 {
        let k = modulus(0.05 + 0.01 * i as f64);
        assert!(dnoidal_d22_ratio(k) < 0.0);
        assert!(closed_form_f(k) > 0.0);
        assert!(closed_form_h(k) > 0.0);
    }
}
