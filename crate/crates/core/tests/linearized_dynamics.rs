use benney_core::elliptic::EllipticModulus;
use benney_core::fourier::FourierBasis;
use benney_core::linearization::{
    assemble_jh, eigen_spectrum_jh, evolve_linearized, generalized_kernel_basis, random_initial_data,
    verify_no_higher_jordan_blocks, BlockOperatorJH, BlockVector, Propagator, KERNEL_RESIDUAL_TOLERANCE,
};
use benney_core::{Error, Family, WaveParameters, WaveProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn wave(family: Family, c: f64, beta: f64, sigma: f64, kappa: f64, n: usize) -> WaveProfile {
    let p = WaveParameters::new(family, c, beta, sigma, 0.0, EllipticModulus::new(kappa).unwrap()).unwrap();
    WaveProfile::new(p, n).unwrap()
}

fn dnoidal(n: usize) -> WaveProfile {
    wave(Family::Dnoidal, 1.0, 0.0, 1.0, 0.5, n)
}

fn snoidal(n: usize) -> WaveProfile {
    wave(Family::Snoidal, 1.0, 2.0, -1.0, 0.5, n)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn jh_factors_as_j_times_h() {
    let op = assemble_jh(&snoidal(64)).unwrap();
    let jh = op.j_matrix() * op.h.matrix();
    let a = op.matrix();
    let n = op.dim();
    let scale = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].abs()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..n {
            assert!((jh[(i, j)] - a[(i, j)]).abs() <= 1e-12 * scale);
        }
    }
    let jm = op.j_matrix();
    for i in 0..n {
        for j in 0..n {
            assert_eq!(jm[(i, j)], -jm[(j, i)]);
        }
    }
}

#[test]
fn unit_middle_component_maps_to_minus_phi() {
    let w = dnoidal(128);
    let op = assemble_jh(&w).unwrap();
    let n = w.grid_size;
    let z = BlockVector { p: vec![0.0; n], v: vec![1.0; n], q: vec![0.0; n] };
    let out = op.apply(&z).unwrap();
    let amp = w.params.phi0;
    for j in 0..n {
        assert!(out.p[j].abs() <= 1e-10 * amp);
        assert!(out.v[j].abs() <= 1e-10 * amp);
        assert!((out.q[j] + w.phi[j]).abs() <= 1e-10 * amp);
    }
}

#[test]
fn generalized_kernel_relations_and_rank() {
    for w in [dnoidal(256), snoidal(256), wave(Family::Dnoidal, 2.0, 0.1, 0.5, 0.8, 256)] {
        let op = assemble_jh(&w).unwrap();
        let basis = generalized_kernel_basis(&w).unwrap();
        let r = basis.residuals(&op);
        assert!(r.max() <= KERNEL_RESIDUAL_TOLERANCE, "{r:?}");
        assert!(basis.min_singular_value().unwrap() > 1e-6);
    }
}

#[test]
fn zero_cluster_and_jordan_structure() {
    for w in [dnoidal(256), snoidal(256)] {
        let op = assemble_jh(&w).unwrap();
        let eig = eigen_spectrum_jh(&op, None).unwrap();
        assert_eq!(eig.zero_cluster_dim, 5);
        let check = verify_no_higher_jordan_blocks(&op, &eig).unwrap();
        assert!(check.passed, "{check:?}");
        assert_eq!((check.rank_jh, check.rank_jh_squared), (2, 0));
    }
}

#[test]
fn random_potential_fails_jordan_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let basis = FourierBasis::new(64, 3.0).unwrap();
    let phi: Vec<f64> = basis.grid().iter().map(|x| 1.0 + 0.3 * (x * 2.0).cos() + rng.gen_range(-0.05..0.05)).collect();
    let op = BlockOperatorJH::from_samples(basis, 1.0, 0.0, 1.0, &phi).unwrap();
    let eig = eigen_spectrum_jh(&op, None).unwrap();
    match verify_no_higher_jordan_blocks(&op, &eig) {
        Ok(check) => assert!(!check.passed),
        Err(e) => assert!(matches!(e, Error::Inconclusive(_))),
    }
}

#[test]
fn dnoidal_spectrum_on_imaginary_axis() {
    let op = assemble_jh(&dnoidal(256)).unwrap();
    let eig = eigen_spectrum_jh(&op, None).unwrap();
    assert!(eig.max_real_part <= 1e-6 * eig.spectral_radius);
    assert_eq!(eig.k_real + eig.k_complex_quadruplets, 0);
    assert!(eig.symmetry_residual <= 1e-6);
}

#[test]
fn energy_is_conserved_along_the_flow() {
    for w in [dnoidal(128), snoidal(128)] {
        let op = assemble_jh(&w).unwrap();
        let z0 = random_initial_data(w.basis(), 3);
        let a0 = z0.to_coefficients(w.basis()).unwrap();
        let e0 = op.energy(&a0);
        let scale = op.h.matrix().col_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
        for t in [1.0, 5.0, 10.0] {
            let z = evolve_linearized(&op, &z0, t).unwrap();
            let e = op.energy(&z.coefficients);
            let size = w.basis().spacing() * norm(&z.coefficients).powi(2) * scale;
            assert!((e - e0).abs() <= 1e-5 * size.max(e0.abs()), "{} t={t}: {e} vs {e0}", w.params.family);
        }
    }
}

#[test]
fn evolution_at_zero_time_and_negative_time() {
    let w = dnoidal(64);
    let op = assemble_jh(&w).unwrap();
    let z0 = random_initial_data(w.basis(), 1);
    let a0 = z0.to_coefficients(w.basis()).unwrap();
    assert_eq!(evolve_linearized(&op, &z0, 0.0).unwrap().coefficients, a0);
    assert!(evolve_linearized(&op, &z0, -1.0).unwrap_err().is_domain());
}

#[test]
fn propagator_matches_direct_exponential() {
    let w = snoidal(64);
    let op = assemble_jh(&w).unwrap();
    let z0 = random_initial_data(w.basis(), 5);
    let a0 = z0.to_coefficients(w.basis()).unwrap();
    let traj = Propagator::new(&op, 0.5).unwrap().trajectory(&a0, 8);
    let direct = evolve_linearized(&op, &z0, 4.0).unwrap().coefficients;
    let diff: Vec<f64> = traj[8].iter().zip(&direct).map(|(a, b)| a - b).collect();
    assert!(norm(&diff) <= 1e-9 * norm(&direct));
}

#[test]
fn dnoidal_growth_is_at_most_linear() {
    let w = dnoidal(128);
    let op = assemble_jh(&w).unwrap();
    let a0 = random_initial_data(w.basis(), 2024).to_coefficients(w.basis()).unwrap();
    let dt = 0.5;
    let traj = Propagator::new(&op, dt).unwrap().trajectory(&a0, 100);
    let n0 = norm(&a0);
    let ratio: Vec<f64> = traj.iter().map(|z| norm(z) / n0).collect();
    let bound = (0..=20).map(|i| ratio[i] / (1.0 + dt * i as f64)).fold(0.0, f64::max);
    for (i, r) in ratio.iter().enumerate() {
        let t = dt * i as f64;
        assert!(*r <= 2.0 * bound * (1.0 + t), "t={t}: {r} > {}", 2.0 * bound * (1.0 + t));
    }
}
