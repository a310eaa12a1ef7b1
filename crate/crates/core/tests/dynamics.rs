use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use convspec_core::polynomials::FAMILY_NAMES;
use convspec_core::{
    bracket, evolve_state, expectation, expectation_spectral, lift_model, operator_matrices, propagator,
    spectral_decomposition, Evolver, Family, ModelSpec, SectorIndex, SectoredObservable, SectoredState,
};

type CMatrix = DMatrix<Complex64>;

fn norm_inf(m: &CMatrix) -> f64 {
    m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by Taylor series with scaling and squaring.
fn expm(m: &CMatrix) -> CMatrix {
    let d = m.nrows();
    let norm = norm_inf(m);
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let a = m / Complex64::new(2f64.powi(squarings), 0.0);
    let mut term = CMatrix::identity(d, d);
    let mut sum = term.clone();
    for k in 1..40 {
        term = &term * &a / Complex64::new(k as f64, 0.0);
        sum += &term;
        if norm_inf(&term) < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-i H0 t) exp(-i H_I t) psi` on one sector, from the dense matrices.
fn oracle_evolve(model: &ModelSpec, mu: &SectorIndex, psi: &[Complex64], t: f64) -> Vec<Complex64> {
    let ops = operator_matrices(model, mu).unwrap();
    let minus_it = Complex64::new(0.0, -t);
    let u = expm(&(ops.h_free * minus_it)) * expm(&(ops.h_int * minus_it));
    (u * DVector::from_column_slice(psi)).iter().copied().collect()
}

fn test_state(dim: usize, seed: f64) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|n| Complex64::new((1.3 * n as f64 + seed).cos(), (0.7 * n as f64 - seed).sin()))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn all_families() -> Vec<Family> {
    FAMILY_NAMES.iter().flat_map(|n| Family::sample_grid(n).unwrap()).collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn evolution_matches_matrix_exponential() {
    for f in all_families() {
        let model = ModelSpec::family(f).unwrap().with_frequencies(1.1, 0.4);
        for big_n in [1, 4, 7, 10] {
            let mu = SectorIndex::simple(big_n);
            let psi0 = test_state(mu.dim(), big_n as f64);
            let mut psi = SectoredState::new();
            psi.insert(mu, psi0.clone()).unwrap();
            for t in [0.0, 0.5, 3.7, 10.0] {
                let got = evolve_state(&model, &psi, t).unwrap();
                let want = oracle_evolve(&model, &mu, &psi0, t);
                let diff = max_diff(&got.blocks[&mu], &want);
                assert!(diff <= 1e-8, "{f:?} N={big_n} t={t}: {diff:e}");
            }
        }
    }
}

#[test]
fn lifted_evolution_matches_matrix_exponential() {
    let inner = ModelSpec::family(Family::DualHahn { gamma: 1.0, delta: 0.5 }).unwrap().with_frequencies(0.3, 0.9);
    let model = lift_model(inner, 2, 3).unwrap();
    for mu in SectorIndex::all_at_level(2, 3, 6) {
        let psi0 = test_state(mu.dim(), 0.4);
        let mut psi = SectoredState::new();
        psi.insert(mu, psi0.clone()).unwrap();
        for t in [0.2, 2.0, 9.0] {
            let got = evolve_state(&model, &psi, t).unwrap();
            assert!(max_diff(&got.blocks[&mu], &oracle_evolve(&model, &mu, &psi0, t)) <= 1e-8);
        }
    }
}

#[test]
fn propagators_are_unitary_and_compose() {
    for f in all_families() {
        let model = ModelSpec::family(f).unwrap();
        for big_n in 0..=10 {
            let s = spectral_decomposition(&model, &SectorIndex::simple(big_n)).unwrap();
            let d = s.dim();
            for t in [0.1, 1.0, 10.0] {
                let u = propagator(&s, t);
                let defect = &u * u.adjoint() - CMatrix::identity(d, d);
                assert!(defect.iter().all(|z| z.norm() <= 1e-10), "{f:?} N={big_n} t={t}");
            }
            for (t1, t2) in [(0.3, 1.9), (4.0, -1.5), (7.25, 2.75)] {
                let lhs = propagator(&s, t1) * propagator(&s, t2);
                let rhs = propagator(&s, t1 + t2);
                assert!((lhs - rhs).iter().all(|z| z.norm() <= 1e-9), "{f:?} N={big_n}");
            }
        }
    }
}

#[test]
fn norm_is_preserved_for_long_times() {
    for f in all_families() {
        let model = ModelSpec::family(f).unwrap().with_frequencies(0.7, 1.3);
        let mut psi = SectoredState::new();
        for big_n in [3, 8] {
            let mu = SectorIndex::simple(big_n);
            let v = test_state(mu.dim(), 1.0).into_iter().map(|z| z * 0.5f64.sqrt()).collect();
            psi.insert(mu, v).unwrap();
        }
        let mut ev = Evolver::new(&model);
        for t in [1.0, 33.0, 100.0] {
            let n = ev.evolve(&psi, t).unwrap().norm_sqr();
            assert!((n - 1.0).abs() <= 1e-10, "{f:?} t={t}");
        }
    }
}

/// A Hermitian observable coupling two sectors, with dense blocks.
fn coupling_observable(mu: SectorIndex, nu: SectorIndex) -> SectoredObservable {
    let block = |a: SectorIndex, b: SectorIndex, s: f64| {
        CMatrix::from_fn(a.dim(), b.dim(), |i, j| Complex64::new((s * (i + 2 * j) as f64).sin(), (s + i as f64 - j as f64).cos()))
    };
    let mut x = SectoredObservable::new();
    let cross = block(mu, nu, 0.37);
    let own = block(mu, mu, 1.1);
    x.insert(mu, nu, cross.clone()).unwrap();
    x.insert(nu, mu, cross.adjoint()).unwrap();
    x.insert(mu, mu, &own + own.adjoint()).unwrap();
    x
}

#[test]
fn spectral_sums_agree_with_evolve_then_bracket() {
    for f in all_families() {
        let model = ModelSpec::family(f).unwrap().with_frequencies(0.9, 0.2);
        for (na, nb) in [(2, 5), (8, 6)] {
            let (mu, nu) = (SectorIndex::simple(na), SectorIndex::simple(nb));
            let mut psi = SectoredState::new();
            psi.insert(mu, test_state(mu.dim(), 0.1).into_iter().map(|z| z * 0.6).collect()).unwrap();
            psi.insert(nu, test_state(nu.dim(), 2.0).into_iter().map(|z| z * 0.8).collect()).unwrap();
            let x = coupling_observable(mu, nu);
            for t in [0.0, 0.8, 6.5] {
                let direct = expectation(&model, &psi, &x, t).unwrap();
                let spectral = expectation_spectral(&model, &psi, &x, t).unwrap();
                let scale = direct.abs().max(1.0);
                assert!((direct - spectral).abs() <= 1e-9 * scale, "{f:?} t={t}: {direct} vs {spectral}");
                let evolved = evolve_state(&model, &psi, t).unwrap();
                assert!(bracket(&evolved, &x).im.abs() <= 1e-12 * scale);
            }
        }
    }
}

#[test]
fn interaction_energy_is_conserved() {
    for f in all_families() {
        let model = ModelSpec::family(f).unwrap();
        let mu = SectorIndex::simple(7);
        let mut psi = SectoredState::new();
        psi.insert(mu, test_state(mu.dim(), 0.3)).unwrap();
        let h = SectoredObservable::interaction(&model, &[mu]).unwrap();
        let e0 = expectation(&model, &psi, &h, 0.0).unwrap();
        for t in [0.5, 5.0, 10.0] {
            let e = expectation(&model, &psi, &h, t).unwrap();
            assert!((e - e0).abs() <= 1e-10 * e0.abs().max(1.0), "{f:?} t={t}");
        }
    }
}
