//! Carrying a single-photon conversion model to arbitrary multiplicities.
//!
//! Given an inner model with `k0 = k1 = 1`, the lifted coupling is
//! `g~(n0, n1) = W(n0, n1) g((n0-r0)/k0, (n1-r1)/k1)` with
//! `h~(n0, n1) = h((n0-r0)/k0, (n1-r1)/k1)`, where the scalar `W` turns the
//! multiphoton shift `a0^{*k0} a1^{k1}` into the single-photon shift. Every
//! sector `(r0, r1, N)` of the lifted model then carries the Jacobi operator of
//! the inner model at level `N`.

use crate::error::{Error, Result};
use crate::hamiltonian::{Coupling, ModelSpec};
use crate::polynomials::{Exact, Scalar};

/// Parameters of a lift.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftSpec {
    pub inner: ModelSpec,
    pub k0: usize,
    pub k1: usize,
}

impl LiftSpec {
    pub fn build(self) -> Result<ModelSpec> {
        lift_model(self.inner, self.k0, self.k1)
    }
}

/// `W^2` at occupations `(n0, n1)`, exactly: `(x+1) y / ((n0+1)...(n0+k0) n1...(n1-k1+1))`
/// with `x = (n0-r0)/k0`, `y = (n1-r1)/k1`.
pub fn w_factor_sq(k0: usize, k1: usize, n0: i64, n1: i64) -> Result<Exact> {
    if k0 == 0 || k1 == 0 {
        return Err(Error::param(if k0 == 0 { "k0" } else { "k1" }, "must be at least 1"));
    }
    if n0 < 0 {
        return Err(Error::param("n0", format!("{n0} is negative")));
    }
    if n1 < k1 as i64 {
        return Err(Error::param("n1", format!("{n1} is below k1={k1}")));
    }
    let (k0i, k1i) = (k0 as i128, k1 as i128);
    let (n0, n1) = (n0 as i128, n1 as i128);
    let lifted = (n0 - n0 % k0i + k0i) * (n1 - n1 % k1i);
    let p0: i128 = (1..=k0i).map(|j| n0 + j).product();
    let p1: i128 = (0..k1i).map(|j| n1 - j).product();
    Ok(Exact::new(lifted.into(), (k0i * k1i * p0 * p1).into()))
}

/// The scalar `W` on `|n0, n1>` of the sector with remainders `(r0, r1)`.
pub fn w_factor(k0: usize, k1: usize, n0: usize, n1: usize, r0: usize, r1: usize) -> Result<f64> {
    if k0 == 0 || k1 == 0 {
        return Err(Error::param(if k0 == 0 { "k0" } else { "k1" }, "must be at least 1"));
    }
    if r0 >= k0 || n0 % k0 != r0 {
        return Err(Error::param("r0", format!("n0={n0} is not {r0} mod {k0}")));
    }
    if r1 >= k1 || n1 % k1 != r1 {
        return Err(Error::param("r1", format!("n1={n1} is not {r1} mod {k1}")));
    }
    Ok(w_factor_sq(k0, k1, n0 as i64, n1 as i64)?.approx().sqrt())
}

/// Lifted model with multiplicities `(k0, k1)`; frequencies are taken from `inner`.
pub fn lift_model(inner: ModelSpec, k0: usize, k1: usize) -> Result<ModelSpec> {
    if (inner.k0, inner.k1) != (1, 1) {
        return Err(Error::param(
            "inner",
            format!("inner model must have k0 = k1 = 1, has ({}, {})", inner.k0, inner.k1),
        ));
    }
    if k0 == 0 || k1 == 0 {
        return Err(Error::param(if k0 == 0 { "k0" } else { "k1" }, "must be at least 1"));
    }
    let (omega0, omega1, limits) = (inner.omega0, inner.omega1, inner.limits);
    Ok(ModelSpec {
        k0,
        k1,
        omega0,
        omega1,
        coupling: Coupling::Lifted(Box::new(inner)),
        limits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_sector::{compose_state, SectorIndex};
    use crate::hamiltonian::jacobi_operator;
    use crate::polynomials::Family;
    use nalgebra::DMatrix;

    #[test]
    fn trivial_multiplicities() {
        for n0 in 0..6 {
            for n1 in 1..6 {
                assert_eq!(w_factor(1, 1, n0, n1, 0, 0).unwrap(), 1.0);
            }
        }
        let inner = ModelSpec::family(Family::Krawtchouk { p: 0.5 }).unwrap();
        let lifted = lift_model(inner.clone(), 1, 1).unwrap();
        for n in 0..6 {
            let mu = SectorIndex::simple(n);
            assert_eq!(jacobi_operator(&lifted, &mu).unwrap(), jacobi_operator(&inner, &mu).unwrap());
        }
    }

    #[test]
    fn domain_errors() {
        assert!(w_factor(2, 3, 3, 4, 0, 1).is_err());
        assert!(w_factor(2, 3, 2, 1, 0, 1).is_err());
        assert!(w_factor(2, 3, 2, 4, 0, 3).is_err());
        let inner = ModelSpec::family(Family::Chebyshev).unwrap();
        let l = lift_model(inner, 2, 2).unwrap();
        assert!(lift_model(l, 2, 2).is_err());
    }

    fn shift_matrix(mu: &SectorIndex) -> DMatrix<f64> {
        // a0^{k0} a1^{*k1} restricted to the sector, followed by W on the target state
        let d = mu.dim();
        let mut m = DMatrix::zeros(d, d);
        for n in 1..d {
            let s = compose_state(*mu, n).unwrap();
            let (n0, n1) = (s.n0 as f64, s.n1 as f64);
            let down: f64 = (0..mu.k0).map(|j| n0 - j as f64).product();
            let up: f64 = (1..=mu.k1).map(|j| n1 + j as f64).product();
            let t = compose_state(*mu, n - 1).unwrap();
            let w = w_factor(mu.k0, mu.k1, t.n0, t.n1, mu.r0, mu.r1).unwrap();
            m[(n - 1, n)] = w * (down * up).sqrt();
        }
        m
    }

    #[test]
    fn action_on_sectors() {
        for big_n in 0..=6 {
            for mu in SectorIndex::all_at_level(2, 3, big_n) {
                let m = shift_matrix(&mu);
                for n in 0..=big_n {
                    for k in 0..=big_n {
                        let want = if k == n + 1 {
                            ((k * (big_n - k + 1)) as f64).sqrt()
                        } else {
                            0.0
                        };
                        assert!((m[(n, k)] - want).abs() < 1e-12, "{mu} ({n},{k})");
                    }
                }
                assert!(m.column(0).iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn lifted_sectors_copy_the_inner_model() {
        let inner = ModelSpec::family(Family::DualHahn { gamma: 1.0, delta: 0.0 }).unwrap();
        let lifted = lift_model(inner.clone(), 2, 2).unwrap();
        for big_n in 0..=8 {
            let want = jacobi_operator(&inner, &SectorIndex::simple(big_n)).unwrap();
            for mu in SectorIndex::all_at_level(2, 2, big_n) {
                assert_eq!(jacobi_operator(&lifted, &mu).unwrap(), want);
            }
        }
    }
}
