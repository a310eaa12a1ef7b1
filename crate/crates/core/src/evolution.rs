//! Time evolution in the interaction picture, sector by sector.
//!
//! `|psi(t)> = exp(-i H0 t) exp(-i H_I t) |psi(0)>`; both factors preserve
//! every sector, and `H0` is diagonal in the sector basis.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_sector::{compose_state, SectorIndex};
use crate::hamiltonian::{free_energy, operator_matrices, ModelSpec};
use crate::spectral::{spectral_decomposition, SpectralData};

/// Tolerance on `|<psi|psi> - 1|` for inputs that must be normalized.
pub const NORM_TOL: f64 = 1e-8;

/// Tolerance on `max |X - X^dagger|` relative to `max |X|`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// `exp(-i H_I t)` on one sector, from the spectral data.
pub fn propagator(s: &SpectralData, t: f64) -> DMatrix<Complex64> {
    let d = s.dim();
    let phases: Vec<Complex64> = s
        .eigenvalues
        .iter()
        .zip(&s.weights)
        .map(|(&e, &w)| Complex64::from_polar(w, -e * t))
        .collect();
    let real = DMatrix::from_fn(d, d, |m, n| {
        (0..d)
            .map(|l| phases[l] * (s.coeffs[(m, l)] * s.coeffs[(n, l)]))
            .sum::<Complex64>()
    });
    DMatrix::from_fn(d, d, |m, n| real[(m, n)] * Complex64::from_polar(1.0, s.gauge[m] - s.gauge[n]))
}

/// `t` times the free energy of each basis state of the sector.
pub fn free_phases(model: &ModelSpec, mu: &SectorIndex, t: f64) -> Vec<f64> {
    (0..=mu.n).map(|n| t * free_energy(model, mu, n)).collect()
}

/// A state with finite support on sectors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SectoredState {
    pub blocks: BTreeMap<SectorIndex, Vec<Complex64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StateEntry {
    r0: usize,
    r1: usize,
    #[serde(rename = "N")]
    n: usize,
    re: Vec<f64>,
    #[serde(default)]
    im: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SectorRef {
    r0: usize,
    r1: usize,
    #[serde(rename = "N")]
    n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ObservableEntry {
    mu: SectorRef,
    nu: SectorRef,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Vec<Vec<f64>>,
}

fn complexify(re: &[f64], im: &[f64], what: &str) -> Result<Vec<Complex64>> {
    if !im.is_empty() && im.len() != re.len() {
        return Err(Error::param(what, format!("`im` has {} entries, `re` has {}", im.len(), re.len())));
    }
    Ok(re
        .iter()
        .enumerate()
        .map(|(i, &r)| Complex64::new(r, im.get(i).copied().unwrap_or(0.0)))
        .collect())
}

impl SectoredState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Basis state `|n>_mu`.
    pub fn basis(mu: SectorIndex, n: usize) -> Result<Self> {
        if n > mu.n {
            return Err(Error::OutOfSector { n, dim: mu.dim() });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); mu.dim()];
        v[n] = Complex64::new(1.0, 0.0);
        let mut s = Self::new();
        s.blocks.insert(mu, v);
        Ok(s)
    }

    pub fn insert(&mut self, mu: SectorIndex, amps: Vec<Complex64>) -> Result<()> {
        if amps.len() != mu.dim() {
            return Err(Error::StateShape { mu: mu.to_string(), len: amps.len(), dim: mu.dim() });
        }
        self.blocks.insert(mu, amps);
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.values().flatten().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, mu: &SectorIndex, n: usize) -> Complex64 {
        self.blocks
            .get(mu)
            .and_then(|v| v.get(n).copied())
            .unwrap_or_default()
    }

    /// Parses `[{"r0","r1","N","re","im"}]` for a model with multiplicities `(k0, k1)`.
    pub fn from_json(text: &str, k0: usize, k1: usize) -> Result<Self> {
        let entries: Vec<StateEntry> =
            serde_json::from_str(text).map_err(|e| Error::param("state", e.to_string()))?;
        let mut s = Self::new();
        for e in entries {
            let mu = SectorIndex::new(e.r0, e.r1, e.n, k0, k1)?;
            if s.blocks.contains_key(&mu) {
                return Err(Error::param("state", format!("sector {mu} listed twice")));
            }
            s.insert(mu, complexify(&e.re, &e.im, "state")?)?;
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<StateEntry> = self
            .blocks
            .iter()
            .map(|(mu, v)| StateEntry {
                r0: mu.r0,
                r1: mu.r1,
                n: mu.n,
                re: v.iter().map(|a| a.re).collect(),
                im: v.iter().map(|a| a.im).collect(),
            })
            .collect();
        serde_json::to_string(&entries).expect("state serializes")
    }
}

/// An observable with finite block support `(mu, nu) -> <mu, r| X |nu, s>`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SectoredObservable {
    pub blocks: BTreeMap<(SectorIndex, SectorIndex), DMatrix<Complex64>>,
}

impl SectoredObservable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, mu: SectorIndex, nu: SectorIndex, block: DMatrix<Complex64>) -> Result<()> {
        if block.nrows() != mu.dim() || block.ncols() != nu.dim() {
            return Err(Error::StateShape {
                mu: format!("{mu}x{nu}"),
                len: block.nrows() * block.ncols(),
                dim: mu.dim() * nu.dim(),
            });
        }
        self.blocks.insert((mu, nu), block);
        Ok(())
    }

    fn diagonal(sectors: &[SectorIndex], f: impl Fn(&SectorIndex, usize) -> f64) -> Self {
        let mut x = Self::new();
        for mu in sectors {
            let d = mu.dim();
            let m = DMatrix::from_fn(d, d, |i, k| {
                if i == k {
                    Complex64::new(f(mu, i), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            x.blocks.insert((*mu, *mu), m);
        }
        x
    }

    pub fn identity(sectors: &[SectorIndex]) -> Self {
        Self::diagonal(sectors, |_, _| 1.0)
    }

    /// Photon number of `mode` (0 or 1).
    pub fn mode_number(sectors: &[SectorIndex], mode: usize) -> Self {
        Self::diagonal(sectors, |mu, n| {
            let s = compose_state(*mu, n).expect("index within sector");
            if mode == 0 {
                s.n0 as f64
            } else {
                s.n1 as f64
            }
        })
    }

    /// The interaction Hamiltonian restricted to `sectors`.
    pub fn interaction(model: &ModelSpec, sectors: &[SectorIndex]) -> Result<Self> {
        let mut x = Self::new();
        for mu in sectors {
            x.blocks.insert((*mu, *mu), operator_matrices(model, mu)?.h_int);
        }
        Ok(x)
    }

    /// Largest `|X - X^dagger|` entry over all blocks, relative to `max |X|`.
    pub fn hermiticity_defect(&self) -> Option<(SectorIndex, SectorIndex, f64)> {
        let scale = self
            .blocks
            .values()
            .flat_map(|b| b.iter())
            .fold(0.0_f64, |m, z| m.max(z.norm()))
            .max(f64::MIN_POSITIVE);
        let mut worst: Option<(SectorIndex, SectorIndex, f64)> = None;
        for ((mu, nu), b) in &self.blocks {
            let r = match self.blocks.get(&(*nu, *mu)) {
                Some(t) => (b - t.adjoint()).iter().fold(0.0_f64, |m, z| m.max(z.norm())),
                None => b.iter().fold(0.0_f64, |m, z| m.max(z.norm())),
            } / scale;
            if !worst.is_some_and(|w| r <= w.2) {
                worst = Some((*mu, *nu, r));
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        match self.hermiticity_defect() {
            Some((mu, nu, r)) if r > HERMITIAN_TOL => Err(Error::NotHermitian {
                mu: mu.to_string(),
                nu: nu.to_string(),
                residual: r,
            }),
            _ => Ok(()),
        }
    }

    /// Parses `[{"mu":{..},"nu":{..},"re":[[..]],"im":[[..]]}]`.
    pub fn from_json(text: &str, k0: usize, k1: usize) -> Result<Self> {
        let entries: Vec<ObservableEntry> =
            serde_json::from_str(text).map_err(|e| Error::param("observable", e.to_string()))?;
        let mut x = Self::new();
        for e in entries {
            let mu = SectorIndex::new(e.mu.r0, e.mu.r1, e.mu.n, k0, k1)?;
            let nu = SectorIndex::new(e.nu.r0, e.nu.r1, e.nu.n, k0, k1)?;
            if !e.im.is_empty() && e.im.len() != e.re.len() {
                return Err(Error::param("observable", "`im` and `re` have different row counts"));
            }
            let mut rows = Vec::with_capacity(e.re.len());
            for (i, row) in e.re.iter().enumerate() {
                let im = e.im.get(i).map(Vec::as_slice).unwrap_or(&[]);
                rows.push(complexify(row, im, "observable")?);
            }
            if rows.iter().any(|r| r.len() != nu.dim()) || rows.len() != mu.dim() {
                return Err(Error::param(
                    "observable",
                    format!("block ({mu}, {nu}) must be {}x{}", mu.dim(), nu.dim()),
                ));
            }
            let m = DMatrix::from_fn(mu.dim(), nu.dim(), |i, k| rows[i][k]);
            if x.blocks.insert((mu, nu), m).is_some() {
                return Err(Error::param("observable", format!("block ({mu}, {nu}) listed twice")));
            }
        }
        Ok(x)
    }

    pub fn to_json(&self) -> String {
        let sref = |m: &SectorIndex| SectorRef { r0: m.r0, r1: m.r1, n: m.n };
        let entries: Vec<ObservableEntry> = self
            .blocks
            .iter()
            .map(|((mu, nu), b)| ObservableEntry {
                mu: sref(mu),
                nu: sref(nu),
                re: (0..b.nrows()).map(|i| (0..b.ncols()).map(|k| b[(i, k)].re).collect()).collect(),
                im: (0..b.nrows()).map(|i| (0..b.ncols()).map(|k| b[(i, k)].im).collect()).collect(),
            })
            .collect();
        serde_json::to_string(&entries).expect("observable serializes")
    }
}

/// Evolution for one model, caching the spectral data of each sector it meets.
#[derive(Debug, Clone)]
pub struct Evolver<'a> {
    model: &'a ModelSpec,
    cache: BTreeMap<SectorIndex, SpectralData>,
}

impl<'a> Evolver<'a> {
    pub fn new(model: &'a ModelSpec) -> Self {
        Evolver { model, cache: BTreeMap::new() }
    }

    pub fn spectral(&mut self, mu: &SectorIndex) -> Result<&SpectralData> {
        if !self.cache.contains_key(mu) {
            let s = spectral_decomposition(self.model, mu)?;
            self.cache.insert(*mu, s);
        }
        Ok(&self.cache[mu])
    }

    fn full_propagator(&mut self, mu: &SectorIndex, t: f64) -> Result<DMatrix<Complex64>> {
        let mut u = propagator(self.spectral(mu)?, t);
        let phases = free_phases(self.model, mu, t);
        for (n, ph) in phases.into_iter().enumerate() {
            let z = Complex64::from_polar(1.0, -ph);
            u.row_mut(n).iter_mut().for_each(|a| *a *= z);
        }
        Ok(u)
    }

    pub fn evolve(&mut self, psi: &SectoredState, t: f64) -> Result<SectoredState> {
        let mut out = SectoredState::new();
        for (mu, v) in &psi.blocks {
            if v.len() != mu.dim() {
                return Err(Error::StateShape { mu: mu.to_string(), len: v.len(), dim: mu.dim() });
            }
            let u = self.full_propagator(mu, t)?;
            let w = u * DVector::from_column_slice(v);
            out.blocks.insert(*mu, w.iter().copied().collect());
        }
        Ok(out)
    }

    /// `<psi(t)| X |psi(t)>`.
    pub fn expectation(&mut self, psi: &SectoredState, x: &SectoredObservable, t: f64) -> Result<f64> {
        x.check_hermitian()?;
        let evolved = self.evolve(psi, t)?;
        Ok(bracket(&evolved, x).re)
    }

    /// `<mu, m| X(t) |nu, n>` from the polynomial sums over both spectra.
    pub fn heisenberg_element(
        &mut self,
        mu: &SectorIndex,
        m: usize,
        nu: &SectorIndex,
        n: usize,
        x: &SectoredObservable,
        t: f64,
    ) -> Result<Complex64> {
        if m > mu.n {
            return Err(Error::OutOfSector { n: m, dim: mu.dim() });
        }
        if n > nu.n {
            return Err(Error::OutOfSector { n, dim: nu.dim() });
        }
        let Some(block) = x.blocks.get(&(*mu, *nu)) else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let left: Vec<Complex64> = column_sum(self.spectral(mu)?, m, t).into_iter().map(|z| z.conj()).collect();
        let right = column_sum(self.spectral(nu)?, n, t);
        let fl = free_phases(self.model, mu, t);
        let fr = free_phases(self.model, nu, t);
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, lr) in left.iter().enumerate() {
            for (s, rs) in right.iter().enumerate() {
                acc += lr * Complex64::from_polar(1.0, fl[r] - fr[s]) * block[(r, s)] * rs;
            }
        }
        Ok(acc)
    }

    /// `<X(t)>` as `sum conj(psi_m) psi_n <m| X(t) |n>` over the support of `X`.
    pub fn expectation_spectral(
        &mut self,
        psi: &SectoredState,
        x: &SectoredObservable,
        t: f64,
    ) -> Result<f64> {
        x.check_hermitian()?;
        let mut acc = Complex64::new(0.0, 0.0);
        let keys: Vec<_> = x.blocks.keys().copied().collect();
        for (mu, nu) in keys {
            let (Some(a), Some(b)) = (psi.blocks.get(&mu), psi.blocks.get(&nu)) else {
                continue;
            };
            for (m, am) in a.iter().enumerate() {
                for (n, bn) in b.iter().enumerate() {
                    if am.norm_sqr() == 0.0 || bn.norm_sqr() == 0.0 {
                        continue;
                    }
                    acc += am.conj() * bn * self.heisenberg_element(&mu, m, &nu, n, x, t)?;
                }
            }
        }
        Ok(acc.re)
    }
}

/// `U(t)[r][n] = sum_l P_r(E_l) conj(P_n(E_l)) w_l exp(-i E_l t)` as a vector in `r`.
fn column_sum(s: &SpectralData, n: usize, t: f64) -> Vec<Complex64> {
    let d = s.dim();
    (0..d)
        .map(|r| {
            (0..d)
                .map(|l| {
                    s.coeff(r, l) * s.coeff(n, l).conj()
                        * Complex64::from_polar(s.weights[l], -s.eigenvalues[l] * t)
                })
                .sum()
        })
        .collect()
}

/// `<psi| X |psi>` without evolution.
pub fn bracket(psi: &SectoredState, x: &SectoredObservable) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((mu, nu), b) in &x.blocks {
        let (Some(a), Some(c)) = (psi.blocks.get(mu), psi.blocks.get(nu)) else {
            continue;
        };
        for (r, ar) in a.iter().enumerate() {
            for (s, cs) in c.iter().enumerate() {
                acc += ar.conj() * b[(r, s)] * cs;
            }
        }
    }
    acc
}

fn check_normalized(psi: &SectoredState) -> Result<()> {
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

pub fn evolve_state(model: &ModelSpec, psi: &SectoredState, t: f64) -> Result<SectoredState> {
    check_normalized(psi)?;
    Evolver::new(model).evolve(psi, t)
}

pub fn expectation(model: &ModelSpec, psi: &SectoredState, x: &SectoredObservable, t: f64) -> Result<f64> {
    check_normalized(psi)?;
    Evolver::new(model).expectation(psi, x, t)
}

pub fn expectation_spectral(
    model: &ModelSpec,
    psi: &SectoredState,
    x: &SectoredObservable,
    t: f64,
) -> Result<f64> {
    check_normalized(psi)?;
    Evolver::new(model).expectation_spectral(psi, x, t)
}

pub fn heisenberg_element(
    model: &ModelSpec,
    mu: &SectorIndex,
    m: usize,
    nu: &SectorIndex,
    n: usize,
    x: &SectoredObservable,
    t: f64,
) -> Result<Complex64> {
    Evolver::new(model).heisenberg_element(mu, m, nu, n, x, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::Family;
    use crate::spectral::decompose_jacobi;
    use crate::hamiltonian::JacobiOperator;

    fn kraw() -> ModelSpec {
        ModelSpec::family(Family::Krawtchouk { p: 0.5 }).unwrap()
    }

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    #[test]
    fn propagator_at_zero_and_two_level_formula() {
        let s = spectral_decomposition(&kraw(), &SectorIndex::simple(1)).unwrap();
        let u0 = propagator(&s, 0.0);
        assert!(max_abs(&(u0 - DMatrix::identity(2, 2))) < 1e-15);
        for t in [0.3, 1.0, 4.2] {
            let u = propagator(&s, t);
            let want = (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -t)) * 0.5;
            assert!((u[(0, 0)] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn propagator_unitary_and_group_law_with_phases() {
        let j = JacobiOperator {
            diag: vec![0.1, 0.9, -0.4, 1.3, 0.2],
            offdiag_mag: vec![0.7, 1.1, 0.3, 0.8],
            offdiag_phase: vec![1.0, -0.5, 2.5, 0.1],
        };
        let s = decompose_jacobi(&j).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let u = propagator(&s, t);
            assert!(max_abs(&(&u * u.adjoint() - DMatrix::identity(5, 5))) < 1e-13);
        }
        let prod = propagator(&s, 0.7) * propagator(&s, 1.9);
        assert!(max_abs(&(prod - propagator(&s, 2.6))) < 1e-13);
    }

    #[test]
    fn free_phase_examples() {
        let mu = SectorIndex::simple(4);
        assert!(free_phases(&kraw(), &mu, 3.0).iter().all(|&p| p == 0.0));
        let m = kraw().with_frequencies(2.0, 0.5);
        let ph = free_phases(&m, &mu, 1.5);
        for (n, p) in ph.iter().enumerate() {
            assert!((p - 1.5 * ((2.0 - 0.5) * n as f64 + 0.5 * 4.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_and_energy_conservation() {
        let m = ModelSpec::family(Family::Hahn { alpha: 0.5, beta: 1.5 }).unwrap();
        let mu = SectorIndex::simple(6);
        let mut psi = SectoredState::new();
        let amps: Vec<Complex64> = (0..7).map(|k| Complex64::new(1.0 + k as f64, 0.5 * k as f64)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        psi.insert(mu, amps.into_iter().map(|a| a / norm).collect()).unwrap();
        let id = SectoredObservable::identity(&[mu]);
        let hi = SectoredObservable::interaction(&m, &[mu]).unwrap();
        let e0 = expectation(&m, &psi, &hi, 0.0).unwrap();
        for t in [0.5, 2.0, 9.0] {
            assert!((expectation(&m, &psi, &id, t).unwrap() - 1.0).abs() < 1e-12);
            assert!((expectation(&m, &psi, &hi, t).unwrap() - e0).abs() < 1e-10);
        }
    }

    #[test]
    fn two_level_oscillation() {
        let m = kraw();
        let mu = SectorIndex::simple(1);
        let psi = SectoredState::basis(mu, 0).unwrap();
        let n0 = SectoredObservable::mode_number(&[mu], 0);
        for t in [0.0, 0.4, 1.0, std::f64::consts::PI, 5.0] {
            let v = expectation(&m, &psi, &n0, t).unwrap();
            assert!((v - (1.0 - t.cos()) / 2.0).abs() < 1e-14, "t={t}: {v}");
        }
        let v = expectation(&m, &psi, &n0, 2.0 * std::f64::consts::PI).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn eigenstate_only_picks_up_a_phase() {
        let m = kraw().with_frequencies(0.7, 0.2);
        let mu = SectorIndex::simple(3);
        let s = spectral_decomposition(&m, &mu).unwrap();
        let l = 2;
        let mut psi = SectoredState::new();
        psi.insert(mu, (0..4).map(|n| s.coeff(n, l) * s.weights[l].sqrt()).collect()).unwrap();
        let t = 1.3;
        let out = evolve_state(&m, &psi, t).unwrap();
        let ph = free_phases(&m, &mu, t);
        for n in 0..4 {
            let want = psi.amplitude(&mu, n) * Complex64::from_polar(1.0, -(s.eigenvalues[l] * t + ph[n]));
            assert!((out.amplitude(&mu, n) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = kraw();
        let mu = SectorIndex::simple(1);
        let mut psi = SectoredState::new();
        psi.insert(mu, vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        assert!(matches!(evolve_state(&m, &psi, 1.0), Err(Error::NotNormalized(_))));
        let psi = SectoredState::basis(mu, 1).unwrap();
        let mut x = SectoredObservable::new();
        x.insert(mu, mu, DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0),
        ])).unwrap();
        assert!(matches!(expectation(&m, &psi, &x, 1.0), Err(Error::NotHermitian { .. })));
        assert!(psi.clone().insert(mu, vec![Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn heisenberg_matches_bracket() {
        let m = ModelSpec::family(Family::DualHahn { gamma: 1.0, delta: 0.5 })
            .unwrap()
            .with_frequencies(0.3, 1.1);
        let mu = SectorIndex::simple(4);
        let nu = SectorIndex::simple(2);
        let mut psi = SectoredState::new();
        psi.insert(mu, (0..5).map(|k| Complex64::new(0.3, 0.1 * k as f64)).collect()).unwrap();
        psi.insert(nu, (0..3).map(|k| Complex64::new(-0.2 * k as f64, 0.25)).collect()).unwrap();
        let norm = psi.norm_sqr().sqrt();
        psi.blocks.values_mut().flatten().for_each(|a| *a /= norm);
        let mut x = SectoredObservable::mode_number(&[mu, nu], 1);
        let c = DMatrix::from_fn(5, 3, |i, k| Complex64::new(0.1 * (i + k) as f64, 0.05 * i as f64));
        x.insert(nu, mu, c.adjoint()).unwrap();
        x.insert(mu, nu, c).unwrap();
        for t in [0.0, 0.8, 3.0] {
            let a = expectation(&m, &psi, &x, t).unwrap();
            let b = expectation_spectral(&m, &psi, &x, t).unwrap();
            assert!((a - b).abs() < 1e-12, "t={t}: {a} vs {b}");
        }
        let h0 = heisenberg_element(&m, &mu, 1, &nu, 2, &x, 0.0).unwrap();
        assert!((h0 - x.blocks[&(mu, nu)][(1, 2)]).norm() < 1e-14);
    }

    #[test]
    fn json_round_trips() {
        let mu = SectorIndex::new(1, 0, 2, 2, 1).unwrap();
        let mut psi = SectoredState::new();
        psi.insert(mu, vec![Complex64::new(0.5, 0.1), Complex64::new(0.0, -0.2), Complex64::new(0.3, 0.0)]).unwrap();
        let back = SectoredState::from_json(&psi.to_json(), 2, 1).unwrap();
        assert_eq!(back, psi);
        let parsed = SectoredState::from_json(r#"[{"r0":0,"r1":0,"N":1,"re":[1,0]}]"#, 1, 1).unwrap();
        assert_eq!(parsed, SectoredState::basis(SectorIndex::simple(1), 0).unwrap());
        assert!(SectoredState::from_json(r#"[{"r0":0,"r1":0,"N":1,"re":[1]}]"#, 1, 1).is_err());

        let x = SectoredObservable::mode_number(&[mu], 0);
        let back = SectoredObservable::from_json(&x.to_json(), 2, 1).unwrap();
        assert_eq!(back, x);
        let x = SectoredObservable::from_json(
            r#"[{"mu":{"r0":0,"r1":0,"N":1},"nu":{"r0":0,"r1":0,"N":1},"re":[[1,0],[0,2]]}]"#,
            1,
            1,
        )
        .unwrap();
        assert_eq!(x.blocks.len(), 1);
    }
}
