//! Model definitions and their per-sector Jacobi operators.
//!
//! On a sector `mu = (r0, r1, N)` the interaction Hamiltonian acts as
//! `H|n> = b_{n-1}|n-1> + a_n|n> + conj(b_n)|n+1>`, so the matrix has
//! `b_n` at `(n, n+1)` and `conj(b_n)` at `(n+1, n)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_sector::{compose_state, decompose_state, FockState, SectorIndex};
use crate::polynomials::{Exact, Family, Scalar};

/// Caps on the sector level, guarding against runaway cost and (for the
/// q-families) loss of relative accuracy in eigenvalues growing like `q^{-N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_n: usize,
    pub max_n_q: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_n: 100, max_n_q: 30 }
    }
}

impl Limits {
    /// Defaults overridden by `CONVSPEC_MAX_N` and `CONVSPEC_MAX_N_Q`.
    pub fn from_env() -> Result<Self> {
        let mut l = Limits::default();
        for (var, slot) in [("CONVSPEC_MAX_N", &mut l.max_n), ("CONVSPEC_MAX_N_Q", &mut l.max_n_q)] {
            if let Ok(v) = std::env::var(var) {
                *slot = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::param(var, format!("`{v}` is not a nonnegative integer")))?;
            }
        }
        Ok(l)
    }
}

/// Explicit coefficients for one sector level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorTable {
    pub a: Vec<f64>,
    pub b_mag: Vec<f64>,
    #[serde(default)]
    pub b_phase: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    Family(Family),
    /// Coefficient tables keyed by sector level, shared by all `(r0, r1)`.
    Tables(BTreeMap<usize, SectorTable>),
    /// The inner model (with `k0 = k1 = 1`) carried to the outer multiplicities.
    Lifted(Box<ModelSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpecJson", into = "ModelSpecJson")]
pub struct ModelSpec {
    pub k0: usize,
    pub k1: usize,
    pub omega0: f64,
    pub omega1: f64,
    pub coupling: Coupling,
    pub limits: Limits,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSpecJson {
    k0: usize,
    k1: usize,
    #[serde(default)]
    omega0: f64,
    #[serde(default)]
    omega1: f64,
    coupling: CouplingJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum CouplingJson {
    Family {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Tables {
        sectors: Vec<TableJson>,
    },
    Lifted {
        k0: usize,
        k1: usize,
        inner: Box<ModelSpecJson>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    #[serde(rename = "N")]
    n: usize,
    a: Vec<f64>,
    b_mag: Vec<f64>,
    #[serde(default)]
    b_phase: Vec<f64>,
}

impl TryFrom<ModelSpecJson> for ModelSpec {
    type Error = Error;

    fn try_from(j: ModelSpecJson) -> Result<Self> {
        let base = match j.coupling {
            CouplingJson::Family { name, params } => {
                if (j.k0, j.k1) != (1, 1) {
                    return Err(Error::param(
                        "k0",
                        "family couplings need k0 = k1 = 1; wrap them in a lifted coupling",
                    ));
                }
                ModelSpec::family(Family::from_params(&name, &params)?)?
            }
            CouplingJson::Tables { sectors } => ModelSpec::tables(
                j.k0,
                j.k1,
                sectors
                    .into_iter()
                    .map(|t| (t.n, SectorTable { a: t.a, b_mag: t.b_mag, b_phase: t.b_phase })),
            )?,
            CouplingJson::Lifted { k0, k1, inner } => {
                if (k0, k1) != (j.k0, j.k1) {
                    return Err(Error::param(
                        "coupling.k0",
                        format!("lifted to ({k0},{k1}) but the model declares ({},{})", j.k0, j.k1),
                    ));
                }
                crate::lifting::lift_model(ModelSpec::try_from(*inner)?, k0, k1)?
            }
        };
        let m = base.with_frequencies(j.omega0, j.omega1);
        if !m.omega0.is_finite() || !m.omega1.is_finite() {
            return Err(Error::param("omega0", "frequencies must be finite"));
        }
        Ok(m)
    }
}

impl From<ModelSpec> for ModelSpecJson {
    fn from(m: ModelSpec) -> Self {
        let coupling = match m.coupling {
            Coupling::Family(f) => CouplingJson::Family {
                name: f.name().to_string(),
                params: f.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            },
            Coupling::Tables(t) => CouplingJson::Tables {
                sectors: t
                    .into_iter()
                    .map(|(n, s)| TableJson { n, a: s.a, b_mag: s.b_mag, b_phase: s.b_phase })
                    .collect(),
            },
            Coupling::Lifted(inner) => CouplingJson::Lifted {
                k0: m.k0,
                k1: m.k1,
                inner: Box::new((*inner).into()),
            },
        };
        ModelSpecJson { k0: m.k0, k1: m.k1, omega0: m.omega0, omega1: m.omega1, coupling }
    }
}

impl ModelSpec {
    /// Catalog model with `k0 = k1 = 1` and no free Hamiltonian.
    pub fn family(f: Family) -> Result<Self> {
        f.validate()?;
        Ok(ModelSpec {
            k0: 1,
            k1: 1,
            omega0: 0.0,
            omega1: 0.0,
            coupling: Coupling::Family(f),
            limits: Limits::default(),
        })
    }

    /// Model given directly by its coefficient tables.
    pub fn tables(
        k0: usize,
        k1: usize,
        sectors: impl IntoIterator<Item = (usize, SectorTable)>,
    ) -> Result<Self> {
        if k0 == 0 || k1 == 0 {
            return Err(Error::param(if k0 == 0 { "k0" } else { "k1" }, "must be at least 1"));
        }
        let mut map = BTreeMap::new();
        for (n, mut t) in sectors {
            if t.b_phase.is_empty() {
                t.b_phase = vec![0.0; t.b_mag.len()];
            }
            let bad = |reason: String| Error::MalformedTable { n, reason };
            if t.a.len() != n + 1 {
                return Err(bad(format!("`a` has {} entries, expected {}", t.a.len(), n + 1)));
            }
            if t.b_mag.len() != n {
                return Err(bad(format!("`b_mag` has {} entries, expected {n}", t.b_mag.len())));
            }
            if t.b_phase.len() != n {
                return Err(bad(format!("`b_phase` has {} entries, expected {n}", t.b_phase.len())));
            }
            if t.a.iter().chain(&t.b_phase).any(|v| !v.is_finite()) {
                return Err(bad("non-finite entry".into()));
            }
            if t.b_mag.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(bad("`b_mag` entries must be finite and nonnegative".into()));
            }
            if map.insert(n, t).is_some() {
                return Err(bad("duplicate sector level".into()));
            }
        }
        Ok(ModelSpec {
            k0,
            k1,
            omega0: 0.0,
            omega1: 0.0,
            coupling: Coupling::Tables(map),
            limits: Limits::default(),
        })
    }

    pub fn with_frequencies(mut self, omega0: f64, omega1: f64) -> Self {
        self.omega0 = omega0;
        self.omega1 = omega1;
        self
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        if let Coupling::Lifted(inner) = &mut self.coupling {
            inner.limits = limits;
        }
        self
    }

    /// The catalog family at the bottom of the model, if any.
    pub fn family_descriptor(&self) -> Option<Family> {
        match &self.coupling {
            Coupling::Family(f) => Some(*f),
            Coupling::Lifted(inner) => inner.family_descriptor(),
            Coupling::Tables(_) => None,
        }
    }

    /// Largest sector level this model accepts.
    pub fn level_cap(&self) -> usize {
        match self.family_descriptor() {
            Some(f) if f.is_q_family() => self.limits.max_n_q,
            _ => self.limits.max_n,
        }
    }

    pub fn check_sector(&self, mu: &SectorIndex) -> Result<()> {
        if mu.k0 != self.k0 || mu.k1 != self.k1 || mu.r0 >= mu.k0 || mu.r1 >= mu.k1 {
            return Err(Error::SectorMismatch { mu: mu.to_string(), k0: self.k0, k1: self.k1 });
        }
        let cap = self.level_cap();
        if mu.n > cap {
            return Err(Error::CapExceeded { n: mu.n, cap });
        }
        if let Coupling::Tables(t) = &self.coupling {
            if !t.contains_key(&mu.n) {
                return Err(Error::MissingTable(mu.n));
            }
        }
        Ok(())
    }

    pub fn sector(&self, r0: usize, r1: usize, n: usize) -> Result<SectorIndex> {
        let mu = SectorIndex::new(r0, r1, n, self.k0, self.k1)?;
        self.check_sector(&mu)?;
        Ok(mu)
    }

    fn table_at(&self, n0: i64, n1: i64) -> Result<(&SectorTable, usize)> {
        let Coupling::Tables(t) = &self.coupling else { unreachable!() };
        let (mu, n) = decompose_state(FockState::new(n0 as usize, n1 as usize), self.k0, self.k1)?;
        let table = t.get(&mu.n).ok_or(Error::MissingTable(mu.n))?;
        Ok((table, n))
    }

    fn reduce(&self, n0: i64, n1: i64) -> (i64, i64) {
        let r0 = n0.rem_euclid(self.k0 as i64);
        let r1 = n1.rem_euclid(self.k1 as i64);
        ((n0 - r0) / self.k0 as i64, (n1 - r1) / self.k1 as i64)
    }

    /// Diagonal coupling `h(n0, n1)` at nonnegative occupations.
    pub fn h(&self, n0: i64, n1: i64) -> Result<f64> {
        if n0 < 0 || n1 < 0 {
            return Err(Error::param("n0", format!("negative occupation ({n0}, {n1})")));
        }
        match &self.coupling {
            Coupling::Family(f) => Ok(f.h::<Exact>(n0, n1).approx()),
            Coupling::Tables(_) => {
                let (t, n) = self.table_at(n0, n1)?;
                Ok(t.a[n])
            }
            Coupling::Lifted(inner) => {
                let (x, y) = self.reduce(n0, n1);
                inner.h(x, y)
            }
        }
    }

    fn shift_products(&self, n0: i64, n1: i64) -> (i128, i128) {
        let p0 = (1..=self.k0 as i128).map(|j| n0 as i128 + j).product();
        let p1 = (0..self.k1 as i128).map(|j| n1 as i128 - j).product();
        (p0, p1)
    }

    /// `|g(n0, n1)|^2` and `arg g(n0, n1)`, exactly where the model allows.
    /// Needs `n0 >= 0` and `n1 >= k1`.
    pub fn coupling_sq_exact(&self, n0: i64, n1: i64) -> Result<(Exact, f64)> {
        if n0 < 0 || n1 < self.k1 as i64 {
            return Err(Error::param(
                "n1",
                format!("coupling needs n0 >= 0 and n1 >= k1, got ({n0}, {n1})"),
            ));
        }
        match &self.coupling {
            Coupling::Family(f) => Ok((f.coupling_sq::<Exact>(n0, n1)?, 0.0)),
            Coupling::Tables(_) => {
                let (t, n) = self.table_at(n0, n1)?;
                let (p0, p1) = self.shift_products(n0, n1);
                let b = Exact::param(t.b_mag[n]);
                Ok((b.clone() * b / Exact::from_integer((p0 * p1).into()), t.b_phase[n]))
            }
            Coupling::Lifted(inner) => {
                let (x, y) = self.reduce(n0, n1);
                let (g2, phase) = inner.coupling_sq_exact(x, y)?;
                Ok((g2 * crate::lifting::w_factor_sq(self.k0, self.k1, n0, n1)?, phase))
            }
        }
    }

    pub fn coupling_sq(&self, n0: i64, n1: i64) -> Result<f64> {
        Ok(self.coupling_sq_exact(n0, n1)?.0.approx())
    }

    /// `G` at occupations `(n0, n1)`; exact zero at the sector boundaries.
    pub(crate) fn cal_g_occ(&self, n0: i64, n1: i64) -> Result<(Exact, f64)> {
        let (p0, p1) = self.shift_products(n0, n1);
        if p0 == 0 || p1 == 0 {
            return Ok((Exact::zero(), 0.0));
        }
        if n0 < 0 || n1 < 0 {
            return Err(Error::param(
                "A0",
                format!("occupations ({n0}, {n1}) lie outside every sector"),
            ));
        }
        let (g2, phase) = self.coupling_sq_exact(n0, n1)?;
        Ok((g2 * Exact::from_integer((p0 * p1).into()), phase))
    }
}

/// `G(A0, K) = |g(k0 A0, K/k0 - k1 A0)|^2 (n0+1)...(n0+k0) n1(n1-1)...(n1-k1+1)`.
pub fn cal_g(model: &ModelSpec, a0: Ratio<i64>, k: usize) -> Result<f64> {
    let n0 = a0 * model.k0 as i64;
    if !n0.is_integer() {
        return Err(Error::param("A0", format!("k0*A0 = {n0} is not an integer")));
    }
    let n0 = n0.to_integer();
    let rest = k as i64 - model.k1 as i64 * n0;
    if rest % model.k0 as i64 != 0 {
        return Err(Error::param("K", format!("K = {k} is incompatible with A0 = {a0}")));
    }
    let (g, _) = model.cal_g_occ(n0, rest / model.k0 as i64)?;
    if g.is_negative() {
        return Err(Error::NegativeRadicand { context: "G function", value: g.approx() });
    }
    Ok(g.approx())
}

/// Tridiagonal data of the interaction Hamiltonian on one sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiOperator {
    pub diag: Vec<f64>,
    pub offdiag_mag: Vec<f64>,
    pub offdiag_phase: Vec<f64>,
}

impl JacobiOperator {
    pub fn level(&self) -> usize {
        self.diag.len() - 1
    }

    pub fn offdiag(&self, n: usize) -> Complex64 {
        Complex64::from_polar(self.offdiag_mag[n], self.offdiag_phase[n])
    }

    /// Dense Hermitian matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.diag.len();
        let mut h = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(self.diag[i], 0.0)
            } else {
                Complex64::zero()
            }
        });
        for n in 0..d - 1 {
            let b = self.offdiag(n);
            h[(n, n + 1)] = b;
            h[(n + 1, n)] = b.conj();
        }
        h
    }

    /// Scale used for relative tolerances: a bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let d = self.diag.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let b = self.offdiag_mag.iter().fold(0.0_f64, |m, v| m.max(*v));
        d + 2.0 * b
    }
}

fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

pub fn jacobi_operator(model: &ModelSpec, mu: &SectorIndex) -> Result<JacobiOperator> {
    model.check_sector(mu)?;
    if let Coupling::Tables(t) = &model.coupling {
        let t = &t[&mu.n];
        return Ok(JacobiOperator {
            diag: t.a.clone(),
            offdiag_mag: t.b_mag.clone(),
            offdiag_phase: t.b_phase.iter().map(|&p| wrap_phase(p)).collect(),
        });
    }
    let mut diag = Vec::with_capacity(mu.dim());
    let mut mag = Vec::with_capacity(mu.n);
    let mut phase = Vec::with_capacity(mu.n);
    for n in 0..=mu.n {
        let s = compose_state(*mu, n)?;
        let (n0, n1) = (s.n0 as i64, s.n1 as i64);
        diag.push(model.h(n0, n1)?);
        if n < mu.n {
            let (g, ph) = model.cal_g_occ(n0, n1)?;
            if g.is_negative() {
                return Err(Error::NegativeRadicand { context: "G function", value: g.approx() });
            }
            mag.push(g.approx().sqrt());
            phase.push(wrap_phase(ph));
        }
    }
    Ok(JacobiOperator { diag, offdiag_mag: mag, offdiag_phase: phase })
}

/// Real symmetric form of a Jacobi operator.
#[derive(Debug, Clone, PartialEq)]
pub struct RealJacobi {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    /// `chi_n` with `H = D H_real D^dagger`, `D = diag(exp(i chi_n))`.
    pub chi: Vec<f64>,
}

pub fn gauge_real(j: &JacobiOperator) -> RealJacobi {
    let mut chi = Vec::with_capacity(j.diag.len());
    chi.push(0.0);
    for (n, &phi) in j.offdiag_phase.iter().enumerate() {
        chi.push(wrap_phase(chi[n] - phi));
    }
    RealJacobi { diag: j.diag.clone(), offdiag: j.offdiag_mag.clone(), chi }
}

/// Dense sector matrices of the algebra generators and Hamiltonian parts.
#[derive(Debug, Clone)]
pub struct OperatorMatrices {
    pub a0: DMatrix<Complex64>,
    pub a: DMatrix<Complex64>,
    pub a_dag: DMatrix<Complex64>,
    pub h_int: DMatrix<Complex64>,
    pub h_free: DMatrix<Complex64>,
}

/// Energy of the free Hamiltonian on `|n>_mu`.
pub fn free_energy(model: &ModelSpec, mu: &SectorIndex, n: usize) -> f64 {
    let (k0, k1) = (mu.k0 as f64, mu.k1 as f64);
    model.omega0 * mu.r0 as f64
        + model.omega1 * mu.r1 as f64
        + model.omega1 * k1 * mu.n as f64
        + (model.omega0 * k0 - model.omega1 * k1) * n as f64
}

pub fn operator_matrices(model: &ModelSpec, mu: &SectorIndex) -> Result<OperatorMatrices> {
    let j = jacobi_operator(model, mu)?;
    let d = mu.dim();
    let c = |x: f64| Complex64::new(x, 0.0);
    let a0 = DMatrix::from_fn(d, d, |i, k| {
        if i == k {
            c(mu.r0 as f64 / mu.k0 as f64 + i as f64)
        } else {
            Complex64::zero()
        }
    });
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = j.offdiag(n - 1);
    }
    let a_dag = a.adjoint();
    let h_diag = DMatrix::from_fn(d, d, |i, k| if i == k { c(j.diag[i]) } else { Complex64::zero() });
    let h_int = h_diag + &a + &a_dag;
    let h_free = DMatrix::from_fn(d, d, |i, k| {
        if i == k {
            c(free_energy(model, mu, i))
        } else {
            Complex64::zero()
        }
    });
    Ok(OperatorMatrices { a0, a, a_dag, h_int, h_free })
}

/// Largest violation on `mu` of `[A0, A] = -A`, `A^* A = G(A0 - 1, K)` and
/// `A A^* = G(A0, K)`, relative to the largest `G` on the sector (the
/// commutator relative to its square root).
pub fn algebra_residual(model: &ModelSpec, mu: &SectorIndex) -> Result<f64> {
    let ops = operator_matrices(model, mu)?;
    let d = mu.dim();
    let k = mu.charge();
    let g_at = |n: i64| cal_g(model, Ratio::new(mu.r0 as i64 + mu.k0 as i64 * n, mu.k0 as i64), k);
    let mut lower = Vec::with_capacity(d);
    let mut upper = Vec::with_capacity(d);
    for n in 0..d as i64 {
        lower.push(g_at(n - 1)?);
        upper.push(g_at(n)?);
    }
    let max_abs = |m: &DMatrix<Complex64>| m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let diag = |v: &[f64]| DMatrix::from_fn(d, d, |i, j| if i == j { Complex64::new(v[i], 0.0) } else { Complex64::zero() });
    let scale = upper.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let commutator = &ops.a0 * &ops.a - &ops.a * &ops.a0 + &ops.a;
    let r1 = max_abs(&commutator) / scale.sqrt();
    let r2 = max_abs(&(&ops.a_dag * &ops.a - diag(&lower))) / scale;
    let r3 = max_abs(&(&ops.a * &ops.a_dag - diag(&upper))) / scale;
    Ok(r1.max(r2).max(r3))
}
