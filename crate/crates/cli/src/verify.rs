//! The invariant suite behind `convspec verify`.
//!
//! Every (family, parameter point, N) triple is an independent unit of work;
//! units run in parallel and the resulting rows are sorted before output so
//! the report does not depend on scheduling.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use convspec_core::polynomials::{recurrence_exact, FAMILY_NAMES};
use convspec_core::{
    algebra_residual, decompose_jacobi, jacobi_operator, lift_model, propagator, verify_dual_orthogonality,
    verify_orthonormality, Family, Limits, ModelSpec, SectorIndex, SpectralData,
};

use crate::args::FamilyParams;
use crate::error::{CliError, CliResult};
use crate::model::family_from_flags;
use crate::output::{format_float, Cell, Table};

/// Levels up to which the costlier checks run.
const RECURRENCE_MAX_N: usize = 12;
const DYNAMICS_MAX_N: usize = 10;
/// Multiplicities of the lifted model compared against each catalog model.
const LIFT: (usize, usize) = (2, 3);
/// Relative size of the coupling corruption used by `--inject-fault`.
const FAULT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Spectrum,
    Orthonormality,
    DualOrthogonality,
    WeightSum,
    WeightsClosedForm,
    ClosedFormRecurrence,
    HahnChebyshev,
    OperatorAlgebra,
    LiftedAlgebra,
    LiftedCoefficients,
    LiftedSpectrum,
    Unitarity,
    GroupLaw,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Spectrum => "spectrum",
            Check::Orthonormality => "orthonormality",
            Check::DualOrthogonality => "dual_orthogonality",
            Check::WeightSum => "weight_sum",
            Check::WeightsClosedForm => "weights_closed_form",
            Check::ClosedFormRecurrence => "closed_form_recurrence",
            Check::HahnChebyshev => "hahn_chebyshev",
            Check::OperatorAlgebra => "operator_algebra",
            Check::LiftedAlgebra => "lifted_algebra",
            Check::LiftedCoefficients => "lifted_coefficients",
            Check::LiftedSpectrum => "lifted_spectrum",
            Check::Unitarity => "unitarity",
            Check::GroupLaw => "group_law",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Check::Spectrum | Check::ClosedFormRecurrence | Check::LiftedSpectrum | Check::GroupLaw => 1e-9,
            Check::Orthonormality
            | Check::DualOrthogonality
            | Check::WeightSum
            | Check::WeightsClosedForm
            | Check::HahnChebyshev
            | Check::Unitarity => 1e-10,
            Check::OperatorAlgebra | Check::LiftedAlgebra | Check::LiftedCoefficients => 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub family: Family,
    pub n: usize,
    pub check: Check,
    /// NaN when the check could not be evaluated.
    pub residual: f64,
    pub tol: f64,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.residual <= self.tol
    }

    /// Residual in units of the tolerance; failures to evaluate rank worst.
    fn severity(&self) -> f64 {
        if self.residual.is_nan() {
            f64::INFINITY
        } else {
            self.residual / self.tol
        }
    }
}

pub fn params_label(f: &Family) -> String {
    let p = f.params();
    if p.is_empty() {
        return "-".into();
    }
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub points: Vec<Family>,
    pub n_max: usize,
    pub tol: Option<f64>,
    pub inject_fault: bool,
    pub limits: Limits,
}

/// Grid for `--family`: every family's sample grid for `all`, the given
/// point when parameters are supplied, else the family's sample grid.
pub fn select_points(family: &str, params: &FamilyParams) -> CliResult<Vec<Family>> {
    let given = !params.given().is_empty();
    if family == "all" {
        if given {
            return Err(CliError::Usage("parameter flags cannot be combined with --family all".into()));
        }
        return Ok(FAMILY_NAMES.iter().flat_map(|n| Family::sample_grid(n).unwrap_or_default()).collect());
    }
    if given {
        return Ok(vec![family_from_flags(family, params)?]);
    }
    Family::sample_grid(family).ok_or_else(|| {
        CliError::Usage(format!("unknown family `{family}`; expected `all` or one of {}", FAMILY_NAMES.join(", ")))
    })
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

struct Unit {
    family: Family,
    model: ModelSpec,
    n: usize,
    inject_fault: bool,
}

impl Unit {
    fn spectral(&self, model: &ModelSpec, mu: &SectorIndex) -> convspec_core::Result<SpectralData> {
        let mut j = jacobi_operator(model, mu)?;
        if self.inject_fault {
            if let Some(b) = j.offdiag_mag.first_mut() {
                *b *= 1.0 + FAULT;
            }
        }
        decompose_jacobi(&j)
    }

    fn closed_spectrum(&self) -> convspec_core::Result<Vec<f64>> {
        let mut e = (0..=self.n).map(|l| self.family.spectrum(l, self.n)).collect::<Result<Vec<_>, _>>()?;
        e.sort_by(f64::total_cmp);
        Ok(e)
    }

    fn spectrum_residual(&self, s: &SpectralData) -> convspec_core::Result<f64> {
        let closed = self.closed_spectrum()?;
        Ok(s.eigenvalues.iter().zip(&closed).map(|(e, c)| (e - c).abs() / c.abs().max(1.0)).fold(0.0, f64::max))
    }

    fn weights_residual(&self, s: &SpectralData) -> convspec_core::Result<f64> {
        let w = self.family.weights_normalized(self.n);
        let mut closed = (0..=self.n)
            .map(|l| Ok((self.family.spectrum(l, self.n)?, w[l])))
            .collect::<convspec_core::Result<Vec<_>>>()?;
        closed.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(s.weights.iter().zip(&closed).map(|(x, (_, c))| (x - c).abs()).fold(0.0, f64::max))
    }

    /// Closed-form table against the recurrence run in exact arithmetic at the
    /// exact eigenvalues, normwise per eigenvalue, up to the sign `(-1)^n`.
    fn recurrence_residual(&self) -> convspec_core::Result<f64> {
        let f = self.family;
        let table = f.polynomial_table(self.n)?;
        let (diag, off_sq) = f.jacobi_coefficients_exact(self.n)?;
        let mut worst = 0.0_f64;
        for l in 0..=self.n {
            let rec = recurrence_exact(&diag, &off_sq, &f.spectrum_exact(l, self.n))?;
            let norm = rec.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for (n, r) in rec.iter().enumerate() {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                worst = worst.max((table[n][l] - sign * r).abs() / norm);
            }
        }
        Ok(worst)
    }

    fn hahn_chebyshev_residual(&self) -> convspec_core::Result<f64> {
        let (h, c) = (self.family, Family::Chebyshev);
        let mut worst = 0.0_f64;
        for l in 0..=self.n {
            worst = worst.max((h.spectrum(l, self.n)? - c.spectrum(l, self.n)?).abs());
            worst = worst.max((h.weight_normalized(l, self.n)? - c.weight_normalized(l, self.n)?).abs());
        }
        let (a, b) = (h.polynomial_table(self.n)?, c.polynomial_table(self.n)?);
        for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
            worst = worst.max((x - y).abs() / y.abs().max(1.0));
        }
        Ok(worst)
    }

    fn unitarity(s: &SpectralData) -> f64 {
        let d = s.dim();
        [0.1, 1.0, 10.0]
            .iter()
            .map(|&t| {
                let u = propagator(s, t);
                max_abs(&(&u * u.adjoint() - DMatrix::<Complex64>::identity(d, d)))
            })
            .fold(0.0, f64::max)
    }

    fn group_law(s: &SpectralData) -> f64 {
        [(0.3, 1.9), (4.0, -1.5), (7.25, 2.75)]
            .iter()
            .map(|&(t1, t2)| max_abs(&(propagator(s, t1) * propagator(s, t2) - propagator(s, t1 + t2))))
            .fold(0.0, f64::max)
    }

    /// Largest relative difference between the Jacobi coefficients of each
    /// lifted sector and the inner model, and between their spectra and the
    /// closed form.
    fn lifted_residuals(&self, lifted: &ModelSpec) -> convspec_core::Result<(f64, f64)> {
        let inner = jacobi_operator(&self.model, &SectorIndex::simple(self.n))?;
        let closed = self.closed_spectrum()?;
        let (mut coeff, mut spec) = (0.0_f64, 0.0_f64);
        for mu in SectorIndex::all_at_level(lifted.k0, lifted.k1, self.n) {
            let got = jacobi_operator(lifted, &mu)?;
            let pairs = got.diag.iter().zip(&inner.diag).chain(got.offdiag_mag.iter().zip(&inner.offdiag_mag));
            for (x, y) in pairs {
                coeff = coeff.max((x - y).abs() / y.abs().max(1.0));
            }
            let s = self.spectral(lifted, &mu)?;
            for (e, c) in s.eigenvalues.iter().zip(&closed) {
                spec = spec.max((e - c).abs() / c.abs().max(1.0));
            }
        }
        Ok((coeff, spec))
    }

    fn run(&self, tol: Option<f64>) -> Vec<Outcome> {
        let mut out = Vec::new();
        let mut record = |check: Check, r: convspec_core::Result<f64>| {
            let residual = r.unwrap_or(f64::NAN);
            out.push(Outcome {
                family: self.family,
                n: self.n,
                check,
                residual,
                tol: tol.unwrap_or(check.default_tol()),
            });
        };
        let mu = SectorIndex::simple(self.n);
        match self.spectral(&self.model, &mu) {
            Ok(s) => {
                record(Check::Spectrum, self.spectrum_residual(&s));
                record(Check::Orthonormality, Ok(verify_orthonormality(&s)));
                record(Check::DualOrthogonality, Ok(verify_dual_orthogonality(&s)));
                record(Check::WeightSum, Ok((s.weights.iter().sum::<f64>() - 1.0).abs()));
                record(Check::WeightsClosedForm, self.weights_residual(&s));
                if self.n <= DYNAMICS_MAX_N {
                    record(Check::Unitarity, Ok(Self::unitarity(&s)));
                    record(Check::GroupLaw, Ok(Self::group_law(&s)));
                }
            }
            Err(e) => {
                for check in [Check::Spectrum, Check::Orthonormality, Check::DualOrthogonality, Check::WeightSum] {
                    record(check, Err(e.clone()));
                }
            }
        }
        if self.n <= RECURRENCE_MAX_N {
            record(Check::ClosedFormRecurrence, self.recurrence_residual());
        }
        if self.family == (Family::Hahn { alpha: 0.0, beta: 0.0 }) {
            record(Check::HahnChebyshev, self.hahn_chebyshev_residual());
        }
        let lifted = lift_model(self.model.clone(), LIFT.0, LIFT.1);
        if self.n <= DYNAMICS_MAX_N {
            record(Check::OperatorAlgebra, algebra_residual(&self.model, &mu));
            let lifted_algebra = lifted.clone().and_then(|m| {
                SectorIndex::all_at_level(m.k0, m.k1, self.n)
                    .iter()
                    .map(|nu| algebra_residual(&m, nu))
                    .try_fold(0.0_f64, |acc, r| r.map(|r| acc.max(r)))
            });
            record(Check::LiftedAlgebra, lifted_algebra);
        }
        match lifted.and_then(|m| self.lifted_residuals(&m)) {
            Ok((c, s)) => {
                record(Check::LiftedCoefficients, Ok(c));
                record(Check::LiftedSpectrum, Ok(s));
            }
            Err(e) => {
                record(Check::LiftedCoefficients, Err(e.clone()));
                record(Check::LiftedSpectrum, Err(e));
            }
        }
        out
    }
}

/// Runs the suite and returns the outcomes sorted by family, parameters, level and check.
pub fn run_suite(cfg: &VerifyConfig) -> CliResult<Vec<Outcome>> {
    let mut units = Vec::new();
    for &f in &cfg.points {
        let model = ModelSpec::family(f)?.with_limits(cfg.limits);
        model.sector(0, 0, cfg.n_max)?;
        for n in 1..=cfg.n_max {
            units.push(Unit { family: f, model: model.clone(), n, inject_fault: cfg.inject_fault });
        }
    }
    let mut outcomes: Vec<Outcome> = units.par_iter().flat_map_iter(|u| u.run(cfg.tol)).collect();
    let rank = |f: &Family| FAMILY_NAMES.iter().position(|n| *n == f.name()).unwrap_or(usize::MAX);
    outcomes.sort_by(|a, b| {
        rank(&a.family)
            .cmp(&rank(&b.family))
            .then_with(|| params_label(&a.family).cmp(&params_label(&b.family)))
            .then(a.n.cmp(&b.n))
            .then(a.check.cmp(&b.check))
    });
    Ok(outcomes)
}

pub fn report(outcomes: &[Outcome]) -> Table {
    let mut table = Table::new(["family", "params", "N", "check", "residual", "tol", "status"]);
    for o in outcomes {
        table.push(vec![
            o.family.name().into(),
            params_label(&o.family).into(),
            o.n.into(),
            o.check.name().into(),
            Cell::Float(o.residual),
            Cell::Float(o.tol),
            if o.passed() { "pass" } else { "fail" }.into(),
        ]);
    }
    table
}

pub fn worst(outcomes: &[Outcome]) -> Option<&Outcome> {
    outcomes.iter().max_by(|a, b| a.severity().total_cmp(&b.severity()))
}

pub fn describe(o: &Outcome) -> String {
    format!(
        "{} [{}] N={} {}: residual {} (tol {})",
        o.family.name(),
        params_label(&o.family),
        o.n,
        o.check.name(),
        format_float(o.residual),
        format_float(o.tol)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(points: Vec<Family>, n_max: usize, inject_fault: bool) -> VerifyConfig {
        VerifyConfig { points, n_max, tol: None, inject_fault, limits: Limits::default() }
    }

    #[test]
    fn small_grid_passes() {
        let out = run_suite(&config(vec![Family::Krawtchouk { p: 0.3 }], 4, false)).unwrap();
        assert!(out.iter().all(Outcome::passed), "{:?}", worst(&out));
        assert!(out.iter().any(|o| o.check == Check::LiftedSpectrum));
    }

    #[test]
    fn injected_fault_is_caught() {
        let out = run_suite(&config(vec![Family::DualHahn { gamma: 1.0, delta: 0.5 }], 3, true)).unwrap();
        assert!(!worst(&out).unwrap().passed());
        assert!(out.iter().any(|o| o.check == Check::Spectrum && !o.passed()));
    }

    #[test]
    fn outcomes_are_sorted() {
        let pts = vec![Family::Hahn { alpha: 0.0, beta: 0.0 }, Family::Krawtchouk { p: 0.5 }];
        let out = run_suite(&config(pts, 2, false)).unwrap();
        assert_eq!(out[0].family.name(), "krawtchouk");
        assert!(out.iter().any(|o| o.check == Check::HahnChebyshev));
        let hahn = out.iter().position(|o| o.family.name() == "hahn").unwrap();
        assert!(out[hahn..].iter().all(|o| o.family.name() == "hahn"));
        assert!(out.windows(2).all(|w| w[0].family != w[1].family || (w[0].n, w[0].check) < (w[1].n, w[1].check)));
    }

    #[test]
    fn unknown_family() {
        let none = FamilyParams::default();
        assert!(matches!(select_points("legendre", &none), Err(CliError::Usage(_))));
        assert_eq!(select_points("chebyshev", &none).unwrap(), vec![Family::Chebyshev]);
        let p = FamilyParams { p: Some(0.4), ..FamilyParams::default() };
        assert_eq!(select_points("krawtchouk", &p).unwrap(), vec![Family::Krawtchouk { p: 0.4 }]);
        assert!(select_points("all", &p).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let mut cfg = config(vec![Family::Krawtchouk { p: 0.5 }], 5, false);
        cfg.limits.max_n = 4;
        assert_eq!(run_suite(&cfg).unwrap_err().exit_code(), 2);
    }
}
