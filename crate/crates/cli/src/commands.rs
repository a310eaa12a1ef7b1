use std::path::{Path, PathBuf};

use convspec_core::{
    bracket, jacobi_operator, spectral_decomposition, Coupling, Evolver, ModelSpec, SectorIndex, SectoredObservable,
    SectoredState,
};

use crate::args::{Format, OptionalSectorArgs, OutputArgs, SectorArgs};
use crate::error::{CliError, CliResult};
use crate::model::read_text;
use crate::output::{emit, Cell, Table};

fn closed_spectrum(model: &ModelSpec, n: usize) -> CliResult<Option<Vec<f64>>> {
    let Some(f) = model.family_descriptor() else {
        return Ok(None);
    };
    let mut e = (0..=n).map(|l| f.spectrum(l, n)).collect::<Result<Vec<_>, _>>()?;
    e.sort_by(f64::total_cmp);
    Ok(Some(e))
}

pub fn spectrum(model: &ModelSpec, sector: &SectorArgs, output: &OutputArgs) -> CliResult<()> {
    let mu = model.sector(sector.r0, sector.r1, sector.n)?;
    let s = spectral_decomposition(model, &mu)?;
    let closed = closed_spectrum(model, mu.n)?;
    let mut table = Table::new(["l", "E_numeric", "E_closed_form", "abs_diff"]);
    for (l, &e) in s.eigenvalues.iter().enumerate() {
        let c = closed.as_ref().map_or(f64::NAN, |c| c[l]);
        table.push(vec![l.into(), e.into(), c.into(), (e - c).abs().into()]);
    }
    emit(&table, output)
}

/// `P_n(E_l)` in the model's own gauge; real and imaginary parts are split
/// only when some coupling carries a phase.
pub fn eigvec(model: &ModelSpec, sector: &SectorArgs, output: &OutputArgs) -> CliResult<()> {
    let mu = model.sector(sector.r0, sector.r1, sector.n)?;
    let s = spectral_decomposition(model, &mu)?;
    let d = s.dim();
    let complex = s.gauge.iter().any(|&chi| chi != 0.0);
    let mut columns = vec!["n".to_string()];
    for l in 0..d {
        if complex {
            columns.push(format!("l{l}_re"));
            columns.push(format!("l{l}_im"));
        } else {
            columns.push(format!("l{l}"));
        }
    }
    let mut table = Table::new(columns);
    for n in 0..d {
        let mut row = vec![Cell::from(n)];
        for l in 0..d {
            let p = s.coeff(n, l);
            if complex {
                row.push(p.re.into());
                row.push(p.im.into());
            } else {
                row.push(s.coeffs[(n, l)].into());
            }
        }
        table.push(row);
    }
    emit(&table, output)
}

/// Closed-form weights for catalog and lifted models (raw, or rescaled to
/// unit sum), numerical weights for tabulated models.
pub fn weights(model: &ModelSpec, sector: &SectorArgs, normalized: bool, output: &OutputArgs) -> CliResult<()> {
    let mu = model.sector(sector.r0, sector.r1, sector.n)?;
    let w = match model.family_descriptor() {
        Some(f) if normalized => f.weights_normalized(mu.n),
        Some(f) => (0..=mu.n).map(|l| f.weight(l, mu.n)).collect::<Result<Vec<_>, _>>()?,
        None => spectral_decomposition(model, &mu)?.weights,
    };
    let mut table = Table::new(["l", "w"]);
    for (l, w) in w.into_iter().enumerate() {
        table.push(vec![l.into(), w.into()]);
    }
    emit(&table, output)
}

pub struct EvolveRequest<'a> {
    pub sector: &'a OptionalSectorArgs,
    pub t_max: f64,
    pub dt: f64,
    pub state: Option<&'a Path>,
    pub observable: Option<&'a Path>,
    pub gnuplot: Option<&'a PathBuf>,
}

fn sample_times(t_max: f64, dt: f64) -> CliResult<Vec<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(CliError::Usage(format!("--dt must be positive, got {dt}")));
    }
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(CliError::Usage(format!("--t-max must be finite and nonnegative, got {t_max}")));
    }
    let steps = (t_max / dt * (1.0 + 1e-12)).floor();
    if steps > 1e7 {
        return Err(CliError::Usage(format!("--t-max/--dt gives {steps} samples, more than 10^7")));
    }
    Ok((0..=steps as usize).map(|k| k as f64 * dt).collect())
}

pub fn evolve(model: &ModelSpec, req: &EvolveRequest, output: &OutputArgs) -> CliResult<()> {
    let times = sample_times(req.t_max, req.dt)?;
    if req.gnuplot.is_some() && (output.out.is_none() || output.format != Format::Csv) {
        return Err(CliError::Usage("--gnuplot needs --out with --format csv".into()));
    }
    let psi = match req.state {
        Some(path) => SectoredState::from_json(&read_text(path)?, model.k0, model.k1)?,
        None => {
            let n = req
                .sector
                .n
                .ok_or_else(|| CliError::Usage("--N is required when no --state file is given".into()))?;
            SectoredState::basis(model.sector(req.sector.r0, req.sector.r1, n)?, 0)?
        }
    };
    for mu in psi.blocks.keys() {
        model.check_sector(mu)?;
    }
    let sectors: Vec<SectorIndex> = psi.blocks.keys().copied().collect();
    let x = match req.observable {
        Some(path) => SectoredObservable::from_json(&read_text(path)?, model.k0, model.k1)?,
        None => SectoredObservable::mode_number(&sectors, 0),
    };
    x.check_hermitian()?;
    let mut ev = Evolver::new(model);
    let mut table = Table::new(["t", "re", "im", "norm"]);
    for t in times {
        let psi_t = ev.evolve(&psi, t)?;
        let v = bracket(&psi_t, &x);
        table.push(vec![t.into(), v.re.into(), v.im.into(), psi_t.norm_sqr().sqrt().into()]);
    }
    emit(&table, output)?;
    if let (Some(script), Some(data)) = (req.gnuplot, &output.out) {
        let text = format!(
            "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\nplot '{}' using 1:2 with lines, '' using 1:4 with lines\n",
            data.display()
        );
        std::fs::write(script, text).map_err(|e| CliError::io(script.display(), e))?;
    }
    Ok(())
}

pub fn lift(model: &ModelSpec, n: Option<usize>, n_max: Option<usize>, output: &OutputArgs) -> CliResult<()> {
    let levels: Vec<usize> = match (n, n_max) {
        (Some(n), _) => vec![n],
        (None, Some(m)) => (0..=m).collect(),
        (None, None) => return Err(CliError::Usage("one of --N or --N-max is required".into())),
    };
    if let Coupling::Tables(t) = &model.coupling {
        if n.is_none() {
            return Err(CliError::Usage(format!(
                "tabulated models need --N (tables exist for N in {:?})",
                t.keys().collect::<Vec<_>>()
            )));
        }
    }
    let mut table = Table::new(["r0", "r1", "N", "n", "a", "b_mag", "b_phase"]);
    for level in levels {
        for mu in SectorIndex::all_at_level(model.k0, model.k1, level) {
            model.check_sector(&mu)?;
            let j = jacobi_operator(model, &mu)?;
            for (k, &a) in j.diag.iter().enumerate() {
                let (mag, phase) = match (j.offdiag_mag.get(k), j.offdiag_phase.get(k)) {
                    (Some(&m), Some(&p)) => (Cell::from(m), Cell::from(p)),
                    _ => (Cell::Empty, Cell::Empty),
                };
                table.push(vec![mu.r0.into(), mu.r1.into(), mu.n.into(), k.into(), a.into(), mag, phase]);
            }
        }
    }
    emit(&table, output)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grid_includes_end_point() {
        let t = sample_times(1.0, 0.1).unwrap();
        assert_eq!(t.len(), 11);
        assert_eq!(t[3], 3.0 * 0.1);
        assert_eq!(sample_times(0.0, 0.5).unwrap(), vec![0.0]);
        assert!(sample_times(1.0, 0.0).is_err());
        assert!(sample_times(-1.0, 0.1).is_err());
    }
}
