use std::collections::BTreeMap;
use std::path::Path;

use convspec_core::{lift_model, Family, Limits, ModelSpec};

use crate::args::{FamilyParams, ModelArgs};
use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))
}

pub fn family_from_flags(name: &str, params: &FamilyParams) -> CliResult<Family> {
    let map: BTreeMap<String, f64> = params.given().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    Ok(Family::from_params(name, &map)?)
}

/// Model from `--model FILE` or `--family` plus parameter flags, with the
/// multiplicity, frequency and environment overrides applied.
pub fn build_model(args: &ModelArgs) -> CliResult<ModelSpec> {
    let mut model = match (&args.model, &args.family) {
        (Some(path), _) => {
            if !args.params.given().is_empty() {
                return Err(CliError::Usage("family parameter flags cannot be combined with --model".into()));
            }
            serde_json::from_str::<ModelSpec>(&read_text(path)?)
                .map_err(|source| CliError::Json { path: path.display().to_string(), source })?
        }
        (None, Some(name)) => ModelSpec::family(family_from_flags(name, &args.params)?)?,
        (None, None) => return Err(CliError::Usage("one of --family or --model is required".into())),
    };
    if args.omega0.is_some() || args.omega1.is_some() {
        let (o0, o1) = (args.omega0.unwrap_or(model.omega0), args.omega1.unwrap_or(model.omega1));
        if !o0.is_finite() || !o1.is_finite() {
            return Err(CliError::Usage("--omega0/--omega1 must be finite".into()));
        }
        model = model.with_frequencies(o0, o1);
    }
    let (k0, k1) = (args.k0.unwrap_or(model.k0), args.k1.unwrap_or(model.k1));
    if (k0, k1) != (model.k0, model.k1) {
        if (model.k0, model.k1) != (1, 1) {
            return Err(CliError::Usage(format!(
                "--k0/--k1 can only lift a model with k0 = k1 = 1; the model has ({}, {})",
                model.k0, model.k1
            )));
        }
        model = lift_model(model, k0, k1)?;
    }
    Ok(model.with_limits(Limits::from_env()?))
}
