//! Run configuration: the sampling flags, their config-file mirror, and the
//! merge rule (flags win over file values).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use cmvsim::ensembles::{EnsembleSpec, Family, OrthoCase, ReflectionLaw};

/// Output format of sampling commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Config-file mirror of the sampling flags. Unknown keys are rejected.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub ensemble: Option<String>,
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub truncated: Option<bool>,
    pub coupling_r: Option<f64>,
    pub coupling_law: Option<String>,
    pub ortho_case: Option<String>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let is_json = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("json"))
            .unwrap_or(false);
        if is_json {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        } else {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        }
    }
}

/// Fully resolved sampling run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: EnsembleSpec,
    pub reps: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn parse_family(tag: &str) -> anyhow::Result<Family> {
    Ok(match tag {
        "cue" => Family::Cue,
        "coe" => Family::Coe,
        "cse" => Family::Cse,
        "circular-beta" => Family::CircularBeta,
        "o" => Family::O,
        "so" => Family::So,
        "o-minus-so" => Family::OMinusSo,
        "orthogonal-beta" => Family::OrthogonalBeta,
        "usp" => Family::USp,
        other => bail!(
            "unknown ensemble family '{other}' (expected cue, coe, cse, circular-beta, o, so, \
             o-minus-so, orthogonal-beta or usp)"
        ),
    })
}

fn parse_ortho_case(tag: &str) -> anyhow::Result<OrthoCase> {
    Ok(match tag {
        "even-plus" => OrthoCase::EvenPlus,
        "even-minus" => OrthoCase::EvenMinus,
        "odd-plus" => OrthoCase::OddPlus,
        "odd-minus" => OrthoCase::OddMinus,
        other => bail!("unknown ortho case '{other}'"),
    })
}

/// Merge CLI flags over an optional config file and build the ensemble spec.
/// `ensemble` accepts the family tag, optionally prefixed by `trunc-` or
/// `coupled-` (e.g. `trunc-cue`), which sets the corresponding mode.
#[allow(clippy::too_many_arguments)]
pub fn resolve(
    file: Option<FileConfig>,
    ensemble: Option<String>,
    n: Option<usize>,
    beta: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    truncated: bool,
    coupling_r: Option<f64>,
    coupling_law: Option<String>,
    ortho_case: Option<String>,
    reps: Option<usize>,
    seed: Option<u64>,
    format: Option<Format>,
    out: Option<PathBuf>,
) -> anyhow::Result<RunConfig> {
    let file = file.unwrap_or_default();
    let ensemble = ensemble
        .or(file.ensemble)
        .context("missing --ensemble (or 'ensemble' in the config file)")?;
    let mut tag = ensemble.as_str();
    let mut truncated = truncated || file.truncated.unwrap_or(false);
    let mut coupled_prefix = false;
    if let Some(rest) = tag.strip_prefix("trunc-") {
        truncated = true;
        tag = rest;
    } else if let Some(rest) = tag.strip_prefix("coupled-") {
        coupled_prefix = true;
        tag = rest;
    }
    let family = parse_family(tag)?;

    let n = n.or(file.n).context("missing --n")?;
    let mut spec = EnsembleSpec::new(family, n);
    spec.truncated = truncated;
    spec.beta = beta.or(file.beta);
    spec.a = a.or(file.a);
    spec.b = b.or(file.b);
    if let Some(case) = ortho_case.or(file.ortho_case) {
        spec.ortho_case = Some(parse_ortho_case(&case)?);
    }

    let coupling_r = coupling_r.or(file.coupling_r);
    let coupling_law = coupling_law.or(file.coupling_law);
    let r_law = match (coupling_r, coupling_law.as_deref()) {
        (Some(r), None) | (Some(r), Some("constant")) => Some(ReflectionLaw::Constant(r)),
        (None, Some("ideal-circular")) => Some(ReflectionLaw::IdealCircular),
        (None, Some("ideal-orthogonal")) => Some(ReflectionLaw::IdealOrthogonal),
        (None, None) => None,
        (Some(_), Some(law)) => bail!("--coupling-r conflicts with --coupling-law {law}"),
        (None, Some(other)) => bail!("unknown coupling law '{other}'"),
    };
    if coupled_prefix && r_law.is_none() {
        bail!("'coupled-' ensembles need --coupling-r or --coupling-law");
    }
    if let Some(law) = r_law {
        spec.coupling = Some(cmvsim::ensembles::CouplingSpec { r_law: law });
    }

    spec.validate()
        .map_err(|e| anyhow::anyhow!("invalid ensemble spec: {e}"))?;

    let seed = seed
        .or(file.seed)
        .context("missing --seed: sampling runs must be seeded")?;

    Ok(RunConfig {
        spec,
        reps: reps.or(file.reps).unwrap_or(1),
        seed,
        format: format.or(file.format).unwrap_or(Format::Csv),
        out: out.or(file.out),
    })
}
