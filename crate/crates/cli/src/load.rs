use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use serde::de::DeserializeOwned;
use serde::Serialize;

use qmn::{DimensionVector, FramedQuiver, NetSpec, NeuralNetwork, Quiver, QuiverSpec, RepSpec, Representation};

use crate::error::{CliError, CliResult};

/// `--quiver`, `--rep` and `--dims`, shared by the representation verbs.
#[derive(Debug, Clone, Args)]
pub struct RepInput {
    /// Quiver file; may be omitted when the representation embeds one.
    #[arg(long)]
    pub quiver: Option<PathBuf>,
    /// Representation file.
    #[arg(long)]
    pub rep: Option<PathBuf>,
    /// Dimension overrides, e.g. `v1=2,v2=1`; unlisted vertices keep 1.
    #[arg(long)]
    pub dims: Option<String>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    fs::write(path, s).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

pub fn load_quiver(path: &Path) -> CliResult<Arc<Quiver>> {
    let spec: QuiverSpec = read_json(path)?;
    Ok(Arc::new(Quiver::from_spec(&spec)?))
}

fn pick_quiver(flag: Option<&PathBuf>, embedded: Option<&QuiverSpec>) -> CliResult<Arc<Quiver>> {
    match (flag, embedded) {
        (Some(p), _) => load_quiver(p),
        (None, Some(qs)) => Ok(Arc::new(Quiver::from_spec(qs)?)),
        (None, None) => Err(CliError::Usage("--quiver is required when the file does not embed a quiver".into())),
    }
}

pub fn parse_dims(s: &str) -> CliResult<BTreeMap<String, usize>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("dimension `{p}` is not of the form vertex=n")))?;
            let n = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("dimension `{p}` is not a non-negative integer")))?;
            Ok((k.trim().to_string(), n))
        })
        .collect()
}

pub fn parse_vector(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("`{p}` is not a number")))
        })
        .collect()
}

impl RepInput {
    pub fn rep(&self) -> CliResult<Representation> {
        let path = self.rep.as_ref().ok_or_else(|| CliError::Usage("--rep is required".into()))?;
        load_rep(path, self.quiver.as_ref())
    }

    /// The framed quiver, from `--rep` when given and otherwise from
    /// `--quiver` with `--dims` (thin by default).
    pub fn frame(&self) -> CliResult<Arc<FramedQuiver>> {
        if self.rep.is_some() {
            let rep = self.rep()?;
            let mut dims = rep.dims().clone();
            if let Some(d) = &self.dims {
                for (k, n) in parse_dims(d)? {
                    dims.0[rep.quiver().vertex(&k)?.0] = n;
                }
            }
            return Ok(Arc::new(FramedQuiver::new(rep.quiver().clone(), dims)?));
        }
        let q = pick_quiver(self.quiver.as_ref(), None)?;
        let map = match &self.dims {
            Some(d) => parse_dims(d)?,
            None => BTreeMap::new(),
        };
        let dims = DimensionVector::from_map(&q, &map, 1)?;
        Ok(Arc::new(FramedQuiver::new(q, dims)?))
    }
}

pub fn load_rep(path: &Path, quiver: Option<&PathBuf>) -> CliResult<Representation> {
    let spec: RepSpec = read_json(path)?;
    let q = pick_quiver(quiver, spec.quiver.as_ref())?;
    Ok(Representation::from_spec(q, &spec)?)
}

pub fn load_net(path: &Path, quiver: Option<&PathBuf>) -> CliResult<NeuralNetwork> {
    let spec: NetSpec = read_json(path)?;
    let q = match quiver {
        Some(p) => Some(load_quiver(p)?),
        None => None,
    };
    if q.is_none() && spec.quiver_spec().is_none() {
        return Err(CliError::Usage("--quiver is required when the network file does not embed a quiver".into()));
    }
    Ok(NeuralNetwork::from_spec(&spec, q)?)
}
