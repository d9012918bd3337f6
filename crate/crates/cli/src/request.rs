//! Command-line and config-file parsing into a validated request.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use tautchern_core::combin::{stable_bipartitions, Bipartition, MarkedSpace};
use tautchern_core::jacobian::{phi_from_json, phi_to_json, OneNodePolarisation};
use tautchern_core::ucurve::DivisorSpec;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ChernChar,
    ChernClasses,
    BnClass,
    DrcDivisor,
    ValidatePhi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Theorem,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// One `a_{h,S}` entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AEntry {
    pub h: u32,
    #[serde(rename = "S")]
    pub s: Vec<String>,
    pub value: i64,
}

/// Request fields as they appear in a config file and in the echo of a
/// result document. Every field is optional; flags override the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RequestConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markings: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<BTreeMap<String, i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<AEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smax: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expand: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<String>,
}

impl RequestConfig {
    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: RequestConfig) -> RequestConfig {
        RequestConfig {
            command: over.command.or(self.command),
            g: over.g.or(self.g),
            markings: over.markings.or(self.markings),
            ell: over.ell.or(self.ell),
            d: over.d.or(self.d),
            a: over.a.or(self.a),
            phi: if over.phi_file.is_some() { None } else { over.phi.or(self.phi) },
            phi_file: over.phi_file.or(self.phi_file),
            r: over.r.or(self.r),
            smax: over.smax.or(self.smax),
            mode: over.mode.or(self.mode),
            format: over.format.or(self.format),
            negate: over.negate.or(self.negate),
            expand: over.expand.or(self.expand),
            i: over.i.or(self.i),
            j: over.j.or(self.j),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tautchern",
    version,
    about = "Chern characters and Brill-Noether classes in the tautological ring of moduli of curves"
)]
pub struct Cli {
    /// What to compute.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON file with request fields; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<u32>,
    /// Comma-separated marking labels; the first label is the anchor.
    #[arg(long, value_delimiter = ',')]
    pub markings: Option<Vec<String>>,
    #[arg(long, allow_negative_numbers = true)]
    pub ell: Option<i64>,
    /// Marking degrees, e.g. `1:2,2:-1`.
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<String>,
    /// Boundary coefficient `h:S=value` with S joined by `+`, e.g. `1:1+2=3`. Repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Vec<String>,
    #[arg(long)]
    pub phi_file: Option<PathBuf>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub smax: Option<u32>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Chern classes of the negated complex.
    #[arg(long)]
    pub negate: bool,
    /// Expand the Brill-Noether class into strata classes.
    #[arg(long)]
    pub expand: bool,
    #[arg(long)]
    pub i: Option<String>,
    #[arg(long)]
    pub j: Option<String>,
}

fn parse_d(text: &str) -> Result<BTreeMap<String, i64>, CliError> {
    let mut out = BTreeMap::new();
    for part in text.split(',').filter(|p| !p.is_empty()) {
        let (label, value) =
            part.split_once(':').ok_or_else(|| CliError::Config(format!("--d entry {part:?} is not label:value")))?;
        let value: i64 =
            value.trim().parse().map_err(|_| CliError::Config(format!("--d value {value:?} is not an integer")))?;
        if out.insert(label.trim().to_string(), value).is_some() {
            return Err(CliError::Config(format!("--d repeats marking {label:?}")));
        }
    }
    Ok(out)
}

fn parse_a(text: &str) -> Result<AEntry, CliError> {
    let bad = || CliError::Config(format!("--a entry {text:?} is not h:S=value"));
    let (h, rest) = text.split_once(':').ok_or_else(bad)?;
    let (set, value) = rest.split_once('=').ok_or_else(bad)?;
    let h: u32 = h.trim().parse().map_err(|_| bad())?;
    let value: i64 =
        value.trim().parse().map_err(|_| CliError::Config(format!("--a value {value:?} is not an integer")))?;
    let s = set.split('+').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
    Ok(AEntry { h, s, value })
}

impl Cli {
    /// The flag values as config fields.
    pub fn to_config(&self) -> Result<RequestConfig, CliError> {
        Ok(RequestConfig {
            command: self.command,
            g: self.g,
            markings: self.markings.clone(),
            ell: self.ell,
            d: self.d.as_deref().map(parse_d).transpose()?,
            a: if self.a.is_empty() {
                None
            } else {
                Some(self.a.iter().map(|a| parse_a(a)).collect::<Result<_, _>>()?)
            },
            phi: None,
            phi_file: self.phi_file.clone(),
            r: self.r,
            smax: self.smax,
            mode: self.mode,
            format: self.format,
            negate: self.negate.then_some(true),
            expand: self.expand.then_some(true),
            i: self.i.clone(),
            j: self.j.clone(),
        })
    }

    /// Config file merged with flags.
    pub fn config(&self) -> Result<RequestConfig, CliError> {
        let flags = self.to_config()?;
        let base = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => RequestConfig::default(),
        };
        Ok(base.merged(flags))
    }
}

/// A fully validated request.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputationRequest {
    pub command: Command,
    pub space: Arc<MarkedSpace>,
    pub divisor: DivisorSpec,
    pub phi: Option<OneNodePolarisation>,
    pub r: u32,
    pub smax: u32,
    pub mode: Mode,
    pub format: Format,
    pub negate: bool,
    pub expand: bool,
    pub i: Option<String>,
    pub j: Option<String>,
}

impl ComputationRequest {
    pub fn from_config(cfg: &RequestConfig) -> Result<Self, CliError> {
        let command = cfg.command.ok_or_else(|| CliError::Config("no command given".into()))?;
        let g = cfg.g.ok_or_else(|| CliError::Config("--g is required".into()))?;
        let markings = cfg.markings.clone().unwrap_or_else(|| vec!["1".to_string()]);
        let space = Arc::new(MarkedSpace::new(g, &markings)?);

        let mut d = vec![0; space.n_markings()];
        for (label, value) in cfg.d.iter().flatten() {
            d[space.marking(label)?.index()] = *value;
        }
        let mut a = BTreeMap::new();
        for entry in cfg.a.iter().flatten() {
            let b = Bipartition::from_labels(&space, entry.h as i64, &entry.s)?;
            if a.insert(b, entry.value).is_some() {
                return Err(CliError::Config(format!("boundary coefficient {} given twice", b.render(&space))));
            }
        }
        let divisor = DivisorSpec::new(&space, cfg.ell.unwrap_or(0), d, a)?;

        let phi = match (&cfg.phi_file, &cfg.phi) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)?;
                let value: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                Some(phi_from_json(&space, &value)?)
            }
            (None, Some(value)) => Some(phi_from_json(&space, value)?),
            (None, None) => None,
        };

        let r = cfg.r.unwrap_or(0);
        let dim = space.dim();
        let smax = match (cfg.smax, command) {
            (Some(s), _) => s,
            (None, Command::BnClass) => {
                let deg = divisor.degree();
                (((r as i64 + 1) * (g as i64 - deg + r as i64)).max(0) as u32).min(dim)
            }
            (None, _) => dim,
        };
        if smax > dim {
            return Err(tautchern_core::Error::DegreeOutOfRange { requested: smax as i64, dim }.into());
        }
        let (i, j) = (cfg.i.clone(), cfg.j.clone());
        match command {
            Command::DrcDivisor => {
                for label in [&i, &j] {
                    let label =
                        label.as_ref().ok_or_else(|| CliError::Config("drc-divisor needs --i and --j".into()))?;
                    space.marking(label)?;
                }
            }
            Command::ValidatePhi if phi.is_none() => {
                return Err(CliError::Config("validate-phi needs --phi-file".into()));
            }
            _ => {}
        }
        Ok(ComputationRequest {
            command,
            space,
            divisor,
            phi,
            r,
            smax,
            mode: cfg.mode.unwrap_or_default(),
            format: cfg.format.unwrap_or_default(),
            negate: cfg.negate.unwrap_or(false),
            expand: cfg.expand.unwrap_or(false),
            i,
            j,
        })
    }

    /// Normalized echo; feeding it back to `from_config` gives the same request.
    pub fn echo(&self) -> RequestConfig {
        let space = &self.space;
        let bips = stable_bipartitions(space);
        RequestConfig {
            command: Some(self.command),
            g: Some(space.genus()),
            markings: Some(space.labels().to_vec()),
            ell: Some(self.divisor.ell),
            d: Some(space.markings().map(|m| (space.label(m).to_string(), self.divisor.d(m))).collect()),
            a: Some(
                bips.iter()
                    .filter(|b| self.divisor.a(b) != 0)
                    .map(|b| AEntry { h: b.h, s: space.set_labels(b.s), value: self.divisor.a(b) })
                    .collect(),
            ),
            phi: self.phi.as_ref().map(phi_to_json),
            phi_file: None,
            r: Some(self.r),
            smax: Some(self.smax),
            mode: Some(self.mode),
            format: Some(self.format),
            negate: Some(self.negate),
            expand: Some(self.expand),
            i: self.i.clone(),
            j: self.j.clone(),
        }
    }
}

/// Parses argv (including the program name) and any config file.
pub fn parse_request<I, T>(argv: I) -> Result<(ComputationRequest, Option<PathBuf>), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = cli.config()?;
    Ok((ComputationRequest::from_config(&cfg)?, cli.out.clone()))
}
