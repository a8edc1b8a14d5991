//! Loading networks, functions and codes from files or bundled instances.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use netcomp::instances::{self, INSTANCE_NAMES};
use netcomp::network::Violation;
use netcomp::{Network, NetworkCode, NetworkDesc, TargetFunction};

use crate::Failure;

#[derive(Args, Clone, Debug, Default)]
pub struct Source {
    /// Network description file.
    #[arg(long, value_name = "FILE")]
    pub network: Option<PathBuf>,
    /// Target function file.
    #[arg(long, value_name = "FILE")]
    pub function: Option<PathBuf>,
    /// Bundled instance (n1, n2, n2-prime, xor-tree, sum-tree, sum-tree-single, parallel-pair).
    #[arg(long, value_name = "NAME", conflicts_with = "network")]
    pub instance: Option<String>,
}

pub struct Loaded {
    pub net: Network,
    pub f: TargetFunction,
    /// The bundled code, when the instance ships one and nothing was replaced.
    pub bundled_code: Option<NetworkCode>,
    pub notes: Vec<String>,
}

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn parse_function(path: &Path) -> Result<TargetFunction, Failure> {
    TargetFunction::parse(&read(path)?).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

pub fn unknown_instance(name: &str) -> Failure {
    Failure::Malformed(format!(
        "unknown instance `{name}`; known: {}",
        INSTANCE_NAMES.join(", ")
    ))
}

impl Source {
    pub fn load(&self) -> Result<Loaded, Failure> {
        let (desc, f, code, origin) = match (&self.instance, &self.network) {
            (Some(name), _) => {
                let b = instances::bundle(name).ok_or_else(|| unknown_instance(name))?;
                match &self.function {
                    Some(path) => (b.network, parse_function(path)?, None, name.clone()),
                    None => (b.network, b.function, b.code, name.clone()),
                }
            }
            (None, Some(path)) => {
                let desc = NetworkDesc::parse(&read(path)?)
                    .map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
                let Some(fpath) = &self.function else {
                    return Err(Failure::Malformed("--function is required with --network".into()));
                };
                (desc, parse_function(fpath)?, None, path.display().to_string())
            }
            (None, None) => {
                return Err(Failure::Malformed(
                    "give --instance NAME or --network FILE --function FILE".into(),
                ))
            }
        };
        let (desc, notes) = repair(desc, &origin)?;
        let net = Network::new(desc).map_err(|e| Failure::Malformed(format!("{origin}: {e}")))?;
        if f.arity() != net.source_count() {
            return Err(Failure::Malformed(format!(
                "{origin}: network has {} sources but the function has arity {}",
                net.source_count(),
                f.arity()
            )));
        }
        let bundled_code = if notes.is_empty() { code } else { None };
        Ok(Loaded {
            net,
            f,
            bundled_code,
            notes,
        })
    }
}

/// Rejects invalid networks, except that sources with incoming edges are
/// split off and reported in a note.
fn repair(desc: NetworkDesc, origin: &str) -> Result<(NetworkDesc, Vec<String>), Failure> {
    let report = desc.validate();
    if report.is_valid() {
        return Ok((desc, Vec::new()));
    }
    let mut split: Vec<&str> = Vec::new();
    for v in &report.violations {
        match v {
            Violation::SourceWithIncomingEdge { source, .. } => {
                if !split.contains(&source.as_str()) {
                    split.push(source);
                }
            }
            _ => return Err(Failure::Malformed(format!("{origin}: invalid network\n{report}"))),
        }
    }
    let note = format!(
        "sources {{{}}} have incoming edges; analysing the split network, where each such node `j` becomes `j'` and a fresh source `j` feeds it through the infinite bundle `j~j'`",
        split.join(",")
    );
    let fixed = desc.split_sources();
    let check = fixed.validate();
    if !check.is_valid() {
        return Err(Failure::Malformed(format!("{origin}: invalid network after splitting\n{check}")));
    }
    Ok((fixed, vec![note]))
}

pub fn load_code(path: &Path, net: &Network, f: &TargetFunction) -> Result<NetworkCode, Failure> {
    NetworkCode::parse(&read(path)?, net, f)
        .map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}
