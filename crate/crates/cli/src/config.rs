//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use nonlocal_core::channels::{ChannelKind, PauliChannel};
use nonlocal_core::family::StateFamily;
use nonlocal_core::qstate::GraphSpec;

use crate::output::Format;
use crate::Failure;

#[derive(Args, Debug, Clone, Default)]
pub struct RunOverrides {
    /// JSON file with any of the options below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// ghz, w or graph.
    #[arg(long)]
    pub family: Option<String>,
    /// Graph file (`n N` then `e i j` lines, 1-based) for the graph family.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Channel name (dephasing-z, dephasing-x, depolarizing) or a JSON object
    /// such as {"alpha": [1, 0, 0]} or {"epsilon": 0.1}.
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long)]
    pub p_min: Option<f64>,
    #[arg(long)]
    pub p_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Qubits kept for the CHSH test, 1-based, e.g. `2,3`.
    #[arg(long)]
    pub pair: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Inequality file for `optimize`.
    #[arg(long)]
    pub inequality: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<String>,
    graph: Option<PathBuf>,
    n: Option<usize>,
    channel: Option<serde_json::Value>,
    p_min: Option<f64>,
    p_max: Option<f64>,
    steps: Option<usize>,
    pair: Option<(usize, usize)>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    format: Option<String>,
    inequality: Option<PathBuf>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct ChannelSpec {
    kind: Option<String>,
    #[serde(default)]
    p: f64,
    alpha: Option<[f64; 3]>,
    epsilon: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: StateFamily,
    /// Direction weights; the strength is set per grid point.
    pub channel: PauliChannel,
    pub p_min: f64,
    pub p_max: f64,
    pub steps: usize,
    /// 0-based.
    pub pair: Option<(usize, usize)>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub inequality: Option<PathBuf>,
}

fn config_err(m: impl Into<String>) -> Failure {
    Failure::Config(m.into())
}

fn parse_channel_spec(spec: ChannelSpec) -> Result<PauliChannel, Failure> {
    let ch = match (spec.kind.as_deref(), spec.alpha, spec.epsilon) {
        (None | Some("custom"), Some(alpha), None) => PauliChannel::new(spec.p, alpha)?,
        (None, None, Some(eps)) => PauliChannel::approx_transversal(spec.p, eps)?,
        (Some(kind), None, None) => named_channel(kind, spec.p)?,
        _ => {
            return Err(config_err(
                "channel needs exactly one of \"kind\", \"alpha\" or \"epsilon\"",
            ))
        }
    };
    Ok(ch)
}

fn named_channel(kind: &str, p: f64) -> Result<PauliChannel, Failure> {
    let k = ChannelKind::from_label(kind)
        .filter(|k| *k != ChannelKind::Custom)
        .ok_or_else(|| {
            config_err(format!(
                "unknown channel '{kind}' (expected dephasing-z, dephasing-x, depolarizing or a JSON object)"
            ))
        })?;
    Ok(PauliChannel::new(p, k.alpha().expect("named kind"))?)
}

pub fn parse_channel(text: &str) -> Result<PauliChannel, Failure> {
    let t = text.trim();
    if t.starts_with('{') {
        let spec: ChannelSpec =
            serde_json::from_str(t).map_err(|e| config_err(format!("invalid channel JSON: {e}")))?;
        parse_channel_spec(spec)
    } else {
        named_channel(t, 0.0)
    }
}

fn channel_from_value(v: serde_json::Value) -> Result<PauliChannel, Failure> {
    match v {
        serde_json::Value::String(s) => parse_channel(&s),
        other => {
            let spec: ChannelSpec = serde_json::from_value(other)
                .map_err(|e| config_err(format!("invalid channel in config: {e}")))?;
            parse_channel_spec(spec)
        }
    }
}

/// `i,j`, 1-based, to a 0-based pair.
pub fn parse_pair(text: &str) -> Result<(usize, usize), Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let nums: Vec<usize> = parts
        .iter()
        .map(|s| s.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| config_err(format!("invalid pair '{text}', expected i,j")))?;
    match nums[..] {
        [i, j] if i >= 1 && j >= 1 => Ok((i - 1, j - 1)),
        _ => Err(config_err(format!("invalid pair '{text}', expected two 1-based indices"))),
    }
}

fn load_graph(path: &Path) -> Result<GraphSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read graph file {}: {e}", path.display())))?;
    GraphSpec::parse(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(o: &RunOverrides) -> Result<Self, Failure> {
        let file = match &o.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| config_err(format!("invalid config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let family_name = o.family.clone().or(file.family).unwrap_or_else(|| "ghz".into());
        let n = o.n.or(file.n);
        let graph = o.graph.clone().or(file.graph);
        let family = match family_name.as_str() {
            "ghz" => StateFamily::ghz(n.unwrap_or(3))?,
            "w" => StateFamily::w(n.unwrap_or(3))?,
            "graph" => {
                let path = graph.ok_or_else(|| config_err("the graph family needs --graph <file>"))?;
                let g = load_graph(&path)?;
                if let Some(n) = n {
                    if n != g.n_vertices() {
                        return Err(config_err(format!(
                            "--n {n} disagrees with the {} vertices of {}",
                            g.n_vertices(),
                            path.display()
                        )));
                    }
                }
                StateFamily::graph(g)?
            }
            other => return Err(config_err(format!("unknown family '{other}' (expected ghz, w or graph)"))),
        };
        let channel = match (&o.channel, file.channel) {
            (Some(text), _) => parse_channel(text)?,
            (None, Some(v)) => channel_from_value(v)?,
            (None, None) => PauliChannel::dephasing_z(0.0)?,
        };
        let p_min = o.p_min.or(file.p_min).unwrap_or(0.0);
        let p_max = o.p_max.or(file.p_max).unwrap_or(1.0);
        if !(0.0..=1.0).contains(&p_min) || !(0.0..=1.0).contains(&p_max) || p_min > p_max {
            return Err(config_err(format!("need 0 <= p-min <= p-max <= 1, got {p_min}, {p_max}")));
        }
        let steps = o.steps.or(file.steps).unwrap_or(101);
        if steps < 2 {
            return Err(config_err("--steps must be at least 2"));
        }
        let pair = match (&o.pair, file.pair) {
            (Some(text), _) => Some(parse_pair(text)?),
            (None, Some((i, j))) if i >= 1 && j >= 1 => Some((i - 1, j - 1)),
            (None, Some(_)) => return Err(config_err("pair indices are 1-based")),
            (None, None) => None,
        };
        if let Some(pair) = pair {
            family.conditioning_for_pair(pair)?;
        }
        let format = match o.format.clone().or(file.format).as_deref() {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(config_err(format!("unknown format '{other}' (expected csv or json)"))),
        };
        Ok(Self {
            family,
            channel,
            p_min,
            p_max,
            steps,
            pair,
            seed: o.seed.or(file.seed).unwrap_or(0),
            output: o.output.clone().or(file.output),
            format,
            inequality: o.inequality.clone().or(file.inequality),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channels() {
        assert_eq!(parse_channel("dephasing-x").unwrap().alpha(), [1.0, 0.0, 0.0]);
        assert_eq!(parse_channel(r#"{"p": 0.3, "alpha": [1, 0, 0]}"#).unwrap().p(), 0.3);
        assert_eq!(
            parse_channel(r#"{"kind": "dephasing-z", "p": 0.3}"#).unwrap().alpha(),
            [0.0, 0.0, 1.0]
        );
        assert_eq!(parse_channel(r#"{"epsilon": 0.2}"#).unwrap().alpha(), [0.8, 0.1, 0.1]);
        for bad in ["custom", "bitflip", "{\"p\": 0.1}", "{\"kind\": \"dephasing-z\", \"alpha\": [1,0,0]}", "{"] {
            assert!(parse_channel(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("2,3").unwrap(), (1, 2));
        assert!(parse_pair("0,1").is_err());
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("a,b").is_err());
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(&RunOverrides::default()).unwrap();
        assert_eq!(cfg.family, StateFamily::ghz(3).unwrap());
        assert_eq!(cfg.steps, 101);
        assert_eq!((cfg.p_min, cfg.p_max), (0.0, 1.0));
        let bad = RunOverrides {
            steps: Some(1),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&bad).is_err());
    }
}
