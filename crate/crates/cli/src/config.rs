//! Config-file merging and the value grammar shared by flags and files.

use crate::args::Options;
use crate::CliError;
use klsum_core::decomp::BandSpec;
use klsum_core::verify::ARule;
use std::collections::BTreeMap;
use std::path::Path;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn value_text(key: &str, v: &toml::Value) -> Result<String, CliError> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(x) => x.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(items) => items
            .iter()
            .map(|x| value_text(key, x))
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        _ => return Err(config_err(format!("config key `{key}` has an unsupported value type"))),
    })
}

pub fn load_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    table.iter().map(|(k, v)| Ok((k.clone(), value_text(k, v)?))).collect()
}

/// Fills every option left unset on the command line from the config file.
pub fn merge(mut opts: Options) -> Result<Options, CliError> {
    let Some(path) = opts.config.clone() else {
        return Ok(opts);
    };
    for (key, value) in load_file(&path)? {
        let slot = match key.as_str() {
            "f" => &mut opts.f,
            "n" | "N" => &mut opts.n,
            "q" => &mut opts.q,
            "a" => &mut opts.a,
            "b" => &mut opts.b,
            "bands" => &mut opts.bands,
            "r" => &mut opts.r,
            "eps" => &mut opts.eps,
            "c" | "C" => &mut opts.c,
            "seed" => &mut opts.seed,
            "configs" => &mut opts.configs,
            "workers" => &mut opts.workers,
            "format" => &mut opts.format,
            "out" => {
                if opts.out.is_none() {
                    opts.out = Some(value.into());
                }
                continue;
            }
            other => return Err(config_err(format!("unknown config key `{other}`"))),
        };
        if slot.is_none() {
            *slot = Some(value);
        }
    }
    Ok(opts)
}

/// Integers, also as `1e7` or `10^7`.
pub fn parse_u64(s: &str) -> Result<u64, CliError> {
    let t = s.trim().replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let bad = || config_err(format!("expected a non-negative integer, got `{s}`"));
    if let Some((base, exp)) = t.split_once('^') {
        let base: u64 = base.parse().map_err(|_| bad())?;
        let exp: u32 = exp.parse().map_err(|_| bad())?;
        return base.checked_pow(exp).ok_or_else(bad);
    }
    if t.contains(['e', 'E']) {
        let x: f64 = t.parse().map_err(|_| bad())?;
        if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 {
            return Ok(x as u64);
        }
    }
    Err(bad())
}

pub fn parse_i64(s: &str) -> Result<i64, CliError> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix('-') {
        let v = parse_u64(rest)?;
        return i64::try_from(v).map(|v| -v).map_err(|_| config_err(format!("`{s}` out of range")));
    }
    i64::try_from(parse_u64(t)?).map_err(|_| config_err(format!("`{s}` out of range")))
}

pub fn parse_f64(s: &str) -> Result<f64, CliError> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| config_err(format!("expected a number, got `{s}`")))?;
    if !x.is_finite() {
        return Err(config_err(format!("expected a finite number, got `{s}`")));
    }
    Ok(x)
}

pub fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    let out: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(item)
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(config_err(format!("empty list `{s}`")));
    }
    Ok(out)
}

pub fn parse_a(s: &str) -> Result<ARule, CliError> {
    match s.trim().strip_prefix("rand:") {
        Some(seed) => Ok(ARule::Random(parse_u64(seed)?)),
        None => Ok(ARule::Fixed(parse_i64(s)?)),
    }
}

pub fn parse_bands(s: &str) -> Result<BandSpec, CliError> {
    if matches!(s.trim(), "default" | "paper") {
        return Ok(BandSpec::Standard);
    }
    Ok(BandSpec::Custom(parse_list(s, parse_u64)?))
}
