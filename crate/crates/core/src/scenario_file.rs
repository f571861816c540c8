//! Flat `key = value` scenario files.
//!
//! ```text
//! # catalysed eight-state, symmetric sweep
//! figure = fig7
//! eps = 0.0015
//! variants = eight, eight_zpc
//! ```
//!
//! Keys mirror the fields of [`SweepSpec`] and [`ProtocolConfig`]. The
//! `figure` key selects the preset that every other key overrides.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::channel::{RatioDistance, SymmetricDistance};
use crate::error::{Error, Result};
use crate::scenarios::{FigureId, SweepSpec, Variant};
use crate::zpc::ZpcSetting;

/// Figure used when a file does not name one.
pub const DEFAULT_FIGURE: FigureId = FigureId::Fig4;

const KEYS: &[&str] = &[
    "figure",
    "scheme",
    "zpc_t",
    "variance_v",
    "beta",
    "eps",
    "eps_a",
    "eps_b",
    "l_ac",
    "l_bc",
    "loss_mu",
    "variants",
    "distance_lo",
    "distance_hi",
    "distance_steps",
    "variance_lo",
    "variance_hi",
    "variance_steps",
    "beta_lo",
    "beta_hi",
    "beta_steps",
    "modulation_lo",
    "modulation_hi",
    "modulation_steps",
    "distances",
    "eps_list",
    "d_list",
    "fig9_variance",
    "t_lo",
    "t_hi",
    "t_steps",
    "v_lo",
    "v_hi",
    "v_steps",
    "refine_iters",
    "symmetric_distance",
    "ratio_distance",
];

struct Entry {
    line: usize,
    value: String,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn scalar<T: FromStr>(e: &Entry, key: &str) -> Result<T> {
    e.value
        .parse()
        .map_err(|_| parse_err(e.line, format!("`{key}`: cannot parse `{}`", e.value)))
}

fn list<T: FromStr>(e: &Entry, key: &str) -> Result<Vec<T>> {
    if e.value.is_empty() {
        return Ok(Vec::new());
    }
    e.value
        .split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|_| parse_err(e.line, format!("`{key}`: cannot parse list item `{}`", item.trim())))
        })
        .collect()
}

fn zpc_setting(e: &Entry) -> Result<ZpcSetting> {
    if e.value.eq_ignore_ascii_case("off") {
        return Ok(ZpcSetting::OFF);
    }
    let t: f64 = scalar(e, "zpc_t")?;
    ZpcSetting::on(t).map_err(|err| parse_err(e.line, err.to_string()))
}

fn symmetric_distance(e: &Entry) -> Result<SymmetricDistance> {
    match e.value.as_str() {
        "total" => Ok(SymmetricDistance::Total),
        "per_arm" => Ok(SymmetricDistance::PerArm),
        other => Err(parse_err(e.line, format!("`symmetric_distance` must be total or per_arm, got `{other}`"))),
    }
}

fn ratio_distance(e: &Entry) -> Result<RatioDistance> {
    match e.value.as_str() {
        "total" => Ok(RatioDistance::Total),
        "difference" => Ok(RatioDistance::Difference),
        other => Err(parse_err(e.line, format!("`ratio_distance` must be total or difference, got `{other}`"))),
    }
}

/// Parses scenario text into a fully resolved, validated spec.
pub fn parse_scenario(text: &str) -> Result<SweepSpec> {
    parse_scenario_for(text, DEFAULT_FIGURE)
}

/// As [`parse_scenario`], with `figure` as the preset when the text names none.
pub fn parse_scenario_for(text: &str, default_figure: FigureId) -> Result<SweepSpec> {
    let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let key = KEYS
            .iter()
            .copied()
            .find(|k| *k == key)
            .ok_or_else(|| parse_err(line, format!("unknown key `{key}`")))?;
        let entry = Entry {
            line,
            value: value.trim().to_string(),
        };
        if let Some(prev) = entries.insert(key, entry) {
            return Err(parse_err(line, format!("duplicate key `{key}` (first set on line {})", prev.line)));
        }
    }
    if let Some(eps) = entries.get("eps") {
        if entries.contains_key("eps_a") || entries.contains_key("eps_b") {
            return Err(parse_err(eps.line, "`eps` conflicts with `eps_a`/`eps_b`"));
        }
    }

    let figure = match entries.get("figure") {
        Some(e) => e.value.parse().map_err(|m: String| parse_err(e.line, m))?,
        None => default_figure,
    };
    let mut spec = SweepSpec::preset(figure);
    for (key, e) in &entries {
        let s = &mut spec;
        match *key {
            "figure" => {}
            "scheme" => s.base.scheme = e.value.parse().map_err(|m: String| parse_err(e.line, m))?,
            "zpc_t" => s.base.zpc = zpc_setting(e)?,
            "variance_v" => s.base.variance_v = scalar(e, key)?,
            "beta" => s.base.beta = scalar(e, key)?,
            "eps" => {
                let eps = scalar(e, key)?;
                s.base.eps_a = eps;
                s.base.eps_b = eps;
            }
            "eps_a" => s.base.eps_a = scalar(e, key)?,
            "eps_b" => s.base.eps_b = scalar(e, key)?,
            "l_ac" => s.base.geometry.l_ac = scalar(e, key)?,
            "l_bc" => s.base.geometry.l_bc = scalar(e, key)?,
            "loss_mu" => s.base.geometry.loss_mu = scalar(e, key)?,
            "variants" => s.variants = list::<Variant>(e, key)?,
            "distance_lo" => s.distance_axis.lo = scalar(e, key)?,
            "distance_hi" => s.distance_axis.hi = scalar(e, key)?,
            "distance_steps" => s.distance_axis.steps = scalar(e, key)?,
            "variance_lo" => s.variance_axis.lo = scalar(e, key)?,
            "variance_hi" => s.variance_axis.hi = scalar(e, key)?,
            "variance_steps" => s.variance_axis.steps = scalar(e, key)?,
            "beta_lo" => s.beta_axis.lo = scalar(e, key)?,
            "beta_hi" => s.beta_axis.hi = scalar(e, key)?,
            "beta_steps" => s.beta_axis.steps = scalar(e, key)?,
            "modulation_lo" => s.modulation_axis.lo = scalar(e, key)?,
            "modulation_hi" => s.modulation_axis.hi = scalar(e, key)?,
            "modulation_steps" => s.modulation_axis.steps = scalar(e, key)?,
            "distances" => s.distances = list(e, key)?,
            "eps_list" => s.eps_list = list(e, key)?,
            "d_list" => s.d_list = list(e, key)?,
            "fig9_variance" => s.fig9_variance = scalar(e, key)?,
            "t_lo" => s.grid.t_lo = scalar(e, key)?,
            "t_hi" => s.grid.t_hi = scalar(e, key)?,
            "t_steps" => s.grid.t_steps = scalar(e, key)?,
            "v_lo" => s.grid.v_lo = scalar(e, key)?,
            "v_hi" => s.grid.v_hi = scalar(e, key)?,
            "v_steps" => s.grid.v_steps = scalar(e, key)?,
            "refine_iters" => s.grid.refine_iters = scalar(e, key)?,
            "symmetric_distance" => s.symmetric_distance = symmetric_distance(e)?,
            "ratio_distance" => s.ratio_distance = ratio_distance(e)?,
            _ => unreachable!("key list and match arms disagree"),
        }
    }
    spec.validate()?;
    Ok(spec)
}

pub fn load_scenario_file(path: impl AsRef<Path>) -> Result<SweepSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_scenario(&text)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

/// Writes every key of `spec`, so that parsing the result gives `spec` back.
pub fn serialize_scenario(spec: &SweepSpec) -> String {
    let b = &spec.base;
    let g = &spec.grid;
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("figure", spec.figure.to_string());
    put("scheme", b.scheme.to_string());
    put(
        "zpc_t",
        if b.zpc.enabled {
            b.zpc.transmittance_t.to_string()
        } else {
            "off".into()
        },
    );
    put("variance_v", b.variance_v.to_string());
    put("beta", b.beta.to_string());
    put("eps_a", b.eps_a.to_string());
    put("eps_b", b.eps_b.to_string());
    put("l_ac", b.geometry.l_ac.to_string());
    put("l_bc", b.geometry.l_bc.to_string());
    put("loss_mu", b.geometry.loss_mu.to_string());
    put("variants", join(&spec.variants));
    for (name, axis) in [
        ("distance", &spec.distance_axis),
        ("variance", &spec.variance_axis),
        ("beta", &spec.beta_axis),
        ("modulation", &spec.modulation_axis),
    ] {
        put(&format!("{name}_lo"), axis.lo.to_string());
        put(&format!("{name}_hi"), axis.hi.to_string());
        put(&format!("{name}_steps"), axis.steps.to_string());
    }
    put("distances", join(&spec.distances));
    put("eps_list", join(&spec.eps_list));
    put("d_list", join(&spec.d_list));
    put("fig9_variance", spec.fig9_variance.to_string());
    put("t_lo", g.t_lo.to_string());
    put("t_hi", g.t_hi.to_string());
    put("t_steps", g.t_steps.to_string());
    put("v_lo", g.v_lo.to_string());
    put("v_hi", g.v_hi.to_string());
    put("v_steps", g.v_steps.to_string());
    put("refine_iters", g.refine_iters.to_string());
    put(
        "symmetric_distance",
        match spec.symmetric_distance {
            SymmetricDistance::Total => "total",
            SymmetricDistance::PerArm => "per_arm",
        }
        .into(),
    );
    put(
        "ratio_distance",
        match spec.ratio_distance {
            RatioDistance::Total => "total",
            RatioDistance::Difference => "difference",
        }
        .into(),
    );
    out
}
