//! Input documents: JSON objects (inline, or a path to a file) and the
//! equivalent `name:key=value,...` shorthands. Every shorthand is parsed into
//! the same document type as its JSON form before anything is built.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nstar_core::measure::{MeasurableFn, MeasureSpace};
use nstar_core::nstar::{DensityFunction, NStarFunction};
use nstar_core::quadrature::QuadConfig;
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Clone, PartialEq)]
pub struct DocError {
    pub source: String,
    pub message: String,
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.source, self.message)
    }
}

impl std::error::Error for DocError {}

fn err(source: &str, message: impl Into<String>) -> DocError {
    DocError { source: source.to_string(), message: message.into() }
}

/// Either inline JSON, a `name:k=v,...` shorthand, or a path to a JSON file.
enum Raw {
    Json { text: String, origin: String },
    Shorthand { name: String, params: BTreeMap<String, String> },
}

fn classify(input: &str, what: &str) -> Result<Raw, DocError> {
    let trimmed = input.trim();
    if trimmed.starts_with('{') {
        return Ok(Raw::Json { text: trimmed.to_string(), origin: format!("{what} (inline JSON)") });
    }
    let path = Path::new(trimmed);
    if trimmed.ends_with(".json") || (path.is_file() && !trimmed.contains(':')) {
        let text = std::fs::read_to_string(path).map_err(|e| err(&format!("{what} file {trimmed}"), e.to_string()))?;
        return Ok(Raw::Json { text, origin: format!("{what} file {trimmed}") });
    }
    let (name, rest) = trimmed.split_once(':').unwrap_or((trimmed, ""));
    let mut params = BTreeMap::new();
    for (pos, pair) in rest.split(',').filter(|s| !s.is_empty()).enumerate() {
        let (k, v) = match pair.split_once('=') {
            Some(kv) => kv,
            // a bare value is the positional parameter of single-argument forms
            None if pos == 0 => ("", pair),
            None => return Err(err(what, format!("expected key=value, found `{pair}`"))),
        };
        if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(err(what, format!("parameter `{k}` given twice")));
        }
    }
    Ok(Raw::Shorthand { name: name.trim().to_string(), params })
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, DocError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let field = if path == "." { String::new() } else { format!(" at field `{path}`") };
        err(origin, format!("{inner}{field}"))
    })
}

fn number(params: &BTreeMap<String, String>, key: &str, what: &str) -> Result<Value, DocError> {
    let raw = &params[key];
    if let Ok(i) = raw.parse::<i64>() {
        return Ok(Value::from(i));
    }
    let v: f64 = raw.parse().map_err(|_| err(what, format!("parameter `{key}`: `{raw}` is not a number")))?;
    Ok(Value::from(v))
}

fn shorthand_object(
    params: &BTreeMap<String, String>,
    what: &str,
    list_keys: &[&str],
) -> Result<serde_json::Map<String, Value>, DocError> {
    let mut map = serde_json::Map::new();
    for key in params.keys() {
        let value = if list_keys.contains(&key.as_str()) {
            let items = params[key]
                .split('/')
                .map(|s| {
                    s.parse::<f64>()
                        .map(Value::from)
                        .map_err(|_| err(what, format!("parameter `{key}`: `{s}` is not a number")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Value::Array(items)
        } else {
            number(params, key, what)?
        };
        map.insert(key.clone(), value);
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadDoc {
    pub tol: Option<f64>,
    pub mesh_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiDoc {
    pub family: String,
    #[serde(default)]
    pub params: serde_json::Map<String, Value>,
    pub quad: Option<QuadDoc>,
}

impl PhiDoc {
    pub fn parse(input: &str) -> Result<PhiDoc, DocError> {
        match classify(input, "--phi")? {
            Raw::Json { text, origin } => parse_json(&text, &origin),
            Raw::Shorthand { name, params } => {
                if params.contains_key("") {
                    return Err(err("--phi", format!("`{name}` parameters must be key=value")));
                }
                Ok(PhiDoc { family: name, params: shorthand_object(&params, "--phi", &[])?, quad: None })
            }
        }
    }

    fn param(&self, key: &str) -> Result<f64, DocError> {
        let origin = format!("--phi family `{}`", self.family);
        match self.params.get(key) {
            Some(v) => {
                v.as_f64().ok_or_else(|| err(&origin, format!("field `params.{key}`: expected a number, found {v}")))
            }
            None => Err(err(&origin, format!("missing field `params.{key}`"))),
        }
    }

    fn only(&self, allowed: &[&str]) -> Result<(), DocError> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(err(
                &format!("--phi family `{}`", self.family),
                format!("unknown field `params.{k}` (expected one of: {})", allowed.join(", ")),
            )),
            None => Ok(()),
        }
    }

    pub fn build(&self) -> Result<NStarFunction, DocError> {
        let origin = format!("--phi family `{}`", self.family);
        let core = |e: nstar_core::Error| err(&origin, e.to_string());
        match self.family.as_str() {
            "power" => {
                self.only(&["p"])?;
                NStarFunction::power(self.param("p")?).map_err(core)
            }
            "power_scaled" => {
                self.only(&["p"])?;
                NStarFunction::power_scaled(self.param("p")?).map_err(core)
            }
            "alpha_exp" => {
                self.only(&["alpha"])?;
                NStarFunction::alpha_exp(self.param("alpha")?).map_err(core)
            }
            "log_sqrt" => {
                self.only(&[])?;
                Ok(NStarFunction::log_sqrt())
            }
            "tabulated_density" => {
                self.only(&["points"])?;
                let points: Vec<(f64, f64)> = match self.params.get("points") {
                    Some(v) => serde_json::from_value(v.clone())
                        .map_err(|e| err(&origin, format!("field `params.points`: {e}; expected [[t, p], ...]")))?,
                    None => return Err(err(&origin, "missing field `params.points`")),
                };
                let density = DensityFunction::tabulated(&points).map_err(core)?;
                let mut quad = QuadConfig::default();
                if let Some(q) = &self.quad {
                    quad.tol = q.tol.unwrap_or(quad.tol);
                    quad.mesh_ratio = q.mesh_ratio.unwrap_or(quad.mesh_ratio);
                }
                NStarFunction::from_density(density, quad).map_err(core)
            }
            other => Err(err(
                "--phi",
                format!(
                    "unknown family `{other}` (expected power, power_scaled, alpha_exp, log_sqrt, tabulated_density)"
                ),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceDoc {
    Atomic { masses: Vec<f64> },
    Interval { length: f64, cells: usize },
}

/// Flat wire form of [`SpaceDoc`], so field paths survive into errors.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceWire {
    kind: String,
    masses: Option<Vec<f64>>,
    #[serde(rename = "L")]
    length: Option<f64>,
    #[serde(rename = "N")]
    cells: Option<usize>,
}

impl SpaceWire {
    fn into_doc(self, origin: &str) -> Result<SpaceDoc, DocError> {
        match (self.kind.as_str(), self.masses, self.length, self.cells) {
            ("atomic", Some(masses), None, None) => Ok(SpaceDoc::Atomic { masses }),
            ("atomic", None, _, _) => Err(err(origin, "missing field `masses`")),
            ("interval", None, Some(length), Some(cells)) => Ok(SpaceDoc::Interval { length, cells }),
            ("interval", None, None, _) => Err(err(origin, "missing field `L`")),
            ("interval", None, _, None) => Err(err(origin, "missing field `N`")),
            ("atomic", ..) => Err(err(origin, "fields `L` and `N` belong to kind `interval`")),
            ("interval", ..) => Err(err(origin, "field `masses` belongs to kind `atomic`")),
            (other, ..) => {
                Err(err(origin, format!("field `kind`: unknown space `{other}` (expected atomic, interval)")))
            }
        }
    }
}

impl SpaceDoc {
    pub fn parse(input: &str) -> Result<SpaceDoc, DocError> {
        Self::parse_as(input, "--space")
    }

    pub fn parse_as(input: &str, what: &str) -> Result<SpaceDoc, DocError> {
        match classify(input, what)? {
            Raw::Json { text, origin } => parse_json::<SpaceWire>(&text, &origin)?.into_doc(&origin),
            Raw::Shorthand { name, params } => {
                let get = |k: &str| -> Result<f64, DocError> {
                    match params.get(k) {
                        Some(_) => number(&params, k, what).map(|v| v.as_f64().unwrap_or(f64::NAN)),
                        None => Err(err(what, format!("`{name}` needs parameter `{k}`"))),
                    }
                };
                let cells = |v: f64, k: &str| -> Result<usize, DocError> {
                    if v >= 1.0 && v.fract() == 0.0 && v < 1e12 {
                        Ok(v as usize)
                    } else {
                        Err(err(what, format!("parameter `{k}` must be a positive integer, got {v}")))
                    }
                };
                let unknown = |allowed: &[&str]| match params.keys().find(|k| !allowed.contains(&k.as_str())) {
                    Some(k) => Err(err(what, format!("unknown parameter `{k}` for `{name}`"))),
                    None => Ok(()),
                };
                match name.as_str() {
                    "interval" => {
                        unknown(&["L", "N"])?;
                        Ok(SpaceDoc::Interval { length: get("L")?, cells: cells(get("N")?, "N")? })
                    }
                    "atomic" => {
                        unknown(&["masses"])?;
                        let map = shorthand_object(&params, what, &["masses"])?;
                        let masses = map
                            .get("masses")
                            .and_then(|v| v.as_array())
                            .ok_or_else(|| err(what, "`atomic` needs parameter `masses` (slash-separated)"))?
                            .iter()
                            .filter_map(|v| v.as_f64())
                            .collect();
                        Ok(SpaceDoc::Atomic { masses })
                    }
                    // `equal:n` or `equal:n=..,mass=..`: n atoms of equal mass (default 1)
                    "equal" => {
                        unknown(&["", "n", "mass"])?;
                        let count = match (params.contains_key(""), params.contains_key("n")) {
                            (true, false) => get("")?,
                            (false, true) => get("n")?,
                            _ => return Err(err(what, "`equal` needs exactly one atom count")),
                        };
                        let mass = if params.contains_key("mass") { get("mass")? } else { 1.0 };
                        Ok(SpaceDoc::Atomic { masses: vec![mass; cells(count, "n")?] })
                    }
                    other => Err(err(what, format!("unknown space `{other}` (expected interval, atomic, equal)"))),
                }
            }
        }
    }

    pub fn build(&self) -> Result<Arc<MeasureSpace>, DocError> {
        let space = match self {
            SpaceDoc::Atomic { masses } => MeasureSpace::atomic(masses.clone()),
            SpaceDoc::Interval { length, cells } => MeasureSpace::interval(*length, *cells),
        };
        space.map(Arc::new).map_err(|e| err("--space", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum FnDoc {
    Values {
        values: Vec<f64>,
    },
    Generator {
        generator: String,
        #[serde(default)]
        params: serde_json::Map<String, Value>,
    },
}

impl FnDoc {
    pub fn parse(input: &str) -> Result<FnDoc, DocError> {
        Self::parse_as(input, "--fn")
    }

    pub fn parse_as(input: &str, what: &str) -> Result<FnDoc, DocError> {
        match classify(input, what)? {
            Raw::Json { text, origin } => parse_json(&text, &origin),
            Raw::Shorthand { name, params } => {
                if params.contains_key("") {
                    return Err(err(what, format!("`{name}` parameters must be key=value")));
                }
                Ok(FnDoc::Generator { generator: name, params: shorthand_object(&params, what, &[])? })
            }
        }
    }

    pub fn build(&self, space: &Arc<MeasureSpace>, what: &str) -> Result<MeasurableFn, DocError> {
        let core = |e: nstar_core::Error| err(what, e.to_string());
        let (generator, params) = match self {
            FnDoc::Values { values } => return MeasurableFn::new(space, values.clone()).map_err(core),
            FnDoc::Generator { generator, params } => (generator.as_str(), params),
        };
        let origin = format!("{what} generator `{generator}`");
        let allowed: &[&str] = match generator {
            "identity" | "zero" => &[],
            "constant" => &["c"],
            "indicator" => &["a", "b", "c"],
            "random" => &["seed", "low", "high"],
            "power" => &["e", "c"],
            other => {
                return Err(err(
                    what,
                    format!(
                        "unknown generator `{other}` (expected identity, zero, constant, indicator, random, power)"
                    ),
                ))
            }
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(err(&origin, format!("unknown field `params.{k}`")));
        }
        let get = |k: &str, default: Option<f64>| -> Result<f64, DocError> {
            match params.get(k) {
                Some(v) => {
                    v.as_f64().ok_or_else(|| err(&origin, format!("field `params.{k}`: expected a number, found {v}")))
                }
                None => default.ok_or_else(|| err(&origin, format!("missing field `params.{k}`"))),
            }
        };
        match generator {
            "identity" => MeasurableFn::sampled(space, |x| x).map_err(core),
            "zero" => Ok(MeasurableFn::zero(space)),
            "constant" => Ok(MeasurableFn::constant(space, get("c", None)?)),
            "indicator" => {
                let (a, b, c) = (get("a", None)?, get("b", None)?, get("c", Some(1.0))?);
                MeasurableFn::sampled(space, |x| if a <= x && x < b { c } else { 0.0 }).map_err(core)
            }
            "power" => {
                let (e, c) = (get("e", None)?, get("c", Some(1.0))?);
                MeasurableFn::sampled(space, |x| c * x.powf(e)).map_err(core)
            }
            _ => {
                let seed = get("seed", Some(0.0))?;
                if !(seed >= 0.0 && seed.fract() == 0.0 && seed <= u64::MAX as f64) {
                    return Err(err(
                        &origin,
                        format!("field `params.seed`: expected a non-negative integer, found {seed}"),
                    ));
                }
                let (low, high) = (get("low", Some(-1.0))?, get("high", Some(1.0))?);
                if !(low < high) {
                    return Err(err(&origin, format!("need low < high, got [{low}, {high}]")));
                }
                Ok(MeasurableFn::random(space, seed as u64, low, high))
            }
        }
    }
}

/// Settings for the `check` command, as a file or inline JSON.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDoc {
    pub phi: Value,
    pub space: Value,
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Option<ToleranceDoc>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceDoc {
    pub slack: Option<f64>,
}

impl CheckDoc {
    pub fn parse(input: &str) -> Result<CheckDoc, DocError> {
        match classify(input, "--config")? {
            Raw::Json { text, origin } => parse_json(&text, &origin),
            Raw::Shorthand { .. } => Err(err("--config", "expected a JSON object or a path to a .json file")),
        }
    }
}

/// Embedded documents may be given as JSON objects or shorthand strings.
pub fn embedded_text(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Settings for the `demo` commands.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoDoc {
    pub theta: Option<f64>,
    pub iterations: Option<usize>,
    pub epsilon: Option<f64>,
    pub kernel: Option<Value>,
    pub seed: Option<u64>,
}

impl DemoDoc {
    pub fn parse(input: &str) -> Result<DemoDoc, DocError> {
        match classify(input, "--config")? {
            Raw::Json { text, origin } => parse_json(&text, &origin),
            Raw::Shorthand { .. } => Err(err("--config", "expected a JSON object or a path to a .json file")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDoc {
    pub coefficients: Vec<f64>,
}

impl FunctionalDoc {
    pub fn parse(input: &str) -> Result<FunctionalDoc, DocError> {
        match classify(input, "--functional")? {
            Raw::Json { text, origin } => parse_json(&text, &origin),
            Raw::Shorthand { name, params } if name == "coefficients" || params.is_empty() => {
                let list =
                    if params.is_empty() { name.as_str() } else { params.get("").map(|s| s.as_str()).unwrap_or("") };
                let coefficients = list
                    .split('/')
                    .map(|s| s.trim().parse::<f64>().map_err(|_| err("--functional", format!("`{s}` is not a number"))))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(FunctionalDoc { coefficients })
            }
            Raw::Shorthand { .. } => {
                Err(err("--functional", "expected {\"coefficients\": [...]} or coefficients:u1/u2/..."))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_matches_json() {
        let a = PhiDoc::parse("power:p=0.5").unwrap();
        let b = PhiDoc::parse(r#"{"family": "power", "params": {"p": 0.5}}"#).unwrap();
        assert_eq!(a, b);
        let s = SpaceDoc::parse("interval:L=1,N=1000").unwrap();
        assert_eq!(s, SpaceDoc::parse(r#"{"kind": "interval", "L": 1, "N": 1000}"#).unwrap());
        let e = SpaceDoc::parse("equal:3").unwrap();
        assert_eq!(e, SpaceDoc::Atomic { masses: vec![1.0; 3] });
        assert_eq!(SpaceDoc::parse("atomic:masses=0.5/0.25").unwrap(), SpaceDoc::Atomic { masses: vec![0.5, 0.25] });
        let f = FnDoc::parse("indicator:a=0,b=0.5").unwrap();
        assert_eq!(f, FnDoc::parse(r#"{"generator": "indicator", "params": {"a": 0, "b": 0.5}}"#).unwrap());
    }

    #[test]
    fn json_errors_carry_position_and_field() {
        let e = PhiDoc::parse("{\"family\": \"power\",\n \"params\": {\"p\": }}").unwrap_err();
        assert!(e.message.contains("line 2"), "{e}");
        let e = SpaceDoc::parse(r#"{"kind": "interval", "L": "one", "N": 3}"#).unwrap_err();
        assert!(e.message.contains("L"), "{e}");
        let e = PhiDoc::parse(r#"{"family": "power", "params": {"q": 0.5}}"#).unwrap().build().unwrap_err();
        assert!(e.message.contains("params.q"), "{e}");
        let e = PhiDoc::parse("power:p=abc").unwrap_err();
        assert!(e.message.contains("`p`"), "{e}");
    }

    #[test]
    fn builds_every_family() {
        for s in ["power:p=0.25", "power_scaled:p=0.5", "alpha_exp:alpha=2", "log_sqrt"] {
            let phi = PhiDoc::parse(s).unwrap().build().unwrap();
            assert!(phi.eval(1.0) > 0.0);
        }
        let doc = r#"{"family": "tabulated_density", "params": {"points": [[0.01, 5.0], [1, 0.5], [100, 0.05]]}, "quad": {"tol": 1e-9}}"#;
        let phi = PhiDoc::parse(doc).unwrap().build().unwrap();
        assert!((phi.eval(1.0) - 1.0).abs() < 1e-6);
        assert!(PhiDoc::parse("power:p=1.5").unwrap().build().is_err());
        assert!(PhiDoc::parse("cubic").unwrap().build().is_err());
    }

    #[test]
    fn functions_on_spaces() {
        let space = SpaceDoc::parse("interval:L=1,N=4").unwrap().build().unwrap();
        let f = FnDoc::parse("identity").unwrap().build(&space, "--fn").unwrap();
        assert_eq!(f.values(), &[0.125, 0.375, 0.625, 0.875]);
        let f = FnDoc::parse("indicator:a=0,b=0.5,c=2").unwrap().build(&space, "--fn").unwrap();
        assert_eq!(f.values(), &[2.0, 2.0, 0.0, 0.0]);
        let f = FnDoc::parse(r#"{"values": [1, 2, 3, 4]}"#).unwrap().build(&space, "--fn").unwrap();
        assert_eq!(f.values(), &[1.0, 2.0, 3.0, 4.0]);
        assert!(FnDoc::parse(r#"{"values": [1]}"#).unwrap().build(&space, "--fn").is_err());
        assert!(FnDoc::parse("random:seed=-1").unwrap().build(&space, "--fn").is_err());
    }

    #[test]
    fn functional_forms() {
        assert_eq!(FunctionalDoc::parse("coefficients:1/-2/3").unwrap().coefficients, vec![1.0, -2.0, 3.0]);
        assert_eq!(FunctionalDoc::parse(r#"{"coefficients": [0.5]}"#).unwrap().coefficients, vec![0.5]);
    }
}
