//! Job descriptions: which construction to run and with what inputs.

use std::collections::BTreeMap;
use std::path::PathBuf;

use isospec::expr::{parse_rational_expr, parse_trig, QSqrt2, VarSet};
use isospec::iso3d_first::{build_axial, build_screw, build_translational};
use isospec::iso3d_second::{build_family, FamilyParams};
use isospec::pair::{PairFile, PairKind};
use isospec::spectra::BoxFrame;
use isospec::susy1d::{build_order1, build_order2};
use isospec::Error;
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub kind: PairKind,
    /// Exact constants as `p/q` texts.
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
    #[serde(default)]
    pub expressions: BTreeMap<String, String>,
    #[serde(default)]
    pub numeric: Option<NumericConfig>,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericConfig {
    #[serde(rename = "box")]
    pub box_text: String,
    #[serde(default)]
    pub frame: BoxFrame,
    pub n: Vec<usize>,
    pub k: usize,
    pub match_tol: f64,
    #[serde(default)]
    pub relative: bool,
    #[serde(default)]
    pub stencil_order: Option<u8>,
    #[serde(default)]
    pub margin: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub pair: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

const FAMILY_KEYS: [&str; 12] = ["c", "d1", "d2", "h1", "h2", "q1", "q2", "s1", "s2", "m2", "alpha0", "gamma0"];

/// `(parameters, expressions)` each kind accepts. Expressions are required.
fn keys(kind: PairKind) -> (&'static [&'static str], &'static [&'static str]) {
    match kind {
        PairKind::Order1 => (&["c"], &["w"]),
        PairKind::Order2 => (&["c", "d"], &["v"]),
        PairKind::Translational => (&["c"], &["w", "V_yz"]),
        PairKind::Axial => (&[], &["w", "V_rhoz"]),
        PairKind::Screw => (&["b_z"], &["V"]),
        PairKind::Family => (&FAMILY_KEYS, &[]),
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidRequest(msg)
}

impl JobConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let (params, exprs) = keys(self.kind);
        for k in self.parameters.keys() {
            if !params.contains(&k.as_str()) {
                return Err(invalid(format!("{} takes no parameter '{}' (allowed: {})", self.kind.name(), k, params.join(", "))));
            }
        }
        for k in self.expressions.keys() {
            if !exprs.contains(&k.as_str()) {
                return Err(invalid(format!("{} takes no expression '{}' (allowed: {})", self.kind.name(), k, exprs.join(", "))));
            }
        }
        for k in exprs {
            if !self.expressions.contains_key(*k) {
                return Err(invalid(format!("{} needs the expression '{}'", self.kind.name(), k)));
            }
        }
        if self.kind == PairKind::Screw && !self.parameters.contains_key("b_z") {
            return Err(invalid("3d-screw needs the parameter 'b_z'".into()));
        }
        Ok(())
    }

    fn param(&self, key: &str, default: i64) -> Result<QSqrt2, Error> {
        match self.parameters.get(key) {
            None => Ok(QSqrt2::from(default)),
            Some(text) => text.parse().map_err(|_| invalid(format!("parameter '{}' is not an exact constant: '{}'", key, text))),
        }
    }

    fn expr(&self, key: &str) -> &str {
        &self.expressions[key]
    }

    /// Runs the construction and packages the result as a pair file.
    pub fn construct(&self) -> Result<PairFile, Error> {
        self.validate()?;
        Ok(match self.kind {
            PairKind::Order1 => PairFile::from_1d(&build_order1(&parse_rational_expr(self.expr("w"), VarSet::Line)?, &self.param("c", 0)?)?),
            PairKind::Order2 => PairFile::from_1d(&build_order2(
                &parse_rational_expr(self.expr("v"), VarSet::Line)?,
                &self.param("c", 0)?,
                &self.param("d", 0)?,
            )?),
            PairKind::Translational => PairFile::from_translational(&build_translational(
                &parse_rational_expr(self.expr("w"), VarSet::Space)?,
                &parse_rational_expr(self.expr("V_yz"), VarSet::Space)?,
                &self.param("c", 0)?,
            )?),
            PairKind::Axial => PairFile::from_axial(&build_axial(
                &parse_trig(self.expr("w"))?,
                &parse_rational_expr(self.expr("V_rhoz"), VarSet::Cylinder)?,
            )?),
            PairKind::Screw => PairFile::from_screw(&build_screw(&self.param("b_z", 0)?, &parse_trig(self.expr("V"))?)?),
            PairKind::Family => {
                let p = FamilyParams {
                    c: self.param("c", 1)?,
                    d1: self.param("d1", 0)?,
                    d2: self.param("d2", 0)?,
                    h1: self.param("h1", 0)?,
                    h2: self.param("h2", 0)?,
                    q1: self.param("q1", 0)?,
                    q2: self.param("q2", 0)?,
                    s1: self.param("s1", 0)?,
                    s2: self.param("s2", 0)?,
                    m2: self.param("m2", 0)?,
                    alpha0: self.param("alpha0", 0)?,
                    gamma0: self.param("gamma0", 0)?,
                };
                PairFile::from_family(&build_family(&p)?)
            }
        })
    }
}

/// Reads a flat JSON object of constants. Integers and strings are
/// accepted; floating-point numbers are not exact and are refused.
pub fn read_params(text: &str) -> Result<BTreeMap<String, String>, Error> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| invalid(format!("malformed parameter file: {}", e)))?;
    let obj = value.as_object().ok_or_else(|| invalid("parameter file must hold a JSON object".into()))?;
    obj.iter()
        .map(|(k, v)| {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) if n.is_i64() => n.to_string(),
                _ => return Err(invalid(format!("parameter '{}' must be an integer or a \"p/q\" string", k))),
            };
            Ok((k.clone(), text))
        })
        .collect()
}
