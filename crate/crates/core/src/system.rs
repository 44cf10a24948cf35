//! Flat `key = value` system files.
//!
//! ```text
//! # magnetic field in the plane
//! dim = 2
//! coords = x, y
//! eps = "x'' + y'", "y'' - x'"
//! chart.shear = "x, y + x^3" | "x, y - x^3"
//! ```
//!
//! Optional keys: `params`, `degree`, `seed`, `trials`, `tol`,
//! `numeric_fallback`.

use std::str::FromStr;

use crate::forms::PointTransform;
use crate::jet::JetSpace;
use crate::numeric::SamplePlan;
use crate::symbolic::{IntegrationMode, Rational};
use crate::variational::SourceForm;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub name: String,
    pub forward: String,
    pub inverse: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SystemFile {
    pub dim: usize,
    pub coords: Vec<String>,
    pub params: Vec<String>,
    pub eps: Vec<String>,
    pub charts: Vec<Chart>,
    pub degree: Option<Rational>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub tol: Option<f64>,
    pub numeric_fallback: bool,
}

fn invalid(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Validation(format!("line {line}: {msg}"))
}

/// Split on commas (or `sep`) outside double quotes.
fn split_outside_quotes(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut quoted = false;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            c if c == sep && !quoted => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

fn unquote(s: &str, line: usize) -> Result<String> {
    s.strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .filter(|r| !r.contains('"'))
        .map(str::to_string)
        .ok_or_else(|| invalid(line, format!("expected a quoted expression, found `{s}`")))
}

fn number<T: FromStr>(v: &str, line: usize, key: &str) -> Result<T> {
    v.parse().map_err(|_| invalid(line, format!("bad value for `{key}`: `{v}`")))
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<SystemFile> {
        let mut out = SystemFile::default();
        let mut dim = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| invalid(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "dim" => dim = Some(number::<usize>(value, line, key)?),
                "coords" => out.coords = split_outside_quotes(value, ',').into_iter().map(String::from).collect(),
                "params" => out.params = split_outside_quotes(value, ',').into_iter().map(String::from).collect(),
                "eps" => {
                    out.eps = split_outside_quotes(value, ',').into_iter().map(|s| unquote(s, line)).collect::<Result<_>>()?
                }
                "degree" => out.degree = Some(number::<Rational>(value, line, key)?),
                "seed" => out.seed = Some(number(value, line, key)?),
                "trials" => out.trials = Some(number(value, line, key)?),
                "tol" => out.tol = Some(number(value, line, key)?),
                "numeric_fallback" => out.numeric_fallback = number(value, line, key)?,
                _ => match key.strip_prefix("chart.") {
                    Some(name) if !name.is_empty() => {
                        let parts = split_outside_quotes(value, '|');
                        let [fwd, inv] = parts.as_slice() else {
                            return Err(invalid(line, "a chart needs `\"forward\" | \"inverse\"`"));
                        };
                        out.charts.push(Chart {
                            name: name.to_string(),
                            forward: unquote(fwd, line)?,
                            inverse: unquote(inv, line)?,
                        });
                    }
                    _ => return Err(invalid(line, format!("unknown key `{key}`"))),
                },
            }
        }
        out.dim = dim.ok_or_else(|| Error::Validation("missing `dim`".into()))?;
        if out.coords.is_empty() {
            out.coords = (1..=out.dim).map(|i| format!("x{i}")).collect();
        }
        if out.coords.len() != out.dim {
            return Err(Error::Validation(format!("`coords` lists {} names for dim = {}", out.coords.len(), out.dim)));
        }
        if out.eps.len() != out.dim {
            return Err(Error::Validation(format!("`eps` lists {} expressions for dim = {}", out.eps.len(), out.dim)));
        }
        Ok(out)
    }

    pub fn read(path: &std::path::Path) -> Result<SystemFile> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
        SystemFile::parse(&text)
    }

    pub fn space(&self) -> Result<JetSpace> {
        JetSpace::new(self.coords.clone(), 2)?.with_params(self.params.clone())
    }

    pub fn source_form(&self) -> Result<SourceForm> {
        let space = self.space()?;
        let eps = self.eps.iter().map(|e| space.parse(e)).collect::<Result<Vec<_>>>()?;
        SourceForm::with_plan(&space, eps, &self.plan())
    }

    /// Sampling plan from the file, before command-line overrides.
    pub fn plan(&self) -> SamplePlan {
        let mut plan = SamplePlan::default();
        if let Some(seed) = self.seed {
            plan.seed = seed;
        }
        if let Some(trials) = self.trials {
            plan.trials = trials;
        }
        if let Some(tol) = self.tol {
            plan.tol = tol;
        }
        plan
    }

    pub fn integration_mode(&self) -> IntegrationMode {
        if self.numeric_fallback {
            IntegrationMode::NumericFallback
        } else {
            IntegrationMode::Exact
        }
    }

    /// Parse a declared chart pair into a validated point transformation.
    pub fn transform(&self, chart: &Chart) -> Result<PointTransform> {
        let space = self.space()?;
        let parse_list = |s: &str| -> Result<Vec<_>> {
            let parts = split_outside_quotes(s, ',');
            if parts.len() != self.dim {
                return Err(Error::Validation(format!("chart `{}` needs {} components", chart.name, self.dim)));
            }
            parts.into_iter().map(|p| space.parse(p)).collect()
        };
        PointTransform::new(parse_list(&chart.forward)?, parse_list(&chart.inverse)?)
    }
}
