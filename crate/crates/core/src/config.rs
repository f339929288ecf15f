//! Run configuration: one JSON object, every field optional.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::holonomy::{TransportOptions, MAX_ORDER};
use crate::schottky::CurveConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Modules,
    Forms,
    Flatness,
    Simplicial,
    Holonomy,
    All,
}

impl Suite {
    pub const SINGLE: [Suite; 6] =
        [Suite::Algebra, Suite::Modules, Suite::Forms, Suite::Flatness, Suite::Simplicial, Suite::Holonomy];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Modules => "modules",
            Suite::Forms => "forms",
            Suite::Flatness => "flatness",
            Suite::Simplicial => "simplicial",
            Suite::Holonomy => "holonomy",
            Suite::All => "all",
        }
    }

    /// The suites this selection expands to, in report order.
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::SINGLE.to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::SINGLE
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub g: usize,
    pub n: usize,
    /// explicit curve; `None` means the built-in default for `g`
    pub curve: Option<CurveConfig>,
    #[serde(rename = "Pmax")]
    pub pmax: usize,
    #[serde(rename = "Qmax")]
    pub qmax: usize,
    /// total degree of the algebra suite quotients
    pub algebra_degree: usize,
    /// top x-degree of the module presentations
    pub module_degree: usize,
    /// word-length cutoff; overrides the curve's own value when set
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub quad_nodes: Option<usize>,
    /// collocation nodes per transport segment
    pub nodes: usize,
    /// transport segments per leg
    pub steps: usize,
    #[serde(rename = "N")]
    pub order: usize,
    pub tol: f64,
    /// multiplies every numeric budget; at most the factor the checks use (10)
    pub safety: f64,
    /// random point tuples for the flatness suite
    pub tuples: usize,
    pub suite: Suite,
    pub out: Option<String>,
    pub seed: u64,
}

pub const MAX_SAFETY: f64 = 10.0;

impl Default for RunConfig {
    fn default() -> Self {
        let t = TransportOptions::default();
        Self {
            g: 1,
            n: 2,
            curve: None,
            pmax: 2,
            qmax: 2,
            algebra_degree: 4,
            module_degree: 3,
            l: None,
            quad_nodes: None,
            nodes: t.nodes,
            steps: t.segments,
            order: 2,
            tol: t.tol,
            safety: MAX_SAFETY,
            tuples: 10,
            suite: Suite::All,
            out: None,
            seed: 1,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (name, v) in [
            ("g", self.g),
            ("n", self.n),
            ("Pmax", self.pmax),
            ("Qmax", self.qmax),
            ("algebra_degree", self.algebra_degree),
            ("module_degree", self.module_degree),
            ("tuples", self.tuples),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.l == Some(0) {
            return bad("L must be positive".into());
        }
        if matches!(self.quad_nodes, Some(q) if q < 2) {
            return bad("quad_nodes must be at least 2".into());
        }
        if self.nodes < 2 || self.steps < 2 {
            return bad("nodes and steps must be at least 2".into());
        }
        if !(1..=MAX_ORDER).contains(&self.order) {
            return bad(format!("N must lie in 1..={MAX_ORDER}"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad("tol must be positive".into());
        }
        if !(self.safety > 0.0 && self.safety <= MAX_SAFETY) {
            return bad(format!("safety must lie in (0, {MAX_SAFETY}]"));
        }
        if self.suite == Suite::Simplicial && self.n < 2 {
            return bad("the simplicial suite needs n >= 2".into());
        }
        if let Some(c) = &self.curve {
            if c.g != self.g {
                return bad(format!("curve has g = {} but the run asks for g = {}", c.g, self.g));
            }
        }
        self.curve()?.group()?;
        Ok(())
    }

    /// The curve with the run's overrides applied.
    pub fn curve(&self) -> Result<CurveConfig> {
        let mut c = match &self.curve {
            Some(c) => c.clone(),
            None => CurveConfig::default_for(self.g)?,
        };
        if let Some(l) = self.l {
            c.l = l;
        }
        if let Some(q) = self.quad_nodes {
            c.quad_nodes = q;
        }
        c.tol = self.tol;
        Ok(c)
    }

    pub fn transport_options(&self) -> TransportOptions {
        TransportOptions { nodes: self.nodes, segments: self.steps, tol: self.tol, ..TransportOptions::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let back = RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(RunConfig::from_json("{}").unwrap(), c);
    }

    #[test]
    fn bad_values_are_rejected() {
        for text in [
            r#"{"Pmax": 0}"#,
            r#"{"N": 4}"#,
            r#"{"safety": 20}"#,
            r#"{"tol": -1}"#,
            r#"{"g": 3}"#,
            r#"{"n": 1, "suite": "simplicial"}"#,
        ] {
            let c = RunConfig::from_json(text).unwrap();
            assert!(c.validate().is_err(), "{text}");
        }
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"suite": "nope"}"#).is_err());
    }

    #[test]
    fn overrides_reach_the_curve() {
        let c = RunConfig { g: 2, l: Some(3), quad_nodes: Some(16), ..RunConfig::default() };
        let curve = c.curve().unwrap();
        assert_eq!((curve.g, curve.l, curve.quad_nodes), (2, 3, 16));
        assert_eq!("holonomy".parse::<Suite>().unwrap(), Suite::Holonomy);
        assert_eq!(Suite::All.expand().len(), 6);
    }
}
