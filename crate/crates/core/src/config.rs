//! Operator specs from JSON documents such as
//!
//! ```json
//! {"family": "bessel_compact", "alpha": {"re": 0.3, "im": 0}, "beta": {"re": 0.7, "im": 0},
//!  "perturbation": [{"n": 0, "lambda": {"re": 1, "im": 0}}]}
//! ```
//!
//! Families: `bessel_compact` (alpha, beta), `linear_free` (w),
//! `q_geometric` (q, beta). Custom sequences have no JSON form.

use crate::cx::Cx;
use crate::error::{Error, Result};
use crate::sequence::{make_spec, Family, OperatorSpec, Override};
use serde::Deserialize;
use std::path::Path;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverride {
    n: i64,
    lambda: Option<Cx>,
    w: Option<Cx>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    family: String,
    alpha: Option<Cx>,
    beta: Option<Cx>,
    w: Option<Cx>,
    q: Option<Cx>,
    #[serde(default)]
    perturbation: Vec<RawOverride>,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::ConfigError(msg.into())
}

fn take(v: Option<Cx>, name: &str, family: &str) -> Result<num_complex::Complex64> {
    v.map(Into::into).ok_or_else(|| cfg_err(format!("family {family} needs field \"{name}\"")))
}

/// Parse a spec document. Shape problems are `ConfigError`; parameter values
/// that no operator admits come back from [`make_spec`] unchanged.
pub fn parse_config(text: &str) -> Result<OperatorSpec> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
    let fam = raw.family.as_str();
    let extra = |names: &[(&str, bool)]| -> Result<()> {
        match names.iter().find(|(_, present)| *present) {
            Some((n, _)) => Err(cfg_err(format!("field \"{n}\" does not apply to family {fam}"))),
            None => Ok(()),
        }
    };
    let family = match fam {
        "bessel_compact" => {
            extra(&[("w", raw.w.is_some()), ("q", raw.q.is_some())])?;
            Family::BesselCompact { alpha: take(raw.alpha, "alpha", fam)?, beta: take(raw.beta, "beta", fam)? }
        }
        "linear_free" => {
            extra(&[("alpha", raw.alpha.is_some()), ("beta", raw.beta.is_some()), ("q", raw.q.is_some())])?;
            Family::LinearFree { w: take(raw.w, "w", fam)? }
        }
        "q_geometric" => {
            extra(&[("alpha", raw.alpha.is_some()), ("w", raw.w.is_some())])?;
            Family::QGeometric { q: take(raw.q, "q", fam)?, beta: take(raw.beta, "beta", fam)? }
        }
        other => return Err(cfg_err(format!("unknown family \"{other}\""))),
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut overrides = Vec::with_capacity(raw.perturbation.len());
    for o in raw.perturbation {
        if !seen.insert(o.n) {
            return Err(cfg_err(format!("index {} overridden twice", o.n)));
        }
        if o.lambda.is_none() && o.w.is_none() {
            return Err(cfg_err(format!("override at {} sets neither lambda nor w", o.n)));
        }
        overrides.push(Override { n: o.n, lambda: o.lambda.map(Into::into), w: o.w.map(Into::into) });
    }
    make_spec(family, &overrides)
}

pub fn load_config(path: &Path) -> Result<OperatorSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn families_parse() {
        let s = parse_config(r#"{"family":"bessel_compact","alpha":{"re":0.3,"im":0},"beta":{"re":0.7,"im":0}}"#)
            .unwrap();
        assert!((s.lambda(5) - C::new(1.0 / 5.3, 0.0)).norm() < 1e-15);
        let s = parse_config(r#"{"family":"linear_free","w":{"re":1,"im":0}}"#).unwrap();
        assert_eq!(s.lambda(-2), C::new(-2.0, 0.0));
        let s = parse_config(
            r#"{"family":"q_geometric","q":{"re":0.5,"im":0},"beta":{"re":0.8,"im":0},
                "perturbation":[{"n":3,"lambda":{"re":7,"im":1}}]}"#,
        )
        .unwrap();
        assert_eq!(s.lambda(3), C::new(7.0, 1.0));
    }

    #[test]
    fn bad_documents() {
        let cases = [
            "not json",
            r#"{"family":"nope"}"#,
            r#"{"family":"linear_free"}"#,
            r#"{"family":"linear_free","w":{"re":1,"im":0},"alpha":{"re":1,"im":0}}"#,
            r#"{"family":"linear_free","w":{"re":1,"im":0},"extra":1}"#,
            r#"{"family":"linear_free","w":"1"}"#,
            r#"{"family":"linear_free","w":{"re":1,"im":0},"perturbation":[{"n":1}]}"#,
        ];
        for c in cases {
            assert_eq!(parse_config(c).unwrap_err().kind(), "ConfigError", "{c}");
        }
        let e = parse_config(
            r#"{"family":"q_geometric","q":{"re":0.5,"im":0},"beta":{"re":0.8,"im":0},
                "perturbation":[{"n":0,"w":{"re":0,"im":0}}]}"#,
        )
        .unwrap_err();
        assert_eq!(e.kind(), "InvalidFamilyParams");
    }
}
