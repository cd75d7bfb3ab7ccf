//! Measure description files (JSON).
//!
//! ```json
//! {"n": 2, "catalog": {"name": "ball", "params": {}}}
//! {"n": 1, "radial_moments": [3.14159, 1.5708]}
//! {"n": 2, "factors": [[3.14, 1.57], [3.14, 1.57]]}
//! {"n": 1, "multimoments": {"0": 3.14159, "1": 3.14159}}
//! {"n": 1, "radial_weight": {"expr": "exp(-r^4)", "support": [0, "inf"]}}
//! ```

use std::fmt;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer};
use serde_json::Value;

use super::catalog::CatalogMeasure;
use super::quadrature::QuadratureSettings;
use super::weight::{quadrature_radial_sequence, RadialWeight, Support};
use super::{MomentError, MomentProvider, ProviderKind};
use crate::multiindex::MultiIndex;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightProfileSpec {
    Expr(String),
    PiecewiseLinear(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    Catalog(CatalogMeasure),
    RadialMoments(Vec<f64>),
    Factors(Vec<Vec<f64>>),
    Multimoments(Vec<(MultiIndex, f64)>),
    RadialWeight { profile: WeightProfileSpec, support: Support },
}

impl MeasureKind {
    pub fn name(&self) -> &'static str {
        match self {
            MeasureKind::Catalog(_) => "catalog",
            MeasureKind::RadialMoments(_) => "radial_moments",
            MeasureKind::Factors(_) => "factors",
            MeasureKind::Multimoments(_) => "multimoments",
            MeasureKind::RadialWeight { .. } => "radial_weight",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub n: usize,
    pub kind: MeasureKind,
    pub quadrature: QuadratureSettings,
}

// Keeps every key of a JSON object, including repeats, in file order.
struct Entries(Vec<(String, f64)>);

impl<'de> Deserialize<'de> for Entries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;
        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = Entries;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping comma-separated indices to numbers")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Entries, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, f64>()? {
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }
        deserializer.deserialize_map(EntriesVisitor)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    name: String,
    #[serde(default)]
    params: serde_json::Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawProfile {
    Expr(String),
    Table { piecewise_linear: Vec<[f64; 2]> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeight {
    expr: RawProfile,
    #[serde(default)]
    support: Option<[Value; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    rel_tol: Option<f64>,
    max_evals: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    n: usize,
    catalog: Option<RawCatalog>,
    radial_moments: Option<Vec<f64>>,
    factors: Option<Vec<Vec<f64>>>,
    multimoments: Option<Entries>,
    radial_weight: Option<RawWeight>,
    quadrature: Option<RawQuadrature>,
}

fn invalid(msg: impl Into<String>) -> MomentError {
    MomentError::InvalidSpec(msg.into())
}

fn parse_catalog(raw: RawCatalog) -> Result<CatalogMeasure, MomentError> {
    let param = |key: &str| -> Result<Option<&Value>, MomentError> { Ok(raw.params.get(key)) };
    let allowed: &[&str] = match raw.name.as_str() {
        "fock" | "ball" | "polydisc" => &[],
        "generalized_fock" => &["m", "product"],
        other => return Err(invalid(format!("unknown catalog measure {other:?}"))),
    };
    if let Some(k) = raw.params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(invalid(format!("unknown parameter {k:?} for catalog measure {:?}", raw.name)));
    }
    Ok(match raw.name.as_str() {
        "fock" => CatalogMeasure::Fock,
        "ball" => CatalogMeasure::Ball,
        "polydisc" => CatalogMeasure::Polydisc,
        _ => {
            let m = param("m")?
                .ok_or_else(|| invalid("generalized_fock requires params.m"))?
                .as_f64()
                .ok_or_else(|| invalid("generalized_fock params.m must be a number"))?;
            let product = match param("product")? {
                None => false,
                Some(v) => v.as_bool().ok_or_else(|| invalid("params.product must be a boolean"))?,
            };
            if product {
                CatalogMeasure::GeneralizedFockProduct { m }
            } else {
                CatalogMeasure::GeneralizedFock { m }
            }
        }
    })
}

fn parse_support(raw: Option<[Value; 2]>) -> Result<Support, MomentError> {
    let Some([lo, hi]) = raw else {
        return Ok(Support::Unbounded);
    };
    if lo.as_f64() != Some(0.0) {
        return Err(invalid("radial weight support must start at 0"));
    }
    match &hi {
        Value::String(s) if s == "inf" => Ok(Support::Unbounded),
        Value::Number(x) => {
            let r = x.as_f64().unwrap_or(f64::NAN);
            if r > 0.0 && r.is_finite() {
                Ok(Support::Bounded(r))
            } else {
                Err(invalid(format!("support radius must be positive, got {hi}")))
            }
        }
        _ => Err(invalid(format!("support upper end must be a number or \"inf\", got {hi}"))),
    }
}

impl MeasureSpec {
    pub fn from_json_str(text: &str) -> Result<Self, MomentError> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| MomentError::Parse(e.to_string()))?;
        let n = raw.n;
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let present = [
            raw.catalog.is_some(),
            raw.radial_moments.is_some(),
            raw.factors.is_some(),
            raw.multimoments.is_some(),
            raw.radial_weight.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if present != 1 {
            return Err(invalid(format!(
                "exactly one of catalog, radial_moments, factors, multimoments, radial_weight is required (found {present})"
            )));
        }
        let mut quadrature = QuadratureSettings::default();
        if let Some(q) = raw.quadrature {
            if let Some(t) = q.rel_tol {
                if !(t > 0.0) {
                    return Err(invalid("quadrature.rel_tol must be positive"));
                }
                quadrature.rel_tol = t;
            }
            if let Some(e) = q.max_evals {
                quadrature.max_evals = e;
            }
        }
        let kind = if let Some(c) = raw.catalog {
            MeasureKind::Catalog(parse_catalog(c)?)
        } else if let Some(m) = raw.radial_moments {
            MeasureKind::RadialMoments(m)
        } else if let Some(f) = raw.factors {
            if f.len() != n {
                return Err(invalid(format!("factors lists {} sequences for n = {n}", f.len())));
            }
            MeasureKind::Factors(f)
        } else if let Some(Entries(entries)) = raw.multimoments {
            let mut parsed = Vec::with_capacity(entries.len());
            for (key, value) in entries {
                let index: MultiIndex = key.parse()?;
                if index.dim() != n {
                    return Err(invalid(format!("multimoment key {key:?} has {} entries for n = {n}", index.dim())));
                }
                if index.has_negative() {
                    return Err(MomentError::NegativeIndex(index));
                }
                parsed.push((index, value));
            }
            MeasureKind::Multimoments(parsed)
        } else {
            let w = raw.radial_weight.expect("one kind present");
            let support = parse_support(w.support)?;
            let profile = match w.expr {
                RawProfile::Expr(s) => WeightProfileSpec::Expr(s),
                RawProfile::Table { piecewise_linear } => {
                    WeightProfileSpec::PiecewiseLinear(piecewise_linear.into_iter().map(|[r, w]| (r, w)).collect())
                }
            };
            MeasureKind::RadialWeight { profile, support }
        };
        Ok(MeasureSpec { n, kind, quadrature })
    }

    pub fn from_path(path: &Path) -> Result<Self, MomentError> {
        let text = std::fs::read_to_string(path).map_err(|e| MomentError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| match e {
            MomentError::Parse(msg) => MomentError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn weight(&self) -> Option<Result<RadialWeight, MomentError>> {
        match &self.kind {
            MeasureKind::RadialWeight { profile, support } => Some(match profile {
                WeightProfileSpec::Expr(e) => RadialWeight::from_expr(e, *support),
                WeightProfileSpec::PiecewiseLinear(nodes) => RadialWeight::piecewise(nodes.clone()),
            }),
            MeasureKind::Catalog(c) => Some(Ok(c.weight())),
            _ => None,
        }
    }

    /// Builds the provider. Catalog and quadrature kinds are materialized up to
    /// `degree`; explicit data serve whatever they list.
    pub fn build(&self, degree: usize) -> Result<MomentProvider, MomentError> {
        match &self.kind {
            MeasureKind::Catalog(c) => c.provider(self.n, degree),
            MeasureKind::RadialMoments(m) => MomentProvider::from_radial(self.n, m.clone()),
            MeasureKind::Factors(f) => MomentProvider::from_factors(f.clone()),
            MeasureKind::Multimoments(t) => MomentProvider::from_table(self.n, t.clone()),
            MeasureKind::RadialWeight { .. } => {
                let weight = self.weight().expect("radial weight kind")?;
                let radial = quadrature_radial_sequence(&weight, self.n, degree, &self.quadrature)?;
                Ok(MomentProvider::from_radial(self.n, radial)?
                    .with_kind(ProviderKind::RadialQuadrature(weight.describe())))
            }
        }
    }

    /// Independent per-index moment source for the verification oracles;
    /// only catalog measures have one.
    pub fn oracle_provider(&self) -> Option<Result<MomentProvider, MomentError>> {
        match &self.kind {
            MeasureKind::Catalog(c) => Some(c.direct_provider(self.n)),
            _ => None,
        }
    }
}
