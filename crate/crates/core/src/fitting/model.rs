//! Model identifiers and fitted-model records.
//!
//! Identifiers:
//! * `ER`, `BA`, `CL` (power-law Chung–Lu), `CL-c` (degree-replicating Chung–Lu)
//! * `<d>d` max-norm torus GIRG, `<d>cu` max-norm cube GIRG, `<d>m` MCD torus GIRG;
//!   a `c` right after the dimension selects degree-replicating weights
//!   (`7cd`, `1ccu`, `2cm`)
//! * Boolean torus GIRGs written as dash-separated groups of 1-based
//!   coordinates: digits inside a group are max-combined, groups are
//!   min-combined (`1-23` is `min(x0, max(x1, x2))`); a trailing `-c` selects
//!   degree-replicating weights.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Combine, DistanceSpec, Topology};
use crate::samplers::GirgParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightMode {
    PowerLaw,
    DegreeReplicating,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::PowerLaw => "power-law",
            WeightMode::DegreeReplicating => "degree",
        })
    }
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "power-law" | "powerlaw" | "pl" => Ok(WeightMode::PowerLaw),
            "degree" | "degree-replicating" | "deg" => Ok(WeightMode::DegreeReplicating),
            other => Err(Error::param(format!("unknown weight mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GirgModelConfig {
    pub spec: DistanceSpec,
    pub topology: Topology,
    pub weights: WeightMode,
}

impl GirgModelConfig {
    pub fn d(&self) -> usize {
        self.spec.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Girg(GirgModelConfig),
    ErdosRenyi,
    BarabasiAlbert,
    ChungLu(WeightMode),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub id: String,
    pub kind: ModelKind,
}

impl ModelSpec {
    pub fn from_id(id: &str) -> Result<Self> {
        let id = id.trim();
        let kind = match id {
            "ER" => ModelKind::ErdosRenyi,
            "BA" => ModelKind::BarabasiAlbert,
            "CL" => ModelKind::ChungLu(WeightMode::PowerLaw),
            "CL-c" => ModelKind::ChungLu(WeightMode::DegreeReplicating),
            _ if id.contains('-') => ModelKind::Girg(parse_boolean_id(id)?),
            _ => ModelKind::Girg(parse_girg_id(id)?),
        };
        Ok(ModelSpec { id: id.to_string(), kind })
    }

    pub fn girg(id: impl Into<String>, config: GirgModelConfig) -> Self {
        ModelSpec {
            id: id.into(),
            kind: ModelKind::Girg(config),
        }
    }
}

fn bad_id(id: &str) -> Error {
    Error::param(format!("unknown model id {id:?}"))
}

fn parse_girg_id(id: &str) -> Result<GirgModelConfig> {
    let digits = id.chars().take_while(|c| c.is_ascii_digit()).count();
    let d: usize = id[..digits].parse().map_err(|_| bad_id(id))?;
    if d == 0 {
        return Err(bad_id(id));
    }
    let rest = &id[digits..];
    let (weights, rest) = match rest.strip_prefix('c') {
        // a bare "cu" is the cube suffix, not a weight marker
        Some(r) if matches!(r, "d" | "cu" | "m") => (WeightMode::DegreeReplicating, r),
        _ => (WeightMode::PowerLaw, rest),
    };
    let (spec, topology) = match rest {
        "d" => (DistanceSpec::max_norm(d), Topology::Torus),
        "cu" => (DistanceSpec::max_norm(d), Topology::Cube),
        "m" => (DistanceSpec::mcd(d), Topology::Torus),
        _ => return Err(bad_id(id)),
    };
    Ok(GirgModelConfig {
        spec,
        topology,
        weights,
    })
}

fn parse_boolean_id(id: &str) -> Result<GirgModelConfig> {
    let (body, weights) = match id.strip_suffix("-c") {
        Some(b) => (b, WeightMode::DegreeReplicating),
        None => (id, WeightMode::PowerLaw),
    };
    let mut groups = Vec::new();
    for group in body.split('-') {
        if group.is_empty() || !group.chars().all(|c| c.is_ascii_digit() && c != '0') {
            return Err(bad_id(id));
        }
        let leaves = group.bytes().map(|b| DistanceSpec::leaf((b - b'1') as usize));
        let block = leaves.reduce(|acc, leaf| DistanceSpec::combine(Combine::Max, acc, leaf)).unwrap();
        groups.push(block);
    }
    let spec = groups
        .into_iter()
        .reduce(|acc, g| DistanceSpec::combine(Combine::Min, acc, g))
        .ok_or_else(|| bad_id(id))?;
    spec.validate(spec.dim())?;
    Ok(GirgModelConfig {
        spec,
        topology: Topology::Torus,
        weights,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedParams {
    Girg {
        params: GirgParams,
        weights: WeightMode,
    },
    ErdosRenyi {
        p: f64,
    },
    BarabasiAlbert {
        k: usize,
    },
    ChungLu {
        c: f64,
        tau: f64,
        weights: WeightMode,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    pub target_avg_degree: f64,
    pub target_clustering: f64,
    pub achieved_avg_degree: f64,
    pub achieved_clustering: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub id: String,
    pub n: usize,
    pub params: FittedParams,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    model: String,
    kind: String,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    topology: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    iterations: usize,
    target_avg_degree: f64,
    target_clustering: f64,
    achieved_avg_degree: f64,
    achieved_clustering: f64,
    converged: bool,
}

fn missing(field: &str) -> Error {
    Error::Config(format!("fitted model record lacks {field:?}"))
}

impl FittedModel {
    /// Flat `key = value` text, one line per field.
    pub fn to_record(&self) -> String {
        let diag = &self.diagnostics;
        let mut rec = Record {
            model: self.id.clone(),
            kind: String::new(),
            n: self.n,
            d: None,
            topology: None,
            distance: None,
            weights: None,
            tau: None,
            alpha: None,
            c: None,
            p: None,
            k: None,
            iterations: diag.iterations,
            target_avg_degree: diag.target_avg_degree,
            target_clustering: diag.target_clustering,
            achieved_avg_degree: diag.achieved_avg_degree,
            achieved_clustering: diag.achieved_clustering,
            converged: diag.converged,
        };
        match &self.params {
            FittedParams::Girg { params, weights } => {
                rec.kind = "girg".into();
                rec.d = Some(params.d);
                rec.topology = Some(params.topology.to_string());
                rec.distance = Some(params.spec.to_string());
                rec.weights = Some(weights.to_string());
                rec.tau = Some(params.tau);
                rec.alpha = Some(params.alpha);
                rec.c = Some(params.c);
            }
            FittedParams::ErdosRenyi { p } => {
                rec.kind = "er".into();
                rec.p = Some(*p);
            }
            FittedParams::BarabasiAlbert { k } => {
                rec.kind = "ba".into();
                rec.k = Some(*k);
            }
            FittedParams::ChungLu { c, tau, weights } => {
                rec.kind = "chung-lu".into();
                rec.c = Some(*c);
                rec.tau = Some(*tau);
                rec.weights = Some(weights.to_string());
            }
        }
        toml::to_string(&rec).expect("flat record always serializes")
    }

    pub fn from_record(text: &str) -> Result<Self> {
        let rec: Record = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let params = match rec.kind.as_str() {
            "girg" => {
                let d = rec.d.ok_or_else(|| missing("d"))?;
                let spec = DistanceSpec::parse(rec.distance.as_deref().ok_or_else(|| missing("distance"))?, d)?;
                let topology: Topology = rec.topology.as_deref().ok_or_else(|| missing("topology"))?.parse()?;
                let params = GirgParams::new(
                    rec.tau.ok_or_else(|| missing("tau"))?,
                    rec.alpha.ok_or_else(|| missing("alpha"))?,
                    rec.c.ok_or_else(|| missing("c"))?,
                    topology,
                    spec,
                )?;
                FittedParams::Girg {
                    params,
                    weights: rec.weights.as_deref().ok_or_else(|| missing("weights"))?.parse()?,
                }
            }
            "er" => FittedParams::ErdosRenyi {
                p: rec.p.ok_or_else(|| missing("p"))?,
            },
            "ba" => FittedParams::BarabasiAlbert {
                k: rec.k.ok_or_else(|| missing("k"))?,
            },
            "chung-lu" => FittedParams::ChungLu {
                c: rec.c.ok_or_else(|| missing("c"))?,
                tau: rec.tau.ok_or_else(|| missing("tau"))?,
                weights: rec.weights.as_deref().ok_or_else(|| missing("weights"))?.parse()?,
            },
            other => return Err(Error::Config(format!("unknown model kind {other:?}"))),
        };
        Ok(FittedModel {
            id: rec.model,
            n: rec.n,
            params,
            diagnostics: Diagnostics {
                iterations: rec.iterations,
                target_avg_degree: rec.target_avg_degree,
                target_clustering: rec.target_clustering,
                achieved_avg_degree: rec.achieved_avg_degree,
                achieved_clustering: rec.achieved_clustering,
                converged: rec.converged,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn girg(id: &str) -> GirgModelConfig {
        match ModelSpec::from_id(id).unwrap().kind {
            ModelKind::Girg(c) => c,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn table_ids() {
        let c = girg("7d");
        assert_eq!((c.d(), c.topology, c.weights), (7, Topology::Torus, WeightMode::PowerLaw));
        assert!(c.spec.is_max_norm());
        let c = girg("3cu");
        assert_eq!((c.d(), c.topology, c.weights), (3, Topology::Cube, WeightMode::PowerLaw));
        let c = girg("1ccu");
        assert_eq!((c.d(), c.topology, c.weights), (1, Topology::Cube, WeightMode::DegreeReplicating));
        let c = girg("2m");
        assert!(c.spec.is_mcd() && c.d() == 2);
        let c = girg("4cd");
        assert_eq!(c.weights, WeightMode::DegreeReplicating);
        let c = girg("1-23");
        assert_eq!(c.spec.to_string(), "min(x0,max(x1,x2))");
        let c = girg("12-34-c");
        assert_eq!(c.spec.to_string(), "min(max(x0,x1),max(x2,x3))");
        assert_eq!(c.weights, WeightMode::DegreeReplicating);
        assert_eq!(ModelSpec::from_id("CL-c").unwrap().kind, ModelKind::ChungLu(WeightMode::DegreeReplicating));
        assert_eq!(ModelSpec::from_id("ER").unwrap().kind, ModelKind::ErdosRenyi);
        for bad in ["0d", "d", "3x", "1-13", "1--2", "hyper", "2c"] {
            assert!(ModelSpec::from_id(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn record_round_trip() {
        let params = GirgParams::new(2.37, 1.81, 0.123456789, Topology::Cube, DistanceSpec::parse("min(x0,max(x1,x2))", 3).unwrap())
            .unwrap();
        let diagnostics = Diagnostics {
            iterations: 17,
            target_avg_degree: 12.5,
            target_clustering: 0.31,
            achieved_avg_degree: 12.4,
            achieved_clustering: 0.305,
            converged: true,
        };
        for params in [
            FittedParams::Girg {
                params,
                weights: WeightMode::DegreeReplicating,
            },
            FittedParams::ErdosRenyi { p: 0.0202 },
            FittedParams::BarabasiAlbert { k: 4 },
            FittedParams::ChungLu {
                c: 1.7,
                tau: 2.4,
                weights: WeightMode::PowerLaw,
            },
        ] {
            let model = FittedModel {
                id: "x".into(),
                n: 1234,
                params,
                diagnostics: diagnostics.clone(),
            };
            let text = model.to_record();
            assert!(text.lines().all(|l| l.contains(" = ")), "{text}");
            assert_eq!(FittedModel::from_record(&text).unwrap(), model);
        }
        assert!(FittedModel::from_record("model = \"x\"").is_err());
    }
}
