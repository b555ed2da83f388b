//! The JSON instance format and its validation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::num::{floats, Num};
use super::IoError;
use crate::applications::{conditional_risk, RiskKind, RiskSpec};
use crate::convex::{BoxSet, ConvexFn, Pwl, Quadratic, RiskFn, SampleSource, Sampled1D, Sampler};
use crate::duality::{PertComponent, Perturbation};
use crate::error::Error;
use crate::linalg::Matrix;
use crate::measure::{MeasureSpace, Partition};
use crate::scenario::{L0Point, ScenarioFn};
use crate::schemes::{fenchel_lagrange_perturbation, fenchel_perturbation, ConstraintSet, LinearOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Generic,
    Fenchel,
    FenchelLagrange,
    Risk,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Generic => "generic",
            Scheme::Fenchel => "fenchel",
            Scheme::FenchelLagrange => "fenchel_lagrange",
            Scheme::Risk => "risk",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Uniform(usize),
    Weights(Vec<Num>),
}

fn zero() -> Num {
    Num(0.0)
}

fn is_zero(n: &Num) -> bool {
    n.0 == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Breakpoints, slopes (one more than breakpoints; infinite end slopes
    /// are domain walls) and the value `v0` at `x0`.
    Pwl {
        breakpoints: Vec<Num>,
        slopes: Vec<Num>,
        x0: Num,
        v0: Num,
    },
    /// `|x − shift|`.
    Abs {
        #[serde(default = "zero", skip_serializing_if = "is_zero")]
        shift: Num,
    },
    /// `½xᵀQx + bᵀx + c`.
    Quadratic { q: Vec<Vec<Num>>, b: Vec<Num>, c: Num },
    Affine { slope: Vec<Num>, offset: Num },
    IndicatorBox {
        lo: Vec<Num>,
        hi: Vec<Num>,
        #[serde(default = "zero", skip_serializing_if = "is_zero")]
        offset: Num,
    },
    SupportBox {
        lo: Vec<Num>,
        hi: Vec<Num>,
        #[serde(default = "zero", skip_serializing_if = "is_zero")]
        offset: Num,
    },
    Sampled { grid: Vec<Num>, values: Vec<Num> },
    SampledSource { sampler: Sampler, lo: Num, hi: Num, points: usize },
    Cvar { probs: Vec<Num>, alpha: Num },
    Entropic { probs: Vec<Num>, gamma: Num },
}

impl FunctionSpec {
    pub fn build(&self) -> crate::Result<ConvexFn<f64>> {
        Ok(match self {
            FunctionSpec::Pwl { breakpoints, slopes, x0, v0 } => {
                ConvexFn::Pwl(Pwl::new(floats(breakpoints), floats(slopes), x0.0, v0.0)?)
            }
            FunctionSpec::Abs { shift } => ConvexFn::Pwl(Pwl::abs_shifted(shift.0)),
            FunctionSpec::Quadratic { q, b, c } => {
                let rows: Vec<Vec<f64>> = q.iter().map(|r| floats(r)).collect();
                ConvexFn::Quadratic(Quadratic::new(Matrix::from_rows(&rows)?, floats(b), c.0)?)
            }
            FunctionSpec::Affine { slope, offset } => {
                if slope.is_empty() || slope.iter().chain([offset]).any(|v| !v.0.is_finite()) {
                    return Err(Error::InvalidFunction("affine data must be finite and nonempty".into()));
                }
                ConvexFn::Affine {
                    slope: floats(slope),
                    offset: offset.0,
                }
            }
            FunctionSpec::IndicatorBox { lo, hi, offset } => ConvexFn::IndicatorBox {
                set: BoxSet::new(floats(lo), floats(hi))?,
                offset: finite(offset)?,
            },
            FunctionSpec::SupportBox { lo, hi, offset } => ConvexFn::SupportBox {
                set: BoxSet::new(floats(lo), floats(hi))?,
                offset: finite(offset)?,
            },
            FunctionSpec::Sampled { grid, values } => {
                let s = Sampled1D::new(floats(grid), floats(values))?;
                if !s.is_convex(1e-12) {
                    return Err(Error::InvalidFunction("samples are not convex".into()));
                }
                ConvexFn::Sampled(s)
            }
            FunctionSpec::SampledSource { sampler, lo, hi, points } => {
                ConvexFn::Sampled(Sampled1D::from_source(SampleSource {
                    sampler: *sampler,
                    lo: lo.0,
                    hi: hi.0,
                    points: *points,
                })?)
            }
            FunctionSpec::Cvar { probs, alpha } => ConvexFn::Cvar(RiskFn::cvar(floats(probs), alpha.0)?),
            FunctionSpec::Entropic { probs, gamma } => ConvexFn::Entropic(RiskFn::entropic(floats(probs), gamma.0)?),
        })
    }
}

fn finite(n: &Num) -> crate::Result<f64> {
    if n.0.is_finite() {
        Ok(n.0)
    } else {
        Err(Error::InvalidFunction(format!("offset {} must be finite", n.0)))
    }
}

/// One function name for every atom, or one per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FnRef {
    One(String),
    PerAtom(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PertSpec {
    Composite { f: String, g: String, a: Vec<Vec<Num>> },
    Joint(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub dx: usize,
    pub dw: usize,
    /// One component for every atom, or one per atom.
    pub components: Vec<PertSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintSpec {
    Box { lo: Vec<Num>, hi: Vec<Num> },
    Halfspaces { rows: Vec<Vec<Num>>, rhs: Vec<Num> },
    /// Over the instance space.
    CondExpCone { blocks: Vec<Vec<usize>>, threshold: Num },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskFile {
    #[serde(flatten)]
    pub kind: RiskKind<Num>,
    pub blocks: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Num>>,
    /// Dual certificate, one vector per atom.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<Vec<Num>>>,
    /// Dual point for the Young–Fenchel check, one vector per atom.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<Vec<Num>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub space: SpaceSpec,
    pub scheme: Scheme,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<FnRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<FnRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk: Option<RiskFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSpec>,
    /// Dual grid points, each used on every atom.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<Num>,
}

/// A validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub file: InstanceFile,
    /// `sha256:` of the canonical serialization.
    pub digest: String,
    pub space: MeasureSpace<f64>,
    pub f: Option<ScenarioFn<f64>>,
    pub g: Option<ScenarioFn<f64>>,
    pub operator: Option<LinearOp<f64>>,
    pub constraint: Option<ConstraintSet<f64>>,
    pub risk: Option<RiskSpec<f64>>,
    /// Absent when the scheme has no supported perturbation.
    pub perturbation: Option<Perturbation<f64>>,
    pub tol: f64,
}

pub const DEFAULT_TOL: f64 = 1e-9;

fn field(path: impl Into<String>) -> impl FnOnce(Error) -> IoError {
    let path = path.into();
    move |source| IoError::Field { path, source }
}

fn missing(path: &str, why: &str) -> IoError {
    IoError::Field {
        path: path.into(),
        source: Error::Precondition(format!("required {why}")),
    }
}

pub fn emit_instance(file: &InstanceFile) -> String {
    serde_json::to_string_pretty(file).expect("instance serializes")
}

pub fn parse_instance(path: &Path) -> Result<Instance, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::Read {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_instance_str(&text)
}

pub fn parse_instance_str(text: &str) -> Result<Instance, IoError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    build(file)
}

fn digest(file: &InstanceFile) -> String {
    let bytes = serde_json::to_vec(file).expect("instance serializes");
    let hash = Sha256::digest(&bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn matrix(rows: &[Vec<Num>], path: &str) -> Result<Matrix<f64>, IoError> {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| floats(r)).collect();
    Matrix::from_rows(&rows).map_err(field(path))
}

fn scenario(
    r: &FnRef,
    path: &str,
    fns: &BTreeMap<String, ConvexFn<f64>>,
    space: &MeasureSpace<f64>,
) -> Result<ScenarioFn<f64>, IoError> {
    let n = space.atom_count();
    let names: Vec<&String> = match r {
        FnRef::One(s) => vec![s; n],
        FnRef::PerAtom(v) if v.len() == n => v.iter().collect(),
        FnRef::PerAtom(v) => {
            return Err(IoError::Field {
                path: path.into(),
                source: Error::DimensionMismatch(format!("{} names for {n} atoms", v.len())),
            })
        }
    };
    let comps = names
        .iter()
        .enumerate()
        .map(|(i, name)| lookup(fns, name, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    ScenarioFn::new(space.clone(), comps).map_err(field(path))
}

fn lookup(fns: &BTreeMap<String, ConvexFn<f64>>, name: &str, path: &str) -> Result<ConvexFn<f64>, IoError> {
    fns.get(name).cloned().ok_or_else(|| IoError::Field {
        path: path.into(),
        source: Error::InvalidFunction(format!("unknown function '{name}'")),
    })
}

/// A perturbation that the scheme cannot build is left out; a provably
/// empty feasible set is an error.
fn optional_perturbation(
    r: crate::Result<Perturbation<f64>>,
    path: &str,
) -> Result<Option<Perturbation<f64>>, IoError> {
    match r {
        Ok(p) => Ok(Some(p)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(field(path)(e)),
    }
}

pub fn build(file: InstanceFile) -> Result<Instance, IoError> {
    let space = match &file.space {
        SpaceSpec::Uniform(n) => MeasureSpace::uniform(*n),
        SpaceSpec::Weights(w) => MeasureSpace::new(floats(w)),
    }
    .map_err(field("space"))?;
    let n = space.atom_count();
    let tol = file.tol.map_or(DEFAULT_TOL, |t| t.0);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(field("tol")(Error::Precondition(format!("tolerance {tol} must be finite and nonnegative"))));
    }
    let mut fns = BTreeMap::new();
    for (name, spec) in &file.functions {
        fns.insert(name.clone(), spec.build().map_err(field(format!("functions.{name}")))?);
    }
    let f = file.f.as_ref().map(|r| scenario(r, "f", &fns, &space)).transpose()?;
    let g = file.g.as_ref().map(|r| scenario(r, "g", &fns, &space)).transpose()?;
    let operator = file
        .operator
        .as_ref()
        .map(|m| matrix(m, "operator").map(LinearOp::new))
        .transpose()?;
    let constraint = match &file.constraint {
        None => None,
        Some(c) => Some(
            match c {
                ConstraintSpec::Box { lo, hi } => {
                    BoxSet::new(floats(lo), floats(hi)).and_then(|b| ConstraintSet::new(ConstraintSet::Box(b)))
                }
                ConstraintSpec::Halfspaces { rows, rhs } => ConstraintSet::new(ConstraintSet::Halfspaces {
                    rows: rows.iter().map(|r| floats(r)).collect(),
                    rhs: floats(rhs),
                }),
                ConstraintSpec::CondExpCone { blocks, threshold } => Partition::from_blocks(n, blocks)
                    .and_then(|partition| {
                        ConstraintSet::new(ConstraintSet::CondExpCone {
                            space: space.clone(),
                            partition,
                            threshold: threshold.0,
                        })
                    }),
            }
            .map_err(field("constraint"))?,
        ),
    };
    let risk = match &file.risk {
        None => None,
        Some(r) => {
            let kind = match r.kind {
                RiskKind::Cvar { alpha } => RiskKind::Cvar { alpha: alpha.0 },
                RiskKind::Entropic { gamma } => RiskKind::Entropic { gamma: gamma.0 },
            };
            let mut spec = Partition::from_blocks(n, &r.blocks)
                .and_then(|p| RiskSpec::new(kind, p, space.clone()))
                .map_err(field("risk"))?;
            spec.p = r.p.map(|p| p.0);
            Some(spec)
        }
    };

    let mut inst = Instance {
        digest: digest(&file),
        file: file.clone(),
        space: space.clone(),
        f,
        g,
        operator,
        constraint,
        risk,
        perturbation: None,
        tol,
    };
    match file.scheme {
        Scheme::Generic => {
            let p = file.perturbation.as_ref().ok_or_else(|| missing("perturbation", "for the generic scheme"))?;
            let comps = match p.components.len() {
                1 => vec![p.components[0].clone(); n],
                k if k == n => p.components.clone(),
                k => {
                    return Err(field("perturbation.components")(Error::DimensionMismatch(format!(
                        "{k} components for {n} atoms"
                    ))))
                }
            };
            let comps = comps
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let path = format!("perturbation.components[{i}]");
                    Ok(match c {
                        PertSpec::Composite { f, g, a } => PertComponent::Composite {
                            f: lookup(&fns, f, &format!("{path}.f"))?,
                            g: lookup(&fns, g, &format!("{path}.g"))?,
                            a: matrix(a, &format!("{path}.a"))?,
                        },
                        PertSpec::Joint(j) => PertComponent::Joint(lookup(&fns, j, &path)?),
                    })
                })
                .collect::<Result<Vec<_>, IoError>>()?;
            inst.perturbation =
                Some(Perturbation::new(space, p.dx, p.dw, comps).map_err(field("perturbation"))?);
        }
        Scheme::Fenchel => {
            let f = inst.f.as_ref().ok_or_else(|| missing("f", "for the fenchel scheme"))?;
            let g = inst.g.as_ref().ok_or_else(|| missing("g", "for the fenchel scheme"))?;
            let a = match &inst.operator {
                Some(a) => a.clone(),
                None if f.dim() == g.dim() => LinearOp::identity(f.dim()),
                None => return Err(missing("operator", "when f and g differ in dimension")),
            };
            inst.operator = Some(a.clone());
            inst.perturbation = optional_perturbation(fenchel_perturbation(f, g, &a), "f")?;
        }
        Scheme::FenchelLagrange => {
            let f = inst.f.as_ref().ok_or_else(|| missing("f", "for the fenchel_lagrange scheme"))?;
            let s = inst
                .constraint
                .as_ref()
                .ok_or_else(|| missing("constraint", "for the fenchel_lagrange scheme"))?;
            inst.perturbation = optional_perturbation(fenchel_lagrange_perturbation(f, s), "constraint")?;
        }
        Scheme::Risk => {
            let spec = inst.risk.as_ref().ok_or_else(|| missing("risk", "for the risk scheme"))?;
            inst.f = Some(conditional_risk(spec).map_err(field("risk"))?);
        }
    }
    Ok(inst)
}

impl Instance {
    pub fn certificate(&self) -> CertificateSpec {
        self.file.certificate.clone().unwrap_or_default()
    }

    /// Per-atom vectors of the given dimension.
    pub fn l0_point(&self, v: &[Vec<Num>], dim: usize, atoms: usize, path: &str) -> Result<L0Point<f64>, IoError> {
        let coords: Vec<Vec<f64>> = if v.len() == 1 {
            vec![floats(&v[0]); atoms]
        } else {
            v.iter().map(|c| floats(c)).collect()
        };
        if coords.len() != atoms {
            return Err(field(path)(Error::DimensionMismatch(format!(
                "{} vectors for {atoms} atoms",
                coords.len()
            ))));
        }
        L0Point::new(dim, coords).map_err(field(path))
    }
}
