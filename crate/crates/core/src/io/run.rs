//! Command dispatch.

use std::str::FromStr;

use super::num::{nums, Num};
use super::report::{GridRow, Report, Section};
use super::schema::{Instance, Scheme};
use super::IoError;
use crate::applications::portfolio_instance;
use crate::duality::{
    check_optimality, default_y_grid, duality_report, farkas_decide, moreau_rockafellar_check,
    regularity_probe, DualityReport, Farkas, Perturbation, Verdict,
};
use crate::error::Error;
use crate::measure::L0Ext;
use crate::scenario::{L0Point, ScenarioFn};
use crate::schemes::{
    fenchel_dual_solve, fenchel_lagrange_solve, fenchel_optimality_check, fl_optimality_check, ConstraintSet,
    SchemeCheck,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Conjugate,
    Solve,
    CheckYoungFenchel,
    CheckMoreauRockafellar,
    CheckOptimality,
    Farkas,
    ProbeRegularity,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Conjugate,
        Command::Solve,
        Command::CheckYoungFenchel,
        Command::CheckMoreauRockafellar,
        Command::CheckOptimality,
        Command::Farkas,
        Command::ProbeRegularity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Conjugate => "conjugate",
            Command::Solve => "solve",
            Command::CheckYoungFenchel => "check-young-fenchel",
            Command::CheckMoreauRockafellar => "check-moreau-rockafellar",
            Command::CheckOptimality => "check-optimality",
            Command::Farkas => "farkas",
            Command::ProbeRegularity => "probe-regularity",
        }
    }
}

impl FromStr for Command {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, IoError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| IoError::Usage(format!("unknown command '{s}'")))
    }
}

/// `lo:hi:n` gives `n` uniform points of a one-dimensional dual grid.
pub fn parse_grid_spec(spec: &str) -> Result<Vec<Vec<f64>>, IoError> {
    let bad = || IoError::Usage(format!("grid spec '{spec}' is not lo:hi:n"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) || n == 0 || (n == 1 && lo != hi) {
        return Err(bad());
    }
    Ok((0..n)
        .map(|k| {
            let v = if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
            vec![v]
        })
        .collect())
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub tol: Option<f64>,
    pub grid: Option<Vec<Vec<f64>>>,
}

struct Ctx<'a> {
    inst: &'a Instance,
    tol: f64,
    grid: Option<Vec<Vec<f64>>>,
    notes: Vec<String>,
}

fn need<'a, T>(v: Option<&'a T>, what: &str) -> Result<&'a T, IoError> {
    v.ok_or_else(|| IoError::Usage(format!("this command needs {what}")))
}

impl Ctx<'_> {
    fn phi(&self) -> Result<&Perturbation<f64>, IoError> {
        need(
            self.inst.perturbation.as_ref(),
            "a perturbation the scheme can build (generic, or fenchel / fenchel_lagrange with supported data)",
        )
    }

    fn y_grid(&self, dim: usize, atoms: usize, fallback: impl FnOnce() -> Vec<L0Point<f64>>) -> Result<Vec<L0Point<f64>>, IoError> {
        match &self.grid {
            None => Ok(fallback()),
            Some(g) => g
                .iter()
                .map(|y| {
                    if y.len() != dim {
                        Err(IoError::Run(Error::DimensionMismatch(format!(
                            "grid point of dimension {} for dual dimension {dim}",
                            y.len()
                        ))))
                    } else {
                        Ok(L0Point::constant(atoms, y))
                    }
                })
                .collect(),
        }
    }

    fn constraint(&self) -> Result<ConstraintSet<f64>, IoError> {
        if self.inst.file.scheme == Scheme::Risk {
            let spec = need(self.inst.risk.as_ref(), "a risk section")?;
            return Ok(portfolio_instance(spec)?.1);
        }
        Ok(need(self.inst.constraint.as_ref(), "a constraint")?.clone())
    }
}

fn v(x: &L0Ext<f64>) -> Vec<Num> {
    nums(&x.values)
}

fn point(p: &L0Point<f64>) -> Vec<Vec<Num>> {
    p.coords.iter().map(|c| nums(c)).collect()
}

fn solve_section(r: &DualityReport<f64>) -> Section {
    let pass = r.gap.values.iter().all(|&g| g <= r.tol);
    Section::Solve {
        primal: v(&r.primal_value),
        dual: v(&r.dual_value),
        gap: v(&r.gap),
        primal_attained: r.primal_attained.clone(),
        dual_attained: r.dual_attained.clone(),
        dual_attainment: r.dual_attainment.clone(),
        primal_minimizer: r.primal_minimizer.as_ref().map(|x| nums(x)),
        dual_solution: r.dual_solution.as_ref().map(point),
        regularity: r.regularity,
        pass,
        tol: Num(r.tol),
    }
}

fn scheme_check_section(c: &SchemeCheck<f64>) -> Section {
    Section::Optimality {
        residual_i: v(&c.residual_i),
        residual_ii: Some(v(&c.residual_ii)),
        diagnostic: c.diagnostic.clone(),
        pass: c.pass,
        tol: Num(c.tol),
    }
}

fn default_f_grid(f: &ScenarioFn<f64>) -> Vec<L0Point<f64>> {
    let (d, n) = (f.dim(), f.atom_count());
    if d == 1 {
        return (0..=16).map(|k| L0Point::constant(n, &[-2.0 + 0.25 * k as f64])).collect();
    }
    let mut out = vec![L0Point::constant(n, &vec![0.0; d])];
    for k in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[k] = s;
            out.push(L0Point::constant(n, &e));
        }
    }
    out
}

fn primal_fn(inst: &Instance) -> Result<&ScenarioFn<f64>, IoError> {
    need(inst.f.as_ref(), "a function f")
}

pub fn run(inst: &Instance, cmd: Command, opts: &RunOptions) -> Result<Report, IoError> {
    let mut ctx = Ctx {
        inst,
        tol: opts.tol.unwrap_or(inst.tol),
        grid: opts
            .grid
            .clone()
            .or_else(|| inst.file.grid.as_ref().map(|g| g.iter().map(|y| super::num::floats(y)).collect())),
        notes: vec![],
    };
    let tol = ctx.tol;
    let mut sections = vec![];
    let atoms = match (&inst.f, &inst.perturbation) {
        (Some(f), _) => f.atom_count(),
        (None, Some(p)) => p.atom_count(),
        _ => inst.space.atom_count(),
    };
    let cert = inst.certificate();
    match cmd {
        Command::Conjugate => {
            if let Some(f) = &inst.f {
                let fc = f.vec_conjugate()?;
                let grid = ctx.y_grid(f.dim(), f.atom_count(), || default_f_grid(f))?;
                let values = grid
                    .iter()
                    .map(|y| nums(&(0..atoms).map(|i| fc.components()[i].eval(y.at(i))).collect::<Vec<_>>()))
                    .collect();
                sections.push(Section::Conjugate {
                    kinds: fc.components().iter().map(|c| c.kind().to_string()).collect(),
                    grid: grid.iter().map(|y| nums(y.at(0))).collect(),
                    values,
                });
            } else {
                let phi = ctx.phi()?;
                let grid = ctx.y_grid(phi.dx(), phi.atom_count(), || default_y_grid(phi))?;
                let mr = moreau_rockafellar_check(phi, &grid, tol)?;
                sections.push(Section::Conjugate {
                    kinds: vec!["primal_objective".into(); atoms],
                    grid: grid.iter().map(|y| nums(y.at(0))).collect(),
                    values: mr.points.iter().map(|p| v(&p.lhs)).collect(),
                });
            }
        }
        Command::Solve => {
            let report = match inst.file.scheme {
                Scheme::Generic => duality_report(ctx.phi()?, tol),
                Scheme::Fenchel => {
                    let f = primal_fn(inst)?;
                    let g = need(inst.g.as_ref(), "a function g")?;
                    let a = need(inst.operator.as_ref(), "an operator")?;
                    let r = fenchel_dual_solve(f, g, a, tol)?;
                    ctx.notes.extend(r.notes);
                    r.report
                }
                Scheme::FenchelLagrange | Scheme::Risk => {
                    let r = fenchel_lagrange_solve(primal_fn(inst)?, &ctx.constraint()?, tol)?;
                    ctx.notes.extend(r.notes);
                    r.report
                }
            };
            sections.push(solve_section(&report));
        }
        Command::CheckYoungFenchel => {
            let f = primal_fn(inst)?;
            let x = need(cert.x.as_ref(), "certificate.x")?;
            let y = need(cert.y.as_ref(), "certificate.y")?;
            let y = inst.l0_point(y, f.dim(), f.atom_count(), "certificate.y")?;
            let x = super::num::floats(x);
            let gap = f.young_fenchel_gap(&x, &y)?;
            let sub = f.is_subgradient(&x, &y, tol)?;
            let pass = gap.values.iter().all(|&g| g >= -tol);
            sections.push(Section::YoungFenchel {
                gap: v(&gap),
                subgradient: sub,
                pass,
                tol: Num(tol),
            });
        }
        Command::CheckMoreauRockafellar => {
            let phi = ctx.phi()?;
            let grid = ctx.y_grid(phi.dx(), phi.atom_count(), || default_y_grid(phi))?;
            let mr = moreau_rockafellar_check(phi, &grid, tol)?;
            sections.push(Section::MoreauRockafellar {
                rows: mr
                    .points
                    .iter()
                    .map(|p| GridRow {
                        y: point(&p.y),
                        lhs: v(&p.lhs),
                        rhs: v(&p.rhs),
                        residual: v(&p.residual),
                        attainment: None,
                    })
                    .collect(),
                max_residual: Num(mr.max_residual),
                pass: mr.pass,
                tol: Num(tol),
            });
        }
        Command::CheckOptimality => {
            let x = super::num::floats(need(cert.x.as_ref(), "certificate.x")?);
            let z = need(cert.z.as_ref(), "certificate.z")?;
            match inst.file.scheme {
                Scheme::Generic => {
                    let phi = ctx.phi()?;
                    let z = inst.l0_point(z, phi.dw(), phi.atom_count(), "certificate.z")?;
                    let r = check_optimality(phi, &x, &z, tol)?;
                    sections.push(Section::Optimality {
                        residual_i: v(&r.residuals),
                        residual_ii: None,
                        diagnostic: None,
                        pass: r.pass,
                        tol: Num(tol),
                    });
                }
                Scheme::Fenchel => {
                    let f = primal_fn(inst)?;
                    let g = need(inst.g.as_ref(), "a function g")?;
                    let a = need(inst.operator.as_ref(), "an operator")?;
                    let z = inst.l0_point(z, g.dim(), f.atom_count(), "certificate.z")?;
                    sections.push(scheme_check_section(&fenchel_optimality_check(f, g, a, &x, &z, tol)?));
                }
                Scheme::FenchelLagrange | Scheme::Risk => {
                    let f = primal_fn(inst)?;
                    let z = inst.l0_point(z, f.dim(), f.atom_count(), "certificate.z")?;
                    let s = ctx.constraint()?;
                    sections.push(scheme_check_section(&fl_optimality_check(f, &s, &x, &z, tol)?));
                }
            }
        }
        Command::Farkas => {
            let phi = ctx.phi()?;
            let section = |outcome: &str, pass, z, conjugate_values, atom, x, value| Section::Farkas {
                outcome: outcome.into(),
                z,
                conjugate_values,
                atom,
                x,
                value,
                pass,
                tol: Num(tol),
            };
            sections.push(match farkas_decide(phi, tol) {
                Ok(Farkas::PrimalNonnegative { z, conjugate_values }) => section(
                    "primal_nonnegative",
                    true,
                    Some(point(&z)),
                    Some(v(&conjugate_values)),
                    None,
                    None,
                    None,
                ),
                Ok(Farkas::NegativeEvidence { atom, x, value }) => section(
                    "negative_evidence",
                    false,
                    None,
                    None,
                    Some(atom),
                    Some(nums(&x)),
                    Some(Num(value)),
                ),
                Err(e @ Error::Precondition(_)) => {
                    ctx.notes.push(e.to_string());
                    section("undecided", false, None, None, None, None, None)
                }
                Err(e) => return Err(e.into()),
            });
        }
        Command::ProbeRegularity => {
            let phi = ctx.phi()?;
            let grid = ctx.y_grid(phi.dx(), phi.atom_count(), || default_y_grid(phi))?;
            let p = regularity_probe(phi, &grid, tol)?;
            sections.push(Section::Probe {
                rows: p
                    .points
                    .iter()
                    .map(|q| GridRow {
                        y: point(&q.y),
                        lhs: v(&q.lhs),
                        rhs: v(&q.min_value),
                        residual: v(&q.residual),
                        attainment: Some(q.attainment.clone()),
                    })
                    .collect(),
                verdict: p.verdict,
                pass: p.verdict == Verdict::Verified,
                tol: Num(tol),
            });
        }
    }
    let pass = match cmd {
        Command::Conjugate => None,
        _ => Some(sections.iter().all(section_pass)),
    };
    Ok(Report {
        digest: inst.digest.clone(),
        command: cmd.name().into(),
        scheme: inst.file.scheme.name().into(),
        atoms,
        tol: Num(tol),
        pass,
        results: sections,
        notes: ctx.notes,
    })
}

fn section_pass(s: &Section) -> bool {
    match s {
        Section::Conjugate { .. } => true,
        Section::Solve { pass, .. }
        | Section::YoungFenchel { pass, .. }
        | Section::MoreauRockafellar { pass, .. }
        | Section::Optimality { pass, .. }
        | Section::Farkas { pass, .. }
        | Section::Probe { pass, .. } => *pass,
    }
}
