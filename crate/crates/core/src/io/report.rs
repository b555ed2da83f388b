//! Reports and their JSON and text renderings.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::num::Num;
use crate::duality::{Attainment, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub digest: String,
    pub command: String,
    pub scheme: String,
    pub atoms: usize,
    pub tol: Num,
    /// `None` when nothing was checked.
    pub pass: Option<bool>,
    pub results: Vec<Section>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.pass {
            Some(false) => 1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub y: Vec<Vec<Num>>,
    pub lhs: Vec<Num>,
    pub rhs: Vec<Num>,
    pub residual: Vec<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attainment: Option<Vec<Attainment>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Section {
    Conjugate {
        kinds: Vec<String>,
        grid: Vec<Vec<Num>>,
        /// One row per grid point, one value per atom.
        values: Vec<Vec<Num>>,
    },
    Solve {
        primal: Vec<Num>,
        dual: Vec<Num>,
        gap: Vec<Num>,
        primal_attained: Vec<bool>,
        dual_attained: Vec<bool>,
        dual_attainment: Vec<Attainment>,
        primal_minimizer: Option<Vec<Num>>,
        dual_solution: Option<Vec<Vec<Num>>>,
        regularity: Verdict,
        pass: bool,
        tol: Num,
    },
    YoungFenchel {
        gap: Vec<Num>,
        subgradient: Vec<bool>,
        pass: bool,
        tol: Num,
    },
    MoreauRockafellar {
        rows: Vec<GridRow>,
        max_residual: Num,
        pass: bool,
        tol: Num,
    },
    Optimality {
        residual_i: Vec<Num>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        residual_ii: Option<Vec<Num>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        diagnostic: Option<String>,
        pass: bool,
        tol: Num,
    },
    Farkas {
        outcome: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        z: Option<Vec<Vec<Num>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        conjugate_values: Option<Vec<Num>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        atom: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<Vec<Num>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<Num>,
        pass: bool,
        tol: Num,
    },
    Probe {
        rows: Vec<GridRow>,
        verdict: Verdict,
        pass: bool,
        tol: Num,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        Format::Text => render_text(report).into_bytes(),
    }
}

fn t(n: Num) -> String {
    let v = n.0;
    if v == 0.0 {
        "0".into()
    } else if v.is_finite() && (v.abs() < 1e-4 || v.abs() >= 1e7) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn tv(v: &[Num]) -> String {
    let parts: Vec<String> = v.iter().map(|&n| t(n)).collect();
    format!("({})", parts.join(", "))
}

/// The serialized name of a unit variant.
fn label<S: Serialize>(v: &S) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn status(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn render_rows(out: &mut String, rows: &[GridRow], atoms: usize) {
    for r in rows {
        for i in 0..atoms {
            let y = r.y.get(i).map(|v| tv(v)).unwrap_or_default();
            let _ = write!(
                out,
                "  y {y:<20} atom {i}  lhs {:<14} rhs {:<14} residual {}",
                t(r.lhs[i]),
                t(r.rhs[i]),
                t(r.residual[i])
            );
            if let Some(a) = &r.attainment {
                let _ = write!(out, "  {}", label(&a[i]));
            }
            out.push('\n');
        }
    }
}

pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "instance  {}", r.digest);
    let _ = writeln!(out, "command   {}", r.command);
    let _ = writeln!(out, "scheme    {}", r.scheme);
    let _ = writeln!(out, "atoms     {}", r.atoms);
    let _ = writeln!(out, "tol       {}", t(r.tol));
    let _ = writeln!(out, "status    {}", r.pass.map_or("n/a", status));
    for s in &r.results {
        out.push('\n');
        match s {
            Section::Conjugate { kinds, grid, values } => {
                let _ = writeln!(out, "conjugate  {}", kinds.join(", "));
                for (y, row) in grid.iter().zip(values) {
                    let _ = writeln!(out, "  y {:<20} {}", tv(y), tv(row));
                }
            }
            Section::Solve {
                primal,
                dual,
                gap,
                primal_attained,
                dual_attained,
                primal_minimizer,
                dual_solution,
                regularity,
                pass,
                ..
            } => {
                let _ = writeln!(out, "solve  {}  regularity {}", status(*pass), label(regularity));
                for i in 0..primal.len() {
                    let _ = writeln!(
                        out,
                        "  atom {i}  primal {:<14} dual {:<14} gap {:<10} primal_attained {:<5} dual_attained {}",
                        t(primal[i]),
                        t(dual[i]),
                        t(gap[i]),
                        primal_attained[i],
                        dual_attained[i]
                    );
                }
                if let Some(x) = primal_minimizer {
                    let _ = writeln!(out, "  primal minimizer {}", tv(x));
                }
                if let Some(z) = dual_solution {
                    for (i, zi) in z.iter().enumerate() {
                        let _ = writeln!(out, "  dual solution atom {i} {}", tv(zi));
                    }
                }
            }
            Section::YoungFenchel { gap, subgradient, pass, .. } => {
                let _ = writeln!(out, "young_fenchel  {}", status(*pass));
                for (i, (g, s)) in gap.iter().zip(subgradient).enumerate() {
                    let _ = writeln!(out, "  atom {i}  gap {:<14} subgradient {s}", t(*g));
                }
            }
            Section::MoreauRockafellar { rows, max_residual, pass, .. } => {
                let _ = writeln!(out, "moreau_rockafellar  {}  max residual {}", status(*pass), t(*max_residual));
                render_rows(&mut out, rows, r.atoms);
            }
            Section::Optimality {
                residual_i,
                residual_ii,
                diagnostic,
                pass,
                ..
            } => {
                let _ = writeln!(out, "optimality  {}", status(*pass));
                if let Some(d) = diagnostic {
                    let _ = writeln!(out, "  {d}");
                }
                for (i, a) in residual_i.iter().enumerate() {
                    let _ = write!(out, "  atom {i}  residual {}", t(*a));
                    if let Some(b) = residual_ii {
                        let _ = write!(out, "  residual (ii) {}", t(b[i]));
                    }
                    out.push('\n');
                }
            }
            Section::Farkas {
                outcome,
                z,
                atom,
                x,
                value,
                pass,
                ..
            } => {
                let _ = writeln!(out, "farkas  {}  {outcome}", status(*pass));
                if let Some(z) = z {
                    for (i, zi) in z.iter().enumerate() {
                        let _ = writeln!(out, "  atom {i}  z {}", tv(zi));
                    }
                }
                if let (Some(a), Some(x), Some(v)) = (atom, x, value) {
                    let _ = writeln!(out, "  atom {a}  x {}  value {}", tv(x), t(*v));
                }
            }
            Section::Probe { rows, verdict, pass, .. } => {
                let _ = writeln!(out, "probe_regularity  {}  verdict {}", status(*pass), label(verdict));
                render_rows(&mut out, rows, r.atoms);
            }
        }
    }
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}
