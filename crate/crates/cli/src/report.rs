//! Run reports and their table, JSON and CSV renderings.

use lcg_core::model::{Assumption, OwnActionBranch};
use lcg_core::{
    ConservativenessProfile, EquilibriumKind, EquilibriumResult, PoAReport, StabilityReport, Trajectory,
    ValidationReport,
};
use serde::{Deserialize, Serialize};

use crate::format::{csv_row, indexed_header, key_values, sig12, user_table};
use crate::scenario::ScenarioFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Payload {
    Equilibrium(EquilibriumResult),
    Stability(StabilityReport),
    PriceOfAnarchy(PoAReport),
    Conservativeness { profile: ConservativenessProfile, pareto: bool },
    Validation(ValidationReport),
    Trajectory(Trajectory),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub scenario: ScenarioFile,
    pub result: Payload,
    pub duration_seconds: f64,
}

enum Value {
    Num(f64),
    Text(String),
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable rendering. Trajectories have none.
    pub fn to_table(&self) -> Option<String> {
        Some(match &self.result {
            Payload::Equilibrium(eq) => {
                user_table(kind_label(eq.kind), &[("a_i", &eq.actions), ("u_i", &eq.utilities)])
            }
            Payload::Conservativeness { profile, .. } => {
                let mut out = user_table("", &[("c_n", &profile.c)]);
                out.push('\n');
                out.push_str(&key_values(&self.table_entries()));
                out
            }
            Payload::Validation(report) => validation_table(report),
            Payload::Trajectory(_) => return None,
            _ => key_values(&self.table_entries()),
        })
    }

    pub fn to_csv(&self) -> String {
        match &self.result {
            Payload::Equilibrium(eq) => {
                let n = eq.actions.len();
                let mut out = csv_row(indexed_header("a", n).chain(indexed_header("u", n)));
                out.push_str(&csv_row(eq.actions.iter().chain(eq.utilities.iter()).map(|x| sig12(*x))));
                out
            }
            Payload::Trajectory(traj) => trajectory_csv(traj),
            Payload::Validation(report) => {
                let mut out = csv_row(["assumption", "passed", "worst_residual"].map(String::from));
                for c in &report.checks {
                    out.push_str(&csv_row([c.assumption.to_string(), c.passed.to_string(), sig12(c.worst_residual)]));
                }
                out
            }
            _ => {
                let mut out = csv_row(["quantity", "value"].map(String::from));
                for (name, value) in self.scalars() {
                    let v = match value {
                        Value::Num(x) => sig12(x),
                        Value::Text(t) => t,
                    };
                    out.push_str(&csv_row([name, v]));
                }
                out
            }
        }
    }

    fn table_entries(&self) -> Vec<(&'static str, String)> {
        let fmt = |x: f64| format!("{x:.4}");
        match &self.result {
            Payload::Stability(r) => vec![
                ("eigenvalues", r.spectrum.eigenvalues.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(" ")),
                ("spectral radius", fmt(r.spectrum.spectral_radius)),
                ("condition value", fmt(r.condition_value)),
                ("best response", verdict(r.br_converges).to_string()),
                ("jacobi eps bound", fmt(r.jacobi_epsilon_bound)),
            ],
            Payload::PriceOfAnarchy(r) => vec![
                ("gap", fmt(r.gap)),
                ("lower bound", fmt(r.lower_bound)),
                ("upper bound", fmt(r.upper_bound)),
            ],
            Payload::Conservativeness { profile, pareto } => {
                vec![("total", fmt(profile.total)), ("pareto optimal", pareto.to_string())]
            }
            _ => Vec::new(),
        }
    }

    fn scalars(&self) -> Vec<(String, Value)> {
        let mut out = Vec::new();
        match &self.result {
            Payload::Stability(r) => {
                for (i, x) in r.spectrum.eigenvalues.iter().enumerate() {
                    out.push((format!("eigenvalue_{}", i + 1), Value::Num(*x)));
                }
                out.push(("spectral_radius".into(), Value::Num(r.spectrum.spectral_radius)));
                out.push(("condition_value".into(), Value::Num(r.condition_value)));
                out.push(("br_converges".into(), Value::Text(r.br_converges.to_string())));
                out.push(("jacobi_epsilon_bound".into(), Value::Num(r.jacobi_epsilon_bound)));
            }
            Payload::PriceOfAnarchy(r) => {
                out.push(("gap".into(), Value::Num(r.gap)));
                out.push(("lower_bound".into(), Value::Num(r.lower_bound)));
                out.push(("upper_bound".into(), Value::Num(r.upper_bound)));
            }
            Payload::Conservativeness { profile, pareto } => {
                for (i, c) in profile.c.iter().enumerate() {
                    out.push((format!("c_{}", i + 1), Value::Num(*c)));
                }
                out.push(("total".into(), Value::Num(profile.total)));
                out.push(("pareto".into(), Value::Text(pareto.to_string())));
            }
            _ => {}
        }
        out
    }
}

fn kind_label(kind: EquilibriumKind) -> &'static str {
    match kind {
        EquilibriumKind::Nash => "NE",
        EquilibriumKind::ParetoPoint => "PB",
        EquilibriumKind::Conjectural => "CE",
    }
}

fn verdict(converges: bool) -> &'static str {
    if converges {
        "converges"
    } else {
        "diverges"
    }
}

fn validation_table(report: &ValidationReport) -> String {
    let mut entries: Vec<(String, String)> = [Assumption::A1, Assumption::A2, Assumption::A3, Assumption::A4]
        .iter()
        .map(|a| {
            let c = report.check(*a);
            let status = if c.passed { "pass" } else { "FAIL" };
            (a.to_string(), format!("{status}  worst residual {:.3e}", c.worst_residual))
        })
        .collect();
    for (i, branch) in report.own_action_branch.iter().enumerate() {
        let text = match branch {
            Some(OwnActionBranch::Insensitive) => "insensitive",
            Some(OwnActionBranch::Proportional) => "proportional",
            None => "-",
        };
        entries.push((format!("user {}", i + 1), format!("own-action branch {text}")));
    }
    let borrowed: Vec<(&str, String)> = entries.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    format!("{}samples  {}\n", key_values(&borrowed), report.samples)
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.records.first().map_or(0, |r| r.a.len());
    let header = std::iter::once("t".to_string())
        .chain(indexed_header("a", n))
        .chain(indexed_header("u", n))
        .chain(indexed_header("s", n));
    let mut out = csv_row(header);
    for r in &traj.records {
        let values = r.a.iter().chain(r.u.iter()).chain(r.s.iter()).map(|x| sig12(*x));
        out.push_str(&csv_row(std::iter::once(r.t.to_string()).chain(values)));
    }
    out
}
