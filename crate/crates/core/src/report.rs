//! Machine-readable outputs. Reported numbers carry 6 significant digits.

use std::io::Write;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::greedy::{GreedyResult, WelfareCurve};
use crate::imperfect::SimulationReport;
use crate::oracle::OracleSolution;

/// `x` rendered with 6 significant digits, trailing zeros trimmed.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 30) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

pub fn round_sig6(x: f64) -> f64 {
    fmt_sig6(x).parse().unwrap_or(x)
}

fn sig6<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig6(*x))
}

#[derive(Debug, PartialEq, Serialize)]
pub struct SplitJson {
    pub ind: u64,
    pub alt: u32,
    #[serde(serialize_with = "sig6")]
    pub eff: f64,
}

#[derive(Debug, PartialEq, Serialize)]
pub struct ResultJson {
    #[serde(serialize_with = "sig6")]
    pub welfare: f64,
    #[serde(serialize_with = "sig6")]
    pub budget_given: f64,
    #[serde(serialize_with = "sig6")]
    pub budget_used: f64,
    #[serde(serialize_with = "sig6")]
    pub gap_bound: f64,
    pub split: Option<SplitJson>,
    pub iterations: usize,
}

impl From<&GreedyResult> for ResultJson {
    fn from(r: &GreedyResult) -> Self {
        ResultJson {
            welfare: r.welfare,
            budget_given: r.budget_given,
            budget_used: r.budget_used,
            gap_bound: r.gap_bound,
            split: r.split.map(|s| SplitJson {
                ind: s.ind_id.0,
                alt: s.alt_id.0,
                eff: s.incr_eff,
            }),
            iterations: r.iterations,
        }
    }
}

impl ResultJson {
    /// Exact solutions use the same schema, with no split and zero gap.
    pub fn from_oracle(sol: &OracleSolution, budget: f64) -> Self {
        ResultJson {
            welfare: sol.welfare,
            budget_given: budget,
            budget_used: sol.spend,
            gap_bound: 0.0,
            split: None,
            iterations: 0,
        }
    }
}

#[derive(Debug, PartialEq, Serialize)]
pub struct SimulationJson {
    #[serde(serialize_with = "sig6")]
    pub budget_spent: f64,
    pub proposals: usize,
    pub accepted: usize,
    #[serde(serialize_with = "sig6")]
    pub acceptance_rate: f64,
    #[serde(serialize_with = "sig6")]
    pub welfare_kg: f64,
}

impl From<&SimulationReport> for SimulationJson {
    fn from(r: &SimulationReport) -> Self {
        SimulationJson {
            budget_spent: r.budget_spent,
            proposals: r.proposals,
            accepted: r.acceptances,
            acceptance_rate: r.acceptance_rate,
            welfare_kg: r.welfare,
        }
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn flush<W: Write>(wtr: csv::Writer<W>) -> Result<()> {
    wtr.into_inner()
        .map_err(|e| Error::io("<csv writer>", e.into_error()))?
        .flush()
        .map_err(|e| Error::io("<csv writer>", e))
}

/// `ind_id,chosen_alt_id,incentive_eur,social_gain_kg`
pub fn write_allocation_csv<W: Write>(result: &GreedyResult, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["ind_id", "chosen_alt_id", "incentive_eur", "social_gain_kg"])?;
    for c in result.allocation.choices() {
        wtr.write_record([
            c.ind_id.to_string(),
            c.alt_id.to_string(),
            fmt_sig6(c.incentive),
            fmt_sig6(c.social_gain),
        ])?;
    }
    flush(wtr)
}

/// `spend_eur,welfare_kg`, one row per breakpoint.
pub fn write_curve_csv<W: Write>(curve: &WelfareCurve, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["spend_eur", "welfare_kg"])?;
    for b in curve.breakpoints() {
        wtr.write_record([fmt_sig6(b.spend), fmt_sig6(b.welfare)])?;
    }
    flush(wtr)
}

/// `step,ind_id,alt_id,amount_eur,accepted`
pub fn write_proposal_log_csv<W: Write>(report: &SimulationReport, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["step", "ind_id", "alt_id", "amount_eur", "accepted"])?;
    for e in &report.log {
        wtr.write_record([
            e.step.to_string(),
            e.ind_id.to_string(),
            e.alt_id.to_string(),
            fmt_sig6(e.amount),
            e.accepted.to_string(),
        ])?;
    }
    flush(wtr)
}
