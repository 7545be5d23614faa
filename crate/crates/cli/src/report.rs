//! Machine-readable verdict reports. Field names and layout are frozen in
//! `schemas/report.schema.json`; identical inputs and seeds produce
//! byte-identical JSON.

use std::collections::BTreeMap;

use serde::Serialize;

use isoconvex::criteria::{CheckConfig, Status, Verdict};
use isoconvex::oracle::{OracleReport, OracleStatus, SampleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Overall {
    PolyconvexConsistent,
    NotRankOneConvex,
    Inconclusive,
}

impl Overall {
    pub fn exit_code(self) -> i32 {
        match self {
            Overall::PolyconvexConsistent => 0,
            Overall::NotRankOneConvex => 1,
            Overall::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyDesc {
    /// "zoo" or "expr".
    pub source: &'static str,
    pub name_or_src: String,
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub check: CheckConfig,
    pub oracle: Option<SampleSpec>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: &'static str,
    pub energy: EnergyDesc,
    pub representation: String,
    pub checks: Vec<Verdict>,
    pub oracle: Option<OracleReport>,
    pub config: ConfigEcho,
    pub overall: Overall,
}

/// Aggregate criterion verdicts and an optional oracle run.
///
/// Any analytic failure or oracle violation decides against the energy.
/// Consistency requires every applicable check to pass and the oracle, when
/// it ran, to stay quiet; when nothing at all was checked the result is
/// inconclusive rather than vacuously positive.
pub fn overall(checks: &[Verdict], oracle: Option<&OracleReport>) -> Overall {
    let any_fail = checks.iter().any(|c| c.status == Status::Fail);
    let violation = oracle
        .map(|o| o.status == OracleStatus::Violation)
        .unwrap_or(false);
    if any_fail || violation {
        return Overall::NotRankOneConvex;
    }
    let all_pass = checks.iter().all(|c| c.status == Status::Pass);
    let has_evidence = !checks.is_empty() || oracle.is_some();
    if all_pass && has_evidence {
        Overall::PolyconvexConsistent
    } else {
        Overall::Inconclusive
    }
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let e = &report.energy;
    out.push_str(&format!("energy: {} ({})\n", e.name_or_src, e.source));
    if !e.params.is_empty() {
        let kv: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("params: {}\n", kv.join(" ")));
    }
    out.push_str(&format!("representation: {}\n", report.representation));
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        out.push_str(&format!(
            "{:<24} {:<13} min margin {:+.3e}",
            c.criterion_id, status, c.min_margin
        ));
        if let Some(w) = &c.first_violation {
            out.push_str(&format!(
                "  first violation at {} = {:.6}",
                c.grid.variable, w.point
            ));
        }
        out.push('\n');
    }
    if let Some(o) = &report.oracle {
        match o.status {
            OracleStatus::ConsistentConvex => out.push_str(&format!(
                "oracle: CONSISTENT_CONVEX over {} points ({} skipped)\n",
                o.points_tested, o.points_skipped
            )),
            OracleStatus::Violation => {
                let v = o.violation.as_ref().unwrap();
                out.push_str(&format!(
                    "oracle: VIOLATION at sample {} (second difference {:.3e})\n",
                    v.sample_index, v.second_difference
                ));
            }
        }
    }
    let overall = match report.overall {
        Overall::PolyconvexConsistent => "POLYCONVEX_CONSISTENT",
        Overall::NotRankOneConvex => "NOT_RANK_ONE_CONVEX",
        Overall::Inconclusive => "INCONCLUSIVE",
    };
    out.push_str(&format!("overall: {overall}\n"));
    out
}
