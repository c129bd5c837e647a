//! Instance, 3-partition and result file formats.
//!
//! Instance files are JSON with unknown fields rejected. The canonical
//! writer prints every float with 17 significant digits, so reading a
//! canonical file and writing it back is byte-identical.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{bits, Matrix, Problem, SystemInstance, Utility};
use crate::reduction::ThreePartitionInstance;
use crate::report::SolveReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    MinPower,
    MaxUtility,
}

impl From<ProblemKind> for Problem {
    fn from(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::MinPower => Problem::MinPower,
            ProblemKind::MaxUtility => Problem::MaxUtility,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilityKind {
    H1,
    H2,
    H3,
    H4,
}

impl From<UtilityKind> for Utility {
    fn from(kind: UtilityKind) -> Self {
        match kind {
            UtilityKind::H1 => Utility::SumRate,
            UtilityKind::H2 => Utility::ProportionalFair,
            UtilityKind::H3 => Utility::HarmonicMean,
            UtilityKind::H4 => Utility::MinRate,
        }
    }
}

impl From<Utility> for UtilityKind {
    fn from(u: Utility) -> Self {
        match u {
            Utility::SumRate => UtilityKind::H1,
            Utility::ProportionalFair => UtilityKind::H2,
            Utility::HarmonicMean => UtilityKind::H3,
            Utility::MinRate => UtilityKind::H4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub problem: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility: Option<UtilityKind>,
    #[serde(rename = "K")]
    pub receivers: usize,
    #[serde(rename = "N")]
    pub subcarriers: usize,
    /// `K` rows of `N` entries.
    pub gains: Vec<Vec<f64>>,
    pub noises: Vec<Vec<f64>>,
    pub caps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<f64>>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("instance file: {e}")))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                file.schema_version
            )));
        }
        Ok(file)
    }

    pub fn from_instance(
        instance: &SystemInstance,
        problem: Problem,
        utility: Option<Utility>,
    ) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            problem: match problem {
                Problem::MinPower => ProblemKind::MinPower,
                Problem::MaxUtility => ProblemKind::MaxUtility,
            },
            utility: utility.map(UtilityKind::from),
            receivers: instance.num_receivers(),
            subcarriers: instance.num_subcarriers(),
            gains: instance.gains.to_rows(),
            noises: instance.noises.to_rows(),
            caps: instance.subcarrier_caps.clone(),
            budget: instance.total_budget,
            targets: instance.rate_targets.clone(),
        }
    }

    /// Builds the instance, checking the declared `K` and `N` against the
    /// arrays.
    pub fn to_instance(&self) -> Result<SystemInstance> {
        let gains = Matrix::from_rows(&self.gains)?;
        let noises = Matrix::from_rows(&self.noises)?;
        for (name, m) in [("gains", &gains), ("noises", &noises)] {
            if m.rows() != self.receivers || m.cols() != self.subcarriers {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, header declares K = {}, N = {}",
                    m.rows(),
                    m.cols(),
                    self.receivers,
                    self.subcarriers
                )));
            }
        }
        Ok(SystemInstance {
            gains,
            noises,
            subcarrier_caps: self.caps.clone(),
            total_budget: self.budget,
            rate_targets: self.targets.clone(),
        })
    }

    pub fn problem(&self) -> Problem {
        self.problem.into()
    }

    pub fn utility(&self) -> Utility {
        self.utility.map_or(Utility::SumRate, Utility::from)
    }

    /// Canonical pretty JSON, one matrix row per line, 17 significant digits.
    pub fn to_json_canonical(&self) -> String {
        let mut out = String::from("{\n");
        let mut fields: Vec<(&str, String)> = vec![
            ("schema_version", self.schema_version.to_string()),
            ("problem", quoted(problem_label(self.problem))),
        ];
        if let Some(u) = self.utility {
            fields.push(("utility", quoted(utility_label(u))));
        }
        fields.push(("K", self.receivers.to_string()));
        fields.push(("N", self.subcarriers.to_string()));
        fields.push(("gains", matrix(&self.gains)));
        fields.push(("noises", matrix(&self.noises)));
        fields.push(("caps", vector(&self.caps)));
        if let Some(b) = self.budget {
            fields.push(("budget", float(b)));
        }
        if let Some(t) = &self.targets {
            fields.push(("targets", vector(t)));
        }
        let last = fields.len() - 1;
        for (i, (name, value)) in fields.iter().enumerate() {
            let comma = if i == last { "" } else { "," };
            let _ = writeln!(out, "  \"{name}\": {value}{comma}");
        }
        out.push_str("}\n");
        out
    }
}

fn problem_label(p: ProblemKind) -> &'static str {
    match p {
        ProblemKind::MinPower => "min_power",
        ProblemKind::MaxUtility => "max_utility",
    }
}

fn utility_label(u: UtilityKind) -> &'static str {
    Utility::from(u).label()
}

fn quoted(s: &str) -> String {
    format!("\"{s}\"")
}

/// 17 significant digits in exponent form, e.g. `1.0000000000000000e0`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn vector(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| float(x)).collect();
    format!("[{}]", items.join(", "))
}

fn matrix(rows: &[Vec<f64>]) -> String {
    if rows.is_empty() {
        return "[]".into();
    }
    let lines: Vec<String> = rows.iter().map(|r| format!("    {}", vector(r))).collect();
    format!("[\n{}\n  ]", lines.join(",\n"))
}

/// `{"items": [...], "bound": B, "groups": K}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub items: Vec<u64>,
    pub bound: u64,
    pub groups: usize,
}

impl PartitionFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("3-partition file: {e}")))
    }

    pub fn to_instance(&self) -> Result<ThreePartitionInstance> {
        ThreePartitionInstance::new(self.items.clone(), self.bound, self.groups)
    }
}

pub const CSV_HEADER: &str = "receiver,subcarrier,power,rate_contrib";

/// Writes every allocation entry, then a `#` summary line.
pub fn write_report_csv<W: Write>(
    out: &mut W,
    instance: &SystemInstance,
    report: &SolveReport,
    method: &str,
) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let alloc = &report.allocation;
    for k in 0..alloc.num_receivers() {
        for n in 0..alloc.num_subcarriers() {
            let p = alloc.get(k, n);
            let contrib = if p == 0.0 {
                0.0
            } else {
                bits(instance.ratio(k, n) * p)
            };
            writeln!(out, "{k},{n},{p},{contrib}")?;
        }
    }
    writeln!(out, "# {}", summary_line(report, method))
}

pub fn summary_line(report: &SolveReport, method: &str) -> String {
    let rates: Vec<String> = report.rates.rates.iter().map(|r| r.to_string()).collect();
    format!(
        "status={} method={method} value={} total_power={} rates=[{}] assignments_explored={} elapsed_s={:.6}",
        report.status.label(),
        report.value,
        report.total_power,
        rates.join(" "),
        report.assignments_explored,
        report.elapsed
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "schema_version": 1, "problem": "max_utility", "utility": "h1",
        "K": 1, "N": 2, "gains": [[1, 3]], "noises": [[1, 1]],
        "caps": [10, 10], "budget": 2
    }"#;

    #[test]
    fn parse_example() {
        let file = InstanceFile::from_json(EXAMPLE).unwrap();
        assert_eq!(file.problem(), Problem::MaxUtility);
        assert_eq!(file.utility(), Utility::SumRate);
        let inst = file.to_instance().unwrap();
        assert_eq!(inst.gains.row(0), &[1.0, 3.0]);
        assert_eq!(inst.total_budget, Some(2.0));
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let mut file = InstanceFile::from_json(EXAMPLE).unwrap();
        file.gains[0][0] = 0.1 + 0.2;
        file.caps[1] = 1.0 / 3.0;
        let text = file.to_json_canonical();
        let back = InstanceFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json_canonical(), text);
        assert!(text.contains("\"budget\": 2.0000000000000000e0"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = EXAMPLE.replace("\"budget\": 2", "\"budget\": 2, \"extra\": 1");
        assert!(InstanceFile::from_json(&text).is_err());
    }

    #[test]
    fn header_must_match_arrays() {
        let text = EXAMPLE.replace("\"N\": 2", "\"N\": 3");
        let file = InstanceFile::from_json(&text).unwrap();
        assert!(matches!(file.to_instance(), Err(Error::Dimension(_))));
    }

    #[test]
    fn partition_file() {
        let file =
            PartitionFile::from_json(r#"{"items": [6,6,7,7,7,7], "bound": 20, "groups": 2}"#)
                .unwrap();
        assert_eq!(file.to_instance().unwrap().groups(), 2);
        assert!(
            PartitionFile::from_json(r#"{"items": [], "bound": 1, "groups": 0, "x": 1}"#).is_err()
        );
    }
}
