//! Serializable report types for the command-line front end. JSON output is
//! the serde form of these structs; parse(print(x)) round-trips.

use serde::{Deserialize, Serialize};

use crate::charsum::AuditReport;
use crate::closed_form::PartitionUsed;
use crate::oracle::Lemma14Report;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussSection {
    pub value: String,
    pub residual: f64,
    pub escalated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySection {
    pub dp: Option<String>,
    pub brute_force: Option<String>,
    pub gauss: Option<GaussSection>,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub p: u64,
    pub s: u32,
    pub m: u32,
    pub n: u32,
    pub case: String,
    pub value: String,
    pub partitions: Vec<PartitionUsed>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub p: u64,
    pub s: u32,
    pub m: u32,
    pub n: u32,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub k: u32,
    pub first: String,
    pub second_abs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionsReport {
    pub p: u64,
    /// "A^2+2B^2" or "C^2+D^2".
    pub form: String,
    pub rows: Vec<PartitionRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditCliReport {
    pub lemmas: AuditReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_values: Option<Lemma14Report>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub kind: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dp: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced: Option<Vec<u64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_report_round_trips() {
        let rep = CountReport {
            p: 3,
            s: 4,
            m: 3,
            n: 3,
            case: "T1".into(),
            value: "7041".into(),
            partitions: vec![],
            notes: vec!["x".into()],
            verify: Some(VerifySection {
                dp: Some("7041".into()),
                brute_force: None,
                gauss: Some(GaussSection { value: "7041".into(), residual: 1e-9, escalated: false }),
                agree: true,
            }),
        };
        let json = serde_json::to_string(&rep).unwrap();
        let back: CountReport = serde_json::from_str(&json).unwrap();
        assert_eq!(rep, back);
    }

    #[test]
    fn table_report_round_trips() {
        let rep = Table1Report {
            rows: vec![Table1Row {
                p: 3,
                s: 4,
                m: 3,
                n: 3,
                expected: "7041".into(),
                computed: "7041".into(),
                pass: true,
            }],
            all_pass: true,
        };
        let json = serde_json::to_string(&rep).unwrap();
        assert_eq!(rep, serde_json::from_str::<Table1Report>(&json).unwrap());
    }

    #[test]
    fn extension_report_round_trips() {
        let rep = ExtensionReport {
            kind: "coprime".into(),
            value: "7041".into(),
            dp: Some("7041".into()),
            agree: Some(true),
            reduced: None,
        };
        let json = serde_json::to_string(&rep).unwrap();
        assert_eq!(rep, serde_json::from_str::<ExtensionReport>(&json).unwrap());
    }
}
