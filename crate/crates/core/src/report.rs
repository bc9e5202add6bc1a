//! JSON report schema (version 1) shared by the CLI and the self-check.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), amplitudes as
//! `[re, im]` pairs, and every map keeps schedule order, so identical inputs
//! produce byte-identical output.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::analyzer::{ClassificationReport, EntangledLabel, Family, GroupTable, Sign};
use crate::cluster::{CorrectionTable, PreparationRecord};
use crate::fermion::PovmReport;
use crate::qstate::{Outcomes, StateVector};

pub const SCHEMA: u32 = 1;

/// A float serialized with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn nums(xs: &[f64]) -> Vec<Num> {
    xs.iter().map(|&x| Num(x)).collect()
}

pub fn amplitudes(s: &StateVector) -> Vec<[Num; 2]> {
    s.amps().iter().map(|a| [Num(a.re), Num(a.im)]).collect()
}

struct OrderedOutcomes<'a>(&'a Outcomes);

impl Serialize for OrderedOutcomes<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (label, bit) in self.0.iter() {
            m.serialize_entry(label, &bit)?;
        }
        m.end()
    }
}

#[derive(Serialize)]
struct PrepRecordJson<'a> {
    n: usize,
    outcomes: &'a str,
    corrections: &'a [String],
    probability: Num,
    stabilizer_expectations: Vec<Num>,
    matches_canonical: bool,
    pass: bool,
    amplitudes: Vec<[Num; 2]>,
}

#[derive(Serialize)]
struct PrepReportJson<'a> {
    schema: u32,
    command: &'static str,
    n: usize,
    mode: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    records: Vec<PrepRecordJson<'a>>,
    pass: bool,
}

pub fn preparation_json(n: usize, mode: &str, seed: Option<u64>, recs: &[PreparationRecord]) -> String {
    let report = PrepReportJson {
        schema: SCHEMA,
        command: "prepare",
        n,
        mode,
        seed,
        records: recs
            .iter()
            .map(|r| PrepRecordJson {
                n: r.n,
                outcomes: &r.outcomes,
                corrections: &r.corrections,
                probability: Num(r.probability),
                stabilizer_expectations: nums(&r.stabilizer_expectations),
                matches_canonical: r.matches_canonical,
                pass: r.pass,
                amplitudes: amplitudes(&r.state),
            })
            .collect(),
        pass: recs.iter().all(|r| r.pass),
    };
    to_string(&report)
}

#[derive(Serialize)]
struct BranchJson<'a> {
    outcomes: OrderedOutcomes<'a>,
    probability: Num,
    label: String,
}

#[derive(Serialize)]
struct DistJson {
    label: String,
    probability: Num,
}

#[derive(Serialize)]
struct ClassificationJson<'a> {
    schema: u32,
    command: &'static str,
    family: &'static str,
    input: &'a str,
    mode: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    branches: Vec<BranchJson<'a>>,
    label_distribution: Vec<DistJson>,
    deterministic: bool,
    destroyed_qubits: usize,
}

pub fn classification_json(rep: &ClassificationReport, mode: &str, seed: Option<u64>) -> String {
    let json = ClassificationJson {
        schema: SCHEMA,
        command: "analyze",
        family: rep.family.name(),
        input: &rep.input,
        mode,
        seed,
        branches: rep
            .branches
            .iter()
            .map(|b| BranchJson {
                outcomes: OrderedOutcomes(&b.outcomes),
                probability: Num(b.probability),
                label: b.label.to_string(),
            })
            .collect(),
        label_distribution: rep
            .label_distribution()
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(l, p)| DistJson {
                label: l.to_string(),
                probability: Num(p),
            })
            .collect(),
        deterministic: rep.deterministic,
        destroyed_qubits: rep.destroyed_qubits,
    };
    to_string(&json)
}

#[derive(Serialize)]
struct RuleJson<'a> {
    pattern: &'a str,
    inline: Vec<String>,
    deferred: String,
    deferred_sites: Vec<String>,
}

#[derive(Serialize)]
struct TableJson<'a> {
    n: usize,
    rules: Vec<RuleJson<'a>>,
}

#[derive(Serialize)]
struct Table1Json<'a> {
    schema: u32,
    derived: bool,
    description: &'static str,
    tables: Vec<TableJson<'a>>,
    verified: bool,
}

fn site_names(factors: &[crate::qstate::Pauli]) -> Vec<String> {
    factors
        .iter()
        .enumerate()
        .filter(|(_, p)| **p != crate::qstate::Pauli::I)
        .map(|(q, p)| format!("{}{}", p.symbol(), q + 1))
        .collect()
}

pub fn table1_json(tables: &[CorrectionTable], verified: bool) -> String {
    let json = Table1Json {
        schema: SCHEMA,
        derived: true,
        description: "feedforward per detector pattern (P1 first, 1 = even): inline X before the \
                      Hadamard, or one deferred Pauli frame after the chain",
        tables: tables
            .iter()
            .map(|t| TableJson {
                n: t.n,
                rules: t
                    .rules
                    .iter()
                    .map(|r| RuleJson {
                        pattern: &r.pattern,
                        inline: r
                            .inline
                            .iter()
                            .map(|(p, q)| format!("{}{}", p.symbol(), q + 1))
                            .collect(),
                        deferred: r.deferred.factors().iter().map(|p| p.symbol()).collect(),
                        deferred_sites: site_names(r.deferred.factors()),
                    })
                    .collect(),
            })
            .collect(),
        verified,
    };
    to_string(&json)
}

#[derive(Serialize)]
struct SetJson {
    p1: u8,
    p2: u8,
    classes: Vec<&'static str>,
}

#[derive(Serialize)]
struct SplitJson {
    p3: u8,
    classes: Vec<&'static str>,
}

#[derive(Serialize)]
struct GroupRowJson {
    class: &'static str,
    representative: [String; 2],
    p1: u8,
    p2: u8,
    p3: u8,
    oracle_match: bool,
}

#[derive(Serialize)]
struct Table2Json {
    schema: u32,
    derived: bool,
    description: &'static str,
    sets: Vec<SetJson>,
    p3_split: Vec<SplitJson>,
    rows: Vec<GroupRowJson>,
    verified: bool,
}

/// `oracle_match[i]` says whether row `i` agrees with the bitstring oracle.
pub fn table2_json(table: &GroupTable, oracle_match: &[bool], verified: bool) -> String {
    use crate::analyzer::roman;
    let json = Table2Json {
        schema: SCHEMA,
        derived: true,
        description: "four-qubit classes grouped by detector readouts (1 = even): P1 = Z(1,2), \
                      P2 = Z(3,4), P3 = Z(2,3)",
        sets: table
            .sets()
            .into_iter()
            .map(|((p1, p2), cs)| SetJson {
                p1,
                p2,
                classes: cs.into_iter().map(roman).collect(),
            })
            .collect(),
        p3_split: table
            .p3_split()
            .into_iter()
            .map(|(p3, cs)| SplitJson {
                p3,
                classes: cs.into_iter().map(roman).collect(),
            })
            .collect(),
        rows: table
            .rows
            .iter()
            .zip(oracle_match)
            .map(|(r, ok)| GroupRowJson {
                class: roman(r.class),
                representative: {
                    let (a, b) = EntangledLabel::new(Family::Quad, r.class, Sign::Plus)
                        .expect("class from the table")
                        .kets();
                    [format!("{a:04b}"), format!("{b:04b}")]
                },
                p1: r.p1,
                p2: r.p2,
                p3: r.p3,
                oracle_match: *ok,
            })
            .collect(),
        verified,
    };
    to_string(&json)
}

#[derive(Serialize)]
struct PovmJson {
    schema: u32,
    command: &'static str,
    samples: usize,
    seed: u64,
    max_prob_dev: Num,
    max_state_dev: Num,
    phase_sweep_pass: bool,
    plus_plus_p_one: Num,
    tolerance: Num,
    pass: bool,
}

pub fn povm_json(r: &PovmReport) -> String {
    to_string(&PovmJson {
        schema: SCHEMA,
        command: "fermion-check",
        samples: r.samples,
        seed: r.seed,
        max_prob_dev: Num(r.max_prob_dev),
        max_state_dev: Num(r.max_state_dev),
        phase_sweep_pass: r.phase_sweep_pass,
        plus_plus_p_one: Num(r.plus_plus_p_one),
        tolerance: Num(r.tolerance),
        pass: r.pass,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}
