//! The ten built-in acceptance checks, run by `fermicluster verify`.

use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::analyzer::{
    analyzer_for, basis_state, bitstring_parities, check_family, classify, derive_group_table,
    measurement_semantics_deviation, roman, verify_decompositions, EntangledLabel, Family, Sign,
};
use crate::cluster::{
    derive_correction_table, prepare_cluster_with, sweep_patterns, verify_correction_table,
    PrepMode, N_TABLE,
};
use crate::config::Tolerances;
use crate::fermion::{pbs_matrix, verify_parity_povm};
use crate::qstate::{Basis, StateVector};
use crate::report::Num;
use crate::{Exec, Result};

pub const GOLDEN_CHAIN2: &str = include_str!("../golden/chain2.json");
pub const GOLDEN_CHAIN4: &str = include_str!("../golden/chain4.json");

/// Seed shared by the random-state checks.
pub const SEED: u64 = 20_250_101;
pub const FERMION_SAMPLES: usize = 1000;
pub const SEMANTICS_SAMPLES: usize = 100;
pub const N_CHAIN_MAX: usize = 12;
pub const N_DETERMINISM_MAX: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

fn outcome(id: u8, name: &'static str, r: Result<(bool, String)>) -> CriterionResult {
    let (pass, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name,
        pass,
        detail,
    }
}

/// Amplitudes `[[re, im], …]` stored in a golden file.
pub fn golden_amplitudes(json: &str) -> std::result::Result<Vec<C64>, String> {
    let v: serde_json::Value = serde_json::from_str(json).map_err(|e| e.to_string())?;
    v["amplitudes"]
        .as_array()
        .ok_or("missing amplitudes")?
        .iter()
        .map(|pair| match pair.as_array().map(|p| p.as_slice()) {
            Some([re, im]) => Ok(C64::new(
                re.as_f64().ok_or("bad re")?,
                im.as_f64().ok_or("bad im")?,
            )),
            _ => Err("amplitude must be [re, im]".to_string()),
        })
        .collect()
}

fn bell_pair_check() -> Result<(bool, f64, f64)> {
    let plus = StateVector::plus_product(2)?;
    let (_, p, post) = plus.parity_check(0, 1, Basis::Z, Some(true))?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let target = StateVector::from_real(&[h, 0.0, 0.0, h])?;
    let dev = post.max_abs_diff(&target)?;
    Ok(((p - 0.5).abs() <= 1e-12 && dev <= 1e-12, p, dev))
}

pub fn criterion_1() -> CriterionResult {
    outcome(1, "parity gadget on |++>", (|| {
        let (ok, p, dev) = bell_pair_check()?;
        let best = (0..20)
            .map(|_| {
                let t = Instant::now();
                let _ = bell_pair_check();
                t.elapsed()
            })
            .min()
            .unwrap_or(Duration::MAX);
        let fast = best < Duration::from_millis(1);
        Ok((
            ok && fast,
            format!("p={p:.3} dev={dev:.1e} best={:.1}us", best.as_secs_f64() * 1e6),
        ))
    })())
}

fn golden_dev(n: usize, json: &str, tol: &Tolerances) -> Result<f64> {
    let golden = golden_amplitudes(json).map_err(crate::Error::MalformedSchedule)?;
    let rec = prepare_cluster_with(n, &PrepMode::Forced(vec![true; n - 1]), tol.verify, Exec::Sequential)?;
    let got = rec[0].state.amps();
    if got.len() != golden.len() {
        return Ok(f64::INFINITY);
    }
    Ok(got.iter().zip(&golden).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

pub fn criterion_2(tol: &Tolerances) -> CriterionResult {
    outcome(2, "golden two- and four-qubit", (|| {
        let d2 = golden_dev(2, GOLDEN_CHAIN2, tol)?;
        let d4 = golden_dev(4, GOLDEN_CHAIN4, tol)?;
        Ok((d2 <= 1e-12 && d4 <= 1e-12, format!("dev2={d2:.1e} dev4={d4:.1e}")))
    })())
}

pub fn criterion_3(tol: &Tolerances, exec: Exec) -> CriterionResult {
    outcome(3, "chain stabilizers N=2..12", (|| {
        let mut worst: f64 = 0.0;
        let mut failures = 0;
        let mut elapsed = Duration::ZERO;
        for n in 2..=N_CHAIN_MAX {
            let t = Instant::now();
            let sweep = sweep_patterns(n, tol.verify, exec)?;
            if n == N_CHAIN_MAX {
                elapsed = t.elapsed();
            }
            worst = worst.max(sweep.max_stabilizer_deviation);
            failures += sweep.failures.len();
        }
        let pass = failures == 0 && worst <= tol.verify && elapsed < Duration::from_secs(60);
        Ok((
            pass,
            format!(
                "max|<K>-1|={worst:.1e} failures={failures} N=12 sweep {:.2}s",
                elapsed.as_secs_f64()
            ),
        ))
    })())
}

pub fn criterion_4(tol: &Tolerances, exec: Exec) -> CriterionResult {
    outcome(4, "determinism after feedforward", (|| {
        let mut branches = 0;
        let mut failures = 0;
        for n in 2..=N_DETERMINISM_MAX {
            let recs = prepare_cluster_with(n, &PrepMode::Enumerate, tol.verify, exec)?;
            branches += recs.len();
            failures += recs.iter().filter(|r| !r.matches_canonical || !r.pass).count();
        }
        let mut tables_ok = true;
        for n in 2..=N_TABLE {
            tables_ok &= verify_correction_table(&derive_correction_table(n, exec)?)?;
        }
        Ok((
            failures == 0 && tables_ok,
            format!("{branches} branches, {failures} failures, deferred tables ok={tables_ok}"),
        ))
    })())
}

pub fn criterion_5(exec: Exec) -> CriterionResult {
    outcome(5, "Bell analyzer", (|| {
        let tree = analyzer_for(Family::Bell);
        let mut mapping_ok = true;
        for label in Family::Bell.labels() {
            let rep = classify(&tree, &basis_state(label)?, Some(label), exec)?;
            let expected = ((label.class == 1) as u8, (label.sign == Sign::Plus) as u8);
            mapping_ok &= rep.branches.len() == 1
                && rep.branches.iter().all(|b| {
                    (b.outcomes.get("P1"), b.outcomes.get("P2"))
                        == (Some(expected.0), Some(expected.1))
                });
        }
        let check = check_family(Family::Bell, exec)?;
        let disturbance = check.max_state_disturbance.unwrap_or(f64::INFINITY);
        Ok((
            mapping_ok && check.all_correct() && disturbance <= 1e-12,
            format!("mapping ok={mapping_ok} 1-F={disturbance:.1e}"),
        ))
    })())
}

pub fn criterion_6(exec: Exec) -> CriterionResult {
    outcome(6, "GHZ3 analyzer", (|| {
        let check = check_family(Family::Ghz3, exec)?;
        let branches: usize = check.inputs.iter().map(|i| i.1).sum();
        // + iff (click +, P3 = 1) or (click -, P3 = 0); both clicks must occur.
        let tree = analyzer_for(Family::Ghz3);
        let mut rule_ok = true;
        for sign in [Sign::Plus, Sign::Minus] {
            let label = EntangledLabel::new(Family::Ghz3, 1, sign)?;
            let rep = classify(&tree, &basis_state(label)?, Some(label), exec)?;
            let mut clicks = [false; 2];
            for b in &rep.branches {
                let (m, p3) = (b.outcomes.get("M3"), b.outcomes.get("P3"));
                let plus = matches!((m, p3), (Some(1), Some(1)) | (Some(0), Some(0)));
                rule_ok &= plus == (sign == Sign::Plus);
                if let Some(m) = m {
                    clicks[m as usize] = true;
                }
            }
            rule_ok &= clicks == [true, true];
        }
        Ok((
            check.all_correct() && rule_ok,
            format!("8 inputs, {branches} branches, g1 sign rule ok={rule_ok}"),
        ))
    })())
}

/// Every Quad row agrees with the parities of both representative bitstrings.
pub fn group_oracle_matches() -> Result<Vec<bool>> {
    let table = derive_group_table()?;
    table
        .rows
        .iter()
        .map(|r| {
            let (a, b) = EntangledLabel::new(Family::Quad, r.class, Sign::Plus)?.kets();
            let row = (r.p1, r.p2, r.p3);
            Ok(bitstring_parities(a) == row && bitstring_parities(b) == row)
        })
        .collect()
}

pub fn criterion_7(exec: Exec) -> CriterionResult {
    outcome(7, "Quad analyzer", (|| {
        let check = check_family(Family::Quad, exec)?;
        let branches: usize = check.inputs.iter().map(|i| i.1).sum();
        let oracle = group_oracle_matches()?;
        let table = derive_group_table()?;
        let sets = table
            .sets()
            .iter()
            .map(|(_, cs)| cs.iter().map(|&c| roman(c)).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(" | ");
        let oracle_ok = oracle.iter().all(|&b| b);
        Ok((
            check.all_correct() && oracle_ok,
            format!("16 inputs, {branches} branches, groups {sets}, oracle ok={oracle_ok}"),
        ))
    })())
}

pub fn criterion_8() -> CriterionResult {
    outcome(8, "decomposition identities", (|| {
        let rep = verify_decompositions()?;
        let ghz_c = rep
            .identities
            .iter()
            .find(|i| i.name.starts_with("ghz3"))
            .map_or(f64::NAN, |i| i.constant.norm());
        let worst = rep.identities.iter().map(|i| i.residual).fold(0.0, f64::max);
        let signs: Vec<&str> = rep
            .identities
            .iter()
            .filter(|i| i.constant.re < 0.0)
            .map(|i| i.name.as_str())
            .collect();
        Ok((
            rep.pass,
            format!(
                "{} identities, residual {worst:.1e}, GHZ3 constant {ghz_c:.6}, sign -1: {}",
                rep.identities.len(),
                if signs.is_empty() { "none".into() } else { signs.join(",") }
            ),
        ))
    })())
}

pub fn criterion_9(tol: &Tolerances, exec: Exec) -> CriterionResult {
    outcome(9, "fermion encoder", (|| {
        let r = verify_parity_povm(FERMION_SAMPLES, SEED, &pbs_matrix(), tol.fermion, exec)?;
        Ok((
            r.pass,
            format!(
                "dp={:.1e} ds={:.1e} sweep={} P(One|++)={:.3}",
                r.max_prob_dev, r.max_state_dev, r.phase_sweep_pass, r.plus_plus_p_one
            ),
        ))
    })())
}

pub fn criterion_10(exec: Exec) -> CriterionResult {
    outcome(10, "measurement semantics", (|| {
        let mut parts = Vec::new();
        let mut worst: f64 = 0.0;
        for fam in Family::ALL {
            let d = measurement_semantics_deviation(fam, SEMANTICS_SAMPLES, SEED, exec)?;
            worst = worst.max(d);
            parts.push(format!("{}={d:.1e}", fam.name()));
        }
        Ok((worst <= 1e-10, parts.join(" ")))
    })())
}

pub fn run_all(tol: &Tolerances, exec: Exec) -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(tol),
        criterion_3(tol, exec),
        criterion_4(tol, exec),
        criterion_5(exec),
        criterion_6(exec),
        criterion_7(exec),
        criterion_8(),
        criterion_9(tol, exec),
        criterion_10(exec),
    ]
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    schema: u32,
    command: &'static str,
    criteria: &'a [CriterionResult],
    tolerances: [(&'static str, Num); 3],
    pass: bool,
}

pub fn results_json(results: &[CriterionResult], tol: &Tolerances) -> String {
    crate::report::to_string(&VerifyJson {
        schema: crate::report::SCHEMA,
        command: "verify",
        criteria: results,
        tolerances: [
            ("norm", Num(tol.norm)),
            ("verify", Num(tol.verify)),
            ("fermion", Num(tol.fermion)),
        ],
        pass: results.iter().all(|r| r.pass),
    })
}
