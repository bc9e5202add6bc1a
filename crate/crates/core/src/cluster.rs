//! Linear cluster states from chained parity gadgets.
//!
//! A gadget entangles an existing qubit `j` with a fresh `|+>` qubit `k`: a
//! Z-parity check on `(j, k)`, an X on `k` if the parity came out odd, then a
//! Hadamard on `k`. On the promised input this is exactly `CZ_{jk}`, for either
//! detector outcome, so chaining gadgets along `0–1–…–(n-1)` prepares the
//! linear cluster state deterministically.

use crate::config::{EPS_PRUNE, EPS_VERIFY};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::qstate::{
    run_schedule_with, Basis, BranchRecord, Condition, Gate, Instruction, Outcomes, ParityOutcome,
    Pauli, PauliString, RunMode, Schedule, StateVector,
};

/// Largest chain for which [`derive_correction_table`] runs its Pauli search.
pub const N_TABLE: usize = 6;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Graph(format!("self-loop on vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Graph(format!("edge ({a}, {b}) outside 0..{n}")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Self { n, edges: norm })
    }

    /// The path `0–1–…–(n-1)`.
    pub fn chain(n: usize) -> Self {
        Self {
            n,
            edges: (1..n).map(|k| (k - 1, k)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(x, y)| {
            if x == a {
                Some(y)
            } else if y == a {
                Some(x)
            } else {
                None
            }
        })
    }

    pub fn is_chain(&self) -> bool {
        *self == Self::chain(self.n)
    }
}

/// `K(a) = X_a ⊗ Π_{b ∈ nghb(a)} Z_b`, one per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerSet {
    generators: Vec<PauliString>,
}

impl StabilizerSet {
    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn pairwise_commuting(&self) -> bool {
        self.generators.iter().enumerate().all(|(i, a)| {
            self.generators[i + 1..].iter().all(|b| a.commutes_with(b))
        })
    }

    /// Trace of the joint projector `Π_a (1 + K(a)) / 2`, i.e. the dimension
    /// of the common +1 eigenspace. Dense: only sensible for small registers.
    pub fn joint_eigenspace_dimension(&self) -> Result<f64> {
        let n = self.generators.first().map_or(0, |g| g.len());
        let mut trace = 0.0;
        for i in 0..1usize << n {
            let mut v = StateVector::basis(n, i)?;
            for k in &self.generators {
                let kv = v.apply_pauli(k)?;
                let amps = v
                    .amps()
                    .iter()
                    .zip(kv.amps())
                    .map(|(a, b)| (a + b) * 0.5)
                    .collect();
                v = StateVector::from_parts(n, amps);
            }
            trace += v.amps()[i].re;
        }
        Ok(trace)
    }
}

pub fn stabilizers_for(g: &GraphSpec) -> Result<StabilizerSet> {
    let generators = (0..g.n)
        .map(|a| {
            let mut sites = vec![(a, Pauli::X)];
            sites.extend(g.neighbors(a).map(|b| (b, Pauli::Z)));
            PauliString::from_sites(g.n, &sites)
        })
        .collect::<Result<Vec<_>>>()?;
    let set = StabilizerSet { generators };
    if !set.pairwise_commuting() {
        return Err(Error::Graph("stabilizer generators do not commute".into()));
    }
    Ok(set)
}

/// `Π_{edges} CZ |+>^{⊗n}`, built directly from sign flips.
pub fn canonical_cluster(g: &GraphSpec) -> Result<StateVector> {
    let mut s = StateVector::plus_product(g.n)?;
    for &(a, b) in &g.edges {
        s.apply_cz(a, b)?;
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterCheck {
    pub expectations: Vec<f64>,
    pub pass: bool,
}

/// `<K(a)>` for every vertex; passes iff each is within `tol` of +1.
pub fn verify_cluster(s: &StateVector, g: &GraphSpec, tol: f64) -> Result<ClusterCheck> {
    if s.n_qubits() != g.n {
        return Err(Error::DimensionMismatch {
            expected: g.n,
            got: s.n_qubits(),
        });
    }
    let expectations = stabilizers_for(g)?
        .generators
        .iter()
        .map(|k| s.expectation(k))
        .collect::<Result<Vec<_>>>()?;
    let pass = expectations.iter().all(|e| (e - 1.0).abs() <= tol);
    Ok(ClusterCheck { expectations, pass })
}

/// True when qubit `k` factors out as `|+>`, i.e. `<X_k> = 1`.
pub fn is_fresh_plus(s: &StateVector, k: usize) -> Result<bool> {
    let x = PauliString::from_sites(s.n_qubits(), &[(k, Pauli::X)])?;
    Ok(s.expectation(&x)? >= 1.0 - EPS_VERIFY)
}

/// One parity gadget on `(j, k)`; `k` must be a fresh `|+>` (checked in debug builds).
pub fn gadget(
    s: &StateVector,
    j: usize,
    k: usize,
    forced: Option<bool>,
) -> Result<(ParityOutcome, StateVector)> {
    if cfg!(debug_assertions) && !is_fresh_plus(s, k)? {
        return Err(Error::NotFreshPlus(k));
    }
    let (outcome, _, mut post) = s.parity_check(j, k, Basis::Z, forced)?;
    if !outcome.even {
        post.apply_gate_in_place(&Gate::X, k)?;
    }
    post.apply_gate_in_place(&Gate::H, k)?;
    Ok((outcome, post))
}

fn detector_label(edge: usize) -> String {
    format!("P{}", edge + 1)
}

/// Chain schedule over `n` qubits. With `inline_corrections`, each odd
/// outcome triggers X on the fresh qubit before its Hadamard; without, the
/// corrections are left to a final Pauli frame.
pub fn chain_schedule(n: usize, inline_corrections: bool) -> Result<Schedule> {
    if n < 2 {
        return Err(Error::ChainTooShort(n));
    }
    let mut ins = Vec::with_capacity(3 * (n - 1));
    for j in 0..n - 1 {
        let label = detector_label(j);
        ins.push(Instruction::ParityCheck {
            a: j,
            b: j + 1,
            basis: Basis::Z,
            label: label.clone(),
        });
        if inline_corrections {
            ins.push(Instruction::ConditionalPauli {
                condition: Condition::outcome(label, 0),
                pauli: Pauli::X,
                qubit: j + 1,
            });
        }
        ins.push(Instruction::Unitary {
            gate: Gate::H,
            qubit: j + 1,
        });
    }
    Schedule::new(n, ins)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrepMode {
    Enumerate,
    Sample(u64),
    /// One bit per detector, `P1` first.
    Forced(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparationRecord {
    pub n: usize,
    /// Detector bits in order `P1, P2, …`.
    pub outcomes: String,
    /// Corrections that fired, 1-based, e.g. `"X3"`.
    pub corrections: Vec<String>,
    pub probability: f64,
    pub state: StateVector,
    pub stabilizer_expectations: Vec<f64>,
    pub matches_canonical: bool,
    pub pass: bool,
}

fn forced_outcomes(pattern: &[bool]) -> Outcomes {
    pattern
        .iter()
        .enumerate()
        .map(|(j, &b)| (detector_label(j), b as u8))
        .collect()
}

/// Parses a detector pattern such as `"101"`.
pub fn parse_pattern(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '1' => Ok(true),
            '0' => Ok(false),
            _ => Err(Error::InvalidLabel(format!("pattern {s:?} must be 0/1"))),
        })
        .collect()
}

fn record_from_branch(
    b: BranchRecord,
    g: &GraphSpec,
    canonical: &StateVector,
    tol: f64,
) -> Result<PreparationRecord> {
    let check = verify_cluster(&b.state, g, tol)?;
    let matches_canonical = b.state.equal_up_to_global_phase(canonical, tol)?;
    Ok(PreparationRecord {
        n: g.n,
        outcomes: b.outcomes.bitstring(),
        corrections: b
            .corrections
            .iter()
            .map(|(p, q)| format!("{}{}", p.symbol(), q + 1))
            .collect(),
        probability: b.probability,
        state: b.state,
        pass: check.pass && matches_canonical,
        stabilizer_expectations: check.expectations,
        matches_canonical,
    })
}

/// Prepares the `n`-qubit linear cluster from `|+>^{⊗n}` with inline
/// feedforward. Enumerate yields all `2^(n-1)` detector patterns.
pub fn prepare_cluster(n: usize, mode: &PrepMode) -> Result<Vec<PreparationRecord>> {
    prepare_cluster_with(n, mode, EPS_VERIFY, Exec::default())
}

pub fn prepare_cluster_with(
    n: usize,
    mode: &PrepMode,
    tol: f64,
    exec: Exec,
) -> Result<Vec<PreparationRecord>> {
    let sched = chain_schedule(n, true)?;
    let run_mode = match mode {
        PrepMode::Enumerate => RunMode::Enumerate,
        PrepMode::Sample(seed) => RunMode::Sample(*seed),
        PrepMode::Forced(pattern) => {
            if pattern.len() != n - 1 {
                return Err(Error::InvalidLabel(format!(
                    "pattern has {} bits, chain of {n} has {} detectors",
                    pattern.len(),
                    n - 1
                )));
            }
            RunMode::Forced(forced_outcomes(pattern))
        }
    };
    let g = GraphSpec::chain(n);
    let canonical = canonical_cluster(&g)?;
    let branches = run_schedule_with(&StateVector::plus_product(n)?, &sched, &run_mode, exec)?;
    branches
        .into_iter()
        .map(|b| record_from_branch(b, &g, &canonical, tol))
        .collect()
}

/// Bits of pattern `index` for `detectors` detectors; index 0 is all-even and
/// patterns are ordered like enumeration (1 before 0, `P1` most significant).
pub fn pattern_bits(index: usize, detectors: usize) -> Vec<bool> {
    (0..detectors)
        .map(|j| (index >> (detectors - 1 - j)) & 1 == 0)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternSweep {
    pub n: usize,
    pub patterns: usize,
    pub total_probability: f64,
    pub max_weight_deviation: f64,
    pub min_overlap: f64,
    pub max_stabilizer_deviation: f64,
    /// Patterns whose final state is not the canonical cluster or fails a stabilizer.
    pub failures: Vec<String>,
}

impl PatternSweep {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every detector pattern of the `n`-chain independently (one forced
/// run each, spread over `exec`) without keeping the final states.
pub fn sweep_patterns(n: usize, tol: f64, exec: Exec) -> Result<PatternSweep> {
    let sched = chain_schedule(n, true)?;
    let g = GraphSpec::chain(n);
    let canonical = canonical_cluster(&g)?;
    let stabilizers = stabilizers_for(&g)?;
    let start = StateVector::plus_product(n)?;
    let detectors = n - 1;
    let patterns = 1usize << detectors;
    let expected_weight = 1.0 / patterns as f64;

    let results = exec.map_range(patterns, |idx| -> Result<(String, f64, f64, f64)> {
        let pattern = pattern_bits(idx, detectors);
        let forced = RunMode::Forced(forced_outcomes(&pattern));
        let b = run_schedule_with(&start, &sched, &forced, Exec::Sequential)?
            .pop()
            .expect("forced run yields one branch");
        let overlap = b.state.inner(&canonical)?.norm();
        let stab_dev = stabilizers
            .generators
            .iter()
            .map(|k| b.state.expectation(k).map(|e| (e - 1.0).abs()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok((b.outcomes.bitstring(), b.probability, overlap, stab_dev))
    });

    let mut sweep = PatternSweep {
        n,
        patterns,
        total_probability: 0.0,
        max_weight_deviation: 0.0,
        min_overlap: f64::INFINITY,
        max_stabilizer_deviation: 0.0,
        failures: Vec::new(),
    };
    for r in results {
        let (bits, p, overlap, stab_dev) = r?;
        sweep.total_probability += p;
        sweep.max_weight_deviation = sweep.max_weight_deviation.max((p - expected_weight).abs());
        sweep.min_overlap = sweep.min_overlap.min(overlap);
        sweep.max_stabilizer_deviation = sweep.max_stabilizer_deviation.max(stab_dev);
        if overlap < 1.0 - tol || stab_dev > tol {
            sweep.failures.push(bits);
        }
    }
    Ok(sweep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionRule {
    pub pattern: String,
    /// Inline feedforward: X on the fresh qubit before its Hadamard.
    pub inline: Vec<(Pauli, usize)>,
    /// Single Pauli frame applied after the whole chain when no inline
    /// corrections are made.
    pub deferred: PauliString,
}

impl CorrectionRule {
    pub fn is_identity(&self) -> bool {
        self.inline.is_empty() && self.deferred.weight() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTable {
    pub n: usize,
    pub rules: Vec<CorrectionRule>,
}

/// All `X^a Z^b` products over `n` qubits, fewest non-identity factors first,
/// then lexicographic with `I < X < Z < Y` from qubit 0.
fn pauli_candidates(n: usize) -> Vec<PauliString> {
    const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Z, Pauli::Y];
    let mut all: Vec<Vec<Pauli>> = (0..1usize << (2 * n))
        .map(|code| {
            (0..n)
                .map(|q| LETTERS[(code >> (2 * (n - 1 - q))) & 3])
                .collect()
        })
        .collect();
    all.sort_by_key(|f| (f.iter().filter(|&&p| p != Pauli::I).count(), f.clone()));
    all.into_iter().map(PauliString::new).collect()
}

fn search_correction(
    state: &StateVector,
    canonical: &StateVector,
    candidates: &[PauliString],
) -> Option<PauliString> {
    candidates.iter().find_map(|p| {
        let fixed = state.apply_pauli(p).ok()?;
        fixed
            .equal_up_to_global_phase(canonical, EPS_VERIFY)
            .ok()?
            .then(|| p.clone())
    })
}

/// Feedforward table for the `n`-chain. For every detector pattern the
/// deferred column is the first Pauli string (in [`pauli_candidates`] order)
/// that maps the uncorrected output onto the canonical cluster; the inline
/// column records the X corrections the inline pipeline fires.
pub fn derive_correction_table(n: usize, exec: Exec) -> Result<CorrectionTable> {
    if !(2..=N_TABLE).contains(&n) {
        return Err(Error::TableSize { n, max: N_TABLE });
    }
    let g = GraphSpec::chain(n);
    let canonical = canonical_cluster(&g)?;
    let start = StateVector::plus_product(n)?;
    let bare = chain_schedule(n, false)?;
    let inline = chain_schedule(n, true)?;
    let candidates = pauli_candidates(n);
    let patterns = 1usize << (n - 1);

    let rules = exec.map_range(patterns, |idx| -> Result<CorrectionRule> {
        let pattern = pattern_bits(idx, n - 1);
        let forced = RunMode::Forced(forced_outcomes(&pattern));
        let raw = run_schedule_with(&start, &bare, &forced, Exec::Sequential)?
            .pop()
            .expect("one branch");
        let fed = run_schedule_with(&start, &inline, &forced, Exec::Sequential)?
            .pop()
            .expect("one branch");
        let deferred = search_correction(&raw.state, &canonical, &candidates)
            .ok_or_else(|| Error::NoCorrectionFound(raw.outcomes.bitstring()))?;
        Ok(CorrectionRule {
            pattern: raw.outcomes.bitstring(),
            inline: fed.corrections,
            deferred,
        })
    });
    Ok(CorrectionTable {
        n,
        rules: rules.into_iter().collect::<Result<_>>()?,
    })
}

/// Re-simulates every rule through both pipelines against the canonical cluster.
pub fn verify_correction_table(table: &CorrectionTable) -> Result<bool> {
    let n = table.n;
    let g = GraphSpec::chain(n);
    let canonical = canonical_cluster(&g)?;
    let start = StateVector::plus_product(n)?;
    let bare = chain_schedule(n, false)?;
    if table.rules.len() != 1 << (n - 1) {
        return Ok(false);
    }
    for rule in &table.rules {
        let pattern = parse_pattern(&rule.pattern)?;
        let forced = RunMode::Forced(forced_outcomes(&pattern));
        let raw = run_schedule_with(&start, &bare, &forced, Exec::Sequential)?
            .pop()
            .expect("one branch");
        let corrected = raw.state.apply_pauli(&rule.deferred)?;
        if !corrected.equal_up_to_global_phase(&canonical, EPS_VERIFY)? {
            return Ok(false);
        }
        let mut s = start.clone();
        for (j, &even) in pattern.iter().enumerate() {
            let (p, amps) = s.project_parity(j, j + 1, Basis::Z, even)?;
            if p <= EPS_PRUNE {
                return Ok(false);
            }
            let scale = 1.0 / p.sqrt();
            s = StateVector::from_parts(n, amps.into_iter().map(|a| a * scale).collect());
            if rule.inline.contains(&(Pauli::X, j + 1)) {
                s.apply_gate_in_place(&Gate::X, j + 1)?;
            }
            s.apply_gate_in_place(&Gate::H, j + 1)?;
        }
        if !s.equal_up_to_global_phase(&canonical, EPS_VERIFY)? {
            return Ok(false);
        }
    }
    Ok(true)
}
