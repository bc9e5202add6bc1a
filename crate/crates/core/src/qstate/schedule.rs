//! Measurement schedules with classical feedforward, and the branch engine
//! that runs them.
//!
//! Qubits in a schedule keep their original indices for the whole run; a
//! destructive measurement removes the qubit from the live register and the
//! engine tracks where each surviving qubit now sits.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gate::Gate;
use super::pauli::Pauli;
use super::state::{Basis, Click, StateVector};
use crate::config::EPS_PRUNE;
use crate::error::{Error, Result};
use crate::par::Exec;

/// Below this dimension the two subtrees of a branch point run inline.
const PAR_MIN_DIM: usize = 1 << 8;

#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    /// The recorded bit for `label` equals `value`.
    Outcome { label: String, value: u8 },
    All(Vec<Condition>),
}

impl Condition {
    pub fn outcome(label: impl Into<String>, value: u8) -> Self {
        Condition::Outcome {
            label: label.into(),
            value,
        }
    }

    fn eval(&self, outcomes: &Outcomes) -> bool {
        match self {
            Condition::Outcome { label, value } => outcomes.get(label) == Some(*value),
            Condition::All(cs) => cs.iter().all(|c| c.eval(outcomes)),
        }
    }

    fn labels<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Condition::Outcome { label, .. } => out.push(label),
            Condition::All(cs) => cs.iter().for_each(|c| c.labels(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Unitary {
        gate: Gate,
        qubit: usize,
    },
    ParityCheck {
        a: usize,
        b: usize,
        basis: Basis,
        label: String,
    },
    MeasureX {
        qubit: usize,
        label: String,
    },
    ConditionalPauli {
        condition: Condition,
        pauli: Pauli,
        qubit: usize,
    },
}

/// A validated instruction list over a fixed register size.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    n_qubits: usize,
    instructions: Vec<Instruction>,
}

impl Schedule {
    pub fn new(n_qubits: usize, instructions: Vec<Instruction>) -> Result<Self> {
        let bad = |msg: String| Err(Error::MalformedSchedule(msg));
        let mut labels: HashSet<&str> = HashSet::new();
        let mut gone: HashSet<usize> = HashSet::new();
        for (pc, ins) in instructions.iter().enumerate() {
            let touched: Vec<usize> = match ins {
                Instruction::Unitary { qubit, .. }
                | Instruction::MeasureX { qubit, .. }
                | Instruction::ConditionalPauli { qubit, .. } => vec![*qubit],
                Instruction::ParityCheck { a, b, .. } => {
                    if a == b {
                        return bad(format!("instruction {pc}: parity check on qubit {a} twice"));
                    }
                    vec![*a, *b]
                }
            };
            for q in touched {
                if q >= n_qubits {
                    return bad(format!("instruction {pc}: qubit {q} out of range"));
                }
                if gone.contains(&q) {
                    return bad(format!("instruction {pc}: qubit {q} already measured"));
                }
            }
            match ins {
                Instruction::ParityCheck { label, .. } | Instruction::MeasureX { label, .. } => {
                    if !labels.insert(label) {
                        return bad(format!("duplicate label {label:?}"));
                    }
                }
                Instruction::ConditionalPauli {
                    condition, pauli, ..
                } => {
                    if !matches!(pauli, Pauli::X | Pauli::Z) {
                        return bad(format!("instruction {pc}: correction must be X or Z"));
                    }
                    let mut refs = Vec::new();
                    condition.labels(&mut refs);
                    if let Some(l) = refs.iter().find(|l| !labels.contains(*l)) {
                        return bad(format!("instruction {pc}: condition on unknown label {l:?}"));
                    }
                }
                Instruction::Unitary { gate, .. } => {
                    if let Gate::Custom(m) = gate {
                        Gate::custom(*m)?;
                    }
                }
            }
            if let Instruction::MeasureX { qubit, .. } = ins {
                if gone.len() + 1 == n_qubits {
                    return bad(format!("instruction {pc}: cannot measure every qubit"));
                }
                gone.insert(*qubit);
            }
        }
        Ok(Self {
            n_qubits,
            instructions,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// Measurement labels in schedule order.
    pub fn labels(&self) -> Vec<&str> {
        self.instructions
            .iter()
            .filter_map(|ins| match ins {
                Instruction::ParityCheck { label, .. } | Instruction::MeasureX { label, .. } => {
                    Some(label.as_str())
                }
                _ => None,
            })
            .collect()
    }

    pub fn destructive_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::MeasureX { .. }))
            .count()
    }
}

/// Measurement record in schedule order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Outcomes(Vec<(String, u8)>);

impl Outcomes {
    pub fn get(&self, label: &str) -> Option<u8> {
        self.0.iter().find(|(l, _)| l == label).map(|&(_, b)| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u8)> {
        self.0.iter().map(|(l, b)| (l.as_str(), *b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bits concatenated in schedule order, e.g. `"101"`.
    pub fn bitstring(&self) -> String {
        self.0.iter().map(|(_, b)| if *b == 1 { '1' } else { '0' }).collect()
    }

    fn push(&mut self, label: &str, bit: u8) {
        self.0.push((label.to_string(), bit));
    }
}

impl FromIterator<(String, u8)> for Outcomes {
    fn from_iter<T: IntoIterator<Item = (String, u8)>>(iter: T) -> Self {
        Outcomes(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunMode {
    /// Every branch above the pruning threshold, outcome 1 (or `+`) first.
    Enumerate,
    /// One branch drawn with a seeded ChaCha8 stream, one draw per
    /// measurement in schedule order.
    Sample(u64),
    /// Follow the given bit for every measurement label.
    Forced(Outcomes),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchRecord {
    pub outcomes: Outcomes,
    pub probability: f64,
    pub state: StateVector,
    /// Original indices of destructively measured qubits, ascending.
    pub measured: Vec<usize>,
    /// Original indices of the qubits in `state`, in register order.
    pub live: Vec<usize>,
    /// Corrections that fired, as `(pauli, original qubit)`.
    pub corrections: Vec<(Pauli, usize)>,
}

#[derive(Clone)]
struct Partial {
    state: StateVector,
    outcomes: Outcomes,
    probability: f64,
    live: Vec<usize>,
    corrections: Vec<(Pauli, usize)>,
}

impl Partial {
    fn position(&self, q: usize) -> usize {
        self.live
            .iter()
            .position(|&l| l == q)
            .expect("validated schedule never touches a measured qubit")
    }

    fn finish(self, n: usize) -> BranchRecord {
        let measured = (0..n).filter(|q| !self.live.contains(q)).collect();
        BranchRecord {
            outcomes: self.outcomes,
            probability: self.probability,
            state: self.state,
            measured,
            live: self.live,
            corrections: self.corrections,
        }
    }
}

/// Runs `sched` on `state` with the default execution strategy.
pub fn run_schedule(state: &StateVector, sched: &Schedule, mode: &RunMode) -> Result<Vec<BranchRecord>> {
    run_schedule_with(state, sched, mode, Exec::default())
}

pub fn run_schedule_with(
    state: &StateVector,
    sched: &Schedule,
    mode: &RunMode,
    exec: Exec,
) -> Result<Vec<BranchRecord>> {
    if state.n_qubits() != sched.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: sched.n_qubits,
            got: state.n_qubits(),
        });
    }
    if let RunMode::Forced(forced) = mode {
        for label in sched.labels() {
            if forced.get(label).is_none() {
                return Err(Error::MalformedSchedule(format!(
                    "no forced outcome for label {label:?}"
                )));
            }
        }
    }
    let start = Partial {
        state: state.clone(),
        outcomes: Outcomes::default(),
        probability: 1.0,
        live: (0..sched.n_qubits).collect(),
        corrections: Vec::new(),
    };
    match mode {
        RunMode::Enumerate => enumerate(sched, 0, start, exec),
        RunMode::Sample(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            follow(sched, start, |_, p_first| rng.random::<f64>() < p_first).map(|b| vec![b])
        }
        RunMode::Forced(forced) => {
            follow(sched, start, |label, _| forced.get(label) == Some(1)).map(|b| vec![b])
        }
    }
}

enum Step {
    Done(Partial),
    /// Both branches of a measurement, `(probability, partial)` with outcome 1 first.
    Split(usize, [Option<Partial>; 2]),
}

/// Executes deterministic instructions from `pc` until the next measurement.
fn advance(sched: &Schedule, mut pc: usize, mut cur: Partial) -> Result<Step> {
    while let Some(ins) = sched.instructions.get(pc) {
        match ins {
            Instruction::Unitary { gate, qubit } => {
                let pos = cur.position(*qubit);
                cur.state.apply_gate_in_place(gate, pos)?;
            }
            Instruction::ConditionalPauli {
                condition,
                pauli,
                qubit,
            } => {
                if condition.eval(&cur.outcomes) {
                    let pos = cur.position(*qubit);
                    let gate = if *pauli == Pauli::X { Gate::X } else { Gate::Z };
                    cur.state.apply_gate_in_place(&gate, pos)?;
                    cur.corrections.push((*pauli, *qubit));
                }
            }
            Instruction::ParityCheck { a, b, basis, label } => {
                let (pa, pb) = (cur.position(*a), cur.position(*b));
                let branches = [true, false].map(|even| -> Result<Option<Partial>> {
                    let (p, amps) = cur.state.project_parity(pa, pb, *basis, even)?;
                    if p <= EPS_PRUNE {
                        return Ok(None);
                    }
                    let scale = 1.0 / p.sqrt();
                    let mut next = cur.clone();
                    next.state = StateVector::from_parts(
                        cur.state.n_qubits(),
                        amps.into_iter().map(|x| x * scale).collect(),
                    );
                    next.outcomes.push(label, even as u8);
                    next.probability *= p;
                    Ok(Some(next))
                });
                let [b1, b0] = branches;
                return Ok(Step::Split(pc + 1, [b1?, b0?]));
            }
            Instruction::MeasureX { qubit, label } => {
                let pos = cur.position(*qubit);
                let branches = [Click::Plus, Click::Minus].map(|click| -> Result<Option<Partial>> {
                    let (p, amps) = cur.state.project_x(pos, click)?;
                    if p <= EPS_PRUNE {
                        return Ok(None);
                    }
                    let scale = 1.0 / p.sqrt();
                    let mut next = cur.clone();
                    next.state = StateVector::from_parts(
                        cur.state.n_qubits() - 1,
                        amps.into_iter().map(|x| x * scale).collect(),
                    );
                    next.live.remove(pos);
                    next.outcomes.push(label, click.bit());
                    next.probability *= p;
                    Ok(Some(next))
                });
                let [b1, b0] = branches;
                return Ok(Step::Split(pc + 1, [b1?, b0?]));
            }
        }
        pc += 1;
    }
    Ok(Step::Done(cur))
}

fn enumerate(sched: &Schedule, pc: usize, cur: Partial, exec: Exec) -> Result<Vec<BranchRecord>> {
    match advance(sched, pc, cur)? {
        Step::Done(p) => Ok(vec![p.finish(sched.n_qubits)]),
        Step::Split(next, [first, second]) => {
            let dim = first
                .as_ref()
                .or(second.as_ref())
                .map_or(0, |p| p.state.dim());
            let run = |b: Option<Partial>| match b {
                Some(p) => enumerate(sched, next, p, exec),
                None => Ok(Vec::new()),
            };
            let (a, b) = if exec.is_parallel() && dim >= PAR_MIN_DIM && first.is_some() && second.is_some() {
                exec.join(|| run(first), || run(second))
            } else {
                (run(first), run(second))
            };
            let mut out = a?;
            out.extend(b?);
            Ok(out)
        }
    }
}

/// Walks a single path. `choose(label, p_first)` returns true to take the
/// outcome-1 (or `+`) branch; impossible branches are never taken.
fn follow(
    sched: &Schedule,
    mut cur: Partial,
    mut choose: impl FnMut(&str, f64) -> bool,
) -> Result<BranchRecord> {
    let mut pc = 0;
    loop {
        match advance(sched, pc, cur)? {
            Step::Done(p) => return Ok(p.finish(sched.n_qubits)),
            Step::Split(next, [first, second]) => {
                let label = sched.labels_at(next - 1);
                let weight = |b: &Option<Partial>| b.as_ref().map_or(0.0, |p| p.probability);
                let p_first = weight(&first) / (weight(&first) + weight(&second));
                let want_first = choose(label, p_first);
                cur = match (want_first, first, second) {
                    (true, Some(f), _) => f,
                    (false, _, Some(s)) => s,
                    (true, None, _) | (false, _, None) => {
                        return Err(Error::ImpossibleBranch(0.0));
                    }
                };
                pc = next;
            }
        }
    }
}

impl Schedule {
    fn labels_at(&self, pc: usize) -> &str {
        match &self.instructions[pc] {
            Instruction::ParityCheck { label, .. } | Instruction::MeasureX { label, .. } => label,
            _ => unreachable!("split only happens at measurements"),
        }
    }
}
