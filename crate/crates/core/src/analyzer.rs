//! Entangled-basis analyzers built from parity checks, X measurements and
//! classical feedforward.
//!
//! * Bell: Z-parity `P1` then X-parity `P2` on `(0, 1)`; nondestructive.
//! * GHZ3: `P1 = Z(0,1)`, X on qubit 0 if `P1` odd, `P2 = Z(1,2)`, X-measure
//!   qubit 2 (`M3`), `P3 = X(0,1)`. Destroys one qubit.
//! * Quad: `P1 = Z(0,1)`, `P2 = Z(2,3)`, `P3 = Z(1,2)`, X-measure qubits 2
//!   and 3 (`M3`, `M4`), `P4 = X(0,1)`. Destroys two qubits.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::EPS_NORM;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::qstate::{
    run_schedule_with, Basis, BranchRecord, Condition, Instruction, Outcomes, Pauli, RunMode,
    Schedule, StateVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Bell,
    Ghz3,
    Quad,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Bell, Family::Ghz3, Family::Quad];

    pub fn n_qubits(self) -> usize {
        match self {
            Family::Bell => 2,
            Family::Ghz3 => 3,
            Family::Quad => 4,
        }
    }

    /// Number of classes; each class has a `+` and a `-` state.
    pub fn classes(self) -> u8 {
        match self {
            Family::Bell => 2,
            Family::Ghz3 => 4,
            Family::Quad => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Bell => "bell",
            Family::Ghz3 => "ghz3",
            Family::Quad => "quad",
        }
    }

    pub fn size(self) -> usize {
        2 * self.classes() as usize
    }

    /// The basis labels in canonical order: class ascending, `+` before `-`.
    pub fn labels(self) -> Vec<EntangledLabel> {
        (1..=self.classes())
            .flat_map(|class| {
                [Sign::Plus, Sign::Minus].map(|sign| EntangledLabel {
                    family: self,
                    class,
                    sign,
                })
            })
            .collect()
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bell" => Ok(Family::Bell),
            "ghz3" => Ok(Family::Ghz3),
            "quad" => Ok(Family::Quad),
            _ => Err(Error::InvalidLabel(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn from_bool(plus: bool) -> Self {
        if plus {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A basis state of one family. `class` is 1-based: Bell 1 = Φ, 2 = Ψ;
/// GHZ3 groups g1..g4; Quad classes i..viii.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntangledLabel {
    pub family: Family,
    pub class: u8,
    pub sign: Sign,
}

const ROMAN: [&str; 8] = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii"];

impl EntangledLabel {
    pub fn new(family: Family, class: u8, sign: Sign) -> Result<Self> {
        if class == 0 || class > family.classes() {
            return Err(Error::InvalidLabel(format!(
                "{} has classes 1..={}, got {class}",
                family.name(),
                family.classes()
            )));
        }
        Ok(Self { family, class, sign })
    }

    /// The two computational-basis kets `(first, second)` of
    /// `(|first> ± |second>)/√2`, as bitstrings over the family's qubits.
    pub fn kets(self) -> (usize, usize) {
        const BELL: [(usize, usize); 2] = [(0b00, 0b11), (0b01, 0b10)];
        const GHZ3: [(usize, usize); 4] = [(0b000, 0b111), (0b110, 0b001), (0b010, 0b101), (0b100, 0b011)];
        const QUAD: [(usize, usize); 8] = [
            (0b0000, 0b1111),
            (0b0001, 0b1110),
            (0b0010, 0b1101),
            (0b0100, 0b1011),
            (0b1000, 0b0111),
            (0b0011, 0b1100),
            (0b0101, 0b1010),
            (0b1001, 0b0110),
        ];
        let k = (self.class - 1) as usize;
        match self.family {
            Family::Bell => BELL[k],
            Family::Ghz3 => GHZ3[k],
            Family::Quad => QUAD[k],
        }
    }
}

impl fmt::Display for EntangledLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        match self.family {
            Family::Bell => {
                let class = if self.class == 1 { "phi" } else { "psi" };
                write!(f, "bell:{class}{sign}")
            }
            Family::Ghz3 => write!(f, "ghz3:g{}{sign}", self.class),
            Family::Quad => write!(f, "quad:{}{sign}", ROMAN[(self.class - 1) as usize]),
        }
    }
}

impl FromStr for EntangledLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLabel(s.to_string());
        let (fam, rest) = s.split_once(':').ok_or_else(bad)?;
        let family: Family = fam.parse().map_err(|_| bad())?;
        let sign = match rest.chars().last() {
            Some('+') => Sign::Plus,
            Some('-') => Sign::Minus,
            _ => return Err(bad()),
        };
        let body = &rest[..rest.len() - 1];
        let class = match family {
            Family::Bell => match body {
                "phi" => 1,
                "psi" => 2,
                _ => return Err(bad()),
            },
            Family::Ghz3 => body
                .strip_prefix('g')
                .and_then(|d| d.parse::<u8>().ok())
                .ok_or_else(bad)?,
            Family::Quad => ROMAN.iter().position(|&r| r == body).ok_or_else(bad)? as u8 + 1,
        };
        EntangledLabel::new(family, class, sign).map_err(|_| bad())
    }
}

/// `(|first> ± |second>)/√2` for `label`.
pub fn basis_state(label: EntangledLabel) -> Result<StateVector> {
    let label = EntangledLabel::new(label.family, label.class, label.sign)?;
    let n = label.family.n_qubits();
    let (a, b) = label.kets();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    amps[a] = C64::new(h, 0.0);
    amps[b] = C64::new(h * label.sign.value(), 0.0);
    StateVector::new(amps)
}

/// A measurement schedule plus the rule turning its outcome record into a label.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    family: Family,
    schedule: Schedule,
}

fn zpar(a: usize, b: usize, label: &str) -> Instruction {
    Instruction::ParityCheck {
        a,
        b,
        basis: Basis::Z,
        label: label.into(),
    }
}

fn xpar(a: usize, b: usize, label: &str) -> Instruction {
    Instruction::ParityCheck {
        a,
        b,
        basis: Basis::X,
        label: label.into(),
    }
}

fn xmeas(qubit: usize, label: &str) -> Instruction {
    Instruction::MeasureX {
        qubit,
        label: label.into(),
    }
}

pub fn bell_analyzer() -> DecisionTree {
    DecisionTree {
        family: Family::Bell,
        schedule: Schedule::new(2, vec![zpar(0, 1, "P1"), xpar(0, 1, "P2")]).expect("static schedule"),
    }
}

pub fn ghz3_analyzer() -> DecisionTree {
    let ins = vec![
        zpar(0, 1, "P1"),
        Instruction::ConditionalPauli {
            condition: Condition::outcome("P1", 0),
            pauli: Pauli::X,
            qubit: 0,
        },
        zpar(1, 2, "P2"),
        xmeas(2, "M3"),
        xpar(0, 1, "P3"),
    ];
    DecisionTree {
        family: Family::Ghz3,
        schedule: Schedule::new(3, ins).expect("static schedule"),
    }
}

pub fn quad_analyzer() -> DecisionTree {
    let ins = vec![
        zpar(0, 1, "P1"),
        zpar(2, 3, "P2"),
        zpar(1, 2, "P3"),
        xmeas(2, "M3"),
        xmeas(3, "M4"),
        xpar(0, 1, "P4"),
    ];
    DecisionTree {
        family: Family::Quad,
        schedule: Schedule::new(4, ins).expect("static schedule"),
    }
}

pub fn analyzer_for(family: Family) -> DecisionTree {
    match family {
        Family::Bell => bell_analyzer(),
        Family::Ghz3 => ghz3_analyzer(),
        Family::Quad => quad_analyzer(),
    }
}

impl DecisionTree {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn destroyed_qubits(&self) -> usize {
        self.schedule.destructive_count()
    }

    /// Maps a complete outcome record to a label.
    pub fn classify_outcomes(&self, o: &Outcomes) -> Result<EntangledLabel> {
        let bit = |l: &str| {
            o.get(l)
                .map(|b| b == 1)
                .ok_or_else(|| Error::InvalidLabel(format!("missing outcome {l}")))
        };
        let (class, sign) = match self.family {
            Family::Bell => (if bit("P1")? { 1 } else { 2 }, Sign::from_bool(bit("P2")?)),
            Family::Ghz3 => {
                let group = match (bit("P1")?, bit("P2")?) {
                    (true, true) => 1,
                    (true, false) => 2,
                    (false, false) => 3,
                    (false, true) => 4,
                };
                // (+, P3 = 1) or (-, P3 = 0) is the + state.
                (group, Sign::from_bool(bit("M3")? == bit("P3")?))
            }
            Family::Quad => {
                let class = match (bit("P1")?, bit("P2")?, bit("P3")?) {
                    (true, true, true) => 1,
                    (true, true, false) => 6,
                    (true, false, true) => 2,
                    (true, false, false) => 3,
                    (false, true, false) => 4,
                    (false, true, true) => 5,
                    (false, false, false) => 7,
                    (false, false, true) => 8,
                };
                // click signs multiply into the X-parity of the surviving pair
                let flips = [bit("M3")?, bit("M4")?, bit("P4")?]
                    .iter()
                    .filter(|&&b| !b)
                    .count();
                (class, Sign::from_bool(flips % 2 == 0))
            }
        };
        EntangledLabel::new(self.family, class, sign)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedBranch {
    pub outcomes: Outcomes,
    pub probability: f64,
    pub label: EntangledLabel,
    pub record: BranchRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub family: Family,
    /// Label name for named inputs, `"explicit"` otherwise.
    pub input: String,
    pub expected: Option<EntangledLabel>,
    pub branches: Vec<ClassifiedBranch>,
    /// Named input: every branch carries the input label. Explicit input:
    /// every branch carries the same label.
    pub deterministic: bool,
    pub destroyed_qubits: usize,
}

impl ClassificationReport {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Probability of each family label, in [`Family::labels`] order.
    pub fn label_distribution(&self) -> Vec<(EntangledLabel, f64)> {
        self.family
            .labels()
            .into_iter()
            .map(|l| {
                let p = self
                    .branches
                    .iter()
                    .filter(|b| b.label == l)
                    .map(|b| b.probability)
                    .sum();
                (l, p)
            })
            .collect()
    }
}

fn check_dimension(tree: &DecisionTree, s: &StateVector) -> Result<()> {
    let n = tree.family.n_qubits();
    if s.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.n_qubits(),
        });
    }
    Ok(())
}

/// Enumerates every branch of `tree` on `s` and labels it.
pub fn classify(
    tree: &DecisionTree,
    s: &StateVector,
    expected: Option<EntangledLabel>,
    exec: Exec,
) -> Result<ClassificationReport> {
    check_dimension(tree, s)?;
    let records = run_schedule_with(s, &tree.schedule, &RunMode::Enumerate, exec)?;
    let branches = records
        .into_iter()
        .map(|r| {
            Ok(ClassifiedBranch {
                outcomes: r.outcomes.clone(),
                probability: r.probability,
                label: tree.classify_outcomes(&r.outcomes)?,
                record: r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let deterministic = match expected {
        Some(l) => branches.iter().all(|b| b.label == l),
        None => branches.windows(2).all(|w| w[0].label == w[1].label),
    };
    Ok(ClassificationReport {
        family: tree.family,
        input: expected.map_or_else(|| "explicit".to_string(), |l| l.to_string()),
        expected,
        branches,
        deterministic,
        destroyed_qubits: tree.destroyed_qubits(),
    })
}

/// Draws one branch with the seeded generator and labels it.
pub fn classify_sample(
    tree: &DecisionTree,
    s: &StateVector,
    seed: u64,
) -> Result<(EntangledLabel, BranchRecord)> {
    check_dimension(tree, s)?;
    let mut rec = run_schedule_with(s, &tree.schedule, &RunMode::Sample(seed), Exec::Sequential)?;
    let rec = rec.pop().expect("sample yields one branch");
    Ok((tree.classify_outcomes(&rec.outcomes)?, rec))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyCheck {
    pub family: Family,
    /// Per input label: branch count, probability sum, every branch correct.
    pub inputs: Vec<(EntangledLabel, usize, f64, bool)>,
    /// Worst `1 - fidelity` between input and post-measurement state (Bell only).
    pub max_state_disturbance: Option<f64>,
    pub destroyed_qubits: usize,
}

impl FamilyCheck {
    pub fn all_correct(&self) -> bool {
        self.inputs
            .iter()
            .all(|&(_, _, p, ok)| ok && (p - 1.0).abs() <= EPS_NORM)
    }
}

/// Runs the family's analyzer on every basis state, exhaustively.
pub fn check_family(family: Family, exec: Exec) -> Result<FamilyCheck> {
    let tree = analyzer_for(family);
    let labels = family.labels();
    let per_input = exec.map_slice(&labels, |&label| -> Result<(EntangledLabel, usize, f64, bool, f64)> {
        let s = basis_state(label)?;
        let rep = classify(&tree, &s, Some(label), Exec::Sequential)?;
        let disturbance = rep
            .branches
            .iter()
            .map(|b| {
                if b.record.state.n_qubits() == s.n_qubits() {
                    1.0 - s.fidelity(&b.record.state).unwrap_or(0.0)
                } else {
                    f64::NAN
                }
            })
            .fold(0.0, f64::max);
        Ok((label, rep.branches.len(), rep.total_probability(), rep.deterministic, disturbance))
    });
    let mut inputs = Vec::with_capacity(labels.len());
    let mut max_dist: f64 = 0.0;
    for r in per_input {
        let (l, count, p, ok, d) = r?;
        inputs.push((l, count, p, ok));
        max_dist = max_dist.max(d);
    }
    Ok(FamilyCheck {
        family,
        inputs,
        max_state_disturbance: (tree.destroyed_qubits() == 0).then_some(max_dist),
        destroyed_qubits: tree.destroyed_qubits(),
    })
}

/// Worst gap between the analyzer's label distribution and the squared
/// overlaps `|<label|s>|²` over `samples` seeded random inputs.
pub fn measurement_semantics_deviation(
    family: Family,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<f64> {
    let tree = analyzer_for(family);
    let basis = family
        .labels()
        .into_iter()
        .map(|l| Ok((l, basis_state(l)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs = (0..samples)
        .map(|_| StateVector::random(family.n_qubits(), &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let devs = exec.map_slice(&inputs, |s| -> Result<f64> {
        let rep = classify(&tree, s, None, Exec::Sequential)?;
        let mut worst: f64 = 0.0;
        for ((l, p), (bl, b)) in rep.label_distribution().into_iter().zip(&basis) {
            debug_assert_eq!(l, *bl);
            worst = worst.max((p - b.fidelity(s)?).abs());
        }
        Ok(worst)
    });
    devs.into_iter().try_fold(0.0, |acc: f64, d| Ok(acc.max(d?)))
}

/// Max-abs deviation of the family's Gram matrix from the identity.
pub fn gram_deviation(family: Family) -> Result<f64> {
    let states = family
        .labels()
        .into_iter()
        .map(basis_state)
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b)? - target).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    /// `c` with `lhs = c · rhs`, rhs exactly as written in the decomposition.
    pub constant: C64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub identities: Vec<IdentityCheck>,
    pub gram: Vec<(Family, f64)>,
    pub pass: bool,
}

fn bell(class: u8, sign: Sign) -> StateVector {
    basis_state(EntangledLabel {
        family: Family::Bell,
        class,
        sign,
    })
    .expect("valid Bell label")
}

fn x_eigen(sign: Sign) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_real(&[h, h * sign.value()]).expect("normalized")
}

fn combine(terms: &[(f64, StateVector)]) -> Vec<C64> {
    let dim = terms[0].1.dim();
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for (c, s) in terms {
        for (o, a) in out.iter_mut().zip(s.amps()) {
            *o += a * *c;
        }
    }
    out
}

fn proportionality(name: String, lhs: &StateVector, rhs: &[C64], magnitude: f64) -> IdentityCheck {
    let rr: f64 = rhs.iter().map(|a| a.norm_sqr()).sum();
    let lr: C64 = rhs.iter().zip(lhs.amps()).map(|(r, l)| r.conj() * l).sum();
    let constant = lr / rr;
    let residual = lhs
        .amps()
        .iter()
        .zip(rhs)
        .map(|(l, r)| (l - constant * r).norm())
        .fold(0.0, f64::max);
    let pass = residual <= 1e-12 && (constant.norm() - magnitude).abs() <= 1e-12;
    IdentityCheck {
        name,
        constant,
        residual,
        pass,
    }
}

/// Checks the Bell-product expansions of the GHZ3 and Quad basis states.
///
/// GHZ3 right-hand sides are unnormalized (`lhs = rhs / √2`); Quad ones carry
/// their `1/√2`, so their constant has unit modulus. A constant of `-1`
/// flags an expansion that holds only up to a global sign.
pub fn verify_decompositions() -> Result<DecompositionReport> {
    use Sign::{Minus as M, Plus as P};
    let flip = |s: Sign| if s == P { M } else { P };
    let mut identities = Vec::new();

    // (bell class, relative sign) per GHZ3 group: g = Bell⁺|±> + rel·Bell⁻|∓>
    let ghz_rules: [(u8, f64); 4] = [(1, 1.0), (1, -1.0), (2, 1.0), (2, -1.0)];
    for (g, &(class, rel)) in ghz_rules.iter().enumerate() {
        for sign in [P, M] {
            let label = EntangledLabel::new(Family::Ghz3, g as u8 + 1, sign)?;
            let rhs = combine(&[
                (1.0, bell(class, P).tensor(&x_eigen(sign))?),
                (rel, bell(class, M).tensor(&x_eigen(flip(sign)))?),
            ]);
            identities.push(proportionality(
                label.to_string(),
                &basis_state(label)?,
                &rhs,
                std::f64::consts::FRAC_1_SQRT_2,
            ));
        }
    }

    // Per Quad class: (pair-12 class, pair-34 class, relative sign).
    let quad_rules: [(u8, u8, f64); 8] = [
        (1, 1, 1.0),
        (1, 2, 1.0),
        (1, 2, -1.0),
        (2, 1, 1.0),
        (2, 1, -1.0),
        (1, 1, -1.0),
        (2, 2, 1.0),
        (2, 2, -1.0),
    ];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (k, &(c12, c34, rel)) in quad_rules.iter().enumerate() {
        for sign in [P, M] {
            let label = EntangledLabel::new(Family::Quad, k as u8 + 1, sign)?;
            // + state: A⁺B⁺ ± A⁻B⁻ ; - state: A⁺B⁻ ± A⁻B⁺
            let (second_a, second_b) = if sign == P { (P, M) } else { (M, P) };
            let rhs = combine(&[
                (h, bell(c12, P).tensor(&bell(c34, second_a))?),
                (h * rel, bell(c12, M).tensor(&bell(c34, second_b))?),
            ]);
            identities.push(proportionality(label.to_string(), &basis_state(label)?, &rhs, 1.0));
        }
    }

    let gram = Family::ALL
        .iter()
        .map(|&f| Ok((f, gram_deviation(f)?)))
        .collect::<Result<Vec<_>>>()?;
    let pass = identities.iter().all(|i| i.pass) && gram.iter().all(|&(_, d)| d <= 1e-12);
    Ok(DecompositionReport {
        identities,
        gram,
        pass,
    })
}

/// One Quad class with its deterministic detector readouts.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRow {
    pub class: u8,
    pub p1: u8,
    pub p2: u8,
    pub p3: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupTable {
    pub rows: Vec<GroupRow>,
}

impl GroupTable {
    /// Classes sharing `(P1, P2)`, in the order (1,1), (1,0), (0,1), (0,0).
    pub fn sets(&self) -> Vec<((u8, u8), Vec<u8>)> {
        [(1, 1), (1, 0), (0, 1), (0, 0)]
            .into_iter()
            .map(|key| {
                let classes = self
                    .rows
                    .iter()
                    .filter(|r| (r.p1, r.p2) == key)
                    .map(|r| r.class)
                    .collect();
                (key, classes)
            })
            .collect()
    }

    /// Classes with `P3 = 1` and `P3 = 0`.
    pub fn p3_split(&self) -> [(u8, Vec<u8>); 2] {
        [1, 0].map(|v| {
            (
                v,
                self.rows.iter().filter(|r| r.p3 == v).map(|r| r.class).collect(),
            )
        })
    }
}

pub fn roman(class: u8) -> &'static str {
    ROMAN[(class - 1) as usize]
}

/// Reads `(P1, P2, P3)` for every Quad class off the analyzer itself; both
/// signs of a class must agree and every branch must agree.
pub fn derive_group_table() -> Result<GroupTable> {
    let tree = quad_analyzer();
    let mut rows = Vec::new();
    for class in 1..=Family::Quad.classes() {
        let mut seen: Option<(u8, u8, u8)> = None;
        for sign in [Sign::Plus, Sign::Minus] {
            let label = EntangledLabel::new(Family::Quad, class, sign)?;
            let rep = classify(&tree, &basis_state(label)?, Some(label), Exec::Sequential)?;
            for b in &rep.branches {
                let key = (
                    b.outcomes.get("P1").unwrap_or(9),
                    b.outcomes.get("P2").unwrap_or(9),
                    b.outcomes.get("P3").unwrap_or(9),
                );
                match seen {
                    None => seen = Some(key),
                    Some(k) if k == key => {}
                    Some(_) => {
                        return Err(Error::InvalidLabel(format!(
                            "class {} has nondeterministic group readout",
                            roman(class)
                        )))
                    }
                }
            }
        }
        let (p1, p2, p3) = seen.expect("at least one branch");
        rows.push(GroupRow { class, p1, p2, p3 });
    }
    Ok(GroupTable { rows })
}

/// Parity bits of the pairs (0,1), (2,3), (1,2) of a 4-bit string, as
/// detector values (1 = even).
pub fn bitstring_parities(bits: usize) -> (u8, u8, u8) {
    let b = |q: usize| (bits >> (3 - q)) & 1;
    let even = |x: usize, y: usize| (b(x) == b(y)) as u8;
    (even(0, 1), even(2, 3), even(1, 2))
}
