//! Two-electron Fock-space model of the parity encoder: a polarizing beam
//! splitter followed by a charge detector on one output arm.
//!
//! Four single-particle modes in the fixed order `A↑ < A↓ < B↑ < B↓` (outputs
//! `A′`, `B′` reuse the same order). A two-electron state is a vector over the
//! six pairs `{i, j}`, `i < j`, each standing for `c†_i c†_j |vac>`. Spin up is
//! logical `|0>`.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use crate::config::{EPS_NORM, EPS_PRUNE};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::qstate::{Basis, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mode {
    pub arm: Arm,
    pub spin: Spin,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::new(Arm::A, Spin::Up),
        Mode::new(Arm::A, Spin::Down),
        Mode::new(Arm::B, Spin::Up),
        Mode::new(Arm::B, Spin::Down),
    ];

    pub const fn new(arm: Arm, spin: Spin) -> Self {
        Self { arm, spin }
    }

    pub fn index(self) -> usize {
        let a = match self.arm {
            Arm::A => 0,
            Arm::B => 2,
        };
        a + matches!(self.spin, Spin::Down) as usize
    }

    fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

/// Canonical pair order of the antisymmetric basis.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn pair_index(i: usize, j: usize) -> (usize, f64) {
    let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
    let k = PAIRS
        .iter()
        .position(|&p| p == (lo, hi))
        .expect("distinct modes");
    (k, sign)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amps: [C64; 6],
}

impl FockState {
    pub fn new(amps: [C64; 6]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > EPS_NORM {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amps })
    }

    /// `c†_a c†_b |vac>` in canonical form.
    pub fn pair(a: Mode, b: Mode) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidLabel("Pauli exclusion: identical modes".into()));
        }
        let (k, sign) = pair_index(a.index(), b.index());
        let mut amps = [C64::new(0.0, 0.0); 6];
        amps[k] = C64::new(sign, 0.0);
        Ok(Self { amps })
    }

    pub fn amps(&self) -> &[C64; 6] {
        &self.amps
    }

    pub fn amplitude(&self, a: Mode, b: Mode) -> C64 {
        let (k, sign) = pair_index(a.index(), b.index());
        self.amps[k] * sign
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn electrons_in(pair: (usize, usize), arm: Arm) -> usize {
        [pair.0, pair.1]
            .into_iter()
            .filter(|&m| Mode::from_index(m).arm == arm)
            .count()
    }
}

/// Electron 1 enters on path `A`, electron 2 on path `B`:
/// `Σ c_{s1 s2} c†_{A s1} c†_{B s2} |vac>`.
pub fn embed_spin_state(spin: &StateVector) -> Result<FockState> {
    if spin.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: spin.n_qubits(),
        });
    }
    let mut amps = [C64::new(0.0, 0.0); 6];
    for (idx, &c) in spin.amps().iter().enumerate() {
        let a = idx >> 1;
        let b = 2 + (idx & 1);
        let (k, sign) = pair_index(a, b);
        amps[k] += c * sign;
    }
    Ok(FockState { amps })
}

/// Single-particle scattering matrix, `m[out][in]` over the mode order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    m: [[C64; 4]; 4],
}

impl ScatteringMatrix {
    pub fn new(m: [[C64; 4]; 4]) -> Result<Self> {
        let s = Self { m };
        let dev = s.unitarity_deviation();
        if dev > EPS_NORM || !dev.is_finite() {
            return Err(Error::NotUnitary(dev));
        }
        Ok(s)
    }

    pub fn identity() -> Self {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = C64::new(1.0, 0.0);
        }
        Self { m }
    }

    /// Spin-selective router: up transmits, down crosses to the other arm
    /// with amplitude `r_a` (from `A`) and `r_b` (from `B`).
    pub fn spin_router(r_a: C64, r_b: C64) -> Result<Self> {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        m[0][0] = C64::new(1.0, 0.0);
        m[2][2] = C64::new(1.0, 0.0);
        m[3][1] = r_a;
        m[1][3] = r_b;
        Self::new(m)
    }

    pub fn matrix(&self) -> &[[C64; 4]; 4] {
        &self.m
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                let dot: C64 = (0..4).map(|k| self.m[k][r].conj() * self.m[k][c]).sum();
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }
}

/// Polarizing beam splitter with unit reflection phase on the `A` port.
pub fn pbs_matrix() -> ScatteringMatrix {
    pbs_matrix_with_reflection(C64::new(1.0, 0.0)).expect("unit phase")
}

/// PBS whose `A↓ → B′↓` amplitude is the unit phase `r`; the `B↓ → A′↓`
/// amplitude is `-conj(r)` so the spin-down block has unit determinant.
/// With that pairing the exchange sign picked up by the `|11>` component
/// cancels and the even-parity output carries no `r` dependence.
pub fn pbs_matrix_with_reflection(r: C64) -> Result<ScatteringMatrix> {
    ScatteringMatrix::spin_router(r, -r.conj())
}

/// Lifts `c†_i -> Σ_k u[k][i] c†_k` to the two-electron space.
pub fn apply_scattering(f: &FockState, u: &ScatteringMatrix) -> Result<FockState> {
    let dev = u.unitarity_deviation();
    if dev > EPS_NORM {
        return Err(Error::NotUnitary(dev));
    }
    let m = &u.m;
    let mut out = [C64::new(0.0, 0.0); 6];
    for (src, &(i, j)) in PAIRS.iter().enumerate() {
        let c = f.amps[src];
        if c.norm_sqr() == 0.0 {
            continue;
        }
        for (dst, &(k, l)) in PAIRS.iter().enumerate() {
            out[dst] += c * (m[k][i] * m[l][j] - m[l][i] * m[k][j]);
        }
    }
    Ok(FockState { amps: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Charge {
    One,
    ZeroOrTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChargeOutcome {
    pub value: Charge,
    pub arm: Arm,
}

/// Projects on "exactly one electron in `arm`" or its complement. Without
/// `forced`, `One` is taken whenever it is possible.
pub fn detect_charge(
    f: &FockState,
    arm: Arm,
    forced: Option<Charge>,
) -> Result<(ChargeOutcome, f64, FockState)> {
    let project = |want: Charge| {
        let mut amps = [C64::new(0.0, 0.0); 6];
        for (k, &pair) in PAIRS.iter().enumerate() {
            let one = FockState::electrons_in(pair, arm) == 1;
            if one == (want == Charge::One) {
                amps[k] = f.amps[k];
            }
        }
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        (p, amps)
    };
    let value = match forced {
        Some(v) => v,
        None if project(Charge::One).0 > EPS_PRUNE => Charge::One,
        None => Charge::ZeroOrTwo,
    };
    let (p, amps) = project(value);
    if p <= EPS_PRUNE {
        return Err(Error::ImpossibleBranch(p));
    }
    let scale = 1.0 / p.sqrt();
    Ok((
        ChargeOutcome { value, arm },
        p,
        FockState {
            amps: amps.map(|a| a * scale),
        },
    ))
}

/// Reads the spin state off a one-electron-per-arm state: qubit 0 is the
/// `A′` electron, qubit 1 the `B′` electron.
pub fn reduce_to_spin(f: &FockState) -> Result<StateVector> {
    let mut bunched = 0.0;
    let mut amps = vec![C64::new(0.0, 0.0); 4];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let (mi, mj) = (Mode::from_index(i), Mode::from_index(j));
        if mi.arm == mj.arm {
            bunched += f.amps[k].norm_sqr();
            continue;
        }
        // i < j puts the A′ mode first.
        let s1 = matches!(mi.spin, Spin::Down) as usize;
        let s2 = matches!(mj.spin, Spin::Down) as usize;
        amps[(s1 << 1) | s2] = f.amps[k];
    }
    if bunched > EPS_PRUNE {
        return Err(Error::Bunched(bunched));
    }
    StateVector::new(amps)
}

/// Runs one spin state through embed → scatter → detect(A′, One) → reduce.
/// Returns `P(One)` and, when that branch is possible, the reduced spin state.
pub fn encoder_even_branch(
    spin: &StateVector,
    u: &ScatteringMatrix,
) -> Result<(f64, Option<StateVector>)> {
    let scattered = apply_scattering(&embed_spin_state(spin)?, u)?;
    match detect_charge(&scattered, Arm::A, Some(Charge::One)) {
        Ok((_, p, post)) => Ok((p, Some(reduce_to_spin(&post)?))),
        Err(Error::ImpossibleBranch(p)) => Ok((p, None)),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PovmReport {
    pub schema: u32,
    pub samples: usize,
    pub seed: u64,
    pub max_prob_dev: f64,
    pub max_state_dev: f64,
    pub phase_sweep_pass: bool,
    pub plus_plus_p_one: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Worst `(probability, state)` deviation between the fermionic encoder and
/// the qubit-level even-parity projection over `inputs`.
fn compare_with_parity(inputs: &[StateVector], u: &ScatteringMatrix, exec: Exec) -> (f64, f64) {
    exec.map_slice(inputs, |s| {
        let (p_even, amps) = s
            .project_parity(0, 1, Basis::Z, true)
            .expect("two-qubit input");
        let qubit_post = (p_even > EPS_PRUNE).then(|| {
            let scale = 1.0 / p_even.sqrt();
            StateVector::new(amps.into_iter().map(|a| a * scale).collect()).expect("normalized")
        });
        match encoder_even_branch(s, u) {
            Ok((p_one, fermion_post)) => {
                let prob_dev = (p_one - p_even).abs();
                let state_dev = match (qubit_post, fermion_post) {
                    (Some(q), Some(f)) => q.phase_aligned_distance(&f).unwrap_or(f64::INFINITY),
                    (None, None) => 0.0,
                    _ => 1.0,
                };
                (prob_dev, state_dev)
            }
            // A bunched One branch or a non-unitary matrix is a total mismatch.
            Err(_) => (1.0, 1.0),
        }
    })
    .into_iter()
    .fold((0.0, 0.0), |(a, b), (p, s)| (f64::max(a, p), f64::max(b, s)))
}

/// Reflection phases swept to show the encoder does not depend on them.
pub const SWEEP_PHASES: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, -1.0),
];

/// Checks the encoder against the qubit-level parity projector on the four
/// spin basis states, `|++>` and `samples` seeded random states, then repeats
/// the comparison for every reflection phase in [`SWEEP_PHASES`].
pub fn verify_parity_povm(
    samples: usize,
    seed: u64,
    u: &ScatteringMatrix,
    tol: f64,
    exec: Exec,
) -> Result<PovmReport> {
    if samples == 0 {
        return Err(Error::InvalidLabel("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plus_plus = StateVector::plus_product(2)?;
    let mut inputs: Vec<StateVector> = (0..4)
        .map(|i| StateVector::basis(2, i))
        .collect::<Result<_>>()?;
    inputs.push(plus_plus.clone());
    for _ in 0..samples {
        inputs.push(StateVector::random(2, &mut rng)?);
    }

    let (max_prob_dev, max_state_dev) = compare_with_parity(&inputs, u, exec);
    let plus_plus_p_one = encoder_even_branch(&plus_plus, u).map_or(f64::NAN, |(p, _)| p);

    let phase_sweep_pass = SWEEP_PHASES.iter().all(|&r| {
        let pbs = pbs_matrix_with_reflection(r).expect("unit phase");
        let (dp, ds) = compare_with_parity(&inputs, &pbs, exec);
        dp <= tol && ds <= tol
    });

    Ok(PovmReport {
        schema: 1,
        samples,
        seed,
        max_prob_dev,
        max_state_dev,
        phase_sweep_pass,
        plus_plus_p_one,
        tolerance: tol,
        pass: max_prob_dev <= tol && max_state_dev <= tol && phase_sweep_pass,
    })
}
