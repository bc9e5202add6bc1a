use std::fmt;

use num_complex::Complex64 as C64;
use rand_distr::StandardNormal;

use super::gate::Gate;
use super::pauli::PauliString;
use crate::config::{EPS_NORM, EPS_PRUNE, N_MAX};
use crate::error::{Error, Result};

/// Measurement basis of a two-qubit parity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

/// Detector readout of a parity check. Bit 1 is even parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParityOutcome {
    pub even: bool,
    pub basis: Basis,
}

impl ParityOutcome {
    pub fn bit(self) -> u8 {
        self.even as u8
    }
}

/// Result of a destructive single-qubit X measurement. `Plus` is recorded as bit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Click {
    Plus,
    Minus,
}

impl Click {
    pub fn bit(self) -> u8 {
        matches!(self, Click::Plus) as u8
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Click::Plus
        } else {
            Click::Minus
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Click::Plus => 1.0,
            Click::Minus => -1.0,
        }
    }
}

/// Dense amplitudes over `n` qubits. Qubit 0 is the most significant bit
/// of the basis index, so `|q0 q1 ... q(n-1)>` reads left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Validates dimension, finiteness and normalization. Never renormalizes.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.max(2).next_power_of_two(),
                got: dim,
            });
        }
        let n = dim.trailing_zeros() as usize;
        check_count(n)?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > EPS_NORM {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n, amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Normalizes an arbitrary nonzero vector; used for building test inputs.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let norm = norm_sqr(&amps).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(amps.into_iter().map(|a| a / norm).collect())
    }

    /// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_count(n)?;
        let amps = (0..1usize << n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(amps)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_count(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, got: index });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// `|+>^{⊗n}`; every amplitude is `2^{-n/2}`.
    pub fn plus_product(n: usize) -> Result<Self> {
        check_count(n)?;
        let a = (0.5f64).powf(n as f64 / 2.0);
        Ok(Self {
            n,
            amps: vec![C64::new(a, 0.0); 1 << n],
        })
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.n + other.n;
        check_count(n)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| other.amps.iter().map(move |&b| a * b))
            .collect();
        Ok(Self { n, amps })
    }

    pub(crate) fn from_parts(n: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    fn mask(&self, q: usize) -> Result<usize> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { q, n: self.n });
        }
        Ok(1 << (self.n - 1 - q))
    }

    pub fn apply_gate(&self, gate: &Gate, q: usize) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_in_place(gate, q)?;
        Ok(out)
    }

    pub fn apply_gate_in_place(&mut self, gate: &Gate, q: usize) -> Result<()> {
        let m = self.mask(q)?;
        if let Gate::Custom(mat) = gate {
            Gate::custom(*mat)?;
        }
        let [[m00, m01], [m10, m11]] = gate.matrix();
        for i0 in 0..self.amps.len() {
            if i0 & m != 0 {
                continue;
            }
            let i1 = i0 | m;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m00 * a0 + m01 * a1;
            self.amps[i1] = m10 * a0 + m11 * a1;
        }
        Ok(())
    }

    /// Controlled-Z, applied as a sign flip on `|..1..1..>`.
    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        let (ma, mb) = self.pair_masks(a, b)?;
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & ma != 0 && i & mb != 0 {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    fn pair_masks(&self, a: usize, b: usize) -> Result<(usize, usize)> {
        if a == b {
            return Err(Error::SameQubit(a));
        }
        Ok((self.mask(a)?, self.mask(b)?))
    }

    /// Unnormalized projection onto one parity sector of `(a, b)`, with its weight.
    ///
    /// Z basis keeps `|00>, |11>` (even) or `|01>, |10>` (odd); X basis applies
    /// `(1 ± X_a X_b) / 2`.
    pub fn project_parity(
        &self,
        a: usize,
        b: usize,
        basis: Basis,
        even: bool,
    ) -> Result<(f64, Vec<C64>)> {
        let (ma, mb) = self.pair_masks(a, b)?;
        let amps = match basis {
            Basis::Z => self
                .amps
                .iter()
                .enumerate()
                .map(|(i, &amp)| {
                    let same = ((i & ma) != 0) == ((i & mb) != 0);
                    if same == even {
                        amp
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect(),
            Basis::X => {
                let flip = ma | mb;
                let s = if even { 0.5 } else { -0.5 };
                (0..self.amps.len())
                    .map(|i| self.amps[i] * 0.5 + self.amps[i ^ flip] * s)
                    .collect::<Vec<_>>()
            }
        };
        Ok((norm_sqr(&amps), amps))
    }

    /// Nondestructive parity measurement of qubits `a`, `b`.
    ///
    /// Returns the outcome, the pre-collapse weight of that branch and the
    /// renormalized post-measurement state. Without `forced`, the even branch
    /// is taken whenever it is possible.
    pub fn parity_check(
        &self,
        a: usize,
        b: usize,
        basis: Basis,
        forced: Option<bool>,
    ) -> Result<(ParityOutcome, f64, StateVector)> {
        let even = match forced {
            Some(bit) => bit,
            None => self.project_parity(a, b, basis, true)?.0 > EPS_PRUNE,
        };
        let (p, amps) = self.project_parity(a, b, basis, even)?;
        if p <= EPS_PRUNE {
            return Err(Error::ImpossibleBranch(p));
        }
        let scale = 1.0 / p.sqrt();
        let state = Self::from_parts(self.n, amps.into_iter().map(|x| x * scale).collect());
        Ok((ParityOutcome { even, basis }, p, state))
    }

    /// Unnormalized `<±|_q` contraction: the register with qubit `q` removed.
    pub fn project_x(&self, q: usize, click: Click) -> Result<(f64, Vec<C64>)> {
        let m = self.mask(q)?;
        let low = m - 1;
        let s = click.sign() * std::f64::consts::FRAC_1_SQRT_2;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps: Vec<C64> = (0..self.amps.len() / 2)
            .map(|r| {
                let i0 = ((r & !low) << 1) | (r & low);
                self.amps[i0] * h + self.amps[i0 | m] * s
            })
            .collect();
        Ok((norm_sqr(&amps), amps))
    }

    /// Destructive X-basis measurement. The returned register has `n - 1`
    /// qubits with the remaining ones in their original relative order;
    /// measuring the last qubit leaves the empty register (one unit amplitude).
    pub fn measure_x(&self, q: usize, forced: Option<Click>) -> Result<(Click, f64, StateVector)> {
        let click = match forced {
            Some(c) => c,
            None => Click::from_bit(self.project_x(q, Click::Plus)?.0 > EPS_PRUNE),
        };
        let (p, amps) = self.project_x(q, click)?;
        if p <= EPS_PRUNE {
            return Err(Error::ImpossibleBranch(p));
        }
        let scale = 1.0 / p.sqrt();
        let state = Self::from_parts(self.n - 1, amps.into_iter().map(|x| x * scale).collect());
        Ok((click, p, state))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// True iff `|<self|other>| >= 1 - tol`.
    pub fn equal_up_to_global_phase(&self, other: &StateVector, tol: f64) -> Result<bool> {
        Ok(self.inner(other)?.norm() >= 1.0 - tol)
    }

    /// Max-abs amplitude difference after removing the relative global phase.
    pub fn phase_aligned_distance(&self, other: &StateVector) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: p.len(),
            });
        }
        Ok(Self::from_parts(self.n, p.apply_to(&self.amps)))
    }

    /// `<s|P|s>` as a complex number.
    pub fn expectation_complex(&self, p: &PauliString) -> Result<C64> {
        let image = self.apply_pauli(p)?;
        self.inner(&image)
    }

    /// `<s|P|s>`; Pauli strings are Hermitian so the imaginary part is dust.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        Ok(self.expectation_complex(p)?.re)
    }
}

impl fmt::Display for StateVector {
    /// Ket expansion of the nonzero terms, e.g. `+0.7071|00> +0.7071|11>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if a.im.abs() < 1e-12 {
                write!(f, "{:+.4}", a.re)?;
            } else {
                write!(f, "({:+.4}{:+.4}i)", a.re, a.im)?;
            }
            write!(f, "|{:0width$b}>", i, width = self.n)?;
        }
        Ok(())
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 || n > N_MAX {
        return Err(Error::QubitCount { n, max: N_MAX });
    }
    Ok(())
}

fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2 as R;

    fn re(v: &[f64]) -> StateVector {
        StateVector::from_real(v).unwrap()
    }

    fn assert_amps(s: &StateVector, expected: &[f64]) {
        assert_eq!(s.dim(), expected.len());
        for (a, &e) in s.amps().iter().zip(expected) {
            assert!((a - C64::new(e, 0.0)).norm() < 1e-12, "{s} vs {expected:?}");
        }
    }

    #[test]
    fn plus_product_amplitudes() {
        assert_amps(&StateVector::plus_product(1).unwrap(), &[R, R]);
        assert_amps(&StateVector::plus_product(2).unwrap(), &[0.5; 4]);
        let four = StateVector::plus_product(4).unwrap();
        assert!(four.amps().iter().all(|a| a.re == 0.25 && a.im == 0.0));
        assert!(StateVector::plus_product(0).is_err());
        assert!(StateVector::plus_product(N_MAX + 1).is_err());
    }

    #[test]
    fn new_validates() {
        assert!(matches!(StateVector::from_real(&[1.0, 1.0]), Err(Error::NotNormalized(_))));
        assert!(StateVector::from_real(&[1.0, 0.0, 0.0]).is_err());
        assert!(matches!(StateVector::from_real(&[f64::NAN, 0.0]), Err(Error::NonFinite)));
    }

    #[test]
    fn hadamard_on_bell_gives_phase_gate_state() {
        let phi = re(&[R, 0.0, 0.0, R]);
        let out = phi.apply_gate(&Gate::H, 1).unwrap();
        assert_amps(&out, &[0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn x_and_z_gates() {
        let zero = StateVector::basis(2, 0).unwrap();
        assert_amps(&zero.apply_gate(&Gate::X, 0).unwrap(), &[0.0, 0.0, 1.0, 0.0]);
        let plus = StateVector::plus_product(1).unwrap();
        assert_amps(&plus.apply_gate(&Gate::Z, 0).unwrap(), &[R, -R]);
        assert!(matches!(
            zero.apply_gate(&Gate::X, 2),
            Err(Error::QubitOutOfRange { q: 2, n: 2 })
        ));
    }

    #[test]
    fn parity_on_plus_plus() {
        let s = StateVector::plus_product(2).unwrap();
        let (out, p, post) = s.parity_check(0, 1, Basis::Z, Some(true)).unwrap();
        assert_eq!(out.bit(), 1);
        assert!((p - 0.5).abs() < 1e-12);
        assert_amps(&post, &[R, 0.0, 0.0, R]);
    }

    #[test]
    fn parity_eigenstates() {
        let zero = StateVector::basis(2, 0).unwrap();
        let (out, p, post) = zero.parity_check(0, 1, Basis::Z, None).unwrap();
        assert!(out.even);
        assert!((p - 1.0).abs() < 1e-12);
        assert_eq!(post, zero);
        assert!(matches!(
            zero.parity_check(0, 1, Basis::Z, Some(false)),
            Err(Error::ImpossibleBranch(_))
        ));

        // Φ+ = (|++> + |-->)/√2 is X-even.
        let phi = re(&[R, 0.0, 0.0, R]);
        let (out, p, post) = phi.parity_check(0, 1, Basis::X, Some(true)).unwrap();
        assert!(out.even);
        assert!((p - 1.0).abs() < 1e-12);
        assert!(post.max_abs_diff(&phi).unwrap() < 1e-12);

        assert!(matches!(phi.parity_check(1, 1, Basis::Z, None), Err(Error::SameQubit(1))));
    }

    #[test]
    fn measure_x_ghz() {
        let ghz = re(&[R, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, R]);
        let (click, p, post) = ghz.measure_x(2, Some(Click::Plus)).unwrap();
        assert_eq!(click, Click::Plus);
        assert!((p - 0.5).abs() < 1e-12);
        assert_amps(&post, &[R, 0.0, 0.0, R]);
    }

    #[test]
    fn measure_x_single_qubit() {
        let plus = StateVector::plus_product(1).unwrap();
        let (_, p, rest) = plus.measure_x(0, Some(Click::Plus)).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert_eq!(rest.n_qubits(), 0);
        assert!(plus.measure_x(0, Some(Click::Minus)).is_err());

        let zero = StateVector::basis(1, 0).unwrap();
        for c in [Click::Plus, Click::Minus] {
            let (_, p, _) = zero.measure_x(0, Some(c)).unwrap();
            assert!((p - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn measure_x_reindexes_middle_qubit() {
        // |0>|+>|1> -> measuring qubit 1 leaves |01>.
        let s = StateVector::basis(1, 0)
            .unwrap()
            .tensor(&StateVector::plus_product(1).unwrap())
            .unwrap()
            .tensor(&StateVector::basis(1, 1).unwrap())
            .unwrap();
        let (_, p, post) = s.measure_x(1, Some(Click::Plus)).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert_amps(&post, &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn expectations() {
        let x: PauliString = "X".parse().unwrap();
        let plus = StateVector::plus_product(1).unwrap();
        assert!((plus.expectation(&x).unwrap() - 1.0).abs() < 1e-12);
        let zero = StateVector::basis(1, 0).unwrap();
        assert!(zero.expectation(&x).unwrap().abs() < 1e-12);
        let y: PauliString = "Y".parse().unwrap();
        let plus_i = StateVector::new(vec![C64::new(R, 0.0), C64::new(0.0, R)]).unwrap();
        assert!((plus_i.expectation(&y).unwrap() - 1.0).abs() < 1e-12);
        assert!((plus_i.expectation(&y.negated()).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn global_phase_equality() {
        let s = re(&[0.6, 0.8]);
        let neg = re(&[-0.6, -0.8]);
        assert!(s.equal_up_to_global_phase(&neg, 1e-12).unwrap());
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert!(!zero.equal_up_to_global_phase(&one, 1e-12).unwrap());
        let two = StateVector::basis(2, 0).unwrap();
        assert!(matches!(
            zero.equal_up_to_global_phase(&two, 1e-12),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
