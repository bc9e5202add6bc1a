use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Z,
    Y,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }
}

/// Signed tensor product of single-qubit Paulis. `factors[0]` acts on the
/// leftmost (most significant) qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    negative: bool,
    factors: Vec<Pauli>,
}

impl PauliString {
    pub fn new(factors: Vec<Pauli>) -> Self {
        Self {
            negative: false,
            factors,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n])
    }

    /// Identity everywhere except the listed `(qubit, pauli)` sites.
    pub fn from_sites(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut factors = vec![Pauli::I; n];
        for &(q, p) in sites {
            let slot = factors
                .get_mut(q)
                .ok_or(Error::QubitOutOfRange { q, n })?;
            *slot = p;
        }
        Ok(Self::new(factors))
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    pub fn weight(&self) -> usize {
        self.factors.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .factors
            .iter()
            .zip(&other.factors)
            .filter(|(a, b)| a.anticommutes(**b))
            .count();
        anti % 2 == 0
    }

    /// Bit masks `(x, z)` over basis indices of an `n = len()` register, plus
    /// the number of `Y` factors.
    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let n = self.factors.len();
        let mut x = 0;
        let mut z = 0;
        let mut ys = 0;
        for (q, p) in self.factors.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            if p.has_x() {
                x |= bit;
            }
            if p.has_z() {
                z |= bit;
            }
            if *p == Pauli::Y {
                ys += 1;
            }
        }
        (x, z, ys)
    }

    /// `P|i> = phase(i) |i ^ x>` with `phase(i) = ±i^{#Y} (-1)^{|i & z|}`.
    pub(crate) fn apply_to(&self, amps: &[C64]) -> Vec<C64> {
        let (xmask, zmask, ys) = self.masks();
        let base = C64::i().powu(ys) * if self.negative { -1.0 } else { 1.0 };
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for (i, &a) in amps.iter().enumerate() {
            let sign = if (i & zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out[i ^ xmask] += base * sign * a;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for p in &self.factors {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let factors = body
            .chars()
            .map(|c| match c {
                'I' | '.' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidLabel(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if factors.is_empty() {
            return Err(Error::InvalidLabel(s.to_string()));
        }
        Ok(Self { negative, factors })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p: PauliString = "-XZIY".parse().unwrap();
        assert!(p.is_negative());
        assert_eq!(p.weight(), 3);
        assert_eq!(p.to_string(), "-XZIY");
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn commutation() {
        let a: PauliString = "XZ".parse().unwrap();
        let b: PauliString = "ZX".parse().unwrap();
        let c: PauliString = "ZI".parse().unwrap();
        assert!(a.commutes_with(&b));
        assert!(!a.commutes_with(&c));
    }
}
