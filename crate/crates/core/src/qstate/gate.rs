use num_complex::Complex64 as C64;

use crate::config::EPS_NORM;
use crate::error::{Error, Result};

pub type Matrix2 = [[C64; 2]; 2];

/// Single-qubit gates. Hadamard is the real matrix with `H|0> = |+>` and
/// `H|1> = |->`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    /// `exp(-i θ X / 2)`
    RotX(f64),
    /// `exp(-i θ Z / 2)`
    RotZ(f64),
    Custom(Matrix2),
}

impl Gate {
    /// A custom gate, rejected unless `m†m = 1` within [`EPS_NORM`].
    pub fn custom(m: Matrix2) -> Result<Self> {
        let dev = unitarity_deviation(&m);
        if dev > EPS_NORM || !dev.is_finite() {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Gate::Custom(m))
    }

    pub fn matrix(&self) -> Matrix2 {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match *self {
            Gate::H => [[h, h], [h, -h]],
            Gate::X => [[o, l], [l, o]],
            Gate::Y => [[o, -i], [i, o]],
            Gate::Z => [[l, o], [o, -l]],
            Gate::S => [[l, o], [o, i]],
            Gate::RotX(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]]
            }
            Gate::RotZ(theta) => [
                [C64::from_polar(1.0, -theta / 2.0), o],
                [o, C64::from_polar(1.0, theta / 2.0)],
            ],
            Gate::Custom(m) => m,
        }
    }
}

/// Max-abs entry of `m†m - 1`.
pub fn unitarity_deviation(m: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let dot: C64 = (0..2).map(|k| m[k][r].conj() * m[k][c]).sum();
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}
