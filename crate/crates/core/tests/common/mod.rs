//! Plain-vector reference implementations used as test oracles. Nothing here
//! calls into the crate's simulator.
#![allow(dead_code)]

use num_complex::Complex64 as C64;

pub const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

pub fn plus(n: usize) -> Vec<C64> {
    let a = (1.0 / (1usize << n) as f64).sqrt();
    vec![c(a); 1 << n]
}

pub fn cz(v: &mut [C64], n: usize, a: usize, b: usize) {
    for (i, x) in v.iter_mut().enumerate() {
        if i & bit(n, a) != 0 && i & bit(n, b) != 0 {
            *x = -*x;
        }
    }
}

pub fn hadamard(v: &mut [C64], n: usize, q: usize) {
    let m = bit(n, q);
    for i in 0..v.len() {
        if i & m == 0 {
            let (a, b) = (v[i], v[i | m]);
            v[i] = (a + b) * H;
            v[i | m] = (a - b) * H;
        }
    }
}

pub fn flip(v: &mut [C64], n: usize, q: usize) {
    let m = bit(n, q);
    for i in 0..v.len() {
        if i & m == 0 {
            v.swap(i, i | m);
        }
    }
}

/// Linear cluster on `n` qubits: CZ on every neighbouring pair of `|+>^n`.
pub fn cluster(n: usize) -> Vec<C64> {
    let mut v = plus(n);
    for j in 0..n - 1 {
        cz(&mut v, n, j, j + 1);
    }
    v
}

/// `<v| X_a Z_{a-1} Z_{a+1} |v>` on the chain.
pub fn chain_stabilizer(v: &[C64], n: usize, a: usize) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for (i, amp) in v.iter().enumerate() {
        let j = i ^ bit(n, a);
        let mut sign = 1.0;
        for nb in [a.wrapping_sub(1), a + 1] {
            if nb < n && j & bit(n, nb) != 0 {
                sign = -sign;
            }
        }
        acc += amp.conj() * v[j] * sign;
    }
    acc.re
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Largest amplitude gap after rotating `b` onto `a`'s global phase.
pub fn phase_distance(a: &[C64], b: &[C64]) -> f64 {
    let ov = inner(b, a);
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { c(1.0) };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y * phase).norm())
        .fold(0.0, f64::max)
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Even (`|00>,|11>`) or odd part of qubits `a`, `b`, unnormalized.
pub fn z_parity_part(v: &[C64], n: usize, a: usize, b: usize, even: bool) -> Vec<C64> {
    v.iter()
        .enumerate()
        .map(|(i, x)| {
            let same = ((i & bit(n, a)) != 0) == ((i & bit(n, b)) != 0);
            if same == even {
                *x
            } else {
                c(0.0)
            }
        })
        .collect()
}

/// `(|s1> ± |s2>)/√2` from two bitstrings such as `"000"`, `"111"`.
pub fn ket_pair(s1: &str, s2: &str, plus: bool) -> Vec<C64> {
    let n = s1.len();
    let mut v = vec![c(0.0); 1 << n];
    v[usize::from_str_radix(s1, 2).unwrap()] += H;
    v[usize::from_str_radix(s2, 2).unwrap()] += if plus { H } else { -H };
    v
}

pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Bell states as printed: `phi`/`psi` with sign.
pub fn bell(phi: bool, plus: bool) -> Vec<C64> {
    if phi {
        ket_pair("00", "11", plus)
    } else {
        ket_pair("01", "10", plus)
    }
}

/// Three-qubit classes g1..g4 as printed (first ket, second ket).
pub const GHZ3_KETS: [(&str, &str); 4] = [("000", "111"), ("110", "001"), ("010", "101"), ("100", "011")];

/// Four-qubit classes i..viii as printed.
pub const QUAD_KETS: [(&str, &str); 8] = [
    ("0000", "1111"),
    ("0001", "1110"),
    ("0010", "1101"),
    ("0100", "1011"),
    ("1000", "0111"),
    ("0011", "1100"),
    ("0101", "1010"),
    ("1001", "0110"),
];

pub const ROMAN: [&str; 8] = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii"];

/// Every basis state of a family as `(label name, amplitudes)`.
pub fn family_states(family: &str) -> Vec<(String, Vec<C64>)> {
    let signs = [(true, '+'), (false, '-')];
    let mut out = Vec::new();
    match family {
        "bell" => {
            for (phi, name) in [(true, "phi"), (false, "psi")] {
                for (p, s) in signs {
                    out.push((format!("bell:{name}{s}"), bell(phi, p)));
                }
            }
        }
        "ghz3" => {
            for (g, (a, b)) in GHZ3_KETS.iter().enumerate() {
                for (p, s) in signs {
                    out.push((format!("ghz3:g{}{s}", g + 1), ket_pair(a, b, p)));
                }
            }
        }
        "quad" => {
            for (k, (a, b)) in QUAD_KETS.iter().enumerate() {
                for (p, s) in signs {
                    out.push((format!("quad:{}{s}", ROMAN[k]), ket_pair(a, b, p)));
                }
            }
        }
        _ => panic!("unknown family {family}"),
    }
    out
}

/// Two electrons, one per input arm, scattered by `u` (`u[out][in]`, modes
/// `A↑ A↓ B↑ B↓`), then post-selected on exactly one electron in arm `A`.
/// Returns `P(One)` and the unnormalized spin amplitudes `φ(s_A, s_B)`.
pub fn two_electron_one_branch(spin: &[C64], u: &[[C64; 4]; 4]) -> (f64, Vec<C64>) {
    // antisymmetric wavefunction ψ[i][j]
    let mut psi = [[c(0.0); 4]; 4];
    for (idx, amp) in spin.iter().enumerate() {
        let a = idx >> 1;
        let b = 2 + (idx & 1);
        psi[a][b] += amp;
        psi[b][a] -= amp;
    }
    // ψ' = U ψ Uᵀ
    let mut out = [[c(0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = c(0.0);
            for k in 0..4 {
                for l in 0..4 {
                    acc += u[i][k] * psi[k][l] * u[j][l];
                }
            }
            out[i][j] = acc;
        }
    }
    let phi: Vec<C64> = (0..4).map(|idx| out[idx >> 1][2 + (idx & 1)]).collect();
    (norm_sqr(&phi), phi)
}
