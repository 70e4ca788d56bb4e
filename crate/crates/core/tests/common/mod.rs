//! Random draws and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use cyclonet::gates::{GateSpec, U2Params};
use cyclonet::{Matrix, Network, State, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn angle(rng: &mut impl Rng) -> f64 {
    rng.gen_range(-PI..PI)
}

pub fn complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_state(rng: &mut impl Rng, dim: usize) -> State {
    State::normalized((0..dim).map(|_| complex(rng)).collect())
}

/// Random unitary from Gram-Schmidt on random complex columns.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> Matrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| complex(rng)).collect();
        for u in &cols {
            let ov: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= ov * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            data[i * dim + j] = *z;
        }
    }
    Matrix::from_vec(dim, data)
}

pub fn random_u2(rng: &mut impl Rng) -> U2Params<f64> {
    U2Params::new(angle(rng), angle(rng), angle(rng), angle(rng))
}

/// Control-gate-only network of alternating orientation.
///
/// `family` 0 keeps every phase zero (SO(3)), 1 zeroes `delta` (SU(3)),
/// 2 draws everything (U(3)).
pub fn alternating_network(rng: &mut impl Rng, family: u8, gates: usize) -> Network {
    let mut up = rng.gen_bool(0.5);
    let mut out = Vec::with_capacity(gates);
    for _ in 0..gates {
        let p = match family {
            0 => U2Params::rotation(angle(rng)),
            1 => U2Params::new(angle(rng), angle(rng), angle(rng), 0.0),
            _ => random_u2(rng),
        };
        out.push(if up {
            GateSpec::control_up(p)
        } else {
            GateSpec::control_down(p)
        });
        up = !up;
    }
    Network::new(2, out)
}

/// Arbitrary two-qubit network mixing every gate kind.
pub fn random_two_qubit_network(rng: &mut impl Rng) -> Network {
    let count = rng.gen_range(1..=5);
    let gates = (0..count)
        .map(|_| match rng.gen_range(0..6) {
            0 => GateSpec::control_down(random_u2(rng)),
            1 => GateSpec::control_up(random_u2(rng)),
            2 => GateSpec::single(rng.gen_range(1..=2), random_u2(rng)),
            3 => GateSpec::ControlNot {
                control: 1,
                target: 2,
            },
            4 => GateSpec::ControlNot {
                control: 2,
                target: 1,
            },
            _ => GateSpec::Diagonal {
                gammas: (0..4).map(|_| angle(rng)).collect(),
            },
        })
        .collect();
    Network::new(2, gates)
}

/// Bit of `index` for 1-based `line` in a `qubits`-line register.
pub fn bit(index: usize, line: usize, qubits: usize) -> usize {
    (index >> (qubits - line)) & 1
}

/// Controlled-`v` written out entry by entry.
pub fn controlled(qubits: usize, control: usize, target: usize, v: &Matrix) -> Matrix {
    let dim = 1 << qubits;
    let tmask = 1 << (qubits - target);
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        if bit(col, control, qubits) == 0 {
            data[col * dim + col] = C64::new(1.0, 0.0);
            continue;
        }
        let tb = bit(col, target, qubits);
        for ob in 0..2 {
            let row = if ob == 1 { col | tmask } else { col & !tmask };
            data[row * dim + col] = v[(ob, tb)];
        }
    }
    Matrix::from_vec(dim, data)
}

pub fn pauli_x() -> Matrix {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    Matrix::from_rows(&[&[z, o], &[o, z]])
}

pub fn apply(m: &Matrix, v: &State) -> State {
    State::from_amplitudes_unchecked(m.mul_vec(v.amplitudes()))
}

/// `n` explicit applications of `m`.
pub fn step(m: &Matrix, v: &State, n: u64) -> State {
    let mut out = v.clone();
    for _ in 0..n {
        out = apply(m, &out);
    }
    out
}

/// Smallest largest-pair distance between two eigenvalue multisets on the
/// unit circle (greedy nearest matching).
pub fn multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, (C64::from_polar(1.0, x) - C64::from_polar(1.0, y)).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
