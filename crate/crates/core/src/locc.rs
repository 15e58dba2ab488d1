//! State-vector teleportation of one qubit.
//!
//! Qubit 0 carries the input, qubits 1 and 2 share `(|00> + |11>)/sqrt2`.
//! The sender applies CNOT(0 -> 1) then H on qubit 0 and measures both of
//! its qubits, getting `(i, j)`. The receiver applies `Z^i X^j` to qubit 2.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, ZERO};
use crate::states::{rng_from_seed, PureState};

/// Pauli correction applied by the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Correction {
    I,
    X,
    Z,
    /// `X` first, then `Z`.
    XZ,
}

impl Correction {
    pub fn for_outcome(i: u8, j: u8) -> Self {
        match (i, j) {
            (0, 0) => Correction::I,
            (0, _) => Correction::X,
            (_, 0) => Correction::Z,
            _ => Correction::XZ,
        }
    }

    fn apply(self, v: [Complex64; 2]) -> [Complex64; 2] {
        let flip = |v: [Complex64; 2]| [v[1], v[0]];
        let phase = |v: [Complex64; 2]| [v[0], -v[1]];
        match self {
            Correction::I => v,
            Correction::X => flip(v),
            Correction::Z => phase(v),
            Correction::XZ => phase(flip(v)),
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportTranscript {
    pub input_state: PureState,
    /// Measured bits of qubits 0 and 1.
    pub outcome: (u8, u8),
    /// Probability of `outcome` before the measurement.
    pub outcome_probability: f64,
    pub correction: Correction,
    pub output_state: PureState,
    /// `|<input|output>|^2`
    pub fidelity: f64,
}

/// Amplitudes of the three-qubit register after the sender's gates.
fn sender_circuit(input: &[Complex64]) -> [Complex64; 8] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // |input> (|00> + |11>)/sqrt2, index 4 q0 + 2 q1 + q2
    let mut psi = [ZERO; 8];
    for q0 in 0..2 {
        for b in 0..2 {
            psi[4 * q0 + 3 * b] = input[q0] * h;
        }
    }
    // CNOT 0 -> 1 swaps |1 0 x> and |1 1 x>
    psi.swap(4, 6);
    psi.swap(5, 7);
    // H on qubit 0
    let mut out = [ZERO; 8];
    for rest in 0..4 {
        let (a, b) = (psi[rest], psi[4 + rest]);
        out[rest] = (a + b) * h;
        out[4 + rest] = (a - b) * h;
    }
    out
}

/// Teleports a one-qubit state. The outcome is drawn from the Born rule with
/// a generator seeded by `seed` unless `forced_outcome` is given.
pub fn teleport(
    input: &PureState,
    forced_outcome: Option<(u8, u8)>,
    seed: u64,
) -> Result<TeleportTranscript> {
    if input.dims() != [2] {
        return Err(Error::WrongDims {
            expected: vec![2],
            got: input.dims().to_vec(),
        });
    }
    if let Some((i, j)) = forced_outcome {
        if i > 1 || j > 1 {
            return Err(Error::InvalidOutcome(i, j));
        }
    }
    let psi = sender_circuit(input.amplitudes());
    let branch = |i: usize, j: usize| [psi[4 * i + 2 * j], psi[4 * i + 2 * j + 1]];
    let weight = |i: usize, j: usize| branch(i, j).iter().map(|z| z.norm_sqr()).sum::<f64>();

    let (i, j) = match forced_outcome {
        Some((i, j)) => (i as usize, j as usize),
        None => {
            let mut rng = rng_from_seed(seed);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = (1, 1);
            for k in 0..4 {
                acc += weight(k >> 1, k & 1);
                if u < acc {
                    pick = (k >> 1, k & 1);
                    break;
                }
            }
            pick
        }
    };
    let p = weight(i, j);
    let received = branch(i, j).map(|z| z / p.sqrt());
    let correction = Correction::for_outcome(i as u8, j as u8);
    let output_state = PureState::normalized(correction.apply(received).to_vec(), vec![2])?;
    let fidelity = inner(input.amplitudes(), output_state.amplitudes())
        .norm_sqr()
        .min(1.0);
    Ok(TeleportTranscript {
        input_state: input.clone(),
        outcome: (i as u8, j as u8),
        outcome_probability: p,
        correction,
        output_state,
        fidelity,
    })
}
