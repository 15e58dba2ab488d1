use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::PureState;
use crate::error::Error;

/// States referred to by name in the audits and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    /// `|+>|+>`, all four amplitudes 1/2.
    Product,
    /// `(|00> + |11>)/sqrt2`
    Bell,
    /// `sum_k |kk>/sqrt d` on two qudits.
    MaxEntangled(usize),
    /// `(|000> + |111>)/sqrt2`
    Ghz,
    /// `(|100> + |010> + |001>)/sqrt3`
    W,
    /// `|100>/sqrt2 + |010>/2 + |001>/2`, whose EoF triple breaks additivity.
    Counterexample,
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::Product => write!(f, "product"),
            NamedState::Bell => write!(f, "bell"),
            NamedState::MaxEntangled(d) => write!(f, "maxent{d}"),
            NamedState::Ghz => write!(f, "ghz"),
            NamedState::W => write!(f, "w"),
            NamedState::Counterexample => write!(f, "counterexample"),
        }
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "product" => Ok(NamedState::Product),
            "bell" => Ok(NamedState::Bell),
            "ghz" => Ok(NamedState::Ghz),
            "w" => Ok(NamedState::W),
            "counterexample" => Ok(NamedState::Counterexample),
            other => other
                .strip_prefix("maxent")
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&d| d >= 2)
                .map(NamedState::MaxEntangled)
                .ok_or_else(|| Error::UnknownState(s.to_string())),
        }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Exact amplitudes for a named state.
pub fn named_state(name: NamedState) -> PureState {
    let zero = real(0.0);
    let (amps, dims) = match name {
        NamedState::Product => (vec![real(0.5); 4], vec![2, 2]),
        NamedState::Bell => (
            vec![real(FRAC_1_SQRT_2), zero, zero, real(FRAC_1_SQRT_2)],
            vec![2, 2],
        ),
        NamedState::MaxEntangled(d) => {
            let mut a = vec![zero; d * d];
            let amp = real(1.0 / (d as f64).sqrt());
            for k in 0..d {
                a[k * d + k] = amp;
            }
            (a, vec![d, d])
        }
        NamedState::Ghz => {
            let mut a = vec![zero; 8];
            a[0] = real(FRAC_1_SQRT_2);
            a[7] = real(FRAC_1_SQRT_2);
            (a, vec![2, 2, 2])
        }
        NamedState::W => {
            let mut a = vec![zero; 8];
            let amp = real(1.0 / 3f64.sqrt());
            a[0b100] = amp;
            a[0b010] = amp;
            a[0b001] = amp;
            (a, vec![2, 2, 2])
        }
        NamedState::Counterexample => {
            let mut a = vec![zero; 8];
            a[0b100] = real(FRAC_1_SQRT_2);
            a[0b010] = real(0.5);
            a[0b001] = real(0.5);
            (a, vec![2, 2, 2])
        }
    };
    PureState::from_parts_unchecked(amps, dims)
}
