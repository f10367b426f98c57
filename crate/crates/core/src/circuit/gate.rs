use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{cr, kron2, CMatrix2, CMatrix4, C64};

pub const SIGNAL: usize = 0;
pub const ANCILLA: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    U3 { qubit: usize, theta: f64, phi: f64, lambda: f64 },
    Ry { qubit: usize, theta: f64 },
    Cnot { control: usize, target: usize },
}

/// `U3(θ, φ, λ) = [[cos θ/2, −e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(φ+λ)} cos θ/2]]`.
pub fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> CMatrix2 {
    let (s, co) = (theta / 2.0).sin_cos();
    let e = |a: f64| C64::from_polar(1.0, a);
    CMatrix2::new(cr(co), -e(lambda) * s, e(phi) * s, e(phi + lambda) * co)
}

fn on_qubit(qubit: usize, u: &CMatrix2) -> CMatrix4 {
    if qubit == SIGNAL {
        kron2(u, &CMatrix2::identity())
    } else {
        kron2(&CMatrix2::identity(), u)
    }
}

impl Gate {
    fn validate(&self) -> Result<()> {
        let ok = |q: usize| q <= 1;
        let valid = match *self {
            Gate::U3 { qubit, .. } | Gate::Ry { qubit, .. } => ok(qubit),
            Gate::Cnot { control, target } => ok(control) && ok(target) && control != target,
        };
        if valid {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid qubit indices in {self}")))
        }
    }

    /// 4×4 matrix on signal ⊗ ancilla (basis index `2·s + a`).
    pub fn matrix(&self) -> CMatrix4 {
        match *self {
            Gate::U3 { qubit, theta, phi, lambda } => on_qubit(qubit, &u3_matrix(theta, phi, lambda)),
            Gate::Ry { qubit, theta } => on_qubit(qubit, &u3_matrix(theta, 0.0, 0.0)),
            Gate::Cnot { control, target } => {
                let mut m = CMatrix4::zeros();
                for s in 0..2 {
                    for a in 0..2 {
                        let bits = [s, a];
                        let mut out = bits;
                        if bits[control] == 1 {
                            out[target] ^= 1;
                        }
                        m[(2 * out[0] + out[1], 2 * s + a)] = cr(1.0);
                    }
                }
                m
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::U3 { qubit, theta, phi, lambda } => write!(f, "u3 q{qubit} {theta} {phi} {lambda}"),
            Gate::Ry { qubit, theta } => write!(f, "ry q{qubit} {theta}"),
            Gate::Cnot { control, target } => write!(f, "cx q{control} q{target}"),
        }
    }
}

fn parse_qubit(tok: &str) -> Result<usize> {
    tok.strip_prefix('q')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad qubit `{tok}`")))
}

fn parse_angle(tok: &str) -> Result<f64> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("bad angle `{tok}`")))
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let gate = match toks.as_slice() {
            ["u3", q, t, p, l] => Gate::U3 {
                qubit: parse_qubit(q)?,
                theta: parse_angle(t)?,
                phi: parse_angle(p)?,
                lambda: parse_angle(l)?,
            },
            ["ry", q, t] => Gate::Ry {
                qubit: parse_qubit(q)?,
                theta: parse_angle(t)?,
            },
            ["cx", c, t] => Gate::Cnot {
                control: parse_qubit(c)?,
                target: parse_qubit(t)?,
            },
            _ => return Err(Error::Parse(format!("unrecognized gate line `{line}`"))),
        };
        gate.validate()?;
        Ok(gate)
    }
}

/// Ordered gate list on signal (q0) and ancilla (q1); the ancilla starts in |0⟩.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate()?;
        }
        Ok(Self { gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Product of the gate matrices, first gate acting first.
    pub fn unitary(&self) -> CMatrix4 {
        self.gates
            .iter()
            .fold(CMatrix4::identity(), |acc, g| g.matrix() * acc)
    }

    /// Kraus operators `K_a = ⟨a|_anc U |0⟩_anc`.
    pub fn kraus(&self) -> [CMatrix2; 2] {
        let u = self.unitary();
        std::array::from_fn(|a| CMatrix2::from_fn(|so, si| u[(2 * so + a, 2 * si)]))
    }

    /// One gate per line in the `u3` / `ry` / `cx` text format.
    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    /// Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let gates = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<Vec<Gate>>>()?;
        Self::new(gates)
    }
}
