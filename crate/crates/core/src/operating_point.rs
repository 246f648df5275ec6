//! Per-branch operating values and their text file format.
//!
//! One line per branch: `R1 i=0.5 v=0.5`, or `M1 sigma=0.1 phi=0.2` for a
//! memristor (its `i`/`v` may be given as well and default to zero).
//! Branches that are not listed, and keys that are omitted, read as zero.

use std::fmt;

use thiserror::Error;

use crate::expr::Bindings;
use crate::netlist::{BranchKind, Circuit};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BranchState {
    pub i: f64,
    pub v: f64,
    /// Charge and flux, memristors only.
    pub sigma: f64,
    pub phi: f64,
}

impl BranchState {
    pub fn new(i: f64, v: f64) -> Self {
        BranchState { i, v, ..Default::default() }
    }

    pub fn memristor(sigma: f64, phi: f64) -> Self {
        BranchState { sigma, phi, ..Default::default() }
    }

    /// Bindings for the variables a branch of `kind` depends on.
    pub fn bindings(&self, kind: BranchKind) -> Bindings {
        match kind {
            BranchKind::Memristor => Bindings::from_pairs([("sigma", self.sigma), ("phi", self.phi)]),
            _ => Bindings::from_pairs([("i", self.i), ("v", self.v)]),
        }
    }
}

/// Values for every branch, in canonical branch order.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    states: Vec<BranchState>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatingPointError {
    #[error("line {line}: unknown branch `{name}`")]
    UnknownBranch { line: usize, name: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

impl OperatingPoint {
    pub fn zeros(branches: usize) -> Self {
        OperatingPoint { states: vec![BranchState::default(); branches] }
    }

    pub fn from_states(states: Vec<BranchState>) -> Self {
        OperatingPoint { states }
    }

    pub fn states(&self) -> &[BranchState] {
        &self.states
    }

    pub fn state(&self, branch: usize) -> &BranchState {
        &self.states[branch]
    }

    pub fn state_mut(&mut self, branch: usize) -> &mut BranchState {
        &mut self.states[branch]
    }

    pub fn currents(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.i).collect()
    }

    pub fn voltages(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.v).collect()
    }

    pub fn parse(text: &str, circuit: &Circuit) -> Result<Self, OperatingPointError> {
        let mut op = OperatingPoint::zeros(circuit.branch_count());
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split_whitespace();
            let name = parts.next().unwrap_or_default();
            let index = circuit
                .branch_index(name)
                .ok_or_else(|| OperatingPointError::UnknownBranch { line, name: name.to_string() })?;
            let state = &mut op.states[index];
            for part in parts {
                let (key, value) = part.split_once('=').ok_or_else(|| OperatingPointError::Syntax {
                    line,
                    message: format!("expected key=value, found `{part}`"),
                })?;
                let x: f64 = value.parse().map_err(|_| OperatingPointError::Syntax {
                    line,
                    message: format!("bad number `{value}`"),
                })?;
                match key {
                    "i" => state.i = x,
                    "v" => state.v = x,
                    "sigma" => state.sigma = x,
                    "phi" => state.phi = x,
                    _ => {
                        return Err(OperatingPointError::Syntax {
                            line,
                            message: format!("unknown key `{key}`"),
                        })
                    }
                }
            }
        }
        Ok(op)
    }

    /// Writes the file format, one line per branch of `circuit`.
    pub fn display<'a>(&'a self, circuit: &'a Circuit) -> impl fmt::Display + 'a {
        OpDisplay { op: self, circuit }
    }
}

struct OpDisplay<'a> {
    op: &'a OperatingPoint,
    circuit: &'a Circuit,
}

impl fmt::Display for OpDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, s) in self.circuit.branches().iter().zip(&self.op.states) {
            write!(f, "{} i={:?} v={:?}", b.name, s.i, s.v)?;
            if b.kind == BranchKind::Memristor {
                write!(f, " sigma={:?} phi={:?}", s.sigma, s.phi)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
