//! Problem Hamiltonians and DC-QAOA ansatz circuits.

mod hamiltonian;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{identity_permutation, Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::router::{assemble_blocks_with_order, BlockSpec, BlockTerms, Interaction, MirrorMode};

pub use hamiltonian::{
    markowitz_instance, maxcut_hamiltonian, portfolio_hamiltonian, Problem, ProblemHamiltonian, ProblemKind,
    MAX_ENUMERATION_QUBITS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum HamiltonianToken {
    Zz,
    Zy,
    Yz,
    Z,
    X,
}

impl HamiltonianToken {
    pub fn name(self) -> &'static str {
        match self {
            HamiltonianToken::Zz => "ZZ",
            HamiltonianToken::Zy => "ZY",
            HamiltonianToken::Yz => "YZ",
            HamiltonianToken::Z => "Z",
            HamiltonianToken::X => "X",
        }
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, HamiltonianToken::Zz | HamiltonianToken::Zy | HamiltonianToken::Yz)
    }

    fn gate_kind(self) -> Option<GateKind> {
        match self {
            HamiltonianToken::Zz => Some(GateKind::Zz),
            HamiltonianToken::Zy => Some(GateKind::Zy),
            HamiltonianToken::Yz => Some(GateKind::Yz),
            _ => None,
        }
    }
}

impl FromStr for HamiltonianToken {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ZZ" => Ok(HamiltonianToken::Zz),
            "ZY" => Ok(HamiltonianToken::Zy),
            "YZ" => Ok(HamiltonianToken::Yz),
            "Z" => Ok(HamiltonianToken::Z),
            "X" => Ok(HamiltonianToken::X),
            other => Err(Error::InvalidAnsatz(format!("unknown token {other:?}"))),
        }
    }
}

/// Parses a dash-separated token string such as `ZY-ZZ-X`.
pub fn parse_sequence(s: &str) -> Result<Vec<HamiltonianToken>> {
    if s.trim().is_empty() {
        return Err(Error::InvalidAnsatz("empty Hamiltonian sequence".into()));
    }
    s.split('-').map(str::parse).collect()
}

pub fn sequence_name(tokens: &[HamiltonianToken]) -> String {
    tokens.iter().map(|t| t.name()).collect::<Vec<_>>().join("-")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateMode {
    Orig,
    OrigFs,
    OrigSf,
    AoqFs,
    AoqSf,
}

impl GateMode {
    pub const ALL: [GateMode; 5] = [GateMode::Orig, GateMode::OrigFs, GateMode::OrigSf, GateMode::AoqFs, GateMode::AoqSf];

    pub fn name(self) -> &'static str {
        match self {
            GateMode::Orig => "ORIG",
            GateMode::OrigFs => "ORIG_FS",
            GateMode::OrigSf => "ORIG_SF",
            GateMode::AoqFs => "AOQ_FS",
            GateMode::AoqSf => "AOQ_SF",
        }
    }

    pub fn is_routed(self) -> bool {
        matches!(self, GateMode::AoqFs | GateMode::AoqSf)
    }
}

impl FromStr for GateMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        GateMode::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::InvalidAnsatz(format!("unknown gate mode {s:?}")))
    }
}

impl fmt::Display for GateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub sequence: Vec<HamiltonianToken>,
    pub gate_mode: GateMode,
    /// Emit adjacent ZZ and ZY tokens as one unit per pair.
    #[serde(default)]
    pub combined: bool,
    pub depth: usize,
    /// Literal token string used in place of `sequence`, e.g. X-ZY-ZY-X.
    #[serde(default)]
    pub symmetric_template: Option<Vec<HamiltonianToken>>,
}

impl AnsatzSpec {
    pub fn new(sequence: &str, gate_mode: GateMode, depth: usize) -> Result<AnsatzSpec> {
        let spec =
            AnsatzSpec { sequence: parse_sequence(sequence)?, gate_mode, combined: false, depth, symmetric_template: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn combined(mut self) -> Result<AnsatzSpec> {
        self.combined = true;
        self.validate()?;
        Ok(self)
    }

    pub fn with_template(mut self, template: &str) -> Result<AnsatzSpec> {
        self.symmetric_template = Some(parse_sequence(template)?);
        self.validate()?;
        Ok(self)
    }

    /// Tokens applied in each depth layer.
    pub fn tokens(&self) -> &[HamiltonianToken] {
        self.symmetric_template.as_deref().unwrap_or(&self.sequence)
    }

    pub fn n_params(&self) -> usize {
        self.depth * self.tokens().len()
    }

    pub fn label(&self) -> String {
        sequence_name(self.tokens())
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::InvalidAnsatz("depth must be at least 1".into()));
        }
        if self.tokens().is_empty() {
            return Err(Error::InvalidAnsatz("empty Hamiltonian sequence".into()));
        }
        if self.combined && combined_pair(self.tokens()).is_none() {
            return Err(Error::InvalidAnsatz("combined mode needs adjacent ZZ and ZY tokens".into()));
        }
        if self.gate_mode.is_routed() && !self.tokens().iter().any(|t| t.is_two_qubit()) {
            return Err(Error::InvalidAnsatz(format!(
                "{} needs at least one two-qubit token",
                self.gate_mode.name()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for AnsatzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}{} p={}", self.label(), self.gate_mode, if self.combined { " combined" } else { "" }, self.depth)
    }
}

fn combined_pair(tokens: &[HamiltonianToken]) -> Option<usize> {
    use HamiltonianToken::{Zy, Zz};
    tokens.windows(2).position(|w| matches!((w[0], w[1]), (Zz, Zy) | (Zy, Zz)))
}

/// Flat parameter index of each (layer, token) slot: depth-major, token-minor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSlot {
    pub index: usize,
    pub layer: usize,
    pub position: usize,
    pub token: HamiltonianToken,
}

pub fn token_parameter_layout(spec: &AnsatzSpec) -> Vec<ParamSlot> {
    let tokens = spec.tokens();
    (0..spec.depth)
        .flat_map(|layer| {
            tokens.iter().enumerate().map(move |(position, &token)| ParamSlot {
                index: layer * tokens.len() + position,
                layer,
                position,
                token,
            })
        })
        .collect()
}

enum Unit {
    TwoQubit(Vec<(HamiltonianToken, usize)>),
    Single(HamiltonianToken, usize),
}

fn layer_units(spec: &AnsatzSpec) -> Vec<Unit> {
    let tokens = spec.tokens();
    let merge_at = if spec.combined { combined_pair(tokens) } else { None };
    let mut units = Vec::new();
    let mut t = 0;
    while t < tokens.len() {
        let tok = tokens[t];
        if Some(t) == merge_at {
            units.push(Unit::TwoQubit(vec![(tok, t), (tokens[t + 1], t + 1)]));
            t += 2;
            continue;
        }
        units.push(if tok.is_two_qubit() { Unit::TwoQubit(vec![(tok, t)]) } else { Unit::Single(tok, t) });
        t += 1;
    }
    units
}

/// Block sequence of the ansatz (state preparation excluded).
pub fn ansatz_blocks(spec: &AnsatzSpec, h: &ProblemHamiltonian, params: &[f64]) -> Result<Vec<BlockSpec>> {
    spec.validate()?;
    if params.len() != spec.n_params() {
        return Err(Error::ParameterCount { expected: spec.n_params(), got: params.len() });
    }
    let per_layer = spec.tokens().len();
    let units = layer_units(spec);
    let mut blocks = Vec::new();
    for layer in 0..spec.depth {
        let p = |pos: usize| params[layer * per_layer + pos];
        for u in &units {
            blocks.push(match u {
                Unit::TwoQubit(parts) => {
                    let interactions = parts
                        .iter()
                        .map(|&(tok, pos)| {
                            let angles: BTreeMap<_, _> = h.zz.iter().map(|(&k, &w)| (k, p(pos) * w)).collect();
                            Interaction::new(tok.gate_kind().expect("two-qubit token"), angles)
                        })
                        .collect::<Result<_>>()?;
                    BlockSpec::TwoQubit(BlockTerms { interactions })
                }
                Unit::Single(HamiltonianToken::Z, pos) => {
                    BlockSpec::SingleQubit(h.z.iter().map(|(&q, &w)| Gate::rz(q, 2.0 * p(*pos) * w)).collect())
                }
                Unit::Single(_, pos) => BlockSpec::SingleQubit((0..h.n).map(|q| Gate::rx(q, 2.0 * p(*pos))).collect()),
            });
        }
    }
    Ok(blocks)
}

pub fn build_ansatz(spec: &AnsatzSpec, h: &ProblemHamiltonian, params: &[f64]) -> Result<Circuit> {
    build_ansatz_with_order(spec, h, params, &identity_permutation(h.n))
}

/// Builds the ansatz circuit. `order` is the initial qubit order on the line
/// and only affects the AOQ modes.
pub fn build_ansatz_with_order(
    spec: &AnsatzSpec,
    h: &ProblemHamiltonian,
    params: &[f64],
    order: &[usize],
) -> Result<Circuit> {
    let n = h.n;
    let mut blocks = vec![BlockSpec::SingleQubit((0..n).map(|q| Gate::ry(q, FRAC_PI_2)).collect())];
    blocks.extend(ansatz_blocks(spec, h, params)?);
    match spec.gate_mode {
        GateMode::AoqFs => assemble_blocks_with_order(&blocks, n, MirrorMode::Fs, order),
        GateMode::AoqSf => assemble_blocks_with_order(&blocks, n, MirrorMode::Sf, order),
        mode => {
            let mut c = Circuit::new(n);
            let mut k = 0;
            for b in blocks {
                match b {
                    BlockSpec::SingleQubit(gates) => c.extend(gates)?,
                    BlockSpec::TwoQubit(terms) => {
                        let reverse = match mode {
                            GateMode::OrigFs => k % 2 == 1,
                            GateMode::OrigSf => k % 2 == 0,
                            _ => false,
                        };
                        k += 1;
                        let mut pairs: Vec<_> = terms.pairs().into_iter().collect();
                        if reverse {
                            pairs.reverse();
                        }
                        let id = identity_permutation(n);
                        for key in pairs {
                            for i in &terms.interactions {
                                if let Some(g) = i.gate(key, &id) {
                                    c.push(g)?;
                                }
                            }
                        }
                    }
                }
            }
            Ok(c)
        }
    }
}
