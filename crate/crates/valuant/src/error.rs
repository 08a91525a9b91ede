use thiserror::Error;

use valuant_core::invariants::InvariantError;
use valuant_core::maclane::MacLaneError;
use valuant_core::newton::NewtonError;
use valuant_core::ramify::RamifyError;
use valuant_core::tower::TowerError;
use valuant_core::AlgebraError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: undefined symbol `{name}`")]
    UndefinedSymbol { name: String, line: usize, column: usize },
    #[error("minimal polynomial of `{0}` is not monic")]
    NonMonicMinPoly(String),
    #[error("{0}")]
    Query(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    MacLane(#[from] MacLaneError),
    #[error(transparent)]
    Newton(#[from] NewtonError),
    #[error(transparent)]
    Ramify(#[from] RamifyError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Json { path: String, message: String },
}

impl CliError {
    /// Stable `module.kind` code for reports.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "cli.parse",
            CliError::UndefinedSymbol { .. } => "cli.undefined_symbol",
            CliError::NonMonicMinPoly(_) => "cli.non_monic_minpoly",
            CliError::Query(_) => "cli.query",
            CliError::Io { .. } => "cli.io",
            CliError::Json { .. } => "cli.json",
            CliError::Algebra(_) => "algebra",
            CliError::Tower(TowerError::NotUnibranched(_)) => "tower.not_unibranched",
            CliError::Tower(TowerError::Inseparable) => "tower.inseparable",
            CliError::Tower(_) => "tower",
            CliError::Invariant(InvariantError::Inseparable) => "invariants.inseparable",
            CliError::Invariant(InvariantError::SupportPolynomial) => "invariants.support_polynomial",
            CliError::Invariant(_) => "invariants",
            CliError::MacLane(MacLaneError::ResidueFieldUnsupported(_)) => "maclane.residue_field_unsupported",
            CliError::MacLane(_) => "maclane",
            CliError::Newton(_) => "newton",
            CliError::Ramify(RamifyError::NotASubgroup) => "ramify.not_a_subgroup",
            CliError::Ramify(RamifyError::GeneratorNotPure) => "ramify.generator_not_pure",
            CliError::Ramify(RamifyError::NotDistinguishedPair(_)) => "ramify.not_distinguished_pair",
            CliError::Ramify(_) => "ramify",
        }
    }

    pub fn query(msg: impl Into<String>) -> CliError {
        CliError::Query(msg.into())
    }
}
