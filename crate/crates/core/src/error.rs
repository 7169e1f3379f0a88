use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong while building or analysing systems.
///
/// Witnesses are rendered with the owning lattice's element labels so the
/// messages can be shown to users as-is.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("cover relation has a cycle through `{0}`")]
    CoverCycle(String),
    #[error("not a lattice: `{a}` and `{b}` have no {kind}")]
    NotALattice {
        a: String,
        b: String,
        kind: &'static str,
    },
    #[error("elements or systems from different lattices were mixed")]
    LatticeMismatch,
    #[error("operation needs a boolean lattice")]
    NotBoolean,

    #[error("top element `{0}` is not a fixed point")]
    MissingTop(String),
    #[error("bottom element `{0}` is not a fixed point of the kernel")]
    MissingBottom(String),
    #[error("set is not closed under meet: `{a}` ∧ `{b}` = `{meet}` is missing")]
    NotMeetClosed { a: String, b: String, meet: String },
    #[error("set is not closed under join: `{a}` ∨ `{b}` = `{join}` is missing")]
    NotJoinClosed { a: String, b: String, join: String },
    #[error("map table has {got} entries but the lattice has {expected} elements")]
    TableSize { got: usize, expected: usize },
    #[error("map is not expansive at `{at}`: it is sent to `{image}`")]
    NotExpansive { at: String, image: String },
    #[error("map is not order-preserving: `{a}` ≤ `{b}` but their images `{fa}` ≰ `{fb}`")]
    NotMonotone {
        a: String,
        b: String,
        fa: String,
        fb: String,
    },
    #[error("map is not idempotent at `{at}`: f(`{at}`) = `{once}` but f(f(`{at}`)) = `{twice}`")]
    NotIdempotent {
        at: String,
        once: String,
        twice: String,
    },
    #[error("(`{s}`, `{t}`) is not a cover pair")]
    NotACover { s: String, t: String },
    #[error("the top element has no coatom")]
    CoatomOfTop,
    #[error("system is not prime")]
    NotPrime,
    #[error("invalid model: {field}: {reason}")]
    InvalidModel { field: String, reason: String },
    #[error("component index {index} out of range for {len} components")]
    ComponentOutOfRange { index: usize, len: usize },
    #[error("rule for component `{0}` changes other components")]
    RuleNotLocal(String),
    #[error("component realization is invalid: {0}")]
    InvalidRealization(String),
    #[error("measure: {0}")]
    InvalidMeasure(String),
    #[error("law `{law}` failed: {witness}")]
    LawViolation { law: &'static str, witness: String },

    #[error("{what} exceeds the limit of {limit}")]
    Capability { what: String, limit: usize },
}

impl Error {
    /// True for size/cap and representation limits, as opposed to invalid input.
    pub fn is_capability(&self) -> bool {
        matches!(self, Error::Capability { .. })
    }

    pub(crate) fn capability(what: impl Into<String>, limit: usize) -> Self {
        Error::Capability {
            what: what.into(),
            limit,
        }
    }

    pub(crate) fn model(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidModel {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
