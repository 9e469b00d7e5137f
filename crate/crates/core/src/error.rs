use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("distribution not normalised: {0}")]
    NotNormalised(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("map is not total: {0}")]
    NonTotal(String),
    #[error("strategy kind violation: {0}")]
    KindViolation(String),
    #[error("signal {0} does not belong to the player's signal set")]
    UnknownSignal(usize),
    #[error("play prefix is inconsistent with the arena at step {0}")]
    InconsistentPrefix(usize),
    #[error("arena is not synchronous")]
    NotSynchronous,
    #[error("arena does not have observable actions")]
    NotObservableActions,
    #[error("strategy belongs to the wrong player: {0}")]
    WrongSide(String),
    #[error("weights do not sum to one: {0}")]
    WeightsNotNormalised(String),
    #[error("unsupported condition: {0}")]
    UnsupportedCondition(String),
    #[error("unsupported question: {0}")]
    UnsupportedQuestion(String),
    #[error("bad vertex `{0}` is not absorbing")]
    BadNotAbsorbing(String),
    #[error("preorder peeling got stuck on {0} vertices")]
    PeelingStuck(usize),
    #[error("vertex signals do not determine {0}")]
    VertexSignalInsufficient(String),
    #[error("arena is not simple (turn-based): {0}")]
    NotSimple(String),
    #[error("arena is not deterministic at vertex `{0}`")]
    NotDeterministic(String),
    #[error("colouring is not total: vertex `{0}` has no colour")]
    ColouringNotTotal(String),
    #[error("invalid condition: {0}")]
    InvalidCondition(String),
}

impl Error {
    /// `true` for errors reporting a question outside the supported fragment
    /// (as opposed to invalid input).
    pub fn is_unsupported(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedCondition(_) | Error::UnsupportedQuestion(_)
        )
    }
}
