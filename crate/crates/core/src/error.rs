use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("the marker # has no formal inverse")]
    HashNotInvertible,
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("element budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("state budget of {0} exceeded")]
    StateBudgetExceeded(usize),
    #[error("output budget of {0} exceeded")]
    OutputBudgetExceeded(usize),
    #[error("search budget of {0} exceeded")]
    SearchBudgetExceeded(usize),

    #[error("operation not supported for the {0} backend")]
    UnsupportedBackend(&'static str),
    #[error("group is not finite")]
    NotFinite,
    #[error("input language uses the marker #")]
    MarkerInInput,

    #[error("production is not of the form A -> xBy or A -> x#y: {0}")]
    NotLinearNormalForm(String),
    #[error("the empty word is in the language")]
    EpsilonInLanguage,
    #[error("grammar is not in Chomsky normal form: {0}")]
    NotCnf(String),
    #[error("inconsistent marker count for nonterminal {0}")]
    RankInconsistent(String),
    #[error("inconsistent group image for nonterminal {0}")]
    ImageInconsistent(String),

    #[error("not a multiplication-table word: {0}")]
    NotATableWord(String),
    #[error("word does not label a cycle: {0}")]
    NotACycle(String),
    #[error("paths do not share endpoints")]
    EndpointMismatch,
    #[error("combing is not closed under formal inverses")]
    NotInverseClosed,
    #[error("pairs must shrink: |y| < |x| violated for {0}")]
    PairNotShrinking(String),
    #[error("verification failed with {} counterexample(s)", .0.len())]
    VerificationFailed(Vec<String>),
}
