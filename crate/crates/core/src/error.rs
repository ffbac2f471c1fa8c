use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the measurement suite can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error at row {row}: {source}")]
    Csv {
        row: u64,
        #[source]
        source: csv::Error,
    },

    #[error("row {row}: invalid {field}: {message}")]
    InvalidField {
        row: u64,
        field: &'static str,
        message: String,
    },

    #[error("row {row}: duplicate node id `{id}`")]
    DuplicateNode { row: u64, id: String },

    #[error("row {row}: edge references unknown node `{id}`")]
    UnknownNode { row: u64, id: String },

    #[error("row {row}: self-loop on node `{id}`")]
    SelfLoop { row: u64, id: String },

    #[error("node index {index} out of range (graph has {len} nodes)")]
    NodeOutOfRange { index: usize, len: usize },

    #[error("empty network: {0}")]
    EmptyNetwork(String),

    #[error("graph has no edges")]
    Edgeless,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("estimation unreliable: {0}")]
    EstimationUnreliable(String),

    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("degenerate likelihood-ratio test: {0}")]
    DegenerateTest(String),

    #[error("{failed} of {total} resampling replicates failed (more than 10%)")]
    ReplicatesFailed { failed: usize, total: usize },

    #[error("subgraph budget of {budget} exceeded in exact mode; use sampling mode")]
    BudgetExceeded { budget: u64 },

    #[error("graph is disconnected ({components} components); extract the giant component first")]
    Disconnected { components: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("consolidation diverges on ownership cycle {cycle:?} (share product {product})")]
    Divergent { cycle: Vec<String>, product: f64 },
}

impl Error {
    /// True for errors caused by malformed or unusable input data.
    pub fn is_input_error(&self) -> bool {
        if let Error::Stage { source, .. } = self {
            return source.is_input_error();
        }
        matches!(
            self,
            Error::Io(_)
                | Error::Csv { .. }
                | Error::InvalidField { .. }
                | Error::DuplicateNode { .. }
                | Error::UnknownNode { .. }
                | Error::SelfLoop { .. }
                | Error::EmptyNetwork(_)
        )
    }

    /// Failures of a statistical procedure on valid input.
    pub fn is_estimation_error(&self) -> bool {
        if let Error::Stage { source, .. } = self {
            return source.is_estimation_error();
        }
        matches!(
            self,
            Error::EstimationUnreliable(_)
                | Error::NonConvergence(_)
                | Error::DegenerateTest(_)
                | Error::ReplicatesFailed { .. }
                | Error::Divergent { .. }
                | Error::Precondition(_)
                | Error::Edgeless
                | Error::Disconnected { .. }
                | Error::BudgetExceeded { .. }
        )
    }

    /// Tags the error with the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
