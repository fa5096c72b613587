use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of a function (negative gain, pole of Γ, ...).
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// A quadrature or extrapolation that did not reach its tolerance.
    #[error("{context}: quadrature did not converge (error estimate {achieved:e}, requested {requested:e})")]
    NonConvergence {
        context: String,
        achieved: f64,
        requested: f64,
    },

    /// A series that needed more terms than the hard cap allows.
    #[error("{function}: series not converged after {terms} terms")]
    SeriesTruncation { function: &'static str, terms: usize },

    /// A model or experiment invariant violated; `field` is a dotted path such as `tiers[1].altitude_km`.
    #[error("{}invalid {field}: {message}", line_prefix(*.line))]
    Validation {
        field: String,
        message: String,
        line: Option<usize>,
    },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn line_prefix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
            line: None,
        }
    }
}
