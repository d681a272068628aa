use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot place {count} TRPs: {reason}")]
    Layout { count: usize, reason: &'static str },

    #[error("could not attach exactly {per_trp} users to every TRP after {attempts} drop attempts")]
    UserDrop { per_trp: usize, attempts: usize },

    #[error("invalid parameter `{key}` = {value}: expected {expected}")]
    InvalidParam { key: &'static str, value: f64, expected: &'static str },
}

pub type Result<T> = core::result::Result<T, Error>;
