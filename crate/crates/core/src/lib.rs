//! Cantor–Bendixson bounds on bi-Lipschitz embeddings of finite-set
//! metric spaces into C(K) for countable ordinal compacta.

pub mod cli;
pub mod clopen;
pub mod compacta;
pub mod delta;
pub mod engine;
pub mod error;
pub mod json;
pub mod ordinal;
pub mod rational;
pub mod restriction;
pub mod step;

pub use error::{Error, Result};
