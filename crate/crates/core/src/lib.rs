//! Exact rearrangement inequalities for the uncentered Hardy–Littlewood maximal
//! operator on the real line with general Borel measures.

pub mod error;
pub mod constants;
pub mod cli;
pub mod covering;
pub mod exactnum;
pub mod io;
pub mod measure;
pub mod maximal;
pub mod stepfn;
pub mod verify;

pub use error::{Error, Result};
