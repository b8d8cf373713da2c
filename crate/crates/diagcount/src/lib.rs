//! Exact counting of solutions to x_1^(2^m) + ... + x_n^(2^m) = 0 over
//! F_{p^s} for p = +/-3 (mod 8), with every closed formula cross-checked by
//! independent brute-force, dynamic-programming and character-sum oracles
//! over an explicitly constructed field.

pub mod algnum;
pub mod arith;
pub mod charsum;
pub mod cli;
pub mod closed_form;
mod dd;
pub mod error;
pub mod extensions;
pub mod field;
pub mod oracle;
pub mod quadpart;
pub mod report;

pub use error::{Error, Result};
