//! Dominance-based rough set analysis of preference-ordered decision tables.
//!
//! The pipeline is: parse a normalized table ([`table`]), compute dominance
//! cones and rough approximations of class unions ([`dominance`]), induce a
//! minimal set of decision rules with DOMLEM ([`induction`]), then classify
//! records with a default class ([`classify`]) and score them ([`eval`]).

pub mod classify;
pub mod cli;
pub mod decimal;
pub mod dominance;
pub mod error;
pub mod eval;
pub mod induction;
pub mod table;

pub use decimal::Decimal;
pub use error::{Error, Result};
