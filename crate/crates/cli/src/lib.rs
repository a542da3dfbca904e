//! Front end for the motivic calculator: the class-expression language, the
//! commands behind the `motivic` binary, and the self-check suites.

pub mod commands;
pub mod expr;
pub mod suites;
