//! Reference implementation of the forest language: abstract syntax and
//! well-formedness, a big-step interpreter, structural inversion, an M-SRL
//! front-end with a translator into forest, benchmark programs, and a
//! property-test harness.

pub mod interp;
pub mod msrl;
pub mod parser;
pub mod pretty;
pub mod programs;
pub mod syntax;
pub mod testkit;
