pub mod classify;
pub mod cli;
pub mod essrange;
pub mod galerkin;
pub mod linalg;
pub mod numrange;
pub mod operators;
pub mod truncation1d;
