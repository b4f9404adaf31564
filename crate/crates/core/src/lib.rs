pub mod check;
pub mod chromatic;
pub mod diagrams;
pub mod mtrace;
pub mod scalars;
pub mod suite;
pub mod tqft;
pub mod hopf;
pub mod rep;
