//! Exact and numerical verification of exceptional-holonomy model geometry.

pub mod algebraic;
pub mod exact;
pub mod exterior;
pub mod grassmann;
pub mod intmat;
pub mod orbifold;
pub mod pde;
pub mod report;
pub mod shipped;
pub mod structures;
pub mod suite;
