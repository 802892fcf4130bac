//! Exact integral cohomology of the Euclidean Bianchi groups PSL2(O_d) and
//! PGL2(O_d), d in {1, 2, 3, 7, 11}, and abelianizations of their Hecke
//! congruence subgroups.

pub mod asymptotics;
pub mod congruence;
pub mod error;
pub mod exactla;
pub mod h1;
pub mod h2;
pub mod polymod;
pub mod presentations;
pub mod ring;

pub use error::{Error, Result};
