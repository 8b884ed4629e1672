//! meanlab: an exact computational toolkit for symbolic dynamics under Z^d
//! actions.
//!
//! The crate implements, on finitely described subshifts:
//!
//! - upper/lower Banach density and Følner asymptotic densities of subsets
//!   of Z^d ([`density`]),
//! - the Besicovitch, Banach and Weyl mean pseudometrics on configurations,
//!   with classification of systems into mean-equicontinuous vs
//!   mean-sensitive ([`meanmetric`]),
//! - independence sets, independence density and IE-pair search
//!   ([`independence`]),
//! - topological entropy by pattern counting and certified Perron roots,
//!   plus Bernoulli/Markov measure entropy ([`entropy`]),
//! - the finite-stage correspondence machinery between subset densities and
//!   empirical measures on orbit closures ([`correspondence`]).
//!
//! All densities, averages and defects are exact rationals; logarithms are
//! certified rational enclosures. Verdicts that depend on a finite search
//! scope say so in their reports.

pub mod config;
pub mod density;
pub mod dsl;
pub mod error;
pub mod group;
pub mod numeric;
pub mod sft;
pub mod subset;
pub mod sturmian;

pub use error::{Error, Result};
pub use numeric::{Interval, Rat};
