//! Exact localized equivariant quadratic Donaldson–Thomas series for toric
//! threefolds with an `N_3`-orientation, computed from fan data.
//!
//! The pipeline runs bottom-up:
//!
//! * [`series`]: truncated power series over exact rationals, MacMahon's function.
//! * [`partitions`]: 3D partitions (finite-colength monomial ideals).
//! * [`character`]: Laurent-polynomial characters and their weight specializations.
//! * [`witt`]: the sign function `eps` and localized Euler-class ratios.
//! * [`vertex`]: trace characters and the quadratic/classical vertex measures.
//! * [`fan`]: fan validation, unimodular frames, orientation criterion, blowups.
//! * [`dtinv`]: weight selection, DT series, Bott residue and the fixed-point oracle.
//! * [`cli`]: the `qdt` command-line front end.

pub mod character;
pub mod cli;
pub mod dtinv;
pub mod fan;
pub mod partitions;
pub mod series;
pub mod vertex;
pub mod witt;

pub use character::{LaurentZ3, WeightChar, WeightTriple};
pub use dtinv::{DtError, DtReport, EmbeddingParams, TauClass};
pub use fan::{Fan, FanError};
pub use partitions::Partition3D;
pub use series::{PowerSeries, Rational};
