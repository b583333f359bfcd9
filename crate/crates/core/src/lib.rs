pub mod arith;
pub mod bar;
pub mod error;
pub mod matrix;
pub mod steinberg;
pub mod structure;
pub mod symbol;
pub mod tree;

pub use arith::{Rational, ResidueUnit, SIntegerRing};
pub use bar::BarChain;
pub use error::{Error, Result};
pub use matrix::{Mat2, Matrix2};
pub use symbol::{GroupOrder, SymbolInvariant};
pub use structure::{certify, generators, structure, GeneratorCertificate, StructureDescriptor};
