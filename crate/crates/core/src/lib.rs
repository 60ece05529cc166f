pub mod algebra;
pub mod arith;
pub mod error;
pub mod forms;
pub mod ideal;
pub mod lattice;
pub mod local;
pub mod matrix;
pub mod modular;
pub mod modules;
pub mod unimodular;
pub mod zmat;
pub mod zmod;

pub use algebra::{Algebra, Elem, Place, PlaceKind};
pub use arith::Int;
pub use error::{Error, Result};
pub use matrix::{Mat, MatrixFile};
