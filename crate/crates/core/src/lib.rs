//! Classification of two-dimensional evolution algebras over finite fields
//! up to isomorphism, isotopism and strong isotopism.

pub mod classify;
pub mod evoalg;
pub mod gf;
pub mod ideals;
pub mod linalg;
pub mod polyring;
pub mod search;

pub use evoalg::{AlgebraDocument, AlgebraError, EvolutionAlgebra};
pub use gf::{FieldElement, FieldSpec, GfError};
pub use linalg::Matrix;
pub use polyring::{MonomialOrder, PolyError, Polynomial, Ring};
