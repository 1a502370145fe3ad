pub mod coherent;
pub mod error;
pub mod geometry;
pub mod lambda;
pub mod lie;
pub mod quadrature;
pub mod reduction;
pub mod scalar;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GroupElementF64 = geometry::GroupElement<f64>;
pub type GroupElementF32 = geometry::GroupElement<f32>;
pub type SU2PairF64 = geometry::SU2Pair<f64>;
pub type SU2PairF32 = geometry::SU2Pair<f32>;
pub type SpherePointF64 = geometry::SpherePoint<f64>;
pub type SpherePointF32 = geometry::SpherePoint<f32>;
pub type QFunctionF64 = lambda::QFunction<f64>;
pub type QFunctionF32 = lambda::QFunction<f32>;
pub type CovectorF64 = lie::Covector<f64>;
pub type CovectorF32 = lie::Covector<f32>;
pub type HamiltonianSpecF64 = reduction::HamiltonianSpec<f64>;
pub type HamiltonianSpecF32 = reduction::HamiltonianSpec<f32>;
