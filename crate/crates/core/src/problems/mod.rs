//! Objectives, linear operators and seeded instance generators.

pub mod generators;
pub mod instance;
pub mod linear;
pub mod objective;
pub mod tv;

pub use generators::{gen_basis_pursuit, gen_deblur, gen_ridge, phantom, Blur, Noise};
pub use instance::{build_instance, Family, ImageDomain, Instance, InstanceSpec};
pub use linear::{Convolution2D, DenseMatrix, Identity, LinearMap};
pub use objective::{CompositeObjective, DataTerm, Regularizer};
pub use tv::{atv, itv, tv_subgradient, TvKind};
