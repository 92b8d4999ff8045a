//! Validated numerics for equilibria of the Ohta-Kawasaki equation on the
//! unit cube in one to three dimensions.

pub mod cift;
pub mod embeddings;
pub mod error;
pub mod interval;
pub mod linalg;
pub mod lipschitz;
pub mod newton;
pub mod operator;
pub mod polynomial;
pub mod scalar;
pub mod spectral;

pub use error::{CoreError, Result};
pub use interval::{Interval, IntervalMatrix};
pub use scalar::Scalar;

pub type Interval64 = Interval<f64>;
pub type IntervalMatrix64 = IntervalMatrix<f64>;
pub type CosineSeries64 = spectral::CosineSeries<f64>;
pub type IntervalSeries64 = spectral::CosineSeries<Interval64>;
pub type ModelParams64 = operator::ModelParams<f64>;
pub type Certificate64 = cift::Certificate<f64>;
