pub mod channels;
pub mod closed_form;
pub mod config;
pub mod error;
pub mod montecarlo;
pub mod numeric;
pub mod outage;
pub mod quadrature;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};
