pub mod cli;
pub mod codensity;
pub mod dayconv;
pub mod error;
pub mod fincat;
pub mod finprob;
pub mod io;
pub mod lp;
pub mod metrics;
pub mod polymeasure;
pub mod presets;
pub mod rational;
pub mod report;
pub mod starmonad;
pub mod value;

pub use error::{Error, Result};
