//! Toolkit for studying how blind image watermarks coexist and how they can
//! be ensembled.
//!
//! * [`imgcore`]: image storage, colour conversion, residuals and PSNR
//! * [`watermark`]: the embed/extract contract and five keyed methods
//! * [`ecc`]: binary linear codes with encoders, decoders and construction operators
//! * [`ensemble`]: series/parallel composition, PSNR strength clipping, coded ensembles
//! * [`augment`]: seeded robustness augmentation suites
//! * [`harness`]: corpus handling, experiments and CSV/JSON reports
//! * [`toymodel`]: exhaustive checks of the discrete quality-ball model

pub mod augment;
pub mod ecc;
pub mod ensemble;
pub mod harness;
pub mod imgcore;
pub mod toymodel;
pub mod transform;
pub mod watermark;

pub use imgcore::{Image, Residual};
pub use watermark::{MethodId, Secret, Watermarker, WatermarkerSpec};
