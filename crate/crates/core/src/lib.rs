//! FMCW radar vital-sign processing.
//!
//! The crate covers the full desk-scale chain for contactless respiration
//! and heart-rate measurement with a millimeter-wave FMCW MIMO radar:
//!
//! - [`scene`]: declarative scenes (static clutter plus one human with a
//!   harmonic chest-displacement model) synthesized into ADC data cubes.
//! - [`clutter`]: static background removal over slow time.
//! - [`locate`]: 2D MUSIC range-azimuth search on the space-time covariance.
//! - [`phase`]: fast-time/antenna collapse of the located bin, DC offset
//!   removal, and DACM phase demodulation.
//! - [`hmusic`]: harmonic MUSIC estimation of the respiration and heartbeat
//!   fundamentals, plus an FFT baseline.
//!
//! All operations are pure functions of their inputs; simulation noise is
//! reproducible from explicit seeds.

pub mod clutter;
pub mod config;
pub mod cube;
pub mod eig;
pub mod error;
pub mod locate;
pub mod phase;
pub mod scene;
pub mod steering;

pub mod hmusic;

pub use config::{RadarConfig, SPEED_OF_LIGHT};
pub use cube::AdcCube;
pub use error::{Error, Result};
pub use num_complex::Complex64;
