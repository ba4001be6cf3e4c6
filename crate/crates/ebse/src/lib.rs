//! Distributed event-based state estimation and control over a shared bus.
//!
//! Agents replicate one centralized linear observer and broadcast sensor
//! data only when innovation triggers fire; the library simulates the
//! resulting networked system (including packet drops, event-triggered
//! input exchange, and synchronous averaging resets) and certifies its
//! stability and worst-case error bounds offline.
//!
//! Start with [`scenario::builtin_benchmark`] and [`sim::run`], or load a
//! scenario file via [`scenario::Scenario::load`]. Certification lives in
//! [`analysis`].

pub mod agent;
pub mod analysis;
pub mod bus;
pub mod error;
pub mod linalg;
pub mod model;
pub mod observer;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod trigger;

pub use error::{Error, Result};
