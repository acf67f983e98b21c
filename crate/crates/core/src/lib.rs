//! Exact grid algebra and Monte Carlo estimators for the Boltzmann–Grad limit
//! of the Lorentz gas whose scatterers sit on a finite union of grids.

pub mod catalog;
pub mod exactfield;
pub mod flight;
pub mod gridalg;
pub mod homspace;
pub mod lab;
pub mod planar;
pub mod rng;
pub mod scene;
