//! Numerical experiments built on the solvers: bubble traces over
//! plateaus, the two-humped non-injectivity scenario, parameter gaps of
//! rational approximants and plots.

pub mod atlas;
pub mod bubble;

pub use bubble::{
    trace_bubble, trace_component, BubbleSample, BubbleTrace, ComponentTrace, EndpointReport, Side, TraceOptions,
};
pub mod profile;
pub mod svg;
pub mod tsujii;

pub use profile::{noninjectivity_probe, two_humped_family, NoninjectivityReport};
pub use tsujii::{liouville_measure_estimate, tsujii_gap, LiouvilleReport, TsujiiReport};
pub use atlas::atlas;
pub use svg::{render_atlas, render_bubbles};
