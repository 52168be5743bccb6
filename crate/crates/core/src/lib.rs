//! Probability-free pricing and hedging of adjusted American lookback options.
// `!(x > 0)` is used throughout so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adjuster;
pub mod error;
pub mod evidence;
pub mod io;
pub mod oracle;
pub mod pricing;
pub mod quadrature;
pub mod scalar;
pub mod strategy;

pub use adjuster::{
    ala_to_asla, ala_to_spine, asla_to_measure, asla_to_measure_with, concave_increasing_envelope, measure_to_ala,
    measure_to_asla, measure_to_spine, running_sup_envelope, sla_integral, sla_integral_fn, spine_to_ala,
    spine_to_asla, spine_to_measure, Adjuster, Ala, Atom, DiscreteMeasure, MeasureView, PiecewiseLinear, ScaledAsla,
    Spine, StepFunction, TailFunction,
};
pub use error::{Error, Result};
pub use evidence::{bet_transform, calibrate_stream, CalibratedStream, Capital, EvidenceStream};
pub use oracle::{expected_asla, expected_payoff, max_law, supermartingale_check, Interval, MaxLaw, WalkSpec};
pub use pricing::{
    price_general, price_simple, solve_majorant_bruteforce, GeneralPayoff, GridConfig, Hedge, PriceResult,
    SimplePayoff,
};
pub use quadrature::{Integral, QuadOptions};
pub use scalar::Real;
pub use strategy::{run_path, AdjusterStrategy, CapitalRecord, PricePath, Strategy};

pub type Adjuster64 = Adjuster<f64>;
pub type Spine64 = Spine<f64>;
pub type Measure64 = DiscreteMeasure<f64>;
pub type Ala64 = Ala<f64>;
pub type Asla64 = ScaledAsla<f64>;
pub type Adjuster32 = Adjuster<f32>;
pub type Spine32 = Spine<f32>;
