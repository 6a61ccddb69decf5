//! Growth laws, explicit time integration of `G_dot = G_hat(G)` and the
//! checks that keep the integration honest: exponential envelopes and
//! sampled assumption reports.

mod assumptions;
mod envelope;
mod integrate;
mod law;

pub use assumptions::{check_assumptions, AssumptionReport, SampleBox};
pub use envelope::{envelope_check, Envelope, EnvelopeCheck};
pub use integrate::{
    integrate, integrate_partial, GrowthSystem, IntegrationOptions, Method, NutrientSnapshot,
    RateEvaluation, StepDiagnostics, Trajectory,
};
pub use law::{GrowthLaw, LawKind, NutrientResponse, NutrientSampling, StressResponse};
