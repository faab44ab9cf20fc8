//! Parameter estimation: pitch, modal analysis, loss-filter fitting and
//! genetic optimization.

pub mod analysis;
pub mod ga;
pub mod loss;
pub mod modal;
pub mod pitch;

pub use ga::{ga_optimize, FitnessEvaluator, GaConfig, GaModel, GaResult, Weighting};
pub use loss::{loss_filter_fit, LossFit};
pub use modal::{modal_fit, partial_decays, synthesize, track_modes, ModalComponent};
pub use pitch::estimate_f0;
