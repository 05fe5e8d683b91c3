//! Feedback-bit budgets, mean queueing delay and Kingman tail exponents.

mod budget;
mod kingman;

pub use budget::{
    bits_for_delay_ratio, bits_for_delay_ratio_asymptotic, bits_for_eta, delay_ratio_curve,
    delay_ratio_for_bits, delta_for_delay_ratio, feedback_bits_for_delta, kappa,
    pk_average_delay, AsymptoticBits, BudgetReport, DelayRatioPoint, DeltaVariant,
    FeedbackBudget,
};
pub use kingman::{
    ccdf_bound_curve, kingman_analysis, kingman_exponent, perturbation_coefficient, ArrivalLaw,
    KingmanResult, ROOT_TOL,
};
