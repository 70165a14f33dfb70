//! Criterion benchmark host for the estimator and oracle crates; see the
//! `benches/` targets.
