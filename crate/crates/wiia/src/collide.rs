//! Head-on two-pulse collision experiments and outcome classification.
