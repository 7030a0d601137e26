//! Experiment configuration, tabular/plot output, and run manifests.
