//! Confusion metrics, ROC/AUC, and experiment harnesses.
