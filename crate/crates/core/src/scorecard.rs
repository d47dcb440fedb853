//! Weight-of-evidence tables.
