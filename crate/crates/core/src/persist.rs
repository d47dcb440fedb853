//! Pipeline persistence.
