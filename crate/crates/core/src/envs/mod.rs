//! The four environments, each with its level type, procedural generator,
//! descriptive features and step/observe implementation.

pub mod ctf;
pub mod harvest;
pub mod kitchen;
pub mod traffic;
