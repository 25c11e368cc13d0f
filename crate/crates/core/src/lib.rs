//! Numerical toolkit for non-compactly causal symmetric spaces: Euler
//! elements and their 3-gradings, invariant cones and positivity domains,
//! Jordan triples and Bergman operators on the open Bruhat cell, modular
//! flows, and the explicit de Sitter model with its wedge, observer and KMS
//! domains.

pub mod atlas;
pub mod cones;
pub mod desitter;
pub mod error;
pub mod flows;
pub mod grading;
pub mod jts;
pub mod lie;
pub mod numerics;
pub mod par;
pub mod verify;

pub use error::{NccError, Result};
