//! Exact root-datum combinatorics: lattices, central products, classification
//! of root data, p-morphisms and smooth regular embeddings.

pub mod asai;
pub mod catalog;
pub mod central;
pub mod classify;
pub mod embed;
pub mod error;
pub mod morphism;
pub mod rootdata;
pub mod zlattice;

pub use error::{Error, Result};
