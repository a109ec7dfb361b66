//! Phase-based derivation engine for Yemeni Arabic imperatives.
//!
//! A sentence is parsed into one clause per conjunct, features are valued by
//! Agree and inheritance inside each clause, A′-chains tie conjuncts to their
//! topics, and a judge collects every violation the derivation runs into.

pub mod agree;
pub mod chains;
pub mod clause;
pub mod features;
pub mod harness;
pub mod judge;
pub mod lexicon;
