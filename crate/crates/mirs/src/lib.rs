//! Support library for the `mirs` binary: the runtime property suites behind
//! `mirs check`, and the randomized generators they share with the
//! integration tests. Every suite re-verifies a family of exact structural
//! laws from first principles and reports one row per property, so a green
//! table certifies the running build rather than a past test run.

pub mod suites;
