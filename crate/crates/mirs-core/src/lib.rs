//! Exact-arithmetic engine for a multiindex-indexed regularity structure:
//! homogeneity bookkeeping over the parameter line, populated-sector
//! enumeration, recentering operators and their derivatives, the symbolic
//! expansion hierarchy for the driving component, and Appell-adapted
//! polynomial calculus. Everything here is exact: rationals, linear forms
//! in the roughness and discount parameters, and big-integer combinatorics.

pub mod appell;
pub mod enumerate;
pub mod error;
pub mod hierarchy;
pub mod json;
pub mod linform;
pub mod multiindex;
pub mod params;
pub mod poly;
pub mod ratio;
pub mod recenter;
pub mod series;
