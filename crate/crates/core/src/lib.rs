//! Arbitrage and superhedging on finite scenario trees under a
//! set of priors, in exact rational arithmetic.
//!
//! ```
//! use robust_ftap::arbitrage::{check_sna, Verdict};
//! use robust_ftap::io::examples;
//! use robust_ftap::lp::SolverConfig;
//!
//! let s = check_sna(&examples::three_state(), &SolverConfig::default()).unwrap();
//! assert_eq!(s.na.verdict, Verdict::NoArbitrage);
//! assert_eq!(s.verdict, Verdict::Arbitrage);
//! ```

pub mod arbitrage;
pub mod cli;
pub mod error;
pub mod io;
pub mod lp;
pub mod market;
mod martingale;
pub mod mot;
pub mod num;
pub mod superhedge;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/markets.md")]
    struct Markets;
    #[doc = include_str!("../../../book/src/arbitrage.md")]
    struct Arbitrage;
    #[doc = include_str!("../../../book/src/superhedging.md")]
    struct Superhedging;
    #[doc = include_str!("../../../book/src/measures.md")]
    struct Measures;
    #[doc = include_str!("../../../book/src/calibration.md")]
    struct Calibration;
    #[doc = include_str!("../../../book/src/files.md")]
    struct Files;
}
