//! JSON interchange, reports, example markets, the random generator and
//! the brute-force oracles.

pub mod examples;
pub mod generate;
pub mod oracle;
pub mod report;
pub mod schema;

pub use schema::{
    claim_to_json, market_to_json, marginal_to_json, parse_claim, parse_marginal, parse_market, parse_priors,
    parse_quotes, parse_tree, quotes_to_json, to_pretty, SCHEMA,
};
