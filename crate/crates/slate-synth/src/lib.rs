//! A fully enumerable issue/opinion environment.
//!
//! Each agent holds an ideal opinion in `1..=b` on every issue; a statement
//! fixes opinions on a subset of issues and costs one unit per issue
//! addressed. Utilities are exact half-integers, so the whole universe and
//! all query answers can be computed exactly — which is what makes this
//! environment suitable for studying how selection processes degrade under
//! controlled query errors.

mod env;
mod oracle;

pub use env::SyntheticEnv;
pub use oracle::{ErrorMode, ErrorModel, ExactSuite, NoisySuite};
