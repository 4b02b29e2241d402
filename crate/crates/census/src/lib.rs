//! Drivers on top of `schurkit-core`: exhaustive subset censuses, seeded CI
//! sampling, S-ring enumeration, lemma verification suites and the run
//! store that backs the `schur-kit` command line.

pub mod census;
pub mod enumerate;
pub mod error;
pub mod lemmas;
pub mod sample;
pub mod store;

use schurkit_core::Group;

pub use error::{CensusError, Result};

/// Parses `C4xC3xC3`, `4x3x3`, `4,3,3` or `C4xC3^2` into a group.
pub fn parse_group(text: &str) -> Result<Group> {
    let bad = || CensusError::BadInput(format!("cannot parse group {text:?}"));
    let mut factors = Vec::new();
    for part in text.split(['x', 'X', ',', '*', '×']) {
        let part = part.trim();
        if part.is_empty() {
            return Err(bad());
        }
        let part = part.strip_prefix(['C', 'c']).unwrap_or(part);
        let (base, exp) = match part.split_once('^') {
            Some((b, e)) => (b, e.parse::<usize>().map_err(|_| bad())?),
            None => (part, 1),
        };
        let n: usize = base.parse().map_err(|_| bad())?;
        if n == 1 {
            continue;
        }
        factors.extend(std::iter::repeat(n).take(exp));
    }
    Ok(Group::new(&factors)?)
}
