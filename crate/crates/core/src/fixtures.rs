//! Bundled reference instances.

use crate::model::Instance;

/// 5x5 plant with five depots that double as chargers, five vehicles, five
/// dedicated jobs and one job any vehicle may serve.
pub const SHOWCASE_JSON: &str = include_str!("../data/showcase.json");

pub fn showcase() -> Instance {
    Instance::from_json(SHOWCASE_JSON).expect("bundled instance is valid")
}
