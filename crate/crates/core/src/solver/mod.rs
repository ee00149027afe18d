//! Exact combinatorial search: minimum monochromatic cycle partitions,
//! independence numbers and maximum matchings.

mod independence;
mod matching;
mod partition;

pub use independence::{independence_number, max_independent_set};
pub use matching::{max_matching, maximum_matching, pairs};
pub use partition::{min_mono_cycle_partition, solve_masks, ColorMasks, Solution, SolveBudget, MAX_EXACT_VERTICES};
