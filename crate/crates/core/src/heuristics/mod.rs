//! Initial columns and the metaheuristic column generators.

mod ga;
mod init;
mod moves;
mod vns;

pub use ga::{ga_generate, GaOutcome, GaParams};
pub use init::{insertion_init, simple_init, trip_shortfalls, InitError, InsertionResult, SimpleInit};
pub use moves::{crossover, local_search_pair, relocate_moves, swap_moves, two_opt_moves};
pub use vns::{vns_generate, VnsOutcome, VnsParams};
