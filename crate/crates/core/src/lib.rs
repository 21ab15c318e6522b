pub mod bench;
pub mod driver;
pub mod heuristics;
pub mod instance;
pub mod io;
pub mod master;
pub mod routing;
pub mod pricing;
