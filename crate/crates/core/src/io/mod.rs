//! Text, JSON and QUBO formats.

pub mod json;
pub mod qubo;
pub mod text;

pub use json::{from_json, from_json_into, to_json, PolyJson};
pub use qubo::{from_qubo_into, to_qubo, QuboJson};
pub use text::{format_assignment, parse, parse_into, print, NameTable};
