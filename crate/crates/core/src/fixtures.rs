//! Bundled example machines.
//!
//! `EQABC` decides `{w | w has equally many a, b and c}` deterministically with
//! four tapes. `EQABC-ND` decides the same language by copying each input
//! symbol to a nondeterministically chosen auxiliary tape and then matching one
//! `a`, `b` and `c` per step in any tape order.

use crate::file::parse_machine;
use crate::machine::Machine;

pub const EQABC_JSON: &str = include_str!("../fixtures/eqabc.json");
pub const EQABC_ND_JSON: &str = include_str!("../fixtures/eqabc_nd.json");

pub fn eqabc() -> Machine {
    parse_machine(EQABC_JSON).expect("bundled EQABC is valid")
}

pub fn eqabc_nd() -> Machine {
    parse_machine(EQABC_ND_JSON).expect("bundled EQABC-ND is valid")
}

/// `(name, machine-file JSON)` for every bundled machine.
pub fn examples() -> [(&'static str, &'static str); 2] {
    [("EQABC", EQABC_JSON), ("EQABC-ND", EQABC_ND_JSON)]
}
