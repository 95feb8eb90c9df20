//! Group configurations bundled with the library.

pub const EX31: &str = include_str!("../../../configs/ex31.toml");
pub const EX54_SIGMA: &str = include_str!("../../../configs/ex54-sigma.toml");
pub const EX55_SIGMA: &str = include_str!("../../../configs/ex55-sigma.toml");
pub const SEC42: &str = include_str!("../../../configs/sec42.toml");

/// `(name, text)` of every bundled configuration.
pub const ALL: [(&str, &str); 4] = [("ex31", EX31), ("ex54-sigma", EX54_SIGMA), ("ex55-sigma", EX55_SIGMA), ("sec42", SEC42)];

pub fn lookup(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
