//! Bundled models, the same files as in `fixtures/`.

use crate::cli::parse_model_text;
use crate::differential::SullivanModel;

pub struct Fixture {
    pub name: &'static str,
    pub source: &'static str,
    /// Elliptic with `k = 3`.
    pub k3_elliptic: bool,
}

macro_rules! fixture {
    ($name:literal, $k3:expr) => {
        Fixture { name: $name, source: include_str!(concat!("../fixtures/", $name, ".model")), k3_elliptic: $k3 }
    };
}

pub const FIXTURES: &[Fixture] = &[
    fixture!("ex1", true),
    fixture!("ex2", true),
    fixture!("ex1-d3", false),
    fixture!("s2", false),
    fixture!("cp2", true),
    fixture!("hp2", true),
    fixture!("cp2xcp2", true),
    fixture!("cp2xs3", true),
    fixture!("cp2xs7", true),
    fixture!("cp2xhp2", true),
    fixture!("pure-mixed", true),
    fixture!("pure-tail", true),
    fixture!("ex1-perturbed", true),
    fixture!("mixed-a", true),
    fixture!("mixed-b", true),
    fixture!("mixed-c", true),
];

impl Fixture {
    pub fn model(&self) -> SullivanModel {
        parse_model_text(self.source, self.name).expect("bundled fixture parses")
    }
}

/// Panics on an unknown name.
pub fn load(name: &str) -> SullivanModel {
    FIXTURES.iter().find(|f| f.name == name).unwrap_or_else(|| panic!("no fixture `{name}`")).model()
}

pub fn k3_pool() -> impl Iterator<Item = &'static Fixture> {
    FIXTURES.iter().filter(|f| f.k3_elliptic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::is_elliptic;

    #[test]
    fn fixtures_match_their_flags() {
        for f in FIXTURES {
            let m = f.model();
            let k3 = m.k() == Some(3) && is_elliptic(&m, None).is_elliptic();
            assert_eq!(k3, f.k3_elliptic, "{}", f.name);
        }
        assert!(k3_pool().count() >= 10);
        assert!(k3_pool().any(|f| !f.model().is_pure()));
    }
}
