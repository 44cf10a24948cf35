//! Reference systems used throughout the tests and the bundled corpus.

use crate::jet::JetSpace;
use crate::variational::SourceForm;

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub coords: &'static [&'static str],
    pub eps: &'static [&'static str],
    /// Whether the Helmholtz conditions hold.
    pub variational: bool,
}

impl Entry {
    pub fn space(&self) -> JetSpace {
        JetSpace::new(self.coords.to_vec(), 2).expect("catalog coordinates are valid")
    }

    pub fn source_form(&self) -> SourceForm {
        SourceForm::parse(&self.space(), self.eps).expect("catalog systems are valid")
    }
}

pub const OSCILLATOR: Entry = Entry { name: "oscillator", coords: &["x"], eps: &["x'' + x"], variational: true };
pub const FREE1: Entry = Entry { name: "free1", coords: &["x"], eps: &["x''"], variational: true };
pub const FREE2: Entry = Entry { name: "free2", coords: &["x", "y"], eps: &["x''", "y''"], variational: true };
pub const FREE3: Entry =
    Entry { name: "free3", coords: &["x", "y", "z"], eps: &["x''", "y''", "z''"], variational: true };
pub const MAGNETIC: Entry =
    Entry { name: "magnetic", coords: &["x", "y"], eps: &["x'' + y'", "y'' - x'"], variational: true };
/// Geodesics of `diag(1, x² + 1)`, written as `-E_i` of the kinetic energy.
pub const GEODESIC: Entry = Entry {
    name: "geodesic",
    coords: &["x", "y"],
    eps: &["x*y'^2 - x''", "-2*x*x'*y' - (x^2 + 1)*y''"],
    variational: true,
};
pub const DAMPED: Entry = Entry { name: "damped", coords: &["x"], eps: &["x'' + x'"], variational: false };
pub const HOMOGENEOUS_NONVARIATIONAL: Entry =
    Entry { name: "homogeneous-nonvariational", coords: &["x", "y"], eps: &["x''", "y'' + x'^2"], variational: false };

/// Systems satisfying the Helmholtz conditions.
pub const VARIATIONAL: [Entry; 6] = [OSCILLATOR, FREE1, FREE2, FREE3, MAGNETIC, GEODESIC];

pub const ALL: [Entry; 8] = [OSCILLATOR, FREE1, FREE2, FREE3, MAGNETIC, GEODESIC, DAMPED, HOMOGENEOUS_NONVARIATIONAL];

pub fn by_name(name: &str) -> Option<Entry> {
    ALL.iter().copied().find(|e| e.name == name)
}
