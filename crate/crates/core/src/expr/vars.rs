use super::poly::Exponent;

/// Variables an expression may mention.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarSet {
    /// `x` (alias `x1`).
    Line,
    /// `x`, `y`, `z` or `x1`, `x2`, `x3`.
    Space,
    /// `rho`, `z`, and `phi` inside `sin`/`cos`.
    Cylinder,
}

impl VarSet {
    /// Slot index of a variable name, if the set knows it.
    pub fn slot(self, name: &str) -> Option<usize> {
        match (self, name) {
            (VarSet::Line, "x" | "x1") => Some(0),
            (VarSet::Space, "x" | "x1") => Some(0),
            (VarSet::Space, "y" | "x2") => Some(1),
            (VarSet::Space, "z" | "x3") => Some(2),
            (VarSet::Cylinder, "rho") => Some(0),
            (VarSet::Cylinder, "z") => Some(2),
            _ => None,
        }
    }

    pub fn default_names(self) -> VarNames {
        match self {
            VarSet::Line | VarSet::Space => VarNames::xyz(),
            VarSet::Cylinder => VarNames::cylindrical(),
        }
    }
}

/// Printed names of the three variable slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarNames {
    pub names: [&'static str; 3],
    /// Name of the angle in `sin(k*...)`.
    pub angle: &'static str,
}

impl VarNames {
    pub const fn xyz() -> Self {
        VarNames { names: ["x", "y", "z"], angle: "phi" }
    }

    pub const fn one_dim() -> Self {
        Self::xyz()
    }

    pub const fn cartesian() -> Self {
        VarNames { names: ["x1", "x2", "x3"], angle: "phi" }
    }

    pub const fn cylindrical() -> Self {
        VarNames { names: ["rho", "phi", "z"], angle: "phi" }
    }

    /// `x1^2*x3`, or the empty string for the unit monomial.
    pub fn monomial(&self, e: &Exponent) -> String {
        let mut parts = Vec::new();
        for (axis, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(self.names[axis].to_string()),
                _ => parts.push(format!("{}^{}", self.names[axis], k)),
            }
        }
        parts.join("*")
    }
}
