use crate::error::UnknownMaterial;

/// Closed real interval. Tabulated material constants are often quoted as
/// ranges; single-valued entries are stored as degenerate intervals so the
/// table keeps its published form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn point(value: f64) -> Self {
        Self {
            lo: value,
            hi: value,
        }
    }

    /// Representative scalar used whenever a formula needs one value.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lo <= value && value <= self.hi
    }
}

/// Elastic constants of a shell material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub name: &'static str,
    /// kg/m³
    pub density: f64,
    /// Pa; brass is tabulated as a range, the rest are single values.
    pub youngs_modulus: Interval,
    pub poisson_ratio: Interval,
}

impl Material {
    pub fn representative_youngs_modulus(&self) -> f64 {
        self.youngs_modulus.midpoint()
    }

    pub fn representative_poisson_ratio(&self) -> f64 {
        self.poisson_ratio.midpoint()
    }
}

/// Candidate bell materials.
pub const BUILTIN_MATERIALS: [Material; 4] = [
    Material {
        name: "Steel",
        density: 7850.0,
        youngs_modulus: Interval::point(210e9),
        poisson_ratio: Interval::new(0.24, 0.30),
    },
    Material {
        name: "Aluminum",
        density: 2700.0,
        youngs_modulus: Interval::point(62e9),
        poisson_ratio: Interval::new(0.24, 0.33),
    },
    Material {
        name: "Copper",
        density: 8920.0,
        youngs_modulus: Interval::point(128e9),
        poisson_ratio: Interval::point(0.33),
    },
    Material {
        name: "Brass",
        density: 8470.0,
        youngs_modulus: Interval::new(80e9, 100e9),
        poisson_ratio: Interval::point(0.37),
    },
];

pub fn builtin_materials() -> &'static [Material] {
    &BUILTIN_MATERIALS
}

/// Case-insensitive lookup into [`BUILTIN_MATERIALS`].
pub fn material(name: &str) -> Result<&'static Material, UnknownMaterial> {
    BUILTIN_MATERIALS
        .iter()
        .find(|m| m.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| UnknownMaterial {
            name: name.to_owned(),
        })
}
