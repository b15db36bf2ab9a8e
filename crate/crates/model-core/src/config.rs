use crate::error::{ConfigError, DomainError};
use crate::kv::KvFile;
use crate::material::Material;
use crate::{bending_rigidity, fundamental_frequency, wave_speed};

fn positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::NotPositive { field, value })
    }
}

fn nonnegative(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::Negative { field, value })
    }
}

/// Complete description of one plucked-string run: the physical string,
/// the triangular pluck, and the discretization.
///
/// The grid has `node_count` points spanning `[0, length_m]`, so the spacing
/// is `dx = L / (node_count - 1)`; both end nodes are clamped. Damping is a
/// fluid-resistance coefficient per unit length (kg/(m·s)) acting on
/// velocity; zero means an ideal string.
#[derive(Debug, Clone, PartialEq)]
pub struct StringConfig {
    pub length_m: f64,
    pub tension_n: f64,
    /// kg/m
    pub linear_density: f64,
    /// kg/(m·s), velocity-proportional loss per unit length; 0 = undamped.
    pub damping: f64,
    pub pluck_position_m: f64,
    pub pluck_amplitude_m: f64,
    pub node_count: usize,
    pub dt_s: f64,
    pub step_count: usize,
}

impl StringConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("length_m", self.length_m)?;
        positive("tension_n", self.tension_n)?;
        positive("linear_density", self.linear_density)?;
        nonnegative("damping", self.damping)?;
        // A zero-amplitude pluck is degenerate but simulable: it yields the
        // identically-zero history, and the audio pipeline rejects the
        // resulting silent signal instead.
        nonnegative("pluck_amplitude_m", self.pluck_amplitude_m)?;
        if !self.pluck_position_m.is_finite()
            || self.pluck_position_m <= 0.0
            || self.pluck_position_m >= self.length_m
        {
            return Err(ConfigError::PluckOutsideString {
                value: self.pluck_position_m,
                length: self.length_m,
            });
        }
        if self.node_count < 3 {
            return Err(ConfigError::TooFewNodes(self.node_count));
        }
        positive("dt_s", self.dt_s)?;
        if self.step_count < 2 {
            return Err(ConfigError::TooFewSteps(self.step_count));
        }
        Ok(())
    }

    /// Grid spacing `L / (node_count - 1)`.
    pub fn dx(&self) -> f64 {
        self.length_m / (self.node_count - 1) as f64
    }

    /// `c = √(T/μ)`.
    pub fn wave_speed(&self) -> Result<f64, DomainError> {
        wave_speed(self.tension_n, self.linear_density)
    }

    /// Analytic fundamental `f₁ = c / 2L`.
    pub fn fundamental_hz(&self) -> Result<f64, DomainError> {
        fundamental_frequency(self.length_m, self.tension_n, self.linear_density)
    }

    /// Sampling rate implied by the time step.
    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt_s
    }

    /// Physical time spanned by the recorded rows, `(step_count - 1)·dt`.
    pub fn duration_s(&self) -> f64 {
        (self.step_count - 1) as f64 * self.dt_s
    }

    /// Reads the `length_m`, `tension_n`, `linear_density`, `damping`
    /// (optional, default 0), `pluck_position_m`, `pluck_amplitude_m`,
    /// `node_count`, `dt_s`, and `step_count` keys, then validates.
    pub fn from_kv(kv: &mut KvFile) -> Result<Self, ConfigError> {
        let config = Self {
            length_m: kv.require_f64("length_m")?,
            tension_n: kv.require_f64("tension_n")?,
            linear_density: kv.require_f64("linear_density")?,
            damping: kv.f64_or("damping", 0.0)?,
            pluck_position_m: kv.require_f64("pluck_position_m")?,
            pluck_amplitude_m: kv.require_f64("pluck_amplitude_m")?,
            node_count: kv.require_usize("node_count")?,
            dt_s: kv.require_f64("dt_s")?,
            step_count: kv.require_usize("step_count")?,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Geometry and material of a thin hemispherical shell, rim down, apex up.
///
/// The thin-shell model is only trusted while `thickness/radius < 0.1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BellConfig {
    pub radius_m: f64,
    pub thickness_m: f64,
    /// kg/m³
    pub density: f64,
    /// Pa
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// kg/(m²·s), velocity-proportional loss per unit area; 0 = lossless.
    pub damping_sigma: f64,
}

impl BellConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("radius_m", self.radius_m)?;
        positive("thickness_m", self.thickness_m)?;
        positive("density", self.density)?;
        positive("youngs_modulus", self.youngs_modulus)?;
        if !self.poisson_ratio.is_finite() || !(0.0..0.5).contains(&self.poisson_ratio) {
            return Err(ConfigError::PoissonOutOfRange(self.poisson_ratio));
        }
        nonnegative("damping_sigma", self.damping_sigma)?;
        let ratio = self.thickness_m / self.radius_m;
        if ratio >= 0.1 {
            return Err(ConfigError::TooThick(ratio));
        }
        Ok(())
    }

    /// `D = E·h³ / (12·(1 − ν²))`.
    pub fn bending_rigidity(&self) -> Result<f64, DomainError> {
        bending_rigidity(self.youngs_modulus, self.thickness_m, self.poisson_ratio)
    }

    /// Builds a config from a table material, taking interval midpoints
    /// where the table stores ranges.
    pub fn from_material(
        material: &Material,
        radius_m: f64,
        thickness_m: f64,
        damping_sigma: f64,
    ) -> Self {
        Self {
            radius_m,
            thickness_m,
            density: material.density,
            youngs_modulus: material.representative_youngs_modulus(),
            poisson_ratio: material.representative_poisson_ratio(),
            damping_sigma,
        }
    }

    /// Reads the `radius_m`, `thickness_m`, `density`, `youngs_modulus`,
    /// `poisson_ratio`, and `damping_sigma` (optional, default 0) keys,
    /// then validates.
    pub fn from_kv(kv: &mut KvFile) -> Result<Self, ConfigError> {
        let config = Self {
            radius_m: kv.require_f64("radius_m")?,
            thickness_m: kv.require_f64("thickness_m")?,
            density: kv.require_f64("density")?,
            youngs_modulus: kv.require_f64("youngs_modulus")?,
            poisson_ratio: kv.require_f64("poisson_ratio")?,
            damping_sigma: kv.f64_or("damping_sigma", 0.0)?,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Where the virtual microphone sits relative to the string, plus the air
/// constants that scale the radiated pressure.
///
/// The microphone hangs `standoff_m` above grid node `reference_index`;
/// the distance to node `n` is `Rₙ = √(standoff² + (xₙ − x_ref)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ListenerGeometry {
    pub standoff_m: f64,
    pub reference_index: usize,
    /// kg/m³
    pub air_density: f64,
    /// m/s
    pub sound_speed: f64,
}

impl ListenerGeometry {
    /// 1 m above the middle node, air at 20 °C.
    pub fn above_middle(node_count: usize) -> Self {
        Self {
            standoff_m: 1.0,
            reference_index: node_count / 2,
            air_density: 1.204,
            sound_speed: 343.0,
        }
    }

    pub fn validate(&self, node_count: usize) -> Result<(), ConfigError> {
        positive("standoff_m", self.standoff_m)?;
        positive("air_density", self.air_density)?;
        positive("sound_speed", self.sound_speed)?;
        if self.reference_index >= node_count {
            return Err(ConfigError::ReferenceOutsideGrid {
                index: self.reference_index,
                node_count,
            });
        }
        Ok(())
    }

    /// Reads the optional `standoff_m`, `reference_index`, `air_density`,
    /// and `sound_speed` keys on top of [`ListenerGeometry::above_middle`]
    /// defaults, then validates against the grid.
    pub fn from_kv(kv: &mut KvFile, node_count: usize) -> Result<Self, ConfigError> {
        let defaults = Self::above_middle(node_count);
        let geometry = Self {
            standoff_m: kv.f64_or("standoff_m", defaults.standoff_m)?,
            reference_index: kv.usize_or("reference_index", defaults.reference_index)?,
            air_density: kv.f64_or("air_density", defaults.air_density)?,
            sound_speed: kv.f64_or("sound_speed", defaults.sound_speed)?,
        };
        geometry.validate(node_count)?;
        Ok(geometry)
    }
}
