//! Narrowband LoS channel synthesis over a frequency-antenna grid.
//!
//! A system is described by a carrier frequency, a centered subcarrier grid,
//! and a planar antenna array at the origin. A user at polar position
//! `(r, theta)` in the far field induces the channel vector
//!
//! ```text
//! h = (sqrt(Na*Ns)/r) * exp(-j 2 pi r / lambda) * f(r) (x) a(theta)
//! ```
//!
//! where `f` is the unit-norm frequency signature across subcarriers, `a`
//! the unit-norm array steering vector, and `(x)` the Kronecker product in
//! frequency-major order (subcarrier outer, antenna inner).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

use crate::SPEED_OF_LIGHT;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("carrier frequency must be positive, got {0}")]
    BadCarrier(f64),
    #[error("subcarrier spacing must be positive, got {0}")]
    BadSpacing(f64),
    #[error("subcarrier count must be at least 1")]
    NoSubcarriers,
    #[error("antenna count must be at least 1")]
    NoAntennas,
    #[error("array element spacing must be positive, got {0}")]
    BadElementSpacing(f64),
    #[error("array radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("array barycenter must sit at the origin (offset {0:.3e} m)")]
    OffCenterArray(f64),
    #[error("region must satisfy 0 < r_min < r_max, got [{0}, {1}]")]
    BadRadialInterval(f64, f64),
    #[error("region angular span must lie in (0, 2 pi], got {0}")]
    BadAngularSpan(f64),
}

/// Polar position relative to the array origin; `r` in meters, `theta` in
/// radians normalized to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPosition {
    pub r: f64,
    pub theta: f64,
}

impl PolarPosition {
    pub fn new(r: f64, theta: f64) -> Self {
        assert!(r > 0.0, "polar position needs r > 0, got {r}");
        Self { r, theta: wrap_angle(theta) }
    }

    pub fn cartesian(&self) -> [f64; 2] {
        [self.r * self.theta.cos(), self.r * self.theta.sin()]
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Planar antenna array centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrayGeometry {
    /// Uniform linear array along the y axis; spacing in wavelengths.
    Ula { na: usize, spacing: f64 },
    /// Uniform circular array; radius in meters.
    Uca { na: usize, radius: f64 },
    /// Explicit element coordinates in meters, barycenter at the origin.
    Arbitrary { elements: Vec<[f64; 2]> },
}

impl ArrayGeometry {
    pub fn na(&self) -> usize {
        match self {
            ArrayGeometry::Ula { na, .. } | ArrayGeometry::Uca { na, .. } => *na,
            ArrayGeometry::Arbitrary { elements } => elements.len(),
        }
    }

    /// Element coordinates in meters for a given wavelength (the ULA spacing
    /// is specified in wavelengths, so its physical layout depends on it).
    pub fn element_positions(&self, lambda: f64) -> Vec<[f64; 2]> {
        match self {
            ArrayGeometry::Ula { na, spacing } => (0..*na)
                .map(|n| [0.0, n as f64 * spacing * lambda])
                .collect(),
            ArrayGeometry::Uca { na, radius } => (0..*na)
                .map(|n| {
                    let phi = 2.0 * PI * n as f64 / *na as f64;
                    [radius * phi.cos(), radius * phi.sin()]
                })
                .collect(),
            ArrayGeometry::Arbitrary { elements } => elements.clone(),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        match self {
            ArrayGeometry::Ula { na, spacing } => {
                if *na < 1 {
                    return Err(ConfigError::NoAntennas);
                }
                if !(*spacing > 0.0) {
                    return Err(ConfigError::BadElementSpacing(*spacing));
                }
            }
            ArrayGeometry::Uca { na, radius } => {
                if *na < 1 {
                    return Err(ConfigError::NoAntennas);
                }
                if !(*radius > 0.0) {
                    return Err(ConfigError::BadRadius(*radius));
                }
            }
            ArrayGeometry::Arbitrary { elements } => {
                if elements.is_empty() {
                    return Err(ConfigError::NoAntennas);
                }
                let n = elements.len() as f64;
                let cx = elements.iter().map(|p| p[0]).sum::<f64>() / n;
                let cy = elements.iter().map(|p| p[1]).sum::<f64>() / n;
                let off = (cx * cx + cy * cy).sqrt();
                if off > 1e-12 {
                    return Err(ConfigError::OffCenterArray(off));
                }
            }
        }
        Ok(())
    }
}

/// Multicarrier multiantenna system description.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Carrier frequency, Hz.
    pub fc: f64,
    /// Subcarrier spacing, Hz.
    pub delta_f: f64,
    /// Number of subcarriers.
    pub ns: usize,
    pub array: ArrayGeometry,
}

impl SystemConfig {
    pub fn new(fc: f64, delta_f: f64, ns: usize, array: ArrayGeometry) -> Result<Self, ConfigError> {
        let cfg = Self { fc, delta_f, ns, array };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.fc > 0.0 && self.fc.is_finite()) {
            return Err(ConfigError::BadCarrier(self.fc));
        }
        if !(self.delta_f > 0.0 && self.delta_f.is_finite()) {
            return Err(ConfigError::BadSpacing(self.delta_f));
        }
        if self.ns < 1 {
            return Err(ConfigError::NoSubcarriers);
        }
        self.array.validate()
    }

    /// Total bandwidth `Ns * delta_f`, Hz.
    pub fn bandwidth(&self) -> f64 {
        self.ns as f64 * self.delta_f
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.fc
    }

    pub fn na(&self) -> usize {
        self.array.na()
    }

    /// Channel vector dimension `Na * Ns`.
    pub fn dim(&self) -> usize {
        self.na() * self.ns
    }

    /// Frequency of subcarrier `s` (0-based). The grid is centered on the
    /// carrier: `f_s = fc - delta_f (Ns-1)/2 + delta_f s`.
    pub fn subcarrier(&self, s: usize) -> f64 {
        debug_assert!(s < self.ns);
        self.fc - self.delta_f * (self.ns as f64 - 1.0) / 2.0 + self.delta_f * s as f64
    }
}

/// Complex channel vector over the frequency-antenna grid, optionally tagged
/// with the ground-truth position it was synthesized at.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    /// Frequency-major entries: index `s * Na + n`.
    pub entries: Vec<Complex64>,
    pub position: Option<PolarPosition>,
}

impl ChannelVector {
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Unit-norm array steering vector `a(theta)`, entries
/// `(1/sqrt(Na)) exp(j (2 pi / lambda) p_n . u(theta))` with
/// `u = (cos theta, sin theta)`.
pub fn steering_vector(config: &SystemConfig, theta: f64) -> Vec<Complex64> {
    let lambda = config.wavelength();
    let k = 2.0 * PI / lambda;
    let (s, c) = theta.sin_cos();
    let scale = 1.0 / (config.na() as f64).sqrt();
    config
        .array
        .element_positions(lambda)
        .iter()
        .map(|p| Complex64::from_polar(scale, k * (p[0] * c + p[1] * s)))
        .collect()
}

/// Unit-norm frequency signature `f(r)`, entries
/// `(1/sqrt(Ns)) exp(-j 2 pi (r/c) (f_s - fc))`.
pub fn frequency_signature(config: &SystemConfig, r: f64) -> Vec<Complex64> {
    let scale = 1.0 / (config.ns as f64).sqrt();
    (0..config.ns)
        .map(|s| {
            let offset = config.subcarrier(s) - config.fc;
            Complex64::from_polar(scale, -2.0 * PI * (r / SPEED_OF_LIGHT) * offset)
        })
        .collect()
}

/// Synthesize the LoS channel vector for a user at `pos`.
///
/// The result is the scaled Kronecker product of the frequency signature and
/// the steering vector in frequency-major order, with overall norm
/// `sqrt(Na*Ns)/r` and global phase `-2 pi r / lambda`.
pub fn synth_channel(config: &SystemConfig, pos: &PolarPosition) -> ChannelVector {
    let f = frequency_signature(config, pos.r);
    let a = steering_vector(config, pos.theta);
    let na = config.na();
    let amp = (config.dim() as f64).sqrt() / pos.r;
    let scalar = Complex64::from_polar(amp, -2.0 * PI * pos.r / config.wavelength());
    let mut entries = Vec::with_capacity(config.dim());
    for fs in &f {
        let row = scalar * fs;
        for an in &a[..na] {
            entries.push(row * an);
        }
    }
    ChannelVector { entries, position: Some(*pos) }
}

/// Annular sector sampling region. `theta_min < theta_max` with span at most
/// `2 pi` (a full annulus); bounds may be given unwrapped, samples come back
/// normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl RegionSpec {
    pub fn new(r_min: f64, r_max: f64, theta_min: f64, theta_max: f64) -> Result<Self, ConfigError> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(ConfigError::BadRadialInterval(r_min, r_max));
        }
        let span = theta_max - theta_min;
        if !(span > 0.0 && span <= 2.0 * PI + 1e-12) {
            return Err(ConfigError::BadAngularSpan(span));
        }
        Ok(Self { r_min, r_max, theta_min, theta_max })
    }

    pub fn angular_span(&self) -> f64 {
        self.theta_max - self.theta_min
    }
}

/// Draw `count` user positions uniformly by area over the region.
///
/// Radii follow the triangular density `p(r) ~ r` via inverse transform
/// sampling so the spatial distribution is uniform; angles are uniform over
/// the sector. The generator is a seeded ChaCha8 stream, so outputs are
/// identical across platforms and reruns for the same seed.
pub fn sample_ues(region: &RegionSpec, count: usize, seed: u64) -> Vec<PolarPosition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r2min, r2max) = (region.r_min * region.r_min, region.r_max * region.r_max);
    (0..count)
        .map(|_| {
            let ur: f64 = rng.random();
            let ut: f64 = rng.random();
            let r = (r2min + ur * (r2max - r2min)).sqrt();
            let theta = region.theta_min + ut * region.angular_span();
            PolarPosition::new(r, theta)
        })
        .collect()
}
