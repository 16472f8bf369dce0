//! Admissible probe frames and probe parameter validation.
//!
//! A probe is parametrized by a real frequency `xi`, two real unit vectors
//! `mu1`, `mu2` orthogonal to `xi` and to each other, a semiclassical
//! parameter `h`, a role (solution vs adjoint), and a compactly supported
//! time bump. The frame must satisfy `mu2[n-1] = 0` and `mu1[n-1] != 0`,
//! which is what makes the reflected construction close up; such a frame
//! exists only when the tangential part of `xi` is nonzero.

use crate::error::{Error, Result};

/// Acceptance threshold for the six frame constraints.
pub const FRAME_TOL: f64 = 1e-14;

/// Smooth compactly supported bump on `(center - width, center + width)`.
///
/// `m(t) = exp(-1/(s(1-s)))` with `s = (t - center + width)/(2 width)`,
/// extended by zero outside the support interval.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProbeBump {
    /// Center of the support interval.
    pub center: f64,
    /// Half-length of the support interval.
    pub width: f64,
}

impl ProbeBump {
    /// Validates the parameters; the width must be positive.
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !center.is_finite() || !width.is_finite() {
            return Err(Error::InvalidProbe(format!(
                "bump requires finite center and positive width, got ({center}, {width})"
            )));
        }
        Ok(Self { center, width })
    }

    /// Support interval `(center - width, center + width)`.
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    /// `true` when the closed support lies inside the open interval `(0, t_end)`.
    pub fn supported_inside(&self, t_end: f64) -> bool {
        let (lo, hi) = self.support();
        lo > 0.0 && hi < t_end
    }

    /// Bump value at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let s = (t - self.center + self.width) / (2.0 * self.width);
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        (-1.0 / (s * (1.0 - s))).exp()
    }

    /// Exact first derivative at `t`.
    pub fn derivative(&self, t: f64) -> f64 {
        let s = (t - self.center + self.width) / (2.0 * self.width);
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        let g = s * (1.0 - s);
        (-1.0 / g).exp() * (1.0 - 2.0 * s) / (g * g) / (2.0 * self.width)
    }
}

/// Which of the two paired solutions the probe builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ProbeRole {
    /// Forward equation of the second pair; phase `phi + i psi_plus`.
    Solution,
    /// Adjoint equation of the first pair; phase `-phi + i psi_minus`.
    Adjoint,
}

/// Frequency, frame, semiclassical parameter, role, and time bump of a probe.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CgoProbe {
    /// Real frequency vector.
    pub xi: Vec<f64>,
    /// Unit vector orthogonal to `xi` and `mu2`, nonzero normal component.
    pub mu1: Vec<f64>,
    /// Unit vector orthogonal to `xi` with zero normal component.
    pub mu2: Vec<f64>,
    /// Semiclassical parameter.
    pub h: f64,
    /// Solution vs adjoint role.
    pub role: ProbeRole,
    /// Compactly supported time bump.
    pub bump: ProbeBump,
}

/// Builds the canonical frame for a frequency with nonzero tangential part.
///
/// `mu2` rotates the two largest tangential slots of `xi` a quarter turn
/// (the `(xi_2, -xi_1, 0, ...)` pattern when the first slot dominates) and
/// `mu1 = (xi_n xi', -|xi'|^2) / (|xi'| |xi|)`, whose last component is
/// strictly negative. Both are unit, orthogonal to `xi` and to each other.
pub fn choose_frame(xi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = xi.len();
    if n < 3 {
        return Err(Error::InvalidProbe(format!(
            "frame construction requires dimension >= 3, got {n}"
        )));
    }
    if xi.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidProbe("frequency must be finite".into()));
    }
    let tangential = &xi[..n - 1];
    let tan_norm_sq: f64 = tangential.iter().map(|c| c * c).sum();
    if tan_norm_sq == 0.0 {
        return Err(Error::InvalidProbe(
            "degenerate frequency: hyperplane-normal xi excluded".into(),
        ));
    }

    let mut i = 0usize;
    for (k, c) in tangential.iter().enumerate() {
        if c.abs() > tangential[i].abs() {
            i = k;
        }
    }
    let j = (i + 1) % (n - 1);
    let mut mu2 = vec![0.0; n];
    mu2[i] = xi[j];
    mu2[j] = -xi[i];
    let w = (mu2[i] * mu2[i] + mu2[j] * mu2[j]).sqrt();
    mu2[i] /= w;
    mu2[j] /= w;

    let norm_sq = tan_norm_sq + xi[n - 1] * xi[n - 1];
    let scale = tan_norm_sq.sqrt() * norm_sq.sqrt();
    let mut mu1 = vec![0.0; n];
    for k in 0..n - 1 {
        mu1[k] = xi[n - 1] * xi[k] / scale;
    }
    mu1[n - 1] = -tan_norm_sq / scale;

    Ok((mu1, mu2))
}

/// Worst violation over the six frame constraints.
pub fn frame_defect(xi: &[f64], mu1: &[f64], mu2: &[f64]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let n = xi.len();
    [
        dot(mu1, mu2).abs(),
        dot(xi, mu1).abs(),
        dot(xi, mu2).abs(),
        (dot(mu1, mu1) - 1.0).abs(),
        (dot(mu2, mu2) - 1.0).abs(),
        mu2[n - 1].abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

impl CgoProbe {
    /// Builds a probe with the canonical frame for `xi`.
    pub fn new(xi: Vec<f64>, h: f64, role: ProbeRole, bump: ProbeBump) -> Result<Self> {
        let (mu1, mu2) = choose_frame(&xi)?;
        Self::with_frame(xi, mu1, mu2, h, role, bump)
    }

    /// Builds a probe from an explicitly supplied frame, validating the
    /// constraint set and the semiclassical admissibility of `h`.
    pub fn with_frame(
        xi: Vec<f64>,
        mu1: Vec<f64>,
        mu2: Vec<f64>,
        h: f64,
        role: ProbeRole,
        bump: ProbeBump,
    ) -> Result<Self> {
        let n = xi.len();
        if mu1.len() != n || mu2.len() != n {
            return Err(Error::InvalidProbe(format!(
                "frame dimension mismatch: xi has {n} components, frame has ({}, {})",
                mu1.len(),
                mu2.len()
            )));
        }
        let defect = frame_defect(&xi, &mu1, &mu2);
        if defect > FRAME_TOL {
            return Err(Error::InvalidProbe(format!(
                "frame constraints violated by {defect:.3e} (tolerance {FRAME_TOL:.1e})"
            )));
        }
        if mu1[n - 1] == 0.0 {
            return Err(Error::InvalidProbe(
                "frame requires a nonzero normal component of mu1".into(),
            ));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidProbe(format!(
                "semiclassical parameter must be positive and finite, got {h}"
            )));
        }
        let xi_norm_sq: f64 = xi.iter().map(|c| c * c).sum();
        let gap = 1.0 - h.powf(1.2) * xi_norm_sq / 4.0;
        if gap <= 0.0 {
            return Err(Error::InvalidProbe(format!(
                "h = {h} too large for |xi| = {:.6}: requires h^(6/5) |xi|^2 / 4 < 1",
                xi_norm_sq.sqrt()
            )));
        }
        Ok(Self {
            xi,
            mu1,
            mu2,
            h,
            role,
            bump,
        })
    }

    /// Space dimension of the probe.
    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// Same probe with a different semiclassical parameter (h-sweeps).
    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::with_frame(
            self.xi.clone(),
            self.mu1.clone(),
            self.mu2.clone(),
            h,
            self.role,
            self.bump,
        )
    }

    /// Largest admissible `h` for this frequency: `(4/|xi|^2)^(5/6)`, or
    /// infinity for `xi = 0` frames supplied explicitly.
    pub fn h_cap(xi: &[f64]) -> f64 {
        let norm_sq: f64 = xi.iter().map(|c| c * c).sum();
        if norm_sq == 0.0 {
            f64::INFINITY
        } else {
            (4.0 / norm_sq).powf(5.0 / 6.0)
        }
    }
}
