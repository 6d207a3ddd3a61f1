//! Specializations of the algebra of symmetric functions, described by the
//! values π(e_k) and the generating series E(w) = Σ π(e_k) w^k.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{as_integer, principal_pow};

/// Open annulus inner < |w| < outer on which both E(w) and E(1/w) are
/// given by their closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn contains(&self, radius: f64) -> bool {
        self.inner < radius && radius < self.outer
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpecializationKind {
    /// π_z: e_k = ξ^{k/2} z(z−1)…(z−k+1)/k!, E(w) = (1 + √ξ w)^z.
    Binomial { z: Complex64, xi: f64 },
    /// e_k = a^k/k!, E(w) = exp(a w).
    Exponential { scale: f64 },
    /// Finitely many coefficients e_0 = 1, e_1, …, e_d.
    Polynomial { coeffs: Vec<Complex64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Specialization {
    kind: SpecializationKind,
    label: String,
}

/// Coefficient as read from JSON: a bare real, an `[re, im]` pair or an
/// `{"re": .., "im": ..}` object.
#[derive(Deserialize)]
#[serde(untagged)]
enum JsonCoefficient {
    Real(f64),
    Pair([f64; 2]),
    Object {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl From<JsonCoefficient> for Complex64 {
    fn from(c: JsonCoefficient) -> Self {
        match c {
            JsonCoefficient::Real(re) => Complex64::new(re, 0.0),
            JsonCoefficient::Pair([re, im]) => Complex64::new(re, im),
            JsonCoefficient::Object { re, im } => Complex64::new(re, im),
        }
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::InvalidParameter(format!("xi must lie in (0, 1), got {xi}")));
    }
    Ok(())
}

impl Specialization {
    /// π_z with e_k = ξ^{k/2} (z−k+1)…z / k!.
    pub fn pi_z(z: Complex64, xi: f64) -> Result<Self> {
        check_xi(xi)?;
        Ok(Self {
            kind: SpecializationKind::Binomial { z, xi },
            label: format!("pi_z(z={z}, xi={xi})"),
        })
    }

    /// Plancherel specialization with e_k = (√2 η)^k / k!.
    pub fn plancherel(eta: f64) -> Result<Self> {
        if eta == 0.0 || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eta must be finite and non-zero, got {eta}"
            )));
        }
        Ok(Self {
            kind: SpecializationKind::Exponential {
                scale: std::f64::consts::SQRT_2 * eta,
            },
            label: format!("plancherel(eta={eta})"),
        })
    }

    /// Finite-support specialization; `coeffs[0]` must be 1.
    pub fn from_coefficients(mut coeffs: Vec<Complex64>) -> Result<Self> {
        match coeffs.first() {
            Some(c0) if (c0 - 1.0).norm() <= 1e-12 => coeffs[0] = Complex64::new(1.0, 0.0),
            _ => {
                return Err(Error::InvalidParameter(
                    "e-coefficient list must start with e_0 = 1".into(),
                ))
            }
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        let label = format!("polynomial(degree={})", coeffs.len() - 1);
        Ok(Self {
            kind: SpecializationKind::Polynomial { coeffs },
            label,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<JsonCoefficient> =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("e-coefficient JSON: {e}")))?;
        Self::from_coefficients(raw.into_iter().map(Complex64::from).collect())
    }

    /// e_k = δ_{k,0}.
    pub fn trivial() -> Self {
        Self::from_coefficients(vec![Complex64::new(1.0, 0.0)]).expect("valid")
    }

    pub fn kind(&self) -> &SpecializationKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// π(e_k); zero for k < 0.
    pub fn e(&self, k: i64) -> Complex64 {
        if k < 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.e_coefficients(k as usize)[k as usize]
    }

    /// π(e_0), …, π(e_max).
    pub fn e_coefficients(&self, max: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(max + 1);
        match &self.kind {
            SpecializationKind::Binomial { z, xi } => {
                let s = xi.sqrt();
                let mut e = Complex64::new(1.0, 0.0);
                for k in 0..=max {
                    out.push(e);
                    e *= (z - k as f64) * s / (k as f64 + 1.0);
                }
            }
            SpecializationKind::Exponential { scale } => {
                let mut e = 1.0;
                for k in 0..=max {
                    out.push(Complex64::new(e, 0.0));
                    e *= scale / (k as f64 + 1.0);
                }
            }
            SpecializationKind::Polynomial { coeffs } => {
                out.extend((0..=max).map(|k| coeffs.get(k).copied().unwrap_or_default()));
            }
        }
        out
    }

    /// Smallest K such that every |e_k| with k ≥ K is below `tol` times the
    /// largest coefficient (exact for finite support).
    pub fn coefficient_cutoff(&self, tol: f64) -> usize {
        match &self.kind {
            SpecializationKind::Polynomial { coeffs } => coeffs.len(),
            SpecializationKind::Binomial { z, .. } if as_integer(*z).is_some_and(|n| n >= 0) => {
                as_integer(*z).unwrap() as usize + 1
            }
            _ => {
                let min_k = match &self.kind {
                    SpecializationKind::Binomial { z, .. } => z.norm().ceil() as usize + 2,
                    SpecializationKind::Exponential { scale } => scale.abs().ceil() as usize + 2,
                    SpecializationKind::Polynomial { .. } => unreachable!(),
                };
                let mut block = 64;
                loop {
                    let e = self.e_coefficients(block + 8);
                    let peak = e.iter().map(|c| c.norm()).fold(0.0, f64::max);
                    if let Some(k) = (min_k..=block).find(|&k| e[k..k + 8].iter().all(|c| c.norm() <= tol * peak)) {
                        return k;
                    }
                    if block > 1 << 16 {
                        return block;
                    }
                    block *= 2;
                }
            }
        }
    }

    /// Annulus on which the contour integrals may be placed.
    pub fn annulus(&self) -> Annulus {
        match &self.kind {
            SpecializationKind::Binomial { xi, .. } => Annulus {
                inner: xi.sqrt(),
                outer: 1.0 / xi.sqrt(),
            },
            SpecializationKind::Exponential { .. } => Annulus {
                inner: 0.0,
                outer: f64::INFINITY,
            },
            SpecializationKind::Polynomial { coeffs } => {
                // zeros of E(1/w) are the roots of the monic polynomial
                // w^d + e_1 w^{d-1} + … + e_d; bound them (Cauchy, Fujiwara)
                let tail = &coeffs[1..];
                let inner = if tail.is_empty() {
                    0.0
                } else {
                    let cauchy = 1.0 + tail.iter().map(|c| c.norm()).fold(0.0, f64::max);
                    let fujiwara = 2.0
                        * tail
                            .iter()
                            .enumerate()
                            .map(|(i, c)| c.norm().powf(1.0 / (i as f64 + 1.0)))
                            .fold(0.0, f64::max);
                    cauchy.min(fujiwara)
                };
                Annulus {
                    inner,
                    outer: f64::INFINITY,
                }
            }
        }
    }

    /// E(w) in closed form through the principal power; agrees with the
    /// Taylor series wherever that converges.
    pub fn e_series(&self, w: Complex64) -> Result<Complex64> {
        match &self.kind {
            SpecializationKind::Binomial { z, xi } => principal_pow(1.0 + xi.sqrt() * w, *z),
            SpecializationKind::Exponential { scale } => Ok((scale * w).exp()),
            SpecializationKind::Polynomial { coeffs } => {
                Ok(coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c))
            }
        }
    }

    /// E(1/w) in closed form.
    pub fn e_series_at_inverse(&self, w: Complex64) -> Result<Complex64> {
        if w.norm() == 0.0 {
            return Err(Error::Domain("E(1/w) at w = 0".into()));
        }
        match &self.kind {
            SpecializationKind::Binomial { z, xi } => principal_pow(1.0 + xi.sqrt() / w, *z),
            _ => self.e_series(w.inv()),
        }
    }

    /// E(w) / E(1/w).
    pub fn e_ratio(&self, w: Complex64) -> Result<Complex64> {
        let denom = self.e_series_at_inverse(w)?;
        if denom.norm() < 1e-300 {
            return Err(Error::DivisionByZero(format!("E(1/w) vanishes at w = {w}")));
        }
        Ok(self.e_series(w)? / denom)
    }

    /// Partial sum Σ_{k ≤ terms} e_k w^k, for checking the closed forms.
    pub fn e_series_partial(&self, w: Complex64, terms: usize) -> Complex64 {
        self.e_coefficients(terms)
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
    }
}

/// First K+1 coefficients of 1/E(w), the entries of the inverse Toeplitz
/// matrix of the e-sequence.
pub fn inverse_e_coefficients(spec: &Specialization, max: usize) -> Vec<Complex64> {
    let e = spec.e_coefficients(max);
    let mut c: Vec<Complex64> = Vec::with_capacity(max + 1);
    c.push(Complex64::new(1.0, 0.0));
    for k in 1..=max {
        let acc: Complex64 = (1..=k).map(|j| e[j] * c[k - j]).sum();
        c.push(-acc);
    }
    c
}
