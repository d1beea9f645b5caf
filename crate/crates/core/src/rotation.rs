//! Randomized Hadamard rotation `R = W D / sqrt(dim)`.
//!
//! `W` is the (Sylvester-ordered) Walsh-Hadamard matrix and `D` a diagonal of
//! shared-random signs. Inputs of non-power-of-two length are zero-padded to
//! `dim`, which keeps `R` exactly orthogonal on the padded space.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::{self, StreamLabel};

/// In-place unnormalized fast Walsh-Hadamard transform. `data.len()` must be
/// a power of two.
pub fn fwht(data: &mut [f64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(2 * half) {
            for i in block..block + half {
                let a = data[i];
                let b = data[i + half];
                data[i] = a + b;
                data[i + half] = a - b;
            }
        }
        half *= 2;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    d: usize,
    dim: usize,
    signs: Vec<f64>,
    seed_tag: String,
}

/// Draws the sign diagonal for input length `d` from `(shared_seed, label)`.
pub fn sample_rotation(d: usize, shared_seed: u64, label: &StreamLabel) -> Rotation {
    let d = d.max(1);
    let dim = d.next_power_of_two();
    let mut rng = seed::stream(shared_seed, label);
    let signs = (0..dim)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    Rotation {
        d,
        dim,
        signs,
        seed_tag: label.tag(),
    }
}

impl Rotation {
    /// Rotation with explicit signs (length must be a power of two).
    pub fn from_signs(d: usize, signs: Vec<f64>) -> Result<Self> {
        let dim = signs.len();
        if !dim.is_power_of_two() || d == 0 || d > dim || d.next_power_of_two() != dim {
            return Err(Error::Dimension {
                expected: d.max(1).next_power_of_two(),
                got: dim,
            });
        }
        if signs.iter().any(|s| *s != 1.0 && *s != -1.0) {
            return Err(Error::InvalidParameter("signs must be +1 or -1".into()));
        }
        Ok(Rotation {
            d,
            dim,
            signs,
            seed_tag: "explicit".into(),
        })
    }

    /// Original (unpadded) input length.
    pub fn input_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn seed_tag(&self) -> &str {
        &self.seed_tag
    }

    /// `W (signs ⊙ v_padded) / sqrt(dim)`; `v` has the original length.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.d {
            return Err(Error::Dimension {
                expected: self.d,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.dim];
        for ((o, x), s) in out.iter_mut().zip(v).zip(&self.signs) {
            *o = x * s;
        }
        fwht(&mut out);
        let scale = 1.0 / (self.dim as f64).sqrt();
        out.iter_mut().for_each(|x| *x *= scale);
        Ok(out)
    }

    /// Exact inverse on the padded space: `signs ⊙ (W w) / sqrt(dim)`.
    pub fn inverse(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: w.len(),
            });
        }
        let mut out = w.to_vec();
        fwht(&mut out);
        let scale = 1.0 / (self.dim as f64).sqrt();
        for (o, s) in out.iter_mut().zip(&self.signs) {
            *o *= s * scale;
        }
        Ok(out)
    }

    /// Inverse followed by truncation back to the input length.
    pub fn inverse_truncated(&self, w: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.inverse(w)?;
        out.truncate(self.d);
        Ok(out)
    }
}
