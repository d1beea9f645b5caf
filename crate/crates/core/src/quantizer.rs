//! One-dimensional modulo quantizer.
//!
//! The encoder stochastically rounds `x / eps` to a neighbouring integer and
//! sends only its residue mod `k`. The decoder picks the point of the coset
//! `{(z*k + m) * eps : z in Z}` nearest to its side information `h`. When
//! `|x - h| <= delta_prime` and `k*eps >= 2*(eps + delta_prime)` the decode is
//! the encoder's lattice point, so the quantizer is unbiased with error
//! below `eps`.

use crate::error::{Condition, Error, Result};

const DERIVED_EQ_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MqParams {
    k: u32,
    eps: f64,
    delta_prime: f64,
}

impl MqParams {
    /// User-supplied spacing; the lattice condition is checked as an inequality
    /// (with a small relative slack for rounding).
    pub fn new(k: u32, eps: f64, delta_prime: f64) -> Result<Self> {
        check_k(k)?;
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps}")));
        }
        if !(delta_prime.is_finite() && delta_prime >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta_prime = {delta_prime}"
            )));
        }
        let p = MqParams {
            k,
            eps,
            delta_prime,
        };
        let (lhs, rhs) = p.lattice_sides();
        if lhs < rhs - DERIVED_EQ_TOL * lhs.max(1.0) {
            return Err(Error::ConditionViolated {
                condition: Condition::LatticeSpacing,
                detail: format!("k*eps = {lhs}, 2*(eps + delta_prime) = {rhs}"),
            });
        }
        Ok(p)
    }

    /// Spacing `eps = 2*delta_prime/(k - 2)`, which meets the lattice
    /// condition with equality.
    pub fn derived(k: u32, delta_prime: f64) -> Result<Self> {
        check_k(k)?;
        if !(delta_prime.is_finite() && delta_prime >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta_prime = {delta_prime}"
            )));
        }
        let p = MqParams {
            k,
            eps: 2.0 * delta_prime / (k - 2) as f64,
            delta_prime,
        };
        let (lhs, rhs) = p.lattice_sides();
        debug_assert!((lhs - rhs).abs() <= DERIVED_EQ_TOL * lhs.max(1.0));
        Ok(p)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta_prime(&self) -> f64 {
        self.delta_prime
    }

    /// `(k*eps, 2*(eps + delta_prime))`
    pub fn lattice_sides(&self) -> (f64, f64) {
        (
            self.k as f64 * self.eps,
            2.0 * (self.eps + self.delta_prime),
        )
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 4 {
        return Err(Error::InvalidResolution(k));
    }
    Ok(())
}

fn residue(v: i64, k: u32) -> u32 {
    v.rem_euclid(k as i64) as u32
}

/// Encodes `x` into a symbol in `[0, k)`. `coin` is a uniform draw in `[0, 1)`:
/// the ceiling branch is taken when `coin < frac(x / eps)`.
pub fn mq_encode(x: f64, params: &MqParams, coin: f64) -> Result<u32> {
    if params.eps == 0.0 {
        return Err(Error::DegenerateLattice);
    }
    let t = x / params.eps;
    let lo = t.floor();
    let p_up = (t - lo).clamp(0.0, 1.0);
    let idx = if coin < p_up { lo + 1.0 } else { lo };
    Ok(residue(idx as i64, params.k))
}

/// Point of the coset `symbol` nearest to `h`; ties go to the smaller point.
pub fn mq_decode(symbol: u32, h: f64, params: &MqParams) -> Result<f64> {
    if params.eps == 0.0 {
        return Err(Error::DegenerateLattice);
    }
    if symbol >= params.k {
        return Err(Error::InvalidParameter(format!(
            "symbol {symbol} out of range for k = {}",
            params.k
        )));
    }
    let k = params.k as i64;
    let m = symbol as i64;
    let z0 = ((h / params.eps - m as f64) / k as f64).round() as i64;
    let mut best = f64::NAN;
    let mut best_dist = f64::INFINITY;
    // z0 - 1 first so that equal distances keep the smaller point
    for z in [z0 - 1, z0, z0 + 1] {
        let point = (z * k + m) as f64 * params.eps;
        let dist = (point - h).abs();
        if dist < best_dist {
            best = point;
            best_dist = dist;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutcome {
    pub expected_decode: f64,
    pub worst_abs_err: f64,
}

/// Exact expectation and worst-case error of encode→decode, by enumerating
/// both rounding branches.
pub fn mq_oracle(x: f64, h: f64, params: &MqParams) -> Result<OracleOutcome> {
    if params.eps == 0.0 {
        return Err(Error::DegenerateLattice);
    }
    let gap = (x - h).abs();
    if gap > params.delta_prime * (1.0 + 1e-12) {
        return Err(Error::ConditionViolated {
            condition: Condition::SideDistance,
            detail: format!("|x - h| = {gap}, delta_prime = {}", params.delta_prime),
        });
    }
    let (lhs, rhs) = params.lattice_sides();
    if lhs < rhs - DERIVED_EQ_TOL * lhs.max(1.0) {
        return Err(Error::ConditionViolated {
            condition: Condition::LatticeSpacing,
            detail: format!("k*eps = {lhs}, 2*(eps + delta_prime) = {rhs}"),
        });
    }

    let t = x / params.eps;
    let lo = t.floor();
    let p_up = (t - lo).clamp(0.0, 1.0);
    let dec_lo = mq_decode(residue(lo as i64, params.k), h, params)?;
    if p_up == 0.0 {
        return Ok(OracleOutcome {
            expected_decode: dec_lo,
            worst_abs_err: (dec_lo - x).abs(),
        });
    }
    let dec_hi = mq_decode(residue(lo as i64 + 1, params.k), h, params)?;
    Ok(OracleOutcome {
        expected_decode: dec_lo + p_up * (dec_hi - dec_lo),
        worst_abs_err: (dec_lo - x).abs().max((dec_hi - x).abs()),
    })
}
