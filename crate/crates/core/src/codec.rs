//! Vector quantizers built on the modulo quantizer and the Hadamard rotation:
//! the r-bit Wyner-Ziv quantizer and its chained-decoder generalization.
//!
//! The encoder rotates `x`, keeps a shared-random coordinate subset `S` of
//! size `floor(r / log k)` and sends the modulo symbol of each kept
//! coordinate. The decoder resolves every symbol against its side
//! information `h` (either `y_i` or the estimate of an earlier client on the
//! chain) and fills the remaining coordinates from `y_i`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chain::delta_prime;
use crate::error::{Error, Result};
use crate::quantizer::{mq_decode, mq_encode, MqParams};
use crate::rotation::Rotation;
use crate::seed::{self, StreamLabel};

/// `ceil(log2(2 + sqrt(12 ln n)))`, the number of bits per symbol.
pub fn log_k_for(n: usize) -> u32 {
    let v = 2.0 + (12.0 * (n as f64).ln()).sqrt();
    v.log2().ceil() as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodecParams {
    pub n: usize,
    pub d: usize,
    pub dim: usize,
    pub r: usize,
    pub log_k: u32,
    pub k: u32,
    pub sample_count: usize,
    pub mu: f64,
}

/// Protocol constants for `n` clients, dimension `d` and an `r`-bit budget.
pub fn derive_codec_params(n: usize, d: usize, r: usize) -> Result<CodecParams> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} (need n >= 2)")));
    }
    CodecParams::with_log_k(n, d, r, log_k_for(n))
}

impl CodecParams {
    /// Same as [`derive_codec_params`] but with an explicit symbol width.
    pub fn with_log_k(n: usize, d: usize, r: usize, log_k: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d = 0".into()));
        }
        if !(2..=16).contains(&log_k) {
            return Err(Error::InvalidResolution(1u32.checked_shl(log_k).unwrap_or(0)));
        }
        let min = 2 * log_k as usize;
        if r < min {
            return Err(Error::BudgetTooSmall { r, min });
        }
        let dim = d.next_power_of_two();
        let sample_count = (r / log_k as usize).min(dim);
        Ok(CodecParams {
            n,
            d,
            dim,
            r,
            log_k,
            k: 1 << log_k,
            sample_count,
            mu: sample_count as f64 / dim as f64,
        })
    }

    pub fn message_bits(&self) -> usize {
        self.sample_count * self.log_k as usize
    }
}

/// Accumulated distance parameters along a chain and the lattice spacing
/// they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainWeights {
    hops: Vec<f64>,
    total_w: f64,
    mq: MqParams,
}

impl ChainWeights {
    /// `hops` are the per-hop `delta_prime` values, root hop first.
    pub fn new(hops: Vec<f64>, k: u32) -> Result<Self> {
        if hops.is_empty() {
            return Err(Error::InvalidChain("chain weights need at least one hop".into()));
        }
        if let Some(h) = hops.iter().find(|h| !(h.is_finite() && **h >= 0.0)) {
            return Err(Error::InvalidParameter(format!("hop weight {h}")));
        }
        let total_w: f64 = hops.iter().sum();
        let mq = MqParams::derived(k, total_w)?;
        Ok(ChainWeights { hops, total_w, mq })
    }

    pub fn hops(&self) -> &[f64] {
        &self.hops
    }

    pub fn total_w(&self) -> f64 {
        self.total_w
    }

    pub fn eps(&self) -> f64 {
        self.mq.eps()
    }

    pub fn mq_params(&self) -> &MqParams {
        &self.mq
    }

    pub fn is_degenerate(&self) -> bool {
        self.total_w == 0.0
    }
}

/// One client's payload. Only the symbols travel; the rotation and the
/// coordinate subset are rebuilt from shared randomness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub client_id: usize,
    pub symbols: Vec<u32>,
    /// Set when the chain weight is zero. The symbols are then all zero and
    /// the decoder returns its side information unchanged.
    pub degenerate: bool,
}

impl Message {
    pub fn bit_len(&self, log_k: u32) -> usize {
        self.symbols.len() * log_k as usize
    }

    /// Packs symbols most-significant-bit first, first symbol first, into
    /// `ceil(bit_len / 8)` bytes; trailing bits of the last byte are zero.
    pub fn to_bytes(&self, log_k: u32) -> Vec<u8> {
        let mut out = vec![0u8; self.bit_len(log_k).div_ceil(8)];
        let mut pos = 0usize;
        for &s in &self.symbols {
            for b in (0..log_k).rev() {
                if (s >> b) & 1 == 1 {
                    out[pos / 8] |= 0x80 >> (pos % 8);
                }
                pos += 1;
            }
        }
        out
    }

    pub fn from_bytes(client_id: usize, bytes: &[u8], log_k: u32, count: usize) -> Result<Self> {
        let bits = count * log_k as usize;
        if bytes.len() != bits.div_ceil(8) {
            return Err(Error::Dimension {
                expected: bits.div_ceil(8),
                got: bytes.len(),
            });
        }
        let mut symbols = Vec::with_capacity(count);
        let mut pos = 0usize;
        for _ in 0..count {
            let mut s = 0u32;
            for _ in 0..log_k {
                let bit = (bytes[pos / 8] >> (7 - pos % 8)) & 1;
                s = (s << 1) | bit as u32;
                pos += 1;
            }
            symbols.push(s);
        }
        Ok(Message {
            client_id,
            symbols,
            degenerate: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combiner {
    /// `Ry + (q - Ry) / mu` on sampled coordinates; unbiased.
    #[default]
    Scaled,
    /// Decoded value used directly on sampled coordinates.
    Plain,
}

impl std::str::FromStr for Combiner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scaled" => Ok(Combiner::Scaled),
            "plain" => Ok(Combiner::Plain),
            _ => Err(Error::Config(format!("unknown combiner '{s}' (scaled|plain)"))),
        }
    }
}

impl std::fmt::Display for Combiner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Combiner::Scaled => "scaled",
            Combiner::Plain => "plain",
        })
    }
}

/// Uniform subset of `sample_count` coordinates out of `dim`, sorted.
pub fn select_coords(
    dim: usize,
    sample_count: usize,
    shared_seed: u64,
    label: &StreamLabel,
) -> Result<Vec<usize>> {
    if sample_count > dim {
        return Err(Error::Dimension {
            expected: dim,
            got: sample_count,
        });
    }
    let mut rng = seed::stream(shared_seed, label);
    let mut s = rand::seq::index::sample(&mut rng, dim, sample_count).into_vec();
    s.sort_unstable();
    Ok(s)
}

fn check_len(v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::Dimension {
            expected,
            got: v.len(),
        });
    }
    Ok(())
}

pub fn encode_client<R: Rng + ?Sized>(
    client_id: usize,
    x: &[f64],
    weights: &ChainWeights,
    params: &CodecParams,
    rotation: &Rotation,
    coords: &[usize],
    rng: &mut R,
) -> Result<Message> {
    check_len(x, params.d)?;
    if coords.len() != params.sample_count {
        return Err(Error::Dimension {
            expected: params.sample_count,
            got: coords.len(),
        });
    }
    if weights.is_degenerate() {
        return Ok(Message {
            client_id,
            symbols: vec![0; coords.len()],
            degenerate: true,
        });
    }
    let rx = rotation.apply(x)?;
    let symbols = coords
        .iter()
        .map(|&j| mq_encode(rx[j], weights.mq_params(), rng.random::<f64>()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Message {
        client_id,
        symbols,
        degenerate: false,
    })
}

/// Server-side reconstruction of one client.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    /// The estimate that enters the mean (combiner-dependent).
    pub estimate: Vec<f64>,
    /// Unscaled reconstruction (decoded values on `S`, `y_i` elsewhere). This
    /// is what later clients on a chain use as their side information.
    pub side_info: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn decode_client(
    msg: &Message,
    h: &[f64],
    y: &[f64],
    weights: &ChainWeights,
    params: &CodecParams,
    rotation: &Rotation,
    coords: &[usize],
    combiner: Combiner,
) -> Result<Decoded> {
    check_len(h, params.d)?;
    check_len(y, params.d)?;
    if msg.degenerate || weights.is_degenerate() {
        return Ok(Decoded {
            estimate: h.to_vec(),
            side_info: h.to_vec(),
        });
    }
    if msg.symbols.len() != coords.len() {
        return Err(Error::Dimension {
            expected: coords.len(),
            got: msg.symbols.len(),
        });
    }
    let rh = rotation.apply(h)?;
    let ry = rotation.apply(y)?;
    let mut plain = ry.clone();
    let mut scaled = match combiner {
        Combiner::Scaled => Some(ry.clone()),
        Combiner::Plain => None,
    };
    let inv_mu = 1.0 / params.mu;
    for (&j, &sym) in coords.iter().zip(&msg.symbols) {
        let q = mq_decode(sym, rh[j], weights.mq_params())?;
        plain[j] = q;
        if let Some(s) = scaled.as_mut() {
            s[j] = ry[j] + inv_mu * (q - ry[j]);
        }
    }
    let side_info = rotation.inverse_truncated(&plain)?;
    let estimate = match scaled {
        Some(s) => rotation.inverse_truncated(&s)?,
        None => side_info.clone(),
    };
    Ok(Decoded {
        estimate,
        side_info,
    })
}

/// Reference Wyner-Ziv encoder: distance parameter from `delta_i` alone.
#[allow(clippy::too_many_arguments)]
pub fn wz_encode<R: Rng + ?Sized>(
    client_id: usize,
    x: &[f64],
    delta_i: f64,
    params: &CodecParams,
    rotation: &Rotation,
    coords: &[usize],
    rng: &mut R,
) -> Result<Message> {
    let dp = delta_prime(delta_i, params.dim, params.n);
    let weights = ChainWeights::new(vec![dp], params.k)?;
    encode_client(client_id, x, &weights, params, rotation, coords, rng)
}

/// Reference Wyner-Ziv decoder: side information is `y_i`.
pub fn wz_decode(
    msg: &Message,
    y: &[f64],
    delta_i: f64,
    params: &CodecParams,
    rotation: &Rotation,
    coords: &[usize],
    combiner: Combiner,
) -> Result<Vec<f64>> {
    let dp = delta_prime(delta_i, params.dim, params.n);
    let weights = ChainWeights::new(vec![dp], params.k)?;
    Ok(decode_client(msg, y, y, &weights, params, rotation, coords, combiner)?.estimate)
}
