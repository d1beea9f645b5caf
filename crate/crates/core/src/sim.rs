//! End-to-end simultaneous-message protocol: instance construction, one
//! seeded trial of encode/decode for every client, and Monte Carlo MSE.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{proposed_bound, BoundReport};
use crate::chain::{DeltaTable, Plan};
use crate::codec::{
    decode_client, encode_client, select_coords, wz_decode, wz_encode, ChainWeights, CodecParams,
    Combiner,
};
use crate::error::{Error, Result};
use crate::rotation::sample_rotation;
use crate::seed::{self, Role, StreamLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub d: usize,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub table: DeltaTable,
    pub true_mean: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSpec {
    /// `x_i = c + spread * u_i`, `y_i = x_i + noise[i] * v_i` with random unit
    /// directions; the table is set to the realized distances.
    Derive { spread: f64, noise: Vec<f64> },
    /// Client `head` sits at a random centre; every other client `j` sits at
    /// distance `link[j]` from it and has side information at distance
    /// `side[j]`. Targeted distances hold with equality; the remaining pairs
    /// get their realized distances.
    Star {
        head: usize,
        side: Vec<f64>,
        link: Vec<f64>,
    },
    /// User-supplied vectors checked against a user-supplied table.
    Verify {
        x: Vec<Vec<f64>>,
        y: Vec<Vec<f64>>,
        table: DeltaTable,
    },
}

pub fn l2_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn offset(base: &[f64], dist: f64, dir: &[f64]) -> Vec<f64> {
    base.iter().zip(dir).map(|(b, u)| b + dist * u).collect()
}

fn mean_of(vs: &[Vec<f64>], d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d];
    for v in vs {
        for (a, b) in m.iter_mut().zip(v) {
            *a += b;
        }
    }
    let n = vs.len() as f64;
    m.iter_mut().for_each(|a| *a /= n);
    m
}

fn realized_table(x: &[Vec<f64>], y: &[Vec<f64>]) -> DeltaTable {
    let n = x.len();
    let side = (0..n).map(|i| l2_dist(&x[i], &y[i])).collect();
    let cross = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| l2_dist(&x[i], &x[j]))
        .collect();
    DeltaTable::new(side, cross).expect("realized distances are valid")
}

const CONSTRAINT_RTOL: f64 = 1e-9;

/// Checks `|x_i - y_i| <= delta_i` and `|x_i - x_j| <= delta_ij` for every
/// client and pair.
pub fn check_constraints(x: &[Vec<f64>], y: &[Vec<f64>], table: &DeltaTable) -> Result<()> {
    let n = table.n();
    let fail = |pair: String, realized: f64, bound: f64| Error::ConstraintViolation {
        pair,
        realized,
        bound,
        slack: bound - realized,
    };
    let over = |realized: f64, bound: f64| realized > bound * (1.0 + CONSTRAINT_RTOL) + 1e-12;
    for i in 0..n {
        let r = l2_dist(&x[i], &y[i]);
        if over(r, table.side(i)) {
            return Err(fail(format!("(x{i}, y{i})"), r, table.side(i)));
        }
        for j in i + 1..n {
            let r = l2_dist(&x[i], &x[j]);
            if over(r, table.cross(i, j)) {
                return Err(fail(format!("(x{i}, x{j})"), r, table.cross(i, j)));
            }
        }
    }
    Ok(())
}

pub fn generate_instance(n: usize, d: usize, spec: &InstanceSpec, master_seed: u64) -> Result<Instance> {
    if n < 2 || d == 0 {
        return Err(Error::InvalidParameter(format!("n = {n}, d = {d}")));
    }
    let mut rng = seed::stream(master_seed, &StreamLabel::new(0, 0, Role::Instance));
    let (x, y, table) = match spec {
        InstanceSpec::Derive { spread, noise } => {
            if noise.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: noise.len(),
                });
            }
            let centre: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let mut x = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            for &sigma in noise {
                let xi = offset(&centre, *spread, &unit_vector(d, &mut rng));
                let yi = offset(&xi, sigma, &unit_vector(d, &mut rng));
                x.push(xi);
                y.push(yi);
            }
            let table = realized_table(&x, &y);
            (x, y, table)
        }
        InstanceSpec::Star { head, side, link } => {
            if *head >= n {
                return Err(Error::InvalidParameter(format!("head {head} >= n = {n}")));
            }
            for v in [side, link] {
                if v.len() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        got: v.len(),
                    });
                }
            }
            let centre: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let mut x = vec![Vec::new(); n];
            x[*head] = centre;
            for j in (0..n).filter(|j| j != head) {
                x[j] = offset(&x[*head], link[j], &unit_vector(d, &mut rng));
            }
            let y: Vec<Vec<f64>> = (0..n)
                .map(|j| offset(&x[j], side[j], &unit_vector(d, &mut rng)))
                .collect();
            let realized = realized_table(&x, &y);
            let cross = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| realized.cross(i, j))
                .collect();
            let mut table = DeltaTable::new(side.clone(), cross)?;
            for j in (0..n).filter(|j| j != head) {
                table.set_cross(*head, j, link[j]);
            }
            (x, y, table)
        }
        InstanceSpec::Verify { x, y, table } => {
            if x.len() != n || y.len() != n || table.n() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: x.len().min(y.len()).min(table.n()),
                });
            }
            if let Some(v) = x.iter().chain(y).find(|v| v.len() != d) {
                return Err(Error::Dimension {
                    expected: d,
                    got: v.len(),
                });
            }
            check_constraints(x, y, table)?;
            (x.clone(), y.clone(), table.clone())
        }
    };
    let true_mean = mean_of(&x, d);
    Ok(Instance {
        n,
        d,
        x,
        y,
        table,
        true_mean,
    })
}

impl Instance {
    /// Same vectors, every declared distance multiplied by `factor >= 1`.
    pub fn loosened(&self, factor: f64) -> Result<Instance> {
        if !(factor >= 1.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("looseness {factor} (need >= 1)")));
        }
        let mut out = self.clone();
        out.table = self.table.map(|v| v * factor);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub estimate: Vec<f64>,
    pub sq_error: f64,
    pub per_client_sq_errors: Vec<f64>,
    pub bits_sent: usize,
}

struct ClientRandomness {
    rotation: crate::rotation::Rotation,
    coords: Vec<usize>,
    coins: seed::StreamRng,
}

fn client_randomness(params: &CodecParams, master_seed: u64, trial_id: u64, client: usize) -> Result<ClientRandomness> {
    let rotation = sample_rotation(
        params.d,
        master_seed,
        &StreamLabel::new(trial_id, client, Role::Rotation),
    );
    let coords = select_coords(
        params.dim,
        params.sample_count,
        master_seed,
        &StreamLabel::new(trial_id, client, Role::Subset),
    )?;
    let coins = seed::stream(master_seed, &StreamLabel::new(trial_id, client, Role::Coins));
    Ok(ClientRandomness {
        rotation,
        coords,
        coins,
    })
}

fn finish_trial(instance: &Instance, estimates: Vec<Vec<f64>>, bits_sent: usize) -> TrialResult {
    let estimate = mean_of(&estimates, instance.d);
    let per_client_sq_errors = estimates
        .iter()
        .zip(&instance.x)
        .map(|(e, x)| sq_dist(e, x))
        .collect();
    TrialResult {
        sq_error: sq_dist(&estimate, &instance.true_mean),
        estimate,
        per_client_sq_errors,
        bits_sent,
    }
}

fn check_params(instance: &Instance, params: &CodecParams) -> Result<()> {
    if params.n != instance.n || params.d != instance.d {
        return Err(Error::InvalidParameter(format!(
            "codec params (n={}, d={}) do not match instance (n={}, d={})",
            params.n, params.d, instance.n, instance.d
        )));
    }
    Ok(())
}

/// One protocol execution. Clients are decoded in `plan.decode_order`; a
/// chained client uses the unscaled reconstruction of its predecessor as
/// side information.
pub fn run_trial(
    instance: &Instance,
    plan: &Plan,
    params: &CodecParams,
    master_seed: u64,
    trial_id: u64,
    combiner: Combiner,
) -> Result<TrialResult> {
    check_params(instance, params)?;
    let n = instance.n;
    if plan.chains.len() != n || plan.decode_order.len() != n {
        return Err(Error::InvalidChain(format!("plan does not cover {n} clients")));
    }
    let mut side: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut estimates: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut bits_sent = 0;
    for &c in &plan.decode_order {
        let chain = &plan.chains[c];
        if chain.client() != c {
            return Err(Error::InvalidChain(format!("slot {c} holds a chain for {}", chain.client())));
        }
        let mut rnd = client_randomness(params, master_seed, trial_id, c)?;
        let weights = ChainWeights::new(chain.hop_weights(params.dim, params.n), params.k)?;
        let msg = encode_client(c, &instance.x[c], &weights, params, &rnd.rotation, &rnd.coords, &mut rnd.coins)?;
        bits_sent += msg.bit_len(params.log_k);
        let h: &[f64] = match chain.predecessor() {
            None => &instance.y[chain.root()],
            Some(p) => side[p]
                .as_deref()
                .ok_or(Error::OrderViolation { client: c, node: p })?,
        };
        let dec = decode_client(
            &msg,
            h,
            &instance.y[c],
            &weights,
            params,
            &rnd.rotation,
            &rnd.coords,
            combiner,
        )?;
        side[c] = Some(dec.side_info);
        estimates[c] = Some(dec.estimate);
    }
    let estimates = estimates
        .into_iter()
        .enumerate()
        .map(|(i, e)| e.ok_or_else(|| Error::InvalidChain(format!("client {i} never decoded"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_trial(instance, estimates, bits_sent))
}

/// Plain Wyner-Ziv protocol, written directly against the reference
/// encoder/decoder.
pub fn run_trial_wz(
    instance: &Instance,
    params: &CodecParams,
    master_seed: u64,
    trial_id: u64,
    combiner: Combiner,
) -> Result<TrialResult> {
    check_params(instance, params)?;
    let mut estimates = Vec::with_capacity(instance.n);
    let mut bits_sent = 0;
    for c in 0..instance.n {
        let mut rnd = client_randomness(params, master_seed, trial_id, c)?;
        let delta = instance.table.side(c);
        let msg = wz_encode(c, &instance.x[c], delta, params, &rnd.rotation, &rnd.coords, &mut rnd.coins)?;
        bits_sent += msg.bit_len(params.log_k);
        estimates.push(wz_decode(
            &msg,
            &instance.y[c],
            delta,
            params,
            &rnd.rotation,
            &rnd.coords,
            combiner,
        )?);
    }
    Ok(finish_trial(instance, estimates, bits_sent))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseReport {
    pub trials: usize,
    pub mse: f64,
    /// Standard error of `mse` (sample standard deviation / sqrt(trials)).
    pub stderr: f64,
    pub per_client_mse: Vec<f64>,
    pub trial_sq_errors: Vec<f64>,
    pub bits_per_trial: usize,
    pub bounds: BoundReport,
}

/// Runs `trials` seed-isolated trials on the current rayon pool and
/// aggregates them in trial order, so the result does not depend on the
/// number of threads.
pub fn monte_carlo(
    instance: &Instance,
    plan: &Plan,
    params: &CodecParams,
    trials: usize,
    master_seed: u64,
    combiner: Combiner,
) -> Result<MseReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let results = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(instance, plan, params, master_seed, t, combiner))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(instance, plan, params, &results))
}

fn aggregate(instance: &Instance, plan: &Plan, params: &CodecParams, results: &[TrialResult]) -> MseReport {
    let trials = results.len();
    let tf = trials as f64;
    let trial_sq_errors: Vec<f64> = results.iter().map(|r| r.sq_error).collect();
    let mse = trial_sq_errors.iter().sum::<f64>() / tf;
    let stderr = if trials > 1 {
        let var = trial_sq_errors.iter().map(|e| (e - mse) * (e - mse)).sum::<f64>() / (tf - 1.0);
        (var / tf).sqrt()
    } else {
        0.0
    };
    let mut per_client_mse = vec![0.0; instance.n];
    for r in results {
        for (a, b) in per_client_mse.iter_mut().zip(&r.per_client_sq_errors) {
            *a += b;
        }
    }
    per_client_mse.iter_mut().for_each(|a| *a /= tf);
    MseReport {
        trials,
        mse,
        stderr,
        per_client_mse,
        trial_sq_errors,
        bits_per_trial: results[0].bits_sent,
        bounds: proposed_bound(&plan.chains, &instance.table, params),
    }
}
