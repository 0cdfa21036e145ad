//! End-to-end simulation of the ISI link: precoding, interleaving, the
//! delay-polynomial channel with colored noise, the FIR front end, and
//! lattice decoding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::capacity::{design_zero_forcing, isi_capacity_with, DfeOptions, DfeReport, FirDfe};
use super::interleave::BlockInterleaver;
use super::precode::precode_dirty_paper;
use super::IsiChannel;
use crate::codec::{mmse_alpha, NestedPair};
use crate::error::{Error, Result};
use crate::harness::derive_trial_seed;
use crate::stats::ErrorCount;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    /// Interleaver blocks to simulate; each block is one independent trial.
    pub blocks: usize,
    /// Interleaver rows; `None` picks `memory + 16`.
    pub depth: Option<usize>,
    pub dfe: DfeOptions,
    /// `false` removes every noise source and switches to zero forcing.
    pub noise: bool,
    /// Overrides the MMSE scaling `SNR/(1+SNR)` of the FIR output.
    pub alpha: Option<f64>,
    pub seed: u64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            blocks: 100,
            depth: None,
            dfe: DfeOptions::default(),
            noise: true,
            alpha: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkStats {
    pub report: DfeReport,
    /// Front end actually used.
    pub dfe: FirDfe,
    pub alpha: f64,
    pub depth: usize,
    /// Lattice rate per coded symbol.
    pub rate_bits: f64,
    /// Rate after the guard-row overhead.
    pub effective_rate_bits: f64,
    pub messages: ErrorCount,
    /// Base-`M` digit errors.
    pub digits: ErrorCount,
}

/// Simulates `cfg.blocks` interleaver blocks in parallel on the current rayon
/// pool. Block `b` draws from its own seed, so results do not depend on the
/// number of threads.
pub fn simulate_isi_link(
    ch: &IsiChannel,
    pair: &NestedPair,
    cfg: &LinkConfig,
) -> Result<LinkStats> {
    if (pair.source_power() - ch.source_power()).abs() > 1e-9 * ch.source_power() {
        return Err(Error::InputDomain(format!(
            "codebook power {} differs from source power {}",
            pair.source_power(),
            ch.source_power()
        )));
    }
    let report = isi_capacity_with(ch, &cfg.dfe)?;
    let dfe = if cfg.noise {
        report.fir.clone()
    } else {
        Some(design_zero_forcing(ch, &cfg.dfe)?)
    }
    .ok_or_else(|| Error::InputDomain("channel has no non-zero tap".into()))?;
    let alpha = match cfg.alpha {
        Some(a) if a.is_finite() && a > 0.0 => a,
        Some(a) => {
            return Err(Error::InputDomain(format!(
                "alpha must be positive, got {a}"
            )))
        }
        None if cfg.noise => mmse_alpha(dfe.snr)?,
        None => 1.0,
    };
    let memory = dfe.memory();
    let depth = cfg.depth.unwrap_or(memory + 16);
    let il = BlockInterleaver::new(depth, pair.dim(), memory)?;
    let data_rows = il.data_rows().len();

    let counts: Vec<(ErrorCount, ErrorCount)> = (0..cfg.blocks as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_trial_seed(cfg.seed, b));
            simulate_block(ch, pair, &dfe, &il, alpha, cfg.noise, &mut rng)
        })
        .collect::<Result<_>>()?;
    let (messages, digits) = counts.into_iter().fold(
        (ErrorCount::default(), ErrorCount::default()),
        |(m, d), (bm, bd)| (m + bm, d + bd),
    );
    Ok(LinkStats {
        alpha,
        depth,
        rate_bits: pair.rate_bits(),
        effective_rate_bits: pair.rate_bits() * data_rows as f64 / depth as f64,
        report,
        dfe,
        messages,
        digits,
    })
}

/// Message and dither of one encoded row.
type SentRow = (u64, Vec<f64>);

/// Row-major block of channel inputs with zero guard rows, plus the
/// messages and dithers of the data rows.
fn encode_block<R: Rng + ?Sized>(
    pair: &NestedPair,
    dfe: &FirDfe,
    il: &BlockInterleaver,
    alpha: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<SentRow>)> {
    let n = il.cols();
    let mut x = vec![0.0; il.len()];
    let mut sent = Vec::with_capacity(il.data_rows().len());
    for r in il.data_rows() {
        let s: Vec<f64> = (0..n)
            .map(|c| {
                dfe.postcursor
                    .iter()
                    .enumerate()
                    .map(|(l, h)| h * x[(r - l - 1) * n + c])
                    .sum()
            })
            .collect();
        let w = rng.random_range(0..pair.num_messages());
        let cw = precode_dirty_paper(pair, w, &s, alpha, rng)?;
        x[r * n..(r + 1) * n].copy_from_slice(&cw.channel_input);
        sent.push((w, cw.dither));
    }
    Ok((x, sent))
}

fn simulate_block(
    ch: &IsiChannel,
    pair: &NestedPair,
    dfe: &FirDfe,
    il: &BlockInterleaver,
    alpha: f64,
    noise: bool,
    rng: &mut ChaCha8Rng,
) -> Result<(ErrorCount, ErrorCount)> {
    let (x, sent) = encode_block(pair, dfe, il, alpha, rng)?;
    // The next block supplies the future symbols the front end looks at.
    let (next, _) = encode_block(pair, dfe, il, alpha, rng)?;
    let mut tx = il.interleave(&x);
    let total = tx.len();
    let span = dfe.cursor + dfe.feedforward.len();
    tx.extend(il.interleave(&next).into_iter().take(span));

    // y[k] is the sample at time k − lookback.
    let offset = dfe.lookback;
    let taps = ch.taps();
    let len = offset + total + span;
    let mut y = vec![0.0; len];
    for (k, yk) in y.iter_mut().enumerate() {
        let t = k as isize - offset as isize;
        *yk = taps
            .iter()
            .enumerate()
            .map(|(l, h)| {
                let i = t - l as isize;
                if i >= 0 && (i as usize) < tx.len() {
                    h * tx[i as usize]
                } else {
                    0.0
                }
            })
            .sum();
    }
    if noise {
        for yk in y.iter_mut() {
            *yk += rng.sample::<f64, _>(StandardNormal);
        }
        for g in ch.noise_transfer() {
            let c = &g.coefficients;
            let pad = c.len().saturating_sub(1);
            let z: Vec<f64> = (0..len + pad).map(|_| rng.sample(StandardNormal)).collect();
            for (k, yk) in y.iter_mut().enumerate() {
                *yk += c
                    .iter()
                    .enumerate()
                    .map(|(m, gm)| gm * z[k + pad - m])
                    .sum::<f64>();
            }
        }
    }

    let r = il.deinterleave(&dfe.filter(&y, offset, total));
    let n = il.cols();
    let mut messages = ErrorCount::default();
    let mut digits = ErrorCount::default();
    for (row, (w, u)) in il.data_rows().zip(sent) {
        let t_hat = pair.decode(&r[row * n..(row + 1) * n], &u, alpha)?;
        let wrong = pair.digit_errors(w, &t_hat)? as u64;
        messages = messages + ErrorCount::new(u64::from(wrong > 0), 1);
        digits = digits + ErrorCount::new(wrong, n as u64);
    }
    Ok((messages, digits))
}
