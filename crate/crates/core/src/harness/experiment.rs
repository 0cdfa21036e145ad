//! Experiment configuration and the four commands.
//!
//! Every random draw comes from a per-trial stream seeded by
//! [`derive_trial_seed`], and trial outcomes are merged by index, so a table
//! depends only on the configuration and the master seed.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::netfile::parse_network;
use super::seed::derive_trial_seed;
use super::table::{Cell, CsvTable};
use crate::codec::{AlphaMode, NestedPair};
use crate::error::{Error, Result};
use crate::isi::{reduce_to_isi, simulate_isi_link, DfeOptions, IsiChannel, LinkConfig};
use crate::lattice::{estimate_metrics, Lattice};
use crate::network::{
    amplification_gains, equivalent_channel, exact_propagated_noise, received_powers, simulate_af,
    RelayNetwork,
};
use crate::stats::ErrorCount;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    SimulateLayered,
    SimulateIsi,
    LatticeInfo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::SimulateLayered => "simulate-layered",
            Command::SimulateIsi => "simulate-isi",
            Command::LatticeInfo => "lattice-info",
        }
    }
}

/// Base lattice families selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeFamily {
    Zn,
    Dn,
    E8,
}

impl LatticeFamily {
    pub fn name(self) -> &'static str {
        match self {
            LatticeFamily::Zn => "zn",
            LatticeFamily::Dn => "dn",
            LatticeFamily::E8 => "e8",
        }
    }

    pub fn build(self, dim: usize) -> Result<Lattice> {
        match self {
            LatticeFamily::Zn => Lattice::integer(dim),
            LatticeFamily::Dn => Lattice::checkerboard(dim),
            LatticeFamily::E8 if dim == 8 => Ok(Lattice::gosset()),
            LatticeFamily::E8 => Err(Error::Config(format!("e8 has dimension 8, not {dim}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub network: Option<PathBuf>,
    pub lattice: LatticeFamily,
    pub dim: usize,
    pub ratio: u32,
    /// Codewords per SNR point (interleaver blocks for `simulate-isi`).
    pub trials: usize,
    pub seed: u64,
    pub alpha: AlphaMode,
    pub workers: usize,
    /// Every power budget is scaled by `10^{offset/10}` at each grid point.
    pub power_offsets_db: Vec<f64>,
    pub ff_len: usize,
    pub lookback: usize,
    /// Interleaver rows; `None` picks a default from the ISI memory.
    pub depth: Option<usize>,
    /// Monte Carlo samples for `lattice-info`.
    pub samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: Command::Analyze,
            network: None,
            lattice: LatticeFamily::E8,
            dim: 8,
            ratio: 4,
            trials: 1000,
            seed: 0,
            alpha: AlphaMode::FullMmse,
            workers: 1,
            power_offsets_db: vec![0.0],
            ff_len: 64,
            lookback: 0,
            depth: None,
            samples: 100_000,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        if self.dim == 0 {
            return fail("dimension must be at least 1".into());
        }
        if self.command != Command::LatticeInfo && self.network.is_none() {
            return fail(format!("{} needs a network file", self.command.name()));
        }
        if matches!(
            self.command,
            Command::SimulateLayered | Command::SimulateIsi
        ) {
            if self.trials == 0 {
                return fail("trials must be at least 1".into());
            }
            if self.ratio < 2 {
                return fail(format!(
                    "nesting ratio must be at least 2, got {}",
                    self.ratio
                ));
            }
            if self.power_offsets_db.is_empty()
                || self.power_offsets_db.iter().any(|o| !o.is_finite())
            {
                return fail("power offsets must be finite and non-empty".into());
            }
        }
        if self.command == Command::SimulateIsi {
            if self.alpha == AlphaMode::Paper {
                return fail("simulate-isi scales by the FIR output SNR; use --alpha mmse".into());
            }
            if self.ff_len == 0 || self.lookback >= self.ff_len {
                return fail(format!(
                    "need 0 <= lookback < ff-len, got lookback {} and ff-len {}",
                    self.lookback, self.ff_len
                ));
            }
        }
        if self.command == Command::LatticeInfo && self.samples < 1000 {
            return fail(format!(
                "lattice-info needs at least 1000 samples, got {}",
                self.samples
            ));
        }
        self.lattice.build(self.dim).map(|_| ())
    }
}

/// Runs one command on a private pool of `cfg.workers` threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<CsvTable> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cfg.command {
        Command::Analyze => analyze(&load(cfg)?),
        Command::SimulateLayered => simulate_layered(cfg, &load(cfg)?),
        Command::SimulateIsi => simulate_isi(cfg, &load(cfg)?),
        Command::LatticeInfo => lattice_info(cfg),
    })
}

fn load(cfg: &ExperimentConfig) -> Result<RelayNetwork> {
    parse_network(cfg.network.as_ref().expect("validated"))
}

fn row(quantity: &str, node: &str, value: impl Into<Cell>) -> Vec<Cell> {
    vec![quantity.into(), node.into(), value.into()]
}

/// Long-format table `quantity,node,value` of the analytic quantities.
pub fn analyze(net: &RelayNetwork) -> Result<CsvTable> {
    let mut t = CsvTable::new(&["quantity", "node", "value"]);
    t.push(row("layered", "", u64::from(net.is_layered())));
    if net.is_layered() {
        analyze_layered(net, &mut t)?;
    } else {
        analyze_isi(net, &mut t)?;
    }
    Ok(t)
}

fn analyze_layered(net: &RelayNetwork, t: &mut CsvTable) -> Result<()> {
    let eq = equivalent_channel(net)?;
    let powers = received_powers(net)?;
    let gains = amplification_gains(net, &powers, eq.delta)?;
    let noise = exact_propagated_noise(net, &powers, &gains)?;
    t.push(row("num_layers", "", eq.num_layers));
    for j in net.relays() {
        t.push(row("received_power", net.name(j), powers.per_node[j]));
    }
    t.push(row(
        "received_power",
        net.name(net.destination()),
        eq.received_power,
    ));
    t.push(row("delta", "", eq.delta));
    for j in net.relays() {
        t.push(row("beta", net.name(j), gains.beta[j]));
    }
    t.push(row("equivalent_gain", "", eq.gain));
    t.push(row("propagated_noise", "", noise.total));
    for (l, p) in noise
        .per_layer
        .iter()
        .enumerate()
        .take(eq.num_layers)
        .skip(1)
    {
        t.push(row("propagated_noise_layer", &l.to_string(), *p));
    }
    t.push(row("noise_bound_series", "", noise.series_bound));
    t.push(row("noise_bound_linear", "", noise.linear_bound));
    t.push(row("snr", "", eq.snr()));
    t.push(row("snr_lower_bound", "", eq.snr_lower_bound));
    t.push(row("c_mac", "", eq.mac_cutset()));
    t.push(row("r_laf", "", eq.rate_laf()));
    t.push(row("rate_equivalent", "", 0.5 * (1.0 + eq.snr()).log2()));
    Ok(())
}

fn analyze_isi(net: &RelayNetwork, t: &mut CsvTable) -> Result<()> {
    let ch = reduce_to_isi(net)?;
    if let crate::network::Structure::NonLayered { min_hops, max_hops } = net.structure() {
        t.push(row("min_hops", "", *min_hops));
        t.push(row("max_hops", "", *max_hops));
    }
    let powers = crate::network::af::nominal_received_powers(net);
    let delta = crate::network::network_delta(net, &powers);
    let gains = amplification_gains(net, &powers, delta)?;
    for j in net.relays() {
        t.push(row("received_power", net.name(j), powers.per_node[j]));
    }
    t.push(row("delta", "", delta));
    for j in net.relays() {
        t.push(row("beta", net.name(j), gains.beta[j]));
    }
    for (l, h) in ch.taps().iter().enumerate() {
        t.push(row("tap", &l.to_string(), *h));
    }
    let grid: Vec<f64> = (0..1024)
        .map(|k| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / 1024.0)
        .collect();
    let psd = ch.noise_psd(&grid);
    t.push(row(
        "noise_psd_min",
        "",
        psd.iter().copied().fold(f64::INFINITY, f64::min),
    ));
    t.push(row(
        "noise_psd_max",
        "",
        psd.iter().copied().fold(0.0, f64::max),
    ));
    t.push(row("noise_variance", "", ch.noise_autocovariance(0)[0]));
    let report = crate::isi::isi_capacity(&ch)?;
    t.push(row("c_isi", "", report.c_isi));
    t.push(row("snr_mmse_dfe", "", report.snr_mmse_dfe));
    if let Some(fir) = &report.fir {
        t.push(row("snr_fir", "", fir.snr));
        t.push(row("postcursor_len", "", fir.memory()));
    }
    Ok(())
}

const SIM_HEADER: [&str; 10] = [
    "message_errors",
    "message_error_rate",
    "message_ci_low",
    "message_ci_high",
    "symbol_errors",
    "symbol_trials",
    "symbol_error_rate",
    "symbol_ci_low",
    "symbol_ci_high",
    "trials",
];

fn push_counts(row: &mut Vec<Cell>, messages: ErrorCount, symbols: ErrorCount) {
    let (ml, mh) = messages.wilson95();
    let (sl, sh) = symbols.wilson95();
    row.extend([
        messages.errors.into(),
        messages.rate().into(),
        ml.into(),
        mh.into(),
        symbols.errors.into(),
        symbols.trials.into(),
        symbols.rate().into(),
        sl.into(),
        sh.into(),
        messages.trials.into(),
    ]);
}

fn header_with(prefix: &[&'static str]) -> Vec<&'static str> {
    prefix.iter().copied().chain(SIM_HEADER).collect()
}

/// Codec over the layered network's equivalent channel on a grid of power
/// offsets.
pub fn simulate_layered(cfg: &ExperimentConfig, net: &RelayNetwork) -> Result<CsvTable> {
    if let crate::network::Structure::NonLayered { min_hops, max_hops } = net.structure() {
        return Err(Error::NotLayered {
            min_hops: *min_hops,
            max_hops: *max_hops,
        });
    }
    let base = cfg.lattice.build(cfg.dim)?;
    let mut t = CsvTable::new(&header_with(&[
        "power_offset_db",
        "source_power",
        "delta",
        "snr",
        "alpha",
        "rate_bits",
    ]));
    for (k, &offset) in cfg.power_offsets_db.iter().enumerate() {
        let scaled = net.with_power_scale(10f64.powf(offset / 10.0))?;
        let eq = equivalent_channel(&scaled)?;
        let gains = amplification_gains(&scaled, &received_powers(&scaled)?, eq.delta)?;
        let pair = NestedPair::new(&base, cfg.ratio, scaled.source_power())?;
        let alpha = eq.alpha(cfg.alpha);
        let master = derive_trial_seed(cfg.seed, k as u64);
        let outcomes: Vec<usize> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_trial_seed(master, i));
                let w = rng.random_range(0..pair.num_messages());
                let cw = pair.encode(w, &mut rng)?;
                let out = simulate_af(&scaled, &gains, &cw.channel_input, &mut rng, true)?;
                let t_hat = pair.decode(&eq.normalize(&out.destination), &cw.dither, alpha)?;
                pair.digit_errors(w, &t_hat)
            })
            .collect::<Result<_>>()?;
        let messages = ErrorCount::new(
            outcomes.iter().filter(|&&e| e > 0).count() as u64,
            outcomes.len() as u64,
        );
        let symbols = ErrorCount::new(
            outcomes.iter().sum::<usize>() as u64,
            (outcomes.len() * pair.dim()) as u64,
        );
        let mut r: Vec<Cell> = vec![
            offset.into(),
            scaled.source_power().into(),
            eq.delta.into(),
            eq.snr().into(),
            alpha.into(),
            pair.rate_bits().into(),
        ];
        push_counts(&mut r, messages, symbols);
        t.push(r);
    }
    Ok(t)
}

/// Precoded lattice transmission over the network's ISI reduction.
pub fn simulate_isi(cfg: &ExperimentConfig, net: &RelayNetwork) -> Result<CsvTable> {
    let base = cfg.lattice.build(cfg.dim)?;
    let mut t = CsvTable::new(&header_with(&[
        "power_offset_db",
        "source_power",
        "c_isi",
        "snr_mmse_dfe",
        "snr_fir",
        "alpha",
        "rate_bits",
        "effective_rate_bits",
        "depth",
    ]));
    for (k, &offset) in cfg.power_offsets_db.iter().enumerate() {
        let scaled = net.with_power_scale(10f64.powf(offset / 10.0))?;
        let ch: IsiChannel = reduce_to_isi(&scaled)?;
        let pair = NestedPair::new(&base, cfg.ratio, ch.source_power())?;
        let link = LinkConfig {
            blocks: cfg.trials,
            depth: cfg.depth,
            dfe: DfeOptions {
                ff_len: cfg.ff_len,
                lookback: cfg.lookback,
                ..DfeOptions::default()
            },
            noise: true,
            alpha: None,
            seed: derive_trial_seed(cfg.seed, k as u64),
        };
        let s = simulate_isi_link(&ch, &pair, &link)?;
        let mut r: Vec<Cell> = vec![
            offset.into(),
            ch.source_power().into(),
            s.report.c_isi.into(),
            s.report.snr_mmse_dfe.into(),
            s.dfe.snr.into(),
            s.alpha.into(),
            s.rate_bits.into(),
            s.effective_rate_bits.into(),
            s.depth.into(),
        ];
        push_counts(&mut r, s.messages, s.digits);
        t.push(r);
    }
    Ok(t)
}

/// Monte Carlo second moment of the unit-covolume base lattice.
pub fn lattice_info(cfg: &ExperimentConfig) -> Result<CsvTable> {
    let lat = cfg.lattice.build(cfg.dim)?;
    let lat = lat.scaled(lat.covolume().powf(-1.0 / cfg.dim as f64))?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_trial_seed(cfg.seed, 0));
    let m = estimate_metrics(&lat, cfg.samples, &mut rng)?;
    let mut t = CsvTable::new(&[
        "lattice",
        "dim",
        "samples",
        "second_moment",
        "normalized_second_moment",
        "nsm_std_error",
        "nsm_exact",
        "source_coding_figure_nats",
    ]);
    t.push(vec![
        cfg.lattice.name().into(),
        cfg.dim.into(),
        cfg.samples.into(),
        m.second_moment.into(),
        m.normalized_second_moment.into(),
        m.nsm_std_error.into(),
        lat.exact_normalized_second_moment()
            .unwrap_or(f64::NAN)
            .into(),
        m.source_coding_figure().into(),
    ]);
    Ok(t)
}
