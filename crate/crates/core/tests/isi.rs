mod common;

use common::{enumerate_taps, polys_close, rng, workspace_file};
use latticeaf::harness::parse_network;
use latticeaf::isi::{
    capacity_trapezoid, isi_capacity, precode_dirty_paper, precode_with_dither, reduce_to_isi,
    reduce_to_isi_with_gains, simulate_isi_link, BlockInterleaver, IsiChannel, LinkConfig,
};
use latticeaf::network::af::AfGains;
use latticeaf::network::random::{random_dag, random_layered, DagParams, LayeredParams};
use latticeaf::network::{amplification_gains, equivalent_channel};
use latticeaf::stats::ErrorCount;
use latticeaf::{mmse_alpha, Lattice, NestedPair};
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

#[test]
fn taps_match_path_enumeration() {
    let mut r = rng(41);
    for _ in 0..200 {
        let net = random_dag(&mut r, &DagParams::default());
        let mut beta = vec![0.0; net.num_nodes()];
        beta[net.source()] = 1.0;
        for j in net.relays() {
            beta[j] = r.random_range(0.2..1.5);
        }
        let gains = AfGains { delta: 0.0, beta };
        let ch = reduce_to_isi_with_gains(&net, &gains).unwrap();
        let (taps, noise) = enumerate_taps(&net, &gains);
        assert!(
            polys_close(ch.taps(), &taps, 1e-12),
            "{:?} vs {taps:?}",
            ch.taps()
        );
        for (g, (j, poly)) in ch.noise_transfer().iter().zip(&noise) {
            assert_eq!(g.node, *j);
            assert!(polys_close(&g.coefficients, poly, 1e-12));
        }
    }
}

#[test]
fn layered_networks_reduce_to_one_tap() {
    let mut r = rng(42);
    for _ in 0..50 {
        let net = random_layered(&mut r, &LayeredParams::default());
        let eq = equivalent_channel(&net).unwrap();
        let ch = reduce_to_isi(&net).unwrap();
        let nonzero: Vec<usize> = (0..ch.taps().len())
            .filter(|&l| ch.taps()[l] != 0.0)
            .collect();
        assert_eq!(nonzero, vec![eq.num_layers - 1]);
        let h = ch.taps()[eq.num_layers - 1];
        assert!((h - eq.gain).abs() < 1e-12 * eq.gain);
        // Relay noise arrives at the tap's delay too, so S_z is flat.
        let s0 = ch.noise_psd_at(0.0);
        assert!((s0 - 1.0 - eq.propagated_noise).abs() < 1e-9 * s0);
        assert!((ch.noise_psd_at(1.3) - s0).abs() < 1e-9 * s0);
        let c = isi_capacity(&ch).unwrap().c_isi;
        assert!((c - 0.5 * (1.0 + eq.snr()).log2()).abs() < 1e-9);
    }
}

#[test]
fn capacity_closed_forms() {
    let two = IsiChannel::new(vec![1.0, 1.0], vec![], 1.0).unwrap();
    let expected = 0.5 * ((3.0 + 5f64.sqrt()) / 2.0).log2();
    let report = isi_capacity(&two).unwrap();
    assert!((report.c_isi - expected).abs() < 1e-3);
    assert!((report.c_isi - 0.6942).abs() < 1e-4);
    assert_eq!(report.c_isi, 0.5 * (1.0 + report.snr_mmse_dfe).log2());

    let flat = IsiChannel::new(vec![1.0], vec![], 3.0).unwrap();
    let r = isi_capacity(&flat).unwrap();
    assert!((r.c_isi - 1.0).abs() < 1e-12);
    assert!((r.snr_mmse_dfe - 3.0).abs() < 1e-9);

    let silent = IsiChannel::new(vec![0.0, 0.0, 0.0], vec![vec![0.0, 1.0]], 2.0).unwrap();
    assert_eq!(isi_capacity(&silent).unwrap().c_isi, 0.0);
}

#[test]
fn capacity_grows_with_half_log_slope() {
    let ch = IsiChannel::new(vec![0.5, 1.0, -0.3], vec![vec![0.0, 0.4, 0.2]], 1.0).unwrap();
    let c = |p: f64| {
        isi_capacity(&ch.with_source_power(p).unwrap())
            .unwrap()
            .c_isi
    };
    let slope = (c(1e8) - c(1e6)) / (0.5 * 100f64.log2());
    assert!((slope - 1.0).abs() < 1e-3, "{slope}");
}

#[test]
fn quadrature_converges() {
    let mesh =
        reduce_to_isi(&parse_network(workspace_file("networks/mesh.json")).unwrap()).unwrap();
    for ch in [
        IsiChannel::new(vec![1.0, 1.0], vec![], 1.0).unwrap(),
        IsiChannel::new(
            vec![0.2, -0.9, 0.4, 0.3],
            vec![vec![0.0, 0.8], vec![0.0, 0.0, 0.5]],
            5.0,
        )
        .unwrap(),
        mesh,
    ] {
        let coarse = capacity_trapezoid(&ch, 64);
        let fine = capacity_trapezoid(&ch, 128);
        assert!((coarse - fine).abs() < 1e-6);
        let adaptive = isi_capacity(&ch).unwrap();
        assert!(
            (adaptive.c_isi - fine).abs() < 1e-9,
            "{} vs {fine}",
            adaptive.c_isi
        );
        assert!(adaptive.quadrature_error < 1e-9);
    }
}

#[test]
fn noise_autocovariance_matches_simulation() {
    let ch = IsiChannel::new(
        vec![1.0],
        vec![vec![0.0, 0.9, -0.4], vec![0.0, 0.0, 0.7]],
        1.0,
    )
    .unwrap();
    let analytic = ch.noise_autocovariance(3);
    let n = 400_000;
    let mut r = rng(43);
    let mut z_e = vec![0.0; n];
    for v in z_e.iter_mut() {
        *v = r.sample::<f64, _>(StandardNormal);
    }
    for g in ch.noise_transfer() {
        let z: Vec<f64> = (0..n + 2).map(|_| r.sample(StandardNormal)).collect();
        for (t, v) in z_e.iter_mut().enumerate() {
            for (m, c) in g.coefficients.iter().enumerate() {
                *v += c * z[t + 2 - m];
            }
        }
    }
    for (k, a) in analytic.iter().enumerate() {
        let est: f64 = (0..n - k).map(|t| z_e[t] * z_e[t + k]).sum::<f64>() / (n - k) as f64;
        let se = analytic[0] * (2.0 / n as f64).sqrt();
        assert!((est - a).abs() < 5.0 * se, "lag {k}: {est} vs {a}");
    }
    assert_eq!(analytic[3], 0.0);
}

#[test]
fn precoding_without_interference_is_plain_encoding() {
    let pair = NestedPair::new(&Lattice::gosset(), 4, 1.0).unwrap();
    let mut r = rng(44);
    for _ in 0..50 {
        let w = r.random_range(0..pair.num_messages());
        let u = pair.coarse().sample_uniform_voronoi(&mut r);
        let a = precode_with_dither(&pair, w, u.clone(), &[0.0; 8], 0.7).unwrap();
        let b = pair.encode_with_dither(w, u).unwrap();
        assert_eq!(a.channel_input, b.channel_input);
    }
}

#[test]
fn precoding_cancels_known_interference() {
    let mut r = rng(45);
    for base in [
        Lattice::gosset(),
        Lattice::checkerboard(4).unwrap(),
        Lattice::integer(3).unwrap(),
    ] {
        let pair = NestedPair::new(&base, 4, 2.0).unwrap();
        for _ in 0..1000 {
            let w = r.random_range(0..pair.num_messages());
            let s: Vec<f64> = (0..pair.dim())
                .map(|_| r.random_range(-50.0..50.0))
                .collect();
            let cw = precode_dirty_paper(&pair, w, &s, 1.0, &mut r).unwrap();
            let y: Vec<f64> = cw
                .channel_input
                .iter()
                .zip(&s)
                .map(|(x, s)| x + s)
                .collect();
            assert_eq!(pair.decode_message(&y, &cw.dither, 1.0).unwrap(), w);
        }
    }
}

fn dirty_paper_errors(interference: f64, trials: usize, seed: u64) -> ErrorCount {
    let pair = NestedPair::new(&Lattice::gosset(), 4, 1.0).unwrap();
    let snr = 10f64.powf(1.6);
    let noise = Normal::new(0.0, (1.0 / snr).sqrt()).unwrap();
    let alpha = mmse_alpha(snr).unwrap();
    let mut r = rng(seed);
    let mut errors = 0;
    for _ in 0..trials {
        let w = r.random_range(0..pair.num_messages());
        let s: Vec<f64> = (0..8)
            .map(|_| r.random_range(-interference..=interference))
            .collect();
        let cw = precode_dirty_paper(&pair, w, &s, alpha, &mut r).unwrap();
        let y: Vec<f64> = cw
            .channel_input
            .iter()
            .zip(&s)
            .map(|(x, s)| x + s + noise.sample(&mut r))
            .collect();
        errors += u64::from(pair.decode_message(&y, &cw.dither, alpha).unwrap() != w);
    }
    ErrorCount::new(errors, trials as u64)
}

#[test]
fn precoded_error_rate_tracks_interference_free_rate() {
    let clean = dirty_paper_errors(0.0, 20_000, 46);
    let dirty = dirty_paper_errors(30.0, 20_000, 47);
    assert!(clean.errors > 50, "{clean:?}");
    assert!(dirty.rate() <= 2.0 * clean.rate() && clean.rate() <= 2.0 * dirty.rate());
}

#[test]
fn interleaver_causality_exhaustive() {
    for memory in 0..6 {
        for rows in memory + 1..memory + 8 {
            for cols in [1, 2, 4, 8] {
                let il = BlockInterleaver::new(rows, cols, memory).unwrap();
                assert!(il.causality_violations().is_empty());
                let data: Vec<u32> = (0..il.len() as u32).collect();
                assert_eq!(il.deinterleave(&il.interleave(&data)), data);
            }
        }
    }
    let il = BlockInterleaver::new(3, 4, 2).unwrap();
    assert_eq!(il.entry_at(0), (0, 0));
    assert_eq!(il.entry_at(1), (1, 0));
    assert_eq!(il.entry_at(3), (0, 1));
    assert!(BlockInterleaver::new(2, 4, 2).is_err());
}

#[test]
fn single_tap_link_matches_awgn_codec() {
    // Power 40 through gain 0.8 puts E8 at rate 2 near its error floor knee.
    let (h, ps) = (0.8, 40.0);
    let ch = IsiChannel::new(vec![h], vec![], ps).unwrap();
    let pair = NestedPair::new(&Lattice::gosset(), 4, ps).unwrap();
    let cfg = LinkConfig {
        blocks: 1000,
        depth: Some(16),
        seed: 48,
        ..LinkConfig::default()
    };
    let link = simulate_isi_link(&ch, &pair, &cfg).unwrap();
    let snr = ps * h * h;
    assert!((link.dfe.snr - snr).abs() < 1e-9 * snr);

    let mut r = rng(49);
    let noise = Normal::new(0.0, (ps / snr).sqrt()).unwrap();
    let alpha = mmse_alpha(snr).unwrap();
    let trials = link.messages.trials;
    let mut errors = 0;
    for _ in 0..trials {
        let w = r.random_range(0..pair.num_messages());
        let cw = pair.encode(w, &mut r).unwrap();
        let y: Vec<f64> = cw
            .channel_input
            .iter()
            .map(|x| x + noise.sample(&mut r))
            .collect();
        errors += u64::from(pair.decode_message(&y, &cw.dither, alpha).unwrap() != w);
    }
    let awgn = ErrorCount::new(errors, trials);
    let se = (awgn.std_error().powi(2) + link.messages.std_error().powi(2)).sqrt();
    assert!(awgn.errors > 30, "{awgn:?}");
    assert!(
        (awgn.rate() - link.messages.rate()).abs() < 4.0 * se,
        "{awgn:?} {:?}",
        link.messages
    );
}

#[test]
fn noiseless_link_has_no_errors() {
    let net = parse_network(workspace_file("networks/mesh.json")).unwrap();
    let ch = reduce_to_isi(&net).unwrap();
    let pair = NestedPair::new(&Lattice::gosset(), 8, ch.source_power()).unwrap();
    let cfg = LinkConfig {
        blocks: 200,
        noise: false,
        ..LinkConfig::default()
    };
    let s = simulate_isi_link(&ch, &pair, &cfg).unwrap();
    assert_eq!(s.messages.errors, 0);
    assert_eq!(s.messages.trials, 200 * 16);
}

#[test]
fn link_below_capacity_decodes_reliably() {
    let net = parse_network(workspace_file("networks/diamond_direct.json")).unwrap();
    let ch = reduce_to_isi(&net).unwrap();
    let pair = NestedPair::new(&Lattice::gosset(), 4, ch.source_power()).unwrap();
    let cfg = LinkConfig {
        blocks: 10_000,
        seed: 50,
        ..LinkConfig::default()
    };
    let s = simulate_isi_link(&ch, &pair, &cfg).unwrap();
    assert!(pair.rate_bits() <= 0.75 * s.report.c_isi);
    assert!(s.messages.rate() < 1e-2, "{:?}", s.messages);
}

/// Symbol-by-symbol simulation where every relay forwards what it heard one
/// symbol earlier. Returns destination samples and mean transmit powers.
fn simulate_delayed(
    net: &latticeaf::RelayNetwork,
    beta: &[f64],
    x: &[f64],
    noise: bool,
    r: &mut impl Rng,
) -> (Vec<f64>, Vec<f64>) {
    let n = net.num_nodes();
    let mut heard = vec![0.0; n];
    let mut energy = vec![0.0; n];
    let mut out = Vec::with_capacity(x.len());
    for &xs in x {
        let mut tx = vec![0.0; n];
        for v in 0..n {
            tx[v] = if v == net.source() {
                xs
            } else {
                beta[v] * heard[v]
            };
            energy[v] += tx[v] * tx[v];
        }
        for (v, h) in heard.iter_mut().enumerate() {
            *h = net.incoming(v).map(|e| e.gain * tx[e.from]).sum::<f64>();
            if noise {
                *h += r.sample::<f64, _>(StandardNormal);
            }
        }
        out.push(heard[net.destination()]);
    }
    let m = x.len() as f64;
    (out, energy.into_iter().map(|e| e / m).collect())
}

#[test]
fn delayed_simulation_agrees_with_reduction() {
    let mut r = rng(51);
    for _ in 0..30 {
        let net = random_dag(&mut r, &DagParams::default());
        let ch = reduce_to_isi(&net).unwrap();
        let powers = latticeaf::network::af::ReceivedPowers {
            per_node: (0..net.num_nodes())
                .map(|j| {
                    let a: f64 = net
                        .incoming(j)
                        .map(|e| e.gain * net.power(e.from).sqrt())
                        .sum();
                    a * a
                })
                .collect(),
            destination: 0.0,
        };
        let delta = net
            .relays()
            .map(|j| 1.0 / powers.per_node[j])
            .fold(0.0, f64::max);
        let beta = amplification_gains(&net, &powers, delta).unwrap().beta;

        let ps = net.source_power();
        let x: Vec<f64> = (0..30_000)
            .map(|_| ps.sqrt() * r.sample::<f64, _>(StandardNormal))
            .collect();
        let (y, _) = simulate_delayed(&net, &beta, &x, false, &mut r);
        for t in 50..200 {
            let conv: f64 = ch
                .taps()
                .iter()
                .enumerate()
                .filter(|(l, _)| *l <= t)
                .map(|(l, h)| h * x[t - l])
                .sum();
            assert!((y[t] - conv).abs() < 1e-9 * (1.0 + conv.abs()));
        }
        let (_, power) = simulate_delayed(&net, &beta, &x, true, &mut r);
        for j in net.relays() {
            assert!(
                power[j] <= net.power(j) * 1.05,
                "{}: {} > {}",
                net.name(j),
                power[j],
                net.power(j)
            );
        }
    }
}
