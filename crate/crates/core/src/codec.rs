//! Self-similar nested lattice codes with dithered modulo encoding and
//! MMSE-scaled lattice decoding.
//!
//! The fine lattice `Λ2 = c·B` and the coarse lattice `Λ1 = M·Λ2` share the
//! base lattice `B`; `c` is chosen so that the second moment of `Λ1` equals
//! the source power. Messages are the `Mⁿ` cosets of `Λ1` in `Λ2`, indexed by
//! the base-`M` digits of the fine-lattice coefficient vector.
//!
//! ```
//! use latticeaf::{Lattice, NestedPair};
//! use rand::SeedableRng;
//!
//! let pair = NestedPair::new(&Lattice::integer(4)?, 3, 1.0)?;
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
//! let cw = pair.encode(42, &mut rng)?;
//! // Noiseless channel, α = 1.
//! let t_hat = pair.decode(&cw.channel_input, &cw.dither, 1.0)?;
//! assert_eq!(pair.coset_to_message(&t_hat), 42);
//! # Ok::<(), latticeaf::Error>(())
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{estimate_metrics, Lattice};

/// Seed and sample count used to calibrate untagged base lattices.
const CALIBRATION_SEED: u64 = 0x005e_ed0f_1a77;
const CALIBRATION_SAMPLES: usize = 200_000;

/// Sign of the dither at the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DitherSign {
    /// `x = [t − u] mod Λ1`, which the decoder `Q(αy + u) mod Λ1` inverts.
    #[default]
    Subtract,
    /// `x = [t + u] mod Λ1`, kept for inspection; it does not compose with
    /// the decoder to the identity.
    Add,
}

/// How the MMSE scaling factor's SNR is formed from the equivalent channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaMode {
    /// `γ = P_d / ((1+δ)^{L−1}·P_{z,d})`, propagated noise only.
    Paper,
    /// `γ` is the full destination SNR, including the destination's own noise.
    #[default]
    FullMmse,
}

/// `α = γ / (1 + γ)`. Infinite `γ` gives `α = 1`.
pub fn mmse_alpha(gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::InputDomain(format!(
            "SNR must be positive, got {gamma}"
        )));
    }
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    Ok(gamma / (1.0 + gamma))
}

/// A nested pair `Λ1 = M·Λ2 ⊆ Λ2`.
#[derive(Debug, Clone)]
pub struct NestedPair {
    fine: Lattice,
    coarse: Lattice,
    ratio: u32,
    source_power: f64,
    num_messages: u64,
    dither_sign: DitherSign,
}

/// One encoded message.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    pub message: u64,
    /// Coset leader `t ∈ Λ2 ∩ V1`.
    pub coset_leader: Vec<f64>,
    /// Dither `u`, uniform on `V1`.
    pub dither: Vec<f64>,
    /// Channel input `x_s ∈ V1`.
    pub channel_input: Vec<f64>,
}

impl NestedPair {
    /// Scales `base` so that the coarse lattice has second moment `source_power`
    /// per dimension. Tagged lattices use their closed-form second moment;
    /// other bases are calibrated by Monte Carlo with a fixed seed.
    pub fn new(base: &Lattice, ratio: u32, source_power: f64) -> Result<Self> {
        if !(source_power > 0.0 && source_power.is_finite()) {
            return Err(Error::Construction(format!(
                "source power must be positive, got {source_power}"
            )));
        }
        Self::check_ratio(ratio)?;
        let base_moment = match base.exact_second_moment() {
            Some(s) => s,
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(CALIBRATION_SEED);
                estimate_metrics(base, CALIBRATION_SAMPLES, &mut rng)?.second_moment
            }
        };
        let fine_scale = (source_power / base_moment).sqrt() / ratio as f64;
        let mut pair = Self::with_fine_scale(base, ratio, fine_scale)?;
        pair.source_power = source_power;
        Ok(pair)
    }

    /// Pair with `Λ2 = fine_scale·base` and `Λ1 = M·Λ2`; the source power is
    /// the coarse second moment where known in closed form, else estimated.
    pub fn with_fine_scale(base: &Lattice, ratio: u32, fine_scale: f64) -> Result<Self> {
        Self::check_ratio(ratio)?;
        let fine = base.scaled(fine_scale)?;
        let coarse = fine.scaled(ratio as f64)?;
        let num_messages = (ratio as u64)
            .checked_pow(base.dim() as u32)
            .ok_or_else(|| {
                Error::Construction(format!(
                    "{ratio}^{} messages overflow a 64-bit index",
                    base.dim()
                ))
            })?;
        let source_power = match coarse.exact_second_moment() {
            Some(s) => s,
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(CALIBRATION_SEED);
                estimate_metrics(&coarse, CALIBRATION_SAMPLES, &mut rng)?.second_moment
            }
        };
        Ok(Self {
            fine,
            coarse,
            ratio,
            source_power,
            num_messages,
            dither_sign: DitherSign::default(),
        })
    }

    fn check_ratio(ratio: u32) -> Result<()> {
        if ratio < 2 {
            return Err(Error::Construction(format!(
                "nesting ratio must be at least 2, got {ratio}"
            )));
        }
        Ok(())
    }

    /// Switches the encoder's dither sign.
    pub fn with_dither_sign(mut self, sign: DitherSign) -> Self {
        self.dither_sign = sign;
        self
    }

    pub fn dither_sign(&self) -> DitherSign {
        self.dither_sign
    }

    pub fn dim(&self) -> usize {
        self.fine.dim()
    }

    /// `Λ2`
    pub fn fine(&self) -> &Lattice {
        &self.fine
    }

    /// `Λ1`
    pub fn coarse(&self) -> &Lattice {
        &self.coarse
    }

    pub fn ratio(&self) -> u32 {
        self.ratio
    }

    /// Second moment of `Λ1` per dimension.
    pub fn source_power(&self) -> f64 {
        self.source_power
    }

    /// `|C| = Mⁿ`.
    pub fn num_messages(&self) -> u64 {
        self.num_messages
    }

    /// Coding rate `log2 M` bits per dimension.
    pub fn rate_bits(&self) -> f64 {
        (self.ratio as f64).log2()
    }

    /// `(1/n)·log2(Vol(V1)/Vol(V2))` from the two generators.
    pub fn measured_rate_bits(&self) -> f64 {
        (self.coarse.covolume() / self.fine.covolume()).log2() / self.dim() as f64
    }

    /// Base-`M` digits of a message index, least significant first.
    pub fn message_digits(&self, w: u64) -> Result<Vec<u32>> {
        if w >= self.num_messages {
            return Err(Error::MessageOutOfRange {
                index: w,
                count: self.num_messages,
            });
        }
        let m = self.ratio as u64;
        let mut rest = w;
        Ok((0..self.dim())
            .map(|_| {
                let d = (rest % m) as u32;
                rest /= m;
                d
            })
            .collect())
    }

    /// Coset leader of message `w`: `[G₂·d] mod Λ1` for its digit vector `d`.
    pub fn message_to_coset(&self, w: u64) -> Result<Vec<f64>> {
        let digits = self.message_digits(w)?;
        let z: Vec<i64> = digits.iter().map(|&d| d as i64).collect();
        self.coarse.mod_lattice(&self.fine.point(&z))
    }

    /// Digit vector of a fine-lattice point, reduced modulo `M`.
    pub fn coset_digits(&self, t: &[f64]) -> Vec<u32> {
        let m = self.ratio as i64;
        self.fine
            .coefficients(t)
            .iter()
            .map(|c| c.rem_euclid(m) as u32)
            .collect()
    }

    /// Inverse of [`message_to_coset`](Self::message_to_coset); accepts any
    /// representative of the coset.
    pub fn coset_to_message(&self, t: &[f64]) -> u64 {
        let m = self.ratio as u64;
        self.coset_digits(t)
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * m + d as u64)
    }

    /// Encodes `w` with a fresh dither drawn uniformly from `V1`.
    pub fn encode<R: Rng + ?Sized>(&self, w: u64, rng: &mut R) -> Result<Codeword> {
        let t = self.message_to_coset(w)?;
        let u = self.coarse.sample_uniform_voronoi(rng);
        self.encode_leader(w, t, u, &[], 1.0)
    }

    /// Encodes `w` with a caller-supplied dither.
    pub fn encode_with_dither(&self, w: u64, dither: Vec<f64>) -> Result<Codeword> {
        let t = self.message_to_coset(w)?;
        self.encode_leader(w, t, dither, &[], 1.0)
    }

    /// `x = [t ∓ u − α·s] mod Λ1`; an empty `interference` means `s = 0`.
    pub(crate) fn encode_leader(
        &self,
        w: u64,
        t: Vec<f64>,
        u: Vec<f64>,
        interference: &[f64],
        alpha: f64,
    ) -> Result<Codeword> {
        if u.len() != self.dim() {
            return Err(Error::InputDomain(format!(
                "dither must have length {}, got {}",
                self.dim(),
                u.len()
            )));
        }
        if !interference.is_empty() && interference.len() != self.dim() {
            return Err(Error::InputDomain(format!(
                "interference must have length {}, got {}",
                self.dim(),
                interference.len()
            )));
        }
        let sign = match self.dither_sign {
            DitherSign::Subtract => -1.0,
            DitherSign::Add => 1.0,
        };
        let v: Vec<f64> = (0..self.dim())
            .map(|i| {
                let s = interference.get(i).copied().unwrap_or(0.0);
                t[i] + sign * u[i] - alpha * s
            })
            .collect();
        let x = self.coarse.mod_lattice(&v)?;
        Ok(Codeword {
            message: w,
            coset_leader: t,
            dither: u,
            channel_input: x,
        })
    }

    /// `t̂ = [Q_{Λ2}(α·y + u)] mod Λ1` for a unit-gain received vector `y`.
    pub fn decode(&self, y_scaled: &[f64], dither: &[f64], alpha: f64) -> Result<Vec<f64>> {
        if y_scaled.len() != self.dim() || dither.len() != self.dim() {
            return Err(Error::InputDomain(format!(
                "received vector and dither must have length {}",
                self.dim()
            )));
        }
        let v: Vec<f64> = y_scaled
            .iter()
            .zip(dither)
            .map(|(y, u)| alpha * y + u)
            .collect();
        let q = self.fine.quantize_nearest(&v)?;
        self.coarse.mod_lattice(&q)
    }

    /// Number of base-`M` digits of `w` that `t_hat` gets wrong.
    pub fn digit_errors(&self, w: u64, t_hat: &[f64]) -> Result<usize> {
        let want = self.message_digits(w)?;
        let got = self.coset_digits(t_hat);
        Ok(want.iter().zip(&got).filter(|(a, b)| a != b).count())
    }

    /// [`decode`](Self::decode) followed by the inverse coset map.
    pub fn decode_message(&self, y_scaled: &[f64], dither: &[f64], alpha: f64) -> Result<u64> {
        Ok(self.coset_to_message(&self.decode(y_scaled, dither, alpha)?))
    }
}
