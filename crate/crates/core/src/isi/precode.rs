//! Dirty-paper precoding of known interference.
//!
//! The transmitter knows `s` (here the post-cursor interference of earlier
//! rows) and sends `x = [t − u − α·s] mod Λ1`. The receiver sees
//! `r = x + s + e` and runs the ordinary lattice decoder
//! [`NestedPair::decode`](crate::codec::NestedPair::decode) with the same `α`
//! and dither. Because `α·r + u − t = α·e − (1−α)·x` modulo Λ1, `s` drops out.

use rand::Rng;

use crate::codec::{Codeword, NestedPair};
use crate::error::Result;

/// Precodes message `w` against `interference` with a fresh dither.
pub fn precode_dirty_paper<R: Rng + ?Sized>(
    pair: &NestedPair,
    w: u64,
    interference: &[f64],
    alpha: f64,
    rng: &mut R,
) -> Result<Codeword> {
    let t = pair.message_to_coset(w)?;
    let u = pair.coarse().sample_uniform_voronoi(rng);
    pair.encode_leader(w, t, u, interference, alpha)
}

/// Precodes with a caller-supplied dither.
pub fn precode_with_dither(
    pair: &NestedPair,
    w: u64,
    dither: Vec<f64>,
    interference: &[f64],
    alpha: f64,
) -> Result<Codeword> {
    let t = pair.message_to_coset(w)?;
    pair.encode_leader(w, t, dither, interference, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interference_cancels_without_noise() {
        let pair = NestedPair::new(&Lattice::gosset(), 4, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for w in [0, 17, 4000, pair.num_messages() - 1] {
            let s: Vec<f64> = (0..8).map(|i| 5.0 * (i as f64 - 3.3)).collect();
            let cw = precode_dirty_paper(&pair, w, &s, 1.0, &mut rng).unwrap();
            let r: Vec<f64> = cw
                .channel_input
                .iter()
                .zip(&s)
                .map(|(x, s)| x + s)
                .collect();
            assert_eq!(pair.decode_message(&r, &cw.dither, 1.0).unwrap(), w);
        }
    }

    #[test]
    fn length_checked() {
        let pair = NestedPair::new(&Lattice::integer(2).unwrap(), 4, 1.0).unwrap();
        assert!(precode_with_dither(&pair, 0, vec![0.0; 2], &[1.0; 3], 1.0).is_err());
    }
}
