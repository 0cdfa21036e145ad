//! Finite-dimensional lattices with exact nearest-point quantization.
//!
//! A [`Lattice`] is stored by its generator matrix `G`, whose columns are the
//! basis vectors, so every lattice point is `G z` for an integer coefficient
//! vector `z`. The QR factorization of `G` is cached at construction and
//! drives the exact closest-point search behind [`Lattice::search_nearest`]. The integer lattice
//! `Zⁿ`, the checkerboard lattice `Dₙ` and the Gosset lattice `E8` carry a
//! [`LatticeKind`] tag and are quantized in closed form; near-ties on the
//! closed-form path fall back to the exact search so that tie-breaking is the
//! same everywhere (lexicographically smallest coefficient vector).

mod closed_form;
mod metrics;
mod search;

pub use metrics::{estimate_metrics, measure_channel_goodness, ChannelGoodness, LatticeMetrics};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};

/// Relative tolerance for distance comparisons and lattice-membership checks.
pub const TOLERANCE: f64 = 1e-9;

/// Lattices with closed-form quantizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    /// `Zⁿ`
    Integer,
    /// `Dₙ = { z ∈ Zⁿ : Σ zᵢ even }`
    Checkerboard,
    /// `E8 = D8 ∪ (D8 + ½·1)`
    Gosset,
}

impl LatticeKind {
    /// Exact normalized second moment `G(Λ)` of the unscaled lattice.
    pub fn normalized_second_moment(self, dim: usize) -> f64 {
        let n = dim as f64;
        match self {
            LatticeKind::Integer => 1.0 / 12.0,
            LatticeKind::Checkerboard => {
                2f64.powf(-2.0 / n) * (1.0 / 12.0 + 1.0 / (2.0 * n * (n + 1.0)))
            }
            LatticeKind::Gosset => 929.0 / 12960.0,
        }
    }
}

/// A full-rank lattice in `Rⁿ`.
#[derive(Debug, Clone)]
pub struct Lattice {
    generator: DMatrix<f64>,
    inverse: DMatrix<f64>,
    q_transpose: DMatrix<f64>,
    r_factor: DMatrix<f64>,
    covolume: f64,
    kind: Option<LatticeKind>,
    /// Scale of a tagged lattice relative to its canonical form.
    scale: f64,
}

impl Lattice {
    /// Builds a lattice from a square generator whose columns are basis vectors.
    pub fn from_generator(generator: DMatrix<f64>) -> Result<Self> {
        Self::build(generator, None, 1.0)
    }

    /// Builds a lattice from a list of basis vectors.
    pub fn from_basis(basis: &[Vec<f64>]) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::Construction("empty basis".into()));
        }
        if basis.iter().any(|b| b.len() != n) {
            return Err(Error::Construction(format!(
                "basis must hold {n} vectors of length {n}"
            )));
        }
        let g = DMatrix::from_fn(n, n, |i, j| basis[j][i]);
        Self::from_generator(g)
    }

    /// The integer lattice `Zⁿ`.
    pub fn integer(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Construction("dimension must be positive".into()));
        }
        Self::build(DMatrix::identity(dim, dim), Some(LatticeKind::Integer), 1.0)
    }

    /// The checkerboard lattice `Dₙ` (for `n = 1` this is `2Z`).
    pub fn checkerboard(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Construction("dimension must be positive".into()));
        }
        let g = if dim == 1 {
            DMatrix::from_element(1, 1, 2.0)
        } else {
            // Columns: (-1,-1,0,..), (1,-1,0,..), (0,1,-1,0,..), ..., (0,..,1,-1).
            let mut g = DMatrix::zeros(dim, dim);
            g[(0, 0)] = -1.0;
            g[(1, 0)] = -1.0;
            for j in 1..dim {
                g[(j - 1, j)] = 1.0;
                g[(j, j)] = -1.0;
            }
            g
        };
        Self::build(g, Some(LatticeKind::Checkerboard), 1.0)
    }

    /// The Gosset lattice `E8` with unit covolume.
    pub fn gosset() -> Self {
        let mut g = DMatrix::zeros(8, 8);
        g[(0, 0)] = 2.0;
        for j in 1..7 {
            g[(j - 1, j)] = -1.0;
            g[(j, j)] = 1.0;
        }
        for i in 0..8 {
            g[(i, 7)] = 0.5;
        }
        Self::build(g, Some(LatticeKind::Gosset), 1.0).expect("E8 generator is unimodular")
    }

    /// The hexagonal lattice `A2` with basis `(1, 0)`, `(½, √3/2)`.
    pub fn hexagonal() -> Self {
        Self::from_basis(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]])
            .expect("hexagonal basis is full rank")
    }

    /// Returns `c·Λ`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Construction(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        Self::build(&self.generator * factor, self.kind, self.scale * factor)
    }

    fn build(generator: DMatrix<f64>, kind: Option<LatticeKind>, scale: f64) -> Result<Self> {
        let n = generator.nrows();
        if n == 0 || generator.ncols() != n {
            return Err(Error::Construction(format!(
                "generator must be square and non-empty, got {}x{}",
                generator.nrows(),
                generator.ncols()
            )));
        }
        if generator.iter().any(|v| !v.is_finite()) {
            return Err(Error::Construction(
                "generator has non-finite entries".into(),
            ));
        }
        let qr = generator.clone().qr();
        let r_factor = qr.r();
        let covolume = r_factor.diagonal().iter().map(|d| d.abs()).product::<f64>();
        // Hadamard ratio: |det G| / Π‖gᵢ‖ is 1 for orthogonal bases and 0 for singular ones.
        let column_norms: f64 = generator.column_iter().map(|c| c.norm()).product();
        if covolume.is_nan() || covolume <= 0.0 || covolume / column_norms < 1e-12 {
            return Err(Error::Construction("generator is not full rank".into()));
        }
        let inverse = generator
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Construction("generator is not invertible".into()))?;
        Ok(Self {
            q_transpose: qr.q().transpose(),
            r_factor,
            inverse,
            generator,
            covolume,
            kind,
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    /// Generator matrix, columns are basis vectors.
    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    /// Volume of the fundamental Voronoi region, `|det G|`.
    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    pub fn kind(&self) -> Option<LatticeKind> {
        self.kind
    }

    /// Closed-form `G(Λ)` when the lattice is tagged.
    pub fn exact_normalized_second_moment(&self) -> Option<f64> {
        self.kind.map(|k| k.normalized_second_moment(self.dim()))
    }

    /// Closed-form second moment per dimension when the lattice is tagged.
    pub fn exact_second_moment(&self) -> Option<f64> {
        self.exact_normalized_second_moment()
            .map(|g| g * self.covolume.powf(2.0 / self.dim() as f64))
    }

    /// `Vol(V)^{2/n}`, the natural squared length unit of the lattice.
    pub(crate) fn unit_sq(&self) -> f64 {
        self.covolume.powf(2.0 / self.dim() as f64)
    }

    /// Lattice point `G z`.
    pub fn point(&self, coefficients: &[i64]) -> Vec<f64> {
        let z = DVector::from_iterator(self.dim(), coefficients.iter().map(|&c| c as f64));
        (&self.generator * z).iter().copied().collect()
    }

    /// Real coefficients `G⁻¹ x`.
    pub fn real_coefficients(&self, x: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(x);
        (&self.inverse * v).iter().copied().collect()
    }

    /// Integer coefficient vector of a lattice point (rounded `G⁻¹ x`).
    pub fn coefficients(&self, point: &[f64]) -> Vec<i64> {
        self.real_coefficients(point)
            .iter()
            .map(|c| c.round() as i64)
            .collect()
    }

    /// Whether `x` lies on the lattice within [`TOLERANCE`].
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        self.real_coefficients(x)
            .iter()
            .all(|c| (c - c.round()).abs() <= TOLERANCE * (1.0 + c.abs()))
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InputDomain(format!(
                "expected a vector of length {}, got {}",
                self.dim(),
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InputDomain(
                "vector has non-finite coordinates".into(),
            ));
        }
        Ok(())
    }

    /// Nearest lattice point to `x`. Ties resolve to the lexicographically
    /// smallest integer coefficient vector.
    pub fn quantize_nearest(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        if let Some(kind) = self.kind {
            if let Some(p) = closed_form::quantize(kind, self.scale, x) {
                return Ok(p);
            }
        }
        Ok(self.point(&self.search(x)))
    }

    /// Integer coefficients of the nearest lattice point.
    pub fn quantize_coefficients(&self, x: &[f64]) -> Result<Vec<i64>> {
        self.check_input(x)?;
        if let Some(kind) = self.kind {
            if let Some(p) = closed_form::quantize(kind, self.scale, x) {
                return Ok(self.coefficients(&p));
            }
        }
        Ok(self.search(x))
    }

    /// Exact closest-point search, bypassing any closed-form path.
    pub fn search_nearest(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.point(&self.search(x)))
    }

    fn search(&self, x: &[f64]) -> Vec<i64> {
        let y = &self.q_transpose * DVector::from_column_slice(x);
        search::closest_point(&self.r_factor, y.as_slice(), self.unit_sq())
    }

    /// `x mod Λ = x − Q_Λ(x)`; the result lies in the fundamental Voronoi region.
    pub fn mod_lattice(&self, x: &[f64]) -> Result<Vec<f64>> {
        let q = self.quantize_nearest(x)?;
        Ok(x.iter().zip(&q).map(|(a, b)| a - b).collect())
    }

    /// Draws a point uniformly from the fundamental Voronoi region by reducing a
    /// uniform point of the fundamental parallelepiped modulo the lattice.
    pub fn sample_uniform_voronoi<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.dim();
        let a = DVector::from_fn(n, |_, _| rng.random::<f64>());
        let p: Vec<f64> = (&self.generator * a).iter().copied().collect();
        self.mod_lattice(&p)
            .expect("parallelepiped point is finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn integer_rounding_example() {
        let z2 = Lattice::integer(2).unwrap();
        assert_eq!(z2.quantize_nearest(&[0.4, -0.6]).unwrap(), vec![0.0, -1.0]);
    }

    #[test]
    fn lattice_points_are_fixed() {
        for lat in [
            Lattice::integer(3).unwrap(),
            Lattice::checkerboard(4).unwrap(),
            Lattice::gosset(),
            Lattice::hexagonal(),
        ] {
            let n = lat.dim();
            let mut z = vec![0i64; n];
            z[0] = 3;
            z[n - 1] = -2;
            let p = lat.point(&z);
            let q = lat.quantize_nearest(&p).unwrap();
            for (a, b) in p.iter().zip(&q) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn skewed_basis_example() {
        // Exhaustive search over a bounding box gives (2,0) = 1·b1 + (−1)·b2.
        let lat = Lattice::from_basis(&[vec![2.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let q = lat.quantize_nearest(&[2.6, 0.2]).unwrap();
        assert!((q[0] - 2.0).abs() < 1e-12 && q[1].abs() < 1e-12, "{q:?}");
    }

    #[test]
    fn one_dimensional_mod() {
        let z = Lattice::integer(1).unwrap();
        let r = z.mod_lattice(&[1.3]).unwrap();
        assert!((r[0] - 0.3).abs() < 1e-12);
        assert_eq!(z.mod_lattice(&[5.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn mod_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for lat in [
            Lattice::hexagonal(),
            Lattice::gosset(),
            Lattice::checkerboard(3).unwrap(),
        ] {
            for _ in 0..1000 {
                let x: Vec<f64> = (0..lat.dim())
                    .map(|_| rng.random_range(-10.0..10.0))
                    .collect();
                let once = lat.mod_lattice(&x).unwrap();
                let twice = lat.mod_lattice(&once).unwrap();
                for (a, b) in once.iter().zip(&twice) {
                    assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn non_finite_input_rejected() {
        let lat = Lattice::integer(2).unwrap();
        assert!(matches!(
            lat.quantize_nearest(&[f64::NAN, 0.0]),
            Err(Error::InputDomain(_))
        ));
        assert!(matches!(
            lat.mod_lattice(&[0.0]),
            Err(Error::InputDomain(_))
        ));
    }

    #[test]
    fn singular_generator_rejected() {
        let r = Lattice::from_basis(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(r, Err(Error::Construction(_))));
    }

    #[test]
    fn covolumes() {
        assert!((Lattice::gosset().covolume() - 1.0).abs() < 1e-12);
        assert!((Lattice::checkerboard(5).unwrap().covolume() - 2.0).abs() < 1e-12);
        assert!((Lattice::checkerboard(1).unwrap().covolume() - 2.0).abs() < 1e-12);
        assert!((Lattice::hexagonal().covolume() - 3f64.sqrt() / 2.0).abs() < 1e-12);
        let s = Lattice::integer(3).unwrap().scaled(2.0).unwrap();
        assert!((s.covolume() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn integer_ties_break_low() {
        // Lexicographically smallest coefficient vector among equidistant points.
        let z = Lattice::integer(2).unwrap();
        assert_eq!(z.quantize_nearest(&[0.5, -1.5]).unwrap(), vec![0.0, -2.0]);
        assert_eq!(z.search_nearest(&[0.5, -1.5]).unwrap(), vec![0.0, -2.0]);
    }

    #[test]
    fn closed_form_ties_agree_with_search() {
        // Deep holes and boundary points of D4 and E8.
        let d4 = Lattice::checkerboard(4).unwrap();
        let e8 = Lattice::gosset();
        let cases: Vec<(Lattice, Vec<f64>)> = vec![
            (d4.clone(), vec![1.0, 0.0, 0.0, 0.0]),
            (d4.clone(), vec![0.5, 0.5, 0.5, 0.5]),
            (d4, vec![0.5, 0.0, 0.0, 0.0]),
            (e8.clone(), vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            (e8, vec![0.25; 8]),
        ];
        for (lat, x) in cases {
            assert_eq!(
                lat.quantize_nearest(&x).unwrap(),
                lat.search_nearest(&x).unwrap()
            );
        }
    }

    #[test]
    fn scaled_closed_form_matches_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for lat in [
            Lattice::gosset().scaled(0.7).unwrap(),
            Lattice::checkerboard(3).unwrap().scaled(2.5).unwrap(),
            Lattice::integer(4).unwrap().scaled(0.3).unwrap(),
        ] {
            for _ in 0..300 {
                let x: Vec<f64> = (0..lat.dim())
                    .map(|_| rng.random_range(-4.0..4.0))
                    .collect();
                let a = lat.quantize_nearest(&x).unwrap();
                let b = lat.search_nearest(&x).unwrap();
                for (p, q) in a.iter().zip(&b) {
                    assert!((p - q).abs() < 1e-9, "{a:?} vs {b:?}");
                }
            }
        }
    }

    #[test]
    fn voronoi_samples_quantize_to_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lat = Lattice::from_basis(&[vec![1.0, 0.3], vec![-0.4, 1.2]]).unwrap();
        for _ in 0..500 {
            let u = lat.sample_uniform_voronoi(&mut rng);
            assert!(lat
                .quantize_nearest(&u)
                .unwrap()
                .iter()
                .all(|c| c.abs() < 1e-12));
        }
    }
}
