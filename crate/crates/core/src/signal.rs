//! Signal generation: a counter-based reproducible RNG, non-circular
//! complex Gaussian noise, the widely-linear first-order autoregressive
//! input process, and the widely-linear plant producing the desired signal.

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::CVector;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("invalid noise spec: |complementary variance| {cvar:.6} exceeds variance {var:.6}")]
    InvalidNoiseSpec { var: f64, cvar: f64 },
    #[error("insufficient history: need {needed} samples, have {available}")]
    InsufficientHistory { needed: usize, available: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type SignalResult<T> = Result<T, SignalError>;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based pseudo-random stream.
///
/// Output depends only on `(seed, counter)`, so identical states reproduce
/// identical sequences, and `split` derives decorrelated child streams that
/// can run on parallel workers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Derives an independent stream for the given index (per-trial seeding).
    pub fn split(&self, index: u64) -> Self {
        let child = mix64(self.seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)));
        Self {
            seed: child,
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform draw in the open interval (0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        loop {
            let u = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u > 0.0 {
                return u;
            }
        }
    }

    /// A pair of independent standard Gaussians (Marsaglia polar method).
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        loop {
            let x = 2.0 * self.next_uniform() - 1.0;
            let y = 2.0 * self.next_uniform() - 1.0;
            let s = x * x + y * y;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                return (x * f, y * f);
            }
        }
    }
}

/// Second-order description of a zero-mean complex Gaussian scalar:
/// variance `σ² = E|q|²` and complementary variance `σ̃² = E[q²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoncircularGaussianSpec {
    pub variance: f64,
    pub complementary_variance: Complex64,
}

impl NoncircularGaussianSpec {
    pub fn new(variance: f64, complementary_variance: Complex64) -> SignalResult<Self> {
        let spec = Self {
            variance,
            complementary_variance,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn circular(variance: f64) -> Self {
        Self {
            variance,
            complementary_variance: Complex64::ZERO,
        }
    }

    pub fn validate(&self) -> SignalResult<()> {
        if self.variance < 0.0
            || self.complementary_variance.norm() > self.variance * (1.0 + 1e-12)
        {
            return Err(SignalError::InvalidNoiseSpec {
                var: self.variance,
                cvar: self.complementary_variance.norm(),
            });
        }
        Ok(())
    }
}

/// Draws one sample with the requested variance and complementary variance.
///
/// The sample is built from independent real and imaginary parts with
/// variances `(σ² ± |σ̃²|)/2`, then rotated by half the phase of `σ̃²` so the
/// complementary variance lands on the requested complex value.
pub fn draw_noncircular(spec: &NoncircularGaussianSpec, rng: &mut RngStream) -> Complex64 {
    debug_assert!(spec.validate().is_ok());
    let mag = spec.complementary_variance.norm();
    let re_var = 0.5 * (spec.variance + mag);
    let im_var = 0.5 * (spec.variance - mag).max(0.0);
    let (x, y) = rng.next_gaussian_pair();
    let base = Complex64::new(x * re_var.sqrt(), y * im_var.sqrt());
    if mag > 0.0 && (spec.complementary_variance.im != 0.0 || spec.complementary_variance.re < 0.0)
    {
        let half_phase = 0.5 * spec.complementary_variance.arg();
        base * Complex64::from_polar(1.0, half_phase)
    } else {
        base
    }
}

/// Widely-linear AR(1) input model `u(n+1) = a·u(n) + b·u*(n) + q(n)`.
#[derive(Debug, Clone, Copy)]
pub struct ArModel {
    pub a: f64,
    pub b: f64,
    pub noise: NoncircularGaussianSpec,
}

impl ArModel {
    /// The default coefficients (0.3, 0.1) with unit-variance noise of
    /// complementary variance 0.9.
    pub fn default_noncircular() -> Self {
        Self {
            a: 0.3,
            b: 0.1,
            noise: NoncircularGaussianSpec {
                variance: 1.0,
                complementary_variance: Complex64::new(0.9, 0.0),
            },
        }
    }
}

/// One deterministic step of the AR recursion with an externally supplied
/// innovation `q`.
pub fn ar_step(u_prev: Complex64, a: f64, b: f64, q: Complex64) -> Complex64 {
    a * u_prev + b * u_prev.conj() + q
}

/// One step of the AR recursion drawing its innovation from `rng`.
pub fn ar_input_step(u_prev: Complex64, model: &ArModel, rng: &mut RngStream) -> Complex64 {
    let q = draw_noncircular(&model.noise, rng);
    ar_step(u_prev, model.a, model.b, q)
}

/// Streaming AR sample source with warm-up so the emitted samples are
/// approximately stationary.
#[derive(Debug, Clone)]
pub struct ArStream {
    model: ArModel,
    rng: RngStream,
    state: Complex64,
}

impl ArStream {
    /// Warm-up length as a multiple of the filter length.
    pub const WARMUP_FACTOR: usize = 10;

    pub fn new(model: ArModel, rng: RngStream, warmup: usize) -> Self {
        let mut stream = Self {
            model,
            rng,
            state: Complex64::ZERO,
        };
        for _ in 0..warmup {
            stream.next_sample();
        }
        stream
    }

    /// Stream warmed up for a filter of length `n_taps`.
    pub fn for_filter(model: ArModel, rng: RngStream, n_taps: usize) -> Self {
        Self::new(model, rng, Self::WARMUP_FACTOR * n_taps)
    }

    pub fn next_sample(&mut self) -> Complex64 {
        self.state = ar_input_step(self.state, &self.model, &mut self.rng);
        self.state
    }
}

/// Tapped-delay-line view of the input process: `u(n) = [u(n), …, u(n−N+1)]`
/// newest first, plus the augmented form `z(n) = [u*(n); u(n)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorWindow {
    taps: CVector,
}

impl RegressorWindow {
    pub fn from_taps(taps: CVector) -> Self {
        Self { taps }
    }

    /// Builds the window from a history slice ordered oldest-to-newest,
    /// taking the `n_taps` most recent samples.
    pub fn from_history(history: &[Complex64], n_taps: usize) -> SignalResult<Self> {
        if history.len() < n_taps {
            return Err(SignalError::InsufficientHistory {
                needed: n_taps,
                available: history.len(),
            });
        }
        let taps = CVector::from_vec(
            history[history.len() - n_taps..]
                .iter()
                .rev()
                .copied()
                .collect(),
        );
        Ok(Self { taps })
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn taps(&self) -> &CVector {
        &self.taps
    }

    /// Augmented input `z(n) = [u^H(n), u^T(n)]^T`, i.e. the conjugated taps
    /// stacked on top of the taps.
    pub fn augmented(&self) -> CVector {
        self.taps.conj().stack(&self.taps)
    }
}

/// Rolling regressor fed one sample at a time (newest first internally).
#[derive(Debug, Clone)]
pub struct TappedDelayLine {
    taps: Vec<Complex64>,
}

impl TappedDelayLine {
    pub fn new(n_taps: usize) -> Self {
        Self {
            taps: vec![Complex64::ZERO; n_taps],
        }
    }

    pub fn push(&mut self, sample: Complex64) {
        self.taps.rotate_right(1);
        self.taps[0] = sample;
    }

    pub fn window(&self) -> RegressorWindow {
        RegressorWindow::from_taps(CVector::from_vec(self.taps.clone()))
    }
}

/// The unknown widely-linear system: optimal standard/conjugate weights and
/// the measurement-noise model.
#[derive(Debug, Clone)]
pub struct PlantSpec {
    pub h_opt: CVector,
    pub g_opt: CVector,
    pub noise: NoncircularGaussianSpec,
}

impl PlantSpec {
    pub fn new(h_opt: CVector, g_opt: CVector, noise_variance: f64) -> SignalResult<Self> {
        if h_opt.len() != g_opt.len() || h_opt.is_empty() {
            return Err(SignalError::DimensionMismatch(format!(
                "plant weight lengths {} and {} must match and be nonzero",
                h_opt.len(),
                g_opt.len()
            )));
        }
        Ok(Self {
            h_opt,
            g_opt,
            noise: NoncircularGaussianSpec::circular(noise_variance),
        })
    }

    /// Plant with weights drawn once from a seeded circular Gaussian.
    pub fn random(n_taps: usize, noise_variance: f64, rng: &mut RngStream) -> Self {
        let scale = (0.5f64).sqrt();
        let draw = |rng: &mut RngStream| {
            let mut v = CVector::zeros(n_taps);
            for i in 0..n_taps {
                let (re, im) = rng.next_gaussian_pair();
                v[i] = Complex64::new(re * scale, im * scale);
            }
            v
        };
        Self {
            h_opt: draw(rng),
            g_opt: draw(rng),
            noise: NoncircularGaussianSpec::circular(noise_variance),
        }
    }

    pub fn n_taps(&self) -> usize {
        self.h_opt.len()
    }

    /// Stacked optimal weights `w° = [h°; g°]`.
    pub fn stacked(&self) -> CVector {
        self.h_opt.stack(&self.g_opt)
    }
}

/// Desired-signal sample `d(n) = u^T h° + u^H g° + υ(n)`.
///
/// Returns both `d(n)` and the noise realization `υ(n)`; the latter is kept
/// so audits can verify `e = e_a + υ` exactly.
pub fn plant_output(
    u: &RegressorWindow,
    plant: &PlantSpec,
    rng: &mut RngStream,
) -> SignalResult<(Complex64, Complex64)> {
    if u.len() != plant.n_taps() {
        return Err(SignalError::DimensionMismatch(format!(
            "regressor length {} vs plant length {}",
            u.len(),
            plant.n_taps()
        )));
    }
    let noiseless = u.taps().dot(&plant.h_opt) + u.taps().conj().dot(&plant.g_opt);
    let upsilon = if plant.noise.variance > 0.0 {
        draw_noncircular(&plant.noise, rng)
    } else {
        Complex64::ZERO
    };
    Ok((noiseless + upsilon, upsilon))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let mut a = RngStream::new(123);
        let mut b = RngStream::new(123);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let (x1, y1) = a.next_gaussian_pair();
        let (x2, y2) = b.next_gaussian_pair();
        assert_eq!(x1.to_bits(), x2.to_bits());
        assert_eq!(y1.to_bits(), y2.to_bits());
    }

    #[test]
    fn split_streams_decorrelate() {
        let parent = RngStream::new(7);
        let mut a = parent.split(0);
        let mut b = parent.split(1);
        let n = 100_000;
        let (mut sum_ab, mut sum_a2, mut sum_b2) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let (xa, _) = a.next_gaussian_pair();
            let (xb, _) = b.next_gaussian_pair();
            sum_ab += xa * xb;
            sum_a2 += xa * xa;
            sum_b2 += xb * xb;
        }
        let corr = sum_ab / (sum_a2.sqrt() * sum_b2.sqrt());
        assert!(corr.abs() < 0.01, "cross-correlation {corr}");
    }

    #[test]
    fn sample_mean_vanishes() {
        let mut rng = RngStream::new(11);
        let spec = NoncircularGaussianSpec::new(1.0, c(0.9, 0.0)).unwrap();
        let t = 1_000_000usize;
        let mut sum = Complex64::ZERO;
        for _ in 0..t {
            sum += draw_noncircular(&spec, &mut rng);
        }
        let mean = sum / t as f64;
        let bound = 4.0 / (t as f64).sqrt();
        assert!(mean.norm() < bound, "mean {} exceeds {}", mean.norm(), bound);
    }

    #[test]
    fn circular_spec_has_vanishing_complementary_variance() {
        let mut rng = RngStream::new(21);
        let spec = NoncircularGaussianSpec::circular(1.0);
        let t = 1_000_000usize;
        let mut sum_sq = Complex64::ZERO;
        for _ in 0..t {
            let q = draw_noncircular(&spec, &mut rng);
            sum_sq += q * q;
        }
        let cvar = sum_sq / t as f64;
        assert!(cvar.norm() < 4.0 / (t as f64).sqrt());
    }

    #[test]
    fn noncircular_spec_hits_requested_complementary_variance() {
        let mut rng = RngStream::new(31);
        let spec = NoncircularGaussianSpec::new(1.0, c(0.9, 0.0)).unwrap();
        let t = 1_000_000usize;
        let mut sum_sq = Complex64::ZERO;
        let mut sum_abs = 0.0;
        for _ in 0..t {
            let q = draw_noncircular(&spec, &mut rng);
            sum_sq += q * q;
            sum_abs += q.norm_sqr();
        }
        let cvar = sum_sq / t as f64;
        assert!((cvar.re - 0.9).abs() < 0.013, "E[q²] = {cvar}");
        assert!(cvar.im.abs() < 0.013);
        assert!((sum_abs / t as f64 - 1.0).abs() < 0.01);
    }

    #[test]
    fn complex_complementary_variance_is_rotated() {
        let mut rng = RngStream::new(41);
        let target = Complex64::from_polar(0.8, 1.1);
        let spec = NoncircularGaussianSpec::new(1.0, target).unwrap();
        let t = 500_000usize;
        let mut sum_sq = Complex64::ZERO;
        for _ in 0..t {
            let q = draw_noncircular(&spec, &mut rng);
            sum_sq += q * q;
        }
        let cvar = sum_sq / t as f64;
        assert!((cvar - target).norm() < 0.02, "got {cvar}, want {target}");
    }

    #[test]
    fn maximally_noncircular_degenerates_to_real() {
        let mut rng = RngStream::new(51);
        let spec = NoncircularGaussianSpec::new(1.0, c(1.0, 0.0)).unwrap();
        for _ in 0..100 {
            let q = draw_noncircular(&spec, &mut rng);
            assert_eq!(q.im, 0.0);
        }
    }

    #[test]
    fn invalid_spec_is_rejected() {
        assert!(NoncircularGaussianSpec::new(1.0, c(1.1, 0.0)).is_err());
        assert!(NoncircularGaussianSpec::new(0.5, c(0.0, 0.6)).is_err());
    }

    #[test]
    fn ar_step_zero_history_passes_innovation() {
        let u = ar_step(Complex64::ZERO, 0.3, 0.1, c(1.0, 1.0));
        assert_eq!(u, c(1.0, 1.0));
    }

    #[test]
    fn ar_step_deterministic_part() {
        let u = ar_step(Complex64::ONE, 0.3, 0.1, Complex64::ZERO);
        assert!((u - c(0.4, 0.0)).norm() < 1e-15);
    }

    /// Iterates the augmented second-moment map of the AR recursion to its
    /// fixed point; serves as the stationarity oracle.
    pub(crate) fn stationary_moments_oracle(model: &ArModel) -> (f64, Complex64) {
        let (a, b) = (model.a, model.b);
        let sq = model.noise.variance;
        let csq = model.noise.complementary_variance;
        let mut c_mom = 0.0f64;
        let mut d_mom = Complex64::ZERO;
        for _ in 0..10_000 {
            let c_next = (a * a + b * b) * c_mom + 2.0 * a * b * d_mom.re + sq;
            let d_next = a * a * d_mom + b * b * d_mom.conj() + 2.0 * a * b * c_mom + csq;
            if (c_next - c_mom).abs() < 1e-15 && (d_next - d_mom).norm() < 1e-15 {
                c_mom = c_next;
                d_mom = d_next;
                break;
            }
            c_mom = c_next;
            d_mom = d_next;
        }
        (c_mom, d_mom)
    }

    #[test]
    fn ar_process_reaches_stationary_power() {
        let model = ArModel::default_noncircular();
        let (c_oracle, d_oracle) = stationary_moments_oracle(&model);
        let mut stream = ArStream::for_filter(model, RngStream::new(61), 8);
        let t = 1_000_000usize;
        let mut power = 0.0;
        let mut comp = Complex64::ZERO;
        for _ in 0..t {
            let u = stream.next_sample();
            power += u.norm_sqr();
            comp += u * u;
        }
        power /= t as f64;
        comp /= t as f64;
        assert!(
            (power - c_oracle).abs() < 0.02 * c_oracle,
            "power {power} vs oracle {c_oracle}"
        );
        assert!(
            (comp - d_oracle).norm() < 0.02 * c_oracle,
            "comp {comp} vs oracle {d_oracle}"
        );
    }

    #[test]
    fn regressor_window_is_newest_first() {
        let history = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let w = RegressorWindow::from_history(&history, 2).unwrap();
        assert_eq!(w.taps().as_slice(), &[c(3.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn regressor_window_rejects_short_history() {
        let history = [c(1.0, 0.0)];
        assert!(RegressorWindow::from_history(&history, 2).is_err());
    }

    #[test]
    fn augmented_vector_definition() {
        let w = RegressorWindow::from_taps(CVector::from_vec(vec![c(1.0, 1.0), c(2.0, 0.0)]));
        let z = w.augmented();
        assert_eq!(
            z.as_slice(),
            &[c(1.0, -1.0), c(2.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)]
        );
    }

    #[test]
    fn augmented_norm_doubles() {
        let mut rng = RngStream::new(71);
        for _ in 0..50 {
            let mut taps = CVector::zeros(5);
            for i in 0..5 {
                let (re, im) = rng.next_gaussian_pair();
                taps[i] = c(re, im);
            }
            let w = RegressorWindow::from_taps(taps.clone());
            let z = w.augmented();
            assert!((z.norm_sq() - 2.0 * taps.norm_sq()).abs() < 1e-12 * (1.0 + taps.norm_sq()));
        }
    }

    #[test]
    fn delay_line_matches_window_semantics() {
        let mut line = TappedDelayLine::new(3);
        for k in 1..=4 {
            line.push(c(k as f64, 0.0));
        }
        let w = line.window();
        assert_eq!(
            w.taps().as_slice(),
            &[c(4.0, 0.0), c(3.0, 0.0), c(2.0, 0.0)]
        );
    }

    #[test]
    fn plant_zero_weights_yields_pure_noise() {
        let mut rng = RngStream::new(81);
        let plant = PlantSpec::new(CVector::zeros(2), CVector::zeros(2), 1.0).unwrap();
        let u = RegressorWindow::from_taps(CVector::from_vec(vec![c(1.0, 2.0), c(-1.0, 0.0)]));
        let (d, upsilon) = plant_output(&u, &plant, &mut rng).unwrap();
        assert_eq!(d, upsilon);
    }

    #[test]
    fn plant_hand_computed_sample() {
        let mut rng = RngStream::new(91);
        let plant = PlantSpec::new(
            CVector::from_vec(vec![c(2.0, 0.0)]),
            CVector::from_vec(vec![c(0.0, 1.0)]),
            0.0,
        )
        .unwrap();
        let u = RegressorWindow::from_taps(CVector::from_vec(vec![c(1.0, 0.0)]));
        let (d, upsilon) = plant_output(&u, &plant, &mut rng).unwrap();
        assert_eq!(upsilon, Complex64::ZERO);
        assert!((d - c(2.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn plant_power_matches_augmented_quadratic_form() {
        // With zero noise, E|d|² = w°^H C_z w°; C_z estimated by sample
        // covariance over the same stream.
        let n = 3;
        let model = ArModel::default_noncircular();
        let mut rng = RngStream::new(101);
        let plant = PlantSpec::random(n, 0.0, &mut rng);
        let mut stream = ArStream::for_filter(model, RngStream::new(555), n);
        let mut line = TappedDelayLine::new(n);
        for _ in 0..n {
            line.push(stream.next_sample());
        }
        let t = 100_000usize;
        let mut power = 0.0;
        let mut cz = crate::algebra::CMatrix::zeros(2 * n, 2 * n);
        let mut noise_rng = RngStream::new(1);
        for _ in 0..t {
            let w = line.window();
            let (d, _) = plant_output(&w, &plant, &mut noise_rng).unwrap();
            power += d.norm_sqr();
            let z = w.augmented();
            for i in 0..2 * n {
                for j in 0..2 * n {
                    let upd = z[i] * z[j].conj();
                    cz[(i, j)] += upd;
                }
            }
            line.push(stream.next_sample());
        }
        power /= t as f64;
        let cz = cz.scale(c(1.0 / t as f64, 0.0));
        let w_opt = plant.stacked();
        let quad = w_opt.dot_h(&cz.matvec(&w_opt)).re;
        assert!(
            (power - quad).abs() < 0.02 * quad,
            "power {power} vs quadratic form {quad}"
        );
    }
}
