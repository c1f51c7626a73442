//! Matter-wave layer: cat-state preparation at the slits, barrier
//! probability with its interference cross term, far-field fringe patterns,
//! and which-path visibility under each gravity hypothesis.
//!
//! Slit modes are normalized Gaussian amplitudes of width sigma,
//!
//! ```text
//! phi_i(y) = (2 pi sigma^2)^(-1/4) exp(-(y - y_i)^2 / (4 sigma^2)),
//! ```
//!
//! replacing position eigenstates throughout; their overlap
//! <phi_1|phi_2> = exp(-d^2 / (8 sigma^2)) enters both the state
//! normalization and the cross-term suppression.
//!
//! The test particle acts as a which-path pointer: a minimum-uncertainty
//! Gaussian receiving a branch-dependent impulse. Its overlap
//!
//! ```text
//! V = exp(-dx^2/(8 sx^2) - dp^2/(8 sp^2)),   sp = hbar / (2 sx)
//! ```
//!
//! multiplies the bare fringe contrast.

use num_complex::Complex64;

use crate::constants::{GRAVITATIONAL_G, HBAR, PLANCK_H};
use crate::error::{CoreError, Result};
use crate::gravity::{GravityHypothesis, HypothesisKind, SourceSpec};
use crate::quadrature::pairwise_sum;
use crate::scattering::TestParticleSpec;

/// de Broglie wavelength lambda = h / (m v).
pub fn de_broglie_wavelength(mass: f64, speed: f64) -> Result<f64> {
    if !(mass > 0.0 && speed > 0.0) {
        return Err(CoreError::config(
            "de Broglie wavelength needs positive mass and speed",
        ));
    }
    Ok(PLANCK_H / (mass * speed))
}

/// Two-slit source state at the barrier plane.
///
/// Amplitudes are renormalized on construction so that
/// |a1|^2 + |a2|^2 + 2 Re(a1* a2) <phi_1|phi_2> = 1.
#[derive(Debug, Clone, Copy)]
pub struct SlitState {
    pub y1: f64,
    pub y2: f64,
    pub sigma: f64,
    pub amplitudes: (Complex64, Complex64),
}

impl SlitState {
    pub fn new(y1: f64, y2: f64, sigma: f64, amplitudes: (Complex64, Complex64)) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(CoreError::config("slit_width_sigma must be > 0"));
        }
        if y1 == y2 {
            return Err(CoreError::config("slit positions must be distinct"));
        }
        let overlap = mode_overlap(y1, y2, sigma);
        let (a1, a2) = amplitudes;
        let norm_sq = a1.norm_sqr() + a2.norm_sqr() + 2.0 * (a1.conj() * a2).re * overlap;
        if !(norm_sq > 0.0) {
            return Err(CoreError::config(
                "slit amplitudes normalize to zero (destructive degenerate state)",
            ));
        }
        let scale = norm_sq.sqrt();
        Ok(SlitState {
            y1,
            y2,
            sigma,
            amplitudes: (a1 / scale, a2 / scale),
        })
    }

    /// Equal-amplitude cat state over the source's slit positions.
    pub fn cat_state(source: &SourceSpec) -> Result<Self> {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        SlitState::new(
            source.slit_positions.0,
            source.slit_positions.1,
            source.slit_width,
            (a, a),
        )
    }

    pub fn separation(&self) -> f64 {
        (self.y2 - self.y1).abs()
    }

    /// Gaussian mode amplitude of slit `i` at `y`.
    pub fn mode(&self, i: usize, y: f64) -> f64 {
        let c = if i == 0 { self.y1 } else { self.y2 };
        let s2 = self.sigma * self.sigma;
        (std::f64::consts::TAU * s2).powf(-0.25) * (-(y - c) * (y - c) / (4.0 * s2)).exp()
    }
}

/// Overlap <phi_1|phi_2> of two Gaussian modes separated by |y2 - y1|.
pub fn mode_overlap(y1: f64, y2: f64, sigma: f64) -> f64 {
    let d = y2 - y1;
    (-d * d / (8.0 * sigma * sigma)).exp()
}

/// Probability density |a1 phi_1(y) + a2 phi_2(y)|^2 at the barrier plane.
pub fn barrier_probability(state: &SlitState, y: f64) -> f64 {
    let (a1, a2) = state.amplitudes;
    let psi = a1 * state.mode(0, y) + a2 * state.mode(1, y);
    psi.norm_sqr()
}

/// Transverse intensity profile at the screen.
#[derive(Debug, Clone)]
pub struct FringePattern {
    pub y_samples: Vec<f64>,
    /// Probability density (m^-1), trapezoid-normalized over the window.
    pub intensity: Vec<f64>,
    /// Model fringe contrast of the cosine modulation, in [0, 1].
    pub visibility: f64,
    /// lambda L / d.
    pub fringe_spacing: f64,
    /// d^2 / (lambda L); the Fraunhofer assumption needs this << 1.
    pub fresnel_number: f64,
    pub fraunhofer_valid: bool,
}

impl FringePattern {
    /// Contrast read off the sampled pattern over the central three fringes:
    /// (Imax - Imin) / (Imax + Imin). Envelope decay and sampling granularity
    /// bias this slightly below the model visibility.
    pub fn extremum_visibility(&self) -> f64 {
        let half_window = 1.5 * self.fringe_spacing;
        let mut imax = f64::MIN;
        let mut imin = f64::MAX;
        for (y, i) in self.y_samples.iter().zip(self.intensity.iter()) {
            if y.abs() <= half_window {
                imax = imax.max(*i);
                imin = imin.min(*i);
            }
        }
        if imax <= 0.0 {
            return 0.0;
        }
        (imax - imin) / (imax + imin)
    }

    /// Trapezoid integral of the stored density over the window.
    pub fn integral(&self) -> f64 {
        let h = self.y_samples[1] - self.y_samples[0];
        let terms: Vec<f64> = self
            .intensity
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let w = if i == 0 || i == self.intensity.len() - 1 { 0.5 } else { 1.0 };
                v * w * h
            })
            .collect();
        pairwise_sum(&terms)
    }
}

#[allow(clippy::too_many_arguments)]
fn build_pattern(
    sigma: f64,
    separation: f64,
    wavelength: f64,
    screen_distance: f64,
    visibility: f64,
    phase: f64,
    window: f64,
    n_samples: usize,
) -> Result<FringePattern> {
    if !(window > 0.0) {
        return Err(CoreError::config("pattern window must be > 0"));
    }
    if n_samples < 16 {
        return Err(CoreError::config("n_samples must be >= 16"));
    }
    let spacing = wavelength * screen_distance / separation;
    let fresnel = separation * separation / (wavelength * screen_distance);

    let n = n_samples;
    let h = window / (n - 1) as f64;
    let mut y_samples = Vec::with_capacity(n);
    let mut intensity = Vec::with_capacity(n);
    for i in 0..n {
        let y = -0.5 * window + h * i as f64;
        // Envelope: |FT of the Gaussian mode|^2.
        let ky = std::f64::consts::TAU * y / (wavelength * screen_distance);
        let envelope = (-2.0 * sigma * sigma * ky * ky).exp();
        let fringe = 1.0 + visibility * (std::f64::consts::TAU * y / spacing + phase).cos();
        y_samples.push(y);
        intensity.push(envelope * fringe);
    }
    // Normalize to unit probability over the window.
    let weights: Vec<f64> = intensity
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            v * w * h
        })
        .collect();
    let total = pairwise_sum(&weights);
    if !(total > 0.0) {
        return Err(CoreError::config("pattern integrates to zero on the window"));
    }
    for v in &mut intensity {
        *v /= total;
    }
    Ok(FringePattern {
        y_samples,
        intensity,
        visibility,
        fringe_spacing: spacing,
        fresnel_number: fresnel,
        fraunhofer_valid: fresnel <= 0.1,
    })
}

/// Fraunhofer two-slit pattern of `state` at screen distance L.
///
/// The identical mode shape at both slits factors exactly into a Gaussian
/// envelope times a cosine of contrast V0 = 2|a1||a2| / (|a1|^2 + |a2|^2)
/// with fringe spacing lambda L / d.
pub fn far_field_pattern(
    state: &SlitState,
    wavelength: f64,
    screen_distance: f64,
    window: Option<f64>,
    n_samples: usize,
) -> Result<FringePattern> {
    if !(wavelength > 0.0 && screen_distance > 0.0) {
        return Err(CoreError::config(
            "wavelength and screen distance must be > 0",
        ));
    }
    let (a1, a2) = state.amplitudes;
    let weight = a1.norm_sqr() + a2.norm_sqr();
    let v0 = 2.0 * a1.norm() * a2.norm() / weight;
    let phase = (a2 * a1.conj()).arg();
    let d = state.separation();
    let window = window.unwrap_or_else(|| default_window(state.sigma, d, wavelength, screen_distance));
    build_pattern(
        state.sigma,
        d,
        wavelength,
        screen_distance,
        v0,
        phase,
        window,
        n_samples,
    )
}

fn default_window(sigma: f64, separation: f64, wavelength: f64, screen_distance: f64) -> f64 {
    let spacing = wavelength * screen_distance / separation;
    let envelope_scale = wavelength * screen_distance / (std::f64::consts::TAU * sigma);
    8.0 * spacing.max(envelope_scale)
}

/// Minimum-uncertainty Gaussian pointer state of the test particle carrying
/// branch-dependent which-path records.
#[derive(Debug, Clone, Copy)]
pub struct BranchPointerState {
    /// Branch-dependent momentum-kick difference (kg m s^-1).
    pub delta_p: f64,
    /// Branch-dependent displacement difference (m).
    pub delta_x: f64,
    /// Wavepacket width (m).
    pub sigma_x: f64,
    /// hbar / (2 sigma_x), fixed by the minimum-uncertainty condition.
    pub sigma_p: f64,
}

impl BranchPointerState {
    pub fn new(delta_p: f64, delta_x: f64, sigma_x: f64) -> Result<Self> {
        if !(sigma_x > 0.0) {
            return Err(CoreError::config("pointer sigma_x must be > 0"));
        }
        if !delta_p.is_finite() || !delta_x.is_finite() {
            return Err(CoreError::config("pointer displacements must be finite"));
        }
        Ok(BranchPointerState {
            delta_p,
            delta_x,
            sigma_x,
            sigma_p: HBAR / (2.0 * sigma_x),
        })
    }
}

/// Overlap magnitude |<chi_1|chi_2>| of the two pointer branches.
pub fn which_path_visibility(pointer: &BranchPointerState) -> f64 {
    let dx = pointer.delta_x / pointer.sigma_x;
    let dp = pointer.delta_p / pointer.sigma_p;
    (-(dx * dx + dp * dp) / 8.0).exp()
}

/// Which-path distinguishability D = sqrt(1 - V^2).
pub fn distinguishability(visibility: f64) -> f64 {
    (1.0 - visibility * visibility).max(0.0).sqrt()
}

/// Screen-side optics of the source interferometer plus the pointer model
/// parameters of the test particle.
#[derive(Debug, Clone, Copy)]
pub struct OpticsSpec {
    /// de Broglie wavelength of the source (m).
    pub wavelength: f64,
    /// Barrier-to-screen distance L (m).
    pub screen_distance: f64,
    /// Sampling window width (m); derived from the geometry when absent.
    pub window: Option<f64>,
    pub n_samples: usize,
    /// Test-particle wavepacket width (m).
    pub pointer_sigma_x: f64,
    /// Effective interaction window tau (s); defaults to 2 b / v.
    pub interaction_window: Option<f64>,
}

impl OpticsSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0) {
            return Err(CoreError::config("wavelength must be > 0"));
        }
        if !(self.screen_distance > 0.0) {
            return Err(CoreError::config("screen_distance_L must be > 0"));
        }
        if !(self.pointer_sigma_x > 0.0) {
            return Err(CoreError::config("wavepacket_sigma_x must be > 0"));
        }
        Ok(())
    }
}

/// Source fringe pattern predicted under a gravity hypothesis, with the
/// model quantities that produced it.
#[derive(Debug, Clone)]
pub struct PredictedPattern {
    pub pattern: FringePattern,
    /// Contrast the source pattern would have with no coupling.
    pub uncoupled_visibility: f64,
    /// Which-path factor multiplying the contrast: pointer overlap for
    /// Superposed, exactly 1 for MeanField, exactly 0 for Collapsed.
    pub which_path_factor: f64,
    /// Pointer state behind the factor (Superposed only).
    pub pointer: Option<BranchPointerState>,
}

impl PredictedPattern {
    pub fn model_visibility(&self) -> f64 {
        self.pattern.visibility
    }
}

/// Predict the source fringe pattern under `hyp`.
///
/// * Superposed — the test particle records which-path information through
///   the branch-differential impulse; contrast is multiplied by the pointer
///   overlap.
/// * MeanField — the particle couples to the averaged field only, carries no
///   record, contrast unchanged.
/// * Collapsed — incoherent mixture, source contrast is exactly zero.
pub fn predicted_pattern(
    source: &SourceSpec,
    hyp: &GravityHypothesis,
    test: &TestParticleSpec,
    optics: &OpticsSpec,
) -> Result<PredictedPattern> {
    source.validate()?;
    test.validate()?;
    optics.validate()?;
    let state = SlitState::cat_state(source)?;
    let uncoupled = far_field_pattern(
        &state,
        optics.wavelength,
        optics.screen_distance,
        optics.window,
        optics.n_samples,
    )?;
    let v0 = uncoupled.visibility;

    let (factor, pointer) = match hyp.kind {
        HypothesisKind::MeanField => (1.0, None),
        HypothesisKind::Collapsed => (0.0, None),
        HypothesisKind::Superposed => {
            let pointer = superposed_pointer(source, test, optics)?;
            (which_path_visibility(&pointer), Some(pointer))
        }
    };

    let pattern = build_pattern(
        state.sigma,
        state.separation(),
        optics.wavelength,
        optics.screen_distance,
        v0 * factor,
        0.0,
        optics
            .window
            .unwrap_or_else(|| default_window(state.sigma, state.separation(), optics.wavelength, optics.screen_distance)),
        optics.n_samples,
    )?;

    Ok(PredictedPattern {
        pattern,
        uncoupled_visibility: v0,
        which_path_factor: factor,
        pointer,
    })
}

/// Pointer state of the test particle for the Superposed hypothesis, built
/// from the per-branch straight-line impulse.
///
/// The approach line runs at y = y_centroid - b; each branch kicks with
/// delta_p_i = 2 G M m_t / (|b_i| v), and the displacement record over the
/// interaction window tau is delta_x = delta_p tau / (2 m_t).
pub fn superposed_pointer(
    source: &SourceSpec,
    test: &TestParticleSpec,
    optics: &OpticsSpec,
) -> Result<BranchPointerState> {
    let line_y = source.centroid().y - test.impact_parameter;
    let b1 = (line_y - source.slit_positions.0).abs();
    let b2 = (line_y - source.slit_positions.1).abs();
    if b1 == 0.0 || b2 == 0.0 {
        return Err(CoreError::Singularity(
            "approach line passes exactly through a slit position".into(),
        ));
    }
    let kick = |b: f64| 2.0 * GRAVITATIONAL_G * source.mass * test.mass / (b * test.speed);
    let delta_p = (kick(b1) - kick(b2)).abs();
    let tau = optics
        .interaction_window
        .unwrap_or(2.0 * test.impact_parameter / test.speed);
    let delta_x = delta_p * tau / (2.0 * test.mass);
    BranchPointerState::new(delta_p, delta_x, optics.pointer_sigma_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ATOMIC_MASS_KG;
    use proptest::prelude::*;

    fn equal_state(d: f64, sigma: f64) -> SlitState {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        SlitState::new(-0.5 * d, 0.5 * d, sigma, (a, a)).unwrap()
    }

    /// Composite Simpson rule, the quadrature oracle for overlap integrals.
    fn simpson(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
        let n = if n.is_multiple_of(2) { n } else { n + 1 };
        let h = (hi - lo) / n as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + h * i as f64);
        }
        acc * h / 3.0
    }

    #[test]
    fn de_broglie_frozen_oracle() {
        let lambda = de_broglie_wavelength(1.660_539_066_60e-21, 1.0).unwrap();
        let expected = 3.990_312_714_272_397_7e-13;
        assert!((lambda - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn de_broglie_scalings() {
        let l1 = de_broglie_wavelength(1e-21, 1.0).unwrap();
        let l2 = de_broglie_wavelength(2e-21, 1.0).unwrap();
        assert_eq!(l1, 2.0 * l2);
        // m v = h gives lambda = 1 m.
        let lambda = de_broglie_wavelength(PLANCK_H, 1.0).unwrap();
        assert_eq!(lambda, 1.0);
    }

    #[test]
    fn state_normalization_includes_overlap() {
        // d/sigma = 1: overlap is large and must enter the norm.
        let st = equal_state(1e-8, 1e-8);
        let (a1, a2) = st.amplitudes;
        let s = mode_overlap(st.y1, st.y2, st.sigma);
        let norm = a1.norm_sqr() + a2.norm_sqr() + 2.0 * (a1.conj() * a2).re * s;
        assert!((norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn barrier_density_integrates_to_one() {
        for (d, sigma) in [(1e-7, 1e-8), (3e-8, 1e-8), (1e-8, 1e-8)] {
            let st = equal_state(d, sigma);
            let integral = simpson(-1e-6, 1e-6, 4000, |y| barrier_probability(&st, y));
            assert!(
                (integral - 1.0).abs() < 1e-10,
                "d={d} sigma={sigma}: integral {integral}"
            );
        }
    }

    #[test]
    fn single_slit_is_unit_gaussian_density() {
        let st = SlitState::new(
            -5e-8,
            5e-8,
            1e-8,
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        )
        .unwrap();
        let integral = simpson(-1e-6, 1e-6, 4000, |y| barrier_probability(&st, y));
        assert!((integral - 1.0).abs() < 1e-10);
        // Peaked at the live slit, negligible at the dead one.
        assert!(barrier_probability(&st, -5e-8) > 1e3 * barrier_probability(&st, 5e-8));
    }

    #[test]
    fn barrier_density_mirror_symmetric() {
        let st = equal_state(1e-7, 1e-8);
        for y in [1e-8, 3e-8, 7e-8] {
            let a = barrier_probability(&st, y);
            let b = barrier_probability(&st, -y);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
        }
    }

    #[test]
    fn cross_term_at_midpoint_matches_quadrature_oracle() {
        // Implementation route: P - direct terms. Oracle route: numeric
        // overlap integral times the closed-form midpoint prefactor.
        for ratio in [1.0, 3.0, 10.0] {
            let sigma = 1e-8;
            let d = ratio * sigma;
            let st = equal_state(d, sigma);
            let (a1, a2) = st.amplitudes;
            let cross_impl = barrier_probability(&st, 0.0)
                - (a1.norm() * st.mode(0, 0.0)).powi(2)
                - (a2.norm() * st.mode(1, 0.0)).powi(2);
            let overlap_num = simpson(-40.0 * sigma - d, 40.0 * sigma + d, 20000, |y| {
                st.mode(0, y) * st.mode(1, y)
            });
            let prefactor = (std::f64::consts::TAU * sigma * sigma).sqrt().recip();
            let cross_oracle = 2.0 * (a1.conj() * a2).re * prefactor * overlap_num;
            let rel = ((cross_impl - cross_oracle) / cross_oracle).abs();
            assert!(rel < 1e-8, "d/sigma={ratio}: rel err {rel}");
        }
    }

    #[test]
    fn fringe_spacing_frozen_oracle() {
        let st = equal_state(1e-7, 1e-9);
        let p = far_field_pattern(&st, 3.990_312_714_272_397_7e-13, 1.0, None, 1024).unwrap();
        let expected = 3.990_312_714_272_398e-6;
        assert!((p.fringe_spacing - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn dead_slit_kills_visibility() {
        let st = SlitState::new(
            -5e-8,
            5e-8,
            1e-9,
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        )
        .unwrap();
        let p = far_field_pattern(&st, 4e-13, 1.0, None, 1024).unwrap();
        assert_eq!(p.visibility, 0.0);
    }

    #[test]
    fn extraction_approaches_unit_visibility_for_flat_envelope() {
        // d/sigma = 100 keeps the envelope flat over the central fringes;
        // remaining bias is sampling granularity plus envelope curvature.
        let sigma = 1e-9;
        let st = equal_state(100.0 * sigma, sigma);
        let lambda = 4e-13;
        let spacing = lambda * 1.0 / (100.0 * sigma);
        let p = far_field_pattern(&st, lambda, 1.0, Some(4.0 * spacing), 4096).unwrap();
        let v = p.extremum_visibility();
        assert!(v > 1.0 - 1e-3, "extracted visibility {v}");
        assert!(v <= 1.0);
    }

    #[test]
    fn fraunhofer_validity_flag() {
        let st = equal_state(1e-7, 1e-8);
        // d^2/(lambda L) = 0.025 at L = 1 m: valid.
        let near = far_field_pattern(&st, 4e-13, 1.0, None, 1024).unwrap();
        assert!(near.fraunhofer_valid);
        // Shrinking L by 1000x pushes the fresnel number to 25: flagged.
        let close = far_field_pattern(&st, 4e-13, 1e-3, None, 1024).unwrap();
        assert!(!close.fraunhofer_valid);
        assert!(close.fresnel_number > 0.1);
    }

    #[test]
    fn pattern_normalized_on_window() {
        let st = equal_state(1e-7, 1e-8);
        let p = far_field_pattern(&st, 4e-13, 1.0, None, 2048).unwrap();
        assert!((p.integral() - 1.0).abs() < 1e-8);
        assert!(p.intensity.iter().all(|&i| i >= 0.0));
    }

    #[test]
    fn small_sample_count_rejected() {
        let st = equal_state(1e-7, 1e-8);
        assert!(far_field_pattern(&st, 4e-13, 1.0, None, 8).is_err());
        assert!(far_field_pattern(&st, 4e-13, 1.0, Some(-1.0), 1024).is_err());
    }

    #[test]
    fn which_path_identity_and_e_fold() {
        let p = BranchPointerState::new(0.0, 0.0, 1e-9).unwrap();
        assert_eq!(which_path_visibility(&p), 1.0);

        let sp = HBAR / (2e-9);
        let p = BranchPointerState::new(2.0 * std::f64::consts::SQRT_2 * sp, 0.0, 1e-9).unwrap();
        let v = which_path_visibility(&p);
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn which_path_oracle_overlap_integral() {
        // Numeric overlap of two displaced minimum-uncertainty Gaussians
        // against the closed form.
        let sigma_x = 1e-9;
        let dp = 0.7 * HBAR / (2.0 * sigma_x);
        let dx = 0.3 * sigma_x;
        let pointer = BranchPointerState::new(dp, dx, sigma_x).unwrap();

        let norm = (std::f64::consts::TAU * sigma_x * sigma_x).powf(-0.25);
        let lim = 12.0 * sigma_x;
        let re = simpson(-lim, lim, 20000, |x| {
            let g1 = norm * (-(x + 0.5 * dx).powi(2) / (4.0 * sigma_x * sigma_x)).exp();
            let g2 = norm * (-(x - 0.5 * dx).powi(2) / (4.0 * sigma_x * sigma_x)).exp();
            g1 * g2 * (dp * x / HBAR).cos()
        });
        let im = simpson(-lim, lim, 20000, |x| {
            let g1 = norm * (-(x + 0.5 * dx).powi(2) / (4.0 * sigma_x * sigma_x)).exp();
            let g2 = norm * (-(x - 0.5 * dx).powi(2) / (4.0 * sigma_x * sigma_x)).exp();
            g1 * g2 * (dp * x / HBAR).sin()
        });
        let overlap = (re * re + im * im).sqrt();
        let v = which_path_visibility(&pointer);
        assert!((overlap - v).abs() / v < 1e-10, "oracle {overlap} vs model {v}");
    }

    fn experiment() -> (SourceSpec, TestParticleSpec, OpticsSpec) {
        let source =
            SourceSpec::new(1e9 * ATOMIC_MASS_KG, 1e-7, (-50e-9, 50e-9), 10e-9).unwrap();
        let test = TestParticleSpec::new(1e7 * ATOMIC_MASS_KG, 1e-3, 1e-6).unwrap();
        let optics = OpticsSpec {
            wavelength: 4e-13,
            screen_distance: 1.0,
            window: None,
            n_samples: 1024,
            pointer_sigma_x: 1e-9,
            interaction_window: None,
        };
        (source, test, optics)
    }

    #[test]
    fn hypothesis_visibility_wiring() {
        let (source, test, optics) = experiment();
        let mean = predicted_pattern(
            &source,
            &GravityHypothesis::new(HypothesisKind::MeanField, 0),
            &test,
            &optics,
        )
        .unwrap();
        assert_eq!(mean.which_path_factor, 1.0);
        assert_eq!(mean.pattern.visibility, mean.uncoupled_visibility);

        let collapsed = predicted_pattern(
            &source,
            &GravityHypothesis::new(HypothesisKind::Collapsed, 0),
            &test,
            &optics,
        )
        .unwrap();
        assert_eq!(collapsed.pattern.visibility, 0.0);

        let sup = predicted_pattern(
            &source,
            &GravityHypothesis::new(HypothesisKind::Superposed, 0),
            &test,
            &optics,
        )
        .unwrap();
        let wp = which_path_visibility(&sup.pointer.unwrap());
        let expect = wp * sup.uncoupled_visibility;
        assert!((sup.pattern.visibility - expect).abs() <= 1e-10 * expect.max(1e-300));
    }

    #[test]
    fn superposed_with_vanishing_mass_recovers_uncoupled() {
        let (mut source, test, optics) = experiment();
        source.mass = 1e-60; // effectively uncoupled, still > 0
        let sup = predicted_pattern(
            &source,
            &GravityHypothesis::new(HypothesisKind::Superposed, 0),
            &test,
            &optics,
        )
        .unwrap();
        assert!((sup.which_path_factor - 1.0).abs() < 1e-12);
        assert!((sup.pattern.visibility - sup.uncoupled_visibility).abs() < 1e-12);
    }

    #[test]
    fn superposed_pointer_matches_impulse_arithmetic() {
        // With a zero-length interaction window the visibility reduces to
        // the pure momentum form exp(-dp^2 / (8 sp^2)).
        let (source, test, mut optics) = experiment();
        optics.interaction_window = Some(0.0);
        let pointer = superposed_pointer(&source, &test, &optics).unwrap();
        let b1 = 1e-6 - 50e-9;
        let b2 = 1e-6 + 50e-9;
        let dp_oracle = 2.0 * GRAVITATIONAL_G * source.mass * test.mass / test.speed
            * (1.0 / b1 - 1.0 / b2);
        assert!((pointer.delta_p - dp_oracle).abs() / dp_oracle < 1e-12);
        assert_eq!(pointer.delta_x, 0.0);
        let v = which_path_visibility(&pointer);
        let sp = HBAR / (2.0 * optics.pointer_sigma_x);
        let expect = (-(dp_oracle / sp).powi(2) / 8.0).exp();
        assert!((v - expect).abs() <= 1e-12);
    }

    proptest! {
        #[test]
        fn visibility_in_unit_interval_and_monotone(
            dp1 in 0.0f64..5.0,
            dp2 in 0.0f64..5.0,
            dx in 0.0f64..5.0,
        ) {
            let sigma_x = 1e-9;
            let sp = HBAR / (2.0 * sigma_x);
            let lo = dp1.min(dp2);
            let hi = dp1.max(dp2);
            let v_lo = which_path_visibility(
                &BranchPointerState::new(lo * sp, dx * sigma_x, sigma_x).unwrap(),
            );
            let v_hi = which_path_visibility(
                &BranchPointerState::new(hi * sp, dx * sigma_x, sigma_x).unwrap(),
            );
            prop_assert!((0.0..=1.0).contains(&v_lo));
            prop_assert!(v_hi <= v_lo);
        }

        #[test]
        fn complementarity_identity(dp in 0.0f64..30.0, dx in 0.0f64..30.0) {
            let sigma_x = 1e-9;
            let sp = HBAR / (2.0 * sigma_x);
            let v = which_path_visibility(
                &BranchPointerState::new(dp * sp, dx * sigma_x, sigma_x).unwrap(),
            );
            let d = distinguishability(v);
            prop_assert!((v * v + d * d - 1.0).abs() < 1e-12);
        }

        #[test]
        fn random_patterns_normalize(
            dexp in -8.0f64..-6.0,
            sig_ratio in 0.05f64..0.3,
            lexp in -0.5f64..0.5,
        ) {
            let d = 10f64.powf(dexp);
            let sigma = sig_ratio * d;
            let st = equal_state(d, sigma);
            let lambda = 4e-13;
            let p = far_field_pattern(&st, lambda, 10f64.powf(lexp), None, 1024).unwrap();
            prop_assert!((p.integral() - 1.0).abs() < 1e-8);
            let expected = lambda * 10f64.powf(lexp) / d;
            prop_assert!((p.fringe_spacing - expected).abs() / expected < 1e-12);
        }
    }
}
