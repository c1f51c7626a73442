//! Direct numerical realization of the field-expectation toy model:
//! operator expectations over slit states and the regularized three-term
//! integral whose cross term has no classical field value.
//!
//! Position eigenstates at the slits are regularized into normalized 2-D
//! Gaussians of width `sigma`. With density N_i and amplitude
//! phi_i = sqrt(N_i) centered on slit i, the field expectation at r0 splits
//! into
//!
//! ```text
//! direct_i = A * (1/2) Int N_i(r)      * G M / |r0 - r|^2  d^2 r
//! cross    = A *       Int phi_1 phi_2 * G M / |r0 - r|^2  d^2 r
//! ```
//!
//! mirroring the two which-path terms and the interference term of the
//! barrier probability density. The normalization A is computed on the grid:
//! over the direct weights alone when the cross term is excluded, over
//! direct plus cross weights when it is included (the amplitude overlap
//! exp(-d^2 / 8 sigma^2) is exactly the extra weight the cross term
//! contributes).
//!
//! The module reports the cross term, never folds it into a classical field
//! value: its point is to exhibit the term's magnitude, and its divergence
//! when the regularization is removed at fixed resolution.

use crate::constants::GRAVITATIONAL_G;
use crate::error::{CoreError, Result};
use crate::exec;
use crate::geometry::Vec2;
use crate::gravity::SourceSpec;
use crate::quadrature::{pairwise_sum, trapezoid_2d, trapezoid_2d_estimated, QuadEstimate, UniformGrid};

/// Which-path expectation after reduction: (y1^2 + y2^2) / 2, the
/// interference-free value of a position-squared measurement.
pub fn welcher_weg_expectation(y1: f64, y2: f64) -> f64 {
    0.5 * (y1 * y1 + y2 * y2)
}

/// Born-rule integral of `f` against a probability density on a 2-D grid.
///
/// The density must integrate to 1 +- 1e-8 on the grid; the result carries a
/// Richardson error estimate from a half-resolution re-run.
pub fn born_integral<F, D>(
    gx: &UniformGrid,
    gy: &UniformGrid,
    f: F,
    density: D,
) -> Result<QuadEstimate>
where
    F: Fn(Vec2) -> f64,
    D: Fn(Vec2) -> f64,
{
    let norm = trapezoid_2d(gx, gy, |x, y| density(Vec2::new(x, y)));
    if (norm - 1.0).abs() > 1e-8 {
        return Err(CoreError::config(format!(
            "density integrates to {norm} on the grid, expected 1 +- 1e-8"
        )));
    }
    Ok(trapezoid_2d_estimated(gx, gy, |x, y| {
        let p = Vec2::new(x, y);
        f(p) * density(p)
    }))
}

/// Gaussian regularization replacing the slit delta functions.
#[derive(Debug, Clone, Copy)]
pub struct RegularizationScheme {
    /// Gaussian width replacing the delta functions (m).
    pub sigma: f64,
    /// Half-width of the square integration domain around the slit
    /// centroid (m); must cover at least 10 max(sigma, d).
    pub grid_extent: f64,
    /// Points per axis, at least 128.
    pub grid_points: usize,
    /// Include the interference cross term in the total and normalization.
    pub include_cross: bool,
}

impl RegularizationScheme {
    pub fn validate(&self, source: &SourceSpec) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(CoreError::config("regularization sigma must be > 0"));
        }
        if self.grid_points < 128 {
            return Err(CoreError::config("grid_points must be >= 128"));
        }
        let floor = 10.0 * self.sigma.max(source.separation());
        if self.grid_extent < floor {
            return Err(CoreError::config(format!(
                "grid_extent must be >= 10 max(sigma, d) = {floor:.3e}"
            )));
        }
        Ok(())
    }

    /// Defaults for a given source geometry.
    pub fn for_source(source: &SourceSpec) -> Self {
        let scale = source.slit_width.max(source.separation());
        RegularizationScheme {
            sigma: source.slit_width,
            grid_extent: 12.0 * scale,
            grid_points: 512,
            include_cross: true,
        }
    }
}

/// The three-term field expectation at one field point.
#[derive(Debug, Clone, Copy)]
pub struct FieldExpectation {
    pub term_direct_1: f64,
    pub term_direct_2: f64,
    pub term_cross: f64,
    /// term_direct_1 + term_direct_2 + term_cross.
    pub total: f64,
    /// Grid-refinement Richardson estimate below 1e-4 relative on every term.
    pub converged: bool,
    /// Normalization factor computed on the grid, not an input.
    pub normalization_a: f64,
    /// Largest per-term relative Richardson estimate.
    pub max_relative_error: f64,
}

/// Raw grid sums at one resolution: direct weights, cross weight, and the
/// corresponding field integrals.
#[derive(Debug, Clone, Copy, Default)]
struct SweepSums {
    w1: f64,
    w2: f64,
    wx: f64,
    g1: f64,
    g2: f64,
    gx: f64,
}

fn sweep_row(
    source: &SourceSpec,
    field_point: Vec2,
    sigma: f64,
    gx: &UniformGrid,
    gy: &UniformGrid,
    i: usize,
) -> [f64; 6] {
    let c1 = source.slit_point(0);
    let c2 = source.slit_point(1);
    let gm = GRAVITATIONAL_G * source.mass;
    let s2 = sigma * sigma;
    let density_norm = 1.0 / (std::f64::consts::TAU * s2);
    let x = gx.node(i);
    let wx_row = gx.weight(i);
    // The exact-node singularity guard: legitimate field points sit far
    // outside the Gaussian support, so a skipped node carries no weight.
    let skip2 = (1e-9 * gy.step()).powi(2);

    let mut cols: Vec<[f64; 6]> = Vec::with_capacity(gy.n);
    for j in 0..gy.n {
        let y = gy.node(j);
        let p = Vec2::new(x, y);
        let w = wx_row * gy.weight(j);
        let q1 = (p - c1).norm_squared() / (2.0 * s2);
        let q2 = (p - c2).norm_squared() / (2.0 * s2);
        let n1 = density_norm * (-q1).exp();
        let n2 = density_norm * (-q2).exp();
        let phi12 = density_norm * (-(q1 + q2) / 2.0).exp();
        let r2 = (field_point - p).norm_squared();
        let g = if r2 < skip2 { 0.0 } else { gm / r2 };
        cols.push([
            0.5 * n1 * w,
            0.5 * n2 * w,
            phi12 * w,
            0.5 * n1 * g * w,
            0.5 * n2 * g * w,
            phi12 * g * w,
        ]);
    }
    let mut out = [0.0; 6];
    let mut buf = vec![0.0; gy.n];
    for (k, slot) in out.iter_mut().enumerate() {
        for (j, col) in cols.iter().enumerate() {
            buf[j] = col[k];
        }
        *slot = pairwise_sum(&buf);
    }
    out
}

fn sweep<M>(source: &SourceSpec, field_point: Vec2, sigma: f64, n: usize, extent: f64, map: M) -> Result<SweepSums>
where
    M: Fn(usize, &(dyn Fn(usize) -> [f64; 6] + Sync)) -> Vec<[f64; 6]>,
{
    let c = source.centroid();
    let gx = UniformGrid::new(c.x - extent, c.x + extent, n)?;
    let gy = UniformGrid::new(c.y - extent, c.y + extent, n)?;
    let rows = map(n, &|i| sweep_row(source, field_point, sigma, &gx, &gy, i));
    let mut sums = SweepSums::default();
    let mut buf = vec![0.0; rows.len()];
    for (k, slot) in [
        &mut sums.w1,
        &mut sums.w2,
        &mut sums.wx,
        &mut sums.g1,
        &mut sums.g2,
        &mut sums.gx,
    ]
    .into_iter()
    .enumerate()
    {
        for (i, row) in rows.iter().enumerate() {
            buf[i] = row[k];
        }
        *slot = pairwise_sum(&buf);
    }
    Ok(sums)
}

fn assemble(sums: &SweepSums, include_cross: bool) -> (f64, f64, f64, f64) {
    let weight = if include_cross {
        sums.w1 + sums.w2 + sums.wx
    } else {
        sums.w1 + sums.w2
    };
    let a = 1.0 / weight;
    let d1 = a * sums.g1;
    let d2 = a * sums.g2;
    let cross = if include_cross { a * sums.gx } else { 0.0 };
    (a, d1, d2, cross)
}

fn expectation_impl<M>(
    source: &SourceSpec,
    field_point: Vec2,
    scheme: &RegularizationScheme,
    map: M,
) -> Result<FieldExpectation>
where
    M: Fn(usize, &(dyn Fn(usize) -> [f64; 6] + Sync)) -> Vec<[f64; 6]> + Copy,
{
    source.validate()?;
    scheme.validate(source)?;
    for i in 0..2 {
        let dist = (field_point - source.slit_point(i)).norm();
        if dist < 3.0 * scheme.sigma {
            return Err(CoreError::config(format!(
                "field point must sit at least 3 sigma = {:.3e} from both slit centers (got {dist:.3e})",
                3.0 * scheme.sigma
            )));
        }
    }

    let fine = sweep(source, field_point, scheme.sigma, scheme.grid_points, scheme.grid_extent, map)?;
    let coarse = sweep(
        source,
        field_point,
        scheme.sigma,
        (scheme.grid_points / 2).max(2),
        scheme.grid_extent,
        map,
    )?;

    let (a, d1, d2, cross) = assemble(&fine, scheme.include_cross);
    let (_, d1c, d2c, crossc) = assemble(&coarse, scheme.include_cross);
    let total = d1 + d2 + cross;

    // Per-term Richardson estimates; terms absolutely negligible against the
    // total are considered settled.
    let rel = |fine_t: f64, coarse_t: f64| -> f64 {
        let scale = fine_t.abs().max(1e-12 * total.abs());
        if scale == 0.0 {
            0.0
        } else {
            (fine_t - coarse_t).abs() / (3.0 * scale)
        }
    };
    let mut max_rel = rel(d1, d1c).max(rel(d2, d2c));
    if scheme.include_cross {
        max_rel = max_rel.max(rel(cross, crossc));
    }

    Ok(FieldExpectation {
        term_direct_1: d1,
        term_direct_2: d2,
        term_cross: cross,
        total,
        converged: max_rel < 1e-4,
        normalization_a: a,
        max_relative_error: max_rel,
    })
}

/// Evaluate the regularized three-term field expectation at `field_point`.
///
/// Convergence failure is reported through the `converged` flag, never
/// silently and never as an error: exhibiting non-convergence is part of
/// this model's purpose.
pub fn regularized_field_expectation(
    source: &SourceSpec,
    field_point: Vec2,
    scheme: &RegularizationScheme,
) -> Result<FieldExpectation> {
    expectation_impl(source, field_point, scheme, |n, f| exec::map_indexed(n, f))
}

/// Sequential twin of [`regularized_field_expectation`].
pub fn regularized_field_expectation_serial(
    source: &SourceSpec,
    field_point: Vec2,
    scheme: &RegularizationScheme,
) -> Result<FieldExpectation> {
    expectation_impl(source, field_point, scheme, |n, f| {
        exec::map_indexed_serial(n, f)
    })
}

/// Regime labels of the gravity road map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeLabel {
    Classical,
    Linearized,
    Semiclassical,
    QuantumGravityCorner,
    GqrCorner,
}

impl RegimeLabel {
    pub fn tag(self) -> &'static str {
        match self {
            RegimeLabel::Classical => "classical",
            RegimeLabel::Linearized => "linearized",
            RegimeLabel::Semiclassical => "semiclassical",
            RegimeLabel::QuantumGravityCorner => "quantum-gravity-corner",
            RegimeLabel::GqrCorner => "GQR-corner",
        }
    }
}

/// Threshold above which curvature counts as strong-field.
pub const CURVATURE_HIGH: f64 = 1.0;
/// Threshold above which source fluctuations dominate.
pub const FLUCTUATION_HIGH: f64 = 1.0;

/// Classify a parameter point of the road map.
///
/// With hbar off the theory is classical (weak field: linearized). With
/// hbar on, semiclassical gravity holds except in two corners: energies at
/// the curvature threshold (quantum-gravity corner) and large fluctuations
/// of the gravitational source at small curvature (GQR corner).
pub fn regime_classifier(
    curvature_r: f64,
    hbar_scale: f64,
    source_fluctuation: f64,
) -> Result<RegimeLabel> {
    for (name, v) in [
        ("curvature_R", curvature_r),
        ("hbar_scale", hbar_scale),
        ("source_fluctuation", source_fluctuation),
    ] {
        if !(v >= 0.0) {
            return Err(CoreError::config(format!("{name} must be >= 0, got {v}")));
        }
    }
    if hbar_scale == 0.0 {
        return Ok(if curvature_r > 0.0 && curvature_r < CURVATURE_HIGH {
            RegimeLabel::Linearized
        } else {
            RegimeLabel::Classical
        });
    }
    if curvature_r >= CURVATURE_HIGH {
        return Ok(RegimeLabel::QuantumGravityCorner);
    }
    if source_fluctuation >= FLUCTUATION_HIGH {
        return Ok(RegimeLabel::GqrCorner);
    }
    Ok(RegimeLabel::Semiclassical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ATOMIC_MASS_KG;
    use crate::gravity::point_field;

    fn source_with(d: f64, sigma: f64) -> SourceSpec {
        SourceSpec::new(1e9 * ATOMIC_MASS_KG, 1e-7, (-0.5 * d, 0.5 * d), sigma).unwrap()
    }

    fn scheme_for(source: &SourceSpec, sigma: f64, n: usize) -> RegularizationScheme {
        RegularizationScheme {
            sigma,
            grid_extent: 12.0 * sigma.max(source.separation()),
            grid_points: n,
            include_cross: true,
        }
    }

    #[test]
    fn welcher_weg_examples() {
        assert_eq!(welcher_weg_expectation(2.0, 2.0), 4.0);
        assert_eq!(welcher_weg_expectation(2.0, -2.0), 4.0);
        let v = welcher_weg_expectation(1e-7, 3e-7);
        assert!((v - 5e-14).abs() / 5e-14 < 1e-12);
    }

    #[test]
    fn born_integral_normalization_and_moments() {
        let g = UniformGrid::new(-8.0, 8.0, 257).unwrap();
        let density = |p: Vec2| (-(p.norm_squared()) / 2.0).exp() / std::f64::consts::TAU;

        let one = born_integral(&g, &g, |_| 1.0, density).unwrap();
        assert!((one.value - 1.0).abs() < 1e-8);

        let mean_x = born_integral(&g, &g, |p| p.x, density).unwrap();
        assert!(mean_x.value.abs() < 1e-8);

        let r2 = born_integral(&g, &g, |p| p.norm_squared(), density).unwrap();
        assert!((r2.value - 2.0).abs() < 1e-6, "got {}", r2.value);
    }

    #[test]
    fn born_integral_rejects_unnormalized_density() {
        let g = UniformGrid::new(-8.0, 8.0, 129).unwrap();
        let err = born_integral(&g, &g, |_| 1.0, |_| 0.3).unwrap_err();
        assert!(matches!(err, CoreError::Config(_)));
    }

    #[test]
    fn degenerate_slits_recover_point_mass_field() {
        // d -> 0: the cross term equals the direct sum and the total is the
        // point-mass field (up to O((sigma/r)^2) smearing).
        let sigma = 1e-8;
        let src = source_with(1e-17, sigma);
        let scheme = scheme_for(&src, sigma, 256);
        let r0 = Vec2::new(2000.0 * sigma, 0.0);
        let out = regularized_field_expectation(&src, r0, &scheme).unwrap();
        assert!(out.converged);

        let direct = out.term_direct_1 + out.term_direct_2;
        assert!(
            ((out.term_cross - direct) / direct).abs() < 1e-6,
            "cross {} vs direct sum {}",
            out.term_cross,
            direct
        );
        let point = point_field(src.mass, src.centroid(), r0).unwrap().norm();
        assert!(
            ((out.total - point) / point).abs() < 1e-6,
            "total {} vs point {}",
            out.total,
            point
        );
    }

    #[test]
    fn far_field_total_insensitive_to_scheme_sigma() {
        // Including the cross term, the normalized total reproduces the
        // point-mass magnitude regardless of sigma in [d/20, d/5].
        let d = 100e-9;
        for sigma in [d / 20.0, d / 10.0, d / 5.0] {
            let src = source_with(d, sigma);
            let scheme = scheme_for(&src, sigma, 512);
            let r0 = Vec2::new(100.0 * d, 0.0);
            let out = regularized_field_expectation(&src, r0, &scheme).unwrap();
            assert!(out.converged);
            let point = point_field(src.mass, src.centroid(), r0).unwrap().norm();
            let rel = ((out.total - point) / point).abs();
            assert!(rel < 1e-3, "sigma=d/{:.0}: rel {rel}", d / sigma);
        }
    }

    #[test]
    fn direct_terms_scheme_independent_without_cross() {
        let d = 100e-9;
        let r0 = Vec2::new(100.0 * d, 0.0);
        let mut values = Vec::new();
        for sigma in [d / 20.0, d / 5.0] {
            let src = source_with(d, sigma);
            let mut scheme = scheme_for(&src, sigma, 512);
            scheme.include_cross = false;
            let out = regularized_field_expectation(&src, r0, &scheme).unwrap();
            values.push((out.term_direct_1, out.term_direct_2));
        }
        let rel1 = ((values[0].0 - values[1].0) / values[0].0).abs();
        let rel2 = ((values[0].1 - values[1].1) / values[0].1).abs();
        assert!(rel1 < 1e-3 && rel2 < 1e-3, "sigma sweep moved direct terms: {rel1} {rel2}");
    }

    #[test]
    fn cross_term_overlap_suppressed() {
        let d = 100e-9;
        let sigma = d / 10.0;
        let src = source_with(d, sigma);
        let scheme = scheme_for(&src, sigma, 512);
        let out = regularized_field_expectation(&src, Vec2::new(3.0 * d, 0.0), &scheme).unwrap();
        let bound = (-d * d / (8.0 * sigma * sigma)).exp() * 10.0;
        let ratio = out.term_cross.abs() / (out.term_direct_1 + out.term_direct_2);
        assert!(ratio <= bound, "cross ratio {ratio} above bound {bound}");
        assert!(out.term_cross >= 0.0, "cross term negative on the axis");
    }

    #[test]
    fn reduction_consistency_with_collapsed_ensemble() {
        // Suppressing the cross term with half weights reproduces the
        // ensemble-averaged collapsed field magnitude.
        let d = 100e-9;
        let sigma = d / 20.0;
        let src = source_with(d, sigma);
        let mut scheme = scheme_for(&src, sigma, 512);
        scheme.include_cross = false;
        for r0 in [Vec2::new(120.0 * d, 0.0), Vec2::new(100.0 * d, 40.0 * d)] {
            let out = regularized_field_expectation(&src, r0, &scheme).unwrap();
            let ensemble = 0.5
                * (point_field(src.mass, src.slit_point(0), r0).unwrap().norm()
                    + point_field(src.mass, src.slit_point(1), r0).unwrap().norm());
            let rel = ((out.total - ensemble) / ensemble).abs();
            assert!(rel < 1e-6, "rel {rel} at ({}, {})", r0.x, r0.y);
        }
    }

    #[test]
    fn grid_doubling_stays_within_reported_estimate() {
        let d = 100e-9;
        let sigma = d / 3.0;
        let src = source_with(d, sigma);
        let scheme = scheme_for(&src, sigma, 256);
        let r0 = Vec2::new(3.0 * d, 0.0);
        let out = regularized_field_expectation(&src, r0, &scheme).unwrap();
        assert!(out.converged);

        let doubled = RegularizationScheme { grid_points: 512, ..scheme };
        let out2 = regularized_field_expectation(&src, r0, &doubled).unwrap();
        for (a, b) in [
            (out.term_direct_1, out2.term_direct_1),
            (out.term_direct_2, out2.term_direct_2),
            (out.term_cross, out2.term_cross),
        ] {
            assert!(((a - b) / b).abs() < 1e-4);
        }
    }

    #[test]
    fn serial_and_parallel_expectations_bitwise_equal() {
        let d = 100e-9;
        let sigma = d / 5.0;
        let src = source_with(d, sigma);
        let scheme = scheme_for(&src, sigma, 128);
        let r0 = Vec2::new(5.0 * d, d);
        let a = regularized_field_expectation(&src, r0, &scheme).unwrap();
        let b = regularized_field_expectation_serial(&src, r0, &scheme).unwrap();
        assert_eq!(a.total.to_bits(), b.total.to_bits());
        assert_eq!(a.term_cross.to_bits(), b.term_cross.to_bits());
    }

    #[test]
    fn field_point_inside_singular_neighborhood_rejected() {
        let sigma = 1e-8;
        let src = source_with(100e-9, sigma);
        let scheme = scheme_for(&src, sigma, 128);
        let err =
            regularized_field_expectation(&src, Vec2::new(0.0, 4e-8), &scheme).unwrap_err();
        assert!(matches!(err, CoreError::Config(_)));
    }

    #[test]
    fn regime_examples() {
        assert_eq!(regime_classifier(0.0, 0.0, 0.0).unwrap(), RegimeLabel::Classical);
        assert_eq!(
            regime_classifier(1e-30, 1.0, 10.0).unwrap(),
            RegimeLabel::GqrCorner
        );
        assert_eq!(
            regime_classifier(10.0, 1.0, 0.0).unwrap(),
            RegimeLabel::QuantumGravityCorner
        );
        assert_eq!(
            regime_classifier(0.5, 0.0, 0.0).unwrap(),
            RegimeLabel::Linearized
        );
        assert_eq!(
            regime_classifier(1e-3, 1.0, 1e-3).unwrap(),
            RegimeLabel::Semiclassical
        );
        assert!(regime_classifier(-1.0, 0.0, 0.0).is_err());
    }
}
