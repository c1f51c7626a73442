//! Casimir-Polder competing acceleration bound and the mass x
//! impact-parameter feasibility scans.
//!
//! The bound is the ideal-conductor proximity-force-approximation
//! sphere-plane force
//!
//! ```text
//! F(R, d) = eta * pi^3 hbar c R / (360 d^3)
//! ```
//!
//! used as an upper envelope on the real Casimir-Polder force; `eta` in
//! (0, 1] derates it for material response and shielding. Gravitational
//! acceleration depends only on the source mass M, while the Casimir-type
//! acceleration F/m_t depends on the test mass, so a feasible window opens
//! at large M / m_t.

use crate::constants::{GRAVITATIONAL_G, HBAR, SPEED_OF_LIGHT};
use crate::error::{CoreError, Result};
use crate::exec;
use crate::scattering::TestParticleSpec;

/// Sphere-plane Casimir bound parameters.
#[derive(Debug, Clone, Copy)]
pub struct CasimirModel {
    /// Derating of the ideal-conductor bound, in (0, 1].
    pub eta: f64,
    /// Material density (kg m^-3) used to derive a sphere radius from a
    /// mass when no explicit radius is given. Default is fused-silica-like.
    pub material_density: f64,
}

impl Default for CasimirModel {
    fn default() -> Self {
        CasimirModel { eta: 1.0, material_density: 2200.0 }
    }
}

impl CasimirModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(CoreError::config("eta must lie in (0, 1]"));
        }
        if !(self.material_density > 0.0) {
            return Err(CoreError::config("material_density must be > 0"));
        }
        Ok(())
    }
}

/// Radius of a homogeneous sphere of the given mass and density.
pub fn sphere_radius_from_mass(mass: f64, density: f64) -> f64 {
    (3.0 * mass / (4.0 * std::f64::consts::PI * density)).cbrt()
}

/// Ideal-conductor PFA sphere-plane Casimir force, derated by `eta`.
pub fn casimir_force_sphere_plane(radius: f64, distance: f64, eta: f64) -> f64 {
    let pi3 = std::f64::consts::PI.powi(3);
    eta * pi3 * HBAR * SPEED_OF_LIGHT * radius / (360.0 * distance.powi(3))
}

/// Competing accelerations at separation `d`: gravitational pull of the
/// source mass versus the Casimir bound acting on the test mass.
pub fn accel_pair(
    source_mass: f64,
    test_mass: f64,
    radius: f64,
    distance: f64,
    model: &CasimirModel,
) -> (f64, f64) {
    let a_grav = GRAVITATIONAL_G * source_mass / (distance * distance);
    let a_casimir = casimir_force_sphere_plane(radius, distance, model.eta) / test_mass;
    (a_grav, a_casimir)
}

/// Log-spaced feasibility scan over (source mass, impact distance).
///
/// Matrices are row-major with mass as the row index.
#[derive(Debug, Clone)]
pub struct ScanGrid {
    pub mass_axis: Vec<f64>,
    pub distance_axis: Vec<f64>,
    pub grav_accel: Vec<f64>,
    pub casimir_accel: Vec<f64>,
    pub log10_ratio: Vec<f64>,
}

impl ScanGrid {
    pub fn index(&self, i_mass: usize, j_dist: usize) -> usize {
        i_mass * self.distance_axis.len() + j_dist
    }
}

/// `n` log-spaced points covering [lo, hi] inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) {
        return Err(CoreError::config(format!(
            "log axis needs 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(CoreError::config("log axis needs at least 2 points"));
    }
    let (llo, lhi) = (lo.log10(), hi.log10());
    let step = (lhi - llo) / (n - 1) as f64;
    Ok((0..n).map(|i| 10f64.powf(llo + step * i as f64)).collect())
}

fn scan_cell(
    mass_axis: &[f64],
    distance_axis: &[f64],
    test_mass: f64,
    model: &CasimirModel,
    cell: usize,
) -> (f64, f64, f64) {
    let nd = distance_axis.len();
    let m = mass_axis[cell / nd];
    let d = distance_axis[cell % nd];
    let radius = sphere_radius_from_mass(m, model.material_density);
    let (a_g, a_c) = accel_pair(m, test_mass, radius, d, model);
    (a_g, a_c, (a_g / a_c).log10())
}

fn assemble_scan(
    mass_axis: Vec<f64>,
    distance_axis: Vec<f64>,
    cells: Vec<(f64, f64, f64)>,
) -> ScanGrid {
    let mut grav = Vec::with_capacity(cells.len());
    let mut cas = Vec::with_capacity(cells.len());
    let mut ratio = Vec::with_capacity(cells.len());
    for (g, c, r) in cells {
        grav.push(g);
        cas.push(c);
        ratio.push(r);
    }
    ScanGrid {
        mass_axis,
        distance_axis,
        grav_accel: grav,
        casimir_accel: cas,
        log10_ratio: ratio,
    }
}

fn validate_scan_args(
    mass_range: (f64, f64),
    distance_range: (f64, f64),
    grid_dims: (usize, usize),
    test: &TestParticleSpec,
    model: &CasimirModel,
) -> Result<(Vec<f64>, Vec<f64>)> {
    test.validate()?;
    model.validate()?;
    if grid_dims.0 < 2 || grid_dims.1 < 2 {
        return Err(CoreError::config("grid dimensions must be >= 2 per axis"));
    }
    let mass_axis = log_space(mass_range.0, mass_range.1, grid_dims.0)?;
    let distance_axis = log_space(distance_range.0, distance_range.1, grid_dims.1)?;
    Ok((mass_axis, distance_axis))
}

/// Fill the feasibility grid. Cells are independent and assembled in index
/// order, so the result is identical at any thread count.
pub fn feasibility_scan(
    mass_range: (f64, f64),
    distance_range: (f64, f64),
    grid_dims: (usize, usize),
    test: &TestParticleSpec,
    model: &CasimirModel,
) -> Result<ScanGrid> {
    let (mass_axis, distance_axis) =
        validate_scan_args(mass_range, distance_range, grid_dims, test, model)?;
    let cells = exec::map_indexed(mass_axis.len() * distance_axis.len(), |c| {
        scan_cell(&mass_axis, &distance_axis, test.mass, model, c)
    });
    Ok(assemble_scan(mass_axis, distance_axis, cells))
}

/// Sequential twin of [`feasibility_scan`].
pub fn feasibility_scan_serial(
    mass_range: (f64, f64),
    distance_range: (f64, f64),
    grid_dims: (usize, usize),
    test: &TestParticleSpec,
    model: &CasimirModel,
) -> Result<ScanGrid> {
    let (mass_axis, distance_axis) =
        validate_scan_args(mass_range, distance_range, grid_dims, test, model)?;
    let cells = exec::map_indexed_serial(mass_axis.len() * distance_axis.len(), |c| {
        scan_cell(&mass_axis, &distance_axis, test.mass, model, c)
    });
    Ok(assemble_scan(mass_axis, distance_axis, cells))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionStatus {
    Ok,
    /// No grid cell satisfies the threshold; the mask is all false.
    NoFeasibleCell,
}

/// Feasible region of a scan at a given gravity/Casimir threshold ratio.
#[derive(Debug, Clone)]
pub struct FeasibleRegion {
    /// Row-major mask, true where a_grav >= threshold * a_casimir.
    pub mask: Vec<bool>,
    /// Boundary contour as (mass, distance) pairs, one crossing per mass row
    /// where present, log-linearly interpolated between cells.
    pub contour: Vec<(f64, f64)>,
    pub status: RegionStatus,
}

/// Threshold the scan and trace the feasibility boundary.
pub fn feasible_region(grid: &ScanGrid, threshold_ratio: f64) -> Result<FeasibleRegion> {
    if !(threshold_ratio > 0.0) {
        return Err(CoreError::config("threshold_ratio must be > 0"));
    }
    let log_thr = threshold_ratio.log10();
    let nd = grid.distance_axis.len();
    let mask: Vec<bool> = grid.log10_ratio.iter().map(|&r| r >= log_thr).collect();

    let mut contour = Vec::new();
    for i in 0..grid.mass_axis.len() {
        for j in 0..nd.saturating_sub(1) {
            let f0 = grid.log10_ratio[grid.index(i, j)] - log_thr;
            let f1 = grid.log10_ratio[grid.index(i, j + 1)] - log_thr;
            if f0 == 0.0 {
                contour.push((grid.mass_axis[i], grid.distance_axis[j]));
                break;
            }
            if f0 * f1 < 0.0 {
                // log10(ratio) is linear in log10(d), so interpolate there.
                let t = f0 / (f0 - f1);
                let ld0 = grid.distance_axis[j].log10();
                let ld1 = grid.distance_axis[j + 1].log10();
                let d = 10f64.powf(ld0 + t * (ld1 - ld0));
                contour.push((grid.mass_axis[i], d));
                break;
            }
        }
    }

    let status = if mask.iter().any(|&m| m) {
        RegionStatus::Ok
    } else {
        RegionStatus::NoFeasibleCell
    };
    Ok(FeasibleRegion { mask, contour, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ATOMIC_MASS_KG;

    fn test_particle() -> TestParticleSpec {
        TestParticleSpec::new(1e7 * ATOMIC_MASS_KG, 1e-3, 1e-6).unwrap()
    }

    #[test]
    fn force_matches_frozen_oracle() {
        // R = 0.1 um, d = 1 um, eta = 1.
        let f = casimir_force_sphere_plane(1e-7, 1e-6, 1.0);
        let expected = 2.722_977_051_978_165e-16;
        assert!((f - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn eta_derates_linearly() {
        let full = casimir_force_sphere_plane(1e-7, 1e-6, 1.0);
        let half = casimir_force_sphere_plane(1e-7, 1e-6, 0.5);
        assert_eq!(half, 0.5 * full);
    }

    #[test]
    fn doubling_distance_divides_by_eight() {
        let near = casimir_force_sphere_plane(1e-7, 1e-6, 1.0);
        let far = casimir_force_sphere_plane(1e-7, 2e-6, 1.0);
        assert!((near / far - 8.0).abs() < 1e-12);
    }

    #[test]
    fn grav_accel_independent_of_test_mass() {
        let model = CasimirModel::default();
        let (g1, c1) = accel_pair(1e-18, 1e-20, 1e-7, 1e-6, &model);
        let (g2, c2) = accel_pair(1e-18, 2e-20, 1e-7, 1e-6, &model);
        assert_eq!(g1, g2);
        assert_eq!(c2, 0.5 * c1);
    }

    #[test]
    fn grav_accel_matches_frozen_oracle() {
        let (g, _) = accel_pair(
            1e9 * ATOMIC_MASS_KG,
            1e-20,
            1e-7,
            1e-6,
            &CasimirModel::default(),
        );
        let expected = 1.108_293_589_220_837_8e-16;
        assert!((g - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn sphere_radius_inverts_sphere_mass() {
        let rho = 2200.0;
        let r: f64 = 1e-7;
        let m = 4.0 / 3.0 * std::f64::consts::PI * rho * r.powi(3);
        assert!((sphere_radius_from_mass(m, rho) - r).abs() / r < 1e-14);
    }

    #[test]
    fn scan_cells_reproduce_closed_forms() {
        let grid = feasibility_scan(
            (1e6 * ATOMIC_MASS_KG, 1e12 * ATOMIC_MASS_KG),
            (1e-7, 1e-4),
            (16, 16),
            &test_particle(),
            &CasimirModel::default(),
        )
        .unwrap();
        for i in [0, 7, 15] {
            for j in [0, 9, 15] {
                let idx = grid.index(i, j);
                let m = grid.mass_axis[i];
                let d = grid.distance_axis[j];
                let exact = GRAVITATIONAL_G * m / (d * d);
                assert_eq!(grid.grav_accel[idx], exact);
                let ratio = (grid.grav_accel[idx] / grid.casimir_accel[idx]).log10();
                assert!((grid.log10_ratio[idx] - ratio).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ratio_monotone_in_mass_and_distance() {
        let grid = feasibility_scan(
            (1e6 * ATOMIC_MASS_KG, 1e12 * ATOMIC_MASS_KG),
            (1e-7, 1e-4),
            (16, 16),
            &test_particle(),
            &CasimirModel::default(),
        )
        .unwrap();
        let nd = grid.distance_axis.len();
        for j in 0..nd {
            for i in 1..grid.mass_axis.len() {
                assert!(grid.log10_ratio[grid.index(i, j)] > grid.log10_ratio[grid.index(i - 1, j)]);
            }
        }
        for i in 0..grid.mass_axis.len() {
            for j in 1..nd {
                assert!(grid.log10_ratio[grid.index(i, j)] > grid.log10_ratio[grid.index(i, j - 1)]);
            }
        }
        // d^-2 gravity against d^-3 Casimir: the ratio climbs one decade per
        // decade of distance.
        for i in [0, 15] {
            for j in 1..nd - 1 {
                let slope = (grid.log10_ratio[grid.index(i, j + 1)]
                    - grid.log10_ratio[grid.index(i, j - 1)])
                    / (grid.distance_axis[j + 1].log10() - grid.distance_axis[j - 1].log10());
                assert!((slope - 1.0).abs() < 1e-6, "ratio slope {slope}");
            }
        }
    }

    #[test]
    fn serial_and_parallel_scans_are_bitwise_identical() {
        let args = (
            (1e6 * ATOMIC_MASS_KG, 1e12 * ATOMIC_MASS_KG),
            (1e-7, 1e-4),
            (32usize, 24usize),
        );
        let p = feasibility_scan(args.0, args.1, args.2, &test_particle(), &CasimirModel::default())
            .unwrap();
        let s = feasibility_scan_serial(
            args.0,
            args.1,
            args.2,
            &test_particle(),
            &CasimirModel::default(),
        )
        .unwrap();
        for (a, b) in p.log10_ratio.iter().zip(s.log10_ratio.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn threshold_extremes() {
        let grid = feasibility_scan(
            (1e6 * ATOMIC_MASS_KG, 1e12 * ATOMIC_MASS_KG),
            (1e-7, 1e-4),
            (8, 8),
            &test_particle(),
            &CasimirModel::default(),
        )
        .unwrap();
        let all = feasible_region(&grid, 1e-300).unwrap();
        assert!(all.mask.iter().all(|&m| m));
        let none = feasible_region(&grid, 1e300).unwrap();
        assert!(none.mask.iter().all(|&m| !m));
        assert_eq!(none.status, RegionStatus::NoFeasibleCell);
    }

    #[test]
    fn contour_points_satisfy_threshold_to_one_percent() {
        let model = CasimirModel::default();
        let test = test_particle();
        let grid = feasibility_scan(
            (1e6 * ATOMIC_MASS_KG, 1e12 * ATOMIC_MASS_KG),
            (1e-7, 1e-4),
            (32, 32),
            &test,
            &model,
        )
        .unwrap();
        let threshold = 1e-19;
        let region = feasible_region(&grid, threshold).unwrap();
        assert!(!region.contour.is_empty());
        for &(m, d) in &region.contour {
            let radius = sphere_radius_from_mass(m, model.material_density);
            let (a_g, a_c) = accel_pair(m, test.mass, radius, d, &model);
            assert!(
                (a_g / (threshold * a_c) - 1.0).abs() < 0.01,
                "contour point off threshold: {}",
                a_g / (threshold * a_c)
            );
        }
    }

    #[test]
    fn grid_refinement_moves_contour_less_than_one_coarse_cell() {
        let model = CasimirModel::default();
        let test = test_particle();
        let coarse = feasibility_scan(
            (1e6 * ATOMIC_MASS_KG, 1e12 * ATOMIC_MASS_KG),
            (1e-7, 1e-4),
            (17, 17),
            &test,
            &model,
        )
        .unwrap();
        let fine = feasibility_scan(
            (1e6 * ATOMIC_MASS_KG, 1e12 * ATOMIC_MASS_KG),
            (1e-7, 1e-4),
            (33, 33),
            &test,
            &model,
        )
        .unwrap();
        let rc = feasible_region(&coarse, 1e-19).unwrap();
        let rf = feasible_region(&fine, 1e-19).unwrap();
        // One coarse cell in log10(distance).
        let cell = (coarse.distance_axis[1].log10() - coarse.distance_axis[0].log10()).abs();
        for &(m, d) in &rc.contour {
            let nearest = rf
                .contour
                .iter()
                .min_by(|a, b| {
                    (a.0 - m).abs().partial_cmp(&(b.0 - m).abs()).unwrap()
                })
                .unwrap();
            let shift = (nearest.1.log10() - d.log10()).abs();
            assert!(shift < cell, "contour moved {shift} > {cell}");
        }
    }
}
