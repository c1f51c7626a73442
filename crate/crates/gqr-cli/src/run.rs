//! Experiment dispatch: run the configured experiment, write data artifacts
//! plus a JSON run manifest, and report a summary.

use std::path::Path;

use gqr_core::casimir::RegionStatus;
use gqr_core::gravity::HypothesisKind;
use gqr_core::interference::{predicted_pattern, PredictedPattern};
use gqr_core::scattering::{collapsed_shot_deflections, deflect_all_branches, ShotDeflection};
use gqr_core::stats::{dip_bimodality_threshold, dip_statistic};
use gqr_core::toymodel::{regime_classifier, regularized_field_expectation};

use crate::config::{ExperimentKind, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_f9, render_csv, write_atomic, Json};

type Result<T> = std::result::Result<T, CliError>;

/// Outcome summary mirrored into the manifest.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub experiment: ExperimentKind,
    pub outputs: Vec<String>,
    /// Convergence failures and validity warnings; never fatal.
    pub warnings: Vec<String>,
}

/// Execute the configured experiment into `out_dir`.
///
/// `threads` sizes the worker pool (`None` uses the build default, `Some(0)`
/// auto-detects); grids and shot batches are numerically identical at any
/// thread count by construction.
pub fn run(config: &RunConfig, out_dir: &Path, threads: Option<usize>) -> Result<RunSummary> {
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = threads {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
            return pool.install(|| run_inner(config, out_dir));
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
    }
    run_inner(config, out_dir)
}

fn run_inner(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    let mut outputs = Vec::new();
    let mut warnings = config.warnings.clone();

    let results = match config.experiment {
        ExperimentKind::Scatter => run_scatter(config, out_dir, &mut outputs, &mut warnings)?,
        ExperimentKind::Fringes => run_fringes(config, out_dir, &mut outputs, &mut warnings)?,
        ExperimentKind::Feasibility => run_feasibility(config, out_dir, &mut outputs)?,
        ExperimentKind::ToyModel => run_toymodel(config, out_dir, &mut outputs, &mut warnings)?,
        ExperimentKind::Regime => run_regime(config, out_dir, &mut outputs)?,
    };

    let manifest = manifest_json(config, &outputs, &warnings, results);
    write_atomic(out_dir, "manifest.json", manifest.render().as_bytes())?;
    outputs.push("manifest.json".into());

    Ok(RunSummary {
        experiment: config.experiment,
        outputs,
        warnings,
    })
}

fn run_scatter(
    config: &RunConfig,
    out_dir: &Path,
    outputs: &mut Vec<String>,
    warnings: &mut Vec<String>,
) -> Result<Json> {
    if config.hypothesis.kind == HypothesisKind::Collapsed && config.shots > 1 {
        let shots = collapsed_shot_deflections(
            &config.source,
            &config.hypothesis,
            &config.test,
            &config.numerics,
            config.shots,
        )?;
        return scatter_shot_artifacts(config, out_dir, outputs, &shots);
    }

    let outcome = deflect_all_branches(
        &config.source,
        &config.hypothesis,
        &config.test,
        &config.numerics,
    )?;

    let mut rows = Vec::new();
    let mut branch_json = Vec::new();
    for d in &outcome.deflections {
        let label = match d.branch {
            Some(0) => "slit1".to_string(),
            Some(1) => "slit2".to_string(),
            Some(i) => format!("slit{}", i + 1),
            None => "merged".to_string(),
        };
        rows.push(vec![
            label.clone(),
            fmt_f9(d.theta_signed),
            fmt_f9(d.theta_signed.abs()),
            fmt_f9(d.trajectory.energy_drift),
        ]);
        branch_json.push(Json::obj(vec![
            ("branch", Json::Str(label.clone())),
            ("theta_signed_rad", Json::Num(d.theta_signed)),
            ("theta_rad", Json::Num(d.theta_signed.abs())),
            ("energy_drift", Json::Num(d.trajectory.energy_drift)),
        ]));
        if d.trajectory.energy_drift > 1e-9 {
            warnings.push(format!(
                "energy drift {:.3e} above 1e-9 on branch {label}",
                d.trajectory.energy_drift
            ));
        }
        if config.output.export_trajectories {
            let name = format!("trajectory_{label}.csv");
            let traj_rows: Vec<Vec<String>> = d
                .trajectory
                .samples
                .iter()
                .map(|s| {
                    vec![
                        fmt_f9(s.t),
                        fmt_f9(s.position.x),
                        fmt_f9(s.position.y),
                        fmt_f9(s.velocity.x),
                        fmt_f9(s.velocity.y),
                    ]
                })
                .collect();
            let bytes = render_csv(&["t", "x", "y", "vx", "vy"], &traj_rows)?;
            write_atomic(out_dir, &name, &bytes)?;
            outputs.push(name);
        }
    }
    let bytes = render_csv(
        &["branch", "theta_signed_rad", "theta_rad", "energy_drift"],
        &rows,
    )?;
    write_atomic(out_dir, "scatter_deflections.csv", &bytes)?;
    outputs.push("scatter_deflections.csv".into());

    let result = outcome.deflection_result();
    Ok(Json::obj(vec![
        ("theta_rad", Json::Num(result.theta)),
        ("theta_prime_rad", Json::Num(result.theta_prime)),
        ("method", Json::Str("numeric".into())),
        (
            "sampled_branch",
            match outcome.sampled_branch {
                Some(i) => Json::UInt(i as u64),
                None => Json::Null,
            },
        ),
        ("branches", Json::Arr(branch_json)),
    ]))
}

fn scatter_shot_artifacts(
    config: &RunConfig,
    out_dir: &Path,
    outputs: &mut Vec<String>,
    shots: &[ShotDeflection],
) -> Result<Json> {
    let rows: Vec<Vec<String>> = shots
        .iter()
        .map(|s| {
            vec![
                s.shot.to_string(),
                (s.branch + 1).to_string(),
                fmt_f9(s.theta_signed),
            ]
        })
        .collect();
    let bytes = render_csv(&["shot", "branch", "theta_signed_rad"], &rows)?;
    write_atomic(out_dir, "scatter_shots.csv", &bytes)?;
    outputs.push("scatter_shots.csv".into());

    // Histogram over signed deflections.
    let thetas: Vec<f64> = shots.iter().map(|s| s.theta_signed).collect();
    let lo = thetas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = thetas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bins = config.output.histogram_bins;
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0u64; bins];
    for &t in &thetas {
        let idx = (((t - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let hist_rows: Vec<Vec<String>> = counts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                fmt_f9(lo + width * i as f64),
                fmt_f9(lo + width * (i + 1) as f64),
                c.to_string(),
            ]
        })
        .collect();
    let bytes = render_csv(&["bin_lo_rad", "bin_hi_rad", "count"], &hist_rows)?;
    write_atomic(out_dir, "scatter_histogram.csv", &bytes)?;
    outputs.push("scatter_histogram.csv".into());

    let dip = dip_statistic(&thetas);
    let branch1 = shots.iter().filter(|s| s.branch == 0).count();
    Ok(Json::obj(vec![
        ("shots", Json::UInt(shots.len() as u64)),
        ("branch1_count", Json::UInt(branch1 as u64)),
        ("dip_statistic", Json::Num(dip)),
        (
            "dip_threshold",
            Json::Num(dip_bimodality_threshold(shots.len())),
        ),
        (
            "bimodal",
            Json::Bool(dip > dip_bimodality_threshold(shots.len())),
        ),
    ]))
}

fn run_fringes(
    config: &RunConfig,
    out_dir: &Path,
    outputs: &mut Vec<String>,
    warnings: &mut Vec<String>,
) -> Result<Json> {
    let predicted: PredictedPattern = predicted_pattern(
        &config.source,
        &config.hypothesis,
        &config.test,
        &config.optics,
    )?;
    let pattern = &predicted.pattern;
    if !pattern.fraunhofer_valid {
        warnings.push(format!(
            "Fraunhofer validity marginal: fresnel number {:.3e}",
            pattern.fresnel_number
        ));
    }
    let rows: Vec<Vec<String>> = pattern
        .y_samples
        .iter()
        .zip(pattern.intensity.iter())
        .map(|(y, i)| vec![fmt_f9(*y), fmt_f9(*i)])
        .collect();
    let bytes = render_csv(&["y_m", "intensity_per_m"], &rows)?;
    write_atomic(out_dir, "fringes.csv", &bytes)?;
    outputs.push("fringes.csv".into());

    Ok(Json::obj(vec![
        ("hypothesis", Json::Str(config.hypothesis.kind.tag().into())),
        ("visibility", Json::Num(pattern.visibility)),
        (
            "uncoupled_visibility",
            Json::Num(predicted.uncoupled_visibility),
        ),
        ("which_path_factor", Json::Num(predicted.which_path_factor)),
        ("fringe_spacing_m", Json::Num(pattern.fringe_spacing)),
        ("fresnel_number", Json::Num(pattern.fresnel_number)),
        ("fraunhofer_valid", Json::Bool(pattern.fraunhofer_valid)),
        (
            "pointer_delta_p",
            predicted
                .pointer
                .map(|p| Json::Num(p.delta_p))
                .unwrap_or(Json::Null),
        ),
        (
            "pointer_delta_x",
            predicted
                .pointer
                .map(|p| Json::Num(p.delta_x))
                .unwrap_or(Json::Null),
        ),
    ]))
}

fn run_feasibility(config: &RunConfig, out_dir: &Path, outputs: &mut Vec<String>) -> Result<Json> {
    let f = &config.feasibility;
    let grid = gqr_core::casimir::feasibility_scan(
        f.mass_range,
        f.distance_range,
        f.grid_dims,
        &config.test,
        &f.model,
    )?;
    let region = gqr_core::casimir::feasible_region(&grid, f.threshold_ratio)?;

    // Long-format CSV: one row per cell.
    let mut rows = Vec::with_capacity(grid.mass_axis.len() * grid.distance_axis.len());
    for (i, m) in grid.mass_axis.iter().enumerate() {
        for (j, d) in grid.distance_axis.iter().enumerate() {
            let idx = grid.index(i, j);
            rows.push(vec![
                fmt_f9(*m),
                fmt_f9(*d),
                fmt_f9(grid.grav_accel[idx]),
                fmt_f9(grid.casimir_accel[idx]),
                fmt_f9(grid.log10_ratio[idx]),
            ]);
        }
    }
    let bytes = render_csv(
        &["mass_kg", "distance_m", "a_grav", "a_casimir", "log10_ratio"],
        &rows,
    )?;
    write_atomic(out_dir, "feasibility.csv", &bytes)?;
    outputs.push("feasibility.csv".into());

    // JSON grid: axes plus row-major matrices.
    let grid_json = Json::obj(vec![
        ("mass_axis_kg", Json::num_array(&grid.mass_axis)),
        ("distance_axis_m", Json::num_array(&grid.distance_axis)),
        ("grav_accel", Json::num_array(&grid.grav_accel)),
        ("casimir_accel", Json::num_array(&grid.casimir_accel)),
        ("log10_ratio", Json::num_array(&grid.log10_ratio)),
    ]);
    write_atomic(out_dir, "feasibility_grid.json", grid_json.render().as_bytes())?;
    outputs.push("feasibility_grid.json".into());

    // Boundary contour.
    let contour_rows: Vec<Vec<String>> = region
        .contour
        .iter()
        .map(|(m, d)| vec![fmt_f9(*m), fmt_f9(*d)])
        .collect();
    let bytes = render_csv(&["mass_kg", "distance_m"], &contour_rows)?;
    write_atomic(out_dir, "feasibility_contour.csv", &bytes)?;
    outputs.push("feasibility_contour.csv".into());

    if config.output.gnuplot {
        // Whitespace-separated matrix of log10(a_grav / a_casimir); rows are
        // mass cells, columns distance cells.
        let mut text = String::new();
        text.push_str("# log10(a_grav / a_casimir) matrix\n");
        text.push_str("# rows: mass axis (kg), columns: distance axis (m)\n");
        for (i, _) in grid.mass_axis.iter().enumerate() {
            let row: Vec<String> = grid
                .distance_axis
                .iter()
                .enumerate()
                .map(|(j, _)| fmt_f9(grid.log10_ratio[grid.index(i, j)]))
                .collect();
            text.push_str(&row.join(" "));
            text.push('\n');
        }
        write_atomic(out_dir, "feasibility_matrix.gp", text.as_bytes())?;
        outputs.push("feasibility_matrix.gp".into());
    }

    let feasible_cells = region.mask.iter().filter(|&&m| m).count();
    Ok(Json::obj(vec![
        (
            "status",
            Json::Str(
                match region.status {
                    RegionStatus::Ok => "ok",
                    RegionStatus::NoFeasibleCell => "no feasible cell",
                }
                .into(),
            ),
        ),
        ("feasible_cells", Json::UInt(feasible_cells as u64)),
        ("contour_points", Json::UInt(region.contour.len() as u64)),
        ("threshold_ratio", Json::Num(f.threshold_ratio)),
    ]))
}

fn run_toymodel(
    config: &RunConfig,
    out_dir: &Path,
    outputs: &mut Vec<String>,
    warnings: &mut Vec<String>,
) -> Result<Json> {
    let t = &config.toymodel;
    let out = regularized_field_expectation(&config.source, t.field_point, &t.scheme)?;
    if !out.converged {
        warnings.push(format!(
            "toy-model quadrature not converged: relative estimate {:.3e}",
            out.max_relative_error
        ));
    }
    let doc = Json::obj(vec![
        (
            "scheme",
            Json::obj(vec![
                ("sigma_m", Json::Num(t.scheme.sigma)),
                ("grid_extent_m", Json::Num(t.scheme.grid_extent)),
                ("grid_points", Json::UInt(t.scheme.grid_points as u64)),
                ("include_cross", Json::Bool(t.scheme.include_cross)),
            ]),
        ),
        (
            "field_point_m",
            Json::num_array(&[t.field_point.x, t.field_point.y]),
        ),
        ("term_direct_1", Json::Num(out.term_direct_1)),
        ("term_direct_2", Json::Num(out.term_direct_2)),
        ("term_cross", Json::Num(out.term_cross)),
        ("total", Json::Num(out.total)),
        ("normalization_A", Json::Num(out.normalization_a)),
        ("converged", Json::Bool(out.converged)),
        ("max_relative_error", Json::Num(out.max_relative_error)),
    ]);
    write_atomic(out_dir, "toymodel.json", doc.render().as_bytes())?;
    outputs.push("toymodel.json".into());

    Ok(Json::obj(vec![
        ("total", Json::Num(out.total)),
        ("term_cross", Json::Num(out.term_cross)),
        ("converged", Json::Bool(out.converged)),
    ]))
}

fn run_regime(config: &RunConfig, out_dir: &Path, outputs: &mut Vec<String>) -> Result<Json> {
    let r = config
        .regime
        .as_ref()
        .expect("regime config validated at parse time");
    let label = regime_classifier(r.curvature_r, r.hbar_scale, r.source_fluctuation)?;
    let doc = Json::obj(vec![
        ("curvature_R", Json::Num(r.curvature_r)),
        ("hbar_scale", Json::Num(r.hbar_scale)),
        ("source_fluctuation", Json::Num(r.source_fluctuation)),
        ("label", Json::Str(label.tag().into())),
    ]);
    write_atomic(out_dir, "regime.json", doc.render().as_bytes())?;
    outputs.push("regime.json".into());
    Ok(Json::obj(vec![("label", Json::Str(label.tag().into()))]))
}

fn manifest_json(
    config: &RunConfig,
    outputs: &[String],
    warnings: &[String],
    results: Json,
) -> Json {
    let source = &config.source;
    let test = &config.test;
    Json::obj(vec![
        (
            "tool",
            Json::obj(vec![
                ("name", Json::Str("gqr".into())),
                ("version", Json::Str(env!("CARGO_PKG_VERSION").into())),
            ]),
        ),
        ("experiment", Json::Str(config.experiment.tag().into())),
        ("seed", Json::UInt(config.hypothesis.rng_seed)),
        (
            "parameters",
            Json::obj(vec![
                (
                    "source",
                    Json::obj(vec![
                        ("mass_kg", Json::Num(source.mass)),
                        ("radius_m", Json::Num(source.radius)),
                        ("slit_y1_m", Json::Num(source.slit_positions.0)),
                        ("slit_y2_m", Json::Num(source.slit_positions.1)),
                        ("slit_width_sigma_m", Json::Num(source.slit_width)),
                    ]),
                ),
                (
                    "test",
                    Json::obj(vec![
                        ("mass_kg", Json::Num(test.mass)),
                        ("speed_m_per_s", Json::Num(test.speed)),
                        ("impact_parameter_m", Json::Num(test.impact_parameter)),
                        ("wavepacket_sigma_x_m", Json::Num(config.optics.pointer_sigma_x)),
                    ]),
                ),
                (
                    "hypothesis",
                    Json::obj(vec![
                        ("model", Json::Str(config.hypothesis.kind.tag().into())),
                        ("rng_seed", Json::UInt(config.hypothesis.rng_seed)),
                        ("shots", Json::UInt(config.shots)),
                    ]),
                ),
                (
                    "optics",
                    Json::obj(vec![
                        ("wavelength_m", Json::Num(config.optics.wavelength)),
                        ("screen_distance_m", Json::Num(config.optics.screen_distance)),
                        (
                            "window_m",
                            config
                                .optics
                                .window
                                .map(Json::Num)
                                .unwrap_or(Json::Null),
                        ),
                        ("n_samples", Json::UInt(config.optics.n_samples as u64)),
                        (
                            "interaction_window_s",
                            config
                                .optics
                                .interaction_window
                                .map(Json::Num)
                                .unwrap_or(Json::Null),
                        ),
                    ]),
                ),
                (
                    "numerics",
                    Json::obj(vec![
                        ("rel_tol", Json::Num(config.numerics.rel_tol)),
                        ("abs_tol", Json::Num(config.numerics.abs_tol)),
                        ("x_start_factor", Json::Num(config.numerics.x_start_factor)),
                        (
                            "t_span_s",
                            config.numerics.t_span.map(Json::Num).unwrap_or(Json::Null),
                        ),
                        ("max_steps", Json::UInt(config.numerics.max_steps as u64)),
                    ]),
                ),
                (
                    "feasibility",
                    Json::obj(vec![
                        ("mass_min_kg", Json::Num(config.feasibility.mass_range.0)),
                        ("mass_max_kg", Json::Num(config.feasibility.mass_range.1)),
                        ("distance_min_m", Json::Num(config.feasibility.distance_range.0)),
                        ("distance_max_m", Json::Num(config.feasibility.distance_range.1)),
                        ("grid_mass", Json::UInt(config.feasibility.grid_dims.0 as u64)),
                        ("grid_distance", Json::UInt(config.feasibility.grid_dims.1 as u64)),
                        ("threshold_ratio", Json::Num(config.feasibility.threshold_ratio)),
                        ("eta", Json::Num(config.feasibility.model.eta)),
                        (
                            "material_density_kg_per_m3",
                            Json::Num(config.feasibility.model.material_density),
                        ),
                    ]),
                ),
                (
                    "toymodel",
                    Json::obj(vec![
                        (
                            "field_point_m",
                            Json::num_array(&[
                                config.toymodel.field_point.x,
                                config.toymodel.field_point.y,
                            ]),
                        ),
                        ("sigma_m", Json::Num(config.toymodel.scheme.sigma)),
                        ("grid_extent_m", Json::Num(config.toymodel.scheme.grid_extent)),
                        (
                            "grid_points",
                            Json::UInt(config.toymodel.scheme.grid_points as u64),
                        ),
                        ("include_cross", Json::Bool(config.toymodel.scheme.include_cross)),
                    ]),
                ),
            ]),
        ),
        ("defaults_applied", Json::str_array(&config.defaults_applied)),
        ("warnings", Json::str_array(warnings)),
        ("results", results),
        ("outputs", Json::str_array(outputs)),
    ])
}
