//! Adaptive embedded Runge-Kutta integrator (Dormand-Prince 5(4) pair) for
//! planar point-mass gravity.
//!
//! State vector: [x, y, vx, vy]. The field is autonomous, so stages never
//! see the time variable. Error control is scale-aware: the caller supplies
//! characteristic position and velocity magnitudes, which matters here
//! because the deflection signal on the velocity components can sit fifteen
//! orders of magnitude below the approach speed.
//!
//! Termination is either at a fixed time or on exit through a given radius
//! while receding; the exit crossing is located to machine-level residual by
//! cubic-Hermite bisection inside the final step followed by Newton-polished
//! sub-steps.

use crate::error::{CoreError, Result};
use crate::geometry::Vec2;
use crate::quadrature::pairwise_sum;

/// Gravitating point source with premultiplied standard parameter G*m.
#[derive(Debug, Clone, Copy)]
pub struct PointSource {
    pub position: Vec2,
    pub gm: f64,
}

/// Characteristic magnitudes used in the error norm.
#[derive(Debug, Clone, Copy)]
pub struct ErrorScales {
    pub position: f64,
    pub velocity: f64,
    /// Characteristic time; sets the initial step and the underflow floor.
    pub time: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy)]
pub enum StopCondition {
    /// Integrate to exactly this time (may lie before the initial time).
    AtTime(f64),
    /// Stop when distance from `center` reaches `radius` while receding;
    /// `deadline` bounds the integration time.
    ExitRadius { center: Vec2, radius: f64, deadline: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub t: f64,
    pub position: Vec2,
    pub velocity: Vec2,
}

#[derive(Debug)]
pub struct Integration {
    pub final_state: Sample,
    /// Recorded accepted states including start and final, empty if not
    /// requested.
    pub samples: Vec<Sample>,
    /// max |E(t) - E(0)| / |E(0)| over all accepted states.
    pub energy_drift: f64,
    pub accepted_steps: usize,
}

// Dormand-Prince 5(4) tableau (autonomous field, so the stage times are
// never consulted).
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (the propagated solution; FSAL row).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Difference between fifth- and fourth-order weights (error estimator).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type StateVec = [f64; 4];

fn accel(sources: &[PointSource], p: Vec2) -> Vec2 {
    let mut a = Vec2::ZERO;
    for s in sources {
        let rel = s.position - p;
        let r2 = rel.norm_squared();
        // r2 == 0 yields infinities; the non-finite guard rejects the step.
        let r = r2.sqrt();
        a += rel * (s.gm / (r2 * r));
    }
    a
}

fn rhs(sources: &[PointSource], y: &StateVec) -> StateVec {
    let a = accel(sources, Vec2::new(y[0], y[1]));
    [y[2], y[3], a.x, a.y]
}

/// Specific energy of a state in the field of `sources`.
pub fn specific_energy(sources: &[PointSource], position: Vec2, velocity: Vec2) -> f64 {
    let kinetic = 0.5 * velocity.norm_squared();
    let potential: f64 = pairwise_sum(
        &sources
            .iter()
            .map(|s| -s.gm / (s.position - position).norm())
            .collect::<Vec<_>>(),
    );
    kinetic + potential
}

struct Stepper<'a> {
    sources: &'a [PointSource],
    control: StepControl,
    scales: ErrorScales,
}

impl<'a> Stepper<'a> {
    /// One Dormand-Prince step of size `h` from `y`; `k1` must hold f(y).
    /// Returns (y_new, k7 = f(y_new), error_norm).
    fn step(&self, y: &StateVec, k1: &StateVec, h: f64) -> (StateVec, StateVec, f64) {
        let mut k = [[0.0; 4]; 7];
        k[0] = *k1;
        for stage in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage - 1][j];
                if a != 0.0 {
                    for (slot, kv) in ys.iter_mut().zip(kj.iter()) {
                        *slot += h * a * kv;
                    }
                }
            }
            k[stage] = rhs(self.sources, &ys);
        }
        let mut y_new = *y;
        let mut err = [0.0; 4];
        for (j, kj) in k.iter().enumerate() {
            for i in 0..4 {
                if B5[j] != 0.0 {
                    y_new[i] += h * B5[j] * kj[i];
                }
                err[i] += h * E[j] * kj[i];
            }
        }
        let k7 = k[6];

        let mut norm_sq = 0.0;
        for i in 0..4 {
            let scale = if i < 2 { self.scales.position } else { self.scales.velocity };
            let sc = self.control.abs_tol
                + self.control.rel_tol * (scale + y[i].abs().max(y_new[i].abs()));
            let ratio = if err[i] == 0.0 {
                0.0
            } else if sc == 0.0 {
                f64::INFINITY
            } else {
                err[i] / sc
            };
            norm_sq += ratio * ratio;
        }
        (y_new, k7, (norm_sq / 4.0).sqrt())
    }
}

fn to_sample(t: f64, y: &StateVec) -> Sample {
    Sample {
        t,
        position: Vec2::new(y[0], y[1]),
        velocity: Vec2::new(y[2], y[3]),
    }
}

/// Cubic Hermite interpolation of the position within a step.
fn hermite_position(y0: &StateVec, y1: &StateVec, h: f64, tau: f64) -> Vec2 {
    let s = tau / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    let px = h00 * y0[0] + h10 * h * y0[2] + h01 * y1[0] + h11 * h * y1[2];
    let py = h00 * y0[1] + h10 * h * y0[3] + h01 * y1[1] + h11 * h * y1[3];
    Vec2::new(px, py)
}

/// Integrate the state through the field until `stop` fires.
pub fn integrate(
    sources: &[PointSource],
    start: Sample,
    stop: StopCondition,
    control: StepControl,
    scales: ErrorScales,
    record: bool,
) -> Result<Integration> {
    let stepper = Stepper { sources, control, scales };

    let (t_end, direction) = match stop {
        StopCondition::AtTime(tf) => (tf, if tf >= start.t { 1.0 } else { -1.0 }),
        StopCondition::ExitRadius { deadline, .. } => (deadline, 1.0),
    };
    if direction < 0.0 {
        if let StopCondition::ExitRadius { .. } = stop {
            return Err(CoreError::Integration(
                "exit-radius integration must run forward in time".into(),
            ));
        }
    }

    let mut y: StateVec = [start.position.x, start.position.y, start.velocity.x, start.velocity.y];
    let mut t = start.t;
    let mut k1 = rhs(sources, &y);
    let mut h = direction * 1e-3 * scales.time.abs().max(f64::MIN_POSITIVE);
    let h_floor = 1e3 * f64::EPSILON * scales.time.abs();

    let e0 = specific_energy(sources, start.position, start.velocity);
    let e_scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
    let mut drift: f64 = 0.0;

    let mut samples = Vec::new();
    if record {
        samples.push(start);
    }

    let mut accepted = 0usize;
    let mut total_attempts = 0usize;

    loop {
        if total_attempts >= control.max_steps {
            return Err(CoreError::Integration(format!(
                "exceeded {} steps before reaching the stop condition",
                control.max_steps
            )));
        }
        total_attempts += 1;

        // Clamp so a fixed-time run lands exactly on t_end.
        let mut clamped = false;
        if (t + h - t_end) * direction >= 0.0 {
            h = t_end - t;
            clamped = true;
        }
        if h.abs() < h_floor && !clamped {
            return Err(CoreError::Integration(
                "step size underflow (trajectory within numerical singularity)".into(),
            ));
        }

        let (y_new, k7, err) = stepper.step(&y, &k1, h);
        let finite = y_new.iter().all(|v| v.is_finite()) && err.is_finite();

        if !finite || err > 1.0 {
            // Reject: shrink and retry.
            let factor = if finite { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            h *= factor;
            continue;
        }

        let t_new = t + h;

        // Exit-radius event detection on the accepted step.
        if let StopCondition::ExitRadius { center, radius, .. } = stop {
            let pos_new = Vec2::new(y_new[0], y_new[1]);
            let vel_new = Vec2::new(y_new[2], y_new[3]);
            let receding = (pos_new - center).dot(vel_new) > 0.0;
            if receding && (pos_new - center).norm() >= radius {
                let final_state =
                    locate_exit(&stepper, &y, &y_new, t, h, center, radius, scales)?;
                let e = specific_energy(sources, final_state.position, final_state.velocity);
                drift = drift.max((e - e0).abs() / e_scale);
                if record {
                    samples.push(final_state);
                }
                return Ok(Integration {
                    final_state,
                    samples,
                    energy_drift: drift,
                    accepted_steps: accepted + 1,
                });
            }
        }

        // Accept.
        y = y_new;
        t = t_new;
        k1 = k7; // FSAL
        accepted += 1;

        let state = to_sample(t, &y);
        let e = specific_energy(sources, state.position, state.velocity);
        drift = drift.max((e - e0).abs() / e_scale);
        if record {
            samples.push(state);
        }

        if let StopCondition::AtTime(tf) = stop {
            if (tf - t) * direction <= 0.0 {
                return Ok(Integration {
                    final_state: state,
                    samples,
                    energy_drift: drift,
                    accepted_steps: accepted,
                });
            }
        } else if (t_end - t) * direction <= 0.0 {
            return Err(CoreError::Integration(
                "deadline reached before the trajectory exited the interaction region".into(),
            ));
        }

        h *= (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
    }
}

/// Locate the radius crossing inside the accepted step [t, t+h] and return
/// the integrated state there.
#[allow(clippy::too_many_arguments)]
fn locate_exit(
    stepper: &Stepper<'_>,
    y0: &StateVec,
    y1: &StateVec,
    t: f64,
    h: f64,
    center: Vec2,
    radius: f64,
    scales: ErrorScales,
) -> Result<Sample> {
    let dist = |tau: f64| -> f64 {
        if tau <= 0.0 {
            (Vec2::new(y0[0], y0[1]) - center).norm() - radius
        } else if tau >= h {
            (Vec2::new(y1[0], y1[1]) - center).norm() - radius
        } else {
            (hermite_position(y0, y1, h, tau) - center).norm() - radius
        }
    };

    // Bracket the outgoing crossing. If the step began outside the radius
    // (possible on very weak fields where one step spans the encounter),
    // start the bracket at the interior minimum instead.
    let mut lo = 0.0;
    let hi = h;
    if dist(0.0) >= 0.0 {
        let (mut a, mut b) = (0.0, h);
        for _ in 0..200 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if dist(m1) < dist(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        lo = 0.5 * (a + b);
        if dist(lo) >= 0.0 {
            return Err(CoreError::Integration(
                "failed to bracket the exit-radius crossing".into(),
            ));
        }
    }

    let mut a = lo;
    let mut b = hi;
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if dist(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mut tau = 0.5 * (a + b);

    // Take one uncontrolled sub-step to the bracketed crossing, then polish
    // the residual with Newton corrections on the integrated state.
    let k1 = rhs(stepper.sources, y0);
    let (mut yc, mut kc, _) = stepper.step(y0, &k1, tau);
    let mut tc = t + tau;
    for _ in 0..4 {
        let pos = Vec2::new(yc[0], yc[1]);
        let vel = Vec2::new(yc[2], yc[3]);
        let rel = pos - center;
        let r = rel.norm();
        let residual = r - radius;
        if residual.abs() <= 1e-13 * radius {
            break;
        }
        let rdot = rel.dot(vel) / r;
        if rdot == 0.0 {
            break;
        }
        tau = -residual / rdot;
        if tau.abs() < 1e6 * f64::EPSILON * scales.time {
            break;
        }
        let (yn, kn, _) = stepper.step(&yc, &kc, tau);
        yc = yn;
        kc = kn;
        tc += tau;
    }
    let _ = kc;
    Ok(to_sample(tc, &yc))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Kepler flyby used as an integrator self-check: conserved quantities.
    #[test]
    fn flyby_conserves_energy_and_momentum() {
        let gm = 1e-28;
        let b = 1e-6;
        let v = 1e-3;
        let x = 100.0 * b;
        let sources = [PointSource { position: Vec2::ZERO, gm }];
        let start = Sample {
            t: 0.0,
            position: Vec2::new(-x, b),
            velocity: Vec2::new(v, 0.0),
        };
        let control = StepControl { rel_tol: 1e-10, abs_tol: 0.0, max_steps: 1_000_000 };
        let scales = ErrorScales { position: x, velocity: 2.0 * gm / (b * v), time: x / v };
        let out = integrate(
            &sources,
            start,
            StopCondition::ExitRadius { center: Vec2::ZERO, radius: x, deadline: 50.0 * x / v },
            control,
            scales,
            true,
        )
        .unwrap();
        assert!(out.energy_drift < 1e-10, "energy drift {}", out.energy_drift);

        let l0 = start.position.cross(start.velocity);
        for s in &out.samples {
            let l = s.position.cross(s.velocity);
            assert!(((l - l0) / l0).abs() < 1e-10);
        }
        // Exit located on the radius.
        assert!((out.final_state.position.norm() - x).abs() <= 1e-12 * x);
    }

    #[test]
    fn fixed_time_lands_exactly() {
        let sources = [PointSource { position: Vec2::ZERO, gm: 1e-28 }];
        let start = Sample {
            t: 0.0,
            position: Vec2::new(-1e-4, 1e-6),
            velocity: Vec2::new(1e-3, 0.0),
        };
        let control = StepControl { rel_tol: 1e-10, abs_tol: 0.0, max_steps: 1_000_000 };
        let scales = ErrorScales { position: 1e-4, velocity: 1e-9, time: 0.1 };
        let out = integrate(&sources, start, StopCondition::AtTime(0.05), control, scales, false)
            .unwrap();
        assert_eq!(out.final_state.t, 0.05);
    }

    #[test]
    fn head_on_singular_pass_is_an_integration_error() {
        // Aimed exactly at the source: the state falls into the singularity
        // and the step size collapses instead of silently continuing.
        let gm = 1e-12;
        let x = 1e-4;
        let sources = [PointSource { position: Vec2::ZERO, gm }];
        let start = Sample {
            t: 0.0,
            position: Vec2::new(-x, 0.0),
            velocity: Vec2::new(1e-3, 0.0),
        };
        let control = StepControl { rel_tol: 1e-10, abs_tol: 0.0, max_steps: 200_000 };
        let scales = ErrorScales { position: x, velocity: 1e-3, time: x / 1e-3 };
        let err = integrate(
            &sources,
            start,
            StopCondition::ExitRadius { center: Vec2::ZERO, radius: x, deadline: 1e3 },
            control,
            scales,
            false,
        )
        .unwrap_err();
        assert!(matches!(err, CoreError::Integration(_)), "{err:?}");
    }

    #[test]
    fn deadline_without_exit_is_an_error() {
        // Deadline far too short for the crossing.
        let sources = [PointSource { position: Vec2::ZERO, gm: 0.0 }];
        let start = Sample {
            t: 0.0,
            position: Vec2::new(-1e-4, 1e-6),
            velocity: Vec2::new(1e-3, 0.0),
        };
        let control = StepControl { rel_tol: 1e-8, abs_tol: 0.0, max_steps: 1_000_000 };
        let scales = ErrorScales { position: 1e-4, velocity: 1e-12, time: 0.1 };
        let err = integrate(
            &sources,
            start,
            StopCondition::ExitRadius { center: Vec2::ZERO, radius: 1e-4, deadline: 1e-3 },
            control,
            scales,
            false,
        )
        .unwrap_err();
        assert!(matches!(err, CoreError::Integration(_)));
    }
}
