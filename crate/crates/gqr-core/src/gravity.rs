//! Newtonian field of the source particle under each hypothesis for how a
//! spatially superposed mass gravitates.
//!
//! The source is prepared in an equal-amplitude superposition over two slit
//! positions at the barrier plane x = 0. Three rival field models are
//! implemented:
//!
//! * `Collapsed` — each shot the source gravitates from exactly one slit,
//!   sampled with probability 1/2 (classical mixture; the superposition is
//!   taken to be invalid for an individual object),
//! * `MeanField` — the source gravitates as its probability-weighted mass
//!   density: two half-mass point sources acting simultaneously,
//! * `Superposed` — each branch carries the full mass with amplitude
//!   1/sqrt(2); the test particle evolves per branch, so the field has no
//!   single classical value and is reported branch-tagged.
//!
//! Geometry is confined to the x-y plane. There is no gravitational
//! softening: coincident points are hard errors, since trajectories in this
//! scheme never approach a source closer than the impact parameter.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::GRAVITATIONAL_G;
use crate::error::{CoreError, Result};
use crate::geometry::Vec2;

/// Source particle: mass, material radius and the slit geometry that defines
/// its superposed position.
#[derive(Debug, Clone, Copy)]
pub struct SourceSpec {
    /// Source mass (kg).
    pub mass: f64,
    /// Material sphere radius (m); only the Casimir bound consumes it.
    pub radius: f64,
    /// Transverse slit coordinates (y1, y2) at the barrier plane x = 0 (m).
    pub slit_positions: (f64, f64),
    /// Gaussian slit profile scale (m).
    pub slit_width: f64,
}

impl SourceSpec {
    pub fn new(mass: f64, radius: f64, slit_positions: (f64, f64), slit_width: f64) -> Result<Self> {
        let spec = SourceSpec {
            mass,
            radius,
            slit_positions,
            slit_width,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) {
            return Err(CoreError::config("mass_M must be > 0"));
        }
        if !(self.radius > 0.0) {
            return Err(CoreError::config("radius_R must be > 0"));
        }
        if !(self.slit_width > 0.0) {
            return Err(CoreError::config("slit_width_sigma must be > 0"));
        }
        let (y1, y2) = self.slit_positions;
        if !y1.is_finite() || !y2.is_finite() || y1 == y2 {
            return Err(CoreError::config(
                "slit positions must be finite and distinct (separation d > 0)",
            ));
        }
        Ok(())
    }

    /// Slit separation d = |y2 - y1|.
    pub fn separation(&self) -> f64 {
        (self.slit_positions.1 - self.slit_positions.0).abs()
    }

    /// Midpoint of the two slits on the barrier plane.
    pub fn centroid(&self) -> Vec2 {
        Vec2::new(0.0, 0.5 * (self.slit_positions.0 + self.slit_positions.1))
    }

    pub fn slit_point(&self, index: usize) -> Vec2 {
        let y = if index == 0 {
            self.slit_positions.0
        } else {
            self.slit_positions.1
        };
        Vec2::new(0.0, y)
    }
}

/// Which field model the superposed source follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisKind {
    Collapsed,
    MeanField,
    Superposed,
}

impl HypothesisKind {
    pub fn tag(self) -> &'static str {
        match self {
            HypothesisKind::Collapsed => "collapsed",
            HypothesisKind::MeanField => "meanfield",
            HypothesisKind::Superposed => "superposed",
        }
    }
}

/// Hypothesis selection plus the seed driving `Collapsed` shot sampling.
#[derive(Debug, Clone, Copy)]
pub struct GravityHypothesis {
    pub kind: HypothesisKind,
    /// Consumed only by `Collapsed`; ignored otherwise.
    pub rng_seed: u64,
}

impl GravityHypothesis {
    pub fn new(kind: HypothesisKind, rng_seed: u64) -> Self {
        GravityHypothesis { kind, rng_seed }
    }
}

/// One gravitating branch of the source state.
#[derive(Debug, Clone, Copy)]
pub struct Branch {
    /// Probability (Collapsed), unit weight (MeanField) or amplitude
    /// (Superposed) — see [`BranchSet`].
    pub weight: f64,
    pub position: Vec2,
    pub mass: f64,
}

/// The branch decomposition of the source under a hypothesis.
///
/// * Collapsed: two entries, probability 0.5 each, full mass.
/// * MeanField: two entries, weight 1, half mass each — one effective field.
/// * Superposed: two entries, amplitude 1/sqrt(2), full mass per branch.
#[derive(Debug, Clone)]
pub struct BranchSet {
    pub kind: HypothesisKind,
    pub branches: Vec<Branch>,
}

/// Point-mass field at `field_point` from `mass` at `source_pos`:
/// magnitude G m / r^2, directed from the field point toward the source
/// (attractive).
pub fn point_field(mass: f64, source_pos: Vec2, field_point: Vec2) -> Result<Vec2> {
    let rel = source_pos - field_point;
    let r2 = rel.norm_squared();
    if r2 == 0.0 {
        return Err(CoreError::Singularity(format!(
            "field point coincides with source at ({}, {})",
            source_pos.x, source_pos.y
        )));
    }
    let r = r2.sqrt();
    Ok(rel * (GRAVITATIONAL_G * mass / (r2 * r)))
}

/// Decompose the source state into gravitating branches under `hyp`.
pub fn hypothesis_branches(source: &SourceSpec, hyp: &GravityHypothesis) -> Result<BranchSet> {
    source.validate()?;
    let (p1, p2) = (source.slit_point(0), source.slit_point(1));
    let branches = match hyp.kind {
        HypothesisKind::Collapsed => vec![
            Branch { weight: 0.5, position: p1, mass: source.mass },
            Branch { weight: 0.5, position: p2, mass: source.mass },
        ],
        HypothesisKind::MeanField => vec![
            Branch { weight: 1.0, position: p1, mass: 0.5 * source.mass },
            Branch { weight: 1.0, position: p2, mass: 0.5 * source.mass },
        ],
        HypothesisKind::Superposed => {
            let a = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                Branch { weight: a, position: p1, mass: source.mass },
                Branch { weight: a, position: p2, mass: source.mass },
            ]
        }
    };
    Ok(BranchSet { kind: hyp.kind, branches })
}

/// Field evaluated under a hypothesis.
///
/// `Superposed` carries both branch vectors: the test particle evolves per
/// branch (entangling dynamics) and the interference cross term admits no
/// classical field value, so no scalar average is defined.
#[derive(Debug, Clone)]
pub enum FieldSample {
    /// MeanField (merged field) or Collapsed (the branch sampled this shot,
    /// index attached).
    Single { field: Vec2, branch: Option<usize> },
    /// Superposed: one vector per branch, index-tagged.
    PerBranch(Vec<(usize, Vec2)>),
}

/// Sample which branch gravitates on shot `shot_index` of a `Collapsed` run.
///
/// Counter-based: the (seed, shot) pair fully determines the outcome, so
/// shot sequences replay bit-identically on any platform and in any order.
pub fn sample_branch_index(seed: u64, shot_index: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot_index);
    (rng.next_u64() & 1) as usize
}

/// Evaluate the effective field of `branches` at `field_point`.
///
/// `shot_index` is consumed only by the `Collapsed` hypothesis.
pub fn effective_field(
    branches: &BranchSet,
    hyp: &GravityHypothesis,
    field_point: Vec2,
    shot_index: u64,
) -> Result<FieldSample> {
    match branches.kind {
        HypothesisKind::MeanField => {
            let mut total = Vec2::ZERO;
            for b in &branches.branches {
                total += point_field(b.mass, b.position, field_point)?;
            }
            Ok(FieldSample::Single { field: total, branch: None })
        }
        HypothesisKind::Collapsed => {
            let idx = sample_branch_index(hyp.rng_seed, shot_index);
            let b = &branches.branches[idx];
            Ok(FieldSample::Single {
                field: point_field(b.mass, b.position, field_point)?,
                branch: Some(idx),
            })
        }
        HypothesisKind::Superposed => {
            let mut tagged = Vec::with_capacity(branches.branches.len());
            for (i, b) in branches.branches.iter().enumerate() {
                tagged.push((i, point_field(b.mass, b.position, field_point)?));
            }
            Ok(FieldSample::PerBranch(tagged))
        }
    }
}
