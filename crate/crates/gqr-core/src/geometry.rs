//! Minimal 2-D vector type.
//!
//! The experiment geometry is confined to the x-y plane: the slit barrier
//! sits at x = 0 and the test particle travels in +x. A hand-rolled vector
//! keeps the hot integrator loop free of generic linear-algebra machinery.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Cartesian vector in the experiment plane (SI units throughout).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product; signed area spanned by the pair.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Signed angle from `self` to `other` in (-pi, pi].
    pub fn angle_to(self, other: Vec2) -> f64 {
        self.cross(other).atan2(self.dot(other))
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_is_signed() {
        let ex = Vec2::new(1.0, 0.0);
        let up = Vec2::new(0.0, 1.0);
        assert!((ex.angle_to(up) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((ex.angle_to(-up) + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn small_angle_precision() {
        // atan2(cross, dot) resolves angles far below sqrt(machine epsilon).
        let v = Vec2::new(1.0, 0.0);
        let w = Vec2::new(1.0, 3e-16);
        assert!((v.angle_to(w) - 3e-16).abs() < 1e-30);
    }
}
