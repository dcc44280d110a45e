//! Frames, angles of incidence, and free-space path loss.
//!
//! Conventions used throughout the crate:
//!
//! * World frame: right-handed, z up. Positions are metres.
//! * Body frame: x out the nose, y out the left side, z up.
//! * `heading` (yaw) is the angle of the nose in the world x-y plane,
//!   measured from +x toward +y. Attitude composes intrinsically as
//!   yaw, then pitch, then roll (Z-Y-X); rotations are right-handed about
//!   the respective body axes, so positive pitch tips the nose below the
//!   horizon and positive roll drops the right side.
//! * A [`Direction`] is an azimuth `alpha` in (-pi, pi] (0 = dead ahead,
//!   +pi/2 = out the left side) and an inclination `beta` in [-pi/2, pi/2]
//!   (+pi/2 = straight up). Both are radians.
//!
//! All angles returned by this module are normalized: azimuths and headings
//! to (-pi, pi], inclinations by construction to [-pi/2, pi/2].

use crate::error::{Error, Result};

/// A 3-component vector in metres (world or body frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Wraps an angle to (-pi, pi]. The upper endpoint is kept, the lower mapped
/// to +pi, so every angle has exactly one representative.
pub fn normalize_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a.rem_euclid(two_pi); // [0, 2*pi)
    if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

/// Linear interpolation between two angles along the shortest arc.
/// `t = 0` gives `a`, `t = 1` gives `b` (up to wrapping); the result is
/// normalized to (-pi, pi]. When `a` and `b` are antipodal the arc through
/// `a + delta` with `delta = normalize_angle(b - a) = pi` is used, so the
/// midpoint of 3.0 and -3.0 rad comes out at +pi, not 0.
pub fn lerp_angle(a: f64, b: f64, t: f64) -> f64 {
    normalize_angle(a + normalize_angle(b - a) * t)
}

/// Pose of a platform that can only yaw: position plus heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPose {
    pub position: Vec3,
    /// Heading in radians, normalized to (-pi, pi] on construction.
    pub heading: f64,
}

impl ReducedPose {
    pub fn new(position: Vec3, heading: f64) -> Self {
        ReducedPose {
            position,
            heading: normalize_angle(heading),
        }
    }
}

/// Full six-degree-of-freedom pose. Angles are radians, normalized to
/// (-pi, pi] on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullPose {
    pub position: Vec3,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl FullPose {
    pub fn new(position: Vec3, roll: f64, pitch: f64, yaw: f64) -> Self {
        FullPose {
            position,
            roll: normalize_angle(roll),
            pitch: normalize_angle(pitch),
            yaw: normalize_angle(yaw),
        }
    }

    /// A level pose: roll and pitch zero.
    pub fn level(position: Vec3, heading: f64) -> Self {
        FullPose::new(position, 0.0, 0.0, heading)
    }
}

impl From<ReducedPose> for FullPose {
    fn from(p: ReducedPose) -> FullPose {
        FullPose::level(p.position, p.heading)
    }
}

#[inline]
fn rotate_z(v: Vec3, a: f64) -> Vec3 {
    let (s, c) = a.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

#[inline]
fn rotate_y(v: Vec3, a: f64) -> Vec3 {
    let (s, c) = a.sin_cos();
    Vec3::new(c * v.x + s * v.z, v.y, -s * v.x + c * v.z)
}

#[inline]
fn rotate_x(v: Vec3, a: f64) -> Vec3 {
    let (s, c) = a.sin_cos();
    Vec3::new(v.x, c * v.y - s * v.z, s * v.y + c * v.z)
}

/// Vector from `observer` to `target_position`, expressed in the observer's
/// body frame: the world-frame offset is rotated by undoing heading, then
/// pitch, then roll.
pub fn relative_in_frame(observer: &FullPose, target_position: Vec3) -> Vec3 {
    let world = target_position - observer.position;
    let v = rotate_z(world, -observer.yaw);
    let v = rotate_y(v, -observer.pitch);
    rotate_x(v, -observer.roll)
}

/// A direction on the unit sphere, as seen from a body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    azimuth: f64,
    inclination: f64,
}

impl Direction {
    /// `azimuth` is normalized to (-pi, pi]; `inclination` must already lie
    /// in [-pi/2, pi/2] (values within 1e-9 of the ends are clamped).
    pub fn new(azimuth: f64, inclination: f64) -> Self {
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!(
            inclination.abs() <= half_pi + 1e-9,
            "inclination {inclination} outside [-pi/2, pi/2]"
        );
        Direction {
            azimuth: normalize_angle(azimuth),
            inclination: inclination.clamp(-half_pi, half_pi),
        }
    }

    #[inline]
    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    #[inline]
    pub fn inclination(&self) -> f64 {
        self.inclination
    }

    /// Unit vector in the same frame the direction was measured in.
    pub fn unit_vector(&self) -> Vec3 {
        let (sa, ca) = self.azimuth.sin_cos();
        let (sb, cb) = self.inclination.sin_cos();
        Vec3::new(cb * ca, cb * sa, sb)
    }
}

/// Direction of a (non-zero) body-frame vector: `alpha = atan2(y, x)`,
/// `beta = atan2(z, hypot(x, y))`. Straight up or down has no defined
/// azimuth; it is pinned to 0 so poles are representable and deterministic.
pub fn direction_of(v: Vec3) -> Direction {
    let h = v.x.hypot(v.y);
    let azimuth = if h == 0.0 { 0.0 } else { v.y.atan2(v.x) };
    Direction::new(azimuth, v.z.atan2(h))
}

/// Central angle between two directions in [0, pi], computed from the
/// cross/dot pair so that nearly parallel and nearly antipodal directions
/// keep full precision (acos would not).
pub fn angular_distance(a: Direction, b: Direction) -> f64 {
    let u = a.unit_vector();
    let v = b.unit_vector();
    u.cross(v).norm().atan2(u.dot(v))
}

/// Everything the link model observes about one transmission between two
/// platforms: the direction each sees the other in, and their separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointObservation {
    /// Direction of platform b in a's body frame.
    pub dir_b_in_a: Direction,
    /// Direction of platform a in b's body frame.
    pub dir_a_in_b: Direction,
    /// Separation in metres (always > 0).
    pub distance: f64,
}

/// Mutual geometry of two posed platforms. Fails on coincident positions,
/// where neither direction is defined.
pub fn joint_observation(a: &FullPose, b: &FullPose) -> Result<JointObservation> {
    let d = (b.position - a.position).norm();
    if d <= 0.0 || d.is_nan() {
        return Err(Error::data(format!(
            "coincident platform positions ({:?}); mutual bearing is undefined",
            a.position
        )));
    }
    Ok(JointObservation {
        dir_b_in_a: direction_of(relative_in_frame(a, b.position)),
        dir_a_in_b: direction_of(relative_in_frame(b, a.position)),
        distance: d,
    })
}

/// Free-space path loss `20*log10(wavelength / (4*pi*distance))` in dB
/// (a negative number for any distance beyond wavelength/(4*pi)).
///
/// The expression models the far field; inside `distance <= 2*wavelength`
/// it is still evaluated but a warning is logged.
pub fn path_loss_db(wavelength: f64, distance: f64) -> Result<f64> {
    if !wavelength.is_finite() || wavelength <= 0.0 {
        return Err(Error::config(format!(
            "wavelength must be positive and finite, got {wavelength}"
        )));
    }
    if !distance.is_finite() || distance <= 0.0 {
        return Err(Error::data(format!(
            "path loss undefined for distance {distance}; need a positive finite separation"
        )));
    }
    if distance <= 2.0 * wavelength {
        log::warn!(
            "distance {distance} m is inside the far-field limit (2*wavelength = {} m); \
             the free-space expression is unreliable here",
            2.0 * wavelength
        );
    }
    Ok(20.0 * (wavelength / (4.0 * std::f64::consts::PI * distance)).log10())
}
