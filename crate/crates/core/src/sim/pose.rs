//! Rigid body pose, ZYX Euler angles, and the closed-form least-squares
//! pose fit used to place the body over its pinned feet.

use nalgebra::{Matrix2, Matrix3, Rotation3, Vector2, Vector3};

use crate::error::{Error, Result};

/// Anchor sets thinner than this (metres, RMS about their best-fit line)
/// are treated as collinear.
pub const COLLINEAR_TOLERANCE: f64 = 1e-6;
/// Weight of the prior orientation when the anchors are collinear.
pub const PRIOR_WEIGHT: f64 = 1e-3;
/// |pitch| this close to pi/2 is treated as gimbal lock.
pub const GIMBAL_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyPose {
    /// Body-frame origin in the world, metres.
    pub position: Vector3<f64>,
    pub rotation: Rotation3<f64>,
}

impl BodyPose {
    pub fn new(position: Vector3<f64>, rotation: Rotation3<f64>) -> Self {
        Self { position, rotation }
    }

    pub fn at_height(h: f64) -> Self {
        Self { position: Vector3::new(0.0, 0.0, h), rotation: Rotation3::identity() }
    }

    pub fn transform(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.position
    }

    /// (roll, pitch, yaw)
    pub fn euler(&self) -> (f64, f64, f64) {
        euler_zyx(&self.rotation)
    }
}

/// Rotation `Rz(yaw) * Ry(pitch) * Rx(roll)`.
pub fn rotation_from_euler(roll: f64, pitch: f64, yaw: f64) -> Rotation3<f64> {
    Rotation3::from_axis_angle(&Vector3::z_axis(), yaw)
        * Rotation3::from_axis_angle(&Vector3::y_axis(), pitch)
        * Rotation3::from_axis_angle(&Vector3::x_axis(), roll)
}

/// Intrinsic Z-Y-X decomposition into (roll, pitch, yaw). At gimbal lock
/// roll is set to zero and the remaining rotation folded into yaw.
pub fn euler_zyx(r: &Rotation3<f64>) -> (f64, f64, f64) {
    let m = r.matrix();
    let sp = (-m[(2, 0)]).clamp(-1.0, 1.0);
    let pitch = sp.asin();
    if (pitch.abs() - std::f64::consts::FRAC_PI_2).abs() < GIMBAL_TOLERANCE {
        // with pitch = +-pi/2 only yaw -+ roll is observable
        let yaw = (-m[(0, 1)]).atan2(m[(1, 1)]);
        return (0.0, pitch, yaw);
    }
    let roll = m[(2, 1)].atan2(m[(2, 2)]);
    let yaw = m[(1, 0)].atan2(m[(0, 0)]);
    (roll, pitch, yaw)
}

/// Rigid transform taking body-frame `targets` onto world `anchors` in the
/// least-squares sense. Collinear anchor sets leave one rotation free; the
/// fit is then pulled toward `prior`'s orientation.
pub fn fit_body_pose(anchors: &[Vector3<f64>], targets: &[Vector3<f64>], prior: &BodyPose) -> Result<BodyPose> {
    if anchors.len() != targets.len() || anchors.len() < 3 {
        return Err(Error::TooFewPoints { need: 3, got: anchors.len().min(targets.len()) });
    }
    let n = anchors.len() as f64;
    let a_mean = anchors.iter().sum::<Vector3<f64>>() / n;
    let p_mean = targets.iter().sum::<Vector3<f64>>() / n;

    let mut h = Matrix3::zeros();
    for (a, p) in anchors.iter().zip(targets) {
        h += (p - p_mean) * (a - a_mean).transpose();
    }
    if is_collinear(anchors, &a_mean) {
        let scale = h.norm().max(f64::MIN_POSITIVE);
        h += prior.rotation.matrix().transpose() * (PRIOR_WEIGHT * scale);
    }

    let rotation = kabsch_rotation(&h).unwrap_or(prior.rotation);
    let position = a_mean - rotation * p_mean;
    Ok(BodyPose { position, rotation })
}

/// Rotation maximising `trace(R H)` for `H = sum p a^T`.
fn kabsch_rotation(h: &Matrix3<f64>) -> Option<Rotation3<f64>> {
    let svd = h.svd(true, true);
    let u = svd.u?;
    let v = svd.v_t?.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let fix = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d));
    let r = v * fix * u.transpose();
    Some(Rotation3::from_matrix_unchecked(r))
}

fn is_collinear(points: &[Vector3<f64>], mean: &Vector3<f64>) -> bool {
    // spread in the ground plane; anchors all sit at z = 0
    let mut cov = Matrix2::zeros();
    for p in points {
        let d: Vector2<f64> = (p - mean).xy();
        cov += d * d.transpose();
    }
    cov /= points.len() as f64;
    let eig = cov.symmetric_eigenvalues();
    eig.min().max(0.0).sqrt() < COLLINEAR_TOLERANCE
}

/// RMS distance between fitted targets and their anchors.
pub fn fit_residual(pose: &BodyPose, anchors: &[Vector3<f64>], targets: &[Vector3<f64>]) -> f64 {
    let sum: f64 = anchors.iter().zip(targets).map(|(a, p)| (pose.transform(p) - a).norm_squared()).sum();
    (sum / anchors.len().max(1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn targets() -> Vec<Vector3<f64>> {
        vec![
            Vector3::new(0.17, 0.1, -0.13),
            Vector3::new(-0.16, 0.0, -0.13),
            Vector3::new(0.18, -0.1, -0.13),
            Vector3::new(-0.17, -0.08, -0.12),
        ]
    }

    #[test]
    fn identity_fit() {
        let t = targets();
        let pose = fit_body_pose(&t, &t, &BodyPose::at_height(0.0)).unwrap();
        assert!(pose.position.norm() < 1e-15);
        assert!((pose.rotation.matrix() - Matrix3::identity()).norm() < 1e-12);
    }

    #[test]
    fn pure_translation() {
        let t = targets();
        let d = Vector3::new(0.0, 0.037, 0.0);
        let a: Vec<_> = t.iter().map(|p| p + d).collect();
        let pose = fit_body_pose(&a, &t, &BodyPose::at_height(0.0)).unwrap();
        assert!((pose.position - d).norm() < 1e-14);
        assert!((pose.rotation.matrix() - Matrix3::identity()).norm() < 1e-12);
    }

    #[test]
    fn yaw_recovered() {
        let t = targets();
        let r = rotation_from_euler(0.0, 0.0, 10f64.to_radians());
        let a: Vec<_> = t.iter().map(|p| r * p).collect();
        let pose = fit_body_pose(&a, &t, &BodyPose::at_height(0.0)).unwrap();
        let (roll, pitch, yaw) = pose.euler();
        assert!((yaw - 10f64.to_radians()).abs() < 1e-9);
        assert!(roll.abs() < 1e-9 && pitch.abs() < 1e-9);
    }

    #[test]
    fn three_coplanar_points_fit_exactly() {
        let t: Vec<_> = targets().into_iter().take(3).collect();
        let r = rotation_from_euler(0.05, -0.03, 0.4);
        let d = Vector3::new(0.1, 0.2, 0.13);
        let a: Vec<_> = t.iter().map(|p| r * p + d).collect();
        let pose = fit_body_pose(&a, &t, &BodyPose::at_height(0.0)).unwrap();
        assert!(fit_residual(&pose, &a, &t) < 1e-12);
        assert!((pose.rotation.matrix() - r.matrix()).norm() < 1e-12);
    }

    #[test]
    fn collinear_anchors_follow_prior() {
        let t = vec![Vector3::new(0.0, -0.1, -0.1), Vector3::new(0.0, 0.0, -0.1), Vector3::new(0.0, 0.1, -0.1)];
        let a: Vec<_> = t.iter().map(|p| Vector3::new(p.x, p.y, 0.0)).collect();
        let prior = BodyPose::new(Vector3::zeros(), rotation_from_euler(0.0, 0.0, 0.0));
        let pose = fit_body_pose(&a, &t, &prior).unwrap();
        assert!((pose.rotation.matrix() - Matrix3::identity()).norm() < 1e-9);
        assert!((pose.position - Vector3::new(0.0, 0.0, 0.1)).norm() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let t = targets();
        assert!(matches!(fit_body_pose(&t[..2], &t[..2], &BodyPose::at_height(0.0)), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn euler_basics() {
        assert_eq!(euler_zyx(&Rotation3::identity()), (0.0, 0.0, 0.0));
        let (r, p, y) = euler_zyx(&rotation_from_euler(0.0, 0.0, PI / 6.0));
        assert!(r.abs() < 1e-15 && p.abs() < 1e-15);
        assert!((y - PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn gimbal_lock_folds_into_yaw() {
        for pitch in [PI / 2.0, -PI / 2.0] {
            let rot = rotation_from_euler(0.0, pitch, 0.7);
            let (roll, p, yaw) = euler_zyx(&rot);
            assert_eq!(roll, 0.0);
            assert!((p - pitch).abs() < 1e-6);
            let back = rotation_from_euler(roll, p, yaw);
            assert!((back.matrix() - rot.matrix()).norm() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn euler_round_trip(roll in -3.1f64..3.1, pitch in -1.55f64..1.55, yaw in -3.1f64..3.1) {
            let (r, p, y) = euler_zyx(&rotation_from_euler(roll, pitch, yaw));
            prop_assert!((r - roll).abs() < 1e-9);
            prop_assert!((p - pitch).abs() < 1e-9);
            prop_assert!((y - yaw).abs() < 1e-9);
        }
    }
}
