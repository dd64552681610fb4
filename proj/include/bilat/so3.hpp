#pragma once

#include "bilat/types.hpp"

namespace bilat::so3 {

/// Tolerance used by the rotation-matrix validity checks.
inline constexpr double kRotationTol = 1e-9;

/// Trace threshold below which the logarithm refuses to pick a branch.
inline constexpr double kNearPiTraceMargin = 1e-6;

/// Skew-symmetric matrix of v, so that hat(v) * u == v.cross(u).
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws NotSkew if ||s + s^T|| exceeds 1e-9.
Vec3 vee(const Mat3& s);

/// Rodrigues closed form of the matrix exponential of hat(v).
Mat3 exp(const Vec3& v);

/**
 * Principal rotation vector of R (||result|| <= pi).
 *
 * Uses a second-order Taylor expansion of theta / (2 sin theta) below
 * 1e-4 rad. Throws NearPi when trace(R) <= -1 + 1e-6, i.e. when the angle
 * is within about 1e-3 rad of pi and the axis is ill-determined.
 */
Vec3 log(const Mat3& R);

/// R^n by repeated multiplication; R^0 = I.
Mat3 pow(const Mat3& R, int n);

/// Sum_{i=0}^{count-1} R^i. Requires count >= 1.
Mat3 geom_sum(const Mat3& R, int count);

/// R * omega, the vee of the conjugated skew matrix R hat(omega) R^T.
Vec3 rotate_vee(const Mat3& R, const Vec3& omega);

/// Orthonormality and unit determinant within kRotationTol.
bool is_rotation(const Mat3& R, double tol = kRotationTol);

/// Angle of R in [0, pi].
double angle(const Mat3& R);

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// Fixed-axis roll/pitch/yaw: Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 from_rpy(const Vec3& rpy);

/// Intrinsic XYZ Euler angles: Rx(a) * Ry(b) * Rz(c).
Mat3 from_euler_xyz(const Vec3& xyz);

}  // namespace bilat::so3
