#pragma once

// Reference computations for the tests. Each one takes a different numerical
// route from the library code it is compared against.

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <array>
#include <cmath>
#include <random>

#include "bilat/chain.hpp"

namespace oracle {

using bilat::Mat3;
using bilat::Mat6;
using bilat::Vec3;
using bilat::Vec6;

// Matrix exponential of hat(v) by power series.
inline Mat3 series_exp(const Vec3& v) {
    Mat3 A;
    A << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    Mat3 term = Mat3::Identity();
    Mat3 sum = Mat3::Identity();
    for (int k = 1; k < 60; ++k) {
        term = term * A / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

// Inverse right (side = +1) or left (side = -1) Jacobian of the SO(3)
// logarithm at phi, in closed form.
inline Mat3 inverse_so3_jacobian(const Vec3& phi, double side) {
    Mat3 W;
    W << 0, -phi.z(), phi.y(), phi.z(), 0, -phi.x(), -phi.y(), phi.x(), 0;
    const double t = phi.norm();
    if (t < 1e-8) return Mat3::Identity() + side * 0.5 * W;
    const double c = 1.0 / (t * t) - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
    return Mat3::Identity() + side * 0.5 * W + c * W * W;
}
inline Mat3 inverse_right_jacobian(const Vec3& phi) { return inverse_so3_jacobian(phi, +1.0); }
inline Mat3 inverse_left_jacobian(const Vec3& phi) { return inverse_so3_jacobian(phi, -1.0); }

// Rotation vector through Eigen's quaternion-based angle-axis conversion.
inline Vec3 angle_axis_log(const Mat3& R) {
    const Eigen::AngleAxisd aa(R);
    return aa.angle() * aa.axis();
}

inline Mat3 axis_rotation(const Vec3& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

inline Mat3 rpy(const Vec3& r) {
    return (Eigen::AngleAxisd(r.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(r.y(), Vec3::UnitY()) *
            Eigen::AngleAxisd(r.x(), Vec3::UnitX()))
        .toRotationMatrix();
}

using Transform = Eigen::Matrix4d;

inline Transform transform(const Mat3& R, const Vec3& p) {
    Transform T = Transform::Identity();
    T.topLeftCorner<3, 3>() = R;
    T.topRightCorner<3, 1>() = p;
    return T;
}

// World transforms of every joint frame and the tool, by chaining 4x4 matrices.
struct Frames {
    std::array<Transform, 6> joint;
    Transform tool;
};

inline Frames frames(const bilat::ChainModel& chain, const Vec6& q) {
    Frames out;
    Transform T = Transform::Identity();
    for (int i = 0; i < 6; ++i) {
        const auto& j = chain.joints[i];
        T = T * transform(j.origin_R, j.origin_p) * transform(axis_rotation(j.axis, q[i]), Vec3::Zero());
        out.joint[i] = T;
    }
    out.tool = T * transform(chain.tool_R, chain.tool_p);
    return out;
}

inline Transform fk(const bilat::ChainModel& chain, const Vec6& q) { return frames(chain, q).tool; }

// Central-difference Jacobian of the tool pose, angular rows first.
inline Mat6 fd_jacobian(const bilat::ChainModel& chain, const Vec6& q, double step = 1e-6) {
    Mat6 J;
    for (int i = 0; i < 6; ++i) {
        Vec6 dq = Vec6::Zero();
        dq[i] = step;
        const Transform Tp = fk(chain, q + dq);
        const Transform Tm = fk(chain, q - dq);
        const Mat3 dR = Tp.topLeftCorner<3, 3>() * Tm.topLeftCorner<3, 3>().transpose();
        J.block<3, 1>(0, i) = angle_axis_log(dR) / (2.0 * step);
        J.block<3, 1>(3, i) = (Tp.topRightCorner<3, 1>() - Tm.topRightCorner<3, 1>()) / (2.0 * step);
    }
    return J;
}

inline Mat6 cod_pinv(const Mat6& J) {
    return Eigen::CompleteOrthogonalDecomposition<Mat6>(J).pseudoInverse();
}

// Joint-space inertia as the sum over links of m Jv^T Jv + Jw^T I_world Jw,
// with centre-of-mass Jacobians built column by column.
inline Mat6 mass_matrix(const bilat::ChainModel& chain, const Vec6& q) {
    const Frames f = frames(chain, q);
    Mat6 M = Mat6::Zero();
    for (int k = 0; k < 6; ++k) {
        const auto& link = chain.joints[k];
        const Mat3 Rk = f.joint[k].topLeftCorner<3, 3>();
        const Vec3 c = f.joint[k].topRightCorner<3, 1>() + Rk * link.com;
        Eigen::Matrix<double, 3, 6> Jv = Eigen::Matrix<double, 3, 6>::Zero();
        Eigen::Matrix<double, 3, 6> Jw = Eigen::Matrix<double, 3, 6>::Zero();
        for (int j = 0; j <= k; ++j) {
            const Vec3 z = f.joint[j].topLeftCorner<3, 3>() * chain.joints[j].axis;
            Jw.col(j) = z;
            Jv.col(j) = z.cross(c - f.joint[j].topRightCorner<3, 1>());
        }
        M += link.mass * Jv.transpose() * Jv + Jw.transpose() * Rk * link.inertia * Rk.transpose() * Jw;
    }
    return M;
}

// Gravity torque: minus the gradient of sum m g^T c, via the same COM Jacobians.
inline Vec6 gravity_torque(const bilat::ChainModel& chain, const Vec6& q) {
    const Frames f = frames(chain, q);
    Vec6 g = Vec6::Zero();
    for (int k = 0; k < 6; ++k) {
        const Vec3 c = f.joint[k].topRightCorner<3, 1>() +
                       f.joint[k].topLeftCorner<3, 3>() * chain.joints[k].com;
        for (int j = 0; j <= k; ++j) {
            const Vec3 z = f.joint[j].topLeftCorner<3, 3>() * chain.joints[j].axis;
            g[j] -= chain.joints[k].mass * chain.gravity.dot(z.cross(c - f.joint[j].topRightCorner<3, 1>()));
        }
    }
    return g;
}

// Coriolis and centrifugal torques from Christoffel symbols of the oracle
// inertia, with dM/dq by central differences.
inline Vec6 coriolis(const bilat::ChainModel& chain, const Vec6& q, const Vec6& qd, double step = 1e-6) {
    std::array<Mat6, 6> dM;
    for (int k = 0; k < 6; ++k) {
        Vec6 dq = Vec6::Zero();
        dq[k] = step;
        dM[k] = (mass_matrix(chain, q + dq) - mass_matrix(chain, q - dq)) / (2.0 * step);
    }
    Vec6 c = Vec6::Zero();
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            for (int k = 0; k < 6; ++k) {
                c[i] += 0.5 * (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * qd[j] * qd[k];
            }
        }
    }
    return c;
}

class Rng {
public:
    explicit Rng(unsigned seed) : gen_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(gen_); }
    Vec3 vec3(double s) { return {uniform(-s, s), uniform(-s, s), uniform(-s, s)}; }
    Vec6 vec6(double s) {
        Vec6 v;
        for (int i = 0; i < 6; ++i) v[i] = uniform(-s, s);
        return v;
    }
    // Uniform direction, angle uniform in [0, max_angle].
    Vec3 rotation_vector(double max_angle) {
        Vec3 axis;
        do {
            axis = vec3(1.0);
        } while (axis.norm() < 1e-3 || axis.norm() > 1.0);
        return axis.normalized() * uniform(0.0, max_angle);
    }
    Mat3 rotation(double max_angle = 3.0) { return series_exp(rotation_vector(max_angle)); }

private:
    std::mt19937_64 gen_;
};

// Joint angles around the working posture of the bundled arm.
inline Vec6 working_posture() { return (Vec6() << 0.0, -0.27, 2.0, 0.0, 1.4, 0.0).finished(); }

}  // namespace oracle
