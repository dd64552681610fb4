#pragma once

#include <string_view>

#include "bilat/types.hpp"

namespace bilat {

/// How the posture error between leader and follower is measured.
enum class ErrorVariant {
    /// log(R_l R_f^-alpha): geodesic on SO(3).
    MatrixError,
    /// log(R_l) - alpha log(R_f): difference of rotation vectors.
    VectorError,
};

std::string_view to_string(ErrorVariant variant);

/// Parses "matrix" or "vector". Throws ValidationError otherwise.
ErrorVariant parse_variant(std::string_view text);

/// Leader/follower scaling. Rotation scales as an integer power, translation
/// per axis, wrench per component in [tau_x, tau_y, tau_z, f_x, f_y, f_z] order.
struct ScalingConfig {
    int alpha = 2;
    Vec3 beta = Vec3::Constant(2.0);
    Vec6 gamma = Vec6::Constant(2.0);

    /// Throws ValidationError on alpha < 1 or a non-positive diagonal entry.
    void validate() const;
};

struct ErrorJacobians {
    Mat6 leader;    // d x_e / d theta_l
    Mat6 follower;  // d x_e / d theta_f
};

/// Rotation-first stacked error [omega_e; r_e] and its rate.
struct ErrorState {
    Vec3 omega_e = Vec3::Zero();
    Vec3 r_e = Vec3::Zero();
    Vec6 x_e = Vec6::Zero();
    Vec6 x_e_dot = Vec6::Zero();
    Vec6 w_e = Vec6::Zero();
};

/// Throws NearPi (from so3::log) when the relevant rotation is near pi.
Vec3 posture_error(const Mat3& R_l, const Mat3& R_f, int alpha, ErrorVariant variant);

Vec3 translation_error(const Vec3& r_l, const Vec3& r_f, const Vec3& beta);

/// Blocks of the stacked error Jacobian [J_xl J_xf]. For MatrixError the
/// rotation rows give the rate of the error in the body frame of
/// R_l R_f^-alpha; for VectorError they use the plain world angular rates.
ErrorJacobians error_jacobians(const Mat3& R_l, const Mat3& R_f, const Mat6& J_l, const Mat6& J_f,
                               const ScalingConfig& cfg, ErrorVariant variant);

Vec6 error_rate(const Mat3& R_l, const Mat3& R_f, const Mat6& J_l, const Mat6& J_f,
                const Vec6& theta_dot_l, const Vec6& theta_dot_f, const ScalingConfig& cfg,
                ErrorVariant variant);

/// J_l^{+T} tau_l_reac + gamma J_f^{+T} tau_f_reac, with the pseudoinverses
/// taken through damped_pinv at the given damping.
Vec6 wrench_error(const Mat6& J_l, const Mat6& J_f, const Vec6& tau_l_reac, const Vec6& tau_f_reac,
                  const Vec6& gamma, double damping);

}  // namespace bilat
