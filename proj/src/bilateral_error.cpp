#include "bilat/bilateral_error.hpp"

#include <string>

#include "bilat/chain.hpp"
#include "bilat/errors.hpp"
#include "bilat/so3.hpp"

namespace bilat {

std::string_view to_string(ErrorVariant variant) {
    switch (variant) {
        case ErrorVariant::MatrixError:
            return "matrix";
        case ErrorVariant::VectorError:
            return "vector";
    }
    return "unknown";
}

ErrorVariant parse_variant(std::string_view text) {
    if (text == "matrix") return ErrorVariant::MatrixError;
    if (text == "vector") return ErrorVariant::VectorError;
    throw ValidationError("variant must be \"matrix\" or \"vector\", got \"" + std::string(text) +
                          "\"");
}

void ScalingConfig::validate() const {
    if (alpha < 1) {
        throw ValidationError("alpha must be a positive integer");
    }
    if (!(beta.minCoeff() > 0.0) || !beta.allFinite()) {
        throw ValidationError("beta entries must be positive");
    }
    if (!(gamma.minCoeff() > 0.0) || !gamma.allFinite()) {
        throw ValidationError("gamma entries must be positive");
    }
}

Vec3 posture_error(const Mat3& R_l, const Mat3& R_f, int alpha, ErrorVariant variant) {
    switch (variant) {
        case ErrorVariant::MatrixError:
            return so3::log(R_l * so3::pow(R_f, alpha).transpose());
        case ErrorVariant::VectorError:
            return so3::log(R_l) - alpha * so3::log(R_f);
    }
    throw ValidationError("unknown error variant");
}

Vec3 translation_error(const Vec3& r_l, const Vec3& r_f, const Vec3& beta) {
    return r_l - beta.cwiseProduct(r_f);
}

ErrorJacobians error_jacobians(const Mat3& R_l, const Mat3& R_f, const Mat6& J_l, const Mat6& J_f,
                               const ScalingConfig& cfg, ErrorVariant variant) {
    ErrorJacobians out;
    out.leader = J_l;
    out.follower.bottomRows<3>() = -(cfg.beta.asDiagonal() * J_f.bottomRows<3>());
    if (variant == ErrorVariant::MatrixError) {
        const Mat3 lead_map = so3::pow(R_f, cfg.alpha) * R_l.transpose();
        out.leader.topRows<3>() = lead_map * J_l.topRows<3>();
        out.follower.topRows<3>() = -so3::geom_sum(R_f, cfg.alpha) * J_f.topRows<3>();
    } else {
        out.follower.topRows<3>() = -static_cast<double>(cfg.alpha) * J_f.topRows<3>();
    }
    return out;
}

Vec6 error_rate(const Mat3& R_l, const Mat3& R_f, const Mat6& J_l, const Mat6& J_f,
                const Vec6& theta_dot_l, const Vec6& theta_dot_f, const ScalingConfig& cfg,
                ErrorVariant variant) {
    const ErrorJacobians jac = error_jacobians(R_l, R_f, J_l, J_f, cfg, variant);
    return jac.leader * theta_dot_l + jac.follower * theta_dot_f;
}

Vec6 wrench_error(const Mat6& J_l, const Mat6& J_f, const Vec6& tau_l_reac, const Vec6& tau_f_reac,
                  const Vec6& gamma, double damping) {
    const Vec6 w_l = damped_pinv(J_l, damping).transpose() * tau_l_reac;
    const Vec6 w_f = damped_pinv(J_f, damping).transpose() * tau_f_reac;
    return w_l + gamma.cwiseProduct(w_f);
}

}  // namespace bilat
