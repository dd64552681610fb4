#pragma once

#include "bilat/bilateral_error.hpp"
#include "bilat/chain.hpp"

namespace bilat {

/// Per-dimension diagonal gains of the imposed error dynamics:
/// x_e'' = -kp x_e - kd x_e' and w_e -> -kw w_e.
struct Gains {
    Vec6 kp = Vec6::Constant(100.0);
    Vec6 kd = Vec6::Constant(10.0);
    Vec6 kw = Vec6::Constant(0.1);

    /// Throws ValidationError on a negative or non-finite entry.
    void validate() const;
};

inline constexpr double kMaxHCondition = 1e12;

/// 2-norm condition number via the singular values.
double condition_number(const Mat12& H);

/// [[J_xl M_l^-1, J_xf M_f^-1], [J_l^{+T}, gamma J_f^{+T}]].
///
/// The inertia inverses are applied through Cholesky solves. Throws
/// IllConditioned when cond(H) > 1e12.
Mat12 assemble_h(const ErrorJacobians& jx, const Mat6& M_l, const Mat6& M_f, const Mat6& J_l,
                 const Mat6& J_f, const Vec6& gamma, double damping);

/// [-kp x_e - kd x_e_dot; -kw w_e].
Vec12 target_dynamics(const Vec6& x_e, const Vec6& x_e_dot, const Vec6& w_e, const Gains& gains);

struct ControlOutput {
    Vec6 tau_l_ref = Vec6::Zero();
    Vec6 tau_f_ref = Vec6::Zero();
    double h_condition = 0.0;
    Vec12 target = Vec12::Zero();
    Vec12 feedforward = Vec12::Zero();
};

/// tau_ref = H^-1 target + H^-1 diag(I, 0) H tau_reac + h_hat.
///
/// Both H^-1 products are LU solves against the same factorisation; H^-1 is
/// never formed. Throws IllConditioned when cond(H) > 1e12.
ControlOutput control_torques(const Mat12& H, const Vec12& target, const Vec6& tau_l_reac,
                              const Vec6& tau_f_reac, const Vec6& h_hat_l, const Vec6& h_hat_f);

/// Kinematic and dynamic quantities of one robot at one instant.
struct RobotSnapshot {
    JointState state;
    Pose pose;
    Mat6 J = Mat6::Zero();
    Mat6 M = Mat6::Identity();
    Vec6 h = Vec6::Zero();
};

RobotSnapshot snapshot(const ChainModel& chain, const JointState& state);

/// Everything computed in one control step.
struct BilateralStep {
    ErrorState error;
    ErrorJacobians jx;
    Mat12 H = Mat12::Zero();
    ControlOutput control;
};

struct ControllerSettings {
    ScalingConfig scaling;
    Gains gains;
    ErrorVariant variant = ErrorVariant::MatrixError;
    double damping = 1e-6;
    /// h_hat = (1 + h_error_scale) h.
    double h_error_scale = 0.0;
};

/// Full control law for one step: errors, H, target dynamics and torques.
BilateralStep bilateral_control(const RobotSnapshot& leader, const RobotSnapshot& follower,
                                const Vec6& tau_l_reac, const Vec6& tau_f_reac,
                                const ControllerSettings& settings);

}  // namespace bilat
