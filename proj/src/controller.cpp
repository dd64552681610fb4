#include "bilat/controller.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "bilat/dynamics.hpp"
#include "bilat/errors.hpp"

namespace bilat {

namespace {

void check_condition(double cond, const char* where) {
    if (!(cond <= kMaxHCondition)) {
        std::ostringstream msg;
        msg << where << ": H is ill-conditioned (cond = " << cond << ")";
        throw IllConditioned(msg.str(), cond);
    }
}

}  // namespace

void Gains::validate() const {
    for (const Vec6* g : {&kp, &kd, &kw}) {
        if (!g->allFinite() || g->minCoeff() < 0.0) {
            throw ValidationError("gains must be finite and non-negative");
        }
    }
}

double condition_number(const Mat12& H) {
    Eigen::JacobiSVD<Mat12> svd(H);
    const auto& s = svd.singularValues();
    const double smin = s[11];
    return smin > 0.0 ? s[0] / smin : INFINITY;
}

Mat12 assemble_h(const ErrorJacobians& jx, const Mat6& M_l, const Mat6& M_f, const Mat6& J_l,
                 const Mat6& J_f, const Vec6& gamma, double damping) {
    Mat12 H;
    // J_x M^-1 = (M^-1 J_x^T)^T because M is symmetric.
    H.topLeftCorner<6, 6>() = M_l.llt().solve(jx.leader.transpose()).transpose();
    H.topRightCorner<6, 6>() = M_f.llt().solve(jx.follower.transpose()).transpose();
    H.bottomLeftCorner<6, 6>() = damped_pinv(J_l, damping).transpose();
    H.bottomRightCorner<6, 6>() = gamma.asDiagonal() * damped_pinv(J_f, damping).transpose();
    check_condition(condition_number(H), "assemble_h");
    return H;
}

Vec12 target_dynamics(const Vec6& x_e, const Vec6& x_e_dot, const Vec6& w_e, const Gains& gains) {
    Vec12 target;
    target.head<6>() = -gains.kp.cwiseProduct(x_e) - gains.kd.cwiseProduct(x_e_dot);
    target.tail<6>() = -gains.kw.cwiseProduct(w_e);
    return target;
}

ControlOutput control_torques(const Mat12& H, const Vec12& target, const Vec6& tau_l_reac,
                              const Vec6& tau_f_reac, const Vec6& h_hat_l, const Vec6& h_hat_f) {
    ControlOutput out;
    out.h_condition = condition_number(H);
    check_condition(out.h_condition, "control_torques");

    const Eigen::PartialPivLU<Mat12> lu(H);
    Vec12 tau_reac;
    tau_reac << tau_l_reac, tau_f_reac;
    // diag(I, 0) H tau_reac keeps only the position-error rows.
    Vec12 projected = H * tau_reac;
    projected.tail<6>().setZero();

    out.target = target;
    out.feedforward = lu.solve(projected);
    const Vec12 tau = lu.solve(target) + out.feedforward;
    out.tau_l_ref = tau.head<6>() + h_hat_l;
    out.tau_f_ref = tau.tail<6>() + h_hat_f;
    return out;
}

RobotSnapshot snapshot(const ChainModel& chain, const JointState& state) {
    RobotSnapshot s;
    s.state = state;
    s.pose = forward_kinematics(chain, state.position);
    s.J = geometric_jacobian(chain, state.position);
    s.M = inertia_matrix(chain, state.position);
    s.h = bias_forces(chain, state);
    return s;
}

BilateralStep bilateral_control(const RobotSnapshot& leader, const RobotSnapshot& follower,
                                const Vec6& tau_l_reac, const Vec6& tau_f_reac,
                                const ControllerSettings& settings) {
    const ScalingConfig& sc = settings.scaling;
    BilateralStep step;

    step.error.omega_e = posture_error(leader.pose.R, follower.pose.R, sc.alpha, settings.variant);
    step.error.r_e = translation_error(leader.pose.p, follower.pose.p, sc.beta);
    step.error.x_e << step.error.omega_e, step.error.r_e;

    step.jx = error_jacobians(leader.pose.R, follower.pose.R, leader.J, follower.J, sc,
                              settings.variant);
    step.error.x_e_dot = step.jx.leader * leader.state.velocity +
                         step.jx.follower * follower.state.velocity;
    step.error.w_e =
        wrench_error(leader.J, follower.J, tau_l_reac, tau_f_reac, sc.gamma, settings.damping);

    step.H = assemble_h(step.jx, leader.M, follower.M, leader.J, follower.J, sc.gamma,
                        settings.damping);
    const Vec12 target =
        target_dynamics(step.error.x_e, step.error.x_e_dot, step.error.w_e, settings.gains);
    const double h_scale = 1.0 + settings.h_error_scale;
    step.control = control_torques(step.H, target, tau_l_reac, tau_f_reac, h_scale * leader.h,
                                   h_scale * follower.h);
    return step;
}

}  // namespace bilat
