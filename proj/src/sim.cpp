#include "bilat/sim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bilat/dynamics.hpp"
#include "bilat/errors.hpp"
#include "bilat/so3.hpp"

namespace bilat {

namespace {

bool constrained(const Pose& pose, const ContactSurface& surface) {
    return pose.p.z() <= surface.height;
}

// d/dt [J_xl J_xf] along the current joint velocities, by central differences.
ErrorJacobians error_jacobian_rate(const SimConfig& cfg, const JointState& l, const JointState& f) {
    constexpr double kStep = 1e-6;
    auto eval = [&](double s) {
        const Vec6 ql = l.position + s * l.velocity;
        const Vec6 qf = f.position + s * f.velocity;
        return error_jacobians(forward_kinematics(cfg.chain_l, ql).R,
                               forward_kinematics(cfg.chain_f, qf).R,
                               geometric_jacobian(cfg.chain_l, ql),
                               geometric_jacobian(cfg.chain_f, qf), cfg.controller.scaling,
                               cfg.controller.variant);
    };
    const ErrorJacobians plus = eval(kStep);
    const ErrorJacobians minus = eval(-kStep);
    return {(plus.leader - minus.leader) / (2.0 * kStep),
            (plus.follower - minus.follower) / (2.0 * kStep)};
}

void check_finite_state(const JointState& s, std::size_t step, const char* who) {
    const bool finite = s.position.allFinite() && s.velocity.allFinite();
    if (!finite || s.velocity.cwiseAbs().maxCoeff() > kMaxJointRate) {
        std::ostringstream msg;
        msg << who << " diverged at step " << step;
        if (finite) {
            msg << " (max |theta_dot| = " << s.velocity.cwiseAbs().maxCoeff() << " rad/s)";
        }
        throw Diverged(msg.str(), step);
    }
}

}  // namespace

void OperatorParams::validate() const {
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        throw ValidationError("duration must be non-negative");
    }
    if (!std::isfinite(kp_traj) || !std::isfinite(kd_traj) || kp_traj < 0.0 || kd_traj < 0.0) {
        throw ValidationError("trajectory gains must be non-negative");
    }
    if (!std::isfinite(radius) || !std::isfinite(surface_height) ||
        !std::isfinite(force_amplitude) || !std::isfinite(force_cycles) ||
        !std::isfinite(rotation_final)) {
        throw ValidationError("operator parameters must be finite");
    }
    for (int i = 0; i < kDof; ++i) {
        if (selection[i] != 0.0 && selection[i] != 1.0) {
            throw ValidationError("selection entries must be 0 or 1");
        }
    }
}

void SimConfig::validate() const {
    if (!(frequency > 0.0) || !std::isfinite(frequency)) {
        throw ValidationError("frequency must be positive");
    }
    if (substeps < 1) {
        throw ValidationError("substeps must be at least 1");
    }
    if (!(controller.damping >= 0.0)) {
        throw ValidationError("damping must be non-negative");
    }
    if (!std::isfinite(controller.h_error_scale)) {
        throw ValidationError("h_error_scale must be finite");
    }
    bilat::validate(chain_l);
    bilat::validate(chain_f);
    controller.scaling.validate();
    controller.gains.validate();
    op.validate();
}

Pose desired_pose(double t, const OperatorParams& op, const Vec3& beta) {
    const double phase = 2.0 * std::numbers::pi * t / op.duration;
    Pose pose;
    pose.p = Vec3(op.radius * std::cos(phase), op.radius * std::sin(phase),
                  op.surface_height * beta.z());
    pose.R = so3::from_euler_xyz(Vec3(op.rotation_final * t / op.duration, 0.0, 0.0));
    return pose;
}

Vec6 desired_wrench(double t, const OperatorParams& op) {
    Vec6 w = Vec6::Zero();
    w[5] = op.force_amplitude *
           (1.0 - std::cos(2.0 * std::numbers::pi * op.force_cycles * t / op.duration));
    return w;
}

Vec6 operator_reaction(const RobotSnapshot& leader, double t, const OperatorParams& op,
                       const Vec3& beta, double damping) {
    const Pose desired = desired_pose(t, op, beta);
    const Mat3& R_l = leader.pose.R;

    Vec6 twist;
    twist.head<3>() = R_l * so3::log(R_l.transpose() * desired.R);
    twist.tail<3>() = desired.p - leader.pose.p;

    const Mat6 J_pinv = damped_pinv(leader.J, damping);
    const Vec6 theta_dot_d = op.kp_traj * J_pinv * twist;
    const Vec6 tau_traj = op.kd_traj * leader.M * (theta_dot_d - leader.state.velocity);

    // Reactions enter the plant as loads (M theta_ddot = tau_ctrl - tau_reac), so the
    // hand's tracking effort appears with a negative sign while the pressing force
    // is a load pushing against the tool.
    const Vec6 tracking_wrench = op.selection.cwiseProduct(J_pinv.transpose() * tau_traj);
    const Vec6 force_wrench = (Vec6::Ones() - op.selection).cwiseProduct(desired_wrench(t, op));
    return leader.J.transpose() * (-tracking_wrench + force_wrench);
}

FollowerReaction follower_reaction(const RobotSnapshot& follower, const Vec6& tau_f_ctrl,
                                   const ContactSurface& surface, const Vec6& selection) {
    FollowerReaction out;
    if (!constrained(follower.pose, surface)) {
        return out;
    }
    out.constrained = true;
    const Vec6 wrench = damped_pinv(follower.J, 0.0).transpose() * tau_f_ctrl;
    out.tau = follower.J.transpose() * (Vec6::Ones() - selection).cwiseProduct(wrench);
    return out;
}

Vec6 project_contact_velocity(const Mat6& J, const Vec6& theta_dot, const Vec6& selection) {
    const Vec6 twist = selection.cwiseProduct(J * theta_dot);
    return J.partialPivLu().solve(twist);
}

void semi_implicit_euler(JointState& state, const Vec6& theta_ddot, double dt) {
    state.velocity += theta_ddot * dt;
    state.position += state.velocity * dt;
}

std::pair<Vec6, Vec6> initial_configuration(const SimConfig& config) {
    const Vec3& beta = config.controller.scaling.beta;
    const int alpha = config.controller.scaling.alpha;
    const Pose lead = desired_pose(0.0, config.op, beta);

    Vec6 theta_l;
    if (config.theta0_l) {
        theta_l = *config.theta0_l;
    } else {
        const IkResult ik = solve_ik(config.chain_l, lead, config.ik_seed);
        if (!ik.converged) {
            throw ValidationError("start-up inverse kinematics failed for the leader (residual " +
                                  std::to_string(ik.residual) + ")");
        }
        theta_l = ik.theta;
    }

    Vec6 theta_f;
    if (config.theta0_f) {
        theta_f = *config.theta0_f;
    } else {
        Pose follow;
        follow.p = lead.p.cwiseQuotient(beta);
        follow.R = so3::exp(so3::log(lead.R) / static_cast<double>(alpha));
        const IkResult ik = solve_ik(config.chain_f, follow, config.ik_seed);
        if (!ik.converged) {
            throw ValidationError("start-up inverse kinematics failed for the follower (residual " +
                                  std::to_string(ik.residual) + ")");
        }
        theta_f = ik.theta;
    }
    return {theta_l, theta_f};
}

World::World(SimConfig config) : config_(std::move(config)) {
    config_.validate();
    surface_.height = config_.op.surface_height;
    const auto [theta_l, theta_f] = initial_configuration(config_);
    leader_.position = theta_l;
    follower_.position = theta_f;
}

double World::time() const { return static_cast<double>(step_) / config_.frequency; }

void World::enforce_contact() {
    const Vec6& theta = follower_.position;
    if (constrained(forward_kinematics(config_.chain_f, theta), surface_)) {
        follower_.velocity = project_contact_velocity(geometric_jacobian(config_.chain_f, theta),
                                                      follower_.velocity, config_.op.selection);
    }
}

SimRecord World::step() {
    const ControllerSettings& ctl = config_.controller;
    const double t = time();

    enforce_contact();
    const RobotSnapshot lead = snapshot(config_.chain_l, leader_);
    const RobotSnapshot follow = snapshot(config_.chain_f, follower_);

    Vec6 tau_l_reac = Vec6::Zero();
    if (!config_.zero_reactions) {
        tau_l_reac = operator_reaction(lead, t, config_.op, ctl.scaling.beta, ctl.damping);
    }
    // The controller sees the follower reaction measured during the previous period.
    const BilateralStep ctrl =
        bilateral_control(lead, follow, tau_l_reac, measured_tau_f_reac_, ctl);

    SimRecord rec;
    rec.t = t;
    rec.leader = leader_;
    rec.follower = follower_;
    rec.pose_l = lead.pose;
    rec.pose_f = follow.pose;
    rec.rotvec_l = so3::log(lead.pose.R);
    rec.rotvec_f = so3::log(follow.pose.R);
    rec.omega_e = ctrl.error.omega_e;
    rec.r_e = ctrl.error.r_e;
    rec.w_e = ctrl.error.w_e;
    rec.tau_l_reac = tau_l_reac;
    rec.tau_l_ref = ctrl.control.tau_l_ref;
    rec.tau_f_ref = ctrl.control.tau_f_ref;
    rec.cond_H = ctrl.control.h_condition;
    rec.twist_f = follow.J * follower_.velocity;

    // Terms the control law omits: -H^-1 [J_x' theta_dot; 0] and
    // H^-1 diag(0, I) H diag(M_l, M_f) theta_ddot, with the last realised
    // accelerations standing in for the current ones.
    {
        const ErrorJacobians jx_rate = error_jacobian_rate(config_, leader_, follower_);
        Vec12 velocity_term = Vec12::Zero();
        velocity_term.head<6>() =
            jx_rate.leader * leader_.velocity + jx_rate.follower * follower_.velocity;
        Vec12 inertial;
        inertial << lead.M * last_acc_l_, follow.M * last_acc_f_;
        Vec12 acc_term = ctrl.H * inertial;
        acc_term.head<6>().setZero();
        rec.dropped_term_norm = ctrl.H.partialPivLu().solve(acc_term - velocity_term).norm();
    }

    // Plant integration over one control period with zero-order-hold torques.
    const double scale = 1.0 + ctl.h_error_scale;
    const Vec6 tau_f_ctrl = ctrl.control.tau_f_ref - scale * follow.h;
    const double dt = 1.0 / (config_.frequency * config_.substeps);
    FollowerReaction reaction;
    for (int sub = 0; sub < config_.substeps; ++sub) {
        const RobotSnapshot l_now = sub == 0 ? lead : snapshot(config_.chain_l, leader_);
        const RobotSnapshot f_now = sub == 0 ? follow : snapshot(config_.chain_f, follower_);
        reaction = config_.zero_reactions
                       ? FollowerReaction{}
                       : follower_reaction(f_now, tau_f_ctrl, surface_, config_.op.selection);
        if (sub == 0) {
            rec.tau_f_reac = reaction.tau;
            rec.contact = reaction.constrained;
        }
        last_acc_l_ = forward_dynamics(l_now.M, l_now.h, ctrl.control.tau_l_ref, tau_l_reac);
        last_acc_f_ = forward_dynamics(f_now.M, f_now.h, ctrl.control.tau_f_ref, reaction.tau);
        semi_implicit_euler(leader_, last_acc_l_, dt);
        if (reaction.constrained) {
            follower_.velocity += last_acc_f_ * dt;
            follower_.velocity =
                project_contact_velocity(f_now.J, follower_.velocity, config_.op.selection);
            follower_.position += follower_.velocity * dt;
        } else {
            semi_implicit_euler(follower_, last_acc_f_, dt);
        }
    }
    measured_tau_f_reac_ = rec.tau_f_reac;

    ++step_;
    check_finite_state(leader_, step_, "leader");
    check_finite_state(follower_, step_, "follower");
    return rec;
}

SimLog run(const SimConfig& config) {
    config.validate();
    const auto steps = static_cast<std::size_t>(std::llround(config.op.duration * config.frequency));
    SimLog log;
    if (steps == 0) {
        return log;
    }
    log.reserve(steps);
    World world(config);
    for (std::size_t k = 0; k < steps; ++k) {
        log.push_back(world.step());
    }
    return log;
}

}  // namespace bilat
