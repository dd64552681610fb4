#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bilat/controller.hpp"

namespace bilat {

/// Hybrid position/force model of the human operator plus the task geometry.
struct OperatorParams {
    double kp_traj = 50.0;     // 1/s
    double kd_traj = 50.0;     // 1/s
    double radius = 0.15;      // m, circle radius on the leader side
    double duration = 5.0;     // s
    double surface_height = 0.1;  // m, follower-side constraint plane z = h
    /// Diagonal of the selection matrix: 1 = position-controlled direction.
    Vec6 selection = (Vec6() << 1, 1, 1, 1, 1, 0).finished();
    /// Peak-to-trough scale of the pressing force: f_z = amplitude (1 - cos(2 pi cycles t / T)).
    double force_amplitude = 1.0;  // N
    double force_cycles = 3.0;
    /// Final x rotation of the leader's desired posture (reached at t = T).
    double rotation_final = 0.7853981633974483;  // rad

    void validate() const;
};

struct ContactSurface {
    double height = 0.1;
};

struct SimConfig {
    ChainModel chain_l = generic6dof();
    ChainModel chain_f = generic6dof();
    ControllerSettings controller;
    OperatorParams op;
    double frequency = 100.0;  // Hz, control and integration rate
    int substeps = 1;          // physics substeps per control period
    /// Explicit initial joint angles; solved by inverse kinematics when absent.
    std::optional<Vec6> theta0_l;
    std::optional<Vec6> theta0_f;
    /// Seed for the start-up inverse kinematics.
    Vec6 ik_seed = (Vec6() << 0.0, -0.27, 2.0, 0.0, 1.4, 0.0).finished();
    /// Drops both reaction torques; used for free-motion regulation studies.
    bool zero_reactions = false;

    void validate() const;
};

/// Desired leader pose at time t: a circle in the x-y plane at height h*beta_z
/// while the posture rotates about x.
Pose desired_pose(double t, const OperatorParams& op, const Vec3& beta);

/// Desired end-effector wrench of the operator at time t (only the z-force
/// entry is non-zero).
Vec6 desired_wrench(double t, const OperatorParams& op);

/// Load torque the operator puts on the leader joints.
Vec6 operator_reaction(const RobotSnapshot& leader, double t, const OperatorParams& op,
                       const Vec3& beta, double damping);

struct FollowerReaction {
    Vec6 tau = Vec6::Zero();
    bool constrained = false;
};

/// Reaction of the z-plane on the follower given its commanded control torque.
/// At or below the plane the normal component of the commanded wrench is
/// absorbed; above it the reaction is zero.
FollowerReaction follower_reaction(const RobotSnapshot& follower, const Vec6& tau_f_ctrl,
                                   const ContactSurface& surface, const Vec6& selection);

/// Joint velocity whose Cartesian twist is S J theta_dot (the constrained
/// direction removed). Uses an exact inverse of J.
Vec6 project_contact_velocity(const Mat6& J, const Vec6& theta_dot, const Vec6& selection);

/// theta_dot += theta_ddot dt; theta += theta_dot dt.
void semi_implicit_euler(JointState& state, const Vec6& theta_ddot, double dt);

struct SimRecord {
    double t = 0.0;
    JointState leader;
    JointState follower;
    Pose pose_l;
    Pose pose_f;
    Vec3 rotvec_l = Vec3::Zero();
    Vec3 rotvec_f = Vec3::Zero();
    Vec3 omega_e = Vec3::Zero();
    Vec3 r_e = Vec3::Zero();
    Vec6 w_e = Vec6::Zero();
    Vec6 tau_l_reac = Vec6::Zero();
    Vec6 tau_f_reac = Vec6::Zero();
    Vec6 tau_l_ref = Vec6::Zero();
    Vec6 tau_f_ref = Vec6::Zero();
    bool contact = false;
    double cond_H = 0.0;
    double dropped_term_norm = 0.0;
    /// Follower Cartesian twist [omega; v] after any contact projection.
    Vec6 twist_f = Vec6::Zero();
};

using SimLog = std::vector<SimRecord>;

/// Mutable closed-loop state. Owns both robots and the last measured
/// follower reaction.
class World {
public:
    explicit World(SimConfig config);

    const SimConfig& config() const { return config_; }
    std::size_t step_index() const { return step_; }
    double time() const;
    const JointState& leader() const { return leader_; }
    const JointState& follower() const { return follower_; }

    /// Advances one control period and returns the record of the instant the
    /// period started. Throws Diverged on non-finite values or |theta_dot| > 1e3.
    SimRecord step();

private:
    void enforce_contact();

    SimConfig config_;
    ContactSurface surface_;
    JointState leader_;
    JointState follower_;
    Vec6 measured_tau_f_reac_ = Vec6::Zero();
    Vec6 last_acc_l_ = Vec6::Zero();
    Vec6 last_acc_f_ = Vec6::Zero();
    std::size_t step_ = 0;
};

/// Initial joint angles of both robots: leader on the desired pose at t = 0,
/// follower at the 1/beta-scaled position and alpha-th root posture.
std::pair<Vec6, Vec6> initial_configuration(const SimConfig& config);

/// Runs T*f steps. Deterministic: identical configs give identical logs.
SimLog run(const SimConfig& config);

inline constexpr double kMaxJointRate = 1e3;

}  // namespace bilat
