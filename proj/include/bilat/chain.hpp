#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

#include "bilat/types.hpp"

namespace bilat {

/// One revolute joint and the rigid link it drives.
///
/// The joint frame is the parent frame moved by (origin_R, origin_p) and then
/// rotated about `axis` by the joint angle. Link mass properties are expressed
/// in that joint frame; `inertia` is taken about the centre of mass.
struct Joint {
    Vec3 axis = Vec3::UnitZ();
    Mat3 origin_R = Mat3::Identity();
    Vec3 origin_p = Vec3::Zero();
    double mass = 0.0;
    Vec3 com = Vec3::Zero();
    Mat3 inertia = Mat3::Zero();
};

/// Serial chain of exactly six revolute joints plus a massless tool frame.
struct ChainModel {
    std::array<Joint, kDof> joints{};
    Vec3 gravity{0.0, 0.0, -9.81};
    Mat3 tool_R = Mat3::Identity();
    Vec3 tool_p = Vec3::Zero();
};

struct JointState {
    Vec6 position = Vec6::Zero();
    Vec6 velocity = Vec6::Zero();
};

/// Base-to-end-effector transform.
struct Pose {
    Mat3 R = Mat3::Identity();
    Vec3 p = Vec3::Zero();
};

/// World-frame placement of every joint frame plus the tool.
struct LinkFrames {
    std::array<Mat3, kDof> R{};
    std::array<Vec3, kDof> p{};
    Pose tool;
};

/// Parses the line-oriented model format:
///
///     gravity=<gx gy gz>
///     joint axis=x|y|z origin_xyz=<3> origin_rpy=<3> mass=<m> com=<3> inertia_diag=<3>
///     ...
///     tool origin_xyz=<3> origin_rpy=<3>
///
/// Lines starting with '#' are comments. Throws ParseError on malformed input
/// and ValidationError when the result violates a model invariant.
ChainModel load_chain(std::string_view text);

/// Reads and parses a model file. Throws IoError if it cannot be read.
ChainModel load_chain_file(const std::filesystem::path& path);

/// Throws ValidationError unless masses are positive, inertias symmetric
/// positive definite and axes unit length.
void validate(const ChainModel& chain);

/// Text of the bundled generic 6-DOF arm model.
std::string_view generic6dof_text();

/// The bundled generic 6-DOF arm, parsed once.
const ChainModel& generic6dof();

LinkFrames link_frames(const ChainModel& chain, const Vec6& theta);

Pose forward_kinematics(const ChainModel& chain, const Vec6& theta);

/// World-frame geometric Jacobian, angular rows on top: [omega; p_dot] = J * theta_dot.
Mat6 geometric_jacobian(const ChainModel& chain, const Vec6& theta);

/// dJ/dt along the state velocity, by central differences with step 1e-6.
Mat6 jacobian_time_derivative(const ChainModel& chain, const JointState& state);

/// J^T (J J^T + damping^2 I)^-1, evaluated through the SVD of J.
/// Throws SingularAndUndamped if damping is zero and cond(J) > 1e12.
Mat6 damped_pinv(const Mat6& J, double damping);

inline constexpr double kSingularCondition = 1e12;

struct IkResult {
    Vec6 theta = Vec6::Zero();
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Damped least-squares inverse kinematics for a full 6-D pose target.
IkResult solve_ik(const ChainModel& chain, const Pose& target, const Vec6& seed,
                  double tolerance = 1e-8, int max_iterations = 500);

}  // namespace bilat
