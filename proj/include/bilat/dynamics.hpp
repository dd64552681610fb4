#pragma once

#include "bilat/chain.hpp"

namespace bilat {

/// Recursive Newton-Euler inverse dynamics. `gravity` overrides the model's
/// gravity vector so callers can evaluate gravity-free terms.
Vec6 inverse_dynamics(const ChainModel& chain, const Vec6& theta, const Vec6& theta_dot,
                      const Vec6& theta_ddot, const Vec3& gravity);

/// Joint-space inertia matrix by the composite-rigid-body algorithm.
Mat6 inertia_matrix(const ChainModel& chain, const Vec6& theta);

/// Lumped centrifugal, Coriolis and gravity torques under the model's gravity.
Vec6 bias_forces(const ChainModel& chain, const JointState& state);

inline constexpr double kMaxInertiaCondition = 1e10;

/// Solves M(theta) theta_ddot = tau_ref - h(theta, theta_dot) - tau_reac.
/// Throws IllConditioned if cond(M) > 1e10.
Vec6 forward_dynamics(const ChainModel& chain, const JointState& state, const Vec6& tau_ref,
                      const Vec6& tau_reac);

/// Same as above with M and h already evaluated at the state.
Vec6 forward_dynamics(const Mat6& M, const Vec6& h, const Vec6& tau_ref, const Vec6& tau_reac);

/// Sum of link kinetic energies, evaluated link by link from the velocity
/// recursion rather than through M.
double kinetic_energy(const ChainModel& chain, const JointState& state);

/// Gravitational potential energy relative to the base origin.
double potential_energy(const ChainModel& chain, const Vec6& theta);

}  // namespace bilat
