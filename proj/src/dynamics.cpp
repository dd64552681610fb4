#include "bilat/dynamics.hpp"

#include <array>
#include <sstream>

#include "bilat/errors.hpp"
#include "bilat/so3.hpp"

namespace bilat {

Vec6 inverse_dynamics(const ChainModel& chain, const Vec6& theta, const Vec6& theta_dot,
                      const Vec6& theta_ddot, const Vec3& gravity) {
    // Forward pass in link-local frames. The base "accelerates" upward by -g,
    // which folds gravity into every link acceleration.
    std::array<Mat3, kDof> rot_parent{};  // frame i expressed in frame i-1
    std::array<Vec3, kDof> force{};
    std::array<Vec3, kDof> moment{};

    Vec3 w = Vec3::Zero();
    Vec3 wd = Vec3::Zero();
    Vec3 vd = -gravity;
    for (int i = 0; i < kDof; ++i) {
        const Joint& j = chain.joints[i];
        const Mat3 R = j.origin_R * so3::exp(j.axis * theta[i]);
        rot_parent[i] = R;
        const Mat3 Rt = R.transpose();

        const Vec3 vd_origin = Rt * (vd + wd.cross(j.origin_p) + w.cross(w.cross(j.origin_p)));
        const Vec3 w_in = Rt * w;
        const Vec3 w_i = w_in + j.axis * theta_dot[i];
        const Vec3 wd_i = Rt * wd + w_in.cross(j.axis * theta_dot[i]) + j.axis * theta_ddot[i];

        const Vec3 vd_com = vd_origin + wd_i.cross(j.com) + w_i.cross(w_i.cross(j.com));
        force[i] = j.mass * vd_com;
        moment[i] = j.inertia * wd_i + w_i.cross(j.inertia * w_i);

        w = w_i;
        wd = wd_i;
        vd = vd_origin;
    }

    // Backward pass: accumulate the wrench each joint transmits to its link.
    Vec6 tau;
    Vec3 f_child = Vec3::Zero();
    Vec3 n_child = Vec3::Zero();
    for (int i = kDof - 1; i >= 0; --i) {
        const Joint& j = chain.joints[i];
        Vec3 f = force[i];
        Vec3 n = moment[i] + j.com.cross(force[i]);
        if (i + 1 < kDof) {
            const Mat3& Rc = rot_parent[i + 1];
            const Vec3& rc = chain.joints[i + 1].origin_p;
            const Vec3 fc = Rc * f_child;
            f += fc;
            n += Rc * n_child + rc.cross(fc);
        }
        tau[i] = j.axis.dot(n);
        f_child = f;
        n_child = n;
    }
    return tau;
}

Mat6 inertia_matrix(const ChainModel& chain, const Vec6& theta) {
    const LinkFrames frames = link_frames(chain, theta);

    std::array<Vec3, kDof> axis{};
    std::array<Vec3, kDof> com{};
    std::array<Mat3, kDof> inertia{};  // world frame, about the link's own com
    for (int i = 0; i < kDof; ++i) {
        const Joint& j = chain.joints[i];
        axis[i] = frames.R[i] * j.axis;
        com[i] = frames.p[i] + frames.R[i] * j.com;
        inertia[i] = frames.R[i] * j.inertia * frames.R[i].transpose();
    }

    // Composite bodies are built tip to base; subtree k holds links k..5.
    Mat6 M;
    double mass = 0.0;
    Vec3 first_moment = Vec3::Zero();     // sum m_i c_i
    Mat3 origin_inertia = Mat3::Zero();   // about the world origin
    for (int k = kDof - 1; k >= 0; --k) {
        const Joint& j = chain.joints[k];
        const Vec3& c = com[k];
        mass += j.mass;
        first_moment += j.mass * c;
        origin_inertia += inertia[k] + j.mass * (c.squaredNorm() * Mat3::Identity() - c * c.transpose());

        const Vec3 c_sub = first_moment / mass;
        const Mat3 I_sub = origin_inertia -
                           mass * (c_sub.squaredNorm() * Mat3::Identity() - c_sub * c_sub.transpose());

        // Unit acceleration of joint k with everything at rest: the subtree
        // spins about axis k through joint origin k.
        const Vec3& z = axis[k];
        const Vec3 f = mass * z.cross(c_sub - frames.p[k]);
        const Vec3 n_com = I_sub * z;
        for (int i = 0; i <= k; ++i) {
            const Vec3 n = n_com + (c_sub - frames.p[i]).cross(f);
            M(i, k) = axis[i].dot(n);
            M(k, i) = M(i, k);
        }
    }
    return M;
}

Vec6 bias_forces(const ChainModel& chain, const JointState& state) {
    return inverse_dynamics(chain, state.position, state.velocity, Vec6::Zero(), chain.gravity);
}

Vec6 forward_dynamics(const Mat6& M, const Vec6& h, const Vec6& tau_ref, const Vec6& tau_reac) {
    Eigen::SelfAdjointEigenSolver<Mat6> eig(M, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()[0];
    const double hi = eig.eigenvalues()[kDof - 1];
    if (!(lo > 0.0) || hi / lo > kMaxInertiaCondition) {
        std::ostringstream msg;
        msg << "forward_dynamics: inertia matrix ill-conditioned (min eigenvalue " << lo << ")";
        throw IllConditioned(msg.str(), lo > 0.0 ? hi / lo : INFINITY);
    }
    return M.llt().solve(tau_ref - h - tau_reac);
}

Vec6 forward_dynamics(const ChainModel& chain, const JointState& state, const Vec6& tau_ref,
                      const Vec6& tau_reac) {
    return forward_dynamics(inertia_matrix(chain, state.position), bias_forces(chain, state),
                            tau_ref, tau_reac);
}

double kinetic_energy(const ChainModel& chain, const JointState& state) {
    const LinkFrames frames = link_frames(chain, state.position);
    double energy = 0.0;
    Vec3 w = Vec3::Zero();
    for (int i = 0; i < kDof; ++i) {
        const Joint& j = chain.joints[i];
        w += frames.R[i] * j.axis * state.velocity[i];
        const Vec3 c = frames.p[i] + frames.R[i] * j.com;
        Vec3 v = Vec3::Zero();
        for (int k = 0; k <= i; ++k) {
            const Vec3 z = frames.R[k] * chain.joints[k].axis;
            v += z.cross(c - frames.p[k]) * state.velocity[k];
        }
        const Mat3 I_world = frames.R[i] * j.inertia * frames.R[i].transpose();
        energy += 0.5 * j.mass * v.squaredNorm() + 0.5 * w.dot(I_world * w);
    }
    return energy;
}

double potential_energy(const ChainModel& chain, const Vec6& theta) {
    const LinkFrames frames = link_frames(chain, theta);
    double energy = 0.0;
    for (int i = 0; i < kDof; ++i) {
        const Joint& j = chain.joints[i];
        const Vec3 c = frames.p[i] + frames.R[i] * j.com;
        energy -= j.mass * chain.gravity.dot(c);
    }
    return energy;
}

}  // namespace bilat
