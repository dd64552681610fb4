#include "bilat/selfcheck.hpp"

#include <algorithm>
#include <numbers>
#include <random>

#include "bilat/controller.hpp"
#include "bilat/dynamics.hpp"
#include "bilat/so3.hpp"

namespace bilat {

namespace {

class Sampler {
public:
    explicit Sampler(unsigned seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng_); }

    Vec3 vec3(double scale) { return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)}; }

    Vec6 vec6(double scale) {
        Vec6 v;
        for (int i = 0; i < 6; ++i) {
            v[i] = uniform(-scale, scale);
        }
        return v;
    }

    Vec3 rotation_vector(double max_angle) {
        Vec3 axis = vec3(1.0);
        while (axis.norm() < 1e-3) {
            axis = vec3(1.0);
        }
        return axis.normalized() * uniform(0.0, max_angle);
    }

private:
    std::mt19937_64 rng_;
};

CheckResult finish(std::string name, double worst, double tol) {
    return {std::move(name), worst <= tol, worst, tol};
}

}  // namespace

std::vector<CheckResult> run_self_check(unsigned seed) {
    Sampler s(seed);
    const ChainModel& arm = generic6dof();
    std::vector<CheckResult> out;

    {
        double worst = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const Vec3 v = s.rotation_vector(std::numbers::pi - 1e-3);
            worst = std::max(worst, (so3::log(so3::exp(v)) - v).norm());
        }
        out.push_back(finish("so3 log(exp(v)) roundtrip", worst, 1e-9));
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 500; ++i) {
            const Mat3 R = so3::exp(s.rotation_vector(std::numbers::pi - 1e-3));
            const Vec3 w = s.vec3(5.0);
            worst = std::max(worst, (so3::vee(R * so3::hat(w) * R.transpose()) - R * w).norm());
        }
        out.push_back(finish("so3 conjugation identity", worst, 1e-12));
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Mat3 R = so3::exp(s.rotation_vector(3.0));
            const int n = 1 + i % 5;
            const Mat3 lhs = so3::geom_sum(R, n) * (Mat3::Identity() - R);
            worst = std::max(worst, (lhs - (Mat3::Identity() - so3::pow(R, n))).norm());
        }
        out.push_back(finish("so3 geometric-sum telescoping", worst, 1e-10));
    }
    {
        double crba = 0.0;
        double decomposition = 0.0;
        double roundtrip = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vec6 q = s.vec6(std::numbers::pi);
            const Vec6 qd = s.vec6(2.0);
            const Vec6 qdd = s.vec6(5.0);
            const Mat6 M = inertia_matrix(arm, q);
            for (int k = 0; k < kDof; ++k) {
                const Vec6 col = inverse_dynamics(arm, q, Vec6::Zero(), Vec6::Unit(k), Vec3::Zero());
                crba = std::max(crba, (M.col(k) - col).cwiseAbs().maxCoeff());
            }
            const JointState st{q, qd};
            const Vec6 tau = inverse_dynamics(arm, q, qd, qdd, arm.gravity);
            decomposition =
                std::max(decomposition, (tau - M * qdd - bias_forces(arm, st)).cwiseAbs().maxCoeff());
            roundtrip = std::max(
                roundtrip, (forward_dynamics(arm, st, tau, Vec6::Zero()) - qdd).cwiseAbs().maxCoeff());
        }
        out.push_back(finish("CRBA columns match RNEA", crba, 1e-8));
        out.push_back(finish("inverse dynamics = M qdd + h", decomposition, 1e-8));
        out.push_back(finish("forward/inverse dynamics roundtrip", roundtrip, 1e-8));
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            Mat6 J = Mat6::Identity() * 2.0;
            for (int r = 0; r < 6; ++r) {
                J.row(r) += s.vec6(0.5).transpose();
            }
            worst = std::max(worst, (damped_pinv(J, 0.0) * J - Mat6::Identity()).norm());
        }
        out.push_back(finish("undamped pseudoinverse identity", worst, 1e-8));
    }
    {
        // Controller: substituting the returned torques back into the
        // reaction-free error-dynamics map must reproduce the target.
        double worst = 0.0;
        ControllerSettings settings;
        for (int i = 0; i < 50; ++i) {
            const Vec6 ql = (Vec6() << 0.0, -0.27, 2.0, 0.0, 1.4, 0.0).finished() + s.vec6(0.3);
            const Vec6 qf = (Vec6() << 0.0, -0.27, 2.0, 0.0, 1.4, 0.0).finished() + s.vec6(0.3);
            const RobotSnapshot l = snapshot(arm, {ql, s.vec6(0.5)});
            const RobotSnapshot f = snapshot(arm, {qf, s.vec6(0.5)});
            const Vec6 tl = s.vec6(1.0);
            const Vec6 tf = s.vec6(1.0);
            const BilateralStep step = bilateral_control(l, f, tl, tf, settings);
            Vec12 tau;
            tau << step.control.tau_l_ref - l.h, step.control.tau_f_ref - f.h;
            Vec12 reac;
            reac << tl, tf;
            Vec12 realised = step.H * tau;
            realised.head<6>() -= (step.H * reac).head<6>();
            worst = std::max(worst, (realised - step.control.target).cwiseAbs().maxCoeff());
        }
        out.push_back(finish("controller realises the target error dynamics", worst, 1e-8));
    }
    return out;
}

}  // namespace bilat
