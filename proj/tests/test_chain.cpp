#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "bilat/chain.hpp"
#include "bilat/errors.hpp"
#include "bilat/so3.hpp"
#include "oracles.hpp"

using namespace bilat;

namespace {

std::string model_text() { return std::string(generic6dof_text()); }

std::string replace_first(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    EXPECT_NE(at, std::string::npos) << from;
    text.replace(at, from.size(), to);
    return text;
}

Mat3 pose_rotation(const oracle::Transform& T) { return T.topLeftCorner<3, 3>(); }
Vec3 pose_position(const oracle::Transform& T) { return T.topRightCorner<3, 1>(); }

TEST(ChainLoad, BundledModelHasSixValidJoints) {
    const ChainModel& arm = generic6dof();
    EXPECT_NO_THROW(validate(arm));
    EXPECT_EQ(arm.gravity, Vec3(0, 0, -9.81));
    for (const Joint& j : arm.joints) {
        EXPECT_GT(j.mass, 0.0);
        EXPECT_NEAR(j.axis.norm(), 1.0, 1e-12);
    }
}

TEST(ChainLoad, ModelFileMatchesEmbeddedCopy) {
    std::ifstream in(std::string(BILAT_SOURCE_DIR) + "/models/generic6dof.model");
    ASSERT_TRUE(in);
    std::stringstream buffer;
    buffer << in.rdbuf();
    EXPECT_EQ(buffer.str(), model_text());

    const ChainModel from_file = load_chain_file(std::string(BILAT_SOURCE_DIR) + "/models/generic6dof.model");
    const Vec6 q = oracle::working_posture();
    EXPECT_EQ(forward_kinematics(from_file, q).p, forward_kinematics(generic6dof(), q).p);
}

TEST(ChainLoad, RejectsSevenJoints) {
    std::string text = model_text();
    const auto first = text.find("joint ");
    const auto eol = text.find('\n', first);
    text.insert(eol + 1, text.substr(first, eol - first + 1));
    EXPECT_THROW(load_chain(text), ValidationError);
}

TEST(ChainLoad, RejectsFiveJoints) {
    std::string text = model_text();
    const auto first = text.find("joint ");
    text.erase(first, text.find('\n', first) - first + 1);
    EXPECT_THROW(load_chain(text), ValidationError);
}

TEST(ChainLoad, RejectsNegativeMass) {
    EXPECT_THROW(load_chain(replace_first(model_text(), "mass=0.80", "mass=-1")), ValidationError);
}

TEST(ChainLoad, MalformedLinesAreParseErrors) {
    EXPECT_THROW(load_chain(replace_first(model_text(), "axis=z", "axis=w")), ParseError);
    EXPECT_THROW(load_chain(replace_first(model_text(), "mass=0.80", "mass=heavy")), ParseError);
    EXPECT_THROW(load_chain(replace_first(model_text(), "joint ", "link ")), ParseError);
    EXPECT_THROW(load_chain(replace_first(model_text(), "origin_xyz=0 0 0.05", "origin_xyz=0 0")), ParseError);
}

TEST(ChainLoad, MissingFileIsIoError) {
    EXPECT_THROW(load_chain_file("/nonexistent/arm.model"), IoError);
}

TEST(ChainLoad, CommentsAndBlankLinesIgnored) {
    const std::string text = "# leading comment\n\n" + model_text() + "\n# trailing\n";
    EXPECT_NO_THROW(load_chain(text));
}

TEST(ForwardKinematics, ZeroAnglesComposeFixedTransforms) {
    const ChainModel& arm = generic6dof();
    Mat3 R = Mat3::Identity();
    Vec3 p = Vec3::Zero();
    for (const Joint& j : arm.joints) {
        p += R * j.origin_p;
        R = R * j.origin_R;
    }
    p += R * arm.tool_p;
    R = R * arm.tool_R;
    const Pose pose = forward_kinematics(arm, Vec6::Zero());
    EXPECT_LT((pose.R - R).norm(), 1e-15);
    EXPECT_LT((pose.p - p).norm(), 1e-15);
}

TEST(ForwardKinematics, BaseJointRotatesAboutZ) {
    const ChainModel& arm = generic6dof();
    oracle::Rng rng(20);
    for (int i = 0; i < 20; ++i) {
        const Vec6 q = rng.vec6(2.0);
        const double phi = rng.uniform(-3.0, 3.0);
        Vec6 turned = q;
        turned[0] += phi;
        const Vec3 expected = oracle::axis_rotation(Vec3::UnitZ(), phi) * forward_kinematics(arm, q).p;
        EXPECT_LT((forward_kinematics(arm, turned).p - expected).norm(), 1e-14);
    }
}

TEST(ForwardKinematics, MatchesHomogeneousComposition) {
    const ChainModel& arm = generic6dof();
    oracle::Rng rng(21);
    for (int i = 0; i < 1000; ++i) {
        const Vec6 q = rng.vec6(3.14);
        const Pose pose = forward_kinematics(arm, q);
        const oracle::Transform T = oracle::fk(arm, q);
        ASSERT_LT((pose.R - pose_rotation(T)).norm(), 1e-12);
        ASSERT_LT((pose.p - pose_position(T)).norm(), 1e-12);
        ASSERT_TRUE(so3::is_rotation(pose.R));
    }
}

TEST(ForwardKinematics, LinkFramesEndAtTool) {
    const ChainModel& arm = generic6dof();
    const Vec6 q = oracle::working_posture();
    const LinkFrames frames = link_frames(arm, q);
    const oracle::Frames expected = oracle::frames(arm, q);
    for (int i = 0; i < kDof; ++i) {
        EXPECT_LT((frames.R[i] - pose_rotation(expected.joint[i])).norm(), 1e-14);
        EXPECT_LT((frames.p[i] - pose_position(expected.joint[i])).norm(), 1e-14);
    }
    EXPECT_LT((frames.tool.p - forward_kinematics(arm, q).p).norm(), 1e-15);
}

TEST(GeometricJacobian, SingleJointRateGivesItsColumn) {
    const ChainModel& arm = generic6dof();
    const Vec6 q = oracle::working_posture();
    const Mat6 J = geometric_jacobian(arm, q);
    for (int i = 0; i < kDof; ++i) {
        const Vec6 twist = J * Vec6::Unit(i);
        EXPECT_EQ(twist, J.col(i));
    }
}

TEST(GeometricJacobian, MatchesFiniteDifferenceOracle) {
    const ChainModel& arm = generic6dof();
    oracle::Rng rng(22);
    for (int i = 0; i < 1000; ++i) {
        const Vec6 q = rng.vec6(3.0);
        const Vec6 qd = rng.vec6(2.0);
        const Mat6 J = geometric_jacobian(arm, q);
        const Mat6 fd = oracle::fd_jacobian(arm, q);
        ASSERT_LT((J - fd).cwiseAbs().maxCoeff(), 1e-5);
        ASSERT_LE((fd * qd - J * qd).norm(), 1e-4 * (1.0 + qd.norm()));
    }
}

TEST(GeometricJacobian, CollinearWristIsRankDeficient) {
    // Joint 5 (y) at zero lines up the axes of joints 4 and 6 (both z).
    const ChainModel& arm = generic6dof();
    Vec6 q = oracle::working_posture();
    q[4] = 0.0;
    const Mat6 J = geometric_jacobian(arm, q);
    Eigen::JacobiSVD<Mat6> svd(J);
    svd.setThreshold(1e-10);
    EXPECT_LT(svd.rank(), 6);
    EXPECT_THROW(damped_pinv(J, 0.0), SingularAndUndamped);
    EXPECT_NO_THROW(damped_pinv(J, 1e-3));

    EXPECT_EQ(Eigen::JacobiSVD<Mat6>(geometric_jacobian(arm, oracle::working_posture())).rank(), 6);
}

TEST(JacobianRate, ZeroVelocityGivesZero) {
    const JointState s{oracle::working_posture(), Vec6::Zero()};
    EXPECT_EQ(jacobian_time_derivative(generic6dof(), s), Mat6::Zero());
}

TEST(JacobianRate, MatchesDirectionalDifference) {
    const ChainModel& arm = generic6dof();
    oracle::Rng rng(23);
    constexpr double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const JointState s{rng.vec6(3.0), rng.vec6(2.0)};
        const Mat6 fd = (geometric_jacobian(arm, s.position + h * s.velocity) -
                         geometric_jacobian(arm, s.position - h * s.velocity)) /
                        (2 * h);
        EXPECT_LT((jacobian_time_derivative(arm, s) - fd).cwiseAbs().maxCoeff(), 1e-4);
    }
}

TEST(JacobianRate, LinearInVelocity) {
    const ChainModel& arm = generic6dof();
    oracle::Rng rng(24);
    const JointState s{rng.vec6(2.0), rng.vec6(1.0)};
    const JointState doubled{s.position, 2.0 * s.velocity};
    const Mat6 a = jacobian_time_derivative(arm, s);
    EXPECT_LT((jacobian_time_derivative(arm, doubled) - 2.0 * a).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(JacobianRate, ProductRuleOnPolynomialTrajectory) {
    const ChainModel& arm = generic6dof();
    oracle::Rng rng(25);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec6 a0 = rng.vec6(2.0), a1 = rng.vec6(1.0), a2 = rng.vec6(1.0);
        auto q = [&](double t) -> Vec6 { return a0 + a1 * t + a2 * t * t; };
        auto qd = [&](double t) -> Vec6 { return a1 + 2.0 * a2 * t; };
        const Vec6 qdd = 2.0 * a2;
        const double t = 0.3;
        const double h = 1e-5;
        const Vec6 fd = (geometric_jacobian(arm, q(t + h)) * qd(t + h) -
                         geometric_jacobian(arm, q(t - h)) * qd(t - h)) /
                        (2 * h);
        const JointState s{q(t), qd(t)};
        const Vec6 rule = jacobian_time_derivative(arm, s) * qd(t) + geometric_jacobian(arm, q(t)) * qdd;
        EXPECT_LT((fd - rule).norm(), 1e-3);
    }
}

TEST(DampedPinv, IdentityAndDirectInverse) {
    EXPECT_LT((damped_pinv(Mat6::Identity(), 0.0) - Mat6::Identity()).norm(), 1e-15);
    oracle::Rng rng(26);
    for (int i = 0; i < 200; ++i) {
        Mat6 J = Mat6::Identity() * 2.0;
        for (int r = 0; r < 6; ++r) J.row(r) += rng.vec6(0.5).transpose();
        const Mat6 P = damped_pinv(J, 0.0);
        EXPECT_LE((J * P - Mat6::Identity()).norm(), 1e-9);
        EXPECT_LE((P * J - Mat6::Identity()).norm(), 1e-8);
        EXPECT_LT((P - J.partialPivLu().inverse()).norm(), 1e-9);
    }
}

TEST(DampedPinv, DampedMatchesNormalEquations) {
    oracle::Rng rng(27);
    for (int i = 0; i < 50; ++i) {
        Mat6 J;
        for (int r = 0; r < 6; ++r) J.row(r) = rng.vec6(1.0).transpose();
        const double lambda = rng.uniform(1e-3, 0.5);
        const Mat6 expected = J.transpose() * (J * J.transpose() + lambda * lambda * Mat6::Identity()).inverse();
        EXPECT_LT((damped_pinv(J, lambda) - expected).norm(), 1e-9);
    }
}

TEST(DampedPinv, RankDeficientUndampedThrows) {
    Mat6 J = Mat6::Identity();
    J(5, 5) = 0.0;
    EXPECT_THROW(damped_pinv(J, 0.0), SingularAndUndamped);
    // With damping it tends to the Moore-Penrose inverse.
    EXPECT_LT((damped_pinv(J, 1e-8) - oracle::cod_pinv(J)).norm(), 1e-9);
}

TEST(InverseKinematics, ReachesForwardKinematicsTarget) {
    const ChainModel& arm = generic6dof();
    oracle::Rng rng(28);
    for (int i = 0; i < 20; ++i) {
        const Vec6 q = oracle::working_posture() + rng.vec6(0.3);
        const Pose target = forward_kinematics(arm, q);
        const IkResult ik = solve_ik(arm, target, oracle::working_posture());
        ASSERT_TRUE(ik.converged);
        const Pose reached = forward_kinematics(arm, ik.theta);
        EXPECT_LT((reached.p - target.p).norm(), 1e-8);
        EXPECT_LT(so3::angle(reached.R.transpose() * target.R), 1e-8);
    }
}

}  // namespace
