#include "bilat/chain.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <Eigen/SVD>

#include "bilat/errors.hpp"
#include "bilat/so3.hpp"

namespace bilat {

namespace detail {
extern const std::string_view kGeneric6dofModel;
}  // namespace detail

namespace {

using Fields = std::map<std::string, std::vector<std::string>>;

Fields split_fields(std::istringstream& tokens, int line_no) {
    Fields fields;
    std::string token;
    std::string current;
    while (tokens >> token) {
        const auto eq = token.find('=');
        if (eq != std::string::npos) {
            current = token.substr(0, eq);
            if (current.empty() || fields.count(current) != 0) {
                throw ParseError("line " + std::to_string(line_no) + ": bad or duplicate key in '" +
                                 token + "'");
            }
            auto& values = fields[current];
            if (eq + 1 < token.size()) {
                values.push_back(token.substr(eq + 1));
            }
        } else {
            if (current.empty()) {
                throw ParseError("line " + std::to_string(line_no) + ": value '" + token +
                                 "' without a key");
            }
            fields[current].push_back(token);
        }
    }
    return fields;
}

double to_double(const std::string& s, int line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + s + "' is not a finite number");
    }
    return v;
}

const std::vector<std::string>& require(const Fields& f, const std::string& key, std::size_t count,
                                        int line_no) {
    auto it = f.find(key);
    if (it == f.end()) {
        throw ParseError("line " + std::to_string(line_no) + ": missing '" + key + "'");
    }
    if (it->second.size() != count) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + key + "' expects " +
                         std::to_string(count) + " value(s), got " +
                         std::to_string(it->second.size()));
    }
    return it->second;
}

Vec3 read_vec3(const Fields& f, const std::string& key, int line_no) {
    const auto& v = require(f, key, 3, line_no);
    return {to_double(v[0], line_no), to_double(v[1], line_no), to_double(v[2], line_no)};
}

double read_scalar(const Fields& f, const std::string& key, int line_no) {
    return to_double(require(f, key, 1, line_no)[0], line_no);
}

void reject_unknown(const Fields& f, std::initializer_list<const char*> known, int line_no) {
    for (const auto& [key, _] : f) {
        bool ok = false;
        for (const char* k : known) {
            ok = ok || key == k;
        }
        if (!ok) {
            throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
}

Vec3 parse_axis(const std::string& s, int line_no) {
    if (s == "x") return Vec3::UnitX();
    if (s == "y") return Vec3::UnitY();
    if (s == "z") return Vec3::UnitZ();
    throw ParseError("line " + std::to_string(line_no) + ": axis must be x, y or z, got '" + s + "'");
}

// Rotation of angle `q` about a unit axis.
Mat3 axis_rotation(const Vec3& axis, double q) { return so3::exp(axis * q); }

}  // namespace

ChainModel load_chain(std::string_view text) {
    std::vector<Joint> joints;
    bool have_tool = false;
    ChainModel chain;

    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream tokens(line);
        std::string head;
        tokens >> head;
        if (head.rfind("gravity=", 0) == 0) {
            std::istringstream whole(line);
            const Fields f = split_fields(whole, line_no);
            reject_unknown(f, {"gravity"}, line_no);
            chain.gravity = read_vec3(f, "gravity", line_no);
        } else if (head == "joint") {
            if (have_tool) {
                throw ParseError("line " + std::to_string(line_no) + ": joint after tool line");
            }
            const Fields f = split_fields(tokens, line_no);
            reject_unknown(f, {"axis", "origin_xyz", "origin_rpy", "mass", "com", "inertia_diag"},
                           line_no);
            Joint j;
            j.axis = parse_axis(require(f, "axis", 1, line_no)[0], line_no);
            j.origin_p = read_vec3(f, "origin_xyz", line_no);
            j.origin_R = so3::from_rpy(read_vec3(f, "origin_rpy", line_no));
            j.mass = read_scalar(f, "mass", line_no);
            j.com = read_vec3(f, "com", line_no);
            j.inertia = read_vec3(f, "inertia_diag", line_no).asDiagonal();
            joints.push_back(j);
        } else if (head == "tool") {
            if (have_tool) {
                throw ParseError("line " + std::to_string(line_no) + ": duplicate tool line");
            }
            const Fields f = split_fields(tokens, line_no);
            reject_unknown(f, {"origin_xyz", "origin_rpy"}, line_no);
            chain.tool_p = read_vec3(f, "origin_xyz", line_no);
            chain.tool_R = so3::from_rpy(read_vec3(f, "origin_rpy", line_no));
            have_tool = true;
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unrecognised record '" + head +
                             "'");
        }
    }

    if (!have_tool) {
        throw ParseError("model has no tool line");
    }
    if (joints.size() != static_cast<std::size_t>(kDof)) {
        throw ValidationError("model must have exactly 6 revolute joints, found " +
                              std::to_string(joints.size()));
    }
    for (int i = 0; i < kDof; ++i) {
        chain.joints[i] = joints[i];
    }
    validate(chain);
    return chain;
}

ChainModel load_chain_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw IoError("cannot open model file " + path.string());
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    return load_chain(buf.str());
}

void validate(const ChainModel& chain) {
    for (int i = 0; i < kDof; ++i) {
        const Joint& j = chain.joints[i];
        const std::string where = "joint " + std::to_string(i + 1) + ": ";
        if (!(j.mass > 0.0)) {
            throw ValidationError(where + "mass must be positive");
        }
        if (std::abs(j.axis.norm() - 1.0) > 1e-12) {
            throw ValidationError(where + "axis must be unit length");
        }
        if (!so3::is_rotation(j.origin_R)) {
            throw ValidationError(where + "origin rotation is not a rotation matrix");
        }
        if ((j.inertia - j.inertia.transpose()).norm() > 1e-12) {
            throw ValidationError(where + "inertia must be symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Mat3> eig(j.inertia);
        if (!(eig.eigenvalues().minCoeff() > 0.0)) {
            throw ValidationError(where + "inertia must be positive definite");
        }
        if (!j.com.allFinite() || !j.origin_p.allFinite()) {
            throw ValidationError(where + "non-finite geometry");
        }
    }
    if (!chain.gravity.allFinite() || !chain.tool_p.allFinite() || !so3::is_rotation(chain.tool_R)) {
        throw ValidationError("invalid gravity or tool transform");
    }
}

std::string_view generic6dof_text() { return detail::kGeneric6dofModel; }

const ChainModel& generic6dof() {
    static const ChainModel model = load_chain(generic6dof_text());
    return model;
}

LinkFrames link_frames(const ChainModel& chain, const Vec6& theta) {
    LinkFrames out;
    Mat3 R = Mat3::Identity();
    Vec3 p = Vec3::Zero();
    for (int i = 0; i < kDof; ++i) {
        const Joint& j = chain.joints[i];
        p = p + R * j.origin_p;
        R = R * j.origin_R * axis_rotation(j.axis, theta[i]);
        out.R[i] = R;
        out.p[i] = p;
    }
    out.tool.p = p + R * chain.tool_p;
    out.tool.R = R * chain.tool_R;
    return out;
}

Pose forward_kinematics(const ChainModel& chain, const Vec6& theta) {
    return link_frames(chain, theta).tool;
}

Mat6 geometric_jacobian(const ChainModel& chain, const Vec6& theta) {
    const LinkFrames frames = link_frames(chain, theta);
    Mat6 J;
    for (int i = 0; i < kDof; ++i) {
        const Vec3 z = frames.R[i] * chain.joints[i].axis;
        J.block<3, 1>(0, i) = z;
        J.block<3, 1>(3, i) = z.cross(frames.tool.p - frames.p[i]);
    }
    return J;
}

Mat6 jacobian_time_derivative(const ChainModel& chain, const JointState& state) {
    constexpr double kStep = 1e-6;
    Mat6 Jdot = Mat6::Zero();
    for (int i = 0; i < kDof; ++i) {
        if (state.velocity[i] == 0.0) {
            continue;
        }
        Vec6 plus = state.position;
        Vec6 minus = state.position;
        plus[i] += kStep;
        minus[i] -= kStep;
        const Mat6 dJ = (geometric_jacobian(chain, plus) - geometric_jacobian(chain, minus)) /
                        (2.0 * kStep);
        Jdot += dJ * state.velocity[i];
    }
    return Jdot;
}

Mat6 damped_pinv(const Mat6& J, double damping) {
    if (!(damping >= 0.0)) {
        throw ValidationError("damped_pinv: damping must be non-negative");
    }
    Eigen::JacobiSVD<Mat6> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec6 sigma = svd.singularValues();
    if (damping == 0.0) {
        const double smax = sigma[0];
        const double smin = sigma[kDof - 1];
        if (!(smin > 0.0) || smax / smin > kSingularCondition) {
            std::ostringstream msg;
            msg << "damped_pinv: singular Jacobian without damping (cond = "
                << (smin > 0.0 ? smax / smin : INFINITY) << ")";
            throw SingularAndUndamped(msg.str());
        }
    }
    Vec6 inv;
    const double lambda2 = damping * damping;
    for (int k = 0; k < kDof; ++k) {
        const double s = sigma[k];
        const double denom = s * s + lambda2;
        inv[k] = denom > 0.0 ? s / denom : 0.0;
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

IkResult solve_ik(const ChainModel& chain, const Pose& target, const Vec6& seed, double tolerance,
                  int max_iterations) {
    IkResult res;
    res.theta = seed;
    for (int it = 0; it <= max_iterations; ++it) {
        const Pose pose = forward_kinematics(chain, res.theta);
        Vec6 err;
        err.head<3>() = so3::log(target.R * pose.R.transpose());
        err.tail<3>() = target.p - pose.p;
        res.residual = err.norm();
        res.iterations = it;
        if (res.residual < tolerance) {
            res.converged = true;
            return res;
        }
        if (it == max_iterations) {
            break;
        }
        // Damping shrinks with the residual so the final iterations are Newton steps.
        const double damping = std::min(1e-2, res.residual);
        Vec6 step = damped_pinv(geometric_jacobian(chain, res.theta), damping) * err;
        const double max_step = step.cwiseAbs().maxCoeff();
        if (max_step > 0.2) {
            step *= 0.2 / max_step;
        }
        res.theta += step;
    }
    return res;
}

}  // namespace bilat
