#include "bilat/so3.hpp"

#include <cmath>
#include <sstream>

#include "bilat/errors.hpp"

namespace bilat::so3 {

namespace {

constexpr double kSmallAngle = 1e-4;

}  // namespace

Mat3 hat(const Vec3& v) {
    Mat3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return s;
}

Vec3 vee(const Mat3& s) {
    const double asym = (s + s.transpose()).norm();
    if (asym > 1e-9) {
        std::ostringstream msg;
        msg << "vee: matrix is not skew-symmetric (||s + s^T|| = " << asym << ")";
        throw NotSkew(msg.str());
    }
    return {s(2, 1), s(0, 2), s(1, 0)};
}

Mat3 exp(const Vec3& v) {
    const double theta2 = v.squaredNorm();
    const double theta = std::sqrt(theta2);
    double a;  // sin(theta) / theta
    double b;  // (1 - cos(theta)) / theta^2
    if (theta < kSmallAngle) {
        a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
        b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    const Mat3 k = hat(v);
    return Mat3::Identity() + a * k + b * k * k;
}

Vec3 log(const Mat3& R) {
    const double tr = R.trace();
    if (tr <= -1.0 + kNearPiTraceMargin) {
        std::ostringstream msg;
        msg << "log: rotation angle too close to pi (trace = " << tr << ")";
        throw NearPi(msg.str());
    }
    // w = sin(theta) * axis
    const Vec3 w = 0.5 * Vec3(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
    const double s = w.norm();
    const double c = 0.5 * (tr - 1.0);
    const double theta = std::atan2(s, c);
    double scale;  // theta / sin(theta)
    if (theta < kSmallAngle) {
        scale = 1.0 + theta * theta / 6.0;
    } else {
        scale = theta / s;
    }
    return scale * w;
}

Mat3 pow(const Mat3& R, int n) {
    Mat3 out = Mat3::Identity();
    for (int i = 0; i < n; ++i) {
        out = out * R;
    }
    return out;
}

Mat3 geom_sum(const Mat3& R, int count) {
    Mat3 sum = Mat3::Zero();
    Mat3 term = Mat3::Identity();
    for (int i = 0; i < count; ++i) {
        sum += term;
        term = term * R;
    }
    return sum;
}

Vec3 rotate_vee(const Mat3& R, const Vec3& omega) { return R * omega; }

bool is_rotation(const Mat3& R, double tol) {
    if (!R.allFinite()) {
        return false;
    }
    const double ortho = (R.transpose() * R - Mat3::Identity()).norm();
    return ortho <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

double angle(const Mat3& R) {
    const Vec3 w = 0.5 * Vec3(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
    return std::atan2(w.norm(), 0.5 * (R.trace() - 1.0));
}

Mat3 rot_x(double a) {
    const double c = std::cos(a);
    const double s = std::sin(a);
    Mat3 r;
    r << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return r;
}

Mat3 rot_y(double a) {
    const double c = std::cos(a);
    const double s = std::sin(a);
    Mat3 r;
    r << c, 0, s,
         0, 1, 0,
         -s, 0, c;
    return r;
}

Mat3 rot_z(double a) {
    const double c = std::cos(a);
    const double s = std::sin(a);
    Mat3 r;
    r << c, -s, 0,
         s, c, 0,
         0, 0, 1;
    return r;
}

Mat3 from_rpy(const Vec3& rpy) { return rot_z(rpy.z()) * rot_y(rpy.y()) * rot_x(rpy.x()); }

Mat3 from_euler_xyz(const Vec3& xyz) { return rot_x(xyz.x()) * rot_y(xyz.y()) * rot_z(xyz.z()); }

}  // namespace bilat::so3
