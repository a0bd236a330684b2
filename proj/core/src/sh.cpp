#include "medsplat/sh.hpp"

namespace medsplat {

namespace {

constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                           -1.0925484305920792, 0.5462742152960396};
constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554,  -0.4570457994644658,
                           0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                           -0.5900435899266435};

void check_unit(const Vec3& dir) {
    if (std::abs(dir.squaredNorm() - 1.0) > 2e-6)
        raise("NonUnitDirection", "|dir| = " + std::to_string(dir.norm()));
}

}  // namespace

ShVec sh_basis(const Vec3& dir) {
    check_unit(dir);
    const double x = dir.x(), y = dir.y(), z = dir.z();
    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, yz = y * z, xz = x * z;

    ShVec b;
    b[0] = kShC0;
    b[1] = -kShC1 * y;
    b[2] = kShC1 * z;
    b[3] = -kShC1 * x;
    b[4] = kC2[0] * xy;
    b[5] = kC2[1] * yz;
    b[6] = kC2[2] * (2.0 * zz - xx - yy);
    b[7] = kC2[3] * xz;
    b[8] = kC2[4] * (xx - yy);
    b[9] = kC3[0] * y * (3.0 * xx - yy);
    b[10] = kC3[1] * xy * z;
    b[11] = kC3[2] * y * (4.0 * zz - xx - yy);
    b[12] = kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
    b[13] = kC3[4] * x * (4.0 * zz - xx - yy);
    b[14] = kC3[5] * z * (xx - yy);
    b[15] = kC3[6] * x * (xx - 3.0 * yy);
    return b;
}

Eigen::Matrix<double, kShCoeffCount, 3> sh_basis_jacobian(const Vec3& dir) {
    check_unit(dir);
    const double x = dir.x(), y = dir.y(), z = dir.z();
    const double xx = x * x, yy = y * y, zz = z * z;

    Eigen::Matrix<double, kShCoeffCount, 3> J;
    J.setZero();
    J.row(1) = Vec3(0, -kShC1, 0);
    J.row(2) = Vec3(0, 0, kShC1);
    J.row(3) = Vec3(-kShC1, 0, 0);
    J.row(4) = kC2[0] * Vec3(y, x, 0);
    J.row(5) = kC2[1] * Vec3(0, z, y);
    J.row(6) = kC2[2] * Vec3(-2.0 * x, -2.0 * y, 4.0 * z);
    J.row(7) = kC2[3] * Vec3(z, 0, x);
    J.row(8) = kC2[4] * Vec3(2.0 * x, -2.0 * y, 0);
    J.row(9) = kC3[0] * Vec3(6.0 * x * y, 3.0 * xx - 3.0 * yy, 0);
    J.row(10) = kC3[1] * Vec3(y * z, x * z, x * y);
    J.row(11) = kC3[2] * Vec3(-2.0 * x * y, 4.0 * zz - xx - 3.0 * yy, 8.0 * y * z);
    J.row(12) = kC3[3] * Vec3(-6.0 * x * z, -6.0 * y * z, 6.0 * zz - 3.0 * xx - 3.0 * yy);
    J.row(13) = kC3[4] * Vec3(4.0 * zz - 3.0 * xx - yy, -2.0 * x * y, 8.0 * x * z);
    J.row(14) = kC3[5] * Vec3(2.0 * x * z, -2.0 * y * z, xx - yy);
    J.row(15) = kC3[6] * Vec3(3.0 * xx - 3.0 * yy, -6.0 * x * y, 0);
    return J;
}

}  // namespace medsplat
