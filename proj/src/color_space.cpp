#include "cvvdp/color_space.hpp"

namespace cvvdp::color {

const Mat3& xyz_to_lms_matrix() {
    static const Mat3 m{{{0.187596, 0.585169, -0.026384},
                         {-0.133397, 0.405506, 0.034502},
                         {0.000244, -0.000543, 0.019407}}};
    return m;
}

Mat3 lms_to_dkl_matrix(const Vec3& a) {
    return Mat3{{{1.0, 1.0, 0.0}, {1.0, -a[0] / a[1], 0.0}, {-1.0, -1.0, (a[0] + a[1]) / a[2]}}};
}

Mat3 xyz_to_dkl_matrix(const Vec3& adapt) { return mul(lms_to_dkl_matrix(adapt), xyz_to_lms_matrix()); }

Vec3 xyz_to_lms(const Vec3& xyz) { return mul(xyz_to_lms_matrix(), xyz); }
Vec3 lms_to_dkl(const Vec3& lms, const Vec3& adapt) { return mul(lms_to_dkl_matrix(adapt), lms); }
Vec3 dkl_to_lms(const Vec3& dkl, const Vec3& adapt) { return mul(inverse(lms_to_dkl_matrix(adapt)), dkl); }
Vec3 dkl_to_xyz(const Vec3& dkl, const Vec3& adapt) { return mul(inverse(xyz_to_dkl_matrix(adapt)), dkl); }

void apply_matrix_inplace(Frame& f, const Mat3& m) {
    const float m00 = m[0][0], m01 = m[0][1], m02 = m[0][2];
    const float m10 = m[1][0], m11 = m[1][1], m12 = m[1][2];
    const float m20 = m[2][0], m21 = m[2][1], m22 = m[2][2];
    float* a = f[0].data.data();
    float* b = f[1].data.data();
    float* c = f[2].data.data();
    const std::size_t n = f[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        const float x = a[i], y = b[i], z = c[i];
        a[i] = m00 * x + m01 * y + m02 * z;
        b[i] = m10 * x + m11 * y + m12 * z;
        c[i] = m20 * x + m21 * y + m22 * z;
    }
}

Frame apply_matrix(const Frame& in, const Mat3& m) {
    Frame out = in;
    apply_matrix_inplace(out, m);
    return out;
}

Frame xyz_to_dkl(const Frame& xyz, const Vec3& adapt) { return apply_matrix(xyz, xyz_to_dkl_matrix(adapt)); }

Frame dkl_to_xyz(const Frame& dkl, const Vec3& adapt) {
    return apply_matrix(dkl, inverse(xyz_to_dkl_matrix(adapt)));
}

}  // namespace cvvdp::color
