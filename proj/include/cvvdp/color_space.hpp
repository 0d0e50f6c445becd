#pragma once

#include "cvvdp/image.hpp"
#include "cvvdp/mat3.hpp"

namespace cvvdp::color {

// Adapting point (D65) in LMS.
inline constexpr Vec3 kAdaptingLms{0.7399, 0.3201, 0.0208};

const Mat3& xyz_to_lms_matrix();
// Opponent matrix for an adapting point; rows give ach, rg, vy.
Mat3 lms_to_dkl_matrix(const Vec3& adapt = kAdaptingLms);
Mat3 xyz_to_dkl_matrix(const Vec3& adapt = kAdaptingLms);

Vec3 xyz_to_lms(const Vec3& xyz);
Vec3 lms_to_dkl(const Vec3& lms, const Vec3& adapt = kAdaptingLms);
Vec3 dkl_to_lms(const Vec3& dkl, const Vec3& adapt = kAdaptingLms);
Vec3 dkl_to_xyz(const Vec3& dkl, const Vec3& adapt = kAdaptingLms);

// Applies a 3x3 matrix to every pixel; matrix held in double, applied in float.
Frame apply_matrix(const Frame& in, const Mat3& m);
void apply_matrix_inplace(Frame& f, const Mat3& m);

// XYZ frame -> (I_ach, I_rg, I_vy) in one pass.
Frame xyz_to_dkl(const Frame& xyz, const Vec3& adapt = kAdaptingLms);
Frame dkl_to_xyz(const Frame& dkl, const Vec3& adapt = kAdaptingLms);

}  // namespace cvvdp::color
