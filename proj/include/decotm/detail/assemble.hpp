#pragma once

#include <Eigen/Dense>

namespace decotm::detail {

/// Transfer-matrix table from the averages I0, I_i, I_ij. Used both for the
/// ensemble average and for a single field (where it is the adjoint rotation),
/// so a one-atom distribution reproduces the rotation bit for bit.
inline Eigen::Matrix3d assemble_transfer(double i0, const Eigen::Vector3d& li, const Eigen::Matrix3d& q) {
  const double ixx = q(0, 0), iyy = q(1, 1), izz = q(2, 2);
  const double ixy = q(0, 1), ixz = q(0, 2), iyz = q(1, 2);
  const double ix = li[0], iy = li[1], iz = li[2];
  Eigen::Matrix3d t;
  t(0, 0) = i0 + ixx - iyy - izz;
  t(1, 1) = i0 - ixx + iyy - izz;
  t(2, 2) = i0 - ixx - iyy + izz;
  t(0, 1) = 2.0 * ixy + 2.0 * iz;
  t(1, 0) = 2.0 * ixy - 2.0 * iz;
  t(0, 2) = 2.0 * ixz - 2.0 * iy;
  t(2, 0) = 2.0 * ixz + 2.0 * iy;
  t(1, 2) = 2.0 * iyz + 2.0 * ix;
  t(2, 1) = 2.0 * iyz - 2.0 * ix;
  return t;
}

}  // namespace decotm::detail
