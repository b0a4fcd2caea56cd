#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

namespace mtf {

using Real = double;
using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;

constexpr Real PI = 3.14159265358979323846;

/// Plain triangle with explicit vertex coordinates. The vertex order defines
/// the right-handed normal.
struct Triangle {
  Vec3 a, b, c;

  Vec3 unnormal() const { return (b - a).cross(c - a); }
  Vec3 normal() const { return unnormal().normalized(); }
  Real area() const { return 0.5 * unnormal().norm(); }
  Vec3 centroid() const { return (a + b + c) / 3.0; }
  Real diameter() const {
    return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  }
  /// Point from barycentric coordinates (la, lb, lc), la + lb + lc = 1.
  Vec3 at(Real la, Real lb, Real lc) const { return la * a + lb * b + lc * c; }
  Vec3 at(const std::array<Real, 3>& l) const { return at(l[0], l[1], l[2]); }
};

/// Mesh size from the points-per-wavelength rule: h = 2*pi / (ppw * k).
inline Real mesh_size_from_ppw(Real ppw, Real k) { return 2.0 * PI / (ppw * k); }

}  // namespace mtf
