// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "catgen/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>

#include "catgen/elements.hpp"
#include "catgen/error.hpp"
#include "catgen/structio.hpp"

namespace catgen {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

double wrap_unit(double v) noexcept {
  double w = v - std::floor(v);
  if (w >= 1.0) w = 0.0;
  return w;
}

FracCoord wrapped(double x, double y, double z) noexcept {
  return {wrap_unit(x), wrap_unit(y), wrap_unit(z)};
}

double gram_factor(const Lattice& lat) noexcept {
  const double ca = std::cos(lat.alpha * kDegToRad);
  const double cb = std::cos(lat.beta * kDegToRad);
  const double cg = std::cos(lat.gamma * kDegToRad);
  return 1.0 - ca * ca - cb * cb - cg * cg + 2.0 * ca * cb * cg;
}

void validate_lattice(const Lattice& lat) {
  for (double v : {lat.a, lat.b, lat.c, lat.alpha, lat.beta, lat.gamma}) {
    if (!std::isfinite(v)) throw Error(Errc::DegenerateCell, "non-finite lattice parameter");
  }
  if (lat.a <= 0.0 || lat.b <= 0.0 || lat.c <= 0.0) {
    throw Error(Errc::DegenerateCell, "lattice lengths must be positive");
  }
  for (double ang : {lat.alpha, lat.beta, lat.gamma}) {
    if (ang <= 0.0 || ang >= 180.0) throw Error(Errc::DegenerateCell, "lattice angle outside (0, 180)");
  }
  if (gram_factor(lat) <= 1e-12) throw Error(Errc::DegenerateCell, "collapsed cell (Gram factor <= 1e-12)");
}

Mat3 cell_matrix(const Lattice& lat) {
  validate_lattice(lat);
  const double ca = std::cos(lat.alpha * kDegToRad);
  const double cb = std::cos(lat.beta * kDegToRad);
  const double cg = std::cos(lat.gamma * kDegToRad);
  const double sg = std::sin(lat.gamma * kDegToRad);
  const double cx = cb;
  const double cy = (ca - cb * cg) / sg;
  const double cz = std::sqrt(std::max(0.0, 1.0 - cx * cx - cy * cy));
  Mat3 m;
  m << lat.a, 0.0, 0.0,
       lat.b * cg, lat.b * sg, 0.0,
       lat.c * cx, lat.c * cy, lat.c * cz;
  return m;
}

double cell_volume(const Lattice& lat) {
  validate_lattice(lat);
  return lat.a * lat.b * lat.c * std::sqrt(gram_factor(lat));
}

Lattice lattice_from_matrix(const Mat3& cell) {
  const Vec3 va = cell.row(0);
  const Vec3 vb = cell.row(1);
  const Vec3 vc = cell.row(2);
  auto angle = [](const Vec3& u, const Vec3& v) {
    const double cosine = std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0);
    return std::acos(cosine) / kDegToRad;
  };
  return {va.norm(), vb.norm(), vc.norm(), angle(vb, vc), angle(va, vc), angle(va, vb)};
}

Vec3 frac_to_cart(const Mat3& cell, const FracCoord& f) {
  return cell.transpose() * to_vec(f);
}

FracCoord cart_to_frac(const Mat3& cell, const Vec3& cart) {
  const Vec3 f = cell.transpose().partialPivLu().solve(cart);
  return wrapped(f.x(), f.y(), f.z());
}

double min_image_distance(const Mat3& cell, const FracCoord& p, const FracCoord& q) {
  Vec3 d = to_vec(q) - to_vec(p);
  d = d.unaryExpr([](double v) { return v - std::round(v); });
  const Vec3 base = cell.transpose() * d;
  const Vec3 a = cell.row(0), b = cell.row(1), c = cell.row(2);
  double best = std::numeric_limits<double>::infinity();
  for (int i = -1; i <= 1; ++i) {
    const Vec3 vi = base + i * a;
    for (int j = -1; j <= 1; ++j) {
      const Vec3 vij = vi + j * b;
      for (int k = -1; k <= 1; ++k) best = std::min(best, (vij + k * c).squaredNorm());
    }
  }
  return std::sqrt(best);
}

double min_image_distance(const Lattice& lat, const FracCoord& p, const FracCoord& q) {
  return min_image_distance(cell_matrix(lat), p, q);
}

double density(const Structure& s) {
  if (s.sites.empty()) throw Error(Errc::EmptyInput, "density of an empty structure");
  double mass = 0.0;
  for (const auto& site : s.sites) mass += element_properties(site.element).mass;
  return mass * kAmuToGramsPerCm3 / cell_volume(s.lattice);
}

}  // namespace catgen
