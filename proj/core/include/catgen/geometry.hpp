// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

// Lattice algebra and minimum-image geometry.
//
// Convention: lattice vector a lies along Cartesian x, b lies in the x-y
// plane, c completes a right-handed frame. Rows of the cell matrix are the
// lattice vectors, so cartesian = frac * cell.

#pragma once

#include <Eigen/Core>

namespace catgen {

struct Structure;

struct Lattice {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double alpha = 90.0;
  double beta = 90.0;
  double gamma = 90.0;

  friend bool operator==(const Lattice&, const Lattice&) = default;
};

// Fractional coordinate, components wrapped into [0, 1).
struct FracCoord {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const FracCoord&, const FracCoord&) = default;
};

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

// Maps any real into [0, 1). Guards the x == 1 - ulp rounding case.
double wrap_unit(double v) noexcept;
FracCoord wrapped(double x, double y, double z) noexcept;
inline Vec3 to_vec(const FracCoord& f) { return {f.x, f.y, f.z}; }

// 1 - cos²α - cos²β - cos²γ + 2 cosα cosβ cosγ.
double gram_factor(const Lattice& lat) noexcept;

// Throws Error(DegenerateCell) when the lattice is non-finite, has a
// non-positive length, an angle outside (0, 180), or Gram factor <= 1e-12.
void validate_lattice(const Lattice& lat);

Mat3 cell_matrix(const Lattice& lat);
double cell_volume(const Lattice& lat);

// Inverse of cell_matrix: lengths and angles (degrees) of the rows.
Lattice lattice_from_matrix(const Mat3& cell);

Vec3 frac_to_cart(const Mat3& cell, const FracCoord& f);
FracCoord cart_to_frac(const Mat3& cell, const Vec3& cart);

// Minimum Cartesian distance over the 27 image offsets {-1,0,1}^3 applied to
// q - p. Cells whose nearest image lies two shells away are out of contract.
double min_image_distance(const Lattice& lat, const FracCoord& p, const FracCoord& q);

// Same search against a precomputed cell matrix; used in inner loops.
double min_image_distance(const Mat3& cell, const FracCoord& p, const FracCoord& q);

// Mass density in g/cm^3. Throws EmptyInput for an empty structure and
// UnknownElement when a mass is missing.
double density(const Structure& s);

inline constexpr double kAmuToGramsPerCm3 = 1.66053907;  // amu/Å^3 -> g/cm^3

}  // namespace catgen
