// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace catgen {

inline constexpr int kNumElements = 118;

// Chemical element identified by atomic number (1..118).
class Element {
 public:
  constexpr Element() = default;
  // Throws Error(UnknownElement) outside 1..118.
  explicit Element(int atomic_number);

  // Throws Error(UnknownElement) for anything but one of the 118 symbols.
  static Element from_symbol(std::string_view symbol);

  constexpr int z() const noexcept { return z_; }
  std::string_view symbol() const noexcept;

  friend constexpr bool operator==(Element, Element) = default;
  friend constexpr auto operator<=>(Element, Element) = default;

 private:
  std::uint8_t z_ = 1;
};

struct ElementRecord {
  std::string_view symbol;
  int atomic_number;
  double mass;                // amu
  double electronegativity;   // Pauling; 0 where undefined
  double covalent_radius;     // Å
  int group;                  // 1..18; f-block reported as 3
  int period;
  double ionization_energy;   // first ionization, eV; 0 where unmeasured
  int valence_electrons;      // outside the noble-gas core, filled f shell excluded
  bool is_adsorbate_species;  // H, C, N, O
};

// Numeric properties used by the composition fingerprint, in fixed order.
inline constexpr std::size_t kNumElementProperties = 8;
std::array<double, kNumElementProperties> numeric_properties(const ElementRecord& rec) noexcept;

const ElementRecord& element_properties(std::string_view symbol);
const ElementRecord& element_properties(Element e) noexcept;
std::span<const ElementRecord> element_table() noexcept;

}  // namespace catgen
