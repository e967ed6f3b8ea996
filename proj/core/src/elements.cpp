// Copyright 2026 The catgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "catgen/elements.hpp"

#include <string>

#include "catgen/error.hpp"

namespace catgen {
namespace {

// Values frozen from the mendeleev 0.15.0 element database:
//   mass: standard atomic weight (IUPAC); electronegativity: Pauling scale;
//   covalent radius: Pyykkö single-bond radii; ionization energy: NIST first
//   ionization energies. Valence count derived from the ground-state
//   configuration. Missing data policy: electronegativity 0, ionization
//   energy 0, group 3 for lanthanides/actinides.
constexpr ElementRecord kTable[kNumElements] = {
#include "element_table.inc"
};

}  // namespace

Element::Element(int atomic_number) {
  if (atomic_number < 1 || atomic_number > kNumElements) {
    throw Error(Errc::UnknownElement, "atomic number " + std::to_string(atomic_number));
  }
  z_ = static_cast<std::uint8_t>(atomic_number);
}

Element Element::from_symbol(std::string_view symbol) {
  for (const auto& rec : kTable) {
    if (rec.symbol == symbol) return Element(rec.atomic_number);
  }
  throw Error(Errc::UnknownElement, "'" + std::string(symbol) + "'");
}

std::string_view Element::symbol() const noexcept { return kTable[z_ - 1].symbol; }

std::array<double, kNumElementProperties> numeric_properties(const ElementRecord& rec) noexcept {
  return {static_cast<double>(rec.atomic_number),
          rec.mass,
          rec.electronegativity,
          rec.covalent_radius,
          static_cast<double>(rec.group),
          static_cast<double>(rec.period),
          rec.ionization_energy,
          static_cast<double>(rec.valence_electrons)};
}

const ElementRecord& element_properties(std::string_view symbol) {
  return kTable[Element::from_symbol(symbol).z() - 1];
}

const ElementRecord& element_properties(Element e) noexcept { return kTable[e.z() - 1]; }

std::span<const ElementRecord> element_table() noexcept { return kTable; }

}  // namespace catgen
