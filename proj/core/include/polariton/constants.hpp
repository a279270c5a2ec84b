#pragma once

namespace polariton {

/// Fundamental constants, SI units (CODATA 2022).
struct PhysicalConstants {
  double boltzmann_j_per_k = 1.380649e-23;        // exact since the 2019 SI redefinition
  double atomic_mass_unit_kg = 1.66053906892e-27;
  double cesium_mass_kg = 132.905451961 * 1.66053906892e-27;  // Cs-133
};

inline constexpr PhysicalConstants constants{};

}  // namespace polariton
