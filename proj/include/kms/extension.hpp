#pragma once

#include "kms/fields.hpp"

#include <cstdint>

namespace kms {

struct ExtensionResult {
  VectorField extended;
  double l1_input = 0.0;
  double l1_output = 0.0;
  double weak_div_defect = 0.0;
};

/// One reflection step along `axis`: the axis is tripled, the upper slab
/// holds the field reflected through the upper face and the lower slab the
/// field reflected through the lower face. Tangential components change sign,
/// the normal component keeps it.
VectorField extend_axis(const VectorField& phi, int axis);

/// Solenoidal extension from a cube to the cube three times as wide with the
/// same centre, composed of the three axis steps. Requires a non-periodic
/// grid with equal node counts and equal spacing on every axis. The defect
/// is measured on the extended field with `n_tests` test functions.
ExtensionResult extend_divfree(const VectorField& phi, int n_tests = 8, std::uint64_t seed = 0);

/// max over test functions phi_t of |sum <Phi, grad phi_t> h^3| / ||grad phi_t||_1.
///
/// Test function t is a bump chi^4 of seeded centre and radius (0.3 to 0.45
/// box widths) inside the box times a scalar trig polynomial with
/// kmax = min(dims)/8 and period equal to the box width; the first one is the
/// bare bump centred on the box. Test t uses seed + t.
double weak_divergence_defect(const VectorField& phi, int n_tests = 8, std::uint64_t seed = 0);

struct PairingOptions {
  int trials = 4;
  int ascent_steps = 40;
  /// Frequency cut-off of the vector trig polynomial in the test functions,
  /// fixed across grids so that refinements optimise over the same family.
  int test_kmax = 2;
  std::uint64_t seed = 0;
};

/// Lower estimate of sup_phi int <Phi, phi> / (||Phi||_1 ||grad phi||_3) over
/// test functions phi = bump(centre, half width) times a vector trig
/// polynomial, by normalised gradient ascent from `trials` starts (the first
/// start is the L^2 dual direction, the rest are seeded random). Returns the
/// best ratio; 0 for Phi = 0.
double bb_pairing_bound(const VectorField& phi, const PairingOptions& opts = {});

}  // namespace kms
