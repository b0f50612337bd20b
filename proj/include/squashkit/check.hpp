#pragma once

// End-to-end decision pipeline for one device block: validate the
// postprocessing, reduce to the single-click subspace when the device
// declares one, solve the reduced (or full) constraint set, and verify that
// the complement block is served by a trivial map.

#include <string>

#include "squashkit/devices.hpp"
#include "squashkit/solver.hpp"

namespace squashkit {

struct DeviceCheck {
  std::string device;
  int photons = 0;
  CppValidation cpp_validation;
  bool reduced = false;        // single-click reduction applied
  double commutator = 0.0;     // worst relative commutator with the subspace projector
  bool trivial_rest = true;    // complement block matches a trivial map
  double rest_residual = 0.0;  // worst deviation of the complement from that form
  Operator rho_fix;            // reconstructed complement output state (when reduced)
  ChoiProblem problem;         // the constraint set actually decided
  FeasibilityVerdict verdict;

  // Overall result: feasible solver verdict plus a valid postprocessing and
  // a trivially-served complement.
  bool ok() const {
    return cpp_validation.ok() && trivial_rest && verdict.status == Feasibility::Feasible;
  }
};

// Decides whether the device admits a squashing map on the N-photon block.
// tol and max_iterations are forwarded to the solver (tol < 0 selects the
// default).
DeviceCheck check_device(const DeviceFamily& family, int photons, double tol = -1.0,
                         int max_iterations = 20000);

// Same pipeline for an explicitly assembled block (used for composed
// multi-time-mode devices).
DeviceCheck check_block(const std::string& name, const DeviceBlock& block, double tol = -1.0,
                        int max_iterations = 20000);

}  // namespace squashkit
