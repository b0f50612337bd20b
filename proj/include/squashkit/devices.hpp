//============================================================================
// Catalog of optical measurement devices: closed-form basic POVMs on each
// photon-number subspace, their classical post-processing into full
// measurements, the qudit target POVMs, and linear-optics engine models for
// cross-validation.
//
// Label conventions (stable, part of the wire format):
//  * basic events: "sc:<basis>:<outcome>" single clicks, "dc:<basis>" double
//    clicks within one basis, "mc:<basis>" multi-clicks within one module
//    (qudit devices), "cc" cross clicks between modules (passive devices).
//    PE BB84 uses "w2:p0", "w5:p0", "indc:p0" (and :p1 for phase pi/2),
//    "out", "inout".
//  * full/target events: "q:<basis>:<outcome>", plus "vac" where the
//    post-processing can discard to vacuum, and "q2:p0"/"q5:p0"/.../"out"
//    for PE BB84.
//  * multi-time events: per-mode basic labels joined with '|', idle modes
//    reporting "vac".
// Basis names: "z", "x", "y" for qubits; "b0".."b<d>" for the d+1 mutually
// unbiased qudit bases (b0 = standard basis).
//
// Mode-index conventions (engine models): polarization devices order modes
// as (arm 0, pol 0), (arm 0, pol 1), (arm 1, pol 0), ...; qudit devices as
// arm*d + level with the input entering arm 0. PE BB84 uses the six
// interferometer outputs b1..b6 in order, with windows (b1,b4), (b2,b5),
// (b3,b6) and the N-photon input on modes (a1, a2).
//
// Every family emits blocks for N >= 1 only; the vacuum component is a fixed
// structural rule handled by the callers, not block data.
//============================================================================
#pragma once

#include "squashkit/fock.hpp"
#include "squashkit/povm.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace squashkit {

//----------------------------------------------------------------------------
// Device blocks and families
//----------------------------------------------------------------------------

// One photon-number block of a device: what the detectors measure on the
// N-photon subspace, how records are post-processed, and what the squashed
// qudit measurement must look like.
struct DeviceBlock {
  int photons = 0;
  Povm basic;    // detector events, closed form
  CppMatrix cpp; // basic -> full post-processing
  Povm full;     // apply_cpp(cpp, basic)
  Povm target;   // qudit POVM to be reproduced by the squashing map
  // Single-click subspace vectors; empty means feasibility is decided on the
  // whole block (no commuting reduction is available).
  std::vector<CVector> click_vectors;
};

// A family of blocks indexed by photon number, with an optional independent
// engine model (linear-optics simulation) used for cross-validation.
struct DeviceFamily {
  std::string name;
  std::map<std::string, double> params;
  std::function<DeviceBlock(int)> block;  // N >= 1
  std::function<Povm(int)> engine_basic;  // null when no engine model exists
  // Passive families report their N-dependent postprocessing weight p(N):
  // the all-photons-in-one-arm probability 2^(1-N) for passive BB84, the
  // complementary noise fraction 1 - 3^(1-N) for the passive six-state
  // device. Null for families without such a weight.
  std::function<double(int)> switching_probability;
  std::string notes;  // catalog text: modes, labels, params
};

//----------------------------------------------------------------------------
// Families
//----------------------------------------------------------------------------

// Actively switched polarization BB84: basis z with probability p_plus, x
// with 1 - p_plus; double clicks split equally onto the two outcomes.
DeviceFamily bb84_active(double p_plus = 0.5);

// Actively switched six-state device (bases z, x, y, probability 1/3 each).
// flip_probability p adds the noisy post-processing that reassigns each
// single click to the opposite outcome of its basis with probability p/2;
// p = 0 is the plain equal double-click split.
DeviceFamily six_state_active(double flip_probability = 0.0);

// Passive BB84 (balanced splitter in front of two analyzer arms). Cross
// clicks between the arms are either kept (split equally over all four
// outcomes) or discarded to a vacuum outcome, which enlarges the target to
// a qutrit with an explicit "vac" level.
DeviceFamily bb84_passive_keep();
DeviceFamily bb84_passive_discard();

// Passive six-state device (three arms, each taking 1/3 of the light).
// Only the keep variant exists; a discard variant has no supported
// post-processing and is not in the catalog.
DeviceFamily six_state_passive();

// Qudit device measuring all d+1 mutually unbiased bases (d prime), arm
// alpha selected passively with probability arm_probabilities[alpha]
// (uniform 1/(d+1) when empty). The uniform CPP splits multi-clicks within
// an arm equally over its d outcomes and cross clicks equally over all
// d(d+1) outcomes; for nonuniform probabilities this CPP is generally
// structurally invalid, which validate_cpp and mub_balance_residual expose.
DeviceFamily mub_qudit(int d, const std::vector<double>& arm_probabilities = {});

// Phase-encoded BB84 with loss parameter t in (0, 1] (xi = 1/(1+t)):
// unbalanced Mach-Zehnder with phase phi in {0, pi/2} switched passively
// (probability 1/2 each), detection windows in/middle/out, and the
// in&out-window click rule (1/2 to "out", 1/8 to each single-click event).
DeviceFamily pe_bb84(double t);

//----------------------------------------------------------------------------
// Multi-time-mode composition
//----------------------------------------------------------------------------

// All ordered occupations of `photons` over `modes` time modes.
std::vector<std::vector<int>> photon_splits(int photons, int modes);

// Grouping of per-mode basic events into an overall event of the base
// device: all-vacuum -> "vac"; clicks agreeing on one outcome (rest vacuum)
// -> that single click; clicks within one basis/arm otherwise -> its double
// click; any cross click or clicks in two different arms (passive base) ->
// "cc". Events must all belong to one basis for active bases.
std::string multi_time_group(const std::vector<std::string>& events);

// Composes a base family over photon_split.size() time modes measured with
// the same basis setting: basic POVM = tensor products of per-mode basic
// elements, overall CPP = grouping rules followed by the base CPP, target =
// base target. Supported bases: bb84-active, six-state-active (noisy
// allowed), bb84-passive-discard; anything else throws (no single-mode
// squashing model to compose with).
DeviceBlock multi_time_block(const DeviceFamily& base, const std::vector<int>& photon_split);

//----------------------------------------------------------------------------
// Family-level helpers
//----------------------------------------------------------------------------

// The single-photon restriction of the post-processed measurement, with the
// vacuum component split off (zero events dropped). Equals the declared
// target of every family on the click subspace.
Povm restrict_to_single_photon(const DeviceFamily& family);

// CLI-facing constructor: device by catalog name with named parameters
// ("p-plus", "flip-p", "d", "t"); arm probabilities for mub passed
// separately. Throws std::invalid_argument for unknown names.
DeviceFamily make_device(const std::string& name, const std::map<std::string, double>& params,
                         const std::vector<double>& arm_probabilities = {});

// Catalog names in stable order.
std::vector<std::string> device_names();

}  // namespace squashkit
