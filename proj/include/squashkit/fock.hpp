//============================================================================
// Linear optics on fixed-photon-number subspaces: occupation bases, mode
// transforms, second-quantized lifts and threshold-detector POVMs.
//
// Mode-map convention: a ModeTransform U sends input creation operators to
// output ones as a_j^dag -> sum_k U(k, j) b_k^dag, i.e. columns index input
// modes and rows index output modes. For a single photon the lifted matrix
// is U itself.
//============================================================================
#pragma once

#include "squashkit/povm.hpp"

#include <map>
#include <string>
#include <vector>

namespace squashkit {

//----------------------------------------------------------------------------
// Occupation-number bases
//----------------------------------------------------------------------------

// Basis of the N-photon subspace of `modes` bosonic modes, enumerated in
// descending lexicographic order: (N,0,...,0) first, (0,...,0,N) last.
struct OccupationBasis {
  int modes = 0;
  int photons = 0;
  std::vector<std::vector<int>> states;

  std::size_t size() const { return states.size(); }
  // Index of an occupation vector; throws std::out_of_range if absent.
  std::size_t index_of(const std::vector<int>& occupation) const;

 private:
  friend OccupationBasis fock_basis(int, int);
  std::map<std::vector<int>, std::size_t> index_;
};

// Enumerates the basis; size is C(N + modes - 1, modes - 1).
OccupationBasis fock_basis(int modes, int photons);

// The normalized N-photon state with every photon in the single-particle
// state v (components over the basis modes): amplitudes
// sqrt(N!/prod occ_j!) prod_j v(j)^occ_j. ||v|| = 1 gives a unit vector.
CVector symmetric_product_state(const OccupationBasis& basis, const CVector& v);

//----------------------------------------------------------------------------
// Mode transforms
//----------------------------------------------------------------------------

// A (unitary) linear-optical mode map b_k^dag = sum_j matrix(k, j) a_j^dag.
struct ModeTransform {
  Eigen::MatrixXcd matrix;
};

// Two-mode beam splitter with transmission T and reflection phase `phase`:
//   b_0 = e^{i phase} sqrt(1-T) a_0 + sqrt(T) a_1
//   b_1 = sqrt(T) a_0 - e^{-i phase} sqrt(1-T) a_1.
// T = 0.5, phase = 0 is the balanced splitter. Throws for T outside [0, 1].
ModeTransform beam_splitter(double transmission, double phase = 0.0);

// Discrete-Fourier multiport on n modes: matrix(a, b) = omega^{ab}/sqrt(n),
// omega = exp(2 pi i / n). Column 0 splits one input evenly over all outputs.
ModeTransform fourier_multiport(int ports);

// Second-quantized lift of a mode transform to the N-photon subspace, i.e.
// the matrix of the induced unitary in fock_basis(modes, N). Exactly unitary
// for unitary inputs (up to roundoff); N = 1 reproduces the mode matrix.
Operator lift_unitary(const ModeTransform& transform, int photons);

//----------------------------------------------------------------------------
// Threshold detection
//----------------------------------------------------------------------------

// Assignment of output modes to threshold detectors. Every output mode must
// appear in exactly one group; a detector clicks when its group holds at
// least one photon. Group order fixes the click-pattern bit order.
struct DetectorLayout {
  std::vector<std::pair<std::string, std::vector<int>>> groups;
};

// POVM of the click patterns seen by threshold detectors behind a linear
// network, restricted to N photons entering through `input_modes` (all modes
// when empty). Element labels are the click bitstrings in layout order,
// listed in ascending lexicographic order; only patterns with nonzero
// elements appear. The elements act on fock_basis(|input_modes|, N).
Povm threshold_povm(const ModeTransform& transform, const DetectorLayout& layout, int photons,
                    const std::vector<int>& input_modes = {});

}  // namespace squashkit
