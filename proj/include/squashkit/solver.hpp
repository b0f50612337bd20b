#pragma once

// Assembly of the squashing-map constraint set and decision of its PSD
// feasibility.
//
// The constraints "adjoint map sends each target element to the matching
// full element" are affine in the (unnormalized) Choi operator C of the
// adjoint map: reshuffle(C) vec(F_target^i) = vec(F_full^i). assemble()
// turns a target/full pair into a particular solution plus an orthonormal
// basis of the homogeneous solution space; feasibility() then decides
// whether the affine set meets the PSD cone, exactly when the set is a
// point and by alternating projections otherwise. Verdicts report the
// normalized Choi state tau = C / d_in.

#include <string>
#include <vector>

#include "squashkit/operator.hpp"
#include "squashkit/povm.hpp"

namespace squashkit {

struct ChoiProblem {
  Eigen::Index d_in = 0;             // target-side dimension
  Eigen::Index d_out = 0;            // detector-side dimension
  Operator fixed_part;               // particular solution, unnormalized Choi scale
  std::vector<Operator> free_basis;  // Hermitian, HS-orthonormal null directions
  std::string provenance;            // free-form description of the source
};

enum class Feasibility { Feasible, Infeasible, Undecided };

struct FeasibilityVerdict {
  Feasibility status = Feasibility::Undecided;
  Operator tau;                // normalized Choi state at termination
  double lambda_min = 0.0;     // smallest eigenvalue of tau
  CVector witness;             // populated when status == Infeasible
  double witness_value = 0.0;  // <w|tau|w>, negative for a valid witness
  int iterations = 0;
  double tolerance = 0.0;      // absolute tolerance actually used
  double residual = 0.0;       // final gap between PSD and affine projections
};

// Builds the constraint set for "postprocessed detector POVM <- target POVM".
// Throws std::invalid_argument when the pair admits no solution at all
// (a structurally invalid postprocessing, cf. validate_cpp).
ChoiProblem assemble(const Povm& target, const Povm& full);

// Decides whether the affine set contains a PSD operator. tol < 0 selects
// the default 1e-9 relative to ||fixed_part||_F. Alternating projections
// cannot certify infeasibility, so without a verified witness the verdict
// after max_iterations is Undecided.
FeasibilityVerdict feasibility(const ChoiProblem& problem, double tol = -1.0,
                               int max_iterations = 20000);

// Normalized Choi state of the trivial map that outputs rho_fix regardless
// of input: rho_fix^T (x) 1 / d_in. Its smallest eigenvalue is
// lambda_min(rho_fix) / d_in.
Operator trivial_choi(const Operator& rho_fix, Eigen::Index d_out);

struct NoiseRestoration {
  double p_weyl = 0.0;   // eigenvalue-bound estimate of the critical noise
  double p_exact = 0.0;  // bisection value (resolution 1e-6), always <= p_weyl
  Operator tau_mixed;    // normalized mixed Choi state at p_exact
};

// Smallest noise weight p such that (1-p) tau + p trivial_choi(rho_fix) is
// PSD. Requires a fully determined problem (empty free basis) unless it is
// already feasible; rho_fix must be full rank.
NoiseRestoration restore_with_noise(const ChoiProblem& problem, const Operator& rho_fix);

// Closed-form Choi state of the active BB84 squashing map on the
// single-click subspace, expressed in the (non-orthogonal) Gram basis
// |j> (x) {|N,0>_z, |0,N>_z, |N,0>_x, |0,N>_x}; returns the 8x8 matrix of
// the normalized tau.
Operator bb84_closed_form_choi(int photons);

struct PeBb84Eig {
  double lambda_min = 0.0;  // smallest eigenvalue of the normalized Choi state
  double bound = 0.0;       // closed-form lower bound f_N(t) on 4 lambda_min
};

// Smallest Choi eigenvalue of the phase-encoded BB84 squashing map at loss
// parameter t, together with the analytic bound (4 lambda_min >= bound).
// At t = 1 the otherwise-undetermined component is completed with its
// t -> 1 limit, so the curve is continuous on (0, 1].
PeBb84Eig pe_bb84_min_eig(double t, int photons);

// Gerschgorin disk lower bound on the smallest eigenvalue of a Hermitian
// operator: min over rows of (diagonal - sum of off-diagonal magnitudes).
double gerschgorin_min(const Operator& h);

// Analytic lower bound (1 - (d+1)^(2-N)) / d^2 on the smallest Choi
// eigenvalue of the uniform MUB device, valid for N >= 2.
double mub_positivity_bound(int d, int photons);

// How far the postprocessed single-click weights of a biased MUB device
// deviate from the target weights: zero for every N iff the arm
// probabilities are uniform.
double mub_balance_residual(int d, const std::vector<double>& arm_probabilities, int photons);

}  // namespace squashkit
