//============================================================================
// POVMs with stable string labels, classical post-processing (CPP) matrices,
// and the single-click subspace split.
//
// Labels are the identity of an outcome everywhere in this library: CPP
// application matches events by label, never by position, so reordering a
// POVM's element list must never change any result.
//============================================================================
#pragma once

#include "squashkit/operator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace squashkit {

//----------------------------------------------------------------------------
// Povm
//----------------------------------------------------------------------------

// A labelled POVM on a finite-dimensional subspace. Invariants (enforced by
// make_povm): labels unique and nonempty, elements Hermitian and PSD down to
// -1e-10 * max(1, ||E||), and sum_i E_i = identity within 1e-10.
struct Povm {
  std::vector<std::string> labels;
  std::vector<Operator> elements;

  Eigen::Index dim() const { return elements.empty() ? 0 : elements.front().rows(); }
  std::size_t size() const { return elements.size(); }
  bool has(const std::string& label) const;
  // Element lookup by label; throws std::out_of_range for unknown labels.
  const Operator& at(const std::string& label) const;
};

// Validating constructor. Throws std::invalid_argument describing the first
// violated invariant. `completeness_tol` guards ||sum E - 1||_F.
Povm make_povm(std::vector<std::string> labels, std::vector<Operator> elements,
               double completeness_tol = 1e-10);

// Smallest eigenvalue over all elements (diagnostic).
double povm_min_eigenvalue(const Povm& p);

// Compresses every element onto the column span of `basis` (orthonormal
// columns): E -> V^dag E V. Completeness survives automatically when the
// original POVM is complete.
Povm compress_povm(const Povm& p, const Operator& basis);

//----------------------------------------------------------------------------
// Classical post-processing
//----------------------------------------------------------------------------

// A column-stochastic post-processing matrix mapping basic events (columns)
// to full events (rows): entries(r, c) is the probability of announcing full
// event r when the detector reported basic event c. Columns sum to one.
struct CppMatrix {
  std::vector<std::string> full_labels;   // row labels
  std::vector<std::string> basic_labels;  // column labels
  Eigen::MatrixXd entries;                // full_labels.size() x basic_labels.size()
};

// Applies a CPP matrix to a basic POVM, matching columns to basic elements by
// label: F_r = sum_c entries(r, c) E_c. Throws std::invalid_argument when a
// column label is missing from the POVM, when the label sets disagree in
// size, or when the matrix is not column-stochastic (negative entry, or a
// column sum away from one beyond tolerance).
Povm apply_cpp(const CppMatrix& cpp, const Povm& basic);

// Validation report for a CPP against a basic and a target POVM. A CPP is
// structurally valid when every linear dependence among the target elements
// is inherited by the post-processed elements: for each real combination with
// sum_i c_i T_i = 0, also sum_i c_i F_i = 0 (F = apply_cpp result).
// Dependencies are detected by SVD with cutoff 1e-9 * sigma_max.
struct CppValidation {
  bool stochastic = false;
  double stochastic_residual = 0.0;       // worst |column sum - 1| or negative entry
  bool structurally_valid = false;
  double nullspace_residual = 0.0;        // worst ||sum_i c_i F_i||_F over null combos
  std::optional<Eigen::VectorXd> violated_dependency;  // the offending combination
  bool ok() const { return stochastic && structurally_valid; }
};

CppValidation validate_cpp(const CppMatrix& cpp, const Povm& basic, const Povm& target,
                           double tol = 1e-9);

//----------------------------------------------------------------------------
// Single-click subspace split
//----------------------------------------------------------------------------

// Splits the carrier space into P = span(click_vectors) and its orthogonal
// complement, and compresses a POVM onto both blocks. Precondition: every
// element commutes with the projector onto P (max ||[E, Pi_P]||_F over
// elements <= tol * max(1, ||E||_F)); otherwise throws std::invalid_argument
// reporting the worst commutator norm, because splitting a non-block-diagonal
// POVM would silently discard off-diagonal structure.
struct SubspaceSplit {
  Operator basis_P;      // orthonormal columns spanning P
  Operator basis_Pperp;  // orthonormal columns spanning the complement
  Povm on_P;
  Povm on_Pperp;         // empty elements when P is the whole space
  double max_commutator = 0.0;
};

SubspaceSplit single_click_split(const Povm& full, const std::vector<CVector>& click_vectors,
                                 double tol = 1e-9);

}  // namespace squashkit
