//============================================================================
// Hermitian operator toolbox: eigendecomposition, vectorization, Choi/natural
// reshuffling, Kronecker products and Gram representations on subspaces.
//
// Conventions used throughout the library:
//  * vectorize() stacks columns: vec(X)[c * rows + r] = X(r, c), so that
//    vec(A X B) = (B^T (x) A) vec(X).
//  * A Choi matrix C of a map Theta acting Q -> M is indexed
//    C[(a, b), (c, d)] = <b| Theta(|a><c|) |d> with a, c on Q and b, d on M
//    (row index a*dM + b, column index c*dM + d). This is the *unnormalized*
//    Choi matrix, C = d_Q * tau for the normalized Choi state tau.
//  * reshuffle() converts between C and the natural representation R with
//    R vec(X) = vec(Theta(X)); applying it twice is the identity.
//============================================================================
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace squashkit {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

//----------------------------------------------------------------------------
// Eigendecomposition
//----------------------------------------------------------------------------

// Result of a Hermitian eigendecomposition: eigenvalues ascending, matching
// orthonormal eigenvector columns.
struct EigenResult {
  RVector eigenvalues;
  Operator eigenvectors;
};

// True iff ||H - H^dag||_F <= rel_tol * max(1, ||H||_F).
bool is_hermitian(const Operator& H, double rel_tol = 1e-12);

// Eigendecomposition of a Hermitian matrix. Throws std::invalid_argument if
// the input fails is_hermitian at the given tolerance. Postconditions (also
// exercised by the test suite): reconstruction V diag(w) V^dag matches H to
// 1e-9 * max(1, ||H||_F) and V^dag V = 1 to 1e-10.
EigenResult eig_hermitian(const Operator& H, double rel_tol = 1e-12);

// Smallest eigenvalue of a Hermitian matrix (convenience wrapper).
double min_eigenvalue(const Operator& H);

//----------------------------------------------------------------------------
// Vectorization and reshuffling
//----------------------------------------------------------------------------

// Column-stacking vectorization.
CVector vectorize(const Operator& X);

// Inverse of vectorize() for a matrix of known shape.
Operator unvectorize(const CVector& v, Eigen::Index rows, Eigen::Index cols);

// Converts between the Choi matrix (dQ*dM square, Q factor first) and the
// natural representation (dM^2 x dQ^2) of the same map; the direction is
// inferred from the input shape, and the same index permutation
//   R[(d, b), (c, a)] = C[(a, b), (c, d)]
// serves both ways, making the operation an involution. Throws
// std::invalid_argument if the shape matches neither form.
Operator reshuffle(const Operator& tau, Eigen::Index dQ, Eigen::Index dM);

// Kronecker product (row-major blocks: out = A (x) B).
Operator kron(const Operator& A, const Operator& B);

//----------------------------------------------------------------------------
// Subspace Gram representation
//----------------------------------------------------------------------------

// Compresses an operator onto the (not necessarily orthonormal, possibly
// linearly dependent) span of the given vectors: returns B^dag tau B where B
// has the span vectors as columns. The result is PSD on the span iff tau is,
// which is what positivity checks in non-orthogonal bases need.
Operator gram_representation(const Operator& tau, const std::vector<CVector>& span);

//----------------------------------------------------------------------------
// Small helpers shared across modules
//----------------------------------------------------------------------------

// Hilbert-Schmidt inner product tr(A^dag B).
Complex hs_inner(const Operator& A, const Operator& B);

// Orthonormal columns spanning the same space as the input vectors; columns
// with singular value <= cutoff * (largest singular value) are dropped.
Operator orthonormal_basis(const std::vector<CVector>& vectors, double cutoff = 1e-9);

}  // namespace squashkit
