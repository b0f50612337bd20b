// Independent numerical oracles used to derive and cross-check expected test
// values. Everything here is deliberately implemented by a *different*
// algorithm than the library under test: eigenvalues come from shifted power
// iteration or characteristic-polynomial bisection rather than a dense
// eigensolver, Choi/natural matrices are built by direct map application, and
// Kronecker products by naive index loops.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace oracles {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Smallest eigenvalue of a Hermitian matrix via power iteration on the
// shifted matrix c*I - H (c = 1 + max abs row sum), Rayleigh-quotient
// estimate, fixed RNG seed. Accurate to ~1e-10 for well-scaled inputs.
double lambda_min(const Mat& H);

// Largest eigenvalue, same method on H + c*I.
double lambda_max(const Mat& H);

// All eigenvalues of a Hermitian matrix with *simple* spectrum, found by
// evaluating the characteristic polynomial (coefficients from Newton's
// trace identities) and isolating sign changes by bisection. Intended for
// small random matrices in tests; multiplicities would defeat the sign test.
std::vector<double> charpoly_eigenvalues(const Mat& H, double tol = 1e-12);

// Naive Kronecker product by explicit index loops.
Mat kron_naive(const Mat& A, const Mat& B);

// Column-stacking vectorization by explicit loops.
Vec vec_naive(const Mat& X);

// Choi matrix of a linear map on d_Q x d_Q inputs, built entry-group by
// entry-group: C = sum_{ij} |i><j| (x) map(|i><j|). Unnormalized.
Mat choi_from_map(const std::function<Mat(const Mat&)>& map, int dQ, int dM);

// Natural (matrix) representation of the same map, built column by column:
// column vec(|r><c|) of the result is vec(map(|r><c|)).
Mat natural_from_map(const std::function<Mat(const Mat&)>& map, int dQ, int dM);

// Two-photon output amplitudes of a 2x2 mode transform U for the input
// a1^dag a2^dag |vac>, hand-expanded:
//   amp(2,0) = sqrt(2) U00 U01,  amp(1,1) = U00 U11 + U10 U01,
//   amp(0,2) = sqrt(2) U10 U11.
// Returned in the order {(2,0), (1,1), (0,2)}.
std::array<Cplx, 3> beamsplitter_two_photon(const Mat& U);

}  // namespace oracles
