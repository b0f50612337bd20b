#include "squashkit/operator.hpp"

#include <Eigen/SVD>
#include <sstream>
#include <stdexcept>

namespace squashkit {

bool is_hermitian(const Operator& H, double rel_tol) {
  if (H.rows() != H.cols()) return false;
  const double scale = std::max(1.0, H.norm());
  return (H - H.adjoint()).norm() <= rel_tol * scale;
}

EigenResult eig_hermitian(const Operator& H, double rel_tol) {
  if (!is_hermitian(H, rel_tol)) {
    std::ostringstream msg;
    msg << "eig_hermitian: input is not Hermitian (||H - H^dag||_F = "
        << (H - H.adjoint()).norm() << ", size " << H.rows() << "x" << H.cols() << ")";
    throw std::invalid_argument(msg.str());
  }
  // Symmetrize before decomposing so the tolerance slack cannot leak into
  // the reported spectrum.
  const Operator Hs = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(Hs);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const Operator& H) { return eig_hermitian(H).eigenvalues(0); }

CVector vectorize(const Operator& X) {
  return CVector(Eigen::Map<const CVector>(X.data(), X.size()));
}

Operator unvectorize(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols)
    throw std::invalid_argument("unvectorize: size mismatch");
  return Eigen::Map<const Operator>(v.data(), rows, cols);
}

Operator reshuffle(const Operator& tau, Eigen::Index dQ, Eigen::Index dM) {
  const Eigen::Index dQM = dQ * dM;
  if (tau.rows() == dQM && tau.cols() == dQM) {
    // Choi -> natural representation.
    Operator out(dM * dM, dQ * dQ);
    for (Eigen::Index a = 0; a < dQ; ++a)
      for (Eigen::Index b = 0; b < dM; ++b)
        for (Eigen::Index c = 0; c < dQ; ++c)
          for (Eigen::Index d = 0; d < dM; ++d)
            out(d * dM + b, c * dQ + a) = tau(a * dM + b, c * dM + d);
    return out;
  }
  if (tau.rows() == dM * dM && tau.cols() == dQ * dQ) {
    // Natural representation -> Choi.
    Operator out(dQM, dQM);
    for (Eigen::Index a = 0; a < dQ; ++a)
      for (Eigen::Index b = 0; b < dM; ++b)
        for (Eigen::Index c = 0; c < dQ; ++c)
          for (Eigen::Index d = 0; d < dM; ++d)
            out(a * dM + b, c * dM + d) = tau(d * dM + b, c * dQ + a);
    return out;
  }
  std::ostringstream msg;
  msg << "reshuffle: shape " << tau.rows() << "x" << tau.cols()
      << " matches neither the Choi (" << dQM << "x" << dQM << ") nor the natural ("
      << dM * dM << "x" << dQ * dQ << ") layout";
  throw std::invalid_argument(msg.str());
}

Operator kron(const Operator& A, const Operator& B) {
  Operator out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < A.cols(); ++c)
      out.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = A(r, c) * B;
  return out;
}

Operator gram_representation(const Operator& tau, const std::vector<CVector>& span) {
  if (span.empty()) throw std::invalid_argument("gram_representation: empty span");
  const Eigen::Index dim = span.front().size();
  if (tau.rows() != dim || tau.cols() != dim)
    throw std::invalid_argument("gram_representation: operator/span dimension mismatch");
  Operator B(dim, static_cast<Eigen::Index>(span.size()));
  for (std::size_t i = 0; i < span.size(); ++i) {
    if (span[i].size() != dim)
      throw std::invalid_argument("gram_representation: inconsistent span vector sizes");
    B.col(static_cast<Eigen::Index>(i)) = span[i];
  }
  return B.adjoint() * tau * B;
}

Complex hs_inner(const Operator& A, const Operator& B) {
  return (A.adjoint() * B).trace();
}

Operator orthonormal_basis(const std::vector<CVector>& vectors, double cutoff) {
  if (vectors.empty()) return Operator(0, 0);
  const Eigen::Index dim = vectors.front().size();
  Operator B(dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i)
    B.col(static_cast<Eigen::Index>(i)) = vectors[i];
  Eigen::JacobiSVD<Operator> svd(B, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff * sv(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace squashkit
