#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace oracles {

namespace {

// Deterministic random unit vector (fixed seed, independent of call order).
Vec seeded_unit_vector(Eigen::Index n) {
  std::mt19937 rng(0x5eed5eedu);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Cplx(gauss(rng), gauss(rng));
  v.normalize();
  return v;
}

// Rayleigh-quotient power iteration for the top eigenvalue of a Hermitian
// PSD matrix M. Converges in value even for clustered spectra.
double top_eigenvalue_psd(const Mat& M) {
  const Eigen::Index n = M.rows();
  Vec v = seeded_unit_vector(n);
  double rq = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 20000; ++it) {
    Vec w = M * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;  // M is the zero matrix
    v = w / norm;
    rq = std::real(v.dot(M * v));
    if (std::abs(rq - prev) < 1e-14 * std::max(1.0, std::abs(rq)) && it > 30) break;
    prev = rq;
  }
  return rq;
}

double abs_row_sum_bound(const Mat& H) {
  double best = 0.0;
  for (Eigen::Index r = 0; r < H.rows(); ++r) best = std::max(best, H.row(r).cwiseAbs().sum());
  return best;
}

}  // namespace

double lambda_min(const Mat& H) {
  const double c = abs_row_sum_bound(H) + 1.0;
  const Eigen::Index n = H.rows();
  const Mat M = c * Mat::Identity(n, n) - H;
  return c - top_eigenvalue_psd(M);
}

double lambda_max(const Mat& H) {
  const double c = abs_row_sum_bound(H) + 1.0;
  const Eigen::Index n = H.rows();
  const Mat M = c * Mat::Identity(n, n) + H;
  return top_eigenvalue_psd(M) - c;
}

std::vector<double> charpoly_eigenvalues(const Mat& H, double tol) {
  const int n = static_cast<int>(H.rows());
  // Characteristic polynomial coefficients via Newton's identities from the
  // power-sum traces p_k = tr(H^k):
  //   p(x) = x^n + c_1 x^{n-1} + ... + c_n,  c_k = -(p_k + sum c_j p_{k-j})/k.
  std::vector<double> p(n + 1, 0.0);
  Mat Hk = Mat::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    Hk = Hk * H;
    p[k] = std::real(Hk.trace());
  }
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double s = p[k];
    for (int j = 1; j < k; ++j) s += c[j] * p[k - j];
    c[k] = -s / k;
  }
  auto eval = [&](double x) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) acc = acc * x + c[k];
    return acc;
  };
  // All roots lie inside the Gershgorin-style bound |x| <= row-sum bound.
  const double bound = abs_row_sum_bound(H) + 1.0;
  const int samples = 20000;
  std::vector<double> roots;
  double x0 = -bound, f0 = eval(x0);
  for (int i = 1; i <= samples; ++i) {
    const double x1 = -bound + 2.0 * bound * i / samples;
    const double f1 = eval(x1);
    if (f0 == 0.0) roots.push_back(x0);
    if (f0 * f1 < 0.0) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        const double m = 0.5 * (a + b), fm = eval(m);
        if (fa * fm <= 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
  if (static_cast<int>(roots.size()) != n)
    throw std::runtime_error("charpoly_eigenvalues: spectrum not simple enough for sign bisection");
  std::sort(roots.begin(), roots.end());
  return roots;
}

Mat kron_naive(const Mat& A, const Mat& B) {
  Mat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index ar = 0; ar < A.rows(); ++ar)
    for (Eigen::Index ac = 0; ac < A.cols(); ++ac)
      for (Eigen::Index br = 0; br < B.rows(); ++br)
        for (Eigen::Index bc = 0; bc < B.cols(); ++bc)
          out(ar * B.rows() + br, ac * B.cols() + bc) = A(ar, ac) * B(br, bc);
  return out;
}

Vec vec_naive(const Mat& X) {
  Vec v(X.rows() * X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c)
    for (Eigen::Index r = 0; r < X.rows(); ++r) v(c * X.rows() + r) = X(r, c);
  return v;
}

Mat choi_from_map(const std::function<Mat(const Mat&)>& map, int dQ, int dM) {
  Mat C = Mat::Zero(dQ * dM, dQ * dM);
  for (int i = 0; i < dQ; ++i)
    for (int j = 0; j < dQ; ++j) {
      Mat Eij = Mat::Zero(dQ, dQ);
      Eij(i, j) = 1.0;
      const Mat img = map(Eij);
      for (int r = 0; r < dM; ++r)
        for (int s = 0; s < dM; ++s) C(i * dM + r, j * dM + s) = img(r, s);
    }
  return C;
}

Mat natural_from_map(const std::function<Mat(const Mat&)>& map, int dQ, int dM) {
  Mat R(dM * dM, dQ * dQ);
  for (int c = 0; c < dQ; ++c)
    for (int r = 0; r < dQ; ++r) {
      Mat Erc = Mat::Zero(dQ, dQ);
      Erc(r, c) = 1.0;
      R.col(c * dQ + r) = vec_naive(map(Erc));
    }
  return R;
}

std::array<Cplx, 3> beamsplitter_two_photon(const Mat& U) {
  return {std::sqrt(2.0) * U(0, 0) * U(0, 1), U(0, 0) * U(1, 1) + U(1, 0) * U(0, 1),
          std::sqrt(2.0) * U(1, 0) * U(1, 1)};
}

}  // namespace oracles
