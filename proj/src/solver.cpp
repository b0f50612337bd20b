#include "squashkit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "squashkit/devices.hpp"

namespace squashkit {

namespace {

// Orthonormal basis of the real space of Hermitian dim x dim matrices.
std::vector<Operator> hermitian_units(Eigen::Index dim) {
  std::vector<Operator> units;
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Operator e = Operator::Zero(dim, dim);
    e(i, i) = 1.0;
    units.push_back(e);
  }
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      Operator re = Operator::Zero(dim, dim);
      re(i, j) = s;
      re(j, i) = s;
      units.push_back(re);
      Operator im = Operator::Zero(dim, dim);
      im(i, j) = Complex(0, s);
      im(j, i) = Complex(0, -s);
      units.push_back(im);
    }
  return units;
}

Operator clip_to_psd(const EigenResult& eig) {
  RVector clipped = eig.eigenvalues.cwiseMax(0.0);
  return eig.eigenvectors * clipped.asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace

ChoiProblem assemble(const Povm& target, const Povm& full) {
  if (target.size() != full.size())
    throw std::invalid_argument("assemble: target and full POVMs must have equal event counts");
  const Eigen::Index dq = target.dim();
  const Eigen::Index dm = full.dim();
  const auto n = static_cast<Eigen::Index>(target.size());
  std::vector<Operator> fulls;
  double full_scale = 1.0;
  for (const auto& label : target.labels) {
    fulls.push_back(full.at(label));
    full_scale = std::max(full_scale, fulls.back().norm());
  }

  // Orthonormalize the real span of the target elements via the Gram matrix;
  // null combinations of targets must be null combinations of the full
  // elements too, otherwise no map can satisfy the constraints.
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      gram(i, j) = hs_inner(target.elements[static_cast<std::size_t>(i)],
                            target.elements[static_cast<std::size_t>(j)])
                       .real();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double cutoff = 1e-9 * std::max(1.0, es.eigenvalues().maxCoeff());

  ChoiProblem prob;
  prob.d_in = dq;
  prob.d_out = dm;
  prob.fixed_part = Operator::Zero(dq * dm, dq * dm);
  std::vector<Operator> span_basis;
  for (Eigen::Index k = 0; k < n; ++k) {
    Operator bq = Operator::Zero(dq, dq);
    Operator wm = Operator::Zero(dm, dm);
    for (Eigen::Index i = 0; i < n; ++i) {
      bq += es.eigenvectors()(i, k) * target.elements[static_cast<std::size_t>(i)];
      wm += es.eigenvectors()(i, k) * fulls[static_cast<std::size_t>(i)];
    }
    if (es.eigenvalues()(k) <= cutoff) {
      if (wm.norm() > 1e-8 * full_scale)
        throw std::invalid_argument(
            "assemble: linear constraints are inconsistent (structurally invalid "
            "postprocessing): a vanishing combination of target elements maps to a detector "
            "operator of norm " +
            std::to_string(wm.norm()));
      continue;
    }
    const double scale = std::sqrt(es.eigenvalues()(k));
    bq /= scale;
    wm /= scale;
    prob.fixed_part += kron(bq.transpose(), wm);
    span_basis.push_back(bq);
  }

  // Complete the constrained directions to a Hermitian orthonormal basis of
  // the target side; every orthogonal direction tensor any detector-side
  // Hermitian unit is an unconstrained Choi direction.
  std::vector<Operator> complement;
  for (const Operator& cand0 : hermitian_units(dq)) {
    Operator cand = cand0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : span_basis) cand -= hs_inner(b, cand).real() * b;
      for (const auto& b : complement) cand -= hs_inner(b, cand).real() * b;
    }
    if (cand.norm() > 1e-6) complement.push_back(cand / cand.norm());
  }
  for (const auto& bq : complement)
    for (const auto& hm : hermitian_units(dm))
      prob.free_basis.push_back(kron(bq.transpose(), hm));
  return prob;
}

FeasibilityVerdict feasibility(const ChoiProblem& problem, double tol, int max_iterations) {
  if (problem.fixed_part.rows() != problem.d_in * problem.d_out)
    throw std::invalid_argument("feasibility: dimensions do not match fixed_part");
  if (!is_hermitian(problem.fixed_part))
    throw std::invalid_argument("feasibility: fixed_part must be Hermitian");
  const double rel = tol > 0.0 ? tol : 1e-9;
  const double tol_abs = rel * std::max(1.0, problem.fixed_part.norm());
  const auto dq = static_cast<double>(problem.d_in);

  FeasibilityVerdict verdict;
  verdict.tolerance = tol_abs;

  if (problem.free_basis.empty()) {
    const EigenResult eig = eig_hermitian(problem.fixed_part);
    verdict.tau = problem.fixed_part / dq;
    verdict.lambda_min = eig.eigenvalues.minCoeff() / dq;
    if (eig.eigenvalues.minCoeff() >= -tol_abs) {
      verdict.status = Feasibility::Feasible;
    } else {
      verdict.status = Feasibility::Infeasible;
      Eigen::Index worst = 0;
      eig.eigenvalues.minCoeff(&worst);
      verdict.witness = eig.eigenvectors.col(worst);
      verdict.witness_value = verdict.lambda_min;
    }
    return verdict;
  }

  // Alternating projections between the PSD cone (eigenvalue clipping) and
  // the affine constraint set (orthogonal projection of the displacement
  // from the particular solution onto the free directions).
  const Eigen::Index dim = problem.fixed_part.rows();
  Eigen::MatrixXcd free_stack(dim * dim, static_cast<Eigen::Index>(problem.free_basis.size()));
  for (std::size_t k = 0; k < problem.free_basis.size(); ++k)
    free_stack.col(static_cast<Eigen::Index>(k)) = vectorize(problem.free_basis[k]);

  Operator affine = problem.fixed_part;
  double gap = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const EigenResult eig = eig_hermitian(affine);
    const Operator psd = clip_to_psd(eig);
    gap = (psd - affine).norm();
    if (gap <= tol_abs) {
      verdict.status = Feasibility::Feasible;
      verdict.tau = affine / dq;
      verdict.lambda_min = eig.eigenvalues.minCoeff() / dq;
      verdict.iterations = it;
      verdict.residual = gap;
      return verdict;
    }
    const CVector coeffs = free_stack.adjoint() * vectorize(psd - problem.fixed_part);
    affine = problem.fixed_part + unvectorize(free_stack * coeffs, dim, dim);
    affine = 0.5 * (affine + affine.adjoint().eval());
  }

  const EigenResult eig = eig_hermitian(affine);
  verdict.tau = affine / dq;
  verdict.lambda_min = eig.eigenvalues.minCoeff() / dq;
  verdict.iterations = max_iterations;
  verdict.residual = gap;
  Eigen::Index worst = 0;
  eig.eigenvalues.minCoeff(&worst);
  const CVector candidate = eig.eigenvectors.col(worst);
  bool orthogonal = true;
  for (const auto& g : problem.free_basis)
    if (std::abs((candidate.adjoint() * g * candidate).value()) > tol_abs) {
      orthogonal = false;
      break;
    }
  const double value = (candidate.adjoint() * problem.fixed_part * candidate).value().real();
  if (orthogonal && value < -tol_abs) {
    verdict.status = Feasibility::Infeasible;
    verdict.witness = candidate;
    verdict.witness_value = value / dq;
  } else {
    verdict.status = Feasibility::Undecided;
  }
  return verdict;
}

Operator trivial_choi(const Operator& rho_fix, Eigen::Index d_out) {
  if (!is_hermitian(rho_fix)) throw std::invalid_argument("trivial_choi: state must be Hermitian");
  if (std::abs(rho_fix.trace().real() - 1.0) > 1e-9 || std::abs(rho_fix.trace().imag()) > 1e-12)
    throw std::invalid_argument("trivial_choi: state must have unit trace");
  if (min_eigenvalue(rho_fix) < -1e-12)
    throw std::invalid_argument("trivial_choi: state must be positive semidefinite");
  const auto dq = static_cast<double>(rho_fix.rows());
  return kron(rho_fix.transpose(), Operator::Identity(d_out, d_out)) / dq;
}

NoiseRestoration restore_with_noise(const ChoiProblem& problem, const Operator& rho_fix) {
  if (rho_fix.rows() != problem.d_in)
    throw std::invalid_argument("restore_with_noise: state dimension must match the target side");
  const Operator trivial = trivial_choi(rho_fix, problem.d_out);
  if (min_eigenvalue(rho_fix) <= 1e-12)
    throw std::invalid_argument("restore_with_noise: the fixed state must be full rank");

  NoiseRestoration result;
  const FeasibilityVerdict verdict = feasibility(problem);
  if (verdict.status == Feasibility::Feasible) {
    result.tau_mixed = verdict.tau;
    return result;
  }
  if (!problem.free_basis.empty())
    throw std::invalid_argument(
        "restore_with_noise: noise restoration needs a fully determined Choi operator "
        "(free directions present)");

  const Operator tau = problem.fixed_part / static_cast<double>(problem.d_in);
  const double lam_tau = min_eigenvalue(tau);
  const double lam_triv = min_eigenvalue(trivial);
  result.p_weyl = lam_tau < 0.0 ? -lam_tau / (lam_triv - lam_tau) : 0.0;

  const double psd_tol = -1e-11 * std::max(1.0, tau.norm());
  auto mixed = [&](double p) { return Operator(((1.0 - p) * tau + p * trivial).eval()); };
  auto feasible_at = [&](double p) { return min_eigenvalue(mixed(p)) >= psd_tol; };
  // The eigenvalue bound certifies feasibility at p_weyl, so the bisection
  // can start there; this keeps p_exact <= p_weyl at any resolution.
  double lo = 0.0, hi = feasible_at(result.p_weyl) ? result.p_weyl : 1.0;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(mid))
      hi = mid;
    else
      lo = mid;
  }
  result.p_exact = hi;
  result.tau_mixed = mixed(hi);
  return result;
}

Operator bb84_closed_form_choi(int photons) {
  if (photons < 1) throw std::invalid_argument("bb84_closed_form_choi: photon number must be >= 1");
  const double s = std::pow(2.0, -0.5 * photons);
  const double pm = photons % 2 == 0 ? 1.0 : -1.0;
  const double delta = 1.0 - pm;
  const double d2 = delta * s * s;
  Eigen::Matrix4d mz, mx, m1, skew;
  mz << 1, 0, s, s,
      0, -1, -s, -pm * s,
      s, -s, 0, d2,
      s, -pm * s, d2, 0;
  mx << 0, d2, s, -s,
      d2, 0, s, -pm * s,
      s, s, 1, 0,
      -s, -pm * s, 0, -1;
  m1 << 1, 0, s, s,
      0, 1, s, pm * s,
      s, s, 1, 0,
      s, pm * s, 0, 1;
  // x6 = -x1: the one-photon case must reproduce the identity map's Choi,
  // which fixes the relative sign; the symmetric choice x6 = +x1 breaks
  // positivity for every odd photon number.
  const double x1 = d2, x2 = s, x3 = -s, x4 = -s, x5 = pm * s, x6 = -d2;
  skew << 0, x1, x2, x3,
      -x1, 0, x4, x5,
      -x2, -x4, 0, x6,
      -x3, -x5, -x6, 0;
  Eigen::Matrix<double, 8, 8> m;
  m.topLeftCorner<4, 4>() = m1 + mz;
  m.topRightCorner<4, 4>() = mx + skew;
  m.bottomLeftCorner<4, 4>() = mx - skew;
  m.bottomRightCorner<4, 4>() = m1 - mz;
  return (m / 4.0).cast<Complex>();
}

namespace {

// Closed-form lower bound on 4 lambda_min of the phase-encoded BB84 Choi;
// the final term is evaluated via the geometric sum so t = 1 is regular.
double pe_bb84_bound(double t, int photons) {
  const double ratio = (1.0 - t) / (1.0 + t);
  double geom = 0.0, tk = 1.0;
  for (int k = 0; k < photons; ++k) {
    geom += tk;
    tk *= t;
  }
  const double middle = 2.0 * (1.0 + t) / (std::pow(2.0, photons) * std::sqrt(t)) *
                        std::sqrt(1.0 - std::pow(ratio, 2 * photons));
  return 1.0 - middle - geom / std::pow(1.0 + t, photons - 1);
}

}  // namespace

PeBb84Eig pe_bb84_min_eig(double t, int photons) {
  if (t <= 0.0 || t > 1.0)
    throw std::invalid_argument("pe_bb84_min_eig: loss parameter t must lie in (0, 1]");
  if (photons < 1) throw std::invalid_argument("pe_bb84_min_eig: photon number must be >= 1");
  const DeviceBlock blk = pe_bb84(t).block(photons);
  const ChoiProblem prob = assemble(blk.target, blk.full);
  Operator choi = prob.fixed_part;
  if (!prob.free_basis.empty()) {
    // Balanced interferometer (t = 1): the in/out time windows carry equal
    // weight, the outside-window target element degenerates to 1/2, and the
    // constraints no longer pin the sigma_z block of the Choi matrix.  The
    // eigenvalue curve continues analytically through this point: the block
    // equals (F_out - F_in) / (2 xi - 1), whose diagonal entries stay finite
    // when written as geometric sums.  Complete the Choi with that limit.
    const double xi = 1.0 / (1.0 + t);
    const double u = xi, v = 1.0 - xi;
    const auto splits = photon_splits(photons, 2);
    const Eigen::Index dm = static_cast<Eigen::Index>(splits.size());
    for (Eigen::Index i = 0; i < dm; ++i) {
      const int r = splits[static_cast<std::size_t>(i)][0];
      const int d = std::abs(2 * r - photons);
      if (d == 0) continue;
      double geom = 0.0;
      for (int j = 0; j < d; ++j) geom += std::pow(u, j) * std::pow(v, d - 1 - j);
      const double k = (2 * r > photons ? 1.0 : -1.0) *
                       std::pow(u * v, std::min(r, photons - r)) * geom;
      choi(i, i) += 0.5 * k;
      choi(dm + i, dm + i) -= 0.5 * k;
    }
  }
  PeBb84Eig result;
  result.lambda_min = min_eigenvalue(choi) / 2.0;
  result.bound = pe_bb84_bound(t, photons);
  if (4.0 * result.lambda_min < result.bound - 1e-8)
    throw std::logic_error("pe_bb84_min_eig: eigenvalue fell below its analytic bound");
  return result;
}

double gerschgorin_min(const Operator& h) {
  if (!is_hermitian(h)) throw std::invalid_argument("gerschgorin_min: operator must be Hermitian");
  if (h.rows() == 0) throw std::invalid_argument("gerschgorin_min: empty operator");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    double radius = 0.0;
    for (Eigen::Index j = 0; j < h.cols(); ++j)
      if (j != i) radius += std::abs(h(i, j));
    best = std::min(best, h(i, i).real() - radius);
  }
  return best;
}

double mub_positivity_bound(int d, int photons) {
  if (d < 2) throw std::invalid_argument("mub_positivity_bound: dimension must be >= 2");
  if (photons < 2)
    throw std::invalid_argument("mub_positivity_bound: defined for photon numbers >= 2");
  return (1.0 - std::pow(d + 1.0, 2.0 - photons)) / (static_cast<double>(d) * d);
}

double mub_balance_residual(int d, const std::vector<double>& arm_probabilities, int photons) {
  if (static_cast<int>(arm_probabilities.size()) != d + 1)
    throw std::invalid_argument("mub_balance_residual: need d+1 arm probabilities");
  if (photons < 1) throw std::invalid_argument("mub_balance_residual: photon number must be >= 1");
  double sum = 0.0, sum_n = 0.0;
  for (double p : arm_probabilities) {
    sum += p;
    sum_n += std::pow(p, photons);
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("mub_balance_residual: arm probabilities must sum to 1");
  double worst = 0.0;
  for (double p : arm_probabilities) {
    const double lhs = ((d + 1.0) * std::pow(p, photons) + 1.0 - sum_n) / (d * (d + 1.0));
    worst = std::max(worst, std::abs(lhs - p / d));
  }
  return worst;
}

}  // namespace squashkit
