#include "squashkit/check.hpp"

#include <cmath>
#include <stdexcept>

namespace squashkit {

namespace {

// Least-squares reconstruction of a state rho with tr(rho F_target^i) = c_i;
// used to certify that the complement block is the trivial map's output.
struct TrivialFit {
  Operator rho;
  double residual = 0.0;
};

TrivialFit fit_trivial_state(const Povm& target, const Eigen::VectorXd& coefficients) {
  const Eigen::Index dq = target.dim();
  std::vector<Operator> units;
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < dq; ++i) {
    Operator e = Operator::Zero(dq, dq);
    e(i, i) = 1.0;
    units.push_back(e);
  }
  for (Eigen::Index i = 0; i < dq; ++i)
    for (Eigen::Index j = i + 1; j < dq; ++j) {
      Operator re = Operator::Zero(dq, dq);
      re(i, j) = s;
      re(j, i) = s;
      units.push_back(re);
      Operator im = Operator::Zero(dq, dq);
      im(i, j) = Complex(0, s);
      im(j, i) = Complex(0, -s);
      units.push_back(im);
    }
  const auto n = static_cast<Eigen::Index>(target.size());
  Eigen::MatrixXd a(n, static_cast<Eigen::Index>(units.size()));
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t k = 0; k < units.size(); ++k)
      a(i, static_cast<Eigen::Index>(k)) =
          hs_inner(units[k], target.elements[static_cast<std::size_t>(i)]).real();
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(coefficients);
  TrivialFit fit;
  fit.rho = Operator::Zero(dq, dq);
  for (std::size_t k = 0; k < units.size(); ++k)
    fit.rho += x(static_cast<Eigen::Index>(k)) * units[k];
  fit.residual = (a * x - coefficients).norm();
  return fit;
}

}  // namespace

DeviceCheck check_block(const std::string& name, const DeviceBlock& block, double tol,
                        int max_iterations) {
  DeviceCheck report;
  report.device = name;
  report.photons = block.photons;
  report.cpp_validation = validate_cpp(block.cpp, block.basic, block.target);

  Povm decided_full = block.full;
  if (!block.click_vectors.empty()) {
    const SubspaceSplit split = single_click_split(block.full, block.click_vectors);
    report.commutator = split.max_commutator;
    if (split.basis_Pperp.cols() > 0) {
      report.reduced = true;
      decided_full = split.on_P;
      // Complement block: every element must be a multiple of the identity,
      // with weights realized by some state fed to the target POVM.
      const Eigen::Index dperp = split.basis_Pperp.cols();
      Eigen::VectorXd coefficients(static_cast<Eigen::Index>(split.on_Pperp.size()));
      double deviation = 0.0;
      for (std::size_t i = 0; i < split.on_Pperp.size(); ++i) {
        const Operator& e = split.on_Pperp.elements[i];
        const double c = e.trace().real() / static_cast<double>(dperp);
        coefficients(static_cast<Eigen::Index>(i)) = c;
        deviation = std::max(deviation,
                             (e - c * Operator::Identity(dperp, dperp)).norm());
      }
      const TrivialFit fit = fit_trivial_state(block.target, coefficients);
      report.rho_fix = fit.rho;
      const double state_negativity = -std::min(0.0, min_eigenvalue(fit.rho));
      report.rest_residual = std::max({deviation, fit.residual, state_negativity,
                                       std::abs(fit.rho.trace().real() - 1.0)});
      report.trivial_rest = report.rest_residual <= 1e-8;
    }
  }

  report.problem = assemble(block.target, decided_full);
  report.problem.provenance = name + " N=" + std::to_string(block.photons) +
                              (report.reduced ? " (single-click block)" : "");
  report.verdict = feasibility(report.problem, tol, max_iterations);
  return report;
}

DeviceCheck check_device(const DeviceFamily& family, int photons, double tol,
                         int max_iterations) {
  return check_block(family.name, family.block(photons), tol, max_iterations);
}

}  // namespace squashkit
