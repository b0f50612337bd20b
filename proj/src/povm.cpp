#include "squashkit/povm.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace squashkit {

bool Povm::has(const std::string& label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

const Operator& Povm::at(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return elements[i];
  throw std::out_of_range("Povm::at: unknown label '" + label + "'");
}

Povm make_povm(std::vector<std::string> labels, std::vector<Operator> elements,
               double completeness_tol) {
  if (labels.size() != elements.size())
    throw std::invalid_argument("make_povm: label/element count mismatch");
  if (elements.empty()) throw std::invalid_argument("make_povm: empty POVM");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw std::invalid_argument("make_povm: empty label");
    if (!seen.insert(l).second)
      throw std::invalid_argument("make_povm: duplicate label '" + l + "'");
  }
  const Eigen::Index d = elements.front().rows();
  Operator sum = Operator::Zero(d, d);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const Operator& E = elements[i];
    if (E.rows() != d || E.cols() != d)
      throw std::invalid_argument("make_povm: element '" + labels[i] + "' has wrong shape");
    if (!is_hermitian(E))
      throw std::invalid_argument("make_povm: element '" + labels[i] + "' is not Hermitian");
    const double lmin = eig_hermitian(E).eigenvalues(0);
    if (lmin < -1e-10 * std::max(1.0, E.norm())) {
      std::ostringstream msg;
      msg << "make_povm: element '" << labels[i] << "' is not PSD (min eigenvalue " << lmin
          << ")";
      throw std::invalid_argument(msg.str());
    }
    sum += E;
  }
  const double completeness = (sum - Operator::Identity(d, d)).norm();
  if (completeness > completeness_tol) {
    std::ostringstream msg;
    msg << "make_povm: elements do not sum to the identity (residual " << completeness << ")";
    throw std::invalid_argument(msg.str());
  }
  return Povm{std::move(labels), std::move(elements)};
}

double povm_min_eigenvalue(const Povm& p) {
  double lmin = 0.0;
  for (const auto& E : p.elements) lmin = std::min(lmin, eig_hermitian(E).eigenvalues(0));
  return lmin;
}

Povm compress_povm(const Povm& p, const Operator& basis) {
  Povm out;
  out.labels = p.labels;
  out.elements.reserve(p.elements.size());
  for (const auto& E : p.elements) out.elements.push_back(basis.adjoint() * E * basis);
  return out;
}

namespace {

// Label-matched weighted sums F_r = sum_c entries(r, c) E_c with shape checks
// only; validate_cpp needs them for non-stochastic matrices too, where the
// public apply_cpp refuses to produce a Povm.
std::vector<Operator> cpp_images(const CppMatrix& cpp, const Povm& basic) {
  if (static_cast<Eigen::Index>(cpp.full_labels.size()) != cpp.entries.rows() ||
      static_cast<Eigen::Index>(cpp.basic_labels.size()) != cpp.entries.cols())
    throw std::invalid_argument("apply_cpp: CPP label/matrix shape mismatch");
  if (cpp.basic_labels.size() != basic.size())
    throw std::invalid_argument("apply_cpp: CPP expects " +
                                std::to_string(cpp.basic_labels.size()) +
                                " basic events, POVM has " + std::to_string(basic.size()));
  const Eigen::Index d = basic.dim();
  std::vector<Operator> out(cpp.full_labels.size(), Operator::Zero(d, d));
  for (Eigen::Index c = 0; c < cpp.entries.cols(); ++c) {
    const std::string& label = cpp.basic_labels[static_cast<std::size_t>(c)];
    if (!basic.has(label))
      throw std::invalid_argument("apply_cpp: basic event '" + label + "' missing from POVM");
    const Operator& E = basic.at(label);
    for (Eigen::Index r = 0; r < cpp.entries.rows(); ++r) {
      const double w = cpp.entries(r, c);
      if (w != 0.0) out[static_cast<std::size_t>(r)] += w * E;
    }
  }
  return out;
}

}  // namespace

Povm apply_cpp(const CppMatrix& cpp, const Povm& basic) {
  for (Eigen::Index c = 0; c < cpp.entries.cols(); ++c) {
    if (c < static_cast<Eigen::Index>(cpp.basic_labels.size()) &&
        std::abs(cpp.entries.col(c).sum() - 1.0) > 1e-9)
      throw std::invalid_argument("apply_cpp: CPP column '" +
                                  cpp.basic_labels[static_cast<std::size_t>(c)] +
                                  "' does not sum to one");
    if (cpp.entries.col(c).minCoeff() < -1e-12)
      throw std::invalid_argument("apply_cpp: negative CPP entry in column " +
                                  std::to_string(c));
  }
  return make_povm(cpp.full_labels, cpp_images(cpp, basic));
}

CppValidation validate_cpp(const CppMatrix& cpp, const Povm& basic, const Povm& target,
                           double tol) {
  CppValidation report;
  // -- stochasticity -------------------------------------------------------
  double worst = 0.0;
  for (Eigen::Index c = 0; c < cpp.entries.cols(); ++c) {
    worst = std::max(worst, std::abs(cpp.entries.col(c).sum() - 1.0));
    worst = std::max(worst, std::max(0.0, -cpp.entries.col(c).minCoeff()));
  }
  report.stochastic_residual = worst;
  report.stochastic = worst <= 1e-12;

  // -- structural validity: dependencies of the target must be inherited ----
  if (static_cast<std::size_t>(cpp.entries.rows()) != target.size())
    throw std::invalid_argument("validate_cpp: CPP row count does not match target POVM");
  for (const auto& l : target.labels)
    if (std::find(cpp.full_labels.begin(), cpp.full_labels.end(), l) == cpp.full_labels.end())
      throw std::invalid_argument("validate_cpp: target label '" + l +
                                  "' missing from CPP rows");
  // Build the image POVM without the stochasticity gate: the report must
  // describe broken matrices instead of refusing them.
  Povm full;
  full.labels = cpp.full_labels;
  full.elements = cpp_images(cpp, basic);
  // Stack vectorized target elements as rows (one row per event) and find the
  // left null combinations by SVD.
  const Eigen::Index n = static_cast<Eigen::Index>(target.size());
  const Eigen::Index dt = target.dim();
  Operator stack(n, dt * dt);
  for (Eigen::Index i = 0; i < n; ++i)
    stack.row(i) = vectorize(target.elements[static_cast<std::size_t>(i)]).transpose();
  Eigen::JacobiSVD<Operator> svd(stack.transpose(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * 1e-9;
  double scale = 1.0;
  for (const auto& E : full.elements) scale = std::max(scale, E.norm());
  report.structurally_valid = true;
  report.nullspace_residual = 0.0;
  // V columns past the singular-value list (present when there are more
  // events than operator dimensions) are exact null combinations too.
  for (Eigen::Index k = 0; k < svd.matrixV().cols(); ++k) {
    if (k < sv.size() && sv(k) > cutoff) continue;
    const CVector combo = svd.matrixV().col(k);
    const Eigen::Index d = full.dim();
    Operator image = Operator::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      // combo(i) weights target element i; pick the full element of the same
      // label (events are matched by label, never by position).
      image += combo(i) * full.at(target.labels[static_cast<std::size_t>(i)]);
    }
    const double res = image.norm() / scale;
    if (res > report.nullspace_residual) {
      report.nullspace_residual = res;
      if (res > tol) {
        report.structurally_valid = false;
        report.violated_dependency = combo.real();
      }
    }
  }
  return report;
}

SubspaceSplit single_click_split(const Povm& full, const std::vector<CVector>& click_vectors,
                                 double tol) {
  const Eigen::Index d = full.dim();
  SubspaceSplit split;
  split.basis_P = orthonormal_basis(click_vectors);
  const Eigen::Index k = split.basis_P.cols();
  // Complement: eigenvectors of 1 - Pi_P with eigenvalue 1.
  const Operator proj = split.basis_P * split.basis_P.adjoint();
  Eigen::SelfAdjointEigenSolver<Operator> comp(Operator::Identity(d, d) - proj);
  Operator perp(d, d - k);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    if (comp.eigenvalues()(i) > 0.5) perp.col(col++) = comp.eigenvectors().col(i);
  if (col != d - k) throw std::runtime_error("single_click_split: complement rank mismatch");
  split.basis_Pperp = perp;

  for (std::size_t i = 0; i < full.size(); ++i) {
    const Operator& E = full.elements[i];
    const double comm = (E * proj - proj * E).norm() / std::max(1.0, E.norm());
    split.max_commutator = std::max(split.max_commutator, comm);
  }
  if (split.max_commutator > tol) {
    std::ostringstream msg;
    msg << "single_click_split: POVM does not commute with the click-subspace projector "
        << "(max relative commutator norm " << split.max_commutator << " > " << tol << ")";
    throw std::invalid_argument(msg.str());
  }
  split.on_P = compress_povm(full, split.basis_P);
  if (d > k) split.on_Pperp = compress_povm(full, split.basis_Pperp);
  return split;
}

}  // namespace squashkit
