#include "squashkit/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace squashkit {

namespace {

void enumerate_descending(int modes, int photons, std::vector<int>& prefix,
                          std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == modes - 1) {
    prefix.push_back(photons);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int n = photons; n >= 0; --n) {
    prefix.push_back(n);
    enumerate_descending(modes, photons - n, prefix, out);
    prefix.pop_back();
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Applies the creation-operator polynomial prod_j (sum_k U(k,j) b_k^dag)^occ_j
// to the vacuum and returns the normalized amplitudes over `levels.back()`.
// `levels[t]` must be fock_basis(modes, t).
CVector lift_column(const Eigen::MatrixXcd& U, const std::vector<int>& occupation,
                    const std::vector<OccupationBasis>& levels) {
  const int modes = static_cast<int>(U.rows());
  CVector amps = CVector::Ones(1);  // vacuum amplitude
  int level = 0;
  for (int j = 0; j < static_cast<int>(occupation.size()); ++j) {
    for (int rep = 0; rep < occupation[j]; ++rep) {
      const OccupationBasis& cur = levels[static_cast<std::size_t>(level)];
      const OccupationBasis& next = levels[static_cast<std::size_t>(level + 1)];
      CVector grown = CVector::Zero(static_cast<Eigen::Index>(next.size()));
      for (std::size_t s = 0; s < cur.size(); ++s) {
        const Complex a = amps(static_cast<Eigen::Index>(s));
        if (a == Complex(0.0, 0.0)) continue;
        std::vector<int> occ = cur.states[s];
        for (int k = 0; k < modes; ++k) {
          const Complex u = U(k, j);
          if (u == Complex(0.0, 0.0)) continue;
          occ[static_cast<std::size_t>(k)] += 1;
          grown(static_cast<Eigen::Index>(next.index_of(occ))) +=
              a * u * std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(k)]));
          occ[static_cast<std::size_t>(k)] -= 1;
        }
      }
      amps.swap(grown);
      ++level;
    }
  }
  double norm = 1.0;
  for (int n : occupation) norm *= factorial(n);
  return amps / std::sqrt(norm);
}

std::vector<OccupationBasis> basis_ladder(int modes, int photons) {
  std::vector<OccupationBasis> levels;
  levels.reserve(static_cast<std::size_t>(photons) + 1);
  for (int t = 0; t <= photons; ++t) levels.push_back(fock_basis(modes, t));
  return levels;
}

}  // namespace

std::size_t OccupationBasis::index_of(const std::vector<int>& occupation) const {
  const auto it = index_.find(occupation);
  if (it == index_.end())
    throw std::out_of_range("OccupationBasis::index_of: occupation not in basis");
  return it->second;
}

OccupationBasis fock_basis(int modes, int photons) {
  if (modes < 1) throw std::invalid_argument("fock_basis: need at least one mode");
  if (photons < 0) throw std::invalid_argument("fock_basis: negative photon number");
  OccupationBasis basis;
  basis.modes = modes;
  basis.photons = photons;
  std::vector<int> prefix;
  enumerate_descending(modes, photons, prefix, basis.states);
  for (std::size_t i = 0; i < basis.states.size(); ++i) basis.index_[basis.states[i]] = i;
  return basis;
}

CVector symmetric_product_state(const OccupationBasis& basis, const CVector& v) {
  if (v.size() != basis.modes)
    throw std::invalid_argument("symmetric_product_state: amplitude/mode count mismatch");
  const double nfact = factorial(basis.photons);
  CVector out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const auto& occ = basis.states[s];
    Complex amp = 1.0;
    double denom = 1.0;
    for (int j = 0; j < basis.modes; ++j) {
      for (int rep = 0; rep < occ[static_cast<std::size_t>(j)]; ++rep) amp *= v(j);
      denom *= factorial(occ[static_cast<std::size_t>(j)]);
    }
    out(static_cast<Eigen::Index>(s)) = amp * std::sqrt(nfact / denom);
  }
  return out;
}

ModeTransform beam_splitter(double transmission, double phase) {
  if (transmission < 0.0 || transmission > 1.0)
    throw std::invalid_argument("beam_splitter: transmission outside [0, 1]");
  const double t = std::sqrt(transmission);
  const double r = std::sqrt(1.0 - transmission);
  const Complex ph = std::polar(1.0, phase);
  Eigen::MatrixXcd U(2, 2);
  U << ph * r, t, t, -std::conj(ph) * r;
  return {U};
}

ModeTransform fourier_multiport(int ports) {
  if (ports < 1) throw std::invalid_argument("fourier_multiport: need at least one port");
  Eigen::MatrixXcd U(ports, ports);
  const double scale = 1.0 / std::sqrt(static_cast<double>(ports));
  for (int a = 0; a < ports; ++a)
    for (int b = 0; b < ports; ++b)
      U(a, b) = scale * std::polar(1.0, 2.0 * std::numbers::pi * a * b / ports);
  return {U};
}

Operator lift_unitary(const ModeTransform& transform, int photons) {
  const int modes = static_cast<int>(transform.matrix.rows());
  if (transform.matrix.cols() != modes)
    throw std::invalid_argument("lift_unitary: mode matrix must be square");
  const auto levels = basis_ladder(modes, photons);
  const OccupationBasis& basis = levels.back();
  Operator lifted(static_cast<Eigen::Index>(basis.size()),
                  static_cast<Eigen::Index>(basis.size()));
  for (std::size_t col = 0; col < basis.size(); ++col)
    lifted.col(static_cast<Eigen::Index>(col)) =
        lift_column(transform.matrix, basis.states[col], levels);
  return lifted;
}

Povm threshold_povm(const ModeTransform& transform, const DetectorLayout& layout, int photons,
                    const std::vector<int>& input_modes) {
  const int modes = static_cast<int>(transform.matrix.rows());
  if (transform.matrix.cols() != modes)
    throw std::invalid_argument("threshold_povm: mode matrix must be square");
  // Every output mode must be monitored by exactly one detector.
  std::set<int> covered;
  for (const auto& [name, group] : layout.groups) {
    for (int mode : group) {
      if (mode < 0 || mode >= modes)
        throw std::invalid_argument("threshold_povm: detector '" + name +
                                    "' references mode " + std::to_string(mode));
      if (!covered.insert(mode).second)
        throw std::invalid_argument("threshold_povm: mode " + std::to_string(mode) +
                                    " assigned to two detectors");
    }
  }
  if (static_cast<int>(covered.size()) != modes)
    throw std::invalid_argument("threshold_povm: some output modes are unmonitored");

  std::vector<int> inputs = input_modes;
  if (inputs.empty()) {
    inputs.resize(static_cast<std::size_t>(modes));
    std::iota(inputs.begin(), inputs.end(), 0);
  }
  const OccupationBasis in_basis = fock_basis(static_cast<int>(inputs.size()), photons);
  const auto levels = basis_ladder(modes, photons);
  const OccupationBasis& out_basis = levels.back();

  // Transfer matrix: amplitudes of output occupations per input basis state.
  Operator A(static_cast<Eigen::Index>(out_basis.size()),
             static_cast<Eigen::Index>(in_basis.size()));
  for (std::size_t col = 0; col < in_basis.size(); ++col) {
    std::vector<int> embedded(static_cast<std::size_t>(modes), 0);
    for (std::size_t j = 0; j < inputs.size(); ++j)
      embedded[static_cast<std::size_t>(inputs[j])] = in_basis.states[col][j];
    A.col(static_cast<Eigen::Index>(col)) = lift_column(transform.matrix, embedded, levels);
  }

  // Click pattern of each output occupation, in layout order.
  std::map<std::string, std::vector<Eigen::Index>> pattern_rows;
  for (std::size_t s = 0; s < out_basis.size(); ++s) {
    std::string pattern(layout.groups.size(), '0');
    for (std::size_t g = 0; g < layout.groups.size(); ++g) {
      int total = 0;
      for (int mode : layout.groups[g].second)
        total += out_basis.states[s][static_cast<std::size_t>(mode)];
      if (total > 0) pattern[g] = '1';
    }
    pattern_rows[pattern].push_back(static_cast<Eigen::Index>(s));
  }

  Povm povm;
  for (const auto& [pattern, rows] : pattern_rows) {
    Operator block(static_cast<Eigen::Index>(rows.size()), A.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) block.row(static_cast<Eigen::Index>(r)) = A.row(rows[r]);
    Operator element = block.adjoint() * block;
    if (element.norm() < 1e-14) continue;
    povm.labels.push_back(pattern);
    povm.elements.push_back(std::move(element));
  }
  return make_povm(std::move(povm.labels), std::move(povm.elements));
}

}  // namespace squashkit
