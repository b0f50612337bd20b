#include "squashkit/devices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace squashkit {

namespace {

Operator outer(const CVector& v) { return v * v.adjoint(); }

bool is_prime(int d) {
  if (d < 2) return false;
  for (int k = 2; k * k <= d; ++k)
    if (d % k == 0) return false;
  return true;
}

// Single-photon analyzer bases for the qubit devices.
std::vector<CVector> qubit_basis(const std::string& name) {
  CVector e0(2), e1(2);
  e0 << 1.0, 0.0;
  e1 << 0.0, 1.0;
  const double s = 1.0 / std::sqrt(2.0);
  if (name == "z") return {e0, e1};
  if (name == "x") return {CVector(s * (e0 + e1)), CVector(s * (e0 - e1))};
  if (name == "y")
    return {CVector(s * (e0 + Complex(0, 1) * e1)), CVector(s * (e0 - Complex(0, 1) * e1))};
  throw std::invalid_argument("qubit_basis: unknown basis '" + name + "'");
}

// The d+1 mutually unbiased bases of a prime-dimensional system: basis 0 is
// the standard basis, basis alpha+1 the eigenbasis of X Z^alpha with
// components omega^{-ij + alpha j(j-1)/2}/sqrt(d) (odd d); for d = 2 the
// third basis is the y basis (1, +-i)/sqrt(2).
std::vector<std::vector<CVector>> mub_bases(int d) {
  if (!is_prime(d)) throw std::invalid_argument("mub_bases: dimension must be prime");
  std::vector<std::vector<CVector>> bases;
  std::vector<CVector> standard;
  for (int i = 0; i < d; ++i) {
    CVector e = CVector::Zero(d);
    e(i) = 1.0;
    standard.push_back(e);
  }
  bases.push_back(standard);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int alpha = 0; alpha < d; ++alpha) {
    if (d == 2 && alpha == 1) {
      CVector y0(2), y1(2);
      y0 << scale, Complex(0, scale);
      y1 << scale, Complex(0, -scale);
      bases.push_back({y0, y1});
      continue;
    }
    std::vector<CVector> basis;
    for (int i = 0; i < d; ++i) {
      CVector v(d);
      for (int j = 0; j < d; ++j) {
        long exponent = -static_cast<long>(i) * j + static_cast<long>(alpha) * j * (j - 1) / 2;
        exponent %= d;
        if (exponent < 0) exponent += d;
        v(j) = scale * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(exponent) / d);
      }
      basis.push_back(v);
    }
    bases.push_back(basis);
  }
  return bases;
}

// Completes a matrix with orthonormal columns to a unitary, preserving the
// given columns, by Gram-Schmidt over the standard basis.
Eigen::MatrixXcd complete_to_unitary(const Eigen::MatrixXcd& isometry) {
  const Eigen::Index n = isometry.rows();
  if ((isometry.adjoint() * isometry - Operator::Identity(isometry.cols(), isometry.cols()))
          .norm() > 1e-10)
    throw std::invalid_argument("complete_to_unitary: columns are not orthonormal");
  Eigen::MatrixXcd U(n, n);
  U.leftCols(isometry.cols()) = isometry;
  Eigen::Index have = isometry.cols();
  for (Eigen::Index i = 0; i < n && have < n; ++i) {
    CVector v = CVector::Zero(n);
    v(i) = 1.0;
    for (int pass = 0; pass < 2; ++pass)  // twice for numerical orthogonality
      v -= U.leftCols(have) * (U.leftCols(have).adjoint() * v);
    if (v.norm() > 1e-8) U.col(have++) = v.normalized();
  }
  if (have != n) throw std::runtime_error("complete_to_unitary: completion failed");
  return U;
}

// Analyzer unitary of one arm: rows are the conjugated basis vectors, so a
// photon in basis state i exits toward detector i.
Eigen::MatrixXcd analyzer(const std::vector<CVector>& basis) {
  const Eigen::Index d = basis.front().size();
  Eigen::MatrixXcd W(d, d);
  for (std::size_t i = 0; i < basis.size(); ++i)
    W.row(static_cast<Eigen::Index>(i)) = basis[i].conjugate().transpose();
  return W;
}

// One passively or actively selected measurement setting: an unweighted
// POVM (sums to the block identity) plus its selection probability.
struct SettingModule {
  std::string basis;
  double weight = 1.0;
  std::vector<std::string> labels;
  std::vector<Operator> elements;
};

// Unweighted single-basis threshold measurement of N photons: two single
// clicks and the double click.
SettingModule qubit_setting(const std::string& basis_name, double weight, int photons) {
  const OccupationBasis basis = fock_basis(2, photons);
  const auto vecs = qubit_basis(basis_name);
  const Operator p0 = outer(symmetric_product_state(basis, vecs[0]));
  const Operator p1 = outer(symmetric_product_state(basis, vecs[1]));
  const Eigen::Index dim = p0.rows();
  SettingModule m;
  m.basis = basis_name;
  m.weight = weight;
  m.labels = {"sc:" + basis_name + ":0", "sc:" + basis_name + ":1", "dc:" + basis_name};
  m.elements = {p0, p1, Operator::Identity(dim, dim) - p0 - p1};
  return m;
}

// Assembles basic POVM + CPP + full + target for an actively switched qubit
// device with equal double-click splitting and optional outcome flipping.
DeviceBlock active_qubit_block(int photons, const std::vector<std::string>& bases,
                               const std::vector<double>& probs, double flip_probability) {
  if (photons < 1) throw std::invalid_argument("device block: photon number must be >= 1");
  DeviceBlock blk;
  blk.photons = photons;
  const OccupationBasis nb = fock_basis(2, photons);
  std::vector<std::string> basic_labels, full_labels;
  std::vector<Operator> basic_elements;
  std::vector<Operator> target_elements;
  for (std::size_t a = 0; a < bases.size(); ++a) {
    SettingModule m = qubit_setting(bases[a], probs[a], photons);
    for (std::size_t e = 0; e < m.labels.size(); ++e) {
      basic_labels.push_back(m.labels[e]);
      basic_elements.push_back(m.weight * m.elements[e]);
    }
    const auto vecs = qubit_basis(bases[a]);
    for (int b = 0; b < 2; ++b) {
      full_labels.push_back("q:" + bases[a] + ":" + std::to_string(b));
      target_elements.push_back(probs[a] * outer(vecs[static_cast<std::size_t>(b)]));
      blk.click_vectors.push_back(
          symmetric_product_state(nb, vecs[static_cast<std::size_t>(b)]));
    }
  }
  blk.basic = make_povm(basic_labels, basic_elements);
  blk.target = make_povm(full_labels, target_elements);

  CppMatrix cpp;
  cpp.full_labels = full_labels;
  cpp.basic_labels = basic_labels;
  cpp.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(full_labels.size()),
                                      static_cast<Eigen::Index>(basic_labels.size()));
  const double p = flip_probability;
  for (std::size_t a = 0; a < bases.size(); ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto row = static_cast<Eigen::Index>(2 * a + static_cast<std::size_t>(b));
      // single clicks: keep with 1 - p/2, flip with p/2; double clicks split
      // equally (the flip leaves the equal split unchanged).
      cpp.entries(row, static_cast<Eigen::Index>(3 * a + static_cast<std::size_t>(b))) =
          1.0 - p / 2.0;
      cpp.entries(row, static_cast<Eigen::Index>(3 * a + static_cast<std::size_t>(1 - b))) =
          p / 2.0;
      cpp.entries(row, static_cast<Eigen::Index>(3 * a + 2)) = 0.5;
    }
  }
  blk.cpp = cpp;
  blk.full = apply_cpp(cpp, blk.basic);
  return blk;
}

// Engine counterpart of an active qubit device: one threshold simulation per
// basis, patterns regrouped under the closed-form labels.
Povm active_qubit_engine(int photons, const std::vector<std::string>& bases,
                         const std::vector<double>& probs) {
  std::vector<std::string> labels;
  std::vector<Operator> elements;
  const Eigen::Index dim = static_cast<Eigen::Index>(fock_basis(2, photons).size());
  for (std::size_t a = 0; a < bases.size(); ++a) {
    const auto vecs = qubit_basis(bases[a]);
    DetectorLayout layout{{{"d0", {0}}, {"d1", {1}}}};
    const Povm patterns = threshold_povm({analyzer(vecs)}, layout, photons);
    Operator sc0 = Operator::Zero(dim, dim), sc1 = sc0, dc = sc0;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      const std::string& pat = patterns.labels[i];
      if (pat == "10")
        sc0 += patterns.elements[i];
      else if (pat == "01")
        sc1 += patterns.elements[i];
      else
        dc += patterns.elements[i];
    }
    labels.push_back("sc:" + bases[a] + ":0");
    elements.push_back(probs[a] * sc0);
    labels.push_back("sc:" + bases[a] + ":1");
    elements.push_back(probs[a] * sc1);
    labels.push_back("dc:" + bases[a]);
    elements.push_back(probs[a] * dc);
  }
  return make_povm(labels, elements);
}

// Passive polarization front end: arm-splitting unitary (x) identity on the
// polarization, followed by per-arm analyzers. Input enters arm 0's two
// modes.
Eigen::MatrixXcd passive_polarization_network(const std::vector<std::string>& arm_bases,
                                              const Eigen::MatrixXcd& arm_splitter) {
  const auto arms = static_cast<Eigen::Index>(arm_bases.size());
  Eigen::MatrixXcd analyzers = Eigen::MatrixXcd::Zero(2 * arms, 2 * arms);
  for (Eigen::Index a = 0; a < arms; ++a)
    analyzers.block(2 * a, 2 * a, 2, 2) = analyzer(qubit_basis(arm_bases[static_cast<std::size_t>(a)]));
  return analyzers * kron(arm_splitter, Operator::Identity(2, 2));
}

std::string classify_arm_pattern(const std::string& pattern, int arms, int per_arm,
                                 const std::vector<std::string>& arm_names,
                                 const std::string& multi_label_prefix) {
  std::vector<int> arm_clicks(static_cast<std::size_t>(arms), 0);
  int clicked_arm = -1, total = 0;
  int outcome = -1;
  for (int pos = 0; pos < static_cast<int>(pattern.size()); ++pos) {
    if (pattern[static_cast<std::size_t>(pos)] != '1') continue;
    const int arm = pos / per_arm;
    ++arm_clicks[static_cast<std::size_t>(arm)];
    clicked_arm = arm;
    outcome = pos % per_arm;
    ++total;
  }
  int arms_hit = 0;
  for (int c : arm_clicks)
    if (c > 0) ++arms_hit;
  if (arms_hit > 1) return "cc";
  const std::string& arm = arm_names[static_cast<std::size_t>(clicked_arm)];
  if (total == 1) return "sc:" + arm + ":" + std::to_string(outcome);
  return multi_label_prefix + ":" + arm;
}

// --------------------------------------------------------------------------
// Passive qubit devices (shared construction for BB84 and six-state arms)
// --------------------------------------------------------------------------

struct PassiveQubitParts {
  std::vector<std::string> basic_labels;
  std::vector<Operator> basic_elements;   // closed forms
  std::vector<std::string> arm_names;
  std::vector<std::vector<CVector>> arm_vecs;
  std::vector<CVector> click_vectors;
  Eigen::Index dim = 0;
};

PassiveQubitParts passive_qubit_parts(int photons, const std::vector<std::string>& arms) {
  if (photons < 1) throw std::invalid_argument("device block: photon number must be >= 1");
  PassiveQubitParts parts;
  const OccupationBasis nb = fock_basis(2, photons);
  parts.dim = static_cast<Eigen::Index>(nb.size());
  const double arm_weight = std::pow(1.0 / static_cast<double>(arms.size()), photons);
  Operator cc = Operator::Identity(parts.dim, parts.dim);
  for (const auto& name : arms) {
    const auto vecs = qubit_basis(name);
    Operator sum = Operator::Zero(parts.dim, parts.dim);
    for (int b = 0; b < 2; ++b) {
      const CVector state = symmetric_product_state(nb, vecs[static_cast<std::size_t>(b)]);
      parts.basic_labels.push_back("sc:" + name + ":" + std::to_string(b));
      parts.basic_elements.push_back(arm_weight * outer(state));
      parts.click_vectors.push_back(state);
      sum += outer(state);
    }
    parts.basic_labels.push_back("dc:" + name);
    parts.basic_elements.push_back(arm_weight *
                                   (Operator::Identity(parts.dim, parts.dim) - sum));
    cc -= arm_weight * Operator::Identity(parts.dim, parts.dim);
    parts.arm_names.push_back(name);
    parts.arm_vecs.push_back(vecs);
  }
  parts.basic_labels.push_back("cc");
  parts.basic_elements.push_back(cc);
  return parts;
}

Povm passive_qubit_engine(int photons, const std::vector<std::string>& arms) {
  const auto n_arms = static_cast<Eigen::Index>(arms.size());
  Eigen::MatrixXcd arm_splitter;
  if (arms.size() == 2) {
    CVector col(2);
    col << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    arm_splitter = complete_to_unitary(col);
  } else {
    arm_splitter = fourier_multiport(static_cast<int>(arms.size())).matrix;
  }
  const Eigen::MatrixXcd network = passive_polarization_network(arms, arm_splitter);
  DetectorLayout layout;
  for (Eigen::Index m = 0; m < 2 * n_arms; ++m)
    layout.groups.push_back({"d" + std::to_string(m), {static_cast<int>(m)}});
  const Povm patterns = threshold_povm({network}, layout, photons, {0, 1});

  std::vector<std::string> labels;
  std::vector<Operator> elements;
  const Eigen::Index dim = patterns.dim();
  std::map<std::string, Eigen::Index> slot;
  for (const auto& arm : arms) {
    for (int b = 0; b < 2; ++b) {
      slot["sc:" + arm + ":" + std::to_string(b)] = static_cast<Eigen::Index>(labels.size());
      labels.push_back("sc:" + arm + ":" + std::to_string(b));
      elements.push_back(Operator::Zero(dim, dim));
    }
    slot["dc:" + arm] = static_cast<Eigen::Index>(labels.size());
    labels.push_back("dc:" + arm);
    elements.push_back(Operator::Zero(dim, dim));
  }
  slot["cc"] = static_cast<Eigen::Index>(labels.size());
  labels.push_back("cc");
  elements.push_back(Operator::Zero(dim, dim));
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const std::string cls = classify_arm_pattern(patterns.labels[i], static_cast<int>(arms.size()),
                                                 2, arms, "dc");
    elements[static_cast<std::size_t>(slot.at(cls))] += patterns.elements[i];
  }
  return make_povm(labels, elements);
}

// --------------------------------------------------------------------------
// PE BB84 closed forms
// --------------------------------------------------------------------------

// Unnormalized single-photon window states; their symmetric products give
// the N-photon single-click elements directly.
CVector pe_window_vector(double xi, double phi, int sign) {
  CVector v(2);
  v << std::polar(std::sqrt((1.0 - xi) / 2.0), phi), Complex(sign * std::sqrt(xi / 2.0), 0.0);
  return v;
}

struct PeSetting {
  Operator f2, f5, indc, in;  // per-phase closed forms, unweighted
};

PeSetting pe_setting(int photons, double xi, double phi) {
  const OccupationBasis nb = fock_basis(2, photons);
  const Eigen::Index dim = static_cast<Eigen::Index>(nb.size());
  PeSetting s;
  s.f2 = outer(symmetric_product_state(nb, pe_window_vector(xi, phi, -1)));
  s.f5 = outer(symmetric_product_state(nb, pe_window_vector(xi, phi, +1)));
  s.in = Operator::Zero(dim, dim);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const int r = nb.states[k][0];
    s.in(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
        std::pow(1.0 - xi, r) * std::pow(xi, photons - r);
  }
  s.indc = s.in - s.f2 - s.f5;
  return s;
}

Operator pe_out_element(int photons, double xi) {
  const OccupationBasis nb = fock_basis(2, photons);
  const Eigen::Index dim = static_cast<Eigen::Index>(nb.size());
  Operator out = Operator::Zero(dim, dim);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const int r = nb.states[k][0];
    out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
        std::pow(xi, r) * std::pow(1.0 - xi, photons - r);
  }
  return out;
}

// Interferometer isometry of Eq.-style input/output relations: columns are
// the input modes (a1, a2), rows the detector modes b1..b6.
Eigen::MatrixXcd pe_isometry(double xi, double phi) {
  Eigen::MatrixXcd V(6, 2);
  const double so = std::sqrt(xi / 2.0);          // out-window amplitude of a1
  const double si = std::sqrt((1.0 - xi) / 2.0);  // in-window amplitude
  const Complex ph = std::polar(1.0, -phi);
  V.setZero();
  V(0, 0) = so;
  V(1, 0) = ph * si;
  V(1, 1) = -so;
  V(2, 1) = si;
  V(3, 0) = so;
  V(4, 0) = ph * si;
  V(4, 1) = so;
  V(5, 1) = si;
  return V;
}

std::string pe_classify(const std::string& pattern) {
  // Detector modes: in-window = {b2, b5} (positions 1, 4); the rest are
  // out-window.
  bool in = false, out = false;
  int in_clicks = 0;
  for (int pos = 0; pos < 6; ++pos) {
    if (pattern[static_cast<std::size_t>(pos)] != '1') continue;
    if (pos == 1 || pos == 4) {
      in = true;
      ++in_clicks;
    } else {
      out = true;
    }
  }
  if (in && out) return "inout";
  if (out) return "out";
  if (in_clicks == 2) return "indc";
  return pattern[1] == '1' ? "w2" : "w5";
}

// --------------------------------------------------------------------------
// Multi-time helpers
// --------------------------------------------------------------------------

struct ModeEvents {
  std::vector<std::string> labels;
  std::vector<Operator> elements;
};

void compose_recursive(const std::vector<ModeEvents>& modes, std::size_t at, std::string label,
                       Operator element, std::vector<std::pair<std::string, Operator>>& out,
                       std::vector<std::string>& events,
                       std::vector<std::vector<std::string>>& event_lists) {
  if (at == modes.size()) {
    out.emplace_back(label, element);
    event_lists.push_back(events);
    return;
  }
  for (std::size_t e = 0; e < modes[at].labels.size(); ++e) {
    events.push_back(modes[at].labels[e]);
    compose_recursive(modes, at + 1, at == 0 ? modes[at].labels[e] : label + "|" + modes[at].labels[e],
                      at == 0 ? modes[at].elements[e] : kron(element, modes[at].elements[e]), out,
                      events, event_lists);
    events.pop_back();
  }
}

}  // namespace

//----------------------------------------------------------------------------
// Families
//----------------------------------------------------------------------------

DeviceFamily bb84_active(double p_plus) {
  if (p_plus <= 0.0 || p_plus >= 1.0)
    throw std::invalid_argument("bb84_active: basis probability must lie in (0, 1)");
  DeviceFamily fam;
  fam.name = "bb84-active";
  fam.params = {{"p-plus", p_plus}};
  const std::vector<std::string> bases{"z", "x"};
  const std::vector<double> probs{p_plus, 1.0 - p_plus};
  fam.block = [bases, probs](int N) { return active_qubit_block(N, bases, probs, 0.0); };
  fam.engine_basic = [bases, probs](int N) { return active_qubit_engine(N, bases, probs); };
  fam.notes =
      "Active basis switch z/x with probabilities p-plus, 1-p-plus; modes (pol 0, pol 1); "
      "double clicks split equally.";
  return fam;
}

DeviceFamily six_state_active(double flip_probability) {
  if (flip_probability < 0.0 || flip_probability > 1.0)
    throw std::invalid_argument("six_state_active: flip probability must lie in [0, 1]");
  DeviceFamily fam;
  fam.name = "six-state-active";
  fam.params = {{"flip-p", flip_probability}};
  const std::vector<std::string> bases{"z", "x", "y"};
  const std::vector<double> probs{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  fam.block = [bases, probs, flip_probability](int N) {
    return active_qubit_block(N, bases, probs, flip_probability);
  };
  fam.engine_basic = [bases, probs](int N) { return active_qubit_engine(N, bases, probs); };
  fam.notes =
      "Active basis switch z/x/y with probability 1/3 each; flip-p mixes each single click "
      "to the opposite outcome with probability flip-p/2.";
  return fam;
}

namespace {

DeviceBlock passive_bb84_block(int photons, bool discard) {
  PassiveQubitParts parts = passive_qubit_parts(photons, {"z", "x"});
  DeviceBlock blk;
  blk.photons = photons;
  blk.click_vectors = parts.click_vectors;
  blk.basic = make_povm(parts.basic_labels, parts.basic_elements);

  std::vector<std::string> full_labels;
  std::vector<Operator> target_elements;
  const Eigen::Index dq = discard ? 3 : 2;
  if (discard) {
    full_labels.push_back("vac");
    Operator vac = Operator::Zero(dq, dq);
    vac(2, 2) = 1.0;
    target_elements.push_back(vac);
  }
  for (std::size_t a = 0; a < parts.arm_names.size(); ++a)
    for (int b = 0; b < 2; ++b) {
      full_labels.push_back("q:" + parts.arm_names[a] + ":" + std::to_string(b));
      Operator t = Operator::Zero(dq, dq);
      t.topLeftCorner(2, 2) = 0.5 * outer(parts.arm_vecs[a][static_cast<std::size_t>(b)]);
      target_elements.push_back(t);
    }
  blk.target = make_povm(full_labels, target_elements);

  CppMatrix cpp;
  cpp.full_labels = full_labels;
  cpp.basic_labels = parts.basic_labels;
  cpp.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(full_labels.size()),
                                      static_cast<Eigen::Index>(parts.basic_labels.size()));
  auto row_of = [&](const std::string& l) {
    return static_cast<Eigen::Index>(
        std::find(full_labels.begin(), full_labels.end(), l) - full_labels.begin());
  };
  auto col_of = [&](const std::string& l) {
    return static_cast<Eigen::Index>(
        std::find(parts.basic_labels.begin(), parts.basic_labels.end(), l) -
        parts.basic_labels.begin());
  };
  for (const auto& arm : parts.arm_names)
    for (int b = 0; b < 2; ++b) {
      const std::string q = "q:" + arm + ":" + std::to_string(b);
      cpp.entries(row_of(q), col_of("sc:" + arm + ":" + std::to_string(b))) = 1.0;
      cpp.entries(row_of(q), col_of("dc:" + arm)) = 0.5;
      if (!discard) cpp.entries(row_of(q), col_of("cc")) = 0.25;
    }
  if (discard) cpp.entries(row_of("vac"), col_of("cc")) = 1.0;
  blk.cpp = cpp;
  blk.full = apply_cpp(cpp, blk.basic);
  return blk;
}

}  // namespace

DeviceFamily bb84_passive_keep() {
  DeviceFamily fam;
  fam.name = "bb84-passive-keep";
  fam.block = [](int N) { return passive_bb84_block(N, false); };
  fam.engine_basic = [](int N) { return passive_qubit_engine(N, {"z", "x"}); };
  fam.switching_probability = [](int N) { return std::pow(2.0, 1 - N); };
  fam.notes =
      "Balanced splitter into z and x analyzer arms; modes (z0, z1, x0, x1), input on arm z's "
      "polarization pair; cross clicks kept and split 1/4 over all outcomes.";
  return fam;
}

DeviceFamily bb84_passive_discard() {
  DeviceFamily fam;
  fam.name = "bb84-passive-discard";
  fam.block = [](int N) { return passive_bb84_block(N, true); };
  fam.engine_basic = [](int N) { return passive_qubit_engine(N, {"z", "x"}); };
  fam.switching_probability = [](int N) { return std::pow(2.0, 1 - N); };
  fam.notes =
      "Passive BB84 with cross clicks discarded to an explicit vacuum outcome; the target is "
      "a qutrit (levels 0, 1, vac).";
  return fam;
}

DeviceFamily six_state_passive() {
  DeviceFamily fam;
  fam.name = "six-state-passive";
  fam.switching_probability = [](int N) { return 1.0 - std::pow(3.0, 1 - N); };
  fam.block = [](int N) {
    PassiveQubitParts parts = passive_qubit_parts(N, {"z", "x", "y"});
    DeviceBlock blk;
    blk.photons = N;
    blk.click_vectors = parts.click_vectors;
    blk.basic = make_povm(parts.basic_labels, parts.basic_elements);
    std::vector<std::string> full_labels;
    std::vector<Operator> target_elements;
    for (std::size_t a = 0; a < parts.arm_names.size(); ++a)
      for (int b = 0; b < 2; ++b) {
        full_labels.push_back("q:" + parts.arm_names[a] + ":" + std::to_string(b));
        target_elements.push_back(outer(parts.arm_vecs[a][static_cast<std::size_t>(b)]) / 3.0);
      }
    blk.target = make_povm(full_labels, target_elements);
    CppMatrix cpp;
    cpp.full_labels = full_labels;
    cpp.basic_labels = parts.basic_labels;
    cpp.entries = Eigen::MatrixXd::Zero(6, static_cast<Eigen::Index>(parts.basic_labels.size()));
    for (Eigen::Index r = 0; r < 6; ++r) {
      cpp.entries(r, r / 2 * 3 + r % 2) = 1.0;  // sc of the same arm/outcome
      cpp.entries(r, r / 2 * 3 + 2) = 0.5;      // dc of the same arm
      cpp.entries(r, 9) = 1.0 / 6.0;            // cc split over all six
    }
    blk.cpp = cpp;
    blk.full = apply_cpp(cpp, blk.basic);
    return blk;
  };
  fam.engine_basic = [](int N) { return passive_qubit_engine(N, {"z", "x", "y"}); };
  fam.notes =
      "Passive three-arm six-state device (1/3 of the light per arm); modes (z0, z1, x0, x1, "
      "y0, y1); cross clicks split 1/6 over all outcomes. No discard variant is supported.";
  return fam;
}

DeviceFamily mub_qudit(int d, const std::vector<double>& arm_probabilities) {
  if (!is_prime(d)) throw std::invalid_argument("mub_qudit: dimension must be prime");
  std::vector<double> probs = arm_probabilities;
  if (probs.empty()) probs.assign(static_cast<std::size_t>(d) + 1, 1.0 / (d + 1));
  if (static_cast<int>(probs.size()) != d + 1)
    throw std::invalid_argument("mub_qudit: need d+1 arm probabilities");
  double total = 0.0;
  for (double p : probs) {
    if (p <= 0.0) throw std::invalid_argument("mub_qudit: arm probabilities must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("mub_qudit: arm probabilities must sum to 1");

  DeviceFamily fam;
  fam.name = "mub";
  fam.params = {{"d", static_cast<double>(d)}};
  const auto bases = mub_bases(d);
  fam.block = [d, probs, bases](int N) {
    if (N < 1) throw std::invalid_argument("device block: photon number must be >= 1");
    DeviceBlock blk;
    blk.photons = N;
    const OccupationBasis nb = fock_basis(d, N);
    const Eigen::Index dim = static_cast<Eigen::Index>(nb.size());
    std::vector<std::string> basic_labels, full_labels;
    std::vector<Operator> basic_elements, target_elements;
    Operator cc = Operator::Identity(dim, dim);
    for (int alpha = 0; alpha <= d; ++alpha) {
      const double w = std::pow(probs[static_cast<std::size_t>(alpha)], N);
      Operator sum = Operator::Zero(dim, dim);
      for (int i = 0; i < d; ++i) {
        const CVector state = symmetric_product_state(
            nb, bases[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(i)]);
        basic_labels.push_back("sc:b" + std::to_string(alpha) + ":" + std::to_string(i));
        basic_elements.push_back(w * outer(state));
        blk.click_vectors.push_back(state);
        sum += outer(state);
        full_labels.push_back("q:b" + std::to_string(alpha) + ":" + std::to_string(i));
        target_elements.push_back(
            probs[static_cast<std::size_t>(alpha)] *
            outer(bases[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(i)]));
      }
      basic_labels.push_back("mc:b" + std::to_string(alpha));
      basic_elements.push_back(w * (Operator::Identity(dim, dim) - sum));
      cc -= w * Operator::Identity(dim, dim);
    }
    basic_labels.push_back("cc");
    basic_elements.push_back(cc);
    blk.basic = make_povm(basic_labels, basic_elements);
    blk.target = make_povm(full_labels, target_elements);

    CppMatrix cpp;
    cpp.full_labels = full_labels;
    cpp.basic_labels = basic_labels;
    cpp.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(full_labels.size()),
                                        static_cast<Eigen::Index>(basic_labels.size()));
    for (int alpha = 0; alpha <= d; ++alpha)
      for (int i = 0; i < d; ++i) {
        const Eigen::Index row = static_cast<Eigen::Index>(alpha) * d + i;
        cpp.entries(row, static_cast<Eigen::Index>(alpha) * (d + 1) + i) = 1.0;
        cpp.entries(row, static_cast<Eigen::Index>(alpha) * (d + 1) + d) = 1.0 / d;
        cpp.entries(row, cpp.entries.cols() - 1) = 1.0 / (d * (d + 1.0));
      }
    blk.cpp = cpp;
    blk.full = apply_cpp(cpp, blk.basic);
    return blk;
  };
  fam.engine_basic = [d, probs, bases](int N) {
    const int arms = d + 1;
    Eigen::MatrixXcd arm_splitter;
    const bool uniform =
        std::all_of(probs.begin(), probs.end(),
                    [&](double p) { return std::abs(p - probs[0]) < 1e-14; });
    if (uniform) {
      arm_splitter = fourier_multiport(arms).matrix;
    } else {
      CVector col(arms);
      for (int a = 0; a < arms; ++a) col(a) = std::sqrt(probs[static_cast<std::size_t>(a)]);
      arm_splitter = complete_to_unitary(col);
    }
    Eigen::MatrixXcd analyzers = Eigen::MatrixXcd::Zero(arms * d, arms * d);
    for (int a = 0; a < arms; ++a)
      analyzers.block(a * d, a * d, d, d) = analyzer(bases[static_cast<std::size_t>(a)]);
    const Eigen::MatrixXcd network =
        analyzers * kron(arm_splitter, Operator::Identity(d, d));
    DetectorLayout layout;
    for (int m = 0; m < arms * d; ++m)
      layout.groups.push_back({"d" + std::to_string(m), {m}});
    std::vector<int> inputs(static_cast<std::size_t>(d));
    for (int q = 0; q < d; ++q) inputs[static_cast<std::size_t>(q)] = q;
    const Povm patterns = threshold_povm({network}, layout, N, inputs);

    std::vector<std::string> arm_names;
    for (int a = 0; a < arms; ++a) arm_names.push_back("b" + std::to_string(a));
    std::vector<std::string> labels;
    std::vector<Operator> elements;
    const Eigen::Index dim = patterns.dim();
    std::map<std::string, std::size_t> slot;
    for (int a = 0; a < arms; ++a) {
      for (int i = 0; i < d; ++i) {
        slot["sc:b" + std::to_string(a) + ":" + std::to_string(i)] = labels.size();
        labels.push_back("sc:b" + std::to_string(a) + ":" + std::to_string(i));
        elements.push_back(Operator::Zero(dim, dim));
      }
      slot["mc:b" + std::to_string(a)] = labels.size();
      labels.push_back("mc:b" + std::to_string(a));
      elements.push_back(Operator::Zero(dim, dim));
    }
    slot["cc"] = labels.size();
    labels.push_back("cc");
    elements.push_back(Operator::Zero(dim, dim));
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      const std::string cls =
          classify_arm_pattern(patterns.labels[i], arms, d, arm_names, "mc");
      elements[slot.at(cls)] += patterns.elements[i];
    }
    return make_povm(labels, elements);
  };
  std::ostringstream notes;
  notes << "Qudit device measuring all " << (d + 1) << " mutually unbiased bases of dimension "
        << d << "; modes arm*d + level, input on arm b0; multi-clicks within an arm split 1/"
        << d << ", cross clicks split 1/" << d * (d + 1) << ".";
  fam.notes = notes.str();
  return fam;
}

DeviceFamily pe_bb84(double t) {
  if (t <= 0.0 || t > 1.0)
    throw std::invalid_argument("pe_bb84: loss parameter t must lie in (0, 1]");
  const double xi = 1.0 / (1.0 + t);
  DeviceFamily fam;
  fam.name = "pe-bb84";
  fam.params = {{"t", t}};
  fam.block = [xi](int N) {
    if (N < 1) throw std::invalid_argument("device block: photon number must be >= 1");
    DeviceBlock blk;
    blk.photons = N;
    const PeSetting s0 = pe_setting(N, xi, 0.0);
    const PeSetting s1 = pe_setting(N, xi, std::numbers::pi / 2.0);
    const Operator out = pe_out_element(N, xi);
    const Eigen::Index dim = out.rows();
    const Operator inout = Operator::Identity(dim, dim) - s0.in - out;
    blk.basic = make_povm({"w2:p0", "w5:p0", "indc:p0", "w2:p1", "w5:p1", "indc:p1", "out",
                           "inout"},
                          {0.5 * s0.f2, 0.5 * s0.f5, 0.5 * s0.indc, 0.5 * s1.f2, 0.5 * s1.f5,
                           0.5 * s1.indc, out, inout});

    std::vector<std::string> full_labels{"q2:p0", "q5:p0", "q2:p1", "q5:p1", "out"};
    Operator out_q(2, 2);
    out_q << xi, 0.0, 0.0, 1.0 - xi;
    blk.target = make_povm(
        full_labels,
        {0.5 * outer(pe_window_vector(xi, 0.0, -1)), 0.5 * outer(pe_window_vector(xi, 0.0, +1)),
         0.5 * outer(pe_window_vector(xi, std::numbers::pi / 2.0, -1)),
         0.5 * outer(pe_window_vector(xi, std::numbers::pi / 2.0, +1)), out_q});

    CppMatrix cpp;
    cpp.full_labels = full_labels;
    cpp.basic_labels = blk.basic.labels;
    cpp.entries = Eigen::MatrixXd::Zero(5, 8);
    const std::map<std::string, std::pair<std::string, std::string>> windows{
        {"q2:p0", {"w2:p0", "indc:p0"}},
        {"q5:p0", {"w5:p0", "indc:p0"}},
        {"q2:p1", {"w2:p1", "indc:p1"}},
        {"q5:p1", {"w5:p1", "indc:p1"}}};
    auto col_of = [&](const std::string& l) {
      return static_cast<Eigen::Index>(std::find(cpp.basic_labels.begin(),
                                                 cpp.basic_labels.end(), l) -
                                       cpp.basic_labels.begin());
    };
    for (Eigen::Index r = 0; r < 4; ++r) {
      const auto& [sc, indc] = windows.at(full_labels[static_cast<std::size_t>(r)]);
      cpp.entries(r, col_of(sc)) = 1.0;
      cpp.entries(r, col_of(indc)) = 0.5;
      cpp.entries(r, col_of("inout")) = 1.0 / 8.0;
    }
    cpp.entries(4, col_of("out")) = 1.0;
    cpp.entries(4, col_of("inout")) = 0.5;
    blk.cpp = cpp;
    blk.full = apply_cpp(cpp, blk.basic);
    return blk;  // click_vectors left empty: decided on the whole block
  };
  fam.engine_basic = [xi](int N) {
    const Eigen::Index dim = static_cast<Eigen::Index>(fock_basis(2, N).size());
    std::vector<std::string> labels{"w2:p0", "w5:p0", "indc:p0", "w2:p1",
                                    "w5:p1", "indc:p1", "out",   "inout"};
    std::vector<Operator> elements(8, Operator::Zero(dim, dim));
    const double phis[2] = {0.0, std::numbers::pi / 2.0};
    for (int run = 0; run < 2; ++run) {
      const Eigen::MatrixXcd U = complete_to_unitary(pe_isometry(xi, phis[run]));
      DetectorLayout layout;
      for (int m = 0; m < 6; ++m)
        layout.groups.push_back({"b" + std::to_string(m + 1), {m}});
      const Povm patterns = threshold_povm({U}, layout, N, {0, 1});
      for (std::size_t i = 0; i < patterns.size(); ++i) {
        std::string cls = pe_classify(patterns.labels[i]);
        if (cls != "out" && cls != "inout") cls += ":p" + std::to_string(run);
        const auto idx = static_cast<std::size_t>(
            std::find(labels.begin(), labels.end(), cls) - labels.begin());
        elements[idx] += 0.5 * patterns.elements[i];
      }
    }
    return make_povm(labels, elements);
  };
  fam.notes =
      "Phase-encoded BB84, unbalanced interferometer with loss parameter t (xi = 1/(1+t)); "
      "phases 0 and pi/2 switched with probability 1/2; detector modes b1..b6, in-window "
      "(b2, b5); in&out clicks post-processed 1/2 to out, 1/8 to each single-click event.";
  return fam;
}

//----------------------------------------------------------------------------
// Multi-time-mode composition
//----------------------------------------------------------------------------

std::vector<std::vector<int>> photon_splits(int photons, int modes) {
  return fock_basis(modes, photons).states;
}

std::string multi_time_group(const std::vector<std::string>& events) {
  std::set<std::string> bases, outcomes;
  bool any_click = false, dc = false, cc = false;
  for (const auto& e : events) {
    if (e == "vac") continue;
    any_click = true;
    if (e == "cc") {
      cc = true;
      continue;
    }
    const auto c1 = e.find(':');
    const auto c2 = e.find(':', c1 + 1);
    const std::string kind = e.substr(0, c1);
    bases.insert(e.substr(c1 + 1, (c2 == std::string::npos ? e.size() : c2) - c1 - 1));
    if (kind == "dc" || kind == "mc")
      dc = true;
    else
      outcomes.insert(e.substr(c2 + 1));
  }
  if (!any_click) return "vac";
  if (cc || bases.size() > 1) return "cc";
  const std::string basis = *bases.begin();
  if (dc || outcomes.size() > 1) return "dc:" + basis;
  return "sc:" + basis + ":" + *outcomes.begin();
}

DeviceBlock multi_time_block(const DeviceFamily& base, const std::vector<int>& photon_split) {
  if (photon_split.size() < 2)
    throw std::invalid_argument("multi_time_block: need at least two time modes");
  int total = 0;
  for (int n : photon_split) {
    if (n < 0) throw std::invalid_argument("multi_time_block: negative photon count");
    total += n;
  }
  if (total < 1) throw std::invalid_argument("multi_time_block: need at least one photon");

  const bool active = base.name == "bb84-active" || base.name == "six-state-active";
  if (!active && base.name != "bb84-passive-discard")
    throw std::invalid_argument("multi_time_block: no single-mode squashing model known for '" +
                                base.name + "'");

  const DeviceBlock proto = base.block(std::max(total, 1));
  DeviceBlock blk;
  blk.photons = total;
  blk.target = base.block(1).target;

  // Per-setting composition: within one basis setting the per-mode POVMs are
  // unweighted and complete, so their tensor products are complete too.
  struct Setting {
    std::string basis;
    double weight;
  };
  std::vector<Setting> settings;
  if (base.name == "bb84-active") {
    const double pp = base.params.at("p-plus");
    settings = {{"z", pp}, {"x", 1.0 - pp}};
  } else if (base.name == "six-state-active") {
    settings = {{"z", 1.0 / 3.0}, {"x", 1.0 / 3.0}, {"y", 1.0 / 3.0}};
  } else {
    settings = {{"", 1.0}};  // passive: a single always-on setting
  }

  std::vector<std::string> basic_labels;
  std::vector<Operator> basic_elements;
  std::vector<std::string> column_groups;  // overall event per basic column

  for (const auto& setting : settings) {
    std::vector<ModeEvents> per_mode;
    for (int n : photon_split) {
      ModeEvents me;
      if (n == 0) {
        me.labels = {"vac"};
        me.elements = {Operator::Identity(1, 1)};
      } else if (active) {
        SettingModule m = qubit_setting(setting.basis, 1.0, n);
        me.labels = m.labels;
        me.elements = m.elements;
      } else {
        const DeviceBlock b = base.block(n);
        me.labels = b.basic.labels;
        me.elements = b.basic.elements;
      }
      per_mode.push_back(std::move(me));
    }
    std::vector<std::pair<std::string, Operator>> composed;
    std::vector<std::string> events;
    std::vector<std::vector<std::string>> event_lists;
    compose_recursive(per_mode, 0, "", Operator(), composed, events, event_lists);
    for (std::size_t i = 0; i < composed.size(); ++i) {
      if (composed[i].second.norm() < 1e-14) continue;  // structurally impossible pattern
      const std::string group = multi_time_group(event_lists[i]);
      if (group == "vac" && active) continue;  // cannot occur with N >= 1 photons
      basic_labels.push_back(composed[i].first);
      basic_elements.push_back(setting.weight * composed[i].second);
      column_groups.push_back(group);
    }
  }
  blk.basic = make_povm(basic_labels, basic_elements);

  // Overall CPP: route each pattern through its group's column of the base
  // CPP ("vac" group goes straight to the vacuum outcome of a discarding
  // base).
  CppMatrix cpp;
  cpp.full_labels = proto.cpp.full_labels;
  cpp.basic_labels = basic_labels;
  cpp.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cpp.full_labels.size()),
                                      static_cast<Eigen::Index>(basic_labels.size()));
  for (std::size_t c = 0; c < column_groups.size(); ++c) {
    const std::string& group = column_groups[c];
    if (group == "vac") {
      const auto row = std::find(cpp.full_labels.begin(), cpp.full_labels.end(), "vac");
      cpp.entries(static_cast<Eigen::Index>(row - cpp.full_labels.begin()),
                  static_cast<Eigen::Index>(c)) = 1.0;
      continue;
    }
    const auto base_col = std::find(proto.cpp.basic_labels.begin(),
                                    proto.cpp.basic_labels.end(), group);
    if (base_col == proto.cpp.basic_labels.end())
      throw std::runtime_error("multi_time_block: group '" + group +
                               "' missing from base CPP");
    cpp.entries.col(static_cast<Eigen::Index>(c)) =
        proto.cpp.entries.col(static_cast<Eigen::Index>(base_col -
                                                        proto.cpp.basic_labels.begin()));
  }
  blk.cpp = cpp;
  blk.full = apply_cpp(cpp, blk.basic);
  return blk;
}

//----------------------------------------------------------------------------
// Family-level helpers
//----------------------------------------------------------------------------

Povm restrict_to_single_photon(const DeviceFamily& family) {
  const DeviceBlock blk = family.block(1);
  std::vector<std::string> labels;
  std::vector<Operator> elements;
  for (std::size_t i = 0; i < blk.full.size(); ++i) {
    if (blk.full.elements[i].norm() < 1e-12) continue;  // vacuum component split off
    labels.push_back(blk.full.labels[i]);
    elements.push_back(blk.full.elements[i]);
  }
  return make_povm(labels, elements);
}

DeviceFamily make_device(const std::string& name, const std::map<std::string, double>& params,
                         const std::vector<double>& arm_probabilities) {
  auto get = [&](const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "bb84-active") return bb84_active(get("p-plus", 0.5));
  if (name == "six-state-active") return six_state_active(get("flip-p", 0.0));
  if (name == "bb84-passive-keep") return bb84_passive_keep();
  if (name == "bb84-passive-discard") return bb84_passive_discard();
  if (name == "six-state-passive") return six_state_passive();
  if (name == "mub") return mub_qudit(static_cast<int>(get("d", 2.0)), arm_probabilities);
  if (name == "pe-bb84") {
    if (params.find("t") == params.end())
      throw std::invalid_argument("make_device: pe-bb84 requires parameter t");
    return pe_bb84(params.at("t"));
  }
  throw std::invalid_argument("make_device: unknown device '" + name + "'");
}

std::vector<std::string> device_names() {
  return {"bb84-active",         "six-state-active", "bb84-passive-keep",
          "bb84-passive-discard", "six-state-passive", "mub",
          "pe-bb84"};
}

}  // namespace squashkit
