#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "squashkit/devices.hpp"
#include "squashkit/fock.hpp"
#include "squashkit/operator.hpp"
#include "squashkit/povm.hpp"

using namespace squashkit;

namespace {

CVector basis_vector(int dim, int index) {
  CVector e = CVector::Zero(dim);
  e(index) = 1;
  return e;
}

// The six single-click product states |N,0>_a, |0,N>_a for a in {z, x, y}.
std::vector<CVector> six_state_clicks(int photons) {
  const OccupationBasis nb = fock_basis(2, photons);
  const double s = 1 / std::sqrt(2.0);
  const Complex i(0, 1);
  CVector z0(2), z1(2), x0(2), x1(2), y0(2), y1(2);
  z0 << 1, 0;
  z1 << 0, 1;
  x0 << s, s;
  x1 << s, -s;
  y0 << s, i * s;
  y1 << s, -i * s;
  std::vector<CVector> clicks;
  for (const CVector& v : {z0, z1, x0, x1, y0, y1})
    clicks.push_back(symmetric_product_state(nb, v));
  return clicks;
}

Povm random_projective_povm(int dim, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Operator a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Operator> qr(a);
  const Operator u = qr.householderQ() * Operator::Identity(dim, dim);
  std::vector<std::string> labels;
  std::vector<Operator> elements;
  for (int c = 0; c < dim; ++c) {
    labels.push_back("e" + std::to_string(c));
    elements.push_back(u.col(c) * u.col(c).adjoint());
  }
  return make_povm(labels, elements);
}

Eigen::MatrixXd random_stochastic(int rows, int cols, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    double total = 0;
    for (int r = 0; r < rows; ++r) total += (m(r, c) = u(rng));
    m.col(c) /= total;
  }
  return m;
}

}  // namespace

TEST_SUITE("povm_cpp") {
  TEST_CASE("make_povm rejects malformed inputs") {
    const Operator id = Operator::Identity(2, 2);
    const Operator half = 0.5 * id;

    CHECK_THROWS_AS(make_povm({"a", "a"}, {half, half}), std::invalid_argument);

    Operator skew(2, 2);
    skew << 0, 1, 0, 0;
    CHECK_THROWS_AS(make_povm({"a", "b"}, {skew, id - skew}), std::invalid_argument);

    Operator indefinite(2, 2);
    indefinite << 2, 0, 0, -1;
    CHECK_THROWS_AS(make_povm({"a", "b"}, {indefinite, id - indefinite}), std::invalid_argument);

    CHECK_THROWS_AS(make_povm({"a", "b"}, {half, half / 2}), std::invalid_argument);

    const Povm good = make_povm({"a", "b"}, {half, half});
    CHECK(good.has("a"));
    CHECK_FALSE(good.has("c"));
    CHECK_THROWS_AS(good.at("c"), std::out_of_range);
  }

  TEST_CASE("apply_cpp with the identity matrix returns the POVM unchanged") {
    std::mt19937 rng(611u);
    const Povm basic = random_projective_povm(3, rng);
    CppMatrix identity{basic.labels, basic.labels,
                       Eigen::MatrixXd::Identity(3, 3)};
    const Povm full = apply_cpp(identity, basic);
    for (std::size_t i = 0; i < basic.size(); ++i)
      CHECK((full.at(basic.labels[i]) - basic.elements[i]).norm() <= 1e-14);
  }

  TEST_CASE("BB84 equal double-click split produces sc + dc/2") {
    const DeviceBlock blk = bb84_active(0.5).block(2);
    const Povm rebuilt = apply_cpp(blk.cpp, blk.basic);
    for (std::size_t i = 0; i < blk.full.size(); ++i) {
      CHECK(rebuilt.labels[i] == blk.full.labels[i]);
      CHECK((rebuilt.elements[i] - blk.full.elements[i]).norm() <= 1e-13);
    }
    for (const char* basis : {"z", "x"}) {
      const Operator expected = blk.basic.at(std::string("sc:") + basis + ":0") +
                                0.5 * blk.basic.at(std::string("dc:") + basis);
      CHECK((blk.full.at(std::string("q:") + basis + ":0") - expected).norm() <= 1e-13);
    }
  }

  TEST_CASE("six-state full elements follow the signed-projector form") {
    const int photons = 2;
    const DeviceBlock blk = six_state_active().block(photons);
    const std::vector<CVector> clicks = six_state_clicks(photons);
    const Operator id = Operator::Identity(photons + 1, photons + 1);
    const char* bases[] = {"z", "x", "y"};
    for (int a = 0; a < 3; ++a) {
      const Operator p0 = clicks[2 * a] * clicks[2 * a].adjoint();
      const Operator p1 = clicks[2 * a + 1] * clicks[2 * a + 1].adjoint();
      for (int b = 0; b < 2; ++b) {
        const double sign = b == 0 ? 1.0 : -1.0;
        const Operator expected = (sign / 2.0 * (p0 - p1) + 0.5 * id) / 3.0;
        const Operator got = blk.full.at(std::string("q:") + bases[a] + ":" + std::to_string(b));
        CHECK((got - expected).norm() <= 1e-13);
      }
    }
  }

  TEST_CASE("PE BB84 in&out clicks split with weights 1/2 and 1/8") {
    const DeviceBlock blk = pe_bb84(0.5).block(1);
    const Operator q2 = blk.full.at("q2:p0");
    const Operator expected = blk.basic.at("w2:p0") + 0.5 * blk.basic.at("indc:p0") +
                              0.125 * blk.basic.at("inout");
    CHECK((q2 - expected).norm() <= 1e-13);
    const Operator out = blk.full.at("out");
    CHECK((out - (blk.basic.at("out") + 0.5 * blk.basic.at("inout"))).norm() <= 1e-13);
  }

  TEST_CASE("apply_cpp rejects stochasticity violations") {
    std::mt19937 rng(612u);
    const Povm basic = random_projective_povm(2, rng);

    Eigen::MatrixXd leaky(2, 2);
    leaky << 0.9, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(apply_cpp(CppMatrix{basic.labels, basic.labels, leaky}, basic),
                    std::invalid_argument);

    Eigen::MatrixXd negative(2, 2);
    negative << 1.2, 0.0, -0.2, 1.0;
    CHECK_THROWS_AS(apply_cpp(CppMatrix{basic.labels, basic.labels, negative}, basic),
                    std::invalid_argument);

    CHECK_THROWS_AS(apply_cpp(CppMatrix{basic.labels, {"nope", "b"},
                                        Eigen::MatrixXd::Identity(2, 2)},
                              basic),
                    std::invalid_argument);
  }

  TEST_CASE("apply_cpp preserves completeness and positivity") {
    std::mt19937 rng(613u);
    for (int trial = 0; trial < 4; ++trial) {
      const int dim = 2 + trial % 3;
      const Povm basic = random_projective_povm(dim, rng);
      const int rows = 2 + trial;
      std::vector<std::string> full_labels;
      for (int r = 0; r < rows; ++r) full_labels.push_back("f" + std::to_string(r));
      const CppMatrix cpp{full_labels, basic.labels, random_stochastic(rows, dim, rng)};
      const Povm full = apply_cpp(cpp, basic);  // make_povm re-validates
      CHECK(full.size() == static_cast<std::size_t>(rows));
      CHECK(povm_min_eigenvalue(full) >= -1e-10);
    }
  }

  TEST_CASE("validate_cpp accepts the BB84 scheme and the identity CPP") {
    const DeviceBlock blk = bb84_active(0.5).block(3);
    const CppValidation report = validate_cpp(blk.cpp, blk.basic, blk.target);
    CHECK(report.stochastic);
    CHECK(report.structurally_valid);
    CHECK(report.ok());
    CHECK(report.nullspace_residual <= 1e-9);

    std::mt19937 rng(614u);
    const Povm f = random_projective_povm(3, rng);
    const CppMatrix identity{f.labels, f.labels, Eigen::MatrixXd::Identity(3, 3)};
    CHECK(validate_cpp(identity, f, f).ok());
  }

  TEST_CASE("validate_cpp flags the uniform CPP on an unbalanced splitter") {
    const DeviceFamily family = mub_qudit(2, {0.5, 0.3, 0.2});
    const DeviceBlock blk = family.block(2);
    const CppValidation report = validate_cpp(blk.cpp, blk.basic, blk.target);
    CHECK(report.stochastic);
    CHECK_FALSE(report.structurally_valid);
    CHECK_FALSE(report.ok());
    CHECK(report.nullspace_residual > 1e-3);
    REQUIRE(report.violated_dependency.has_value());
    // the returned combination really annihilates the target elements
    const Eigen::VectorXd alpha = *report.violated_dependency;
    Operator target_combo = Operator::Zero(blk.target.dim(), blk.target.dim());
    Operator full_combo = Operator::Zero(blk.full.dim(), blk.full.dim());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
      target_combo += alpha(i) * blk.target.elements[static_cast<std::size_t>(i)];
      full_combo += alpha(i) * blk.full.elements[static_cast<std::size_t>(i)];
    }
    CHECK(target_combo.norm() <= 1e-9);
    CHECK(full_combo.norm() > 1e-6);
  }

  TEST_CASE("validate_cpp reports non-stochastic matrices without throwing") {
    std::mt19937 rng(615u);
    const Povm basic = random_projective_povm(2, rng);
    Eigen::MatrixXd leaky(2, 2);
    leaky << 0.9, 0.0, 0.0, 1.0;
    const CppValidation report =
        validate_cpp(CppMatrix{basic.labels, basic.labels, leaky}, basic, basic);
    CHECK_FALSE(report.stochastic);
    CHECK(report.stochastic_residual == doctest::Approx(0.1));
    CHECK_FALSE(report.ok());
  }

  TEST_CASE("single_click_split dimensions for BB84") {
    const DeviceFamily family = bb84_active(0.5);

    SUBCASE("one photon: P is the whole space") {
      const DeviceBlock blk = family.block(1);
      const SubspaceSplit split = single_click_split(blk.full, blk.click_vectors);
      CHECK(split.basis_P.cols() == 2);
      CHECK(split.basis_Pperp.cols() == 0);
      CHECK(split.on_Pperp.size() == 0);
    }

    SUBCASE("dim(P) grows as 2, 3, 4, 4, ...") {
      const int expected[] = {2, 3, 4, 4, 4};
      for (int photons = 1; photons <= 5; ++photons) {
        const DeviceBlock blk = family.block(photons);
        const SubspaceSplit split = single_click_split(blk.full, blk.click_vectors);
        CHECK(split.basis_P.cols() == expected[photons - 1]);
      }
    }
  }

  TEST_CASE("single_click_split projectors and restricted completeness") {
    const DeviceBlock blk = bb84_active(0.5).block(4);
    const SubspaceSplit split = single_click_split(blk.full, blk.click_vectors);
    const Operator pi_p = split.basis_P * split.basis_P.adjoint();
    const Operator pi_q = split.basis_Pperp * split.basis_Pperp.adjoint();
    const Eigen::Index dim = blk.full.dim();
    CHECK((pi_p * pi_p - pi_p).norm() <= 1e-12);
    CHECK((pi_p * pi_q).norm() <= 1e-12);
    CHECK((pi_p + pi_q - Operator::Identity(dim, dim)).norm() <= 1e-12);
    CHECK(split.max_commutator <= 1e-9);

    for (const Povm* block : {&split.on_P, &split.on_Pperp}) {
      Operator total = Operator::Zero(block->dim(), block->dim());
      for (const Operator& element : block->elements) total += element;
      CHECK((total - Operator::Identity(block->dim(), block->dim())).norm() <= 1e-10);
    }
  }

  TEST_CASE("six-state click span has dimension min(6, N+1)") {
    // The six spanning vectors only become independent once the two-mode
    // N-photon space is large enough to hold them.
    const DeviceFamily family = six_state_active();
    const int expected[] = {2, 3, 4, 5, 6, 6};
    for (int photons = 1; photons <= 6; ++photons) {
      const DeviceBlock blk = family.block(photons);
      const SubspaceSplit split = single_click_split(blk.full, blk.click_vectors);
      CHECK(split.basis_P.cols() == expected[photons - 1]);
    }
  }

  TEST_CASE("single_click_split refuses non-commuting projections") {
    const DeviceBlock blk = six_state_active().block(2);
    // restricting the span to the z-basis clicks breaks commutation with the
    // x- and y-basis elements
    const std::vector<CVector> clicks = six_state_clicks(2);
    const std::vector<CVector> z_only{clicks[0], clicks[1]};
    CHECK_THROWS_AS(single_click_split(blk.full, z_only), std::invalid_argument);
  }

  TEST_CASE("compress_povm agrees with the split's P block") {
    const DeviceBlock blk = bb84_active(0.5).block(3);
    const SubspaceSplit split = single_click_split(blk.full, blk.click_vectors);
    const Povm compressed = compress_povm(blk.full, split.basis_P);
    REQUIRE(compressed.size() == split.on_P.size());
    for (std::size_t i = 0; i < compressed.size(); ++i)
      CHECK((compressed.elements[i] - split.on_P.elements[i]).norm() <= 1e-13);
  }

  TEST_CASE("restrict_to_single_photon reproduces the declared targets") {
    SUBCASE("BB84: weighted basis projectors") {
      const Povm target = restrict_to_single_photon(bb84_active(0.5));
      const double s = 1 / std::sqrt(2.0);
      CVector z0(2), xm(2);
      z0 << 1, 0;
      xm << s, -s;
      CHECK((target.at("q:z:0") - 0.5 * z0 * z0.adjoint()).norm() <= 1e-13);
      CHECK((target.at("q:x:1") - 0.5 * xm * xm.adjoint()).norm() <= 1e-13);
      const DeviceBlock blk = bb84_active(0.5).block(1);
      for (std::size_t i = 0; i < target.size(); ++i)
        CHECK((target.elements[i] - blk.target.elements[i]).norm() <= 1e-13);
    }

    SUBCASE("six-state: weight 1/3 per basis") {
      const Povm target = restrict_to_single_photon(six_state_active());
      const Complex i(0, 1);
      const double s = 1 / std::sqrt(2.0);
      CVector y0(2);
      y0 << s, i * s;
      CHECK((target.at("q:y:0") - (y0 * y0.adjoint()) / 3.0).norm() <= 1e-13);
      CHECK(target.size() == 6);
    }

    SUBCASE("MUB d=3: weight 1/(d+1) per basis") {
      const Povm target = restrict_to_single_photon(mub_qudit(3));
      CHECK(target.size() == 12);
      CVector e1 = basis_vector(3, 1);
      CHECK((target.at("q:b0:1") - 0.25 * e1 * e1.adjoint()).norm() <= 1e-13);
      double trace_total = 0;
      for (const Operator& element : target.elements) trace_total += element.trace().real();
      CHECK(trace_total == doctest::Approx(3.0));
    }
  }
}
