#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "squashkit/fock.hpp"
#include "squashkit/operator.hpp"
#include "squashkit/povm.hpp"

using namespace squashkit;

namespace {

Operator random_unitary(int dim, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Operator a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Operator> qr(a);
  return qr.householderQ() * Operator::Identity(dim, dim);
}

// Four-mode passive qubit front end: a 50/50 splitter sends each input
// polarization mode into arm A (modes 0,1, measured as-is) and arm B
// (modes 2,3, measured after a Hadamard rotation).
ModeTransform passive_front_end() {
  const double s = 1 / std::sqrt(2.0);
  Operator split(4, 4);
  split << s, 0, s, 0,
      0, s, 0, s,
      s, 0, -s, 0,
      0, s, 0, -s;
  Operator rotate = Operator::Identity(4, 4);
  rotate(2, 2) = s;
  rotate(2, 3) = s;
  rotate(3, 2) = s;
  rotate(3, 3) = -s;
  return ModeTransform{rotate * split};
}

}  // namespace

TEST_SUITE("fock_optics") {
  TEST_CASE("fock_basis enumerates descending-lex occupations") {
    const OccupationBasis one = fock_basis(2, 1);
    REQUIRE(one.size() == 2);
    CHECK(one.states[0] == std::vector<int>{1, 0});
    CHECK(one.states[1] == std::vector<int>{0, 1});

    const OccupationBasis three = fock_basis(2, 3);
    REQUIRE(three.size() == 4);
    CHECK(three.states[0] == std::vector<int>{3, 0});
    CHECK(three.states[1] == std::vector<int>{2, 1});
    CHECK(three.states[2] == std::vector<int>{1, 2});
    CHECK(three.states[3] == std::vector<int>{0, 3});

    CHECK(fock_basis(6, 2).size() == 21);

    for (std::size_t i = 0; i < three.size(); ++i)
      CHECK(three.index_of(three.states[i]) == i);
    CHECK_THROWS_AS(three.index_of({2, 2}), std::out_of_range);
  }

  TEST_CASE("beam_splitter endpoints and unitarity") {
    const ModeTransform swap = beam_splitter(1.0);
    CHECK(std::abs(swap.matrix(0, 1) - Complex(1, 0)) <= 1e-15);
    CHECK(std::abs(swap.matrix(1, 0) - Complex(1, 0)) <= 1e-15);
    CHECK(std::abs(swap.matrix(0, 0)) <= 1e-15);

    const ModeTransform half = beam_splitter(0.5);
    const double s = 1 / std::sqrt(2.0);
    Operator expected(2, 2);
    expected << s, s, s, -s;
    CHECK((half.matrix - expected).norm() <= 1e-14);

    for (auto [t, phase] : {std::pair<double, double>{0.3, 0.9}, {0.77, -2.1}}) {
      const Operator u = beam_splitter(t, phase).matrix;
      CHECK((u.adjoint() * u - Operator::Identity(2, 2)).norm() <= 1e-12);
    }

    CHECK_THROWS_AS(beam_splitter(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(beam_splitter(1.1), std::invalid_argument);
  }

  TEST_CASE("fourier_multiport is the unitary DFT") {
    const Operator h = fourier_multiport(2).matrix;
    const double s = 1 / std::sqrt(2.0);
    Operator expected(2, 2);
    expected << s, s, s, -s;
    CHECK((h - expected).norm() <= 1e-14);

    const Operator f5 = fourier_multiport(5).matrix;
    for (int r = 0; r < 5; ++r)
      for (int q = r + 1; q < 5; ++q)
        CHECK(std::abs(f5.row(r).dot(f5.row(q))) <= 1e-12);

    const Operator f4 = fourier_multiport(4).matrix;
    CHECK((f4.adjoint() * f4 - Operator::Identity(4, 4)).norm() <= 1e-12);
  }

  TEST_CASE("lift_unitary reproduces the mode matrix at N=1") {
    const ModeTransform u = beam_splitter(0.3, 0.7);
    CHECK((lift_unitary(u, 1) - u.matrix).norm() <= 1e-14);
  }

  TEST_CASE("two photons on a 50/50 splitter never split up") {
    const ModeTransform half = beam_splitter(0.5);
    const Operator lifted = lift_unitary(half, 2);
    const OccupationBasis nb = fock_basis(2, 2);
    const auto in11 = static_cast<Eigen::Index>(nb.index_of({1, 1}));
    const auto amps = oracles::beamsplitter_two_photon(half.matrix);
    CHECK(std::abs(lifted(nb.index_of({2, 0}), in11) - amps[0]) <= 1e-13);
    CHECK(std::abs(lifted(in11, in11) - amps[1]) <= 1e-13);
    CHECK(std::abs(lifted(nb.index_of({0, 2}), in11) - amps[2]) <= 1e-13);
    // Hong-Ou-Mandel dip: the coincidence amplitude vanishes
    CHECK(std::abs(lifted(in11, in11)) <= 1e-13);
  }

  TEST_CASE("lifted transforms stay unitary and multiplicative") {
    const Operator f3 = lift_unitary(fourier_multiport(3), 2);
    CHECK(f3.rows() == 6);
    CHECK((f3.adjoint() * f3 - Operator::Identity(6, 6)).norm() <= 1e-10);

    std::mt19937 rng(521u);
    for (int photons : {2, 3}) {
      const ModeTransform u{random_unitary(3, rng)};
      const ModeTransform v{random_unitary(3, rng)};
      const ModeTransform uv{u.matrix * v.matrix};
      const Operator composed = lift_unitary(u, photons) * lift_unitary(v, photons);
      CHECK((lift_unitary(uv, photons) - composed).norm() <= 1e-9);
    }
  }

  TEST_CASE("symmetric_product_state amplitudes and transform covariance") {
    const OccupationBasis nb = fock_basis(2, 2);
    CVector plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    const CVector state = symmetric_product_state(nb, plus);
    CHECK(std::abs(state(nb.index_of({2, 0})) - Complex(0.5, 0)) <= 1e-14);
    CHECK(std::abs(state(nb.index_of({1, 1})) - Complex(1 / std::sqrt(2.0), 0)) <= 1e-14);
    CHECK(std::abs(state(nb.index_of({0, 2})) - Complex(0.5, 0)) <= 1e-14);
    CHECK(state.norm() == doctest::Approx(1.0));

    std::mt19937 rng(522u);
    const Operator u = random_unitary(3, rng);
    const OccupationBasis nb3 = fock_basis(3, 3);
    CVector v(3);
    v << Complex(0.2, 0.3), Complex(-0.5, 0.1), Complex(0.4, -0.6);
    v.normalize();
    const CVector lifted = lift_unitary(ModeTransform{u}, 3) * symmetric_product_state(nb3, v);
    const CVector direct = symmetric_product_state(nb3, u * v);
    CHECK((lifted - direct).norm() <= 1e-12);
  }

  TEST_CASE("threshold_povm for an active polarization analyzer") {
    const ModeTransform id{Operator::Identity(2, 2)};
    const DetectorLayout layout{{{"d0", {0}}, {"d1", {1}}}};
    const Povm povm = threshold_povm(id, layout, 3);

    const OccupationBasis nb = fock_basis(2, 3);
    Operator proj30 = Operator::Zero(4, 4);
    proj30(nb.index_of({3, 0}), nb.index_of({3, 0})) = 1;
    CHECK((povm.at("10") - proj30).norm() <= 1e-13);

    Operator proj03 = Operator::Zero(4, 4);
    proj03(nb.index_of({0, 3}), nb.index_of({0, 3})) = 1;
    CHECK((povm.at("01") - proj03).norm() <= 1e-13);

    // the double-click element covers everything else
    CHECK((povm.at("11") - (Operator::Identity(4, 4) - proj30 - proj03)).norm() <= 1e-13);
    CHECK_FALSE(povm.has("00"));
  }

  TEST_CASE("passive front end gives single-click weight (1/2)^N") {
    const ModeTransform u = passive_front_end();
    const DetectorLayout layout{{{"ah", {0}}, {"av", {1}}, {"bh", {2}}, {"bv", {3}}}};
    for (int photons : {1, 2, 3}) {
      const Povm povm = threshold_povm(u, layout, photons, {0, 1});
      const OccupationBasis nb = fock_basis(2, photons);
      const auto all_h = static_cast<Eigen::Index>(nb.index_of({photons, 0}));
      const auto all_v = static_cast<Eigen::Index>(nb.index_of({0, photons}));
      const Operator sc = povm.at("1000");
      CHECK(sc(all_h, all_h).real() == doctest::Approx(std::pow(0.5, photons)));
      CHECK(std::abs(sc(all_v, all_v)) <= 1e-13);

      Operator total = Operator::Zero(nb.size(), nb.size());
      for (const Operator& element : povm.elements) total += element;
      CHECK((total - Operator::Identity(nb.size(), nb.size())).norm() <= 1e-10);
    }
  }

  TEST_CASE("Fourier multiport single-click weight is (d+1)^-N") {
    const ModeTransform f4 = fourier_multiport(4);
    const DetectorLayout layout{{{"p0", {0}}, {"p1", {1}}, {"p2", {2}}, {"p3", {3}}}};
    const Povm povm = threshold_povm(f4, layout, 2, {0});
    // one input mode, two photons: the subspace is one-dimensional
    const Operator sc = povm.at("0100");
    REQUIRE(sc.rows() == 1);
    CHECK(sc(0, 0).real() == doctest::Approx(1.0 / 16.0));
  }

  TEST_CASE("click-pattern POVMs are complete for larger devices") {
    std::mt19937 rng(523u);
    const ModeTransform u{random_unitary(4, rng)};
    const DetectorLayout layout{{{"a", {0, 1}}, {"b", {2}}, {"c", {3}}}};
    for (int photons : {1, 2, 4}) {
      const Povm povm = threshold_povm(u, layout, photons);
      const Eigen::Index dim = povm.dim();
      Operator total = Operator::Zero(dim, dim);
      for (const Operator& element : povm.elements) {
        CHECK(min_eigenvalue(element) >= -1e-10);
        total += element;
      }
      CHECK((total - Operator::Identity(dim, dim)).norm() <= 1e-10);
    }
  }
}
