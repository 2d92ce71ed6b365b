#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "leggett/errors.hpp"
#include "leggett/qstate.hpp"
#include "oracles.hpp"

using namespace leggett;

namespace {

constexpr BellKind kAllBell[] = {BellKind::phi_minus, BellKind::phi_plus, BellKind::psi_minus,
                                 BellKind::psi_plus};

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

// Random mixed state: A A^dagger / Tr, A with Gaussian entries.
TwoQubitState random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix4c a;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a(r, c) = Complex(g(rng), g(rng));
  Matrix4c rho = a * a.adjoint();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return TwoQubitState(rho);
}

}  // namespace

TEST_CASE("bell_state phi_minus has the expected density matrix") {
  const auto rho = bell_state(BellKind::phi_minus).matrix();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      double expected = 0.0;
      if ((r == 0 || r == 3) && (c == 0 || c == 3)) expected = (r == c) ? 0.5 : -0.5;
      CHECK(std::abs(rho(r, c) - Complex(expected, 0.0)) < 1e-15);
    }
  CHECK(bell_overlap(bell_state(BellKind::phi_minus), BellKind::phi_minus) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("correlation tensors of Bell states match the explicit trace") {
  const double h = 1.0 / std::sqrt(2.0);
  const std::array<std::array<oracle::cd, 4>, 4> vectors = {{
      {h, 0, 0, -h},  // phi_minus
      {h, 0, 0, h},   // phi_plus
      {0, h, -h, 0},  // psi_minus
      {0, h, h, 0},   // psi_plus
  }};
  for (int k = 0; k < 4; ++k) {
    const auto expected = oracle::tensor(oracle::outer(vectors[k]));
    const auto t = correlation_tensor(bell_state(kAllBell[k]));
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) CHECK(t.T(j, l) == doctest::Approx(expected[j][l]).epsilon(1e-14));
    CHECK(t.a.norm() < 1e-14);
    CHECK(t.b.norm() < 1e-14);
    CHECK(std::abs(std::abs(t.T.determinant()) - 1.0) < 1e-12);
    CHECK((t.T.transpose() * t.T - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  }
  // Frozen from the explicit trace above.
  const auto singlet = correlation_tensor(bell_state(BellKind::psi_minus));
  CHECK((singlet.T + Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  const auto phim = correlation_tensor(bell_state(BellKind::phi_minus));
  CHECK((phim.T - Vec3(-1, 1, 1).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("werner mixtures") {
  CHECK((werner(1.0, BellKind::phi_minus).matrix() - bell_state(BellKind::phi_minus).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  const auto noise = werner(0.0);
  CHECK((noise.matrix() - 0.25 * Matrix4c::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  const auto t0 = correlation_tensor(noise);
  CHECK(t0.T.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(t0.a.norm() + t0.b.norm() < 1e-15);

  CHECK(correlation(werner(0.5, BellKind::psi_minus), Vec3::UnitZ(), Vec3::UnitZ()) ==
        doctest::Approx(-0.5).epsilon(1e-14));
  const auto t9 = correlation_tensor(werner(0.9, BellKind::psi_minus));
  CHECK((t9.T + 0.9 * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(werner(-0.01), DomainError);
  CHECK_THROWS_AS(werner(1.01), DomainError);
}

TEST_CASE("werner tensor scales linearly with visibility") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (auto kind : kAllBell) {
    const auto full = correlation_tensor(werner(1.0, kind));
    for (int i = 0; i < 20; ++i) {
      const double v = unif(rng);
      const auto t = correlation_tensor(werner(v, kind));
      CHECK((t.T - v * full.T).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("fidelity conventions") {
  CHECK(amplitude_fidelity(1.0) == 1.0);
  // Threshold visibilities 2 sqrt(2)/3 and sqrt(5/6).
  CHECK(amplitude_fidelity(0.942809) == doctest::Approx(0.978318).epsilon(1e-6));
  CHECK(amplitude_fidelity(0.912871) == doctest::Approx(0.966775).epsilon(1e-6));
  CHECK(overlap_fidelity(0.6) == doctest::Approx(0.7));
  CHECK(bell_overlap(werner(0.6), BellKind::phi_minus) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK_THROWS_AS(amplitude_fidelity(1.5), DomainError);
}

TEST_CASE("correlation examples") {
  const Vec3 x = Vec3::UnitX(), z = Vec3::UnitZ();
  CHECK(correlation(bell_state(BellKind::psi_minus), z, z) == doctest::Approx(-1.0));
  CHECK(correlation(bell_state(BellKind::phi_minus), x, x) == doctest::Approx(-1.0));
  std::mt19937_64 rng(3);
  const auto w = werner(0.95, BellKind::psi_minus);
  for (int i = 0; i < 10; ++i) {
    const Vec3 n = random_unit(rng);
    CHECK(correlation(w, n, n) == doctest::Approx(-0.95).epsilon(1e-12));
  }
  CHECK_THROWS_AS(correlation(w, Vec3(1, 1, 0), z), DomainError);
  CHECK_THROWS_AS(joint_probabilities(w, z, Vec3(0, 0, 2)), DomainError);
}

TEST_CASE("joint probability examples") {
  const Vec3 z = Vec3::UnitZ();
  const auto p = joint_probabilities(bell_state(BellKind::psi_minus), z, z);
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK(p[2] == doctest::Approx(0.5));
  CHECK(p[3] == doctest::Approx(0.0));

  const auto u = joint_probabilities(werner(0.0), Vec3(0.6, 0.8, 0.0), z);
  for (double x : u) CHECK(x == doctest::Approx(0.25));

  CHECK(joint_probabilities(werner(0.8, BellKind::psi_minus), z, z)[0] ==
        doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("probabilities normalize and reproduce the correlation for random states") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto state = random_state(rng);
    const Vec3 n = random_unit(rng), m = random_unit(rng);
    const auto p = joint_probabilities(state, n, m);
    const double sum = p[0] + p[1] + p[2] + p[3];
    CHECK(std::abs(sum - 1.0) < 1e-12);
    for (double x : p) CHECK(x >= 0.0);
    CHECK(std::abs((p[0] - p[1] - p[2] + p[3]) - correlation(state, n, m)) < 1e-12);
  }
}

TEST_CASE("tensor contraction is bilinear") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    const auto t = correlation_tensor(random_state(rng));
    const Vec3 n1(g(rng), g(rng), g(rng)), n2(g(rng), g(rng), g(rng)), m(g(rng), g(rng), g(rng));
    const double c1 = g(rng), c2 = g(rng);
    CHECK(std::abs(t.contract(c1 * n1 + c2 * n2, m) -
                   (c1 * t.contract(n1, m) + c2 * t.contract(n2, m))) < 1e-12);
    CHECK(std::abs(t.contract(m, c1 * n1 + c2 * n2) -
                   (c1 * t.contract(m, n1) + c2 * t.contract(m, n2))) < 1e-12);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(t.a(j)) <= 1.0);
      CHECK(std::abs(t.b(j)) <= 1.0);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(t.T(j, k)) <= 1.0);
    }
  }
}

TEST_CASE("state validation rejects non-physical matrices") {
  Matrix4c m = 0.25 * Matrix4c::Identity();
  m(0, 1) = 0.1;  // not Hermitian
  CHECK_THROWS_AS(TwoQubitState{m}, InvalidStateError);
  CHECK_THROWS_AS(TwoQubitState{0.3 * Matrix4c::Identity()}, InvalidStateError);
  Matrix4c neg = Matrix4c::Zero();
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(TwoQubitState{neg}, InvalidStateError);
}

TEST_CASE("states round-trip through JSON") {
  const auto s = werner(0.7, BellKind::psi_plus);
  const auto j = to_json(s);
  REQUIRE(j.contains("density_matrix"));
  CHECK(j["density_matrix"].size() == 4);
  CHECK(j["density_matrix"][1][2].size() == 2);
  const auto back = state_from_json(nlohmann::json::parse(j.dump()));
  CHECK((back.matrix() - s.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(state_from_json(nlohmann::json{{"density_matrix", {1, 2}}}), InvalidStateError);
  CHECK(parse_bell_kind("psi_minus") == BellKind::psi_minus);
  CHECK_THROWS_AS(parse_bell_kind("ghz"), DomainError);
}
