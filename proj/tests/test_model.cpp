#include <cmath>
#include <random>

#include <doctest.h>

#include "gaussmon/errors.hpp"
#include "gaussmon/model.hpp"
#include "oracles.hpp"

using namespace gaussmon;

TEST_CASE("build_system_matrices at the canonical scales") {
  const SystemMatrices sys =
      build_system_matrices({1.0, 1.0, 2.0}, {1.0, 1.0, 1.0, 1.0});
  CHECK(sys.a.a11 == 0.0);
  CHECK(sys.a.a12 == -1.0);
  CHECK(sys.a.a21 == 1.0);
  CHECK(sys.a.a22 == 0.0);
  CHECK(sys.b.a11 == 1.0);
  CHECK(sys.b.a22 == 1.0);
  CHECK(sys.q.xx == 1.0);
  CHECK(sys.q.pp == 1.0);
  CHECK(sys.chi.xx == 1.0);
  CHECK(sys.chi.pp == 1.0);
}

TEST_CASE("Q diagonal order regression: k_p first") {
  // Easy transcription bug: Q couples k_p to the (1,1) slot.
  const SystemMatrices sys =
      build_system_matrices({1.0, 1.0, 2.0}, {9.0, 1.0, 1.0, 1.0});
  CHECK(sys.q.xx == 1.0);  // (hbar^2/4) k_p
  CHECK(sys.q.pp == 9.0);  // (hbar^2/4) k_x
  CHECK(sys.b.a11 == 3.0);
  CHECK(sys.b.a22 == 1.0);
}

TEST_CASE("chi from the efficiencies") {
  const SystemMatrices sys =
      build_system_matrices({1.0, 1.0, 2.0}, {1.0, 1.0, 0.1, 0.9});
  CHECK(sys.chi.xx == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(sys.chi.pp == doctest::Approx(10.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("B B^T is exact") {
  std::mt19937_64 rng(808);
  for (int i = 0; i < 1000; ++i) {
    const auto det = oracles::random_detector(rng);
    const SystemMatrices sys = build_system_matrices({1.0, 1.0, 2.0}, det);
    CHECK(sys.bbt.xx == det.eta_x * det.k_x);
    CHECK(sys.bbt.pp == det.eta_p * det.k_p);
    CHECK(sys.bbt.xp == 0.0);
  }
}

TEST_CASE("field validation names the offender") {
  CHECK_THROWS_WITH_AS(
      build_system_matrices({1.0, 1.0, 2.0}, {1.0, 1.0, 0.0, 1.0}),
      "eta_x must be in (0, 1]", InvalidArgumentError);
  CHECK_THROWS_WITH_AS(
      build_system_matrices({-1.0, 1.0, 2.0}, {1.0, 1.0, 1.0, 1.0}),
      "m must be positive", InvalidArgumentError);
  CHECK_THROWS_WITH_AS(
      build_system_matrices({1.0, 1.0, 2.0}, {1.0, 1.0, 1.0, 1.5}),
      "eta_p must be in (0, 1]", InvalidArgumentError);
}

TEST_CASE("greek parameters at the symmetric point") {
  const GreekParams g = greek_params({1.0, 1.0, 2.0}, {1.0, 1.0, 1.0, 1.0});
  CHECK(g.alpha == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(g.beta == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.gamma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(g.delta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("greek parameters at the asymmetric figure point") {
  // k_x/k_p = 3 with these efficiencies sits on the zero-correlation line.
  const GreekParams g =
      greek_params({1.0, 1.0, 2.0}, {3.0, 1.0, 0.1, 0.9});
  CHECK(g.alpha == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
  CHECK(g.beta == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(g.gamma ==
        doctest::Approx(std::sqrt(3.0 * 0.1 + 1.0 / 3.0)).epsilon(1e-14));
  CHECK(g.delta ==
        doctest::Approx(std::sqrt(3.0 * 0.9 + 3.0)).epsilon(1e-14));
}

TEST_CASE("alpha and beta depend only on the strength ratio") {
  const OscillatorParams osc{1.3, 0.7, 2.0};
  const GreekParams g1 = greek_params(osc, {2.0, 0.5, 0.4, 0.8});
  const GreekParams g2 = greek_params(osc, {8.0, 2.0, 0.4, 0.8});
  CHECK(g1.alpha == doctest::Approx(g2.alpha).epsilon(1e-14));
  CHECK(g1.beta == doctest::Approx(g2.beta).epsilon(1e-14));
}

TEST_CASE("greek inequalities over random draws") {
  std::mt19937_64 rng(161803);
  for (int i = 0; i < 10000; ++i) {
    const auto osc = oracles::random_oscillator(rng);
    const auto det = oracles::random_detector(rng);
    const GreekParams g = greek_params(osc, det);
    CHECK(g.alpha < 0.0);
    CHECK(g.beta > 0.0);
    // Strict in exact arithmetic; at extreme scale separations the added
    // diffusion term is below one ulp of beta^2 or alpha^2 and the sum
    // rounds to equality.
    CHECK(g.gamma >= g.beta);
    CHECK(g.delta >= -g.alpha);
    // |alpha - beta| < gamma + delta keeps sin(theta) inside (-1, 1).
    CHECK(std::fabs(g.alpha - g.beta) / (g.gamma + g.delta) <= 1.0);
  }
}

TEST_CASE("strength coordinates round-trip") {
  const Strengths k0 = strengths_from_coords({1.0, 1.0});
  CHECK(k0.k_x == 1.0);
  CHECK(k0.k_p == 1.0);

  const Strengths k1 = strengths_from_coords({1.0, 3.0});
  CHECK(k1.k_x == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(k1.k_p == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));

  std::mt19937_64 rng(222);
  for (int i = 0; i < 1000; ++i) {
    const double k_x = oracles::log_uniform(rng, 1e-4, 1e4);
    const double k_p = oracles::log_uniform(rng, 1e-4, 1e4);
    const StrengthCoords c = coords_from_strengths(k_x, k_p);
    const Strengths k = strengths_from_coords(c);
    CHECK(k.k_x == doctest::Approx(k_x).epsilon(1e-14));
    CHECK(k.k_p == doctest::Approx(k_p).epsilon(1e-14));
  }

  CHECK_THROWS_AS(strengths_from_coords({-1.0, 1.0}), InvalidArgumentError);
  CHECK_THROWS_AS(strengths_from_coords({1.0, 0.0}), InvalidArgumentError);
}

TEST_CASE("parameter JSON round-trip") {
  ModelParams params;
  params.osc = {1.5, 0.75, 2.0};
  params.det = {3.0, 0.25, 0.1, 0.9};
  const std::string text = to_json_string(params);
  const ModelParams back = model_params_from_json(text);
  CHECK(back.osc.mass == params.osc.mass);
  CHECK(back.osc.omega == params.osc.omega);
  CHECK(back.osc.hbar == params.osc.hbar);
  CHECK(back.det.k_x == params.det.k_x);
  CHECK(back.det.k_p == params.det.k_p);
  CHECK(back.det.eta_x == params.det.eta_x);
  CHECK(back.det.eta_p == params.det.eta_p);

  CHECK_THROWS_AS(model_params_from_json("{\"m\": 1}"), InvalidArgumentError);
  CHECK_THROWS_AS(model_params_from_json("not json"), InvalidArgumentError);
}
