#include <cmath>
#include <random>

#include <doctest.h>

#include "gaussmon/errors.hpp"
#include "gaussmon/steady_state.hpp"
#include "oracles.hpp"

using namespace gaussmon;

namespace {

// Independent residual route (matrix products rather than the expanded
// entries), normalized by the largest term so one ulp of Sigma maps to
// about machine epsilon.
double are_residual(const SteadyStateSolution& sol, const SystemMatrices& sys) {
  const Mat2 s = sol.sigma_inf.full();
  const Mat2 drift = s * sys.a;
  const Mat2 pump = s * (sys.bbt.full() * s);
  const Mat2 res = drift + drift.transpose() - pump + sys.q.full();
  const double scale =
      std::max({max_abs(drift), max_abs(pump), max_abs(sys.q)});
  return max_abs(res) / scale;
}

}  // namespace

TEST_CASE("symmetric ideal point: identity covariance, purity one") {
  const OscillatorParams osc{1.0, 1.0, 2.0};
  const DetectorConfig det{1.0, 1.0, 1.0, 1.0};
  const SteadyStateSolution sol = steady_state_covariance(osc, det);
  CHECK(sol.sigma_inf.xx == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sol.sigma_inf.pp == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::fabs(sol.sigma_inf.xp) < 1e-15);
  CHECK(sol.d_inf == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sol.p_inf == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sol.sin_theta == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("figure zero-correlation point") {
  const OscillatorParams osc{1.0, 1.0, 2.0};
  const Efficiencies eff{0.1, 0.9};
  const DetectorConfig det = detector_from_coords({1.0, 3.0}, eff);
  const SteadyStateSolution sol = steady_state_covariance(osc, det);
  const double expect = 1.0 / std::pow(0.09, 0.25);
  CHECK(sol.sigma_inf.xx == doctest::Approx(expect).epsilon(1e-12));
  CHECK(sol.sigma_inf.pp == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::fabs(sol.sigma_inf.xp) < 1e-12);
  CHECK(sol.p_inf == doctest::Approx(std::pow(0.09, 0.25)).epsilon(1e-12));
  CHECK(sol.d_inf == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
}

TEST_CASE("equal efficiencies pin the purity regardless of strengths") {
  std::mt19937_64 rng(271828);
  for (int i = 0; i < 200; ++i) {
    const double eta = 0.25;
    const DetectorConfig det{oracles::log_uniform(rng, 1e-3, 1e3),
                             oracles::log_uniform(rng, 1e-3, 1e3), eta, eta};
    const SteadyStateSolution sol =
        steady_state_covariance({1.0, 1.0, 2.0}, det);
    CHECK(std::fabs(sol.p_inf - 0.5) < 1e-12);
  }
}

TEST_CASE("closed form satisfies the fixed-point equation over random draws") {
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 10000; ++i) {
    const auto osc = oracles::random_oscillator(rng);
    const auto det = oracles::random_detector(rng);
    const SteadyStateSolution sol = steady_state_covariance(osc, det);
    const SystemMatrices sys = build_system_matrices(osc, det);

    CHECK(are_residual(sol, sys) < 1e-9);
    CHECK(is_positive_definite(sol.sigma_inf));
    CHECK(is_hurwitz(sol.gamma_mat));
    CHECK(sol.sigma_inf.det() >=
          0.25 * osc.hbar * osc.hbar * (1.0 - 1e-12));
    CHECK(std::fabs(sol.sin_theta) < 1.0);
    CHECK(sol.p_inf > 0.0);
    CHECK(sol.p_inf <= 1.0 + 1e-12);

    // The two purity routes: trace ratio vs hbar/(2 sqrt(det)).
    const double via_det = 0.5 * osc.hbar / std::sqrt(sol.sigma_inf.det());
    CHECK(std::fabs(sol.p_inf - via_det) <= 1e-9 * via_det);
    // And the determinant routes: trace formula vs det of the entries.
    CHECK(std::fabs(sol.d_inf - sol.sigma_inf.det()) <=
          1e-9 * sol.d_inf);
  }
}

TEST_CASE("steady_state_determinant and purity helpers agree with Eq routes") {
  const OscillatorParams osc{1.0, 1.0, 2.0};
  SUBCASE("ideal detectors saturate the bound") {
    const DetectorConfig det{2.5, 0.3, 1.0, 1.0};
    const SteadyStateSolution sol = steady_state_covariance(osc, det);
    CHECK(steady_state_determinant(det, sol.sigma_inf, osc.hbar) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(steady_state_purity(det, sol.sigma_inf, osc.hbar) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("equal efficiencies factor out") {
    const DetectorConfig det{2.5, 0.3, 0.5, 0.5};
    const SteadyStateSolution sol = steady_state_covariance(osc, det);
    CHECK(steady_state_determinant(det, sol.sigma_inf, osc.hbar) ==
          doctest::Approx(2.0).epsilon(1e-12));  // hbar^2/(4 eta)
    CHECK(steady_state_purity(det, sol.sigma_inf, osc.hbar) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  }
  SUBCASE("figure ZC point determinant") {
    const DetectorConfig det = detector_from_coords({1.0, 3.0}, {0.1, 0.9});
    const SteadyStateSolution sol = steady_state_covariance(osc, det);
    const double d = steady_state_determinant(det, sol.sigma_inf, osc.hbar);
    CHECK(d == doctest::Approx(sol.sigma_inf.det()).epsilon(1e-9));
    CHECK(d == doctest::Approx(10.0 / 3.0).epsilon(1e-9));
  }
}

TEST_CASE("purity interval") {
  const PurityInterval iv = purity_interval(Efficiencies{0.1, 0.9});
  CHECK(iv.lo == doctest::Approx(std::sqrt(0.1)).epsilon(1e-15));
  CHECK(iv.hi == doctest::Approx(std::sqrt(0.9)).epsilon(1e-15));
  CHECK_FALSE(iv.is_point());

  const PurityInterval point = purity_interval(Efficiencies{0.36, 0.36});
  CHECK(point.is_point());
  CHECK(point.lo == doctest::Approx(0.6).epsilon(1e-15));

  const PurityInterval ideal = purity_interval(Efficiencies{1.0, 1.0});
  CHECK(ideal.is_point());
  CHECK(ideal.lo == 1.0);

  // Label-symmetric: swapping efficiencies gives the same interval.
  const PurityInterval swapped = purity_interval(Efficiencies{0.9, 0.1});
  CHECK(swapped.lo == iv.lo);
  CHECK(swapped.hi == iv.hi);
}

TEST_CASE("purity relation residual") {
  const OscillatorParams osc{1.0, 1.0, 2.0};
  const Efficiencies eff{0.1, 0.9};

  SUBCASE("self-consistency with the closed form") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
      const StrengthCoords coords{oracles::log_uniform(rng, 1e-4, 1e4),
                                  oracles::log_uniform(rng, 1e-4, 1e4)};
      const DetectorConfig det = detector_from_coords(coords, eff);
      const SteadyStateSolution sol = steady_state_covariance(osc, det);
      const double res = purity_relation_residual(sol.p_inf, coords, osc, eff);
      const GreekParams g = greek_params(osc, det);
      CHECK(std::fabs(res) < 1e-9 * (g.gamma + g.delta));
    }
  }

  SUBCASE("equal efficiencies: residual vanishes identically at sqrt(eta)") {
    const Efficiencies flat{0.49, 0.49};
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
      const StrengthCoords coords{oracles::log_uniform(rng, 1e-3, 1e3),
                                  oracles::log_uniform(rng, 1e-3, 1e3)};
      CHECK(std::fabs(purity_relation_residual(0.7, coords, osc, flat)) <
            1e-12);
    }
  }

  SUBCASE("targets outside the interval keep a fixed sign") {
    int sign_above = 0, sign_below = 0;
    for (double lq = -3.0; lq <= 3.0; lq += 1.0) {
      for (double ls = -3.0; ls <= 3.0; ls += 1.0) {
        const StrengthCoords coords{std::pow(10.0, lq), std::pow(10.0, ls)};
        const double above =
            purity_relation_residual(0.99, coords, osc, eff);
        const double below =
            purity_relation_residual(0.05, coords, osc, eff);
        CHECK(above < 0.0);
        CHECK(below > 0.0);
        sign_above += (above < 0.0);
        sign_below += (below > 0.0);
      }
    }
    CHECK(sign_above == 49);
    CHECK(sign_below == 49);
  }
}

TEST_CASE("solve_strengths_for_purity") {
  const OscillatorParams osc{1.0, 1.0, 2.0};
  const Efficiencies eff{0.1, 0.9};

  SUBCASE("hits a requested target") {
    for (double target : {0.35, 0.5477, 0.7, 0.9}) {
      const StrengthCoords coords =
          solve_strengths_for_purity(target, osc, eff);
      const DetectorConfig det = detector_from_coords(coords, eff);
      const SteadyStateSolution sol = steady_state_covariance(osc, det);
      CHECK(std::fabs(sol.p_inf - target) < 1e-8);
    }
  }

  SUBCASE("equal efficiencies accept only sqrt(eta)") {
    const Efficiencies flat{0.5, 0.5};
    const StrengthCoords coords =
        solve_strengths_for_purity(std::sqrt(0.5), osc, flat, 1e-6);
    CHECK(coords.q == 1e-6);
    CHECK(coords.s == 1.0);
    CHECK_THROWS_AS(solve_strengths_for_purity(0.9, osc, flat),
                    InvalidArgumentError);
  }

  SUBCASE("geometric-mean target lands near the ZC ratio") {
    const double target = std::pow(0.09, 0.25);
    const StrengthCoords coords = solve_strengths_for_purity(target, osc, eff);
    const DetectorConfig det = detector_from_coords(coords, eff);
    const SteadyStateSolution sol = steady_state_covariance(osc, det);
    CHECK(std::fabs(sol.sigma_inf.xp) < 1e-6);
    CHECK(coords.s ==
          doctest::Approx(zero_correlation_ratio(osc, eff)).epsilon(1e-4));
  }

  SUBCASE("out-of-range targets are rejected") {
    CHECK_THROWS_AS(solve_strengths_for_purity(0.2, osc, eff),
                    InvalidArgumentError);
    CHECK_THROWS_AS(solve_strengths_for_purity(0.96, osc, eff),
                    InvalidArgumentError);
  }
}

TEST_CASE("zero-correlation ratio") {
  CHECK(zero_correlation_ratio({1.0, 1.0, 2.0}, {0.1, 0.9}) ==
        doctest::Approx(3.0).epsilon(1e-14));
  CHECK(zero_correlation_ratio({1.0, 1.0, 2.0}, {0.4, 0.4}) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(zero_correlation_ratio({2.0, 3.0, 2.0}, {0.7, 0.7}) ==
        doctest::Approx(36.0).epsilon(1e-14));
}

TEST_CASE("zero-correlation solution") {
  const OscillatorParams osc{1.0, 1.0, 2.0};

  SUBCASE("ideal detectors give the coherent-state covariance") {
    const SteadyStateSolution sol =
        zero_correlation_solution(osc, {1.0, 1.0});
    CHECK(sol.sigma_inf.xx == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sol.sigma_inf.pp == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sol.sigma_inf.xp == 0.0);
    CHECK(sol.p_inf == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("figure efficiencies") {
    const SteadyStateSolution sol =
        zero_correlation_solution(osc, {0.1, 0.9});
    CHECK(sol.sigma_inf.xx == doctest::Approx(1.8257418583505538).epsilon(1e-12));
    CHECK(sol.p_inf == doctest::Approx(0.5477225575051661).epsilon(1e-12));
    // Swapping the efficiencies leaves the purity invariant.
    const SteadyStateSolution swapped =
        zero_correlation_solution(osc, {0.9, 0.1});
    CHECK(swapped.p_inf == doctest::Approx(sol.p_inf).epsilon(1e-14));
  }

  SUBCASE("agrees with the generic closed form at any q") {
    const Efficiencies eff{0.1, 0.9};
    const double s_zc = zero_correlation_ratio(osc, eff);
    const SteadyStateSolution zc = zero_correlation_solution(osc, eff);
    for (double q : {1e-6, 1e-3, 1.0, 1e3, 1e6}) {
      const DetectorConfig det = detector_from_coords({q, s_zc}, eff);
      const SteadyStateSolution sol = steady_state_covariance(osc, det);
      CHECK(std::fabs(sol.sigma_inf.xx - zc.sigma_inf.xx) < 1e-9);
      CHECK(std::fabs(sol.sigma_inf.pp - zc.sigma_inf.pp) < 1e-9);
      CHECK(std::fabs(sol.sigma_inf.xp) < 1e-10);
      CHECK(std::fabs(sol.p_inf - zc.p_inf) < 1e-10);
    }
  }
}

TEST_CASE("correlation changes sign across the ZC ratio") {
  const OscillatorParams osc{1.0, 1.0, 2.0};
  const Efficiencies eff{0.1, 0.9};
  const double s_zc = zero_correlation_ratio(osc, eff);
  for (double q : {1e-3, 1.0, 1e3}) {
    const auto c_at = [&](double s) {
      const DetectorConfig det = detector_from_coords({q, s}, eff);
      return steady_state_covariance(osc, det).sigma_inf.xp;
    };
    // c tracks the sign of s - s_zc: squeezing below the ZC ratio (the
    // figure protocol direction) makes the correlation negative.
    CHECK(c_at(s_zc * 1.1) > 0.0);
    CHECK(c_at(s_zc * 0.9) < 0.0);
  }
}

TEST_CASE("strength rescaling leaves the ZC crossing in place") {
  const OscillatorParams osc{1.0, 1.0, 2.0};
  const Efficiencies eff{0.2, 0.6};
  const double s_zc = zero_correlation_ratio(osc, eff);
  for (double lambda : {0.01, 1.0, 100.0}) {
    const double k_p = std::sqrt(lambda);
    const double k_x = s_zc * k_p;
    const DetectorConfig det{k_x, k_p, eff.eta_x, eff.eta_p};
    const SteadyStateSolution sol = steady_state_covariance(osc, det);
    CHECK(std::fabs(sol.sigma_inf.xp) <
          1e-12 * std::max(1.0, max_abs(sol.sigma_inf)));
  }
}

TEST_CASE("solution serializes to the documented JSON keys") {
  const SteadyStateSolution sol = steady_state_covariance(
      {1.0, 1.0, 2.0}, {1.0, 1.0, 0.5, 0.5});
  const std::string text = to_json_string(sol);
  for (const char* key : {"v_x_inf", "c_inf", "v_p_inf", "d_inf", "p_inf",
                          "gamma_mat", "sin_theta", "residual"}) {
    CHECK(text.find(key) != std::string::npos);
  }
}
