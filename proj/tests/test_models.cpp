#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dind/models.hpp"
#include "dind/rng.hpp"
#include "oracles.hpp"

using dind::Probability;
using namespace dind::models;

namespace {

// Deterministic parameter generator for the randomized property checks.
struct Gen {
  dind::mc::TrialRng rng;
  explicit Gen(std::uint64_t stream) : rng(0x9d5ad41b, stream) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * rng.uniform();
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
};

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// Pure relative comparison; Approx's default scale term would swamp values
// far below 1.
doctest::Approx rel(double expected, double eps) {
  return doctest::Approx(expected).epsilon(eps).scale(0.0);
}

}  // namespace

TEST_CASE("blockade likelihood at the reference point") {
  // p=0.43, n=10, N=5.
  const double L =
      blockade_likelihood({Probability(0.43), 10.0, 5.0}).value();
  CHECK(L == rel(0.0010801071604232895, 1e-13));

  // A single attack reduces to p^n.
  const double single =
      blockade_likelihood({Probability(0.43), 10.0, 1.0}).value();
  CHECK(single == rel(0.00021611482313284249, 1e-13));

  // Degenerate counts.
  CHECK(blockade_likelihood({Probability(0.5), 3.0, 0.0}).value() == 0.0);
  CHECK(blockade_likelihood({Probability(0.0), 3.0, 7.0}).value() == 0.0);
  CHECK(blockade_likelihood({Probability(0.5), 0.0, 7.0}).value() == 1.0);
  CHECK(blockade_likelihood({Probability(1.0), 9.0, 1.0}).value() == 1.0);
}

TEST_CASE("blockade attack counts, exact and approximate") {
  const Probability L(0.001);
  const Probability p(0.43);
  const double exact = blockade_attacks_exact(L, p, 10.0);
  const double approx = blockade_attacks_approx(L, p, 10.0);
  CHECK(exact == rel(4.6289847392734663, 1e-13));
  CHECK(approx == rel(4.6271698789736196, 1e-13));

  const double pn = std::pow(0.43, 10.0);
  CHECK(rel_diff(approx, exact) <= 0.001 + pn);

  CHECK(blockade_attacks_approx(Probability(0.01), Probability(0.5), 20.0) ==
        rel(10485.76, 1e-13));

  CHECK_THROWS_AS(blockade_attacks_exact(Probability(0.0), p, 10.0),
                  std::domain_error);
  CHECK_THROWS_AS(blockade_attacks_exact(Probability(1.0), p, 10.0),
                  std::domain_error);
  CHECK_THROWS_AS(blockade_attacks_exact(L, Probability(0.0), 10.0),
                  std::domain_error);
  CHECK_THROWS_AS(blockade_attacks_exact(L, p, 0.0), std::domain_error);
}

TEST_CASE("blockade hardness inverts the likelihood") {
  const double p =
      blockade_hardness(Probability(0.001), 5.0, 10.0).value();
  CHECK(p == rel(0.42669777504517283, 1e-13));

  CHECK_THROWS_AS(blockade_hardness(Probability(0.001), 0.5, 10.0),
                  std::domain_error);
  CHECK_THROWS_AS(blockade_hardness(Probability(0.001), 5.0, 0.0),
                  std::domain_error);
}

TEST_CASE("hardness -> likelihood round trip over a random grid") {
  Gen gen(1);
  for (int i = 0; i < 500; ++i) {
    const double L = gen.log_uniform(1e-6, 0.5);
    const double N = gen.log_uniform(1.0, 1e9);
    const double n = gen.uniform(1.0, 100.0);
    const double p = blockade_hardness(Probability(L), N, n).value();
    const double back =
        blockade_likelihood({Probability(p), n, N}).value();
    CHECK(rel_diff(back, L) <= 1e-9);
  }
}

TEST_CASE("attack-count approximation error stays inside its regime bound") {
  Gen gen(2);
  int kept = 0;
  while (kept < 500) {
    const double L = gen.log_uniform(1e-6, 0.1);
    const double p = gen.uniform(0.05, 0.95);
    const double n_min = std::log(0.1) / std::log(p);
    const double n = gen.uniform(n_min, n_min + 30.0);
    const double pn = std::pow(p, n);
    if (!(pn <= 0.1) || pn < 1e-300) continue;
    ++kept;
    const double exact =
        blockade_attacks_exact(Probability(L), Probability(p), n);
    const double approx =
        blockade_attacks_approx(Probability(L), Probability(p), n);
    CHECK(std::abs(approx - exact) / exact <= L + pn);
  }
}

TEST_CASE("blockade monotonicity on random grids") {
  Gen gen(3);
  for (int i = 0; i < 300; ++i) {
    const double p = gen.uniform(0.01, 0.99);
    const double n = gen.uniform(0.5, 60.0);
    const double N = gen.log_uniform(1.0, 1e9);
    const double base =
        blockade_likelihood({Probability(p), n, N}).value();
    const double dp = gen.uniform(0.001, 0.99 - p + 0.001);
    CHECK(blockade_likelihood({Probability(std::min(p + dp, 1.0)), n, N})
              .value() >= base);
    CHECK(blockade_likelihood({Probability(p), n + gen.uniform(0.1, 10.0), N})
              .value() <= base);
    CHECK(blockade_likelihood({Probability(p), n, N * gen.uniform(1.0, 50.0)})
              .value() >= base);
  }
}

TEST_CASE("likelihoods stay inside [0,1] in extreme regimes") {
  // p^n down to ~1e-300 and N up to 1e12; the stable form must keep relative
  // precision, where naive 1-(1-x)^N would return 0.
  const double tiny = blockade_likelihood(
      {Probability(1e-15), 20.0, 1e12}).value();
  CHECK(tiny > 0.0);
  CHECK(tiny <= 1.0);
  CHECK(tiny == rel(1e-288, 1e-9));

  const double near_one = blockade_likelihood(
      {Probability(0.9), 1.0, 1e12}).value();
  CHECK(near_one == 1.0);

  const double mid = blockade_likelihood(
      {Probability(0.43), 10.0, 5e3}).value();
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
}

TEST_CASE("delay single-attack success") {
  CHECK(delay_single_success(1.0, 1.0, 10.0).value() ==
        rel(4.5399929762484852e-5, 1e-13));
  CHECK(delay_single_success(2.0, 1.0, 10.0).value() ==
        rel(2.0611536224385578e-9, 1e-13));
  CHECK(delay_single_success(0.0, 1.0, 10.0).value() == 1.0);
  CHECK(delay_single_success(1.0, 1.0, 0.0).value() == 1.0);
  CHECK_THROWS_AS(delay_single_success(1.0, 0.0, 10.0), std::domain_error);
}

TEST_CASE("delay likelihood under many attacks") {
  CHECK(delay_likelihood(1.0, 1.0, 10.0, 1000.0).value() ==
        rel(0.044385758434188428, 1e-13));

  // N=1 reduces exactly to the single-attack form.
  Gen gen(4);
  for (int i = 0; i < 200; ++i) {
    const double lambda = gen.uniform(0.05, 4.0);
    const double tau = gen.log_uniform(0.1, 10.0);
    const double n = gen.uniform(0.0, 40.0);
    CHECK(delay_likelihood(lambda, tau, n, 1.0).value() ==
          delay_single_success(lambda, tau, n).value());
  }
}

TEST_CASE("delay scale identity: speeding up both sides changes nothing") {
  // lambda*tau*n capped below ~600 so exp(-x) stays normal; at the subnormal
  // edge the two evaluation orders can round to different zeros.
  Gen gen(5);
  for (int i = 0; i < 200; ++i) {
    const double lambda = gen.uniform(0.05, 4.0);
    const double tau = gen.log_uniform(0.1, 5.0);
    const double n = gen.uniform(0.5, 30.0);
    const double s = gen.log_uniform(0.01, 1e6);
    const double base = delay_single_success(lambda, tau, n).value();
    const double scaled = delay_single_success(lambda * s, tau / s, n).value();
    CHECK(scaled == rel(base, 1e-12));
  }
}

TEST_CASE("delay monotonicity on random grids") {
  Gen gen(6);
  for (int i = 0; i < 300; ++i) {
    const double lambda = gen.uniform(0.05, 3.0);
    const double tau = gen.log_uniform(0.2, 5.0);
    const double n = gen.uniform(0.5, 30.0);
    const double N = gen.log_uniform(1.0, 1e9);
    const double base = delay_likelihood(lambda, tau, n, N).value();
    CHECK(delay_likelihood(lambda + 0.5, tau, n, N).value() <= base);
    CHECK(delay_likelihood(lambda, tau * 1.5, n, N).value() <= base);
    CHECK(delay_likelihood(lambda, tau, n + 1.0, N).value() <= base);
    CHECK(delay_likelihood(lambda, tau, n, N * 2.0).value() >= base);
  }
}

TEST_CASE("attack count over a horizon") {
  CHECK(delay_attack_count(1000.0, 1e5, 1.0, 1.0, 1.0) ==
        rel(36787944.117144232, 1e-13));
  CHECK(delay_attack_count(1000.0, 1e5, 0.0, 1.0, 1.0) == 0.0);
  CHECK(delay_attack_count(1.0, 1.0, 1.0, 0.0, 1.0) == 1.0);
}

TEST_CASE("delay likelihood over time") {
  DelayParams params;
  params.detection_rate = 1.0;
  params.layer_time = 1.0;
  params.layers = 24.33;
  params.attackers = 1000.0;
  params.horizon = 1e5;
  params.speedup = 1.0;
  CHECK(delay_likelihood_over_time(params).value() ==
        rel(0.00099793897270153107, 1e-13));

  params.horizon = 0.0;
  CHECK(delay_likelihood_over_time(params).value() == 0.0);

  params.horizon = 1e5;
  params.layers = 0.0;
  CHECK(delay_likelihood_over_time(params).value() == 1.0);
}

TEST_CASE("compensating speedup") {
  CHECK(compensating_speedup(Probability(0.001), 1.0, 1000.0, 1e5, 1.0,
                             24.0) ==
        rel(0.72004899337385873, 1e-13));
  CHECK(compensating_speedup(Probability(0.001), 1.0, 1000.0, 1e5, 1.0,
                             31.0) ==
        rel(789.62960182680695, 1e-13));

  // Adding ln(10)/(lambda*tau) layers multiplies the speedup by 10.
  Gen gen(7);
  for (int i = 0; i < 100; ++i) {
    const double lambda = gen.uniform(0.2, 3.0);
    const double n = gen.uniform(1.0, 30.0);
    const double s0 =
        compensating_speedup(Probability(0.001), 1.0, 1000.0, 1e5, lambda, n);
    const double s1 = compensating_speedup(
        Probability(0.001), 1.0, 1000.0, 1e5, lambda,
        n + std::log(10.0) / lambda);
    CHECK(s1 / s0 == rel(10.0, 1e-12));
  }
}

TEST_CASE("expected attempts before full breach") {
  CHECK(expected_attempts(2.0, Probability(0.02)) == 98.0);
  CHECK(expected_attempts(1.0, Probability(1.0)) == 0.0);
  CHECK(expected_attempts(15.0, Probability(0.05)) == 285.0);
  CHECK_THROWS_AS(expected_attempts(2.0, Probability(0.0)),
                  std::domain_error);
}

TEST_CASE("mixed-hardness expected attempts") {
  const std::vector<Probability> two{Probability(0.01), Probability(0.03)};
  CHECK(expected_attempts_mixed(two) ==
        rel(131.33333333333333, 1e-14));

  const std::vector<Probability> same{Probability(0.02), Probability(0.02)};
  CHECK(expected_attempts_mixed(same) == 98.0);

  const std::vector<Probability> one{Probability(0.5)};
  CHECK(expected_attempts_mixed(one) == 1.0);

  const std::vector<Probability> bad{Probability(0.5), Probability(0.0)};
  CHECK_THROWS_AS(expected_attempts_mixed(bad), std::domain_error);

  // Jensen: heterogeneous layers never need fewer expected attempts than
  // uniform layers at the mean hardness.
  Gen gen(8);
  for (int i = 0; i < 200; ++i) {
    std::vector<Probability> ps;
    double mean = 0.0;
    const int count = 2 + static_cast<int>(gen.uniform(0.0, 5.0));
    for (int k = 0; k < count; ++k) {
      const double p = gen.uniform(0.01, 1.0);
      ps.emplace_back(p);
      mean += p;
    }
    mean /= count;
    CHECK(expected_attempts_mixed(ps) >=
          expected_attempts(static_cast<double>(count), Probability(mean)) -
              1e-9);
  }
}

TEST_CASE("AM-GM: a mixed pair of layers is easier than the mean pair") {
  Gen gen(9);
  for (int i = 0; i < 300; ++i) {
    const double p1 = gen.uniform(0.0, 1.0);
    const double p2 = gen.uniform(0.0, 1.0);
    const double mean = 0.5 * (p1 + p2);
    CHECK(p1 * p2 <= mean * mean + 1e-15);
  }
}

TEST_CASE("undetected campaign success, approximate form") {
  CombinedParams params{Probability(0.05), Probability(0.05), 15.0, 1.0};
  CHECK(undetected_success_approx(params).value() ==
        rel(4.4794790245705131e-7, 1e-13));

  params.detect_prob = Probability(0.0);
  CHECK(undetected_success_approx(params).value() == 1.0);

  params.detect_prob = Probability(0.3);
  params.break_prob = Probability(1.0);
  CHECK(undetected_success_approx(params).value() == 1.0);
}

TEST_CASE("undetected campaign success, exact form") {
  CombinedParams params{Probability(0.05), Probability(0.05), 15.0, 1.0};
  const double exact = undetected_success_exact(params).value();
  CHECK(exact == rel(4.4614993039049025e-5, 1e-13));

  // Against the direct truncated PGF sum, layer by layer.
  const double per_layer = oracles::geometric_pgf(0.05, 0.95);
  CHECK(per_layer == rel(0.51282051282051282, 1e-12));
  CHECK(exact == rel(std::pow(per_layer, 15.0), 1e-11));

  params.detect_prob = Probability(0.0);
  CHECK(undetected_success_exact(params).value() == 1.0);

  CombinedParams half{Probability(0.5), Probability(0.5), 1.0, 1.0};
  CHECK(undetected_success_exact(half).value() ==
        rel(2.0 / 3.0, 1e-14));

  CombinedParams degenerate{Probability(0.5), Probability(0.5), 1.0, 1.0};
  degenerate.break_prob = Probability(0.0);
  degenerate.detect_prob = Probability(0.0);
  CHECK_THROWS_AS(undetected_success_exact(degenerate), std::domain_error);
}

TEST_CASE("exact campaign success dominates the approximate form") {
  Gen gen(10);
  for (int i = 0; i < 300; ++i) {
    CombinedParams params{Probability(gen.uniform(0.01, 1.0)),
                          Probability(gen.uniform(0.0, 1.0)),
                          gen.uniform(0.0, 40.0), 1.0};
    const double exact = undetected_success_exact(params).value();
    const double approx = undetected_success_approx(params).value();
    CHECK(exact >= approx - 1e-15);
  }
  // Equality cases.
  CombinedParams no_detect{Probability(0.3), Probability(0.0), 7.0, 1.0};
  CHECK(undetected_success_exact(no_detect).value() ==
        undetected_success_approx(no_detect).value());
  CombinedParams always_break{Probability(1.0), Probability(0.4), 7.0, 1.0};
  CHECK(undetected_success_exact(always_break).value() ==
        undetected_success_approx(always_break).value());
}

TEST_CASE("combined likelihood across campaigns") {
  CombinedParams params{Probability(0.05), Probability(0.05), 15.0, 1e5};
  const double approx_L =
      combined_likelihood(params, undetected_success_approx(params)).value();
  CHECK(approx_L == rel(0.043806327621510048, 1e-13));
  CHECK(approx_L > 0.040);
  CHECK(approx_L < 0.050);

  // Halving p: the breach likelihood collapses to the 1e-8 scale.
  CombinedParams harder{Probability(0.025), Probability(0.05), 15.0, 1e5};
  const double harder_L =
      combined_likelihood(harder, undetected_success_approx(harder)).value();
  CHECK(harder_L == rel(9.2962777727379123e-9, 1e-12));
  CHECK(harder_L > 5e-9);
  CHECK(harder_L < 2e-8);

  // Doubling d instead lands at the same scale.
  CombinedParams watched{Probability(0.05), Probability(0.1), 15.0, 1e5};
  const double watched_L =
      combined_likelihood(watched, undetected_success_approx(watched)).value();
  CHECK(watched_L > 5e-9);
  CHECK(watched_L < 2e-8);

  // Doubling campaigns doubles a small likelihood almost exactly.
  CombinedParams twice{Probability(0.025), Probability(0.05), 15.0, 2e5};
  const double twice_L =
      combined_likelihood(twice, undetected_success_approx(twice)).value();
  CHECK(twice_L / harder_L == rel(2.0, 1e-3));

  CHECK(combined_likelihood(params, Probability(0.0)).value() == 0.0);
}

TEST_CASE("combined likelihood monotonicity") {
  Gen gen(11);
  for (int i = 0; i < 200; ++i) {
    CombinedParams params{Probability(gen.uniform(0.02, 0.9)),
                          Probability(gen.uniform(0.05, 0.9)),
                          gen.uniform(1.0, 25.0), gen.log_uniform(1.0, 1e6)};
    auto L = [](const CombinedParams& c) {
      return combined_likelihood(c, undetected_success_exact(c)).value();
    };
    const double base = L(params);

    CombinedParams easier = params;
    easier.break_prob =
        Probability(std::min(1.0, params.break_prob.value() * 1.5));
    CHECK(L(easier) >= base - 1e-15);

    CombinedParams guarded = params;
    guarded.detect_prob =
        Probability(std::min(1.0, params.detect_prob.value() * 1.5));
    CHECK(L(guarded) <= base + 1e-15);

    CombinedParams deeper = params;
    deeper.layers += 2.0;
    CHECK(L(deeper) <= base + 1e-15);

    CombinedParams busier = params;
    busier.campaigns *= 3.0;
    CHECK(L(busier) >= base - 1e-15);
  }
}

TEST_CASE("viability margin") {
  CHECK(viability_margin(15.0, Probability(0.05), Probability(0.05), 1e5) ==
        rel(3.4870745350297716, 1e-13));
  CHECK(viability_margin(15.0, Probability(0.05), Probability(0.05), 1.0) ==
        15.0);
  CHECK(viability_margin(30.0, Probability(0.05), Probability(0.05), 1e5) ==
        rel(18.487074535029772, 1e-13));
  CHECK_THROWS_AS(
      viability_margin(15.0, Probability(0.05), Probability(0.0), 1e5),
      std::domain_error);
  CHECK_THROWS_AS(
      viability_margin(15.0, Probability(0.05), Probability(0.05), 0.5),
      std::domain_error);
}

TEST_CASE("probability type rejects out-of-range values") {
  CHECK_THROWS_AS(Probability(-0.1), std::domain_error);
  CHECK_THROWS_AS(Probability(1.1), std::domain_error);
  CHECK_THROWS_AS(Probability(std::nan("")), std::domain_error);
  CHECK(Probability(0.25).complement() == 0.75);
}

TEST_CASE("parameter validation names the offender") {
  BlockadeParams bad{Probability(0.5), -1.0, 5.0};
  CHECK_THROWS_WITH_AS(bad.validate(),
                       doctest::Contains("n (layers)"), std::domain_error);

  DelayParams delay;
  delay.detection_rate = 1.0;
  delay.layer_time = 0.0;
  CHECK_THROWS_WITH_AS(delay.validate(), doctest::Contains("tau"),
                       std::domain_error);
}
