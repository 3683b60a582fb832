#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "unifsel/bayesnet.hpp"
#include "unifsel/dataset.hpp"
#include "unifsel/infotheory.hpp"
#include "unifsel/prng.hpp"

using namespace unifsel;

namespace {

DiscreteDataset from_columns(std::vector<std::vector<std::int32_t>> cols, std::vector<int> cards,
                             int class_index) {
  DiscreteDataset d;
  d.columns = std::move(cols);
  d.cardinalities = std::move(cards);
  d.class_index = class_index;
  for (std::size_t i = 0; i < d.columns.size(); ++i) d.feature_names.push_back("f" + std::to_string(i));
  d.validate();
  return d;
}

DiscreteDataset random_dataset(int n_cols, int rows, std::uint64_t seed, int max_card = 3) {
  Prng rng(seed, 0xdada);
  std::vector<int> cards(n_cols);
  for (int& c : cards) c = 2 + static_cast<int>(rng.below(max_card - 1));
  std::vector<std::vector<std::int32_t>> cols(n_cols, std::vector<std::int32_t>(rows));
  for (int c = 0; c < n_cols; ++c)
    for (int r = 0; r < rows; ++r) cols[c][r] = static_cast<std::int32_t>(rng.below(cards[c]));
  // inject correlation so the identities are not tested on pure noise
  for (int r = 0; r < rows; ++r)
    if (rng.uniform() < 0.6) cols[0][r] = cols[n_cols - 1][r] % cards[0];
  return from_columns(std::move(cols), std::move(cards), n_cols - 1);
}

}  // namespace

TEST_CASE("entropy closed forms") {
  // exact 50/50 binary column
  std::vector<std::int32_t> fair, constant, quad;
  for (int i = 0; i < 64; ++i) {
    fair.push_back(i % 2);
    constant.push_back(0);
    quad.push_back(i % 4);
  }
  auto d = from_columns({fair, constant, quad}, {2, 1, 4}, 0);
  const int v0[] = {0}, v1[] = {1}, v2[] = {2};
  CHECK(entropy(d, v0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(entropy(d, v1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(entropy(d, v2) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(entropy(d, {}), std::invalid_argument);
}

TEST_CASE("mutual information on exact product counts is zero") {
  // all 6 combinations of a 2x3 product distribution, exactly once each
  std::vector<std::int32_t> a, b;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      a.push_back(i);
      b.push_back(j);
    }
  auto d = from_columns({a, b}, {2, 3}, 0);
  CHECK(std::abs(mutual_information(d, 0, 1)) < 1e-12);
}

TEST_CASE("identical fair binary columns share ln 2") {
  std::vector<std::int32_t> a;
  for (int i = 0; i < 100; ++i) a.push_back(i % 2);
  auto d = from_columns({a, a}, {2, 2}, 0);
  CHECK(mutual_information(d, 0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("plug-in MI on an exhaustive sample matches the exact-joint oracle") {
  // two-node network X -> Y with a known CPT whose probabilities are
  // multiples of 1/16, so a 16-row dataset realizes the joint exactly
  BayesianNetwork bn;
  bn.node_names = {"X", "Y"};
  bn.cardinalities = {2, 2};
  bn.parent_lists = {{}, {0}};
  bn.cpts = {{{0.5, 0.5}}, {{0.75, 0.25}, {0.25, 0.75}}};
  validate_or_throw(bn);
  const auto joint = exact_joint(bn);

  std::vector<std::int32_t> xs, ys;
  for (std::size_t cfg = 0; cfg < joint.n_configs(); ++cfg) {
    const int x = static_cast<int>(cfg / 2), y = static_cast<int>(cfg % 2);
    const int copies = static_cast<int>(std::lround(joint.probs[cfg] * 16));
    for (int k = 0; k < copies; ++k) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  REQUIRE(xs.size() == 16);
  auto d = from_columns({xs, ys}, {2, 2}, 1);
  CHECK(mutual_information(d, 0, 1) == doctest::Approx(exact_mi(joint, 0, 1)).epsilon(1e-10));
}

TEST_CASE("cmi with empty set reduces to mi") {
  auto d = random_dataset(4, 300, 17);
  CHECK(conditional_mutual_information(d, 0, 1, {}) ==
        doctest::Approx(mutual_information(d, 0, 1)).epsilon(1e-12));
}

TEST_CASE("chain X -> S -> Y : I(X;Y|S) = 0 on an exhaustive sample") {
  // deterministic-ish chain with probabilities in 1/8ths realized exactly
  std::vector<std::int32_t> x, s, y;
  // joint over (x, s): p(x) uniform, s = x with prob 3/4
  for (int xi = 0; xi < 2; ++xi)
    for (int si = 0; si < 2; ++si)
      for (int yi = 0; yi < 2; ++yi) {
        const int n_xs = (xi == si) ? 3 : 1;      // out of 4
        const int n_y = (yi == si) ? 3 : 1;       // out of 4
        for (int k = 0; k < n_xs * n_y; ++k) {
          x.push_back(xi);
          s.push_back(si);
          y.push_back(yi);
        }
      }
  auto d = from_columns({x, s, y}, {2, 2, 2}, 2);
  const int cond[] = {1};
  CHECK(std::abs(conditional_mutual_information(d, 0, 2, cond)) < 1e-12);
}

TEST_CASE("three-term decomposition of I(X;C|S) holds on sampled data") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto d = random_dataset(5, 400, seed);
    const int x = 0, c = d.class_index, s = 1;
    const int sv[] = {s};
    const int cv[] = {c};
    const double lhs = conditional_mutual_information(d, x, c, sv);
    const double rhs = mutual_information(d, x, c) - mutual_information(d, x, s) +
                       conditional_mutual_information(d, x, s, cv);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("kl divergence basics") {
  CHECK(kl_divergence(std::vector<double>{0.25, 0.25, 0.25, 0.25},
                      std::vector<double>{0.25, 0.25, 0.25, 0.25}) == 0.0);
  CHECK(kl_divergence(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  Prng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(4), q(4);
    double sp = 0, sq = 0;
    for (int i = 0; i < 4; ++i) {
      p[i] = rng.uniform() + 0.01;
      q[i] = rng.uniform() + 0.01;
      sp += p[i];
      sq += q[i];
    }
    for (int i = 0; i < 4; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    CHECK(kl_divergence(p, q) >= 0.0);
  }
  CHECK_THROWS_AS(kl_divergence(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}),
                  std::domain_error);
  CHECK_THROWS_AS(kl_divergence(std::vector<double>{0.7, 0.7}, std::vector<double>{0.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("g2 on a perfectly dependent 2x2 table") {
  std::vector<std::int32_t> a;
  for (int i = 0; i < 100; ++i) a.push_back(i % 2);
  auto d = from_columns({a, a}, {2, 2}, 0);
  const auto res = g2_test(d, 0, 1, {});
  CHECK(res.g2 == doctest::Approx(200.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(res.dof == 1);
  CHECK(res.p_value < 1e-6);
  CHECK(res.reliable);
}

TEST_CASE("sample rule instantiation: 2x2 with one 3-valued conditioner needs 60 rows") {
  auto build = [](int m) {
    std::vector<std::int32_t> a(m), b(m), s(m);
    Prng rng(1);
    for (int i = 0; i < m; ++i) {
      a[i] = static_cast<std::int32_t>(rng.below(2));
      b[i] = static_cast<std::int32_t>(rng.below(2));
      s[i] = static_cast<std::int32_t>(rng.below(3));
    }
    return from_columns({a, b, s}, {2, 2, 3}, 1);
  };
  const int cond[] = {2};
  CHECK_FALSE(g2_test(build(59), 0, 1, cond).reliable);
  CHECK(g2_test(build(60), 0, 1, cond).reliable);
}

TEST_CASE("g2 on exact product counts accepts") {
  std::vector<std::int32_t> a, b;
  for (int rep = 0; rep < 10; ++rep)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) {
        a.push_back(i);
        b.push_back(j);
      }
  auto d = from_columns({a, b}, {2, 3}, 0);
  const auto res = g2_test(d, 0, 1, {});
  CHECK(res.g2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(res.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate cardinality gives dof 0 and p = 1") {
  std::vector<std::int32_t> a(50, 0), b(50);
  for (int i = 0; i < 50; ++i) b[i] = i % 2;
  auto d = from_columns({a, b}, {1, 2}, 1);
  const auto res = g2_test(d, 0, 1, {});
  CHECK(res.dof == 0);
  CHECK(res.p_value == 1.0);
  CHECK(res.reliable);
}

TEST_CASE("g2 equals 2 N times the plug-in cmi") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    auto d = random_dataset(4, 250, seed);
    const int cond[] = {2};
    const auto res = g2_test(d, 0, 1, cond);
    CHECK(res.mi_nats == res.g2 / (2.0 * 250));  // same accumulation, bitwise
    CHECK(res.g2 == doctest::Approx(2.0 * 250 *
                                     conditional_mutual_information(d, 0, 1, cond))
                        .epsilon(1e-10));
  }
}

TEST_CASE("chain rule, symmetry, nonnegativity on sampled data") {
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    auto d = random_dataset(5, 300, seed);
    const int c = d.class_index;
    const int s = 0, x = 1;
    // I(C;{S,X}) = I(C;S) + I(C;X|S)
    const int pair[] = {s, x};
    const int cv[] = {c};
    const double joint_mi = entropy(d, cv) + entropy(d, pair) - [&] {
      const int all[] = {s, x, c};
      return entropy(d, all);
    }();
    const int sv[] = {s};
    const double chain = mutual_information(d, c, s) + conditional_mutual_information(d, x, c, sv);
    CHECK(joint_mi == doctest::Approx(chain).epsilon(1e-10));

    const int zv[] = {2};
    const double ab = conditional_mutual_information(d, x, s, zv);
    const double ba = conditional_mutual_information(d, s, x, zv);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab >= -1e-12);
    CHECK(mutual_information(d, x, s) >= -1e-12);
  }
}

TEST_CASE("p-value is monotone nonincreasing in g2 at fixed dof") {
  for (double dof : {1.0, 4.0, 27.0, 108.0}) {
    double prev = 1.1;
    for (double g2 = 0.0; g2 < 60.0; g2 += 1.7) {
      const double p = chi_square_upper_tail(g2, dof);
      CHECK(p <= prev + 1e-15);
      prev = p;
    }
  }
}

TEST_CASE("chi-square tail matches frozen reference values") {
  // reference values from the regularized incomplete gamma series
  CHECK(chi_square_upper_tail(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_upper_tail(9.487729036781154, 4.0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_upper_tail(138.6294361119891, 1.0) == doctest::Approx(5.308e-32).epsilon(1e-3));
}
