#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "kslab/entropy.h"

using namespace kslab;

namespace {

constexpr double kTol = 1e-9;

// Dense coefficient vector of size 2^k - 1, the form used for dedup below.
using Dense = std::vector<Rational>;

Dense dense(const LinearInequality& ineq) {
  Dense d(full_mask(ineq.k));
  for (const auto& [m, c] : ineq.coeffs) d[m - 1] = c;
  return d;
}

// Generators written out from their definitions: H(N) - H(N - i), and
// H(K+i) + H(K+j) - H(K+i+j) - H(K) over i < j and K in the rest.
std::set<Dense> elementals_by_hand(unsigned k) {
  std::set<Dense> out;
  const SubsetMask n = full_mask(k);
  auto bump = [](Dense& d, SubsetMask m, int c) {
    if (m) d[m - 1] += c;
  };
  for (unsigned i = 0; i < k; ++i) {
    Dense d(n);
    bump(d, n, 1);
    bump(d, n & ~(1u << i), -1);
    out.insert(d);
  }
  for (unsigned i = 0; i < k; ++i) {
    for (unsigned j = i + 1; j < k; ++j) {
      const SubsetMask rest = n & ~(1u << i) & ~(1u << j);
      for (SubsetMask K = 0; K <= n; ++K) {
        if ((K & ~rest) != 0) continue;
        Dense d(n);
        bump(d, K | (1u << i), 1);
        bump(d, K | (1u << j), 1);
        bump(d, K | (1u << i) | (1u << j), -1);
        bump(d, K, -1);
        out.insert(d);
      }
    }
  }
  return out;
}

// Marginal entropies computed by summing over the joint table directly.
double entropy_by_hand(const JointDistribution& d, SubsetMask m) {
  std::map<std::vector<unsigned>, double> marginal;
  for (const auto& [t, w] : d.weights) {
    std::vector<unsigned> key;
    for (unsigned i = 0; i < d.k; ++i) {
      if (m >> i & 1) key.push_back(t[i]);
    }
    marginal[key] += w.convert_to<double>();
  }
  double h = 0;
  for (const auto& [key, p] : marginal) {
    if (p > 0) h -= p * std::log2(p);
  }
  return h;
}

JointDistribution random_distribution(std::mt19937_64& rng, unsigned k) {
  JointDistribution d;
  d.k = k;
  d.alphabet.assign(k, 0);
  for (auto& a : d.alphabet) a = 2 + static_cast<unsigned>(rng() % 2);
  std::vector<std::pair<std::vector<unsigned>, long long>> raw;
  long long total = 0;
  const int support = 1 + static_cast<int>(rng() % 8);
  for (int s = 0; s < support; ++s) {
    std::vector<unsigned> t;
    for (unsigned i = 0; i < k; ++i) t.push_back(static_cast<unsigned>(rng() % d.alphabet[i]));
    const long long w = 1 + static_cast<long long>(rng() % 20);
    raw.emplace_back(t, w);
    total += w;
  }
  for (const auto& [t, w] : raw) d.weights[t] += Rational(w, total);
  return d;
}

LinearInequality random_combination(std::mt19937_64& rng, unsigned k) {
  const auto gens = elemental_inequalities(k);
  LinearInequality out;
  out.k = k;
  const int terms = 1 + static_cast<int>(rng() % 4);
  for (int t = 0; t < terms; ++t) {
    const auto& g = gens[rng() % gens.size()];
    const Rational w(1 + static_cast<long long>(rng() % 5), 1 + static_cast<long long>(rng() % 3));
    for (const auto& [m, c] : g.coeffs) out.add(m, w * c);
  }
  return out;
}

}  // namespace

TEST_CASE("rationals") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-2") == Rational(-2));
  CHECK(format_rational(Rational(-4, 6)) == "-2/3");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("a"), std::invalid_argument);
}

TEST_CASE("entropy vector examples") {
  auto fair = JointDistribution::uniform(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  EntropyVector v = entropy_vector(fair);
  CHECK(v[1] == doctest::Approx(1.0));
  CHECK(v[2] == doctest::Approx(1.0));
  CHECK(v[3] == doctest::Approx(2.0));

  EntropyVector same = entropy_vector(JointDistribution::uniform(2, {{0, 0}, {1, 1}}));
  CHECK(same[1] == doctest::Approx(1.0));
  CHECK(same[3] == doctest::Approx(1.0));

  auto three = JointDistribution::uniform(2, {{0, 0}, {0, 1}, {1, 0}});
  EntropyVector t = entropy_vector(three);
  CHECK(std::abs(t[3] - 1.584962500721156) < kTol);
  CHECK(std::abs(t[1] - 0.918295834054490) < kTol);
  CHECK(std::abs(t[2] - 0.918295834054490) < kTol);
  const auto sub = basic_inequality(2, 1, 2);
  CHECK(std::abs(evaluate(sub, t) - 0.251629167387823) < kTol);
  CHECK(evaluate(sub, v) == doctest::Approx(0.0));
  CHECK(evaluate(LinearInequality{2, {}}, t) == 0.0);
}

TEST_CASE("entropy vector matches direct marginals") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 300; ++t) {
    auto d = random_distribution(rng, 1 + t % 4);
    EntropyVector v = entropy_vector(d);
    for (SubsetMask m = 1; m <= full_mask(d.k); ++m) {
      CHECK(std::abs(v[m] - entropy_by_hand(d, m)) < kTol);
    }
  }
}

TEST_CASE("distribution parsing and validation") {
  auto d = parse_distribution("# uniform\n0,0,1/3\n0,1,1/3\n\n1,0,1/3\n");
  CHECK(d.k == 2);
  CHECK(d.weights.size() == 3);
  CHECK_THROWS_AS(parse_distribution("0,0,1/2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution("0,0,1/2\n1,3/2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution("0,0,-1/2\n1,1,3/2\n"), std::invalid_argument);
}

TEST_CASE("inequality text") {
  auto ineq = parse_inequality("k=3; {1}:1 {2}:1 {1,2}:-1/2");
  CHECK(ineq.k == 3);
  CHECK(ineq.coeffs.at(3) == Rational(-1, 2));
  CHECK(parse_inequality(format_inequality(ineq)) == ineq);
  CHECK(format_inequality(basic_inequality(2, 1, 2)) == "k=2; {1}:1 {2}:1 {1,2}:-1");
  CHECK_THROWS_AS(parse_inequality("{1}:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_inequality("k=2; {3}:1"), std::invalid_argument);
}

TEST_CASE("basic inequality examples") {
  auto a = basic_inequality(2, 0b01, 0b10);
  CHECK(a.coeffs == std::map<SubsetMask, Rational>{{1, 1}, {2, 1}, {3, -1}});
  CHECK(basic_inequality(3, 0b001, 0b011).is_zero());
  auto b = basic_inequality(3, 0b011, 0b110);
  CHECK(b.coeffs == std::map<SubsetMask, Rational>{{3, 1}, {6, 1}, {2, -1}, {7, -1}});
}

TEST_CASE("elemental families") {
  const std::size_t counts[] = {0, 1, 3, 9, 28, 85};
  for (unsigned k = 1; k <= 5; ++k) {
    const auto by_hand = elementals_by_hand(k);
    CHECK(by_hand.size() == counts[k]);
    const auto gens = elemental_inequalities(k);
    CHECK(gens.size() == by_hand.size());
    std::set<Dense> got;
    for (const auto& g : gens) got.insert(dense(g));
    CHECK(got == by_hand);
  }
}

TEST_CASE("elementals hold on random distributions; entropy is monotone") {
  std::mt19937_64 rng(41);
  for (unsigned k = 1; k <= 4; ++k) {
    const auto gens = elemental_inequalities(k);
    for (int t = 0; t < 1000; ++t) {
      EntropyVector v = entropy_vector(random_distribution(rng, k));
      for (const auto& g : gens) REQUIRE(evaluate(g, v) >= -kTol);
      for (SubsetMask i = 1; i <= full_mask(k); ++i) {
        CHECK(v[i] >= -kTol);
        for (SubsetMask j = i; j <= full_mask(k); ++j) {
          if ((i & j) == i) CHECK(v[i] <= v[j] + kTol);
        }
      }
    }
  }
}

TEST_CASE("single and paired elementals are members") {
  for (unsigned k = 2; k <= 4; ++k) {
    const auto gens = elemental_inequalities(k);
    for (std::size_t g = 0; g < gens.size(); ++g) {
      ConeDecision d = is_shannon(gens[g]);
      REQUIRE(d.member());
      CHECK(verify_certificate(gens[g], d));
      // Generators are extreme rays, so the weights are forced.
      for (std::size_t h = 0; h < gens.size(); ++h) CHECK(d.weights[h] == (g == h ? 1 : 0));
    }
    for (std::size_t g = 0; g + 1 < gens.size(); g += 3) {
      LinearInequality sum = gens[g];
      for (const auto& [m, c] : gens[g + 1].coeffs) sum.add(m, c);
      ConeDecision d = is_shannon(sum);
      REQUIRE(d.member());
      CHECK(verify_certificate(sum, d));
    }
  }
}

TEST_CASE("random nonnegative combinations are members") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    const unsigned k = 2 + t % 3;
    auto ineq = random_combination(rng, k);
    if (ineq.is_zero()) continue;
    ConeDecision d = is_shannon(ineq);
    REQUIRE(d.member());
    CHECK(verify_certificate(ineq, d));
  }
}

TEST_CASE("basic inequalities lie in the cone") {
  for (unsigned k = 1; k <= 4; ++k) {
    for (SubsetMask i = 1; i <= full_mask(k); ++i) {
      for (SubsetMask j = 1; j <= full_mask(k); ++j) {
        auto b = basic_inequality(k, i, j);
        ConeDecision d = is_shannon(b);
        CHECK(d.member());
        CHECK(verify_certificate(b, d));
      }
    }
  }
}

TEST_CASE("superadditivity is refuted") {
  auto ineq = parse_inequality("k=2; {1,2}:1 {1}:-1 {2}:-1");
  ConeDecision d = is_shannon(ineq);
  REQUIRE_FALSE(d.member());
  CHECK(verify_certificate(ineq, d));
  REQUIRE(d.witness.size() == 3);
  CHECK(evaluate(ineq, d.witness) < 0);
  for (const auto& g : elemental_inequalities(2)) CHECK(evaluate(g, d.witness) >= 0);
  // A perfectly correlated bit violates it.
  auto bit = JointDistribution::uniform(2, {{0, 0}, {1, 1}});
  CHECK(evaluate(ineq, entropy_vector(bit)) == doctest::Approx(-1.0));
  CHECK(evaluate(ineq, std::vector<Rational>{1, 1, 1}) == -1);
}

TEST_CASE("tampered certificates fail") {
  auto gens = elemental_inequalities(3);
  ConeDecision d = is_shannon(gens[0]);
  d.weights[0] = 2;
  CHECK_FALSE(verify_certificate(gens[0], d));
  auto ineq = parse_inequality("k=2; {1,2}:1 {1}:-1 {2}:-1");
  ConeDecision n = is_shannon(ineq);
  n.witness.assign(3, 0);
  CHECK_FALSE(verify_certificate(ineq, n));
  // Other non-Shannon-cone directions.
  for (const char* text : {"k=3; {1}:-1", "k=3; {1,2,3}:1 {1,2}:-1 {3}:-1",
                           "k=2; {1}:1 {1,2}:-1"}) {
    auto q = parse_inequality(text);
    ConeDecision r = is_shannon(q);
    CHECK_FALSE(r.member());
    CHECK(verify_certificate(q, r));
  }
}
