#ifndef KSLAB_LAWS_H_
#define KSLAB_LAWS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kslab/bits.h"
#include "kslab/entropy.h"
#include "kslab/kolmo.h"

namespace kslab {

// Largest constant tried by verify_law.
inline constexpr std::uint32_t kMaxLawConstant = 64;

inline const char* const kScaleCaveat = "n ≤ 3 cannot separate O(n) from O(n²)";

// One of the verified inequalities. Every O(g) becomes c * g for a single
// shared c; log terms use log_term (ceil(log2(v + 2))).
//   pair_swap    KS^{s'}(y,x) <= KS^s(x,y) + c,          s' = s + c(|x|+|y|)
//   chain_easy   KS^{s'}(x,y) <= KS^s(x) + KS^s(y|x) + c log KS^s(x),
//                                                        s' = s + c(|x|+|y|)
//   symmetry     KS^{s'}(x) + KS^{s'}(y|x) <= KS^s(x,y) + c log KS^s(x,y),
//                                                        s' = s + c log s + c(|x|+|y|)
//   basic(I,J)   KS^{s'}(x_{I&J}) + KS^{s'}(x_{I|J}) <= KS^s(x_I) + KS^s(x_J) + c log m,
//                                                        s' = s + c log s + c m
//   shannon      sum over negative coefficients at s' <= sum over positive
//                coefficients at s + c log n,            s' = s + c n^2 log n + c n log s
// where m is the total length of the tuple and n its longest component.
struct Law {
  enum class Kind { kPairSwap, kChainEasy, kSymmetry, kBasic, kShannon };
  Kind kind = Kind::kSymmetry;
  unsigned k = 2;
  SubsetMask i = 0;
  SubsetMask j = 0;
  LinearInequality inequality;

  static Law pair_swap();
  static Law chain_easy();
  static Law symmetry();
  static Law basic(unsigned k, SubsetMask i, SubsetMask j);
  // Throws std::invalid_argument unless `certificate` is a verified Member
  // decision for `ineq`.
  static Law shannon(const LinearInequality& ineq, const ConeDecision& certificate);

  std::string id() const;
};

struct LawGrid {
  std::size_t n = 1;
  std::vector<std::size_t> s_grid;
  std::size_t cap = 14;

  std::string id() const;
};

// Points with more tuples than this are refused.
inline constexpr std::size_t kMaxLawPoints = 200000;

struct LawPoint {
  enum class Status { kResolved, kVacuous, kNotFound, kViolated };
  std::vector<BitString> strings;
  std::size_t s = 0;
  Status status = Status::kResolved;
  std::uint32_t c = 0;  // minimal constant, for kResolved
};

const char* point_status_name(LawPoint::Status s);

struct LawReport {
  std::string law;
  LawGrid grid;
  std::string interpreter;
  std::optional<std::uint32_t> c;  // nullopt when some point is violated
  std::vector<LawPoint> points;
  std::size_t resolved = 0;
  std::size_t vacuous = 0;
  std::size_t not_found = 0;
  std::size_t violated = 0;
  double seconds = 0.0;

  // (vacuous + not_found) / points
  double not_found_fraction() const;
  std::string to_json(bool with_runtime = false) const;
  // One row per point: strings, s, status, c.
  std::string to_csv() const;
};

// Every k-tuple of strings of length <= n, crossed with the grid's s
// values; minimal c per point by binary search over [0, kMaxLawConstant];
// the report's c is the maximum over resolved points.
LawReport verify_law(const Law& law, const LawGrid& grid, KsOracle& oracle,
                     unsigned workers = 1);
// Points (strings, s) with complete data where the inequality fails at c.
std::vector<LawPoint> check_law(const Law& law, const LawGrid& grid, std::uint32_t c,
                                KsOracle& oracle);

// Staged enumeration of {y : KS^s(x, y) <= m, |y| <= n} for s = 1, 2, ...
struct StageOrdinal {
  BitString x;
  BitString target;
  std::size_t m = 0;
  std::uint64_t ordinal = 0;
  std::size_t s_hit = 0;
  std::uint64_t enumerated_through_hit = 0;
};

// y values newly qualifying at stage s (qualify at s, not at s - 1), in
// shortlex order.
std::vector<BitString> stage_members(const BitString& x, std::size_t m, std::size_t n,
                                     std::size_t s, KsOracle& oracle);
// Concatenation of stages 1..s.
std::vector<BitString> staged_prefix(const BitString& x, std::size_t m, std::size_t n,
                                     std::size_t s, KsOracle& oracle);
// Throws std::domain_error when the target has not appeared by stage_cap.
StageOrdinal staged_enumeration(const BitString& x, std::size_t m, std::size_t n,
                                const BitString& target, KsOracle& oracle,
                                std::size_t stage_cap = 1024);

struct TypicalSet {
  std::vector<BitString> base;
  std::size_t u = 0;
  std::size_t u_star = 0;
  std::size_t n = 0;
  std::size_t cap = 0;
  ComplexityProfile profile;              // base, at u
  std::vector<std::vector<BitString>> members;  // in enumeration order

  bool contains(const std::vector<BitString>& xs) const;
  // Per nonempty I: H(X_I) of the uniform distribution on the members
  // against KS^u(x_I), as CSV.
  std::string gap_report() const;
};

inline std::size_t proxy_bound(std::size_t u) { return 4 * u + 1024; }

TypicalSet typical_set(const std::vector<BitString>& xs, std::size_t u, std::size_t n,
                       std::size_t cap, KsOracle& oracle);

// Smallest i with levels[i] == levels[i + 1]; throws std::domain_error if
// there is none and std::invalid_argument if the sequence increases.
std::size_t find_stable_level(const std::vector<std::vector<std::uint64_t>>& levels);

// f applied n times, f(s) = s + c log2 s + k.
double iterate_f(double s, double c, double k, std::uint64_t n);
// s + n log2 s + c1 (k + 1)(n + c2) ln(n + c2)
double lemma_bound(double s, double k, double n, double c1, double c2);

struct LemmaGrid {
  std::vector<double> s_values;
  std::vector<double> k_values;
  std::vector<std::uint64_t> n_values;
  std::size_t size() const { return s_values.size() * k_values.size() * n_values.size(); }
  static LemmaGrid standard();  // geometric s in [1, 1e6], k 0..100, n 1..100
};

struct LemmaFit {
  std::optional<std::pair<int, int>> constants;  // (c1, c2)
  std::size_t points = 0;
  double seconds = 0.0;
};

// Lexicographically smallest (c1, c2) in {1..limit}^2 with
// iterate_f(s, 1, k, n) <= lemma_bound(s, k, n, c1, c2) on the whole grid.
LemmaFit fit_lemma_constants(const LemmaGrid& grid, int limit = 8);

struct MutualInfoPoint {
  std::size_t s = 0;
  std::optional<long long> value;  // nullopt when a term is NotFound
};

std::vector<MutualInfoPoint> mutual_info_profile(const BitString& a, const BitString& b,
                                                 const std::vector<std::size_t>& s_grid,
                                                 std::size_t cap, KsOracle& oracle);

// All k-tuples of strings of length <= n, first component slowest.
std::vector<std::vector<BitString>> all_tuples(unsigned k, std::size_t n);

}  // namespace kslab

#endif  // KSLAB_LAWS_H_
