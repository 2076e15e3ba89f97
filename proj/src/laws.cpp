#include "kslab/laws.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include "json.hpp"
#include <sstream>
#include <stdexcept>
#include <thread>

namespace kslab {

namespace {

struct Term {
  Rational coef;
  BitString y;
  BitString x;
};

// One grid point of a law: sum(lhs at s') <= sum(rhs at s) + c * log,
// with s' = s + c * slope; log is log_fixed, or log_term of the value of
// rhs[log_of_rhs] when that index is set.
struct Instance {
  std::vector<Term> lhs;
  std::vector<Term> rhs;
  std::uint64_t slope = 0;
  int log_of_rhs = -1;
  std::uint64_t log_fixed = 0;
};

std::size_t total_length(const std::vector<BitString>& xs) {
  std::size_t t = 0;
  for (const auto& x : xs) t += x.size();
  return t;
}

std::size_t max_length(const std::vector<BitString>& xs) {
  std::size_t t = 0;
  for (const auto& x : xs) t = std::max(t, x.size());
  return t;
}

unsigned law_arity(const Law& law) {
  switch (law.kind) {
    case Law::Kind::kBasic:
    case Law::Kind::kShannon:
      return law.k;
    default:
      return 2;
  }
}

Instance instantiate(const Law& law, const std::vector<BitString>& xs, std::size_t s) {
  Instance in;
  const BitString empty;
  switch (law.kind) {
    case Law::Kind::kPairSwap:
      in.lhs.push_back({1, encode_pair(xs[1], xs[0]), empty});
      in.rhs.push_back({1, encode_pair(xs[0], xs[1]), empty});
      in.slope = total_length(xs);
      in.log_fixed = 1;
      break;
    case Law::Kind::kChainEasy:
      in.lhs.push_back({1, encode_pair(xs[0], xs[1]), empty});
      in.rhs.push_back({1, xs[0], empty});
      in.rhs.push_back({1, xs[1], xs[0]});
      in.slope = total_length(xs);
      in.log_of_rhs = 0;
      break;
    case Law::Kind::kSymmetry:
      in.lhs.push_back({1, xs[0], empty});
      in.lhs.push_back({1, xs[1], xs[0]});
      in.rhs.push_back({1, encode_pair(xs[0], xs[1]), empty});
      in.slope = static_cast<std::uint64_t>(log_term(s)) + total_length(xs);
      in.log_of_rhs = 0;
      break;
    case Law::Kind::kBasic: {
      const std::size_t m = total_length(xs);
      if ((law.i & law.j) != 0) in.lhs.push_back({1, tuple_part(xs, law.i & law.j), empty});
      in.lhs.push_back({1, tuple_part(xs, law.i | law.j), empty});
      in.rhs.push_back({1, tuple_part(xs, law.i), empty});
      in.rhs.push_back({1, tuple_part(xs, law.j), empty});
      in.slope = static_cast<std::uint64_t>(log_term(s)) + m;
      in.log_fixed = static_cast<std::uint64_t>(log_term(m));
      break;
    }
    case Law::Kind::kShannon: {
      const std::uint64_t n = max_length(xs);
      for (const auto& [mask, coef] : law.inequality.coeffs) {
        if (coef < 0) {
          in.lhs.push_back({-coef, tuple_part(xs, mask), empty});
        } else {
          in.rhs.push_back({coef, tuple_part(xs, mask), empty});
        }
      }
      in.slope = n * n * static_cast<std::uint64_t>(log_term(n)) +
                 n * static_cast<std::uint64_t>(log_term(s));
      in.log_fixed = static_cast<std::uint64_t>(log_term(n));
      break;
    }
  }
  return in;
}

struct Side {
  bool found = true;
  Rational total = 0;
  std::vector<std::size_t> values;
};

Side evaluate_side(const std::vector<Term>& terms, std::size_t s, std::size_t cap,
                   KsOracle& oracle) {
  Side side;
  for (const Term& t : terms) {
    ComplexityResult r = oracle.ks(t.y, t.x, s, cap);
    if (!r.found()) {
      side.found = false;
      side.values.push_back(0);
      continue;
    }
    side.values.push_back(*r.value);
    side.total += t.coef * static_cast<long long>(*r.value);
  }
  return side;
}

// Decides one point. Monotone in c: the left side only shrinks as s'
// grows, the right side only grows.
class PointSolver {
 public:
  PointSolver(const Instance& in, std::size_t s, std::size_t cap, KsOracle& oracle)
      : in_(in), s_(s), cap_(cap), oracle_(oracle), rhs_(evaluate_side(in.rhs, s, cap, oracle)) {
    log_ = in.log_of_rhs >= 0
               ? static_cast<std::uint64_t>(log_term(rhs_.values[in.log_of_rhs]))
               : in.log_fixed;
  }

  bool rhs_found() const { return rhs_.found; }

  // nullopt: left side has a NotFound term at this c.
  std::optional<bool> holds(std::uint32_t c) const {
    const Side lhs = evaluate_side(in_.lhs, s_ + std::size_t{c} * in_.slope, cap_, oracle_);
    if (!lhs.found) return std::nullopt;
    return lhs.total <= rhs_.total + Rational(static_cast<long long>(std::uint64_t{c} * log_));
  }

 private:
  const Instance& in_;
  std::size_t s_;
  std::size_t cap_;
  KsOracle& oracle_;
  Side rhs_;
  std::uint64_t log_ = 0;
};

LawPoint solve_point(const Law& law, const std::vector<BitString>& xs, std::size_t s,
                     std::size_t cap, KsOracle& oracle) {
  LawPoint pt;
  pt.strings = xs;
  pt.s = s;
  const Instance in = instantiate(law, xs, s);
  PointSolver solver(in, s, cap, oracle);
  if (!solver.rhs_found()) {
    pt.status = LawPoint::Status::kVacuous;
    return pt;
  }
  auto top = solver.holds(kMaxLawConstant);
  if (!top) {
    pt.status = LawPoint::Status::kNotFound;
    return pt;
  }
  if (!*top) {
    pt.status = LawPoint::Status::kViolated;
    return pt;
  }
  std::uint32_t lo = 0, hi = kMaxLawConstant;  // holds(hi) is true
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    auto h = solver.holds(mid);
    if (h && *h) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  pt.status = LawPoint::Status::kResolved;
  pt.c = lo;
  return pt;
}

void check_grid(const Law& law, const LawGrid& grid) {
  const unsigned k = law_arity(law);
  if (k >= 2 && grid.n > 3) throw std::invalid_argument("grid too large: n must be <= 3");
  if (grid.s_grid.empty()) throw std::invalid_argument("empty s grid");
  const double tuples = std::pow(std::pow(2.0, static_cast<double>(grid.n + 1)) - 1, k);
  if (tuples * static_cast<double>(grid.s_grid.size()) > kMaxLawPoints) {
    throw std::invalid_argument("grid too large");
  }
}

std::string join_strings(const std::vector<BitString>& xs, char sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i].empty() ? std::string("-") : xs[i].str();
  }
  return out;
}

}  // namespace

Law Law::pair_swap() { return Law{Kind::kPairSwap, 2, 0, 0, {}}; }
Law Law::chain_easy() { return Law{Kind::kChainEasy, 2, 0, 0, {}}; }
Law Law::symmetry() { return Law{Kind::kSymmetry, 2, 0, 0, {}}; }

Law Law::basic(unsigned k, SubsetMask i, SubsetMask j) {
  if (k == 0 || k > 4 || i == 0 || j == 0 || i > full_mask(k) || j > full_mask(k)) {
    throw std::invalid_argument("basic law needs nonempty subsets of {1..k}, k <= 4");
  }
  Law law{Kind::kBasic, k, i, j, basic_inequality(k, i, j)};
  return law;
}

Law Law::shannon(const LinearInequality& ineq, const ConeDecision& certificate) {
  if (!certificate.member() || !verify_certificate(ineq, certificate)) {
    throw std::invalid_argument("certificate invalid: not a verified Shannon membership proof");
  }
  if (ineq.k > 4) throw std::invalid_argument("shannon law supports k <= 4");
  return Law{Kind::kShannon, ineq.k, 0, 0, ineq};
}

std::string Law::id() const {
  switch (kind) {
    case Kind::kPairSwap:
      return "pair_swap";
    case Kind::kChainEasy:
      return "chain_easy";
    case Kind::kSymmetry:
      return "symmetry";
    case Kind::kBasic:
      return "basic(k=" + std::to_string(k) + "," + format_subset(i) + "," + format_subset(j) +
             ")";
    case Kind::kShannon:
      return "shannon(" + format_inequality(inequality) + ")";
  }
  return "?";
}

std::string LawGrid::id() const {
  std::string out = "n" + std::to_string(n) + "-s";
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (i) out += '_';
    out += std::to_string(s_grid[i]);
  }
  return out + "-cap" + std::to_string(cap);
}

const char* point_status_name(LawPoint::Status s) {
  switch (s) {
    case LawPoint::Status::kResolved:
      return "resolved";
    case LawPoint::Status::kVacuous:
      return "vacuous";
    case LawPoint::Status::kNotFound:
      return "not_found";
    case LawPoint::Status::kViolated:
      return "violated";
  }
  return "?";
}

double LawReport::not_found_fraction() const {
  if (points.empty()) return 0.0;
  return static_cast<double>(vacuous + not_found) / static_cast<double>(points.size());
}

std::string LawReport::to_json(bool with_runtime) const {
  nlohmann::ordered_json j;
  j["law"] = law;
  j["grid"] = {{"n", grid.n}, {"s_grid", grid.s_grid}, {"cap", grid.cap}};
  j["interpreter"] = interpreter;
  j["c"] = c ? nlohmann::ordered_json(*c) : nlohmann::ordered_json(nullptr);
  j["points"] = points.size();
  j["resolved"] = resolved;
  j["vacuous"] = vacuous;
  j["not_found"] = not_found;
  j["violated"] = violated;
  j["not_found_fraction"] = not_found_fraction();
  auto list = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    if (p.status != LawPoint::Status::kViolated) continue;
    std::vector<std::string> strs;
    for (const auto& x : p.strings) strs.push_back(x.str());
    list.push_back({{"strings", strs}, {"s", p.s}});
  }
  j["violations"] = list;
  j["caveat"] = kScaleCaveat;
  j["note"] = "constants are relative to the reference interpreter " + interpreter;
  if (with_runtime) j["seconds"] = seconds;
  return j.dump(2) + "\n";
}

std::string LawReport::to_csv() const {
  std::ostringstream out;
  out << "strings,s,status,c\n";
  for (const auto& p : points) {
    out << join_strings(p.strings, ' ') << ',' << p.s << ',' << point_status_name(p.status)
        << ',';
    if (p.status == LawPoint::Status::kResolved) out << p.c;
    out << '\n';
  }
  return out.str();
}

std::vector<std::vector<BitString>> all_tuples(unsigned k, std::size_t n) {
  std::vector<BitString> strings;
  for (std::size_t len = 0; len <= n; ++len) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
      strings.push_back(BitString::from_uint(v, len));
    }
  }
  std::vector<std::vector<BitString>> out{{}};
  for (unsigned i = 0; i < k; ++i) {
    std::vector<std::vector<BitString>> next;
    for (const auto& prefix : out) {
      for (const auto& s : strings) {
        next.push_back(prefix);
        next.back().push_back(s);
      }
    }
    out = std::move(next);
  }
  return out;
}

LawReport verify_law(const Law& law, const LawGrid& grid, KsOracle& oracle, unsigned workers) {
  check_grid(law, grid);
  const auto start = std::chrono::steady_clock::now();
  LawReport report;
  report.law = law.id();
  report.grid = grid;
  report.interpreter = interpreter_tag();
  const auto tuples = all_tuples(law_arity(law), grid.n);
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    for (std::size_t si = 0; si < grid.s_grid.size(); ++si) jobs.emplace_back(t, si);
  }
  report.points.resize(jobs.size());
  workers = std::max(1u, workers);
  auto work = [&](std::size_t w) {
    for (std::size_t q = w; q < jobs.size(); q += workers) {
      const auto [t, si] = jobs[q];
      report.points[q] = solve_point(law, tuples[t], grid.s_grid[si], grid.cap, oracle);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  std::uint32_t c = 0;
  for (const auto& p : report.points) {
    switch (p.status) {
      case LawPoint::Status::kResolved:
        ++report.resolved;
        c = std::max(c, p.c);
        break;
      case LawPoint::Status::kVacuous:
        ++report.vacuous;
        break;
      case LawPoint::Status::kNotFound:
        ++report.not_found;
        break;
      case LawPoint::Status::kViolated:
        ++report.violated;
        break;
    }
  }
  if (report.violated == 0) report.c = c;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<LawPoint> check_law(const Law& law, const LawGrid& grid, std::uint32_t c,
                                KsOracle& oracle) {
  check_grid(law, grid);
  std::vector<LawPoint> bad;
  for (const auto& xs : all_tuples(law_arity(law), grid.n)) {
    for (std::size_t s : grid.s_grid) {
      const Instance in = instantiate(law, xs, s);
      PointSolver solver(in, s, grid.cap, oracle);
      if (!solver.rhs_found()) continue;
      auto h = solver.holds(c);
      if (h && !*h) {
        LawPoint p;
        p.strings = xs;
        p.s = s;
        p.status = LawPoint::Status::kViolated;
        bad.push_back(std::move(p));
      }
    }
  }
  return bad;
}

std::vector<BitString> stage_members(const BitString& x, std::size_t m, std::size_t n,
                                     std::size_t s, KsOracle& oracle) {
  std::vector<BitString> out;
  const BitString empty;
  for (std::size_t len = 0; len <= n; ++len) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
      BitString y = BitString::from_uint(v, len);
      const BitString pair = encode_pair(x, y);
      const bool now = oracle.ks(pair, empty, s, m).found();
      const bool before = s > 0 && oracle.ks(pair, empty, s - 1, m).found();
      if (now && !before) out.push_back(std::move(y));
    }
  }
  return out;
}

std::vector<BitString> staged_prefix(const BitString& x, std::size_t m, std::size_t n,
                                     std::size_t s, KsOracle& oracle) {
  std::vector<BitString> out;
  for (std::size_t stage = 1; stage <= s; ++stage) {
    for (auto& y : stage_members(x, m, n, stage, oracle)) out.push_back(std::move(y));
  }
  return out;
}

StageOrdinal staged_enumeration(const BitString& x, std::size_t m, std::size_t n,
                                const BitString& target, KsOracle& oracle,
                                std::size_t stage_cap) {
  if (target.size() > n) throw std::invalid_argument("target longer than n");
  StageOrdinal result;
  result.x = x;
  result.target = target;
  result.m = m;
  std::uint64_t count = 0;
  for (std::size_t s = 1; s <= stage_cap; ++s) {
    const auto stage = stage_members(x, m, n, s, oracle);
    for (std::size_t i = 0; i < stage.size(); ++i) {
      if (stage[i] == target) {
        result.ordinal = count + i;
        result.s_hit = s;
        result.enumerated_through_hit = count + stage.size();
        return result;
      }
    }
    count += stage.size();
  }
  throw std::domain_error("target never qualifies within " + std::to_string(stage_cap) +
                          " stages (" + std::to_string(count) + " pairs enumerated)");
}

bool TypicalSet::contains(const std::vector<BitString>& xs) const {
  return std::find(members.begin(), members.end(), xs) != members.end();
}

std::string TypicalSet::gap_report() const {
  const unsigned k = static_cast<unsigned>(base.size());
  std::vector<BitString> alphabet;
  for (std::size_t len = 0; len <= n; ++len) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
      alphabet.push_back(BitString::from_uint(v, len));
    }
  }
  std::vector<std::vector<unsigned>> support;
  for (const auto& t : members) {
    std::vector<unsigned> sym;
    for (const auto& s : t) {
      sym.push_back(static_cast<unsigned>(
          std::find(alphabet.begin(), alphabet.end(), s) - alphabet.begin()));
    }
    support.push_back(std::move(sym));
  }
  const EntropyVector h = entropy_vector(JointDistribution::uniform(k, support));
  std::ostringstream out;
  out << "# base " << join_strings(base, ' ') << " u " << u << " u* " << u_star << " n " << n
      << " cap " << cap << " members " << members.size() << "\n";
  out << "subset,entropy_bits,ks_u,gap\n";
  char buf[64];
  for (SubsetMask m = 1; m <= full_mask(k); ++m) {
    const ComplexityResult& r = profile.entries.at({m, 0});
    out << '"' << format_subset(m) << "\",";
    std::snprintf(buf, sizeof buf, "%.6f", h[m]);
    out << buf << ',';
    if (r.found()) {
      std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(*r.value) - h[m]);
      out << *r.value << ',' << buf << '\n';
    } else {
      out << "nf,\n";
    }
  }
  return out.str();
}

TypicalSet typical_set(const std::vector<BitString>& xs, std::size_t u, std::size_t n,
                       std::size_t cap, KsOracle& oracle) {
  if (xs.empty() || xs.size() > 2 || n > 2) {
    throw std::invalid_argument("typical_set guard: k <= 2 and n <= 2");
  }
  for (const auto& x : xs) {
    if (x.size() > n) throw std::invalid_argument("typical_set: base string longer than n");
  }
  TypicalSet set;
  set.base = xs;
  set.u = u;
  set.u_star = proxy_bound(u);
  set.n = n;
  set.cap = cap;
  set.profile = complexity_profile(xs, u, cap, oracle);
  const auto base_values = set.profile.values();
  for (const auto& cand : all_tuples(static_cast<unsigned>(xs.size()), n)) {
    const auto values = complexity_profile(cand, set.u_star, cap, oracle).values();
    bool dominated = true;
    for (std::size_t i = 0; i < values.size() && dominated; ++i) {
      if (!base_values[i]) continue;  // +inf bounds everything
      dominated = values[i] && *values[i] <= *base_values[i];
    }
    if (dominated) set.members.push_back(cand);
  }
  return set;
}

std::size_t find_stable_level(const std::vector<std::vector<std::uint64_t>>& levels) {
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    if (levels[i + 1].size() != levels[i].size()) {
      throw std::invalid_argument("levels differ in dimension");
    }
    for (std::size_t d = 0; d < levels[i].size(); ++d) {
      if (levels[i + 1][d] > levels[i][d]) {
        throw std::invalid_argument("levels must be coordinatewise nonincreasing");
      }
    }
  }
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    if (levels[i] == levels[i + 1]) return i;
  }
  throw std::domain_error("no two adjacent levels are equal");
}

double iterate_f(double s, double c, double k, std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) s = s + c * std::log2(s) + k;
  return s;
}

double lemma_bound(double s, double k, double n, double c1, double c2) {
  return s + n * std::log2(s) + c1 * (k + 1) * (n + c2) * std::log(n + c2);
}

LemmaGrid LemmaGrid::standard() {
  LemmaGrid g;
  for (double s = 1; s < 1e6; s *= 2) g.s_values.push_back(s);
  g.s_values.push_back(1e6);
  for (int k = 0; k <= 100; ++k) g.k_values.push_back(k);
  for (std::uint64_t n = 1; n <= 100; ++n) g.n_values.push_back(n);
  return g;
}

LemmaFit fit_lemma_constants(const LemmaGrid& grid, int limit) {
  const auto start = std::chrono::steady_clock::now();
  LemmaFit fit;
  fit.points = grid.size();
  // iterate_f for every n at once, one (s, k) chain at a time.
  std::vector<double> lhs;
  lhs.reserve(grid.size());
  std::uint64_t n_max = 0;
  for (auto n : grid.n_values) n_max = std::max(n_max, n);
  std::vector<double> chain(n_max + 1);
  for (double s : grid.s_values) {
    for (double k : grid.k_values) {
      chain[0] = s;
      for (std::uint64_t i = 1; i <= n_max; ++i) chain[i] = iterate_f(chain[i - 1], 1, k, 1);
      for (auto n : grid.n_values) lhs.push_back(chain[n]);
    }
  }
  for (int c1 = 1; c1 <= limit && !fit.constants; ++c1) {
    for (int c2 = 1; c2 <= limit && !fit.constants; ++c2) {
      bool ok = true;
      std::size_t idx = 0;
      for (double s : grid.s_values) {
        for (double k : grid.k_values) {
          for (auto n : grid.n_values) {
            if (ok && lhs[idx] > lemma_bound(s, k, static_cast<double>(n), c1, c2)) ok = false;
            ++idx;
          }
        }
      }
      if (ok) fit.constants = std::make_pair(c1, c2);
    }
  }
  fit.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return fit;
}

std::vector<MutualInfoPoint> mutual_info_profile(const BitString& a, const BitString& b,
                                                 const std::vector<std::size_t>& s_grid,
                                                 std::size_t cap, KsOracle& oracle) {
  if (a.size() > 3 || b.size() > 3) throw std::invalid_argument("mutual info needs |a|,|b| <= 3");
  std::vector<MutualInfoPoint> out;
  for (std::size_t s : s_grid) {
    MutualInfoPoint p;
    p.s = s;
    ComplexityResult plain = oracle.ks(a, BitString(), s, cap);
    ComplexityResult cond = oracle.ks(a, b, s, cap);
    if (plain.found() && cond.found()) {
      p.value = static_cast<long long>(*plain.value) - static_cast<long long>(*cond.value);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace kslab
