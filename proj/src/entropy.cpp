#include "kslab/entropy.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kslab {

namespace {

using boost::multiprecision::cpp_int;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

cpp_int parse_integer(std::string_view text, bool allow_sign) {
  if (text.empty()) throw std::invalid_argument("empty number");
  bool neg = false;
  if (allow_sign && (text.front() == '-' || text.front() == '+')) {
    neg = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) throw std::invalid_argument("sign without digits");
  cpp_int v = 0;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("bad digit in number: " + std::string(text));
    }
    v = v * 10 + (c - '0');
  }
  return neg ? cpp_int(-v) : v;
}

void check_arity(unsigned k) {
  if (k == 0 || k > kMaxEntropyArity) {
    throw std::invalid_argument("arity must be between 1 and " +
                                std::to_string(kMaxEntropyArity));
  }
}

SubsetMask project(const std::vector<unsigned>& tuple, SubsetMask m, std::vector<unsigned>& out) {
  out.clear();
  for (unsigned i = 0; i < tuple.size(); ++i) {
    if (m & (SubsetMask{1} << i)) out.push_back(tuple[i]);
  }
  return m;
}

// Dense exact tableau for the phase-one problem
//   min sum(a) subject to A' w + a = b', w, a >= 0,
// where A' and b' are A and b with rows negated so that b' >= 0.
class PhaseOne {
 public:
  PhaseOne(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b)
      : rows_(a.size()), cols_(a.empty() ? 0 : a[0].size()), sign_(rows_, 1) {
    t_.assign(rows_, std::vector<Rational>(cols_ + rows_ + 1));
    basis_.resize(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (b[r] < 0) sign_[r] = -1;
      for (std::size_t j = 0; j < cols_; ++j) t_[r][j] = sign_[r] * a[r][j];
      t_[r][cols_ + r] = 1;
      t_[r][cols_ + rows_] = sign_[r] * b[r];
      basis_[r] = cols_ + r;
    }
  }

  void solve() {
    const std::size_t total = cols_ + rows_;
    for (;;) {
      // Bland: lowest-index column with negative reduced cost.
      std::size_t enter = total;
      for (std::size_t j = 0; j < total && enter == total; ++j) {
        if (is_basic(j)) continue;
        Rational d = cost(j);
        for (std::size_t r = 0; r < rows_; ++r) {
          if (cost(basis_[r]) != 0 && t_[r][j] != 0) d -= t_[r][j];
        }
        if (d < 0) enter = j;
      }
      if (enter == total) return;
      std::size_t leave = rows_;
      Rational best;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (t_[r][enter] <= 0) continue;
        Rational ratio = t_[r][total] / t_[r][enter];
        if (leave == rows_ || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      // Phase one is bounded below by zero, so some row always limits.
      pivot(leave, enter);
    }
  }

  Rational objective() const {
    Rational v = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (cost(basis_[r]) != 0) v += t_[r][cols_ + rows_];
    }
    return v;
  }

  std::vector<Rational> primal() const {
    std::vector<Rational> w(cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < cols_) w[basis_[r]] = t_[r][cols_ + rows_];
    }
    return w;
  }

  // y = c_B B^{-1}, read off the artificial columns, with the row flips
  // undone.
  std::vector<Rational> unflipped_dual() const {
    std::vector<Rational> y(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      Rational v = 0;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (cost(basis_[r]) != 0) v += t_[r][cols_ + i];
      }
      y[i] = sign_[i] * v;
    }
    return y;
  }

 private:
  Rational cost(std::size_t j) const { return j >= cols_ ? 1 : 0; }

  bool is_basic(std::size_t j) const {
    return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
  }

  void pivot(std::size_t row, std::size_t col) {
    const Rational p = t_[row][col];
    for (auto& v : t_[row]) v /= p;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == row || t_[r][col] == 0) continue;
      const Rational f = t_[r][col];
      for (std::size_t j = 0; j < t_[r].size(); ++j) {
        if (t_[row][j] != 0) t_[r][j] -= f * t_[row][j];
      }
    }
    basis_[row] = col;
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<int> sign_;
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Rational parse_rational(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, true));
  cpp_int num = parse_integer(trim(text.substr(0, slash)), true);
  cpp_int den = parse_integer(trim(text.substr(slash + 1)), false);
  if (den == 0) throw std::invalid_argument("zero denominator");
  return Rational(num, den);
}

std::string format_rational(const Rational& r) { return r.str(); }

void JointDistribution::validate() const {
  check_arity(k);
  if (alphabet.size() != k) throw std::invalid_argument("alphabet size list must have k entries");
  Rational total = 0;
  for (const auto& [tuple, w] : weights) {
    if (tuple.size() != k) throw std::invalid_argument("tuple arity mismatch");
    for (unsigned i = 0; i < k; ++i) {
      if (tuple[i] >= alphabet[i]) throw std::invalid_argument("symbol outside alphabet");
    }
    if (w < 0) throw std::invalid_argument("negative weight");
    total += w;
  }
  if (total != 1) throw std::invalid_argument("weights sum to " + total.str() + ", not 1");
}

JointDistribution JointDistribution::uniform(unsigned k,
                                             const std::vector<std::vector<unsigned>>& support) {
  if (support.empty()) throw std::invalid_argument("empty support");
  JointDistribution d;
  d.k = k;
  d.alphabet.assign(k, 1);
  const Rational w(1, static_cast<long>(support.size()));
  for (const auto& t : support) {
    if (t.size() != k) throw std::invalid_argument("tuple arity mismatch");
    for (unsigned i = 0; i < k; ++i) d.alphabet[i] = std::max(d.alphabet[i], t[i] + 1);
    d.weights[t] += w;
  }
  d.validate();
  return d;
}

JointDistribution parse_distribution(std::string_view text) {
  JointDistribution d;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      auto comma = body.find(',', start);
      fields.push_back(trim(body.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    auto where = [&] { return "line " + std::to_string(lineno) + ": "; };
    if (fields.size() < 2) throw std::invalid_argument(where() + "need symbols and a weight");
    const unsigned k = static_cast<unsigned>(fields.size() - 1);
    if (d.k == 0) {
      check_arity(k);
      d.k = k;
      d.alphabet.assign(k, 1);
    } else if (k != d.k) {
      throw std::invalid_argument(where() + "inconsistent arity");
    }
    std::vector<unsigned> tuple;
    for (unsigned i = 0; i < k; ++i) {
      cpp_int v = parse_integer(fields[i], false);
      if (v > 1000000) throw std::invalid_argument(where() + "symbol too large");
      tuple.push_back(v.convert_to<unsigned>());
      d.alphabet[i] = std::max(d.alphabet[i], tuple.back() + 1);
    }
    try {
      d.weights[tuple] += parse_rational(fields.back());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where() + e.what());
    }
  }
  d.validate();
  return d;
}

EntropyVector entropy_vector(const JointDistribution& d) {
  d.validate();
  EntropyVector v;
  v.k = d.k;
  const SubsetMask full = full_mask(d.k);
  v.coords.assign(full, 0.0);
  std::vector<unsigned> key;
  for (SubsetMask m = 1; m <= full; ++m) {
    std::map<std::vector<unsigned>, Rational> marginal;
    for (const auto& [tuple, w] : d.weights) {
      project(tuple, m, key);
      marginal[key] += w;
    }
    double h = 0.0;
    for (const auto& [sym, w] : marginal) {
      if (w == 0) continue;
      const double p = w.convert_to<double>();
      h -= p * std::log2(p);
    }
    v.coords[m - 1] = h;
  }
  return v;
}

void LinearInequality::add(SubsetMask m, const Rational& c) {
  if (m == 0 || c == 0) return;
  Rational& slot = coeffs[m];
  slot += c;
  if (slot == 0) coeffs.erase(m);
}

LinearInequality parse_inequality(std::string_view text) {
  const auto semi = text.find(';');
  if (semi == std::string_view::npos) throw std::invalid_argument("expected 'k=<n>;' prefix");
  std::string_view head = trim(text.substr(0, semi));
  if (head.size() < 3 || head.substr(0, 2) != "k=") {
    throw std::invalid_argument("expected 'k=<n>;' prefix");
  }
  LinearInequality ineq;
  cpp_int k = parse_integer(trim(head.substr(2)), false);
  if (k > kMaxEntropyArity) throw std::invalid_argument("arity too large");
  ineq.k = k.convert_to<unsigned>();
  check_arity(ineq.k);
  std::string_view rest = text.substr(semi + 1);
  std::size_t i = 0;
  while (true) {
    while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
    if (i >= rest.size()) break;
    const auto close = rest.find('}', i);
    if (rest[i] != '{' || close == std::string_view::npos) {
      throw std::invalid_argument("expected '{subset}:coefficient'");
    }
    SubsetMask m = parse_subset(rest.substr(i, close - i + 1));
    if (m == 0 || m > full_mask(ineq.k)) throw std::invalid_argument("subset outside {1..k}");
    i = close + 1;
    if (i >= rest.size() || rest[i] != ':') throw std::invalid_argument("expected ':' after subset");
    ++i;
    std::size_t end = i;
    while (end < rest.size() && !std::isspace(static_cast<unsigned char>(rest[end]))) ++end;
    ineq.add(m, parse_rational(rest.substr(i, end - i)));
    i = end;
  }
  return ineq;
}

std::string format_inequality(const LinearInequality& ineq) {
  std::string out = "k=" + std::to_string(ineq.k) + ";";
  // Subsets by size, then by mask, for a stable human-readable order.
  std::vector<SubsetMask> keys;
  for (const auto& [m, c] : ineq.coeffs) keys.push_back(m);
  std::stable_sort(keys.begin(), keys.end(), [](SubsetMask a, SubsetMask b) {
    return subset_size(a) != subset_size(b) ? subset_size(a) < subset_size(b) : a < b;
  });
  for (SubsetMask m : keys) out += " " + format_subset(m) + ":" + ineq.coeffs.at(m).str();
  return out;
}

LinearInequality basic_inequality(unsigned k, SubsetMask i, SubsetMask j) {
  check_arity(k);
  if (i == 0 || j == 0 || i > full_mask(k) || j > full_mask(k)) {
    throw std::invalid_argument("basic inequality needs nonempty subsets of {1..k}");
  }
  LinearInequality ineq;
  ineq.k = k;
  ineq.add(i, 1);
  ineq.add(j, 1);
  ineq.add(i | j, -1);
  ineq.add(i & j, -1);
  return ineq;
}

std::vector<LinearInequality> elemental_inequalities(unsigned k) {
  check_arity(k);
  const SubsetMask full = full_mask(k);
  std::vector<LinearInequality> out;
  auto push_unique = [&](LinearInequality e) {
    if (e.is_zero()) return;
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(std::move(e));
  };
  for (unsigned i = 1; i <= k; ++i) {
    LinearInequality e;
    e.k = k;
    e.add(full, 1);
    e.add(full & ~singleton(i), -1);
    push_unique(std::move(e));
  }
  for (unsigned i = 1; i <= k; ++i) {
    for (unsigned j = i + 1; j <= k; ++j) {
      const SubsetMask rest = full & ~singleton(i) & ~singleton(j);
      // Ascending enumeration of the subsets of rest.
      for (SubsetMask sub = 0;; sub = (sub - rest) & rest) {
        LinearInequality e;
        e.k = k;
        e.add(sub | singleton(i), 1);
        e.add(sub | singleton(j), 1);
        e.add(sub | singleton(i) | singleton(j), -1);
        e.add(sub, -1);
        push_unique(std::move(e));
        if (sub == rest) break;
      }
    }
  }
  return out;
}

double evaluate(const LinearInequality& ineq, const EntropyVector& v) {
  if (ineq.k != v.k) throw std::invalid_argument("dimension mismatch");
  double total = 0.0;
  for (const auto& [m, c] : ineq.coeffs) total += c.convert_to<double>() * v[m];
  return total;
}

Rational evaluate(const LinearInequality& ineq, const std::vector<Rational>& v) {
  if (v.size() != full_mask(ineq.k)) throw std::invalid_argument("dimension mismatch");
  Rational total = 0;
  for (const auto& [m, c] : ineq.coeffs) total += c * v[m - 1];
  return total;
}

ConeDecision is_shannon(const LinearInequality& ineq) {
  check_arity(ineq.k);
  const auto gens = elemental_inequalities(ineq.k);
  const std::size_t rows = full_mask(ineq.k);
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(gens.size()));
  std::vector<Rational> b(rows);
  for (std::size_t j = 0; j < gens.size(); ++j) {
    for (const auto& [m, c] : gens[j].coeffs) a[m - 1][j] = c;
  }
  for (const auto& [m, c] : ineq.coeffs) b[m - 1] = c;
  PhaseOne lp(a, b);
  lp.solve();
  ConeDecision d;
  if (lp.objective() == 0) {
    d.kind = ConeDecision::Kind::kMember;
    d.weights = lp.primal();
  } else {
    d.kind = ConeDecision::Kind::kNonMember;
    d.witness = lp.unflipped_dual();
    for (auto& v : d.witness) v = -v;
  }
  return d;
}

bool verify_certificate(const LinearInequality& ineq, const ConeDecision& decision) {
  const auto gens = elemental_inequalities(ineq.k);
  if (decision.member()) {
    if (decision.weights.size() != gens.size()) return false;
    LinearInequality sum;
    sum.k = ineq.k;
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (decision.weights[j] < 0) return false;
      for (const auto& [m, c] : gens[j].coeffs) sum.add(m, decision.weights[j] * c);
    }
    return sum == ineq;
  }
  if (decision.witness.size() != full_mask(ineq.k)) return false;
  for (const auto& g : gens) {
    if (evaluate(g, decision.witness) < 0) return false;
  }
  return evaluate(ineq, decision.witness) < 0;
}

}  // namespace kslab
