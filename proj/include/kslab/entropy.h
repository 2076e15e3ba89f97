#ifndef KSLAB_ENTROPY_H_
#define KSLAB_ENTROPY_H_

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kslab/subset.h"

namespace kslab {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr unsigned kMaxEntropyArity = 5;

// Parses "p", "-p" or "p/q"; throws std::invalid_argument.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

struct JointDistribution {
  unsigned k = 0;
  std::vector<unsigned> alphabet;  // per variable
  std::map<std::vector<unsigned>, Rational> weights;

  // Throws std::invalid_argument unless weights are nonnegative, sum to
  // exactly 1 and every tuple fits the alphabet.
  void validate() const;

  static JointDistribution uniform(unsigned k, const std::vector<std::vector<unsigned>>& support);
};

// One line per tuple: "s1,...,sk,weight"; blank lines and '#' comments
// are skipped. Alphabet sizes are inferred.
JointDistribution parse_distribution(std::string_view text);

struct EntropyVector {
  unsigned k = 0;
  std::vector<double> coords;  // coords[mask - 1] = H(X_mask), in bits

  double operator[](SubsetMask m) const { return m ? coords[m - 1] : 0.0; }
};

EntropyVector entropy_vector(const JointDistribution& d);

// sum_I coeffs[I] * v_I >= 0. Only nonzero coefficients are stored.
struct LinearInequality {
  unsigned k = 0;
  std::map<SubsetMask, Rational> coeffs;

  void add(SubsetMask m, const Rational& c);
  bool is_zero() const { return coeffs.empty(); }
  friend bool operator==(const LinearInequality&, const LinearInequality&) = default;
};

// "k=3; {1}:1 {2}:1 {1,2}:-1"
LinearInequality parse_inequality(std::string_view text);
std::string format_inequality(const LinearInequality& ineq);

// H(I) + H(J) - H(I u J) - H(I n J) >= 0, with H(empty) = 0.
LinearInequality basic_inequality(unsigned k, SubsetMask i, SubsetMask j);

// H(N) - H(N - {i}) >= 0 for each i, and
// H(K+i) + H(K+j) - H(K+i+j) - H(K) >= 0 for i < j, K within the rest.
std::vector<LinearInequality> elemental_inequalities(unsigned k);

double evaluate(const LinearInequality& ineq, const EntropyVector& v);
// v[mask - 1] is the coordinate of subset mask.
Rational evaluate(const LinearInequality& ineq, const std::vector<Rational>& v);

struct ConeDecision {
  enum class Kind { kMember, kNonMember };
  Kind kind = Kind::kNonMember;
  // Member: weight per elemental inequality, in elemental_inequalities order.
  std::vector<Rational> weights;
  // NonMember: a cone-separating certificate w (indexed like v above) with
  // g . w >= 0 for every elemental g and ineq . w < 0.
  std::vector<Rational> witness;

  bool member() const { return kind == Kind::kMember; }
};

// Exact decision of membership in the cone spanned by the elemental
// inequalities (phase-one simplex over rationals, Bland's rule).
ConeDecision is_shannon(const LinearInequality& ineq);
// Re-checks either certificate kind exactly.
bool verify_certificate(const LinearInequality& ineq, const ConeDecision& decision);

}  // namespace kslab

#endif  // KSLAB_ENTROPY_H_
