#ifndef KSLAB_KOLMO_H_
#define KSLAB_KOLMO_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kslab/bits.h"
#include "kslab/machine.h"
#include "kslab/subset.h"

namespace kslab {

// x with every bit doubled, then "01", then y.
BitString encode_pair(const BitString& x, const BitString& y);
std::optional<std::pair<BitString, BitString>> decode_pair(const BitString& z);

// Left-nested pairing; a single string encodes as itself.
BitString encode_tuple(const std::vector<BitString>& xs);
std::optional<std::vector<BitString>> decode_tuple(const BitString& z, std::size_t k);

// encode_tuple of the components selected by `mask`, ascending; the empty
// mask gives the empty string.
BitString tuple_part(const std::vector<BitString>& xs, SubsetMask mask);

// Space charged by the interpreter on top of 2|r| for its simulation block.
inline constexpr std::size_t kSimOverhead = 16;
// Largest program-length cap accepted by ks and KsTable.
inline constexpr std::size_t kMaxCap = 26;

// Version tag of the reference interpreter; keys cached results.
const std::string& interpreter_tag();

// raw = doubled(r) 01 p, with r a description accepted by
// decode_description.
struct ReferenceProgram {
  BitString raw;
  BitString description;
  BitString payload;
  MachineSpec machine{1};

  static std::optional<ReferenceProgram> parse(const BitString& raw);
};

struct Decoded {
  enum class Status { kOk, kParseFailure, kRunFailure };
  Status status = Status::kParseFailure;
  BitString output;
  // For kOk: the smallest bound at which this program succeeds.
  std::size_t space_required = 0;

  bool ok() const { return status == Status::kOk; }
};

// Runs M_r on (p, x) with space bound s - 2|r| - kSimOverhead; a run that
// neither halts nor exceeds the bound within config_count steps has
// entered a loop and fails.
Decoded reference_decode(const ReferenceProgram& prog, const BitString& x, std::size_t s);
Decoded reference_decode(const BitString& raw, const BitString& x, std::size_t s);

struct ComplexityResult {
  std::optional<std::size_t> value;  // nullopt: NotFound(cap)
  std::optional<BitString> witness;
  std::size_t s = 0;
  std::size_t cap = 0;
  BitString target;
  BitString condition;

  bool found() const { return value.has_value(); }
  friend bool operator==(const ComplexityResult&, const ComplexityResult&) = default;
};

// Tries every program of length 0..cap in shortlex order. Lengths are
// split into contiguous prefix blocks across `workers` threads; the
// shortlex-least success wins.
ComplexityResult ks(const BitString& y, const BitString& x, std::size_t s, std::size_t cap,
                    unsigned workers = 1);

// Runs every program up to `cap` once against condition x under bound
// s_max and keeps, per output y, the programs that are shortest for some
// bound: a list of (program, required bound) with strictly decreasing
// bounds. Answers ks(y, x, s, cap) exactly for every s <= s_max.
class KsTable {
 public:
  KsTable(BitString x, std::size_t cap, std::size_t s_max, unsigned workers = 1);

  ComplexityResult lookup(const BitString& y, std::size_t s) const;
  // Outputs y with ks(y, x, s, cap) <= m.
  std::vector<BitString> outputs_within(std::size_t m, std::size_t s) const;

  const BitString& condition() const { return x_; }
  std::size_t cap() const { return cap_; }
  std::size_t s_max() const { return s_max_; }
  std::uint64_t programs_run() const { return programs_run_; }

  struct Entry {
    BitString program;
    std::size_t space_required;
  };

 private:
  BitString x_;
  std::size_t cap_;
  std::size_t s_max_;
  std::uint64_t programs_run_ = 0;
  std::unordered_map<BitString, std::vector<Entry>> frontier_;
};

// Thread-safe memo of KsTables keyed by (condition, cap). Bounds above
// s_max fall back to direct enumeration.
class KsOracle {
 public:
  explicit KsOracle(std::size_t s_max = 4096, unsigned workers = 1);

  ComplexityResult ks(const BitString& y, const BitString& x, std::size_t s, std::size_t cap);
  const KsTable& table(const BitString& x, std::size_t cap);
  std::size_t s_max() const { return s_max_; }

 private:
  std::size_t s_max_;
  unsigned workers_;
  std::mutex mu_;
  std::map<std::pair<BitString, std::size_t>, std::unique_ptr<KsTable>> tables_;
};

// KS^s(x_I | x_J) for every nonempty I and every J disjoint from I.
struct ComplexityProfile {
  std::vector<BitString> xs;
  std::size_t s = 0;
  std::size_t cap = 0;
  std::map<std::pair<SubsetMask, SubsetMask>, ComplexityResult> entries;

  // Values in entry order; NotFound becomes nullopt.
  std::vector<std::optional<std::size_t>> values() const;
};

ComplexityProfile complexity_profile(const std::vector<BitString>& xs, std::size_t s,
                                     std::size_t cap, KsOracle& oracle);

}  // namespace kslab

#endif  // KSLAB_KOLMO_H_
