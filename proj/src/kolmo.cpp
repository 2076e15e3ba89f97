#include "kslab/kolmo.h"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "kslab/halting.h"
#include "kslab/library.h"

namespace kslab {

namespace {

enum class Pair { kZero, kOne, kSeparator, kBad };

Pair read_pair(const BitString& z, std::size_t i) {
  const int a = z[i];
  const int b = z[i + 1];
  if (a == b) return a ? Pair::kOne : Pair::kZero;
  return a == 0 ? Pair::kSeparator : Pair::kBad;
}

// Splits z = doubled(a) 01 b.
std::optional<std::pair<BitString, BitString>> split_doubled(const BitString& z) {
  BitString head;
  for (std::size_t i = 0; i + 1 < z.size(); i += 2) {
    switch (read_pair(z, i)) {
      case Pair::kZero:
        head.push_back(0);
        break;
      case Pair::kOne:
        head.push_back(1);
        break;
      case Pair::kSeparator:
        return std::make_pair(std::move(head), z.substr(i + 2));
      case Pair::kBad:
        return std::nullopt;
    }
  }
  return std::nullopt;
}

void check_cap(std::size_t cap) {
  if (cap > kMaxCap) {
    throw std::invalid_argument("program-length cap " + std::to_string(cap) +
                                " exceeds the exhaustive-search guard of " +
                                std::to_string(kMaxCap));
  }
}

unsigned worker_count(unsigned requested) { return std::max(1u, requested); }

// Contiguous block [begin, end) of the 2^len programs of length len.
struct Block {
  std::size_t len;
  std::uint64_t begin;
  std::uint64_t end;
};

std::vector<Block> split_length(std::size_t len, unsigned workers) {
  const std::uint64_t total = std::uint64_t{1} << len;
  const std::uint64_t parts = std::min<std::uint64_t>(workers, total);
  std::vector<Block> blocks;
  for (std::uint64_t w = 0; w < parts; ++w) {
    blocks.push_back({len, total * w / parts, total * (w + 1) / parts});
  }
  return blocks;
}

template <typename Fn>
void run_parallel(std::size_t jobs, unsigned workers, Fn&& fn) {
  if (workers <= 1 || jobs <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back([&fn, j] { fn(j); });
  for (auto& t : pool) t.join();
}

}  // namespace

BitString encode_pair(const BitString& x, const BitString& y) {
  return x.doubled() + BitString::parse("01") + y;
}

std::optional<std::pair<BitString, BitString>> decode_pair(const BitString& z) {
  return split_doubled(z);
}

BitString encode_tuple(const std::vector<BitString>& xs) {
  if (xs.empty()) throw std::invalid_argument("encode_tuple needs at least one string");
  BitString acc = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) acc = encode_pair(acc, xs[i]);
  return acc;
}

std::optional<std::vector<BitString>> decode_tuple(const BitString& z, std::size_t k) {
  if (k == 0) return std::nullopt;
  std::vector<BitString> out(k);
  BitString rest = z;
  for (std::size_t i = k - 1; i > 0; --i) {
    auto parts = decode_pair(rest);
    if (!parts) return std::nullopt;
    out[i] = std::move(parts->second);
    rest = std::move(parts->first);
  }
  out[0] = std::move(rest);
  return out;
}

BitString tuple_part(const std::vector<BitString>& xs, SubsetMask mask) {
  if (mask == 0) return BitString();
  std::vector<BitString> picked;
  for (unsigned i : subset_elements(mask)) {
    if (i > xs.size()) throw std::out_of_range("subset exceeds tuple arity");
    picked.push_back(xs[i - 1]);
  }
  return encode_tuple(picked);
}

const std::string& interpreter_tag() {
  static const std::string tag = "ksv1-lib10-c" + std::to_string(kSimOverhead);
  return tag;
}

std::optional<ReferenceProgram> ReferenceProgram::parse(const BitString& raw) {
  auto parts = split_doubled(raw);
  if (!parts) return std::nullopt;
  auto machine = decode_description(parts->first);
  if (!machine) return std::nullopt;
  ReferenceProgram prog;
  prog.raw = raw;
  prog.description = std::move(parts->first);
  prog.payload = std::move(parts->second);
  prog.machine = std::move(*machine);
  return prog;
}

Decoded reference_decode(const ReferenceProgram& prog, const BitString& x, std::size_t s) {
  Decoded d;
  d.status = Decoded::Status::kRunFailure;
  const std::size_t overhead = 2 * prog.description.size() + kSimOverhead;
  if (s < overhead) return d;
  const std::size_t bound = s - overhead;
  RunResult r =
      run(prog.machine, prog.payload, x, bound, config_count(prog.machine, prog.payload, x, bound));
  if (r.verdict != Verdict::kHalted) return d;
  d.status = Decoded::Status::kOk;
  d.output = std::move(r.output);
  d.space_required = r.max_space + overhead;
  return d;
}

Decoded reference_decode(const BitString& raw, const BitString& x, std::size_t s) {
  auto prog = ReferenceProgram::parse(raw);
  if (!prog) return {};
  return reference_decode(*prog, x, s);
}

ComplexityResult ks(const BitString& y, const BitString& x, std::size_t s, std::size_t cap,
                    unsigned workers) {
  check_cap(cap);
  workers = worker_count(workers);
  ComplexityResult result;
  result.s = s;
  result.cap = cap;
  result.target = y;
  result.condition = x;
  for (std::size_t len = 0; len <= cap; ++len) {
    const auto blocks = split_length(len, workers);
    std::vector<std::optional<BitString>> hits(blocks.size());
    run_parallel(blocks.size(), workers, [&](std::size_t j) {
      for (std::uint64_t v = blocks[j].begin; v < blocks[j].end; ++v) {
        BitString raw = BitString::from_uint(v, len);
        Decoded d = reference_decode(raw, x, s);
        if (d.ok() && d.output == y) {
          hits[j] = std::move(raw);
          return;
        }
      }
    });
    for (auto& h : hits) {
      if (h) {
        result.value = len;
        result.witness = std::move(h);
        return result;
      }
    }
  }
  return result;
}

KsTable::KsTable(BitString x, std::size_t cap, std::size_t s_max, unsigned workers)
    : x_(std::move(x)), cap_(cap), s_max_(s_max) {
  check_cap(cap);
  workers = worker_count(workers);
  using Local = std::unordered_map<BitString, std::vector<Entry>>;
  auto add = [](Local& into, const BitString& y, const BitString& program, std::size_t need) {
    auto& list = into[y];
    if (list.empty() || need < list.back().space_required) list.push_back({program, need});
  };
  for (std::size_t len = 0; len <= cap; ++len) {
    const auto blocks = split_length(len, workers);
    std::vector<Local> local(blocks.size());
    std::vector<std::uint64_t> ran(blocks.size(), 0);
    run_parallel(blocks.size(), workers, [&](std::size_t j) {
      for (std::uint64_t v = blocks[j].begin; v < blocks[j].end; ++v) {
        BitString raw = BitString::from_uint(v, len);
        auto prog = ReferenceProgram::parse(raw);
        if (!prog) continue;
        ++ran[j];
        Decoded d = reference_decode(*prog, x_, s_max_);
        if (d.ok()) add(local[j], d.output, raw, d.space_required);
      }
    });
    // Blocks are in shortlex order, so appending block frontiers in order
    // keeps every list shortlex-sorted with decreasing bounds.
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      programs_run_ += ran[j];
      std::vector<const BitString*> keys;
      for (const auto& kv : local[j]) keys.push_back(&kv.first);
      std::sort(keys.begin(), keys.end(),
                [](const BitString* a, const BitString* b) { return shortlex_less(*a, *b); });
      for (const BitString* key : keys) {
        for (const Entry& e : local[j].at(*key)) add(frontier_, *key, e.program, e.space_required);
      }
    }
  }
}

ComplexityResult KsTable::lookup(const BitString& y, std::size_t s) const {
  if (s > s_max_) throw std::out_of_range("bound above the table's s_max");
  ComplexityResult result;
  result.s = s;
  result.cap = cap_;
  result.target = y;
  result.condition = x_;
  auto it = frontier_.find(y);
  if (it == frontier_.end()) return result;
  for (const Entry& e : it->second) {
    if (e.space_required <= s) {
      result.value = e.program.size();
      result.witness = e.program;
      break;
    }
  }
  return result;
}

std::vector<BitString> KsTable::outputs_within(std::size_t m, std::size_t s) const {
  std::vector<BitString> out;
  for (const auto& [y, list] : frontier_) {
    for (const Entry& e : list) {
      if (e.space_required <= s) {
        if (e.program.size() <= m) out.push_back(y);
        break;
      }
    }
  }
  std::sort(out.begin(), out.end(), shortlex_less);
  return out;
}

KsOracle::KsOracle(std::size_t s_max, unsigned workers) : s_max_(s_max), workers_(workers) {}

const KsTable& KsOracle::table(const BitString& x, std::size_t cap) {
  std::lock_guard<std::mutex> lock(mu_);
  auto& slot = tables_[{x, cap}];
  if (!slot) slot = std::make_unique<KsTable>(x, cap, s_max_, workers_);
  return *slot;
}

ComplexityResult KsOracle::ks(const BitString& y, const BitString& x, std::size_t s,
                              std::size_t cap) {
  if (s > s_max_) return kslab::ks(y, x, s, cap, workers_);
  return table(x, cap).lookup(y, s);
}

std::vector<std::optional<std::size_t>> ComplexityProfile::values() const {
  std::vector<std::optional<std::size_t>> out;
  for (const auto& [key, r] : entries) out.push_back(r.value);
  return out;
}

ComplexityProfile complexity_profile(const std::vector<BitString>& xs, std::size_t s,
                                     std::size_t cap, KsOracle& oracle) {
  if (xs.empty() || xs.size() > 4) {
    throw std::invalid_argument("complexity_profile supports 1 to 4 strings");
  }
  ComplexityProfile profile;
  profile.xs = xs;
  profile.s = s;
  profile.cap = cap;
  const SubsetMask full = full_mask(static_cast<unsigned>(xs.size()));
  for (SubsetMask i = 1; i <= full; ++i) {
    const SubsetMask rest = full & ~i;
    // Every subset of rest, the empty one included.
    for (SubsetMask j = rest;; j = (j - 1) & rest) {
      profile.entries[{i, j}] = oracle.ks(tuple_part(xs, i), tuple_part(xs, j), s, cap);
      if (j == 0) break;
    }
  }
  return profile;
}

}  // namespace kslab
