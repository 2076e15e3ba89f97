#include "kslab/halting.h"

#include <algorithm>
#include <limits>
#include <string>
#include <unordered_set>

namespace kslab {

namespace {

constexpr std::uint8_t kEmpty = 2;

// Projected configuration with each stack packed into a word, top at bit 0.
struct Packed {
  std::uint64_t l = 0;
  std::uint64_t r = 0;
  std::uint32_t state = 0;
  std::uint16_t hp = 0;
  std::uint16_t hx = 0;
  std::uint8_t ll = 0;
  std::uint8_t lr = 0;

  std::uint8_t top_l() const { return ll ? static_cast<std::uint8_t>(l & 1) : kEmpty; }
  std::uint8_t top_r() const { return lr ? static_cast<std::uint8_t>(r & 1) : kEmpty; }
  std::size_t space() const { return std::size_t{ll} + lr; }

  friend bool operator==(const Packed&, const Packed&) = default;
};

struct PackedHash {
  std::size_t operator()(const Packed& c) const noexcept {
    std::uint64_t h = c.l * 0x9e3779b97f4a7c15ULL;
    h ^= (c.r + 0x632be59bd9b4e019ULL) * 0xc2b2ae3d27d4eb4fULL;
    h ^= (std::uint64_t{c.state} << 40) ^ (std::uint64_t{c.hp} << 24) ^
         (std::uint64_t{c.hx} << 8) ^ (std::uint64_t{c.ll} << 56) ^ c.lr;
    h ^= h >> 29;
    return static_cast<std::size_t>(h * 0xbf58476d1ce4e5b9ULL);
  }
};

Packed pack(const Configuration& cfg) {
  Packed c;
  c.state = cfg.state;
  for (std::size_t i = 0; i < cfg.stack_l.size(); ++i) {
    c.l = (c.l << 1) | static_cast<std::uint64_t>(cfg.stack_l[i]);
  }
  for (std::size_t i = 0; i < cfg.stack_r.size(); ++i) {
    c.r = (c.r << 1) | static_cast<std::uint64_t>(cfg.stack_r[i]);
  }
  c.ll = static_cast<std::uint8_t>(cfg.stack_l.size());
  c.lr = static_cast<std::uint8_t>(cfg.stack_r.size());
  c.hp = static_cast<std::uint16_t>(cfg.head_p);
  c.hx = static_cast<std::uint16_t>(cfg.head_x);
  return c;
}

Configuration unpack(const Packed& c) {
  Configuration cfg;
  cfg.state = c.state;
  for (int i = c.ll - 1; i >= 0; --i) cfg.stack_l.push_back((c.l >> i) & 1);
  for (int i = c.lr - 1; i >= 0; --i) cfg.stack_r.push_back((c.r >> i) & 1);
  cfg.head_p = c.hp;
  cfg.head_x = c.hx;
  return cfg;
}

enum class Move { kNext, kHalt, kAbnormal };

// One forward step on a packed configuration.
inline Move forward(const MachineSpec& spec, Packed& c, const BitString& p,
                    const BitString& x) {
  const Instruction& ins =
      spec.at(c.state, static_cast<Top>(c.top_l()), static_cast<Top>(c.top_r()));
  switch (ins.op) {
    case Op::kHalt:
      return Move::kHalt;
    case Op::kPushL:
      c.l = (c.l << 1) | ins.bit;
      ++c.ll;
      break;
    case Op::kPushR:
      c.r = (c.r << 1) | ins.bit;
      ++c.lr;
      break;
    case Op::kPopL:
      if (c.ll == 0) return Move::kAbnormal;
      c.l >>= 1;
      --c.ll;
      break;
    case Op::kPopR:
      if (c.lr == 0) return Move::kAbnormal;
      c.r >>= 1;
      --c.lr;
      break;
    case Op::kWrite:
      break;
    case Op::kReadP:
      if (c.hp >= p.size()) {
        c.state = ins.next[2];
      } else {
        c.state = ins.next[p[c.hp]];
        ++c.hp;
      }
      return Move::kNext;
    case Op::kReadX:
      if (c.hx >= x.size()) {
        c.state = ins.next[2];
      } else {
        c.state = ins.next[x[c.hx]];
        ++c.hx;
      }
      return Move::kNext;
  }
  c.state = ins.next[0];
  return Move::kNext;
}

inline std::uint8_t top_after_pop(std::uint64_t bits, std::uint8_t len) {
  return len > 1 ? static_cast<std::uint8_t>((bits >> 1) & 1) : kEmpty;
}

// Builds the predecessor of `c` that `it` describes, if it exists.
inline bool make_predecessor(const BackwardDecider::Item& it, const Packed& c,
                             const BitString& p, const BitString& x, std::size_t s,
                             Packed& out) {
  switch (it.op) {
    case Op::kPushL:
      if (c.ll == 0 || (c.l & 1) != it.bit) return false;
      if (top_after_pop(c.l, c.ll) != it.top_l || c.top_r() != it.top_r) return false;
      out = c;
      out.l >>= 1;
      --out.ll;
      break;
    case Op::kPushR:
      if (c.lr == 0 || (c.r & 1) != it.bit) return false;
      if (c.top_l() != it.top_l || top_after_pop(c.r, c.lr) != it.top_r) return false;
      out = c;
      out.r >>= 1;
      --out.lr;
      break;
    case Op::kPopL:
      if (c.space() + 1 > s || c.top_r() != it.top_r) return false;
      out = c;
      out.l = (c.l << 1) | it.top_l;
      ++out.ll;
      break;
    case Op::kPopR:
      if (c.space() + 1 > s || c.top_l() != it.top_l) return false;
      out = c;
      out.r = (c.r << 1) | it.top_r;
      ++out.lr;
      break;
    case Op::kWrite:
      if (c.top_l() != it.top_l || c.top_r() != it.top_r) return false;
      out = c;
      break;
    case Op::kReadP:
    case Op::kReadX: {
      if (c.top_l() != it.top_l || c.top_r() != it.top_r) return false;
      const bool on_p = it.op == Op::kReadP;
      const BitString& tape = on_p ? p : x;
      const std::uint16_t head = on_p ? c.hp : c.hx;
      out = c;
      if (it.bit == 2) {
        if (head != tape.size()) return false;
      } else {
        if (head == 0 || tape[head - 1] != it.bit) return false;
        if (on_p) {
          --out.hp;
        } else {
          --out.hx;
        }
      }
      break;
    }
    case Op::kHalt:
      return false;
  }
  out.state = it.from;
  return true;
}

constexpr std::array<Top, 3> kTops = {Top::kZero, Top::kOne, Top::kEmpty};

std::uint8_t sort_bit(Op op, std::uint8_t bit, std::uint8_t l, std::uint8_t r) {
  if (op == Op::kPopL) return l;
  if (op == Op::kPopR) return r;
  return bit;
}

// Tape bits as bytes plus, per head position h, the context digit
// (symbol before h or 2 at the start) * 2 + (h at the end).
struct Tape {
  explicit Tape(const BitString& t) : bits(t.size()), ctx(t.size() + 1) {
    for (std::size_t i = 0; i < t.size(); ++i) bits[i] = static_cast<std::uint8_t>(t[i]);
    for (std::size_t h = 0; h <= t.size(); ++h) {
      ctx[h] = static_cast<std::uint8_t>((h == 0 ? 2 : bits[h - 1]) * 2 + (h == t.size()));
    }
  }
  std::uint8_t context(std::uint16_t h) const { return ctx[h]; }
  std::size_t size() const { return bits.size(); }

  std::vector<std::uint8_t> bits;
  std::vector<std::uint8_t> ctx;
};

struct TargetContext {
  std::uint8_t top_l, top_r;
  std::uint8_t p_before, x_before;  // 2: head at the start
  bool p_end, x_end;

  static TargetContext decode(std::size_t ctx) {
    const std::size_t tops = ctx / 36, pc = ctx / 6 % 6, xc = ctx % 6;
    return {static_cast<std::uint8_t>(tops / 3), static_cast<std::uint8_t>(tops % 3),
            static_cast<std::uint8_t>(pc / 2), static_cast<std::uint8_t>(xc / 2),
            pc % 2 == 1, xc % 2 == 1};
  }
};

// Whether `it` can yield a predecessor of some configuration in context
// tc. What remains open is the bit under a pushed top and the space bound.
bool fits_context(const BackwardDecider::Item& it, const TargetContext& tc) {
  switch (it.op) {
    case Op::kPushL:
      return tc.top_l == it.bit && tc.top_r == it.top_r;
    case Op::kPushR:
      return tc.top_r == it.bit && tc.top_l == it.top_l;
    case Op::kPopL:
      return tc.top_r == it.top_r;
    case Op::kPopR:
      return tc.top_l == it.top_l;
    case Op::kWrite:
      return tc.top_l == it.top_l && tc.top_r == it.top_r;
    case Op::kReadP:
    case Op::kReadX: {
      if (tc.top_l != it.top_l || tc.top_r != it.top_r) return false;
      const bool on_p = it.op == Op::kReadP;
      const std::uint8_t before = on_p ? tc.p_before : tc.x_before;
      const bool at_end = on_p ? tc.p_end : tc.x_end;
      return it.bit == 2 ? at_end : before == it.bit;
    }
    case Op::kHalt:
      return false;
  }
  return false;
}

// Node of the backward search. Each stack is a word holding a sentinel 1
// above its bits (an empty stack is 1), so tops and lengths need no
// separate counters; meta packs state | hp << 32 | hx << 48.
struct Node {
  std::uint64_t l = 1;
  std::uint64_t r = 1;
  std::uint64_t meta = 0;

  static std::uint32_t top(std::uint64_t w) {
    return static_cast<std::uint32_t>((w & 1) + (w == 1));
  }
  std::uint32_t tops() const { return top(l) * 3 + top(r); }
  std::uint32_t state() const { return static_cast<std::uint32_t>(meta); }
  std::uint16_t hp() const { return static_cast<std::uint16_t>(meta >> 32); }
  std::uint16_t hx() const { return static_cast<std::uint16_t>(meta >> 48); }
  std::size_t space() const {
    return static_cast<std::size_t>(126 - __builtin_clzll(l) - __builtin_clzll(r));
  }
  void set_state(std::uint32_t q) { meta = (meta & ~std::uint64_t{0xffffffff}) | q; }
};

constexpr std::uint64_t kHpOne = std::uint64_t{1} << 32;
constexpr std::uint64_t kHxOne = std::uint64_t{1} << 48;

constexpr std::uint8_t kCheckSpace = 1;
constexpr std::uint8_t kCheckTopL = 2;
constexpr std::uint8_t kCheckTopR = 4;

// make_predecessor for an item already known to fit the target's context.
template <typename Compiled>
inline bool invert(const Compiled& it, const Node& c, std::size_t s, Node& out) {
  out.l = ((c.l >> it.l_down) << it.l_up) | it.l_or;
  out.r = ((c.r >> it.r_down) << it.r_up) | it.r_or;
  out.meta = ((c.meta - it.meta_down) & ~std::uint64_t{0xffffffff}) | it.from;
  bool ok = !(it.check & kCheckSpace) || c.space() < s;
  ok &= !(it.check & kCheckTopL) || Node::top(out.l) == it.want_top;
  ok &= !(it.check & kCheckTopR) || Node::top(out.r) == it.want_top;
  return ok;
}

// Forward step for the parent move; the entry is known not to be Halt or
// an abnormal pop, since the configuration has a successor in the tree.
// Returns the read branch (0 for non-reads).
inline std::uint32_t forward(const Instruction& ins, Node& c, const std::uint8_t* p,
                             std::uint16_t p_end, const std::uint8_t* x, std::uint16_t x_end) {
  switch (ins.op) {
    case Op::kPushL:
      c.l = (c.l << 1) | ins.bit;
      break;
    case Op::kPushR:
      c.r = (c.r << 1) | ins.bit;
      break;
    case Op::kPopL:
      c.l >>= 1;
      break;
    case Op::kPopR:
      c.r >>= 1;
      break;
    case Op::kReadP: {
      const std::uint16_t h = c.hp();
      if (h >= p_end) {
        c.set_state(ins.next[2]);
        return 2;
      }
      c.meta += kHpOne;
      c.set_state(ins.next[p[h]]);
      return p[h];
    }
    case Op::kReadX: {
      const std::uint16_t h = c.hx();
      if (h >= x_end) {
        c.set_state(ins.next[2]);
        return 2;
      }
      c.meta += kHxOne;
      c.set_state(ins.next[x[h]]);
      return x[h];
    }
    default:
      break;
  }
  c.set_state(ins.next[0]);
  return 0;
}

template <typename Compiled>
Compiled compile_item(const BackwardDecider::Item& it) {
  Compiled k{};
  k.from = it.from;
  k.entry = it.entry;
  switch (it.op) {
    case Op::kPushL:
      k.l_down = 1;
      k.check = kCheckTopL;
      k.want_top = it.top_l;
      break;
    case Op::kPushR:
      k.r_down = 1;
      k.check = kCheckTopR;
      k.want_top = it.top_r;
      break;
    case Op::kPopL:
      k.l_up = 1;
      k.l_or = it.top_l;
      k.check = kCheckSpace;
      break;
    case Op::kPopR:
      k.r_up = 1;
      k.r_or = it.top_r;
      k.check = kCheckSpace;
      break;
    case Op::kReadP:
      if (it.bit != 2) k.meta_down = kHpOne;
      break;
    case Op::kReadX:
      if (it.bit != 2) k.meta_down = kHxOne;
      break;
    default:
      break;
  }
  return k;
}

void sort_items(std::vector<BackwardDecider::Item>& items) {
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    auto key = [](const BackwardDecider::Item& i) {
      return std::tuple(i.from, static_cast<int>(i.op),
                        sort_bit(i.op, i.bit, i.top_l, i.top_r), i.top_l, i.top_r);
    };
    return key(a) < key(b);
  });
}

}  // namespace

std::uint64_t config_count(const MachineSpec& spec, const BitString& p,
                           const BitString& x, std::size_t s) {
  using u128 = unsigned __int128;
  constexpr u128 kMax = std::numeric_limits<std::uint64_t>::max();
  if (s >= 58) return std::numeric_limits<std::uint64_t>::max();
  // sum_{l=0..s} (l+1) 2^l = s 2^{s+1} + 1
  u128 stacks = static_cast<u128>(s) * (u128{1} << (s + 1)) + 1;
  u128 total = stacks * spec.state_count() * (p.size() + 1) * (x.size() + 1);
  return total > kMax ? std::numeric_limits<std::uint64_t>::max()
                      : static_cast<std::uint64_t>(total);
}

BackwardDecider::BackwardDecider(const MachineSpec& spec)
    : canonical_(canonicalize(spec)),
      final_state_(canonical_.state_count() - 1),
      inverse_(canonical_.state_count()) {
  const std::uint32_t n = canonical_.state_count();
  for (std::uint32_t q = 0; q < n; ++q) {
    for (Top l : kTops) {
      for (Top r : kTops) {
        const Instruction& ins = canonical_.at(q, l, r);
        const auto tl = static_cast<std::uint8_t>(l);
        const auto tr = static_cast<std::uint8_t>(r);
        if (ins.op == Op::kHalt) continue;
        // Pops on an empty stack are abnormal and have no successor.
        if (ins.op == Op::kPopL && l == Top::kEmpty) continue;
        if (ins.op == Op::kPopR && r == Top::kEmpty) continue;
        const std::uint32_t base = (q * 3 + tl) * 3 + tr;
        if (ins.is_read()) {
          for (std::uint8_t b = 0; b < 3; ++b) {
            inverse_[ins.next[b]].push_back({q, tl, tr, ins.op, b, base * 3 + b});
          }
        } else {
          inverse_[ins.next[0]].push_back({q, tl, tr, ins.op, ins.bit, base * 3});
        }
      }
    }
  }
  offsets_.reserve(std::size_t{n} * kContexts + 1);
  for (std::uint32_t target = 0; target < n; ++target) {
    sort_items(inverse_[target]);
    for (std::size_t ctx = 0; ctx < kContexts; ++ctx) {
      offsets_.push_back(static_cast<std::uint32_t>(flat_.size()));
      const TargetContext tc = TargetContext::decode(ctx);
      for (const Item& it : inverse_[target]) {
        if (fits_context(it, tc)) flat_.push_back(compile_item<Compiled>(it));
      }
    }
  }
  offsets_.push_back(static_cast<std::uint32_t>(flat_.size()));
}

HaltVerdict BackwardDecider::decide(const BitString& p, const BitString& x,
                                    std::size_t s) const {
  HaltVerdict verdict;
  if (s > kMaxBackwardSpace) {
    throw std::invalid_argument("backward decider supports space bounds up to " +
                                std::to_string(kMaxBackwardSpace));
  }
  if (p.size() > 0xffff || x.size() > 0xffff) throw std::invalid_argument("tape too long");
  const Tape tp(p);
  const Tape tx(x);
  const std::uint8_t* pb = tp.bits.data();
  const std::uint8_t* xb = tx.bits.data();
  const std::uint8_t* pc = tp.ctx.data();
  const std::uint8_t* xc = tx.ctx.data();
  const std::uint16_t p_end = static_cast<std::uint16_t>(p.size());
  const std::uint16_t x_end = static_cast<std::uint16_t>(x.size());
  const Compiled* items = flat_.data();
  const std::uint32_t* offsets = offsets_.data();
  const std::uint64_t root_meta = final_state_ | (std::uint64_t{p_end} << 32) |
                                  (std::uint64_t{x_end} << 48);
  auto list_index = [&](const Node& c, std::uint32_t tops) {
    return std::size_t{c.state()} * kContexts + tops * 36 + pc[c.hp()] * 6 + xc[c.hx()];
  };
  std::uint32_t peak = 1;
  std::uint64_t visited = 1;

  // Live configurations: cur always; neighbor while probing a child or
  // holding the parent; candidate while probing a sibling.
  Node cur;
  cur.meta = root_meta;
  Node neighbor;
  Node candidate;
  for (;;) {
    bool descended = false;
    {
      const std::size_t i = list_index(cur, cur.tops());
      const Compiled* end = items + offsets[i + 1];
      for (const Compiled* it = items + offsets[i]; it != end; ++it) {
        peak = std::max(peak, 2u);
        if (invert(*it, cur, s, neighbor)) {
          descended = true;
          break;
        }
      }
    }
    if (descended) {
      cur = neighbor;
      ++visited;
      if (cur.meta == 0 && cur.l == 1 && cur.r == 1) {
        verdict.terminates_within_s = true;
        break;
      }
      continue;
    }
    bool found = false;
    while (!(cur.meta == root_meta && cur.l == 1 && cur.r == 1)) {
      neighbor = cur;
      const std::uint32_t cur_index = cur.state() * 9 + cur.tops();
      const std::uint32_t branch =
          forward(canonical_.at(cur.state(), static_cast<Top>(Node::top(cur.l)),
                                static_cast<Top>(Node::top(cur.r))),
                  neighbor, pb, p_end, xb, x_end);
      peak = std::max(peak, 2u);
      const std::uint32_t entry = cur_index * 3 + branch;
      const std::size_t i = list_index(neighbor, neighbor.tops());
      const Compiled* it = items + offsets[i];
      const Compiled* end = items + offsets[i + 1];
      while (it->entry != entry) ++it;
      for (++it; it != end; ++it) {
        peak = 3;
        if (invert(*it, neighbor, s, candidate)) {
          found = true;
          break;
        }
      }
      if (found) break;
      cur = neighbor;
    }
    if (!found) break;
    cur = candidate;
    ++visited;
    if (cur.meta == 0 && cur.l == 1 && cur.r == 1) {
      verdict.terminates_within_s = true;
      break;
    }
  }
  verdict.probe_stats.configurations_visited = visited;
  verdict.probe_stats.peak_live_configurations = peak;
  return verdict;
}

std::vector<Configuration> predecessors(const MachineSpec& canonical,
                                        const BitString& p, const BitString& x,
                                        const Configuration& cfg, std::size_t s) {
  if (s > kMaxBackwardSpace || cfg.space() > s) return {};
  // Only the rules leading into cfg.state matter.
  std::vector<BackwardDecider::Item> items;
  const std::uint32_t n = canonical.state_count();
  for (std::uint32_t q = 0; q < n; ++q) {
    for (Top l : kTops) {
      for (Top r : kTops) {
        const Instruction& ins = canonical.at(q, l, r);
        const auto tl = static_cast<std::uint8_t>(l);
        const auto tr = static_cast<std::uint8_t>(r);
        if (ins.op == Op::kHalt) continue;
        if (ins.op == Op::kPopL && l == Top::kEmpty) continue;
        if (ins.op == Op::kPopR && r == Top::kEmpty) continue;
        if (ins.is_read()) {
          for (std::uint8_t b = 0; b < 3; ++b) {
            if (ins.next[b] == cfg.state) items.push_back({q, tl, tr, ins.op, b, 0});
          }
        } else if (ins.next[0] == cfg.state) {
          items.push_back({q, tl, tr, ins.op, ins.bit, 0});
        }
      }
    }
  }
  sort_items(items);
  const Packed target = pack(cfg);
  std::vector<Configuration> out;
  Packed pred;
  for (const auto& it : items) {
    if (make_predecessor(it, target, p, x, s, pred)) out.push_back(unpack(pred));
  }
  return out;
}

HaltVerdict decide_forward(const MachineSpec& spec, const BitString& p,
                           const BitString& x, std::size_t s) {
  HaltVerdict verdict;
  if (s <= kMaxBackwardSpace) {
    std::unordered_set<Packed, PackedHash> seen;
    Packed c;
    seen.insert(c);
    for (;;) {
      Move m = forward(spec, c, p, x);
      if (m == Move::kHalt) {
        verdict.terminates_within_s = true;
        break;
      }
      if (m == Move::kAbnormal || c.space() > s) break;
      if (!seen.insert(c).second) break;
    }
    verdict.probe_stats.configurations_visited = seen.size();
    verdict.probe_stats.peak_live_configurations =
        static_cast<std::uint32_t>(std::min<std::size_t>(
            seen.size(), std::numeric_limits<std::uint32_t>::max()));
    return verdict;
  }
  // Wide stacks: string keys.
  std::unordered_set<std::string> seen;
  auto key = [](const Configuration& c) {
    return std::to_string(c.state) + ' ' + c.stack_l.str() + ' ' + c.stack_r.str() + ' ' +
           std::to_string(c.head_p) + ' ' + std::to_string(c.head_x);
  };
  Configuration c;
  seen.insert(key(c));
  for (;;) {
    StepOutcome o = step(spec, c, p, x);
    if (o.kind == StepOutcome::Kind::kHalted) {
      verdict.terminates_within_s = true;
      break;
    }
    if (o.kind == StepOutcome::Kind::kAbnormal || o.next.space() > s) break;
    c = std::move(o.next);
    if (!seen.insert(key(c)).second) break;
  }
  verdict.probe_stats.configurations_visited = seen.size();
  verdict.probe_stats.peak_live_configurations = static_cast<std::uint32_t>(
      std::min<std::size_t>(seen.size(), std::numeric_limits<std::uint32_t>::max()));
  return verdict;
}

HaltVerdict decide_counter(const MachineSpec& spec, const BitString& p,
                           const BitString& x, std::size_t s) {
  HaltVerdict verdict;
  const std::uint64_t limit = config_count(spec, p, x, s);
  verdict.probe_stats.peak_live_configurations = 1;
  if (s > kMaxBackwardSpace) {
    RunResult r = run(spec, p, x, s, limit);
    verdict.terminates_within_s = r.verdict == Verdict::kHalted;
    verdict.probe_stats.configurations_visited = r.steps;
    return verdict;
  }
  // Same accounting as run(): executing Halt is a step.
  Packed c;
  std::uint64_t steps = 0;
  while (steps < limit) {
    ++steps;
    Move m = forward(spec, c, p, x);
    if (m == Move::kHalt) {
      verdict.terminates_within_s = true;
      break;
    }
    if (m == Move::kAbnormal || c.space() > s) break;
  }
  verdict.probe_stats.configurations_visited = steps;
  return verdict;
}

}  // namespace kslab
