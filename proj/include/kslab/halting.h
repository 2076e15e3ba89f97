#ifndef KSLAB_HALTING_H_
#define KSLAB_HALTING_H_

#include <cstdint>
#include <vector>

#include "kslab/bits.h"
#include "kslab/machine.h"

namespace kslab {

struct ProbeStats {
  std::uint64_t configurations_visited = 0;
  std::uint32_t peak_live_configurations = 0;
};

struct HaltVerdict {
  bool terminates_within_s = false;
  ProbeStats probe_stats;
};

// The backward decider packs each stack into one machine word.
inline constexpr std::size_t kMaxBackwardSpace = 60;

// Number of projected configurations with space <= s:
// |Q| (|p|+1) (|x|+1) sum_{l=0..s} (l+1) 2^l. Saturates at UINT64_MAX.
std::uint64_t config_count(const MachineSpec& spec, const BitString& p,
                           const BitString& x, std::size_t s);

// Configurations C' with space(C') <= s and step(C') = cfg, ordered by
// source state, then instruction kind, then pushed/popped/read bit.
// `canonical` must come from canonicalize().
std::vector<Configuration> predecessors(const MachineSpec& canonical,
                                        const BitString& p, const BitString& x,
                                        const Configuration& cfg, std::size_t s);

// Sipser-style decider. Traverses the tree of configurations leading to the
// unique final configuration of the canonicalized machine, depth first and
// without a stack: moves are parent (one forward step), first child and next
// sibling (both via predecessor inversion). At most three configurations
// are held at any time. Requires s <= kMaxBackwardSpace.
class BackwardDecider {
 public:
  explicit BackwardDecider(const MachineSpec& spec);
  HaltVerdict decide(const BitString& p, const BitString& x, std::size_t s) const;
  const MachineSpec& canonical() const { return canonical_; }

  struct Item {
    std::uint32_t from;
    std::uint8_t top_l;
    std::uint8_t top_r;
    Op op;
    std::uint8_t bit;     // pushed, popped or written bit; read branch (2 = end)
    std::uint32_t entry;  // ((from * 3 + top_l) * 3 + top_r) * 3 + branch
  };

  // Lists are keyed by everything a child test can read off the target
  // without touching the stacks below their tops.
  static constexpr std::size_t kContexts = 9 * 6 * 6;

 private:
  MachineSpec canonical_;
  std::uint32_t final_state_;
  // inverse_[q]: every (state, tops, branch) whose successor is q, in
  // canonical order.
  std::vector<std::vector<Item>> inverse_;
  // inverse_[q] restricted to one context, order kept: the items of
  // (q, context) are flat_[offsets_[i] .. offsets_[i + 1]) for
  // i = q * kContexts + context.
  // Inverse step compiled to shifts and masks:
  //   l' = ((l >> l_down) << l_up) | l_or, same for r,
  //   meta' = (meta - meta_down) with the state replaced by `from`,
  // valid when the checks selected by `check` pass.
  struct Compiled {
    std::uint64_t meta_down;
    std::uint32_t from;
    std::uint32_t entry;
    std::uint8_t l_down, l_up, l_or;
    std::uint8_t r_down, r_up, r_or;
    std::uint8_t check;     // bit 0: space; bit 1: top of l'; bit 2: top of r'
    std::uint8_t want_top;  // expected top for the bit 1 / bit 2 check
  };
  std::vector<Compiled> flat_;
  std::vector<std::uint32_t> offsets_;
};

// Simulates while recording projected configurations; a repeat means a loop.
HaltVerdict decide_forward(const MachineSpec& spec, const BitString& p,
                           const BitString& x, std::size_t s);

// Simulates for at most config_count(spec, p, x, s) steps.
HaltVerdict decide_counter(const MachineSpec& spec, const BitString& p,
                           const BitString& x, std::size_t s);

inline HaltVerdict decide_backward(const MachineSpec& spec, const BitString& p,
                                   const BitString& x, std::size_t s) {
  return BackwardDecider(spec).decide(p, x, s);
}

}  // namespace kslab

#endif  // KSLAB_HALTING_H_
