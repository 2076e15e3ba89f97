// Shared generators and brute-force oracles for the test binaries.
#ifndef KSLAB_TESTS_SUPPORT_H_
#define KSLAB_TESTS_SUPPORT_H_

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kslab/bits.h"
#include "kslab/machine.h"

namespace kslab::testing {

inline constexpr std::array<Top, 3> kAllTops = {Top::kZero, Top::kOne, Top::kEmpty};

// Every bitstring of length 0..max_len in shortlex order.
inline std::vector<BitString> all_strings(std::size_t max_len) {
  std::vector<BitString> out;
  for (std::size_t len = 0; len <= max_len; ++len) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
      out.push_back(BitString::from_uint(v, len));
    }
  }
  return out;
}

inline BitString random_string(std::mt19937_64& rng, std::size_t max_len) {
  std::size_t len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  return BitString::from_uint(rng(), len);
}

inline Instruction random_instruction(std::mt19937_64& rng, std::uint32_t n) {
  auto state = [&] { return std::uniform_int_distribution<std::uint32_t>(0, n - 1)(rng); };
  auto bit = [&] { return static_cast<int>(rng() & 1); };
  switch (std::uniform_int_distribution<int>(0, 7)(rng)) {
    case 0: return Instruction::halt();
    case 1: return Instruction::push_l(bit(), state());
    case 2: return Instruction::push_r(bit(), state());
    case 3: return Instruction::pop_l(state());
    case 4: return Instruction::pop_r(state());
    case 5: return Instruction::write(bit(), state());
    case 6: return Instruction::read_p(state(), state(), state());
    default: return Instruction::read_x(state(), state(), state());
  }
}

inline MachineSpec random_machine(std::mt19937_64& rng, std::uint32_t n) {
  MachineSpec spec(n);
  for (std::uint32_t q = 0; q < n; ++q) {
    for (Top l : kAllTops) {
      for (Top r : kAllTops) spec.set(q, l, r, random_instruction(rng, n));
    }
  }
  return spec;
}

// Canonical numbering: every state reachable in the transition graph from
// state 0, and states first referenced in table order get increasing
// indices. Each isomorphism class has exactly one such member.
inline bool in_normal_form(const MachineSpec& spec) {
  const std::uint32_t n = spec.state_count();
  std::vector<std::uint32_t> order{0};
  std::vector<bool> seen(n, false);
  seen[0] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Top l : kAllTops) {
      for (Top r : kAllTops) {
        const Instruction& ins = spec.at(order[i], l, r);
        for (int b = 0; b < ins.successor_count(); ++b) {
          std::uint32_t q = ins.next[b];
          if (!seen[q]) {
            seen[q] = true;
            order.push_back(q);
          }
        }
      }
    }
  }
  if (order.size() != n) return false;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (order[i] != i) return false;
  }
  return true;
}

// Distinct normal-form machines, `per_size` for each state count 1..max_states,
// drawn by rejection sampling of serialization records.
inline std::vector<MachineSpec> sample_machines(std::size_t per_size, std::uint32_t max_states,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<MachineSpec> out;
  for (std::uint32_t n = 1; n <= max_states; ++n) {
    std::set<std::string> keys;
    std::size_t attempts = 0;
    while (keys.size() < per_size && attempts < per_size * 1000) {
      ++attempts;
      MachineSpec m = random_machine(rng, n);
      if (!in_normal_form(m)) continue;
      if (keys.insert(serialize_machine(m).str()).second) out.push_back(std::move(m));
    }
  }
  return out;
}

// Every configuration with space <= s for the given tapes.
inline std::vector<Configuration> all_configurations(std::uint32_t states, std::size_t p_len,
                                                     std::size_t x_len, std::size_t s) {
  std::vector<Configuration> out;
  const auto stacks = all_strings(s);
  for (std::uint32_t q = 0; q < states; ++q) {
    for (const auto& l : stacks) {
      for (const auto& r : stacks) {
        if (l.size() + r.size() > s) continue;
        for (std::size_t hp = 0; hp <= p_len; ++hp) {
          for (std::size_t hx = 0; hx <= x_len; ++hx) {
            out.push_back({q, l, r, hp, hx});
          }
        }
      }
    }
  }
  return out;
}

// Plain simulation that remembers every configuration in a list; the
// slowest and most obviously correct decider.
inline bool halts_within_naive(const MachineSpec& spec, const BitString& p, const BitString& x,
                               std::size_t s) {
  std::vector<Configuration> trail;
  Configuration c;
  for (;;) {
    for (const auto& seen : trail) {
      if (seen == c) return false;
    }
    trail.push_back(c);
    StepOutcome o = step(spec, c, p, x);
    if (o.kind == StepOutcome::Kind::kHalted) return true;
    if (o.kind == StepOutcome::Kind::kAbnormal) return false;
    if (o.next.space() > s) return false;
    c = o.next;
  }
}

}  // namespace kslab::testing

#endif  // KSLAB_TESTS_SUPPORT_H_
