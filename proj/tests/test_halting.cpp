#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "doctest.h"
#include "kslab/halting.h"
#include "kslab/library.h"
#include "support.h"

using namespace kslab;
using kslab::testing::all_strings;

namespace {

MachineSpec single(const Instruction& ins) {
  MachineSpec m(1);
  m.set_all(0, ins);
  return m;
}

// Sort key of a predecessor: source state, opcode, then the pushed,
// popped, written or read bit (2 for an end-marker read).
std::tuple<std::uint32_t, int, int> order_key(const MachineSpec& spec, const Configuration& c,
                                              const BitString& p, const BitString& x) {
  const Instruction& ins = spec.at(c.state, top_of(c.stack_l), top_of(c.stack_r));
  int bit = ins.bit;
  switch (ins.op) {
    case Op::kPopL:
      bit = c.stack_l.back();
      break;
    case Op::kPopR:
      bit = c.stack_r.back();
      break;
    case Op::kReadP:
      bit = c.head_p < p.size() ? p[c.head_p] : 2;
      break;
    case Op::kReadX:
      bit = c.head_x < x.size() ? x[c.head_x] : 2;
      break;
    default:
      break;
  }
  return {c.state, static_cast<int>(ins.op), bit};
}

std::string show(const Configuration& c) {
  return std::to_string(c.state) + "/" + c.stack_l.str() + "/" + c.stack_r.str() + "/" +
         std::to_string(c.head_p) + "/" + std::to_string(c.head_x);
}

}  // namespace

TEST_CASE("config_count") {
  CHECK(config_count(MachineSpec(1), {}, {}, 0) == 1);
  CHECK(config_count(MachineSpec(1), {}, {}, 1) == 5);
  CHECK(config_count(MachineSpec(2), BitString::parse("1"), {}, 1) == 20);
  for (std::uint32_t q = 1; q <= 3; ++q) {
    for (std::size_t s = 0; s <= 4; ++s) {
      CHECK(config_count(MachineSpec(q), BitString::parse("01"), BitString::parse("1"), s) ==
            testing::all_configurations(q, 2, 1, s).size());
    }
  }
  CHECK(config_count(MachineSpec(1), {}, {}, 200) == UINT64_MAX);
}

TEST_CASE("predecessors match brute force") {
  auto machines = testing::sample_machines(25, 2, 3);
  machines.push_back(echo_machine());
  std::size_t checked = 0;
  for (const auto& m : machines) {
    const MachineSpec c = canonicalize(m);
    for (const auto& p : all_strings(2)) {
      for (const auto& x : all_strings(1)) {
        for (std::size_t s = 0; s <= 3; ++s) {
          auto all = testing::all_configurations(c.state_count(), p.size(), x.size(), s);
          std::map<std::string, std::vector<Configuration>> expect;
          for (const auto& from : all) {
            StepOutcome o = step(c, from, p, x);
            if (o.kind == StepOutcome::Kind::kNext && o.next.space() <= s) {
              expect[show(o.next)].push_back(from);
            }
          }
          for (const auto& target : all) {
            auto want = expect[show(target)];
            std::sort(want.begin(), want.end(), [&](const auto& a, const auto& b) {
              return order_key(c, a, p, x) < order_key(c, b, p, x);
            });
            auto got = predecessors(c, p, x, target, s);
            REQUIRE_MESSAGE(got == want, show(target));
            ++checked;
          }
        }
      }
    }
  }
  CHECK(checked > 100000);
}

TEST_CASE("predecessors examples") {
  // Every rule pushes: nothing reaches the initial configuration.
  MachineSpec pusher = canonicalize(single(Instruction::push_r(0, 0)));
  CHECK(predecessors(pusher, {}, {}, Configuration{}, 3).empty());

  MachineSpec m(2);
  m.set_all(0, Instruction::push_l(1, 1));
  MachineSpec c = canonicalize(m);
  Configuration after{1, BitString::parse("1"), {}, 0, 0};
  auto pre = predecessors(c, {}, {}, after, 2);
  CHECK(std::find(pre.begin(), pre.end(), Configuration{}) != pre.end());
}

TEST_CASE("decider examples") {
  const BitString one = BitString::parse("1");
  CHECK(decide_backward(echo_machine(), one, {}, 0).terminates_within_s);
  for (std::size_t s = 0; s <= 6; ++s) {
    CHECK_FALSE(decide_backward(single(Instruction::push_l(1, 0)), {}, {}, s).terminates_within_s);
  }
  const auto loop = single(Instruction::write(0, 0));
  CHECK_FALSE(decide_backward(loop, {}, {}, 4).terminates_within_s);
  CHECK_FALSE(decide_forward(loop, {}, {}, 4).terminates_within_s);

  HaltVerdict h = decide_forward(halt_machine(), {}, {}, 0);
  CHECK(h.terminates_within_s);
  CHECK(h.probe_stats.configurations_visited == 1);
  HaltVerdict hc = decide_counter(halt_machine(), {}, {}, 0);
  CHECK(hc.terminates_within_s);
  CHECK(hc.probe_stats.configurations_visited == 1);

  MachineSpec three(3);
  three.set_all(0, Instruction::write(0, 1));
  three.set_all(1, Instruction::write(1, 2));
  three.set_all(2, Instruction::write(0, 0));
  HaltVerdict f = decide_forward(three, {}, {}, 0);
  CHECK_FALSE(f.terminates_within_s);
  CHECK(f.probe_stats.configurations_visited <= 3 + 1);

  HaltVerdict cnt = decide_counter(loop, {}, {}, 2);
  CHECK_FALSE(cnt.terminates_within_s);
  CHECK(cnt.probe_stats.configurations_visited == config_count(loop, {}, {}, 2));
}

TEST_CASE("three deciders agree and the backward one stays frugal") {
  auto machines = testing::sample_machines(30, 3, 17);
  for (const auto& lib : machine_library()) machines.push_back(lib.spec);
  std::size_t halted = 0, total = 0;
  for (const auto& m : machines) {
    BackwardDecider back(m);
    for (const auto& p : all_strings(3)) {
      for (const auto& x : all_strings(2)) {
        for (std::size_t s = 0; s <= 6; ++s) {
          HaltVerdict b = back.decide(p, x, s);
          HaltVerdict f = decide_forward(m, p, x, s);
          HaltVerdict c = decide_counter(m, p, x, s);
          const bool naive = testing::halts_within_naive(m, p, x, s);
          REQUIRE(b.terminates_within_s == naive);
          REQUIRE(f.terminates_within_s == naive);
          REQUIRE(c.terminates_within_s == naive);
          CHECK(b.probe_stats.peak_live_configurations <= 3);
          halted += naive;
          ++total;
        }
      }
    }
  }
  // Both outcomes are well represented.
  CHECK(halted > total / 20);
  CHECK(halted < total - total / 20);
}

TEST_CASE("termination is monotone in s") {
  auto machines = testing::sample_machines(30, 3, 8);
  for (const auto& m : machines) {
    BackwardDecider back(m);
    for (const auto& p : all_strings(2)) {
      bool seen = false;
      for (std::size_t s = 0; s <= 8; ++s) {
        bool t = back.decide(p, BitString::parse("0"), s).terminates_within_s;
        if (seen) CHECK(t);
        seen = seen || t;
      }
    }
  }
}

TEST_CASE("runs longer than config_count repeat a configuration") {
  auto machines = testing::sample_machines(40, 3, 31);
  std::size_t long_runs = 0;
  for (const auto& m : machines) {
    for (const auto& p : all_strings(2)) {
      const BitString x = BitString::parse("10");
      const std::size_t s = 2;
      const std::uint64_t n = config_count(m, p, x, s);
      std::set<std::string> seen;
      bool repeated = false;
      Configuration c;
      std::uint64_t steps = 0;
      for (; steps <= n; ++steps) {
        repeated = repeated || !seen.insert(show(c)).second;
        StepOutcome o = step(m, c, p, x);
        if (o.kind != StepOutcome::Kind::kNext || o.next.space() > s) break;
        c = o.next;
      }
      if (steps > n) {
        ++long_runs;
        CHECK(repeated);
      }
    }
  }
  CHECK(long_runs > 0);
}

TEST_CASE("backward decider rejects oversized bounds") {
  CHECK_THROWS(decide_backward(echo_machine(), {}, {}, kMaxBackwardSpace + 1));
}
