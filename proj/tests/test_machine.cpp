#include <random>
#include <string>

#include "doctest.h"
#include "kslab/halting.h"
#include "kslab/library.h"
#include "kslab/machine.h"
#include "support.h"

using namespace kslab;
using kslab::testing::all_strings;

namespace {

const char* kEchoText = R"(# copies p to the output
states: 4
0 0 0 -> readP 1 2 3
0 0 1 -> readP 1 2 3
0 0 _ -> readP 1 2 3
0 1 0 -> readP 1 2 3
0 1 1 -> readP 1 2 3
0 1 _ -> readP 1 2 3
0 _ 0 -> readP 1 2 3
0 _ 1 -> readP 1 2 3
0 _ _ -> readP 1 2 3
1 0 0 -> write 0 0
1 0 1 -> write 0 0
1 0 _ -> write 0 0
1 1 0 -> write 0 0
1 1 1 -> write 0 0
1 1 _ -> write 0 0
1 _ 0 -> write 0 0
1 _ 1 -> write 0 0
1 _ _ -> write 0 0
2 0 0 -> write 1 0
2 0 1 -> write 1 0
2 0 _ -> write 1 0
2 1 0 -> write 1 0
2 1 1 -> write 1 0
2 1 _ -> write 1 0
2 _ 0 -> write 1 0
2 _ 1 -> write 1 0
2 _ _ -> write 1 0
)";

MachineSpec single(const Instruction& ins) {
  MachineSpec m(1);
  m.set_all(0, ins);
  return m;
}

// Widest record for n states, from the layout: opcode, then a bit and one
// state (push, write), or three states (reads).
int expected_record_width(std::uint32_t n) {
  int w = 0;
  while ((1u << w) < n) ++w;
  return 3 + std::max(1 + w, 3 * w);
}

}  // namespace

TEST_CASE("parse_machine defaults and errors") {
  MachineSpec one = parse_machine("states: 1\n");
  CHECK(one.state_count() == 1);
  for (Top l : testing::kAllTops) {
    for (Top r : testing::kAllTops) CHECK(one.at(0, l, r).op == Op::kHalt);
  }
  CHECK(parse_machine(kEchoText) == echo_machine());
  CHECK(parse_machine(kEchoText).state_count() == 4);
  try {
    parse_machine("states: 2\n0 _ _ -> pushL 1 0\n1 0 0 -> popL 9\n");
    FAIL("expected a parse error");
  } catch (const MachineParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_machine("states: 1\n0 _ x -> halt\n"), MachineParseError);
  CHECK_THROWS_AS(parse_machine("0 _ _ -> halt\n"), MachineParseError);
}

TEST_CASE("format_machine roundtrips") {
  for (const auto& m : machine_library()) {
    CHECK(parse_machine(format_machine(m.spec)) == m.spec);
  }
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    MachineSpec m = testing::random_machine(rng, 1 + t % 4);
    CHECK(parse_machine(format_machine(m)) == m);
  }
}

TEST_CASE("serialization layout") {
  BitString halt = serialize_machine(halt_machine());
  CHECK(halt.str() == "10" + std::string(36, '0'));
  const std::size_t expect[] = {0, 38, 111, 247, 329};
  for (std::uint32_t n = 1; n <= 4; ++n) {
    CHECK(record_width(n) == expected_record_width(n));
    std::size_t len = n + 1 + 9 * n * static_cast<std::size_t>(expected_record_width(n));
    CHECK(len == expect[n]);
    CHECK(serialize_machine(MachineSpec(n)).size() == len);
  }
}

TEST_CASE("serialization roundtrip and strictness") {
  CHECK(parse_bits(serialize_machine(echo_machine())) == echo_machine());
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    MachineSpec m = testing::random_machine(rng, 1 + t % 5);
    BitString bits = serialize_machine(m);
    REQUIRE(parse_bits(bits).has_value());
    CHECK(*parse_bits(bits) == m);
    BitString longer = bits;
    longer.push_back(0);
    CHECK_FALSE(parse_bits(longer).has_value());
    BitString shorter = bits.substr(0, bits.size() - 1);
    CHECK_FALSE(parse_bits(shorter).has_value());
  }
  // A 3-state machine pointing at state 3 fits the 2-bit operand but is out
  // of range.
  BitString bad = serialize_machine(MachineSpec(3));
  std::string raw = bad.str();
  const std::size_t rec = 4;  // first record starts after "1110"
  raw.replace(rec, 3, "011");  // popL
  raw.replace(rec + 3, 2, "11");
  CHECK_FALSE(parse_bits(BitString::parse(raw)).has_value());
}

TEST_CASE("step semantics") {
  Configuration start;
  CHECK(step(halt_machine(), start, {}, {}).kind == StepOutcome::Kind::kHalted);

  auto push = single(Instruction::push_l(1, 0));
  StepOutcome o = step(push, start, {}, {});
  REQUIRE(o.kind == StepOutcome::Kind::kNext);
  CHECK(o.next.stack_l.str() == "1");
  CHECK(o.next.stack_r.empty());

  CHECK(step(single(Instruction::pop_r(0)), start, {}, {}).kind ==
        StepOutcome::Kind::kAbnormal);

  auto w = step(single(Instruction::write(1, 0)), start, {}, {});
  REQUIRE(w.emitted.has_value());
  CHECK(*w.emitted == 1);

  // Reading at the end takes the end branch and stays put.
  MachineSpec rd(3);
  rd.set_all(0, Instruction::read_p(1, 1, 2));
  Configuration at_end;
  at_end.head_p = 1;
  auto e = step(rd, at_end, BitString::parse("0"), {});
  CHECK(e.next.state == 2);
  CHECK(e.next.head_p == 1);
  auto b = step(rd, start, BitString::parse("1"), {});
  CHECK(b.next.state == 1);
  CHECK(b.next.head_p == 1);
}

TEST_CASE("run verdicts") {
  RunResult echo = run(echo_machine(), BitString::parse("101"), {}, 0, 1000);
  CHECK(echo.verdict == Verdict::kHalted);
  CHECK(echo.output.str() == "101");
  CHECK(echo.max_space == 0);
  // read, write per bit, the end read, then Halt
  CHECK(echo.steps == 3 * 2 + 1 + 1);

  RunResult grow = run(single(Instruction::push_l(1, 0)), {}, {}, 5, 1000);
  CHECK(grow.verdict == Verdict::kSpaceExceeded);
  CHECK(grow.steps == 6);

  RunResult loop = run(single(Instruction::write(0, 0)), {}, {}, 0, 100);
  CHECK(loop.verdict == Verdict::kStepLimitHit);
  CHECK(loop.steps == 100);

  CHECK(run(single(Instruction::pop_l(0)), {}, {}, 3, 10).verdict == Verdict::kAbnormal);
  CHECK(run(halt_machine(), {}, {}, 0, 1).steps == 1);
}

TEST_CASE("verdicts are monotone in space and heads never move back") {
  auto machines = testing::sample_machines(40, 3, 21);
  for (const auto& m : machines) {
    for (const auto& p : all_strings(2)) {
      const BitString x = BitString::parse("1");
      std::optional<BitString> out;
      for (std::size_t s = 0; s <= 5; ++s) {
        RunResult r = run(m, p, x, s, config_count(m, p, x, s));
        if (out) {
          CHECK(r.verdict == Verdict::kHalted);
          CHECK(r.output == *out);
        } else if (r.verdict == Verdict::kHalted) {
          CHECK(r.max_space <= s);
          out = r.output;
        }
      }
      Configuration c;
      for (int i = 0; i < 200; ++i) {
        StepOutcome o = step(m, c, p, x);
        if (o.kind != StepOutcome::Kind::kNext) break;
        CHECK(o.next.head_p >= c.head_p);
        CHECK(o.next.head_x >= c.head_x);
        c = o.next;
      }
    }
  }
}

TEST_CASE("canonicalize: final configuration and cleanup") {
  MachineSpec echo = canonicalize(echo_machine());
  CHECK(echo.state_count() == 4 + kCleanupStates);
  const BitString p = BitString::parse("1");
  Configuration c;
  for (;;) {
    StepOutcome o = step(echo, c, p, {});
    if (o.kind == StepOutcome::Kind::kHalted) break;
    REQUIRE(o.kind == StepOutcome::Kind::kNext);
    c = o.next;
  }
  CHECK(c.state == echo.state_count() - 1);
  CHECK(c.stack_l.empty());
  CHECK(c.stack_r.empty());
  CHECK(c.head_p == 1);
  CHECK(run(echo, p, {}, 0, 100).output.str() == "1");

  // Push "11" on L, then halt: the drain pops without growing.
  MachineSpec two(3);
  two.set_all(0, Instruction::push_l(1, 1));
  two.set_all(1, Instruction::push_l(1, 2));
  RunResult before = run(two, {}, {}, 4, 100);
  RunResult after = run(canonicalize(two), {}, {}, 4, 100);
  CHECK(after.verdict == Verdict::kHalted);
  CHECK(after.max_space == before.max_space);

  for (const auto& p3 : all_strings(3)) {
    for (const auto& x : all_strings(2)) {
      for (std::size_t s = 0; s <= 4; ++s) {
        RunResult a = run(halt_machine(), p3, x, s, 100);
        RunResult b = run(canonicalize(halt_machine()), p3, x, s, 100);
        CHECK(a.verdict == b.verdict);
        CHECK(a.output == b.output);
        CHECK(a.max_space == b.max_space);
      }
    }
  }
}

TEST_CASE("canonicalize preserves termination, output and space") {
  auto machines = testing::sample_machines(60, 3, 99);
  for (const auto& m : machines) {
    MachineSpec c = canonicalize(m);
    for (const auto& p : all_strings(3)) {
      for (const auto& x : all_strings(3)) {
        for (std::size_t s = 0; s <= 6; s += 2) {
          RunResult a = run(m, p, x, s, config_count(m, p, x, s));
          RunResult b = run(c, p, x, s, config_count(c, p, x, s));
          const bool ha = a.verdict == Verdict::kHalted;
          CHECK(ha == (b.verdict == Verdict::kHalted));
          if (ha) {
            CHECK(a.output == b.output);
            CHECK(a.max_space == b.max_space);
          }
        }
      }
    }
  }
}
