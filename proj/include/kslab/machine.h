#ifndef KSLAB_MACHINE_H_
#define KSLAB_MACHINE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kslab/bits.h"

namespace kslab {

// Top-of-stack symbol seen by the control unit.
enum class Top : std::uint8_t { kZero = 0, kOne = 1, kEmpty = 2 };

inline Top top_of(const BitString& stack) {
  return stack.empty() ? Top::kEmpty : static_cast<Top>(stack.back());
}

// Opcode values double as the 3-bit opcode of the serialized form.
enum class Op : std::uint8_t {
  kHalt = 0,
  kPushL = 1,
  kPushR = 2,
  kPopL = 3,
  kPopR = 4,
  kWrite = 5,
  kReadP = 6,
  kReadX = 7,
};

const char* op_name(Op op);

struct Instruction {
  Op op = Op::kHalt;
  std::uint8_t bit = 0;
  // next[0] for single-successor instructions; reads branch on
  // next[0] (bit 0), next[1] (bit 1), next[2] (end marker).
  std::array<std::uint32_t, 3> next{0, 0, 0};

  static Instruction halt() { return {}; }
  static Instruction push_l(int bit, std::uint32_t q) {
    return {Op::kPushL, static_cast<std::uint8_t>(bit), {q, 0, 0}};
  }
  static Instruction push_r(int bit, std::uint32_t q) {
    return {Op::kPushR, static_cast<std::uint8_t>(bit), {q, 0, 0}};
  }
  static Instruction pop_l(std::uint32_t q) { return {Op::kPopL, 0, {q, 0, 0}}; }
  static Instruction pop_r(std::uint32_t q) { return {Op::kPopR, 0, {q, 0, 0}}; }
  static Instruction write(int bit, std::uint32_t q) {
    return {Op::kWrite, static_cast<std::uint8_t>(bit), {q, 0, 0}};
  }
  static Instruction read_p(std::uint32_t q0, std::uint32_t q1, std::uint32_t qe) {
    return {Op::kReadP, 0, {q0, q1, qe}};
  }
  static Instruction read_x(std::uint32_t q0, std::uint32_t q1, std::uint32_t qe) {
    return {Op::kReadX, 0, {q0, q1, qe}};
  }

  bool is_read() const { return op == Op::kReadP || op == Op::kReadX; }
  // Number of meaningful entries in `next`.
  int successor_count() const {
    return op == Op::kHalt ? 0 : (is_read() ? 3 : 1);
  }

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

class MachineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by parse_machine; carries the 1-based line of the offending rule.
class MachineParseError : public MachineError {
 public:
  MachineParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

// Transition table of a two-stack machine with two one-directional input
// tapes (program p and condition x) and a write-only output tape. The table
// is total over state x top_L x top_R; state 0 is initial.
class MachineSpec {
 public:
  // All entries Halt. Throws MachineError if state_count == 0.
  explicit MachineSpec(std::uint32_t state_count);

  std::uint32_t state_count() const { return state_count_; }

  const Instruction& at(std::uint32_t q, Top l, Top r) const {
    return table_[index(q, l, r)];
  }
  // Throws MachineError when q or a successor is out of range.
  void set(std::uint32_t q, Top l, Top r, const Instruction& ins);
  // Same instruction for all nine stack-top combinations of q.
  void set_all(std::uint32_t q, const Instruction& ins);

  friend bool operator==(const MachineSpec&, const MachineSpec&) = default;

 private:
  static std::size_t index(std::uint32_t q, Top l, Top r) {
    return 9 * static_cast<std::size_t>(q) + 3 * static_cast<std::size_t>(l) +
           static_cast<std::size_t>(r);
  }

  std::uint32_t state_count_;
  std::vector<Instruction> table_;
};

// Line-based text format, '#' comments:
//   states: <n>
//   <q> <a> <b> -> halt | pushL <bit> <q'> | pushR <bit> <q'> | popL <q'>
//                | popR <q'> | write <bit> <q'> | readP <q0> <q1> <qE>
//                | readX <q0> <q1> <qE>
// with a, b in {0, 1, _}. Unlisted triples are halt.
MachineSpec parse_machine(std::string_view text);
// Lists only the non-halt rules, in (state, top_L, top_R) order.
std::string format_machine(const MachineSpec& spec);

// Fixed-width layout: 1^n 0, then 9n records in (state, top_L, top_R) order.
// Each record is a 3-bit opcode followed by operands (bits 1 wide, states
// ceil(log2 n) wide) zero-padded to the widest record.
BitString serialize_machine(const MachineSpec& spec);
// Strict inverse of serialize_machine: nullopt unless `bits` is exactly the
// serialization of some spec (padding zero, operands in range).
std::optional<MachineSpec> parse_bits(const BitString& bits);
int state_operand_width(std::uint32_t state_count);
int record_width(std::uint32_t state_count);

struct Configuration {
  std::uint32_t state = 0;
  BitString stack_l;
  BitString stack_r;
  std::size_t head_p = 0;
  std::size_t head_x = 0;

  std::size_t space() const { return stack_l.size() + stack_r.size(); }
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct StepOutcome {
  enum class Kind { kNext, kHalted, kAbnormal };
  Kind kind = Kind::kHalted;
  Configuration next;          // valid for kNext
  std::optional<int> emitted;  // the bit written, for Write
};

StepOutcome step(const MachineSpec& spec, const Configuration& cfg,
                 const BitString& p, const BitString& x);

enum class Verdict { kHalted, kSpaceExceeded, kAbnormal, kStepLimitHit };
const char* verdict_name(Verdict v);

struct RunResult {
  Verdict verdict = Verdict::kHalted;
  BitString output;
  std::size_t max_space = 0;
  std::uint64_t steps = 0;
};

// Runs from state 0 with empty stacks and both heads at 0. Executing Halt
// counts as a step.
RunResult run(const MachineSpec& spec, const BitString& p, const BitString& x,
              std::size_t space_bound, std::uint64_t step_limit);

// Appends a cleanup phase: instead of halting, the machine advances both
// heads to their end markers, pops both stacks empty, then halts. Output,
// max space and termination within any bound are unchanged. The final
// state is always state_count() - 1 of the result.
MachineSpec canonicalize(const MachineSpec& spec);
inline constexpr std::uint32_t kCleanupStates = 4;

}  // namespace kslab

#endif  // KSLAB_MACHINE_H_
