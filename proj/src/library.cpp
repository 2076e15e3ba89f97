#include "kslab/library.h"

#include <stdexcept>

namespace kslab {

namespace {

constexpr std::array<Top, 3> kTops = {Top::kZero, Top::kOne, Top::kEmpty};

class Builder {
 public:
  explicit Builder(std::uint32_t states) : spec_(states) {}

  Builder& any(std::uint32_t q, const Instruction& ins) {
    spec_.set_all(q, ins);
    return *this;
  }
  Builder& on_l(std::uint32_t q, Top l, const Instruction& ins) {
    for (Top r : kTops) spec_.set(q, l, r, ins);
    return *this;
  }
  Builder& on_r(std::uint32_t q, Top r, const Instruction& ins) {
    for (Top l : kTops) spec_.set(q, l, r, ins);
    return *this;
  }
  MachineSpec done() const { return spec_; }

 private:
  MachineSpec spec_;
};

using I = Instruction;

// Writes each bit of a tape until its end marker.
MachineSpec copy_tape(Op read) {
  auto rd = read == Op::kReadP ? I::read_p(1, 2, 3) : I::read_x(1, 2, 3);
  return Builder(4).any(0, rd).any(1, I::write(0, 0)).any(2, I::write(1, 0)).done();
}

MachineSpec reverse_program() {
  return Builder(6)
      .any(0, I::read_p(1, 2, 3))
      .any(1, I::push_l(0, 0))
      .any(2, I::push_l(1, 0))
      .on_l(3, Top::kZero, I::pop_l(4))
      .on_l(3, Top::kOne, I::pop_l(5))
      .any(4, I::write(0, 3))
      .any(5, I::write(1, 3))
      .done();
}

// Output p p. The first copy is written while reading; the stored copy is
// moved from L to R to restore its order.
MachineSpec duplicate_program() {
  return Builder(11)
      .any(0, I::read_p(1, 2, 3))
      .any(1, I::write(0, 6))
      .any(2, I::write(1, 7))
      .any(6, I::push_l(0, 0))
      .any(7, I::push_l(1, 0))
      .on_l(3, Top::kZero, I::pop_l(4))
      .on_l(3, Top::kOne, I::pop_l(5))
      .on_l(3, Top::kEmpty, I::read_p(8, 8, 8))
      .any(4, I::push_r(0, 3))
      .any(5, I::push_r(1, 3))
      .on_r(8, Top::kZero, I::pop_r(9))
      .on_r(8, Top::kOne, I::pop_r(10))
      .any(9, I::write(0, 8))
      .any(10, I::write(1, 8))
      .done();
}

MachineSpec condition_then_program() {
  return Builder(7)
      .any(0, I::read_x(1, 2, 3))
      .any(1, I::write(0, 0))
      .any(2, I::write(1, 0))
      .any(3, I::read_p(4, 5, 6))
      .any(4, I::write(0, 3))
      .any(5, I::write(1, 3))
      .done();
}

// Output encode_pair(first, second) where `first` is read doubled from one
// tape and `second` copied from the other.
MachineSpec pair_of_tapes(Op first, Op second) {
  auto rd = [](Op op, std::uint32_t a, std::uint32_t b, std::uint32_t e) {
    return op == Op::kReadP ? I::read_p(a, b, e) : I::read_x(a, b, e);
  };
  return Builder(11)
      .any(0, rd(first, 1, 2, 3))
      .any(1, I::write(0, 4))
      .any(4, I::write(0, 0))
      .any(2, I::write(1, 5))
      .any(5, I::write(1, 0))
      .any(3, I::write(0, 6))
      .any(6, I::write(1, 7))
      .any(7, rd(second, 8, 9, 10))
      .any(8, I::write(0, 7))
      .any(9, I::write(1, 7))
      .done();
}

// Reads p as encode_pair(x, y) and writes encode_pair(y, x). Data bits are
// stored on L as (bit, marker 1); a single marker 0 separates x from y.
// Malformed input halts early.
MachineSpec swap_pair() {
  enum : std::uint32_t {
    kRead1, kRead2a, kRead2b, kData0, kData0m, kData1, kData1m, kSep,
    kReadY, kYZero, kYOne, kMoveY, kMoveY0, kMoveY0m, kMoveY1, kMoveY1m,
    kEmitY, kEmitYBit, kEmit00, kEmit00b, kEmit11, kEmit11b, kEmitSep, kEmitSepb,
    kMoveX, kMoveXBit, kMoveX0, kMoveX1, kEmitX, kEmitX0, kEmitX1, kStop,
    kCount
  };
  return Builder(kCount)
      .any(kRead1, I::read_p(kRead2a, kRead2b, kStop))
      .any(kRead2a, I::read_p(kData0, kSep, kStop))
      .any(kRead2b, I::read_p(kStop, kData1, kStop))
      .any(kData0, I::push_l(0, kData0m))
      .any(kData0m, I::push_l(1, kRead1))
      .any(kData1, I::push_l(1, kData1m))
      .any(kData1m, I::push_l(1, kRead1))
      .any(kSep, I::push_l(0, kReadY))
      .any(kReadY, I::read_p(kYZero, kYOne, kMoveY))
      .any(kYZero, I::push_r(0, kReadY))
      .any(kYOne, I::push_r(1, kReadY))
      .on_r(kMoveY, Top::kZero, I::pop_r(kMoveY0))
      .on_r(kMoveY, Top::kOne, I::pop_r(kMoveY1))
      .on_r(kMoveY, Top::kEmpty, I::read_p(kEmitY, kEmitY, kEmitY))
      .any(kMoveY0, I::push_l(0, kMoveY0m))
      .any(kMoveY0m, I::push_l(1, kMoveY))
      .any(kMoveY1, I::push_l(1, kMoveY1m))
      .any(kMoveY1m, I::push_l(1, kMoveY))
      .on_l(kEmitY, Top::kOne, I::pop_l(kEmitYBit))
      .on_l(kEmitY, Top::kZero, I::pop_l(kEmitSep))
      .on_l(kEmitYBit, Top::kZero, I::pop_l(kEmit00))
      .on_l(kEmitYBit, Top::kOne, I::pop_l(kEmit11))
      .any(kEmit00, I::write(0, kEmit00b))
      .any(kEmit00b, I::write(0, kEmitY))
      .any(kEmit11, I::write(1, kEmit11b))
      .any(kEmit11b, I::write(1, kEmitY))
      .any(kEmitSep, I::write(0, kEmitSepb))
      .any(kEmitSepb, I::write(1, kMoveX))
      .on_l(kMoveX, Top::kOne, I::pop_l(kMoveXBit))
      .on_l(kMoveX, Top::kEmpty, I::read_p(kEmitX, kEmitX, kEmitX))
      .on_l(kMoveXBit, Top::kZero, I::pop_l(kMoveX0))
      .on_l(kMoveXBit, Top::kOne, I::pop_l(kMoveX1))
      .any(kMoveX0, I::push_r(0, kMoveX))
      .any(kMoveX1, I::push_r(1, kMoveX))
      .on_r(kEmitX, Top::kZero, I::pop_r(kEmitX0))
      .on_r(kEmitX, Top::kOne, I::pop_r(kEmitX1))
      .any(kEmitX0, I::write(0, kEmitX))
      .any(kEmitX1, I::write(1, kEmitX))
      .done();
}

MachineSpec complement_program() {
  return Builder(4)
      .any(0, I::read_p(1, 2, 3))
      .any(1, I::write(1, 0))
      .any(2, I::write(0, 0))
      .done();
}

std::vector<LibraryMachine> build_library() {
  auto code = [](const char* s) { return BitString::parse(s); };
  std::vector<LibraryMachine> lib;
  lib.push_back({"halt", code(""), halt_machine()});
  lib.push_back({"echo-p", code("0"), copy_tape(Op::kReadP)});
  lib.push_back({"echo-x", code("1"), copy_tape(Op::kReadX)});
  lib.push_back({"reverse-p", code("00"), reverse_program()});
  lib.push_back({"dup-p", code("01"), duplicate_program()});
  lib.push_back({"x-then-p", code("10"), condition_then_program()});
  lib.push_back({"pair-x-p", code("000"), pair_of_tapes(Op::kReadX, Op::kReadP)});
  lib.push_back({"pair-p-x", code("001"), pair_of_tapes(Op::kReadP, Op::kReadX)});
  lib.push_back({"swap-pair", code("010"), swap_pair()});
  lib.push_back({"complement-p", code("011"), complement_program()});
  return lib;
}

}  // namespace

MachineSpec echo_machine() { return copy_tape(Op::kReadP); }
MachineSpec echo_condition_machine() { return copy_tape(Op::kReadX); }
MachineSpec halt_machine() { return MachineSpec(1); }

const std::vector<LibraryMachine>& machine_library() {
  static const std::vector<LibraryMachine> lib = build_library();
  return lib;
}

const LibraryMachine& library_machine(const std::string& name) {
  for (const auto& m : machine_library()) {
    if (m.name == name) return m;
  }
  throw std::out_of_range("no library machine named " + name);
}

std::optional<MachineSpec> decode_description(const BitString& r) {
  if (r.size() >= 2 && r[0] == 1 && r[1] == 1) return parse_bits(r.substr(2));
  for (const auto& m : machine_library()) {
    if (m.code == r) return m.spec;
  }
  return std::nullopt;
}

BitString describe(const MachineSpec& spec) {
  for (const auto& m : machine_library()) {
    if (m.spec == spec) return m.code;
  }
  return BitString::parse("11") + serialize_machine(spec);
}

}  // namespace kslab
