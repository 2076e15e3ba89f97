#include "kslab/machine.h"

#include <charconv>
#include <sstream>

namespace kslab {

namespace {

constexpr std::array<Top, 3> kTops = {Top::kZero, Top::kOne, Top::kEmpty};

char top_char(Top t) {
  switch (t) {
    case Top::kZero: return '0';
    case Top::kOne: return '1';
    case Top::kEmpty: return '_';
  }
  return '?';
}

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

std::uint32_t parse_uint(std::string_view word, int line) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
  if (ec != std::errc() || ptr != word.data() + word.size()) {
    throw MachineParseError(line, "expected a number, got '" +
                                      std::string(word) + "'");
  }
  return v;
}

int parse_bit(std::string_view word, int line) {
  if (word == "0") return 0;
  if (word == "1") return 1;
  throw MachineParseError(line, "expected a bit, got '" + std::string(word) + "'");
}

Top parse_top(std::string_view word, int line) {
  if (word == "0") return Top::kZero;
  if (word == "1") return Top::kOne;
  if (word == "_") return Top::kEmpty;
  throw MachineParseError(line, "expected 0, 1 or _, got '" +
                                    std::string(word) + "'");
}

}  // namespace

const char* op_name(Op op) {
  switch (op) {
    case Op::kHalt: return "halt";
    case Op::kPushL: return "pushL";
    case Op::kPushR: return "pushR";
    case Op::kPopL: return "popL";
    case Op::kPopR: return "popR";
    case Op::kWrite: return "write";
    case Op::kReadP: return "readP";
    case Op::kReadX: return "readX";
  }
  return "?";
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kHalted: return "halted";
    case Verdict::kSpaceExceeded: return "space-exceeded";
    case Verdict::kAbnormal: return "abnormal";
    case Verdict::kStepLimitHit: return "step-limit";
  }
  return "?";
}

MachineParseError::MachineParseError(int line, const std::string& what)
    : MachineError("line " + std::to_string(line) + ": " + what), line_(line) {}

MachineSpec::MachineSpec(std::uint32_t state_count)
    : state_count_(state_count), table_(9 * std::size_t{state_count}) {
  if (state_count == 0) throw MachineError("a machine needs at least one state");
}

void MachineSpec::set(std::uint32_t q, Top l, Top r, const Instruction& ins) {
  if (q >= state_count_) {
    throw MachineError("state " + std::to_string(q) + " out of range");
  }
  for (int i = 0; i < ins.successor_count(); ++i) {
    if (ins.next[i] >= state_count_) {
      throw MachineError("successor state " + std::to_string(ins.next[i]) +
                         " out of range");
    }
  }
  Instruction stored = ins;
  // Unused operand slots are kept zero so that equality is structural.
  for (int i = ins.successor_count(); i < 3; ++i) stored.next[i] = 0;
  if (ins.op != Op::kPushL && ins.op != Op::kPushR && ins.op != Op::kWrite) {
    stored.bit = 0;
  }
  table_[index(q, l, r)] = stored;
}

void MachineSpec::set_all(std::uint32_t q, const Instruction& ins) {
  for (Top l : kTops) {
    for (Top r : kTops) set(q, l, r, ins);
  }
}

MachineSpec parse_machine(std::string_view text) {
  std::optional<MachineSpec> spec;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    auto words = split_words(line);
    if (words.empty()) continue;
    if (words[0] == "states:") {
      if (spec) throw MachineParseError(line_no, "duplicate states line");
      if (words.size() != 2) throw MachineParseError(line_no, "expected 'states: <n>'");
      std::uint32_t n = parse_uint(words[1], line_no);
      if (n == 0) throw MachineParseError(line_no, "state count must be positive");
      spec.emplace(n);
      continue;
    }
    if (!spec) throw MachineParseError(line_no, "rule before 'states:' line");
    if (words.size() < 5 || words[3] != "->") {
      throw MachineParseError(line_no, "expected '<q> <a> <b> -> <instruction>'");
    }
    std::uint32_t q = parse_uint(words[0], line_no);
    Top a = parse_top(words[1], line_no);
    Top b = parse_top(words[2], line_no);
    std::string_view op = words[4];
    std::size_t argc = words.size() - 5;
    auto need = [&](std::size_t n) {
      if (argc != n) {
        throw MachineParseError(line_no, std::string(op) + " takes " +
                                             std::to_string(n) + " operands");
      }
    };
    auto arg_state = [&](std::size_t i) { return parse_uint(words[5 + i], line_no); };
    Instruction ins;
    if (op == "halt") {
      need(0);
    } else if (op == "pushL" || op == "pushR" || op == "write") {
      need(2);
      int bit = parse_bit(words[5], line_no);
      std::uint32_t next = arg_state(1);
      ins = op == "pushL"   ? Instruction::push_l(bit, next)
            : op == "pushR" ? Instruction::push_r(bit, next)
                            : Instruction::write(bit, next);
    } else if (op == "popL" || op == "popR") {
      need(1);
      ins = op == "popL" ? Instruction::pop_l(arg_state(0))
                         : Instruction::pop_r(arg_state(0));
    } else if (op == "readP" || op == "readX") {
      need(3);
      ins = op == "readP"
                ? Instruction::read_p(arg_state(0), arg_state(1), arg_state(2))
                : Instruction::read_x(arg_state(0), arg_state(1), arg_state(2));
    } else {
      throw MachineParseError(line_no, "unknown instruction '" + std::string(op) + "'");
    }
    try {
      spec->set(q, a, b, ins);
    } catch (const MachineError& e) {
      throw MachineParseError(line_no, e.what());
    }
  }
  if (!spec) throw MachineParseError(line_no, "missing 'states:' line");
  return *spec;
}

std::string format_machine(const MachineSpec& spec) {
  std::ostringstream out;
  out << "states: " << spec.state_count() << "\n";
  for (std::uint32_t q = 0; q < spec.state_count(); ++q) {
    for (Top l : kTops) {
      for (Top r : kTops) {
        const Instruction& ins = spec.at(q, l, r);
        if (ins.op == Op::kHalt) continue;
        out << q << ' ' << top_char(l) << ' ' << top_char(r) << " -> "
            << op_name(ins.op);
        switch (ins.op) {
          case Op::kPushL:
          case Op::kPushR:
          case Op::kWrite:
            out << ' ' << int{ins.bit} << ' ' << ins.next[0];
            break;
          case Op::kPopL:
          case Op::kPopR:
            out << ' ' << ins.next[0];
            break;
          case Op::kReadP:
          case Op::kReadX:
            out << ' ' << ins.next[0] << ' ' << ins.next[1] << ' ' << ins.next[2];
            break;
          case Op::kHalt:
            break;
        }
        out << "\n";
      }
    }
  }
  return out.str();
}

int state_operand_width(std::uint32_t state_count) {
  int w = 0;
  while ((std::uint64_t{1} << w) < state_count) ++w;
  return w;
}

int record_width(std::uint32_t state_count) {
  int b = state_operand_width(state_count);
  return 3 + std::max(1 + b, 3 * b);
}

BitString serialize_machine(const MachineSpec& spec) {
  const std::uint32_t n = spec.state_count();
  const int b = state_operand_width(n);
  const int w = record_width(n);
  BitString out;
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(1);
  out.push_back(0);
  for (std::uint32_t q = 0; q < n; ++q) {
    for (Top l : kTops) {
      for (Top r : kTops) {
        const Instruction& ins = spec.at(q, l, r);
        BitString rec = BitString::from_uint(static_cast<std::uint64_t>(ins.op), 3);
        switch (ins.op) {
          case Op::kPushL:
          case Op::kPushR:
          case Op::kWrite:
            rec.push_back(ins.bit);
            rec.append(BitString::from_uint(ins.next[0], b));
            break;
          case Op::kPopL:
          case Op::kPopR:
            rec.append(BitString::from_uint(ins.next[0], b));
            break;
          case Op::kReadP:
          case Op::kReadX:
            for (int i = 0; i < 3; ++i) {
              rec.append(BitString::from_uint(ins.next[i], b));
            }
            break;
          case Op::kHalt:
            break;
        }
        while (rec.size() < static_cast<std::size_t>(w)) rec.push_back(0);
        out.append(rec);
      }
    }
  }
  return out;
}

std::optional<MachineSpec> parse_bits(const BitString& bits) {
  std::size_t pos = 0;
  std::uint32_t n = 0;
  while (pos < bits.size() && bits[pos] == 1) {
    ++n;
    ++pos;
  }
  if (n == 0 || pos >= bits.size()) return std::nullopt;
  ++pos;  // the terminating 0
  const int b = state_operand_width(n);
  const std::size_t w = static_cast<std::size_t>(record_width(n));
  if (bits.size() - pos != 9 * std::size_t{n} * w) return std::nullopt;

  auto read_uint = [&](std::size_t& at, int width) {
    std::uint32_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint32_t>(bits[at++]);
    return v;
  };

  MachineSpec spec(n);
  for (std::uint32_t q = 0; q < n; ++q) {
    for (Top l : kTops) {
      for (Top r : kTops) {
        const std::size_t start = pos;
        Instruction ins;
        ins.op = static_cast<Op>(read_uint(pos, 3));
        switch (ins.op) {
          case Op::kPushL:
          case Op::kPushR:
          case Op::kWrite:
            ins.bit = static_cast<std::uint8_t>(read_uint(pos, 1));
            ins.next[0] = read_uint(pos, b);
            break;
          case Op::kPopL:
          case Op::kPopR:
            ins.next[0] = read_uint(pos, b);
            break;
          case Op::kReadP:
          case Op::kReadX:
            for (int i = 0; i < 3; ++i) ins.next[i] = read_uint(pos, b);
            break;
          case Op::kHalt:
            break;
        }
        for (int i = 0; i < ins.successor_count(); ++i) {
          if (ins.next[i] >= n) return std::nullopt;
        }
        while (pos < start + w) {
          if (bits[pos++] != 0) return std::nullopt;
        }
        spec.set(q, l, r, ins);
      }
    }
  }
  return spec;
}

namespace {

// Applies one instruction in place. Returns false on halt or abnormal stop,
// with `abnormal` telling the two apart.
inline bool apply(const Instruction& ins, Configuration& cfg, const BitString& p,
                  const BitString& x, std::optional<int>& emitted, bool& abnormal) {
  abnormal = false;
  switch (ins.op) {
    case Op::kHalt:
      return false;
    case Op::kPushL:
      cfg.stack_l.push_back(ins.bit);
      break;
    case Op::kPushR:
      cfg.stack_r.push_back(ins.bit);
      break;
    case Op::kPopL:
      if (cfg.stack_l.empty()) {
        abnormal = true;
        return false;
      }
      cfg.stack_l.pop_back();
      break;
    case Op::kPopR:
      if (cfg.stack_r.empty()) {
        abnormal = true;
        return false;
      }
      cfg.stack_r.pop_back();
      break;
    case Op::kWrite:
      emitted = ins.bit;
      break;
    case Op::kReadP:
    case Op::kReadX: {
      const BitString& tape = ins.op == Op::kReadP ? p : x;
      std::size_t& head = ins.op == Op::kReadP ? cfg.head_p : cfg.head_x;
      if (head >= tape.size()) {
        cfg.state = ins.next[2];
        return true;
      }
      cfg.state = ins.next[tape[head]];
      ++head;
      return true;
    }
  }
  cfg.state = ins.next[0];
  return true;
}

}  // namespace

StepOutcome step(const MachineSpec& spec, const Configuration& cfg,
                 const BitString& p, const BitString& x) {
  const Instruction& ins = spec.at(cfg.state, top_of(cfg.stack_l), top_of(cfg.stack_r));
  StepOutcome out;
  out.next = cfg;
  bool abnormal = false;
  if (apply(ins, out.next, p, x, out.emitted, abnormal)) {
    out.kind = StepOutcome::Kind::kNext;
  } else {
    out.kind = abnormal ? StepOutcome::Kind::kAbnormal : StepOutcome::Kind::kHalted;
    out.next = cfg;
  }
  return out;
}

RunResult run(const MachineSpec& spec, const BitString& p, const BitString& x,
              std::size_t space_bound, std::uint64_t step_limit) {
  RunResult result;
  Configuration cfg;
  while (result.steps < step_limit) {
    const Instruction& ins =
        spec.at(cfg.state, top_of(cfg.stack_l), top_of(cfg.stack_r));
    ++result.steps;
    std::optional<int> emitted;
    bool abnormal = false;
    if (!apply(ins, cfg, p, x, emitted, abnormal)) {
      result.verdict = abnormal ? Verdict::kAbnormal : Verdict::kHalted;
      if (abnormal) result.output = BitString();
      return result;
    }
    if (emitted) result.output.push_back(*emitted);
    const std::size_t sp = cfg.space();
    if (sp > result.max_space) result.max_space = sp;
    if (sp > space_bound) {
      result.verdict = Verdict::kSpaceExceeded;
      result.output = BitString();
      return result;
    }
  }
  result.verdict = Verdict::kStepLimitHit;
  result.output = BitString();
  return result;
}

MachineSpec canonicalize(const MachineSpec& spec) {
  const std::uint32_t n = spec.state_count();
  const std::uint32_t advance_p = n;
  const std::uint32_t advance_x = n + 1;
  const std::uint32_t drain_l = n + 2;
  const std::uint32_t drain_r = n + 3;
  MachineSpec out(n + kCleanupStates);
  for (std::uint32_t q = 0; q < n; ++q) {
    for (Top l : kTops) {
      for (Top r : kTops) {
        const Instruction& ins = spec.at(q, l, r);
        out.set(q, l, r,
                ins.op == Op::kHalt
                    ? Instruction::read_p(advance_p, advance_p, advance_x)
                    : ins);
      }
    }
  }
  out.set_all(advance_p, Instruction::read_p(advance_p, advance_p, advance_x));
  out.set_all(advance_x, Instruction::read_x(advance_x, advance_x, drain_l));
  for (Top r : kTops) {
    out.set(drain_l, Top::kZero, r, Instruction::pop_l(drain_l));
    out.set(drain_l, Top::kOne, r, Instruction::pop_l(drain_l));
    // Heads are at their end markers here, so this read only changes state.
    out.set(drain_l, Top::kEmpty, r, Instruction::read_p(drain_r, drain_r, drain_r));
  }
  for (Top l : kTops) {
    out.set(drain_r, l, Top::kZero, Instruction::pop_r(drain_r));
    out.set(drain_r, l, Top::kOne, Instruction::pop_r(drain_r));
    out.set(drain_r, l, Top::kEmpty, Instruction::halt());
  }
  return out;
}

}  // namespace kslab
