#include "kslab/subset.h"

#include <cctype>
#include <stdexcept>

namespace kslab {

std::vector<unsigned> subset_elements(SubsetMask m) {
  std::vector<unsigned> out;
  for (unsigned i = 1; m; ++i, m >>= 1) {
    if (m & 1) out.push_back(i);
  }
  return out;
}

std::string format_subset(SubsetMask m) {
  std::string out = "{";
  bool first = true;
  for (unsigned i : subset_elements(m)) {
    if (!first) out += ',';
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

SubsetMask parse_subset(std::string_view text) {
  auto fail = [&]() -> SubsetMask {
    throw std::invalid_argument("bad subset: " + std::string(text));
  };
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip();
  if (i >= text.size() || text[i] != '{') return fail();
  ++i;
  SubsetMask mask = 0;
  skip();
  if (i < text.size() && text[i] == '}') {
    ++i;
  } else {
    for (;;) {
      skip();
      unsigned v = 0;
      std::size_t digits = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        v = v * 10 + static_cast<unsigned>(text[i] - '0');
        ++i;
        if (++digits > 2) return fail();
      }
      if (digits == 0 || v == 0 || v > 31) return fail();
      mask |= singleton(v);
      skip();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '}') {
        ++i;
        break;
      }
      return fail();
    }
  }
  skip();
  if (i != text.size()) return fail();
  return mask;
}

}  // namespace kslab
