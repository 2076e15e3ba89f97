#include "kslab/bits.h"

#include <charconv>
#include <stdexcept>

namespace kslab {

BitString BitString::parse(std::string_view text) {
  BitString out;
  out.bits_.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("not a bit string: '" + std::string(text) +
                                  "'");
    }
    out.bits_.push_back(c);
  }
  return out;
}

BitString BitString::from_uint(std::uint64_t value, std::size_t length) {
  BitString out;
  out.bits_.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    out.bits_[length - 1 - i] = ((value >> i) & 1) ? '1' : '0';
  }
  return out;
}

BitString BitString::substr(std::size_t pos, std::size_t len) const {
  BitString out;
  out.bits_ = bits_.substr(pos, len);
  return out;
}

BitString BitString::doubled() const {
  BitString out;
  out.bits_.reserve(2 * bits_.size());
  for (char c : bits_) {
    out.bits_.push_back(c);
    out.bits_.push_back(c);
  }
  return out;
}

BitString operator+(BitString a, const BitString& b) {
  a.append(b);
  return a;
}

std::string to_hex_field(const BitString& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = std::to_string(bits.size()) + ":";
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nibble <<= 1;
      if (i + j < bits.size()) nibble |= bits[i + j];
    }
    out.push_back(kDigits[nibble]);
  }
  return out;
}

BitString from_hex_field(std::string_view field) {
  auto colon = field.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("bad hex field");
  }
  std::size_t len = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + colon, len);
  if (ec != std::errc() || ptr != field.data() + colon) {
    throw std::invalid_argument("bad hex field length");
  }
  std::string_view hex = field.substr(colon + 1);
  if (hex.size() != (len + 3) / 4) {
    throw std::invalid_argument("hex field size mismatch");
  }
  BitString out;
  for (std::size_t i = 0; i < hex.size(); ++i) {
    char c = hex[i];
    int nibble;
    if (c >= '0' && c <= '9') {
      nibble = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      nibble = c - 'a' + 10;
    } else {
      throw std::invalid_argument("bad hex digit");
    }
    for (int j = 3; j >= 0; --j) {
      if (out.size() < len) out.push_back((nibble >> j) & 1);
    }
  }
  return out;
}

int log_term(std::uint64_t v) {
  std::uint64_t arg = v + 2;
  int bits = 0;
  while ((std::uint64_t{1} << bits) < arg) ++bits;
  return bits;
}

}  // namespace kslab
