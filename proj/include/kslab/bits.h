#ifndef KSLAB_BITS_H_
#define KSLAB_BITS_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace kslab {

// A binary string. Stored as '0'/'1' characters so that values print and
// hash directly; every string handled by the laboratory is short.
class BitString {
 public:
  BitString() = default;

  // Throws std::invalid_argument on characters other than '0' and '1'.
  static BitString parse(std::string_view text);

  // The `length` low bits of `value`, most significant first.
  static BitString from_uint(std::uint64_t value, std::size_t length);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_[i] - '0'; }
  int back() const { return bits_.back() - '0'; }

  void push_back(int bit) { bits_.push_back(bit ? '1' : '0'); }
  void pop_back() { bits_.pop_back(); }
  void append(const BitString& other) { bits_ += other.bits_; }
  BitString substr(std::size_t pos, std::size_t len = std::string::npos) const;

  // Every bit written twice: "01" -> "0011".
  BitString doubled() const;

  const std::string& str() const { return bits_; }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString& a, const BitString& b) {
    return a.bits_ <=> b.bits_;
  }

 private:
  std::string bits_;
};

BitString operator+(BitString a, const BitString& b);

// Length first, then lexicographic: the enumeration order for programs.
inline bool shortlex_less(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// "len:hex" with the bits packed most significant first; "0:" for the empty
// string. Used by the cache file.
std::string to_hex_field(const BitString& bits);
BitString from_hex_field(std::string_view field);

// ceil(log2(v + 2)); defined for every v >= 0.
int log_term(std::uint64_t v);

}  // namespace kslab

template <>
struct std::hash<kslab::BitString> {
  std::size_t operator()(const kslab::BitString& b) const noexcept {
    return std::hash<std::string>{}(b.str());
  }
};

#endif  // KSLAB_BITS_H_
