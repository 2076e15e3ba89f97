#ifndef KSLAB_SUBSET_H_
#define KSLAB_SUBSET_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kslab {

// Subset of {1..k} as a bitmask: element i is bit i-1.
using SubsetMask = std::uint32_t;

inline constexpr SubsetMask full_mask(unsigned k) { return (SubsetMask{1} << k) - 1; }
inline constexpr SubsetMask singleton(unsigned i) { return SubsetMask{1} << (i - 1); }
inline int subset_size(SubsetMask m) { return __builtin_popcount(m); }

// Elements in ascending order.
std::vector<unsigned> subset_elements(SubsetMask m);
// "{1,3}"; "{}" for the empty set.
std::string format_subset(SubsetMask m);
// Accepts "{1,3}" or "{ 1, 3 }"; throws std::invalid_argument otherwise.
SubsetMask parse_subset(std::string_view text);

}  // namespace kslab

#endif  // KSLAB_SUBSET_H_
