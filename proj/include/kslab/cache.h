#ifndef KSLAB_CACHE_H_
#define KSLAB_CACHE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "kslab/kolmo.h"

namespace kslab {

// Append-only store of ks results in <dir>/ks-cache.txt:
//   kslab-cache 1
//   <tag> <y> <x> <s> <cap> <value|nf> <witness|->
// Strings use the "len:hex" field form, numbers are decimal.
class ResultCache {
 public:
  // Creates the directory and file if needed. Throws std::runtime_error on
  // I/O failure or a malformed existing file.
  explicit ResultCache(std::filesystem::path dir);

  std::optional<ComplexityResult> get(const std::string& tag, const BitString& y,
                                      const BitString& x, std::size_t s,
                                      std::size_t cap) const;
  // Idempotent for identical records; a conflicting value for an existing
  // key throws.
  void put(const std::string& tag, const ComplexityResult& result);

  std::size_t size() const;
  const std::filesystem::path& file() const { return file_; }

  // $KSLAB_CACHE_DIR, else ./.kslab-cache.
  static std::filesystem::path default_dir();

 private:
  static std::string key(const std::string& tag, const BitString& y, const BitString& x,
                         std::size_t s, std::size_t cap);

  std::filesystem::path file_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, ComplexityResult> records_;
};

}  // namespace kslab

#endif  // KSLAB_CACHE_H_
