#include "kslab/cache.h"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace kslab {

namespace {

constexpr const char* kHeader = "kslab-cache 1";

std::string format_record(const std::string& tag, const ComplexityResult& r) {
  std::ostringstream out;
  out << tag << ' ' << to_hex_field(r.target) << ' ' << to_hex_field(r.condition) << ' '
      << r.s << ' ' << r.cap << ' ';
  if (r.value) {
    out << *r.value;
  } else {
    out << "nf";
  }
  out << ' ' << (r.witness ? to_hex_field(*r.witness) : std::string("-"));
  return out.str();
}

}  // namespace

ResultCache::ResultCache(std::filesystem::path dir) : file_(dir / "ks-cache.txt") {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create cache directory " + dir.string());
  if (!std::filesystem::exists(file_)) {
    std::ofstream out(file_);
    out << kHeader << '\n';
    if (!out) throw std::runtime_error("cannot write " + file_.string());
    return;
  }
  std::ifstream in(file_);
  if (!in) throw std::runtime_error("cannot read " + file_.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error(file_.string() + ": missing format header");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tag, y, x, value, witness;
    ComplexityResult r;
    if (!(fields >> tag >> y >> x >> r.s >> r.cap >> value >> witness)) {
      throw std::runtime_error(file_.string() + ":" + std::to_string(lineno) +
                               ": malformed record");
    }
    try {
      r.target = from_hex_field(y);
      r.condition = from_hex_field(x);
      if (value != "nf") r.value = std::stoull(value);
      if (witness != "-") r.witness = from_hex_field(witness);
    } catch (const std::exception& e) {
      throw std::runtime_error(file_.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    records_[key(tag, r.target, r.condition, r.s, r.cap)] = std::move(r);
  }
}

std::string ResultCache::key(const std::string& tag, const BitString& y, const BitString& x,
                             std::size_t s, std::size_t cap) {
  return tag + ' ' + to_hex_field(y) + ' ' + to_hex_field(x) + ' ' + std::to_string(s) + ' ' +
         std::to_string(cap);
}

std::optional<ComplexityResult> ResultCache::get(const std::string& tag, const BitString& y,
                                                 const BitString& x, std::size_t s,
                                                 std::size_t cap) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(key(tag, y, x, s, cap));
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void ResultCache::put(const std::string& tag, const ComplexityResult& result) {
  const std::string k = key(tag, result.target, result.condition, result.s, result.cap);
  std::unique_lock lock(mu_);
  auto it = records_.find(k);
  if (it != records_.end()) {
    if (it->second == result) return;
    throw std::runtime_error("cache conflict for key " + k);
  }
  std::ofstream out(file_, std::ios::app);
  out << format_record(tag, result) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("cannot append to " + file_.string());
  records_.emplace(k, result);
}

std::size_t ResultCache::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::filesystem::path ResultCache::default_dir() {
  if (const char* env = std::getenv("KSLAB_CACHE_DIR"); env && *env) return env;
  return ".kslab-cache";
}

}  // namespace kslab
