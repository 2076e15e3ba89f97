#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "kslab/cache.h"
#include "kslab/kolmo.h"

using namespace kslab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* name) {
  fs::path dir = fs::temp_directory_path() /
                 ("kslab-test-" + std::string(name) + "-" + std::to_string(std::random_device{}()));
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("put then get, absent keys, idempotence") {
  const fs::path dir = fresh_dir("basic");
  const std::string tag = interpreter_tag();
  ComplexityResult r = ks(BitString::parse("01"), {}, 40, 9);
  ComplexityResult nf = ks(BitString::parse("0110"), {}, 17, 6);
  REQUIRE(r.found());
  REQUIRE_FALSE(nf.found());
  {
    ResultCache cache(dir);
    CHECK(cache.size() == 0);
    CHECK_FALSE(cache.get(tag, r.target, r.condition, r.s, r.cap).has_value());
    cache.put(tag, r);
    cache.put(tag, nf);
    CHECK(cache.get(tag, r.target, r.condition, r.s, r.cap) == r);
    CHECK(cache.get(tag, nf.target, nf.condition, nf.s, nf.cap) == nf);
    cache.put(tag, r);
    CHECK(cache.size() == 2);
    CHECK_FALSE(cache.get("other-tag", r.target, r.condition, r.s, r.cap).has_value());

    ComplexityResult wrong = r;
    wrong.value = *r.value + 1;
    CHECK_THROWS(cache.put(tag, wrong));
  }
  // A second instance reads the records back.
  ResultCache again(dir);
  CHECK(again.size() == 2);
  CHECK(again.get(tag, r.target, r.condition, r.s, r.cap) == r);
  CHECK(again.get(tag, nf.target, nf.condition, nf.s, nf.cap) == nf);
  fs::remove_all(dir);
}

TEST_CASE("file format") {
  const fs::path dir = fresh_dir("format");
  {
    ResultCache cache(dir);
    cache.put(interpreter_tag(), ks({}, {}, 20, 4));
  }
  std::ifstream in(dir / "ks-cache.txt");
  std::string header, record;
  std::getline(in, header);
  std::getline(in, record);
  CHECK(header == "kslab-cache 1");
  CHECK(record == interpreter_tag() + " 0: 0: 20 4 2 2:4");
  fs::remove_all(dir);
}

TEST_CASE("malformed files are refused") {
  const fs::path dir = fresh_dir("bad");
  fs::create_directories(dir);
  std::ofstream(dir / "ks-cache.txt") << "not a cache\n";
  CHECK_THROWS_AS(ResultCache{dir}, std::runtime_error);
  std::ofstream(dir / "ks-cache.txt") << "kslab-cache 1\ntag 0: 0: x 4 2 2:4\n";
  CHECK_THROWS_AS(ResultCache{dir}, std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("cache directory override") {
  setenv("KSLAB_CACHE_DIR", "/tmp/somewhere", 1);
  CHECK(ResultCache::default_dir() == fs::path("/tmp/somewhere"));
  unsetenv("KSLAB_CACHE_DIR");
  CHECK(ResultCache::default_dir() == fs::path(".kslab-cache"));
}
