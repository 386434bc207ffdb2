#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "ocsim/rng.hpp"

using namespace ocsim;

namespace {

// Independent textbook copies used as oracles for the production generator.

uint64_t ref_splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RefXoshiro {
  uint64_t s[4];

  explicit RefXoshiro(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s) w = ref_splitmix64(x);
  }

  static uint64_t rotl(uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  uint64_t next() {
    uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }
};

}  // namespace

TEST_CASE("fnv1a64 reproduces the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("generator matches the reference implementation") {
  for (uint64_t seed : {0ULL, 1ULL, 42ULL, 0xdeadbeefULL,
                        0xffffffffffffffffULL}) {
    Rng rng(seed);
    RefXoshiro ref(seed);
    for (int i = 0; i < 1000; ++i) CHECK(rng.next() == ref.next());
  }
}

TEST_CASE("same seed gives the same draws") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("uniform lies in the half-open unit interval") {
  Rng rng(9);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = u < lo ? u : lo;
    hi = u > hi ? u : hi;
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("bounded draws stay below the bound and hit every value") {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    uint32_t v = rng.bounded(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) {
    CHECK(c > 9000);  // within 10% of the expected 10000
    CHECK(c < 11000);
  }
}

TEST_CASE("bounded with n=1 is always zero") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) CHECK(rng.bounded(1) == 0);
}

TEST_CASE("named streams are stable and pairwise distinct") {
  Rng a = Rng::stream(5, "outcome");
  Rng b = Rng::stream(5, "outcome");
  for (int i = 0; i < 50; ++i) CHECK(a.next() == b.next());

  const char* names[] = {"outcome", "prediction", "adversary"};
  std::set<uint64_t> firsts;
  for (const char* name : names)
    firsts.insert(Rng::stream(5, name).next());
  CHECK(firsts.size() == 3);

  // stream derivation is seed ^ fnv1a64(name) fed through splitmix64
  uint64_t x = 5 ^ fnv1a64("outcome");
  uint64_t derived = ref_splitmix64(x);
  Rng c = Rng::stream(5, "outcome");
  Rng d(derived);
  for (int i = 0; i < 50; ++i) CHECK(c.next() == d.next());
}

TEST_CASE("different seeds decorrelate streams of the same name") {
  Rng a = Rng::stream(1, "outcome");
  Rng b = Rng::stream(2, "outcome");
  int equal = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next() == b.next()) ++equal;
  CHECK(equal == 0);
}
