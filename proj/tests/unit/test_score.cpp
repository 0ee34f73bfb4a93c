#include "meetmate/score.hpp"

#include "support.hpp"

#include <doctest.h>

using meetmate::Score;

TEST_SUITE("score") {
  TEST_CASE("small values behave like uint64") {
    mmtest::mm::gen::Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
      const auto a = rng.next() >> 2;
      const auto b = rng.next() >> 2;
      const auto sa = Score::from_u64(a);
      const auto sb = Score::from_u64(b);
      CHECK((sa < sb) == (a < b));
      CHECK((sa == sb) == (a == b));
      CHECK((sa + sb).to_u64() == a + b);
      if (a >= b) CHECK((sa - sb).to_u64() == a - b);
      CHECK(sa.to_string() == std::to_string(a));
    }
  }

  TEST_CASE("wide values") {
    Score s;
    s.set_bit(100);
    CHECK_FALSE(s.fits_u64());
    CHECK_THROWS_AS(s.to_u64(), std::overflow_error);
    CHECK(s.to_string() == "1267650600228229401496703205376");
    Score t;
    t.set_bit(99);
    CHECK(t < s);
    CHECK((t + t) == s);
    CHECK((s - t) == t);
    Score big;
    for (int b = 0; b < 128; ++b) big.set_bit(static_cast<std::size_t>(b));
    CHECK(big.to_string() == "340282366920938463463374607431768211455");
  }

  TEST_CASE("bit order equals lexicographic order of the bit vectors") {
    for (int n = 1; n <= 8; ++n) {
      for (unsigned a = 0; a < (1u << n); ++a) {
        Score s;
        for (int b = 0; b < n; ++b) {
          if (a & (1u << b)) s.set_bit(static_cast<std::size_t>(b + 64 * (n % 3)));
        }
        for (int b = 0; b < n; ++b) CHECK(s.test_bit(static_cast<std::size_t>(b + 64 * (n % 3))) == bool(a & (1u << b)));
      }
    }
  }

  TEST_CASE("shifted_with appends low bits") {
    const auto s = Score::from_u64(5).shifted_with(3, 6);
    CHECK(s.to_u64() == 46);
    Score wide;
    wide.set_bit(70);
    const auto w = wide.shifted_with(64, 7);
    CHECK(w.test_bit(134));
    CHECK(w.test_bit(0));
    CHECK(w.test_bit(1));
    CHECK(w.test_bit(2));
    CHECK_FALSE(w.test_bit(3));
    CHECK(Score().shifted_with(4, 0).is_zero());
  }
}
