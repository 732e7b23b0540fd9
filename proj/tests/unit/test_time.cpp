#include <catch_amalgamated.hpp>

#include <random>

#include "carbon/errors.hpp"
#include "carbon/hash.hpp"
#include "carbon/time.hpp"
#include "support/oracles.hpp"

using namespace carbon;

TEST_CASE("timestamps parse against the civil-day oracle") {
  CHECK(Timestamp::parse("1970-01-01T00:00:00Z").seconds == 0);
  CHECK(Timestamp::parse("2025-06-01T12:34:56Z").seconds == oracle::epoch_seconds(2025, 6, 1, 12, 34, 56));
  CHECK(Timestamp::parse("2024-02-29T23:59:59Z").seconds == oracle::epoch_seconds(2024, 2, 29, 23, 59, 59));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const int y = 1971 + static_cast<int>(rng() % 100);
    const unsigned m = 1 + rng() % 12;
    const unsigned d = 1 + rng() % 28;
    const int h = static_cast<int>(rng() % 24), mi = static_cast<int>(rng() % 60), s = static_cast<int>(rng() % 60);
    char text[32];
    std::snprintf(text, sizeof(text), "%04d-%02u-%02uT%02d:%02d:%02dZ", y, m, d, h, mi, s);
    const Timestamp ts = Timestamp::parse(text);
    REQUIRE(ts.seconds == oracle::epoch_seconds(y, m, d, h, mi, s));
    REQUIRE(ts.to_string() == text);
  }
}

TEST_CASE("timestamp parsing is strict") {
  for (const char* bad : {"2025-06-01 00:00:00Z", "2025-06-01T00:00:00", "2025-13-01T00:00:00Z",
                          "2025-02-30T00:00:00Z", "2025-06-01T24:00:00Z", "2025-6-01T00:00:00Z", ""}) {
    CHECK_THROWS_AS(Timestamp::parse(bad), Error);
  }
}

TEST_CASE("dates and windows") {
  const Date d = Date::parse("2024-12-31");
  CHECK(d.next().to_string() == "2025-01-01");
  CHECK(d.compact() == "20241231");
  CHECK(d.midnight().seconds == oracle::epoch_seconds(2024, 12, 31));
  CHECK(Date::of(Timestamp::parse("2025-03-01T23:59:59Z")).to_string() == "2025-03-01");
  CHECK(Date::parse("2024-02-28").next().to_string() == "2024-02-29");

  const Timestamp midnight = Date::parse("2025-06-01").midnight();
  CHECK(window_index(midnight) == 0);
  CHECK(window_index(midnight + 4 * 60) == 0);
  CHECK(window_index(midnight + 5 * 60) == 1);
  CHECK(window_index(midnight + 1439 * 60) == 287);
  CHECK(minute_label(midnight + 13 * 3600 + 7 * 60 + 30) == "13:07");
  CHECK(align_to_minute(midnight + 125).seconds == midnight.seconds + 120);

  try {
    window_index(midnight + 30);
    FAIL("expected NonAligned");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kNonAligned);
  }
}

TEST_CASE("sha-256 and hmac match published vectors") {
  CHECK(digest("").to_hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(digest("abc").to_hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  // RFC 4231 test case 2
  CHECK(hmac("Jefe", "what do ya want for nothing?").to_hex() ==
        "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");

  const Hash256 h = digest("round trip");
  CHECK(Hash256::from_hex(h.to_hex()) == h);
  CHECK_THROWS_AS(Hash256::from_hex(std::string(64, 'A')), Error);
  CHECK_THROWS_AS(Hash256::from_hex("abc"), Error);
  CHECK(Hash256::zero().is_zero());
}
