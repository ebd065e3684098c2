#include "doctest.h"

#include <set>

#include "collapsim/rng.hpp"

using namespace collapsim::rng;

// Known-answer vectors for Philox4x32-10.
TEST_CASE("philox4x32 known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == Philox4x32Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Philox4x32Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Philox4x32Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox is usable at compile time") {
  static_assert(philox4x32({0, 0, 0, 0}, {0, 0})[0] == 0x6627e8d5u);
  static_assert(key_from_seed(0x0123456789abcdefull) == Philox4x32Key{0x89abcdef, 0x01234567});
}

TEST_CASE("to_unit maps 64 bits into [0, 1)") {
  CHECK(to_unit(0) == 0.0);
  CHECK(to_unit(~0ull) < 1.0);
  CHECK(to_unit(~0ull) == 1.0 - 0x1p-53);
  CHECK(to_unit(1ull << 63) == 0.5);
}

TEST_CASE("trial uniforms are a pure function of seed, trial and stream") {
  const UniformPair a = trial_uniforms(7, 12345, TrialStream::HitTimes);
  const UniformPair b = trial_uniforms(7, 12345, TrialStream::HitTimes);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  CHECK(trial_uniforms(7, 12345, TrialStream::Outcome).first != a.first);
  CHECK(trial_uniforms(8, 12345, TrialStream::HitTimes).first != a.first);
  CHECK(trial_uniforms(7, 12346, TrialStream::HitTimes).first != a.first);
  // Trials beyond 2^32 use the high counter word.
  CHECK(trial_uniforms(7, 12345 + (1ull << 32), TrialStream::HitTimes).first != a.first);
}

TEST_CASE("uniform streams have the right first two moments") {
  double sum = 0.0;
  double sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = trial_uniforms(3, i, TrialStream::HitTimes).first;
    sum += u;
    sum2 += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(sum2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.005));
}

TEST_CASE("counter stream buffers the second draw of each block") {
  CounterStream s(11, 2);
  std::set<double> seen;
  for (int i = 0; i < 10; ++i) seen.insert(s.uniform());
  CHECK(seen.size() == 10);
  CHECK(s.blocks_consumed() == 5);
  CounterStream t(11, 2);
  CounterStream u(11, 3);
  CHECK(t.uniform() != u.uniform());
}
