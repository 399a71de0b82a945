/*
   Copyright 2026 The jdsde Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <cmath>

#include <jdsde/random.hpp>

namespace jdsde {
namespace {

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswers) {
  {
    const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  }
  {
    const auto out = Philox4x32::apply({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                       {0xffffffff, 0xffffffff});
    EXPECT_EQ(out, (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  }
  {
    const auto out = Philox4x32::apply({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                       {0xa4093822, 0x299f31d0});
    EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
  }
}

TEST(CounterStream, DeterministicAndDistinctPerStream) {
  CounterStream a(42, 7, StreamId::gaussian), b(42, 7, StreamId::gaussian);
  CounterStream other_stream(42, 7, StreamId::jump_count), other_path(42, 8, StreamId::gaussian);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, other_stream.next_u64());
    EXPECT_NE(x, other_path.next_u64());
  }
}

TEST(CounterStream, UniformsInOpenUnitInterval) {
  CounterStream s(1, 2, StreamId::jump_locations);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_open_uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // mean 1/2, sd of the mean sqrt(1/12/n)
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(NormalQuantile, ReferenceValues) {
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-13);
  EXPECT_NEAR(normal_quantile(0.8413447460685429), 1.0, 1e-12);
  EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-9);
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
}

TEST(NormalQuantile, InvertsErfcAndIsOdd) {
  for (double p : {1e-300, 1e-12, 0.001, 0.02, 0.1, 0.3, 0.49, 0.7, 0.99, 1 - 1e-9}) {
    const double x = normal_quantile(p);
    EXPECT_NEAR(0.5 * std::erfc(-x / std::sqrt(2.0)) / p, 1.0, 1e-12) << p;
    const double upper = 1.0 - p;  // compare against the tail that is actually representable
    if (upper < 1.0) {
      EXPECT_NEAR(normal_quantile(upper), -normal_quantile(1.0 - upper), 1e-9 * (1 + std::abs(x)));
    }
  }
}

TEST(Poisson, InversionBoundaries) {
  const double p0 = std::exp(-1.0);
  EXPECT_EQ(poisson_from_uniform(1.0, p0 * 0.999), 0u);
  EXPECT_EQ(poisson_from_uniform(1.0, p0 * 1.001), 1u);
  EXPECT_EQ(poisson_from_uniform(1.0, 2 * p0 * 1.001), 2u);  // P(N<=1) = 2/e
  EXPECT_THROW(poisson_from_uniform(0.0, 0.5), DomainError);
}

}  // namespace
}  // namespace jdsde
