// Copyright 2026 the retrievalguard authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "rguard/embedding.h"
#include "rguard/error.h"
#include "rguard/normal.h"
#include "rguard/random.h"

namespace rguard {
namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected rguard::Error";
  return ErrorCode::kConfig;
}

TEST(Embedding, DistanceExamples) {
  EXPECT_EQ(l2_distance(EmbeddingVector{0, 0}, EmbeddingVector{0, 0}), 0.0);
  EXPECT_NEAR(l2_distance(EmbeddingVector{1, 0}, EmbeddingVector{0, 1}), 1.41421356, 1e-8);
  EXPECT_NEAR(l2_distance(EmbeddingVector{0.3, 0.4}, EmbeddingVector{0, 0}), 0.5, 1e-15);
}

TEST(Embedding, DistanceDimensionMismatchNamesBoth) {
  try {
    l2_distance(EmbeddingVector{1, 2}, EmbeddingVector{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
    const std::string msg = e.what();
    EXPECT_NE(msg.find('2'), std::string::npos);
    EXPECT_NE(msg.find('3'), std::string::npos);
  }
}

TEST(Embedding, VectorsRejectEmptyAndNonFinite) {
  EXPECT_EQ(code_of([] { EmbeddingVector(std::vector<double>{}); }), ErrorCode::kInvalidParameter);
  EXPECT_EQ(code_of([] { InputVector{1.0, std::nan("")}; }), ErrorCode::kInvalidParameter);
  EXPECT_EQ(code_of([] { InputVector{std::numeric_limits<double>::infinity()}; }), ErrorCode::kInvalidParameter);
  EXPECT_EQ(code_of([] { NormBound(0.0); }), ErrorCode::kInvalidParameter);
}

TEST(Embedding, ValidateNormExamples) {
  EXPECT_NO_THROW(validate_norm(EmbeddingVector{0.6, 0.8}, NormBound(1)));
  EXPECT_NO_THROW(validate_norm(EmbeddingVector{0, 0, 0}, NormBound(1)));
  try {
    validate_norm(EmbeddingVector{2, 0}, NormBound(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNormViolation);
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
  // Slack of 1e-9 absorbs rounding only.
  EXPECT_NO_THROW(validate_norm(EmbeddingVector{1.0 + 5e-10}, NormBound(1)));
  EXPECT_THROW(validate_norm(EmbeddingVector{1.0 + 1e-8}, NormBound(1)), Error);
}

TEST(Embedding, MetricAxiomsOnRandomTriples) {
  const CounterRng rng(3, "test/metric");
  std::uint64_t c = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(5), b(5), d(5);
    for (auto* v : {&a, &b, &d}) {
      for (double& x : *v) x = rng.normal(c++);
    }
    EXPECT_EQ(l2_distance(a, b), l2_distance(b, a));
    EXPECT_LE(l2_distance(a, d), l2_distance(a, b) + l2_distance(b, d) + 1e-12);
    EXPECT_EQ(l2_distance(a, a), 0.0);
  }
}

TEST(Embedding, DuplicateIds) {
  std::vector<LabeledSample> s{{"a", "x", InputVector{0.0}}, {"a", "y", InputVector{1.0}}};
  EXPECT_EQ(code_of([&] { check_unique_ids(s); }), ErrorCode::kInvalidParameter);
}

TEST(Embedding, CompensatedSumRecoversCancellation) {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1000.0);
}

TEST(Normal, CdfFrozenValues) {
  EXPECT_NEAR(normal_cdf(1.0), 0.84134474606854294859, 2.3e-16);
  EXPECT_NEAR(normal_cdf(-1.0), 0.15865525393145705141, 6e-17);
  EXPECT_NEAR(normal_cdf(-8.0) / 6.2209605742717841235e-16, 1.0, 1e-13);
  EXPECT_NEAR(normal_cdf(-30.0) / 4.9067139271481870595e-198, 1.0, 1e-12);
  EXPECT_EQ(normal_cdf(0.0), 0.5);
}

// Oracle values are the quantiles of the exact binary64 arguments.
TEST(Normal, QuantileFrozenValues) {
  EXPECT_NEAR(normal_quantile(0.75), 0.6744897501960817432, 1e-15);
  EXPECT_NEAR(normal_quantile(0.975), 1.9599639845400538556, 1e-15);
  EXPECT_NEAR(normal_quantile(0.55), 0.12566134685507414641, 1e-15);
  EXPECT_NEAR(normal_quantile(0.999999), 4.7534243088170877657, 1e-13);
  EXPECT_NEAR(normal_quantile(1e-10), -6.3613409024040561991, 1e-13);
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_EQ(normal_quantile(0.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(normal_quantile(1.0), std::numeric_limits<double>::infinity());
  EXPECT_EQ(code_of([] { normal_quantile(1.5); }), ErrorCode::kDomain);
  EXPECT_EQ(code_of([] { normal_quantile(-0.1); }), ErrorCode::kDomain);
  EXPECT_EQ(code_of([] { normal_quantile(std::nan("")); }), ErrorCode::kDomain);
}

TEST(Normal, RoundTripOnUpperHalf) {
  for (int i = 0; i <= 100000; ++i) {
    const double p = 0.5 + (0.999999 - 0.5) * i / 100000.0;
    ASSERT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-8) << p;
  }
}

TEST(Normal, QuantileIsOddAboutHalf) {
  for (double p : {0.01, 0.1, 0.3, 0.49}) EXPECT_NEAR(normal_quantile(p), -normal_quantile(1.0 - p), 1e-14);
}

// Known-answer vectors of the Random123 reference implementation.
TEST(Random, PhiloxKnownAnswers) {
  const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero, (std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  const auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(ones, (std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  const auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(pi, (std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Random, StreamsAreDeterministicAndDistinct) {
  const CounterRng a(42, "q/1"), b(42, "q/1"), c(42, "q/2"), d(43, "q/1");
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    EXPECT_EQ(a.bits(i), b.bits(i));
    EXPECT_NE(a.bits(i), c.bits(i));
    EXPECT_NE(a.bits(i), d.bits(i));
    seen.insert(a.bits(i));
  }
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Random, UniformIsOpenInterval) {
  const CounterRng r(0, "u");
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double u = r.uniform(i);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_TRUE(std::isfinite(r.normal(i)));
  }
}

}  // namespace
}  // namespace rguard
