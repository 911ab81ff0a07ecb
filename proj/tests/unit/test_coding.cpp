#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "georelay/coding.hpp"

using namespace georelay;

TEST(Coding, MsrPointForDefault) {
  const OperatingPoint op = msr_point(30, 3, 4);
  EXPECT_EQ(op.alpha, Rational(10));
  EXPECT_EQ(op.beta, Rational(5));
  EXPECT_EQ(op.gamma, Rational(20));
}

TEST(Coding, MbrPointIsFractionalForDefault) {
  const OperatingPoint op = mbr_point(30, 3, 4);
  // gamma = 2MD / (2KD - K^2 + K) = 240 / 18
  EXPECT_EQ(op.gamma, Rational(40, 3));
  EXPECT_EQ(op.alpha, op.gamma);
  EXPECT_EQ(op.beta, Rational(10, 3));
  EXPECT_THROW(instantiate_point(RegenPoint::kMbr, 30, 5, 3, 4, 1.0), std::invalid_argument);
  const RegenParams p = instantiate_point(RegenPoint::kMbr, 9, 5, 3, 4, 1.0);
  EXPECT_TRUE(validate_params(p).ok) << validate_params(p).violation;
}

TEST(Coding, MsrAndMbrAreTradeoffEndpoints) {
  for (int m = 1; m <= 40; ++m) {
    for (int k = 1; k <= 5; ++k) {
      for (int d = k; d <= 8; ++d) {
        const auto msr = msr_point(m, k, d);
        const auto mbr = mbr_point(m, k, d);
        EXPECT_LE(msr.alpha, mbr.alpha);
        EXPECT_GE(msr.gamma, mbr.gamma);
        EXPECT_EQ(msr.alpha * k, Rational(m));
      }
    }
  }
}

TEST(Coding, DefaultStorageBound) {
  const ParamReport r = validate_params(RegenParams::standard());
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.storage_sum, 30);
  RegenParams bad = RegenParams::standard();
  bad.n_files = 31;
  EXPECT_FALSE(validate_params(bad).ok);
  bad = RegenParams::standard();
  bad.repair_d = 5;
  EXPECT_FALSE(validate_params(bad).ok);
}

TEST(Coding, RepairRequirement) {
  const RepairRequirement r = repair_requirement(RegenPoint::kMsr, RegenParams::standard());
  EXPECT_EQ(r.helpers, 4);
  EXPECT_EQ(r.per_helper, 5);
  EXPECT_EQ(r.total, 20);
  const RegenParams mbr = instantiate_point(RegenPoint::kMbr, 9, 5, 3, 4, 1.0);
  const RepairRequirement rb = repair_requirement(RegenPoint::kMbr, mbr);
  EXPECT_EQ(rb.helpers * rb.per_helper, mbr.per_node_files);
}

TEST(Coding, EncodeIsDeterministicPerSeed) {
  const auto f = FiniteField::gf256();
  const CodedStore a = encode(RegenParams::standard(), f, 42);
  const CodedStore b = encode(RegenParams::standard(), f, 42);
  const CodedStore c = encode(RegenParams::standard(), f, 43);
  EXPECT_EQ(a.source, b.source);
  EXPECT_EQ(a.encoders, b.encoders);
  EXPECT_EQ(a.payloads, b.payloads);
  EXPECT_NE(a.encoders, c.encoders);
}

TEST(Coding, AnyKNodesReconstructAndFewerFail) {
  const auto f = FiniteField::gf256();
  const RegenParams p = RegenParams::standard();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const CodedStore store = encode(p, f, seed);
    for (int a = 0; a < 5; ++a) {
      for (int b = a + 1; b < 5; ++b) {
        std::vector<int> two(5, 0);
        two[a] = two[b] = 10;
        EXPECT_FALSE(check_mu_reconstructable(store, two));
        EXPECT_THROW(reconstruct(store, download(store, prefix_selectors(two))), std::domain_error);
        for (int c = b + 1; c < 5; ++c) {
          std::vector<int> mu = two;
          mu[c] = 10;
          EXPECT_TRUE(check_mu_reconstructable(store, mu));
          EXPECT_EQ(reconstruct(store, download(store, prefix_selectors(mu))), store.source);
        }
      }
    }
  }
}

TEST(Coding, ScalarAndZeroSourceCases) {
  const auto f = FiniteField::gf256();
  const RegenParams scalar{1, 1, 1, 1, 1, 1, 8.0};
  const CodedStore s = encode_source(scalar, f, 9, {0x53});
  EXPECT_EQ(s.payloads[0][0], f.mul(s.encoders[0].at(0, 0), 0x53));
  const CodedStore z = encode_source(RegenParams::standard(), f, 9, std::vector<Symbol>(30, 0));
  for (const auto& m : z.payloads) {
    for (Symbol x : m) EXPECT_EQ(x, 0u);
  }
}

TEST(Coding, RequiredPatternsAreHonoured) {
  EncodeOptions opt;
  opt.required_patterns = {{0, 2, 8, 10, 10}, {0, 0, 10, 10, 10}, {4, 4, 4, 8, 10}};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CodedStore store = encode(RegenParams::standard(), FiniteField::gf256(), seed, opt);
    for (const auto& mu : opt.required_patterns) EXPECT_TRUE(check_mu_reconstructable(store, mu));
  }
}

TEST(Coding, SmallFieldMayNeedRetries) {
  EncodeOptions opt;
  opt.min_field_order = 2;
  opt.max_attempts = 10000;
  const RegenParams p{4, 4, 2, 3, 2, 1, 1.0};
  ASSERT_TRUE(validate_params(p).ok);
  int retried = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const CodedStore store = encode(p, FiniteField::prime(2), seed, opt);
    EXPECT_GE(store.attempts, 1);
    if (store.attempts > 1) ++retried;
  }
  EXPECT_GT(retried, 0);
  EXPECT_THROW(encode(p, FiniteField::prime(2), 0), std::invalid_argument);  // below min field order
}

TEST(Coding, CheckMuValidatesInput) {
  const CodedStore store = encode(RegenParams::standard(), FiniteField::gf256(), 1);
  EXPECT_THROW(check_mu_reconstructable(store, std::vector<int>{10, 10, 10}), std::invalid_argument);
  EXPECT_THROW(check_mu_reconstructable(store, std::vector<int>{11, 10, 9, 0, 0}), std::invalid_argument);
  EXPECT_FALSE(check_mu_reconstructable(store, std::vector<int>{10, 10, 9, 0, 0}));
}

TEST(Coding, ArbitrarySelectorsReconstruct) {
  const CodedStore store = encode(RegenParams::standard(), FiniteField::gf256(), 5);
  Selectors sel(5);
  sel[0] = {9, 3};
  sel[1] = {0, 5, 7};
  sel[2] = {1, 2, 4, 6, 8};
  sel[3] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  sel[4] = {9, 8, 7, 6, 5, 4, 3, 2, 1, 0};
  ASSERT_TRUE(check_mu_reconstructable(store, sel));
  EXPECT_EQ(reconstruct(store, download(store, sel)), store.source);
}

TEST(Coding, DumpLoadRoundTrip) {
  const CodedStore store = encode(RegenParams::standard(), FiniteField::gf256(), 77);
  std::stringstream buf;
  dump(store, buf);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 4), "GRCS");
  const CodedStore back = load(buf);
  EXPECT_EQ(back.field.order(), 256u);
  EXPECT_EQ(back.params.n_files, 30);
  EXPECT_EQ(back.params.reconstruct_k, 3);
  EXPECT_EQ(back.params.repair_d, 4);
  EXPECT_EQ(back.params.per_helper_files, 5);
  EXPECT_EQ(back.params.file_bits, store.params.file_bits);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.encoders, store.encoders);
  EXPECT_EQ(back.source, store.source);
  EXPECT_EQ(back.payloads, store.payloads);
  std::stringstream again;
  dump(back, again);
  EXPECT_EQ(again.str(), bytes);

  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(load(truncated), std::runtime_error);
  std::stringstream garbage("XXXXnot a store");
  EXPECT_THROW(load(garbage), std::runtime_error);
}
