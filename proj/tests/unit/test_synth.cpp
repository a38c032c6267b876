#include <cmath>

#include "helpers.hpp"
#include "hubkit/diagnostics.hpp"
#include "hubkit/synth.hpp"

using namespace hubkit;

namespace {

double top1_skew(const PairedSet& set) {
  const auto ranks = row_argsort_desc(cosine_similarity_matrix(set.queries, set.targets));
  return skewness(k_occurrence(ranks, 1)).value;
}

}  // namespace

TEST(Synth, NoiselessConfigIsPerfect) {
  SynthConfig cfg;
  cfg.n_pairs = 200;
  cfg.dim = 16;
  cfg.noise_sigma = 0.0;
  cfg.gap_magnitude = 0.0;
  cfg.hub_fraction = 0.0;
  const PairedSet set = generate_paired(cfg);
  EXPECT_LE((set.queries.data() - set.targets.data()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(evaluate(cosine_similarity_matrix(set.queries, set.targets), set.truth, {1}).r_at.at(1), 100.0);
}

TEST(Synth, ShapesAndUnitRows) {
  SynthConfig cfg;
  cfg.n_pairs = 120;
  cfg.dim = 24;
  cfg.bank_pairs = 50;
  cfg.bank_shift = 0.5;
  const PairedSet set = generate_paired(cfg);
  EXPECT_EQ(set.queries.count(), 120);
  EXPECT_EQ(set.targets.dim(), 24);
  EXPECT_LT(set.queries.max_norm_deviation(), 1e-12);
  EXPECT_LT(set.targets.max_norm_deviation(), 1e-12);
  const BankSet banks = generate_banks(cfg, set);
  EXPECT_EQ(banks.query_bank.count(), 50);
  EXPECT_EQ(banks.target_bank.count(), 50);
  EXPECT_LT(banks.query_bank.max_norm_deviation(), 1e-12);
}

TEST(Synth, Deterministic) {
  SynthConfig cfg;
  cfg.n_pairs = 100;
  cfg.seed = 9;
  const PairedSet a = generate_paired(cfg), b = generate_paired(cfg);
  EXPECT_EQ(a.queries.data(), b.queries.data());
  EXPECT_EQ(a.targets.data(), b.targets.data());
  EXPECT_EQ(generate_banks(cfg, a).query_bank.data(), generate_banks(cfg, b).query_bank.data());
  cfg.seed = 10;
  EXPECT_NE(generate_paired(cfg).queries.data(), a.queries.data());
}

TEST(Synth, HubStrengthRaisesSkew) {
  SynthConfig cfg;
  cfg.n_pairs = 500;
  cfg.hub_fraction = 0.1;
  double none = 0.0, strong = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    cfg.seed = seed;
    cfg.hub_strength = 0.0;
    none += top1_skew(generate_paired(cfg));
    cfg.hub_strength = 0.6;
    strong += top1_skew(generate_paired(cfg));
  }
  EXPECT_GT(strong, none);
}

TEST(Synth, BankShiftMovesBank) {
  SynthConfig cfg;
  cfg.n_pairs = 200;
  const PairedSet set = generate_paired(cfg);
  const EmdConfig ec{100, 2, 0};
  const double near = emd(generate_banks(cfg, set).query_bank, set.queries, ec);
  cfg.bank_shift = 1.0;
  const double far = emd(generate_banks(cfg, set).query_bank, set.queries, ec);
  EXPECT_GT(far, near);
}

TEST(Synth, Validation) {
  const auto bad = [](auto mutate) {
    SynthConfig cfg;
    mutate(cfg);
    EXPECT_HUBKIT_ERROR(generate_paired(cfg), InvalidConfig);
  };
  bad([](SynthConfig& c) { c.dim = 0; });
  bad([](SynthConfig& c) { c.n_pairs = 0; });
  bad([](SynthConfig& c) { c.noise_sigma = -0.1; });
  bad([](SynthConfig& c) { c.hub_fraction = 1.5; });
  bad([](SynthConfig& c) { c.hub_strength = NAN; });
  bad([](SynthConfig& c) { c.bank_shift = -1.0; });
  SynthConfig cfg;
  cfg.n_pairs = 10;
  const PairedSet set = generate_paired(cfg);
  cfg.dim = 8;
  EXPECT_HUBKIT_ERROR(generate_banks(cfg, set), DimMismatch);
}
