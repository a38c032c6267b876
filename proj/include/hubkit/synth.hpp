#pragma once

#include <cstdint>

#include "hubkit/core.hpp"
#include "hubkit/retrieval.hpp"

namespace hubkit {

/// Seeded generator of paired query/target embeddings with controllable
/// hubness, modality gap and train/test shift.
///
/// Generation of one paired split with n pairs, from one Rng stream:
///   1. gap vector   gamma = gap_magnitude * unit(N(0, I_d))   (seed-level,
///                   shared by the test split and every bank)
///   2. targets      t0_j  = unit(N(0, I_d))
///   3. noise        e_j   ~ N(0, noise_sigma^2 I_d), per coordinate
///   4. centroid     c     = unit(mean_j t0_j + mean_j unit(t0_j + e_j + gamma))
///   5. hubs         floor(hub_fraction * n) targets chosen without
///                   replacement; t_j = unit((1 - hub_strength) t0_j + hub_strength c)
///   6. queries      q_j   = unit(unit(t_j + e_j + gamma) + shift)
///                   targets t_j = unit(t_j + shift)
/// The test split uses shift = 0. Banks use a fresh stream and one random
/// offset of length bank_shift shared by bank queries and bank targets.
struct SynthConfig {
  Index dim = 64;
  Index n_pairs = 1000;
  double noise_sigma = 0.22;
  double gap_magnitude = 0.5;
  double hub_fraction = 0.1;
  double hub_strength = 0.6;
  double bank_shift = 0.0;
  /// Pairs drawn for each bank; 0 means n_pairs.
  Index bank_pairs = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PairedSet {
  EmbeddingSet queries;
  EmbeddingSet targets;
  GroundTruth truth;
};

struct BankSet {
  EmbeddingSet query_bank;
  EmbeddingSet target_bank;
};

PairedSet generate_paired(const SynthConfig& cfg);

/// Fresh pairs from the same process (same gap vector), disjoint from the test
/// pairs, shifted by a random offset of length `cfg.bank_shift`.
BankSet generate_banks(const SynthConfig& cfg, const PairedSet& base);

}  // namespace hubkit
