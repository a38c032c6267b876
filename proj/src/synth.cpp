#include "hubkit/synth.hpp"

#include <cmath>
#include <string>

#include "hubkit/random.hpp"

namespace hubkit {
namespace {

constexpr std::uint64_t kGapStream = 0;
constexpr std::uint64_t kTestStream = 1;
constexpr std::uint64_t kBankStream = 2;

Vector gaussian_vector(Rng& rng, Index dim, double scale = 1.0) {
  Vector v(dim);
  for (Index k = 0; k < dim; ++k) v[k] = scale * rng.gaussian();
  return v;
}

Vector unit(const Vector& v) { return v / v.norm(); }

Vector gap_vector(const SynthConfig& cfg) {
  Rng rng(mix_seed(cfg.seed, kGapStream));
  return cfg.gap_magnitude * unit(gaussian_vector(rng, cfg.dim));
}

struct RawPairs {
  Matrix queries;
  Matrix targets;
};

RawPairs draw_pairs(Rng& rng, Index n, const SynthConfig& cfg, const Vector& gap,
                    const Vector& shift) {
  const Index d = cfg.dim;
  Matrix t0(n, d);
  for (Index j = 0; j < n; ++j) t0.row(j) = unit(gaussian_vector(rng, d)).transpose();
  Matrix noise(n, d);
  for (Index j = 0; j < n; ++j) noise.row(j) = gaussian_vector(rng, d, cfg.noise_sigma).transpose();

  Vector centroid = Vector::Zero(d);
  for (Index j = 0; j < n; ++j) {
    const Vector q0 = t0.row(j).transpose() + noise.row(j).transpose() + gap;
    centroid += t0.row(j).transpose() + unit(q0);
  }
  centroid = unit(centroid);

  Matrix t = t0;
  const auto hubs = static_cast<std::uint32_t>(std::floor(cfg.hub_fraction * static_cast<double>(n)));
  for (const auto j : rng.sample_without_replacement(static_cast<std::uint32_t>(n), hubs)) {
    const Vector pulled = (1.0 - cfg.hub_strength) * t0.row(j).transpose() + cfg.hub_strength * centroid;
    t.row(j) = unit(pulled).transpose();
  }

  RawPairs out{Matrix(n, d), Matrix(n, d)};
  for (Index j = 0; j < n; ++j) {
    const Vector tj = t.row(j).transpose();
    out.queries.row(j) = unit(unit(tj + noise.row(j).transpose() + gap) + shift).transpose();
    out.targets.row(j) = unit(tj + shift).transpose();
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (dim < 1) fail("dim must be >= 1");
  if (n_pairs < 1) fail("n_pairs must be >= 1");
  if (bank_pairs < 0) fail("bank_pairs must be >= 0");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  if (!(gap_magnitude >= 0.0)) fail("gap_magnitude must be >= 0");
  if (!(hub_fraction >= 0.0 && hub_fraction <= 1.0)) fail("hub_fraction must be in [0,1]");
  if (!(hub_strength >= 0.0 && hub_strength <= 1.0)) fail("hub_strength must be in [0,1]");
  if (!(bank_shift >= 0.0)) fail("bank_shift must be >= 0");
}

PairedSet generate_paired(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.seed, kTestStream));
  RawPairs raw = draw_pairs(rng, cfg.n_pairs, cfg, gap_vector(cfg), Vector::Zero(cfg.dim));
  return {EmbeddingSet(std::move(raw.queries)), EmbeddingSet(std::move(raw.targets)),
          GroundTruth::identity(cfg.n_pairs)};
}

BankSet generate_banks(const SynthConfig& cfg, const PairedSet& base) {
  cfg.validate();
  if (base.queries.dim() != cfg.dim || base.targets.dim() != cfg.dim) {
    throw Error(ErrorCode::DimMismatch, "bank config dim does not match the base split");
  }
  Rng rng(mix_seed(cfg.seed, kBankStream));
  const Vector shift = cfg.bank_shift * unit(gaussian_vector(rng, cfg.dim));
  const Index size = cfg.bank_pairs > 0 ? cfg.bank_pairs : cfg.n_pairs;
  RawPairs raw = draw_pairs(rng, size, cfg, gap_vector(cfg), shift);
  return {EmbeddingSet(std::move(raw.queries), {}), EmbeddingSet(std::move(raw.targets), {})};
}

}  // namespace hubkit
