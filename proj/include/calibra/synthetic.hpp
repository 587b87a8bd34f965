#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "calibra/dataset.hpp"

namespace calibra {

using Rng = std::mt19937_64;

// Identity recorded in dataset metadata so runs can be audited.
inline constexpr std::string_view kGeneratorName =
    "mt19937_64+std::gamma_distribution/splitmix64-chunked";
// Samples per independently seeded generation chunk. Part of the determinism
// contract: changing it changes every generated dataset.
inline constexpr std::size_t kGenerationChunk = std::size_t{1} << 16;

struct DirichletSpec {
  std::vector<double> alpha;  // one concentration per class
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

// SplitMix64 finalizer applied to base + stream; used to derive independent
// seeds for chunks, cells and replicates.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

// `equal` (all 1), `skewed` (10 then 1s) or an explicit comma-separated list
// whose length must equal `classes`.
std::vector<double> alpha_preset(std::string_view spec, std::size_t classes);

void check_alpha(std::span<const double> alpha);

ProbabilityVector sample_dirichlet(std::span<const double> alpha, Rng& rng);

// Inverse-CDF categorical draw.
std::size_t sample_label(std::span<const double> p, Rng& rng);

// N rows (p_i ~ Dir(alpha), y_i ~ Categorical(p_i)). The result depends only
// on `spec`; `threads` changes wall time, never the data.
Dataset generate_calibrated_dataset(const DirichletSpec& spec,
                                    unsigned threads = 1);

}  // namespace calibra
