#include "calibra/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>
#include <string>
#include <thread>

#include "calibra/error.hpp"

namespace calibra {
namespace {

// Gamma(alpha_c, 1) variates normalized by their sum. Redraws in the
// (underflow-only) case where every variate is zero.
void draw_dirichlet(std::vector<std::gamma_distribution<double>>& gammas,
                    std::span<double> out, Rng& rng) {
  double sum = 0.0;
  do {
    sum = 0.0;
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c] = gammas[c](rng);
      sum += out[c];
    }
  } while (!(sum > 0.0));
  for (double& x : out) x /= sum;
}

std::size_t draw_label(std::span<const double> p, double u) {
  double cumulative = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    cumulative += p[c];
    if (u < cumulative) return c;
  }
  // u landed in the rounding gap above the last cumulative sum.
  for (std::size_t c = p.size(); c-- > 0;) {
    if (p[c] > 0.0) return c;
  }
  return p.size() - 1;
}

double uniform01(Rng& rng) {
  return std::generate_canonical<double, 53>(rng);
}

std::vector<std::gamma_distribution<double>> make_gammas(
    std::span<const double> alpha) {
  std::vector<std::gamma_distribution<double>> gammas;
  gammas.reserve(alpha.size());
  for (const double a : alpha) gammas.emplace_back(a, 1.0);
  return gammas;
}

std::string join_alpha(std::span<const double> alpha) {
  std::string out;
  char buf[32];
  for (std::size_t c = 0; c < alpha.size(); ++c) {
    if (c) out += ',';
    const auto res = std::to_chars(buf, buf + sizeof buf, alpha[c]);
    out.append(buf, res.ptr);
  }
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void check_alpha(std::span<const double> alpha) {
  if (alpha.size() < 2) {
    throw Error(ErrorCode::kDimensionMismatch,
                "alpha needs at least 2 classes");
  }
  for (const double a : alpha) {
    if (!(a > 0.0) || a == std::numeric_limits<double>::infinity()) {
      throw Error(ErrorCode::kNonPositiveAlpha,
                  "alpha entries must be positive and finite");
    }
  }
}

std::vector<double> alpha_preset(std::string_view spec, std::size_t classes) {
  if (classes < 2) {
    throw Error(ErrorCode::kDimensionMismatch, "need at least 2 classes");
  }
  if (spec == "equal") return std::vector<double>(classes, 1.0);
  if (spec == "skewed") {
    std::vector<double> alpha(classes, 1.0);
    alpha[0] = 10.0;
    return alpha;
  }
  std::vector<double> alpha;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto end = std::min(spec.find(',', pos), spec.size());
    const auto token = spec.substr(pos, end - pos);
    double value = 0.0;
    const auto res =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || res.ec != std::errc() ||
        res.ptr != token.data() + token.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "alpha must be `equal`, `skewed` or a comma-separated list, got `" +
                      std::string(spec) + "`");
    }
    alpha.push_back(value);
    pos = end + 1;
  }
  if (alpha.size() != classes) {
    throw Error(ErrorCode::kDimensionMismatch,
                "alpha has " + std::to_string(alpha.size()) + " entries for " +
                    std::to_string(classes) + " classes");
  }
  check_alpha(alpha);
  return alpha;
}

ProbabilityVector sample_dirichlet(std::span<const double> alpha, Rng& rng) {
  check_alpha(alpha);
  auto gammas = make_gammas(alpha);
  std::vector<double> p(alpha.size());
  draw_dirichlet(gammas, p, rng);
  return ProbabilityVector(std::move(p));
}

std::size_t sample_label(std::span<const double> p, Rng& rng) {
  return draw_label(p, uniform01(rng));
}

Dataset generate_calibrated_dataset(const DirichletSpec& spec,
                                    unsigned threads) {
  check_alpha(spec.alpha);
  if (spec.n == 0) {
    throw Error(ErrorCode::kEmptyDataset, "sample count must be positive");
  }
  const std::size_t c = spec.alpha.size();
  const std::size_t chunks = (spec.n + kGenerationChunk - 1) / kGenerationChunk;

  std::vector<double> probs(spec.n * c);
  std::vector<std::uint32_t> labels(spec.n);

  auto fill_chunk = [&](std::size_t chunk) {
    Rng rng(derive_seed(spec.seed, chunk));
    auto gammas = make_gammas(spec.alpha);
    const std::size_t begin = chunk * kGenerationChunk;
    const std::size_t end = std::min(spec.n, begin + kGenerationChunk);
    for (std::size_t i = begin; i < end; ++i) {
      std::span<double> row(probs.data() + i * c, c);
      draw_dirichlet(gammas, row, rng);
      labels[i] = static_cast<std::uint32_t>(draw_label(row, uniform01(rng)));
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, chunks));
  if (workers == 1) {
    for (std::size_t k = 0; k < chunks; ++k) fill_chunk(k);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < chunks; k += workers) fill_chunk(k);
      });
    }
  }

  // Rows are normalized Dirichlet draws, so no revalidation.
  auto ds = DatasetBuilder::adopt(c, std::move(probs), std::move(labels));
  ds.set_metadata("generator", std::string(kGeneratorName));
  ds.set_metadata("seed", std::to_string(spec.seed));
  ds.set_metadata("alpha", join_alpha(spec.alpha));
  ds.set_metadata("chunk", std::to_string(kGenerationChunk));
  return ds;
}

}  // namespace calibra
