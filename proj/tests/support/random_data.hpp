#pragma once

// Random small datasets for property and oracle tests. Rows mix continuous
// draws with exact ties (uniform rows, duplicated rows, one-hot rows) so that
// tie-breaking paths are exercised.

#include <cstddef>
#include <random>
#include <vector>

#include "../oracle/brute_force.hpp"
#include "calibra/dataset.hpp"

namespace test_support {

inline std::vector<double> random_simplex(std::size_t c, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 9);
  std::vector<double> p(c, 0.0);
  switch (kind(rng)) {
    case 0: {  // one-hot
      p[std::uniform_int_distribution<std::size_t>(0, c - 1)(rng)] = 1.0;
      return p;
    }
    case 1:  // uniform
      return std::vector<double>(c, 1.0 / static_cast<double>(c));
    case 2: {  // dyadic grid with likely ties: multiples of 1/8 summing to 1
      int remaining = 8;
      for (std::size_t k = 0; k + 1 < c; ++k) {
        const int take = std::uniform_int_distribution<int>(0, remaining)(rng);
        p[k] = take / 8.0;
        remaining -= take;
      }
      p[c - 1] = remaining / 8.0;
      return p;
    }
    default: {
      std::exponential_distribution<double> e(1.0);
      double sum = 0.0;
      for (auto& x : p) sum += (x = e(rng));
      for (auto& x : p) x /= sum;
      return p;
    }
  }
}

struct RandomCase {
  std::vector<oracle::Sample> samples;
  calibra::Dataset dataset;
  std::size_t bins = 1;
};

inline RandomCase random_case(std::mt19937_64& rng, std::size_t max_n = 50,
                              std::size_t max_c = 5, std::size_t max_bins = 10) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
  const std::size_t c = std::uniform_int_distribution<std::size_t>(2, max_c)(rng);
  RandomCase out;
  out.bins = std::uniform_int_distribution<std::size_t>(1, std::min(max_bins, n))(rng);
  calibra::DatasetBuilder builder(c);
  for (std::size_t i = 0; i < n; ++i) {
    oracle::Sample s;
    if (i > 0 && std::uniform_int_distribution<int>(0, 7)(rng) == 0) {
      s.p = out.samples[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)].p;
    } else {
      s.p = random_simplex(c, rng);
    }
    s.y = std::uniform_int_distribution<std::size_t>(0, c - 1)(rng);
    builder.add(s.p, static_cast<std::int64_t>(s.y));
    out.samples.push_back(std::move(s));
  }
  out.dataset = std::move(builder).build();
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = out.dataset.probs(i);
    out.samples[i].p.assign(p.begin(), p.end());
  }
  return out;
}

}  // namespace test_support
