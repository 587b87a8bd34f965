#include "calibra/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "calibra/error.hpp"

namespace calibra {

void normalize_probabilities(std::span<double> probs) {
  double sum = 0.0;
  for (const double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidProbability,
                  "probability " + std::to_string(p) + " outside [0,1]");
    }
    sum += p;
  }
  const double off = std::abs(sum - 1.0);
  if (off > kNormalizeTolerance) {
    throw Error(ErrorCode::kInvalidProbability,
                "probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  if (off > kSumTolerance) {
    for (double& p : probs) p /= sum;
  }
}

ProbabilityVector::ProbabilityVector(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw Error(ErrorCode::kDimensionMismatch,
                "a probability vector needs at least 2 classes");
  }
  normalize_probabilities(probs_);
}

LabeledPrediction::LabeledPrediction(ProbabilityVector p, std::size_t label)
    : probs(std::move(p)), true_class(label) {
  if (true_class >= probs.num_classes()) {
    throw Error(ErrorCode::kLabelOutOfRange,
                "label " + std::to_string(true_class) + " out of range for " +
                    std::to_string(probs.num_classes()) + " classes");
  }
}

LabeledPrediction Dataset::item(std::size_t i) const {
  const auto p = probs(i);
  return LabeledPrediction(ProbabilityVector({p.begin(), p.end()}), label(i));
}

void Dataset::set_class_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != num_classes_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(num_classes_) + " class names, got " +
                    std::to_string(names.size()));
  }
  class_names_ = std::move(names);
}

DatasetBuilder::DatasetBuilder(std::size_t num_classes) {
  if (num_classes < 2) {
    throw Error(ErrorCode::kDimensionMismatch,
                "a dataset needs at least 2 classes");
  }
  data_.num_classes_ = num_classes;
}

void DatasetBuilder::reserve(std::size_t rows) {
  data_.labels_.reserve(rows);
  if (data_.num_classes_ != 0) data_.probs_.reserve(rows * data_.num_classes_);
}

void DatasetBuilder::add(std::span<const double> probs, std::int64_t label) {
  if (data_.num_classes_ == 0) {
    if (probs.size() < 2) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "a dataset needs at least 2 classes");
    }
    data_.num_classes_ = probs.size();
    data_.probs_.reserve(data_.labels_.capacity() * data_.num_classes_);
  }
  if (probs.size() != data_.num_classes_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "row has " + std::to_string(probs.size()) +
                    " probabilities, dataset has " +
                    std::to_string(data_.num_classes_) + " classes");
  }
  scratch_.assign(probs.begin(), probs.end());
  normalize_probabilities(scratch_);
  if (label < 0 || static_cast<std::uint64_t>(label) >= data_.num_classes_) {
    throw Error(ErrorCode::kLabelOutOfRange,
                "label " + std::to_string(label) + " out of range for " +
                    std::to_string(data_.num_classes_) + " classes");
  }
  add_unchecked(scratch_, static_cast<std::uint32_t>(label));
}

void DatasetBuilder::add_unchecked(std::span<const double> probs,
                                   std::uint32_t label) {
  data_.probs_.insert(data_.probs_.end(), probs.begin(), probs.end());
  data_.labels_.push_back(label);
}

Dataset DatasetBuilder::build() && {
  if (data_.labels_.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "dataset has no samples");
  }
  return std::move(data_);
}

Dataset DatasetBuilder::adopt(std::size_t num_classes, std::vector<double> probs,
                              std::vector<std::uint32_t> labels) {
  if (num_classes < 2 || probs.size() != num_classes * labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "buffer shape mismatch");
  }
  if (labels.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "dataset has no samples");
  }
  Dataset ds;
  ds.num_classes_ = num_classes;
  ds.probs_ = std::move(probs);
  ds.labels_ = std::move(labels);
  return ds;
}

Dataset validate_dataset(std::span<const RawPrediction> raw) {
  if (raw.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "dataset has no samples");
  }
  DatasetBuilder builder;
  builder.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    try {
      builder.add(raw[i].probs, raw[i].label);
    } catch (const Error& e) {
      throw Error(e.code(), "item " + std::to_string(i) + ": " + e.what());
    }
  }
  return std::move(builder).build();
}

void rank_classes(std::span<const double> probs,
                  std::span<std::uint32_t> order) {
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [probs](std::uint32_t a, std::uint32_t b) {
    return probs[a] > probs[b] || (probs[a] == probs[b] && a < b);
  });
}

std::size_t rank_of(std::span<const std::uint32_t> order, std::size_t label) {
  return static_cast<std::size_t>(
      std::find(order.begin(), order.end(), label) - order.begin());
}

RankedPrediction rank_prediction(const LabeledPrediction& item) {
  const auto p = item.probs.values();
  std::vector<std::uint32_t> order(p.size());
  rank_classes(p, order);

  RankedPrediction ranked;
  ranked.q.reserve(p.size());
  ranked.class_order.reserve(p.size());
  ranked.r.assign(p.size(), 0);
  for (std::size_t c = 0; c < order.size(); ++c) {
    ranked.q.push_back(p[order[c]]);
    ranked.class_order.push_back(order[c]);
    if (order[c] == item.true_class) ranked.r[c] = 1;
  }
  return ranked;
}

}  // namespace calibra
