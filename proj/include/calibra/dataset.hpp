#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace calibra {

// Rows whose probabilities sum to 1 within this tolerance are stored as-is.
inline constexpr double kSumTolerance = 1e-9;
// Rows within this tolerance (but outside kSumTolerance) are renormalized on
// ingestion; anything further off is rejected.
inline constexpr double kNormalizeTolerance = 1e-6;

// Validates `probs` in place: entries must lie in [0,1] and sum to 1 within
// kNormalizeTolerance. Rescales by the sum when it is off by more than
// kSumTolerance. Throws Error(kInvalidProbability) otherwise.
void normalize_probabilities(std::span<double> probs);

// One classifier prediction: a point on the (C-1)-simplex, C >= 2.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> probs);

  std::span<const double> values() const noexcept { return probs_; }
  std::size_t num_classes() const noexcept { return probs_.size(); }
  double operator[](std::size_t c) const { return probs_[c]; }

  friend bool operator==(const ProbabilityVector&,
                         const ProbabilityVector&) = default;

 private:
  std::vector<double> probs_;
};

struct LabeledPrediction {
  LabeledPrediction(ProbabilityVector p, std::size_t label);

  ProbabilityVector probs;
  std::size_t true_class;
};

// Unvalidated input row as it arrives from a caller or a file.
struct RawPrediction {
  std::vector<double> probs;
  std::int64_t label = 0;
};

// N labelled predictions sharing one class count. Probabilities are stored
// row-major in a single buffer so that 10^7-sample datasets stay compact.
class Dataset {
 public:
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t num_classes() const noexcept { return num_classes_; }

  std::span<const double> probs(std::size_t i) const noexcept {
    return {probs_.data() + i * num_classes_, num_classes_};
  }
  std::size_t label(std::size_t i) const noexcept { return labels_[i]; }

  std::span<const double> flat_probs() const noexcept { return probs_; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }

  LabeledPrediction item(std::size_t i) const;

  // Free-form provenance (generator, seed, alpha, ...). Ordered so that
  // serialized headers are deterministic.
  const std::map<std::string, std::string>& metadata() const noexcept {
    return metadata_;
  }
  void set_metadata(std::string key, std::string value) {
    metadata_[std::move(key)] = std::move(value);
  }

  // Optional column names; empty means "p0..p{C-1}".
  const std::vector<std::string>& class_names() const noexcept {
    return class_names_;
  }
  void set_class_names(std::vector<std::string> names);

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  friend class DatasetBuilder;

  std::size_t num_classes_ = 0;
  std::vector<double> probs_;
  std::vector<std::uint32_t> labels_;
  std::map<std::string, std::string> metadata_;
  std::vector<std::string> class_names_;
};

// Incremental, validating construction of a Dataset. The class count is fixed
// by the constructor or by the first row added.
class DatasetBuilder {
 public:
  DatasetBuilder() = default;
  explicit DatasetBuilder(std::size_t num_classes);

  void reserve(std::size_t rows);

  // Copies, validates and (if needed) renormalizes one row.
  void add(std::span<const double> probs, std::int64_t label);

  // Appends a row that the caller guarantees is already valid.
  void add_unchecked(std::span<const double> probs, std::uint32_t label);

  std::size_t size() const noexcept { return data_.labels_.size(); }
  std::size_t num_classes() const noexcept { return data_.num_classes_; }

  Dataset build() &&;

  // Wraps buffers the caller guarantees are valid (row-major, C >= 2, labels
  // in range) without copying.
  static Dataset adopt(std::size_t num_classes, std::vector<double> probs,
                       std::vector<std::uint32_t> labels);

 private:
  Dataset data_;
  std::vector<double> scratch_;
};

Dataset validate_dataset(std::span<const RawPrediction> raw);

// Reverse-ordered view of one prediction: q sorted non-increasing,
// class_order[c] the class sitting at rank c, r the one-hot rank of the label.
struct RankedPrediction {
  std::vector<double> q;
  std::vector<std::size_t> class_order;
  std::vector<std::uint8_t> r;
};

RankedPrediction rank_prediction(const LabeledPrediction& item);

// Writes the class indices of `probs` into `order`, sorted by non-increasing
// probability with ties going to the lower class index.
void rank_classes(std::span<const double> probs, std::span<std::uint32_t> order);

// Position of `label` within a ranking produced by rank_classes.
std::size_t rank_of(std::span<const std::uint32_t> order, std::size_t label);

}  // namespace calibra
