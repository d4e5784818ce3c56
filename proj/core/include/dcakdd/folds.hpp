#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dcakdd/record.hpp"

namespace dcakdd {

// Fold index per record for k-fold cross-validation.
class FoldAssignment {
 public:
  FoldAssignment(std::vector<std::uint32_t> fold_of, std::size_t k);

  std::size_t k() const { return k_; }
  std::size_t record_count() const { return fold_of_.size(); }
  std::uint32_t fold_of(std::size_t record) const { return fold_of_[record]; }
  std::span<const std::uint32_t> folds() const { return fold_of_; }

  std::size_t fold_size(std::size_t fold) const;

  // Ascending record indices (stream order is kept inside each split).
  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;

 private:
  std::vector<std::uint32_t> fold_of_;
  std::size_t k_;
};

// Unstratified random partition into k near-equal folds: a seeded
// permutation of record indices dealt round-robin. Throws ConfigError when
// k < 2 or k exceeds the record count.
FoldAssignment kfold_split(std::size_t record_count, std::size_t k, std::uint64_t seed);
FoldAssignment kfold_split(std::span<const ConnectionRecord> records, std::size_t k,
                           std::uint64_t seed);

// Two tab-separated columns with a header: record_index, fold_index.
void write_fold_assignment(const FoldAssignment& folds, std::ostream& out);

}  // namespace dcakdd
