#include "dcakdd/folds.hpp"

#include <numeric>
#include <ostream>
#include <string>

#include "dcakdd/errors.hpp"
#include "dcakdd/random.hpp"

namespace dcakdd {

FoldAssignment::FoldAssignment(std::vector<std::uint32_t> fold_of, std::size_t k)
    : fold_of_(std::move(fold_of)), k_(k) {}

std::size_t FoldAssignment::fold_size(std::size_t fold) const {
  std::size_t n = 0;
  for (auto f : fold_of_) n += (f == fold);
  return n;
}

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of_.size(); ++i) {
    if (fold_of_[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of_.size(); ++i) {
    if (fold_of_[i] != fold) out.push_back(i);
  }
  return out;
}

FoldAssignment kfold_split(std::size_t record_count, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold split needs k >= 2, got " + std::to_string(k));
  if (record_count == 0) throw ConfigError("k-fold split of an empty record set");
  if (k > record_count) {
    throw ConfigError("k-fold split with k=" + std::to_string(k) + " exceeds " +
                      std::to_string(record_count) + " records");
  }

  std::vector<std::size_t> order(record_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<std::uint32_t> fold_of(record_count);
  for (std::size_t pos = 0; pos < record_count; ++pos) {
    fold_of[order[pos]] = static_cast<std::uint32_t>(pos % k);
  }
  return FoldAssignment(std::move(fold_of), k);
}

FoldAssignment kfold_split(std::span<const ConnectionRecord> records, std::size_t k,
                           std::uint64_t seed) {
  return kfold_split(records.size(), k, seed);
}

void write_fold_assignment(const FoldAssignment& folds, std::ostream& out) {
  out << "record_index\tfold_index\n";
  for (std::size_t i = 0; i < folds.record_count(); ++i) {
    out << i << '\t' << folds.fold_of(i) << '\n';
  }
}

}  // namespace dcakdd
