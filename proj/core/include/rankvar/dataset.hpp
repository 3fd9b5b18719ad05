#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rankvar {

// Per-item replicate observations; sizes n_j may differ between items.
struct ReplicateItem {
  std::string id;
  std::vector<double> samples;
  friend bool operator==(const ReplicateItem&, const ReplicateItem&) = default;
};

struct Replicates {
  std::vector<ReplicateItem> items;

  // max(n_j) / min(n_j); nullopt when empty.
  std::optional<double> size_ratio() const;
  friend bool operator==(const Replicates&, const Replicates&) = default;
};

// m observations x p items with a 0/1 class label per observation. Values are stored
// column-major so each item's observations are contiguous.
struct TwoClass {
  std::vector<std::uint8_t> labels;
  std::vector<std::string> item_ids;
  std::vector<double> values;

  std::size_t observations() const noexcept { return labels.size(); }
  std::size_t items() const noexcept { return item_ids.size(); }
  std::span<const double> column(std::size_t item) const {
    return {values.data() + item * labels.size(), labels.size()};
  }
  double at(std::size_t obs, std::size_t item) const { return values[item * labels.size() + obs]; }
  friend bool operator==(const TwoClass&, const TwoClass&) = default;
};

struct BinomialItem {
  std::string id;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  friend bool operator==(const BinomialItem&, const BinomialItem&) = default;
};

struct Binomial {
  std::vector<BinomialItem> items;
  friend bool operator==(const Binomial&, const Binomial&) = default;
};

using ItemDataset = std::variant<Replicates, TwoClass, Binomial>;

// Throws ValidationError: empty item lists, n_j = 0, duplicate ids, missing class,
// successes > trials, trials = 0, non-finite values, shape mismatch.
void validate(const Replicates& ds);
void validate(const TwoClass& ds);
void validate(const Binomial& ds);
void validate(const ItemDataset& ds);

std::size_t item_count(const ItemDataset& ds);
std::vector<std::string> item_ids(const ItemDataset& ds);

// Keeps the listed items (in the given order) of a two-class dataset.
TwoClass select_items(const TwoClass& ds, std::span<const std::size_t> items);

}  // namespace rankvar
