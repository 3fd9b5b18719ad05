#include "rankvar/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "rankvar/error.hpp"

namespace rankvar {
namespace {

template <class Range, class GetId>
void require_unique_ids(const Range& range, GetId get_id) {
  std::unordered_set<std::string> seen;
  for (const auto& x : range) {
    const std::string& id = get_id(x);
    if (!seen.insert(id).second) throw ValidationError("duplicate item id '" + id + "'");
  }
}

}  // namespace

std::optional<double> Replicates::size_ratio() const {
  if (items.empty()) return std::nullopt;
  std::size_t lo = items.front().samples.size(), hi = lo;
  for (const auto& it : items) {
    lo = std::min(lo, it.samples.size());
    hi = std::max(hi, it.samples.size());
  }
  if (lo == 0) return std::nullopt;
  return static_cast<double>(hi) / static_cast<double>(lo);
}

void validate(const Replicates& ds) {
  if (ds.items.empty()) throw ValidationError("dataset has no items");
  for (const auto& it : ds.items) {
    if (it.samples.empty()) throw ValidationError("item '" + it.id + "' has no observations");
    for (double v : it.samples)
      if (!std::isfinite(v)) throw ValidationError("item '" + it.id + "' has a non-finite value");
  }
  require_unique_ids(ds.items, [](const ReplicateItem& it) -> const std::string& { return it.id; });
}

void validate(const TwoClass& ds) {
  if (ds.item_ids.empty()) throw ValidationError("two-class dataset has no items");
  if (ds.labels.empty()) throw ValidationError("two-class dataset has no observations");
  if (ds.values.size() != ds.labels.size() * ds.item_ids.size())
    throw ValidationError("two-class matrix size does not match labels x items");
  std::size_t ones = 0;
  for (auto l : ds.labels) {
    if (l > 1) throw ValidationError("class labels must be 0 or 1");
    ones += l;
  }
  if (ones == 0 || ones == ds.labels.size())
    throw ValidationError("two-class dataset needs at least one observation of each label");
  for (double v : ds.values)
    if (!std::isfinite(v)) throw ValidationError("two-class matrix has a non-finite value");
  require_unique_ids(ds.item_ids, [](const std::string& s) -> const std::string& { return s; });
}

void validate(const Binomial& ds) {
  if (ds.items.empty()) throw ValidationError("dataset has no items");
  for (const auto& it : ds.items) {
    if (it.trials == 0) throw ValidationError("item '" + it.id + "' has zero trials");
    if (it.successes > it.trials)
      throw ValidationError("item '" + it.id + "' has successes > trials");
  }
  require_unique_ids(ds.items, [](const BinomialItem& it) -> const std::string& { return it.id; });
}

void validate(const ItemDataset& ds) {
  std::visit([](const auto& d) { validate(d); }, ds);
}

std::size_t item_count(const ItemDataset& ds) {
  return std::visit(
      [](const auto& d) -> std::size_t {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, TwoClass>) {
          return d.items();
        } else {
          return d.items.size();
        }
      },
      ds);
}

std::vector<std::string> item_ids(const ItemDataset& ds) {
  return std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        std::vector<std::string> ids;
        if constexpr (std::is_same_v<T, TwoClass>) {
          ids = d.item_ids;
        } else {
          for (const auto& it : d.items) ids.push_back(it.id);
        }
        return ids;
      },
      ds);
}

TwoClass select_items(const TwoClass& ds, std::span<const std::size_t> items) {
  TwoClass out;
  out.labels = ds.labels;
  out.values.reserve(items.size() * ds.labels.size());
  for (std::size_t j : items) {
    if (j >= ds.items()) throw ArgumentError("item index out of range");
    out.item_ids.push_back(ds.item_ids[j]);
    const auto col = ds.column(j);
    out.values.insert(out.values.end(), col.begin(), col.end());
  }
  return out;
}

}  // namespace rankvar
