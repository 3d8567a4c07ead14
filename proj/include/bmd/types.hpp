#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bmd {

using Vector = std::vector<double>;

/// Offsets of each player's block inside a stacked global action.
class BlockLayout {
 public:
  BlockLayout() = default;
  explicit BlockLayout(std::span<const std::size_t> dims) : offsets_{0} {
    for (std::size_t d : dims) offsets_.push_back(offsets_.back() + d);
  }

  std::size_t players() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t total() const { return offsets_.empty() ? 0 : offsets_.back(); }
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  std::size_t dim(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }

  std::span<const double> block(std::span<const double> x, std::size_t i) const {
    return x.subspan(offsets_[i], dim(i));
  }
  std::span<double> block(std::span<double> x, std::size_t i) const {
    return x.subspan(offsets_[i], dim(i));
  }

 private:
  std::vector<std::size_t> offsets_;
};

}  // namespace bmd
