#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "labelforge/geometry.hpp"

namespace labelforge {

// Uniform bucket grid over axis-aligned bounds. Immutable after construction,
// so one instance can be shared read-only between workers.
class GridIndex {
 public:
  GridIndex() = default;
  explicit GridIndex(std::vector<Aabb> items, double cell_size = 0.0);

  // Ids of items whose bounds overlap `query`, ascending, without duplicates.
  std::vector<std::size_t> query(const Aabb& query) const;

  std::size_t size() const { return items_.size(); }
  const Aabb& item(std::size_t id) const { return items_[id]; }

 private:
  std::size_t cell_x(double x) const;
  std::size_t cell_y(double y) const;

  std::vector<Aabb> items_;
  Aabb extent_{};
  double cell_ = 1.0;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;
};

}  // namespace labelforge
