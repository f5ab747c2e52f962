#include "labelforge/spatial_index.hpp"

#include <algorithm>
#include <cmath>

namespace labelforge {

GridIndex::GridIndex(std::vector<Aabb> items, double cell_size) : items_(std::move(items)) {
  if (items_.empty()) return;
  extent_ = items_.front();
  double mean_extent = 0.0;
  for (const Aabb& b : items_) {
    extent_.extend(b);
    mean_extent += std::max(b.width(), b.height());
  }
  mean_extent /= static_cast<double>(items_.size());
  const double span = std::max({extent_.width(), extent_.height(), 1e-9});
  if (cell_size <= 0.0) {
    // Roughly sqrt(n) cells per side, never finer than the typical item.
    const double per_side = std::max(1.0, std::sqrt(static_cast<double>(items_.size())));
    cell_size = std::max(span / per_side, mean_extent);
  }
  cell_ = std::max(cell_size, span / 4096.0);
  nx_ = static_cast<std::size_t>(std::floor(extent_.width() / cell_)) + 1;
  ny_ = static_cast<std::size_t>(std::floor(extent_.height() / cell_)) + 1;
  cells_.resize(nx_ * ny_);
  for (std::size_t id = 0; id < items_.size(); ++id) {
    const Aabb& b = items_[id];
    for (std::size_t y = cell_y(b.min_y); y <= cell_y(b.max_y); ++y) {
      for (std::size_t x = cell_x(b.min_x); x <= cell_x(b.max_x); ++x) {
        cells_[y * nx_ + x].push_back(static_cast<std::uint32_t>(id));
      }
    }
  }
}

std::size_t GridIndex::cell_x(double x) const {
  const double c = std::floor((x - extent_.min_x) / cell_);
  return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(nx_ - 1)));
}

std::size_t GridIndex::cell_y(double y) const {
  const double c = std::floor((y - extent_.min_y) / cell_);
  return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(ny_ - 1)));
}

std::vector<std::size_t> GridIndex::query(const Aabb& q) const {
  std::vector<std::size_t> out;
  if (items_.empty() || !q.overlaps(extent_)) return out;
  for (std::size_t y = cell_y(q.min_y); y <= cell_y(q.max_y); ++y) {
    for (std::size_t x = cell_x(q.min_x); x <= cell_x(q.max_x); ++x) {
      for (std::uint32_t id : cells_[y * nx_ + x]) {
        if (items_[id].overlaps(q)) out.push_back(id);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace labelforge
