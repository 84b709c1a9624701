#include "dglod/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dglod/error.hpp"

namespace dglod {
namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

MeshLevel::MeshLevel(int cells_per_axis) : n_(cells_per_axis) {
  if (n_ < 1) {
    throw Error("mesh: cells per axis must be positive, got " +
                std::to_string(n_));
  }
  const double h = cell_size();
  edges_.reserve(static_cast<std::size_t>(2 * n_ * (n_ + 1)));

  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i <= n_; ++i) {
      Edge e;
      e.start = {i * h, j * h};
      e.end = {i * h, (j + 1) * h};
      e.length = h;
      if (i == 0) {
        e.minus = element_index(0, j);
        e.normal = {-1.0, 0.0};
      } else if (i == n_) {
        e.minus = element_index(n_ - 1, j);
        e.normal = {1.0, 0.0};
      } else {
        e.minus = element_index(i - 1, j);
        e.plus = element_index(i, j);
        e.normal = {1.0, 0.0};
      }
      edges_.push_back(e);
    }
  }
  for (int j = 0; j <= n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      Edge e;
      e.start = {i * h, j * h};
      e.end = {(i + 1) * h, j * h};
      e.length = h;
      if (j == 0) {
        e.minus = element_index(i, 0);
        e.normal = {0.0, -1.0};
      } else if (j == n_) {
        e.minus = element_index(i, n_ - 1);
        e.normal = {0.0, 1.0};
      } else {
        e.minus = element_index(i, j - 1);
        e.plus = element_index(i, j);
        e.normal = {0.0, 1.0};
      }
      edges_.push_back(e);
    }
  }
}

Point MeshLevel::element_origin(int e) const {
  const auto [ix, iy] = element_coords(e);
  return {ix * cell_size(), iy * cell_size()};
}

Point MeshLevel::centroid(int e) const {
  const auto [ix, iy] = element_coords(e);
  return {(ix + 0.5) * cell_size(), (iy + 0.5) * cell_size()};
}

MeshHierarchy::MeshHierarchy(int coarse_cells, int fine_cells)
    : coarse_(coarse_cells), fine_(fine_cells), ratio_(1) {
  if (!is_power_of_two(coarse_cells) || !is_power_of_two(fine_cells)) {
    throw Error("mesh: cells per axis must be powers of two, got " +
                std::to_string(coarse_cells) + " and " +
                std::to_string(fine_cells));
  }
  if (fine_cells < coarse_cells || fine_cells % coarse_cells != 0) {
    throw Error("mesh: fine resolution " + std::to_string(fine_cells) +
                " is not a multiple of coarse resolution " +
                std::to_string(coarse_cells));
  }
  ratio_ = fine_cells / coarse_cells;
  parent_.resize(static_cast<std::size_t>(fine_.num_elements()));
  for (int e = 0; e < fine_.num_elements(); ++e) {
    const auto [ix, iy] = fine_.element_coords(e);
    parent_[static_cast<std::size_t>(e)] =
        coarse_.element_index(ix / ratio_, iy / ratio_);
  }
}

std::vector<int> MeshHierarchy::children(int coarse_element) const {
  const auto [cx, cy] = coarse_.element_coords(coarse_element);
  return fine_elements_in(CellBox{cx, cx, cy, cy});
}

std::vector<int> MeshHierarchy::fine_elements_in(const CellBox& box) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(box.count() * ratio_ * ratio_));
  for (int fy = box.y0 * ratio_; fy < (box.y1 + 1) * ratio_; ++fy) {
    for (int fx = box.x0 * ratio_; fx < (box.x1 + 1) * ratio_; ++fx) {
      out.push_back(fine_.element_index(fx, fy));
    }
  }
  return out;
}

MeshHierarchy build_hierarchy(int coarse_cells, int fine_cells) {
  return MeshHierarchy(coarse_cells, fine_cells);
}

CellBox patch_box(const MeshLevel& coarse, int center, int layers) {
  if (center < 0 || center >= coarse.num_elements()) {
    throw Error("patch: element " + std::to_string(center) + " out of range");
  }
  if (layers < 0) {
    throw Error("patch: negative layer count");
  }
  const int n = coarse.cells_per_axis();
  const auto [cx, cy] = coarse.element_coords(center);
  // Vertex-neighbour growth on a tensor grid is a Chebyshev ball.
  return CellBox{std::max(0, cx - layers), std::min(n - 1, cx + layers),
                 std::max(0, cy - layers), std::min(n - 1, cy + layers)};
}

Patch build_patch(const MeshHierarchy& hier, int center, int layers) {
  Patch p;
  p.center = center;
  p.layers = layers;
  p.box = patch_box(hier.coarse(), center, layers);
  for (int y = p.box.y0; y <= p.box.y1; ++y) {
    for (int x = p.box.x0; x <= p.box.x1; ++x) {
      p.coarse_members.push_back(hier.coarse().element_index(x, y));
    }
  }
  p.fine_members = hier.fine_elements_in(p.box);
  std::sort(p.fine_members.begin(), p.fine_members.end());
  p.fine_dofs.reserve(p.fine_members.size() * kCornersPerCell);
  for (int e : p.fine_members) {
    for (int k = 0; k < kCornersPerCell; ++k) {
      p.fine_dofs.push_back(kCornersPerCell * e + k);
    }
  }
  return p;
}

int layers_to_cover(const MeshLevel& coarse, int center) {
  const int n = coarse.cells_per_axis();
  const auto [cx, cy] = coarse.element_coords(center);
  return std::max({cx, n - 1 - cx, cy, n - 1 - cy});
}

int patch_layers_for(double coarse_h, double growth, double log_base) {
  if (!(coarse_h > 0.0 && coarse_h < 1.0)) {
    throw Error("patch_layers_for: coarse mesh size must lie in (0, 1)");
  }
  if (!(log_base > 1.0)) {
    throw Error("patch_layers_for: logarithm base must exceed 1");
  }
  if (growth < 0.0) {
    throw Error("patch_layers_for: growth must be non-negative");
  }
  const double raw = growth * std::log(1.0 / coarse_h) / std::log(log_base);
  // Absorb round-off so exact integers (2*log2(32) = 10) are not bumped up.
  const int layers = static_cast<int>(std::ceil(raw - 1e-9));
  const int cells = static_cast<int>(std::lround(1.0 / coarse_h));
  return std::clamp(layers, 0, std::max(0, cells - 1));
}

}  // namespace dglod
