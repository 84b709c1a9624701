#pragma once

#include <array>
#include <span>
#include <vector>

namespace dglod {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Local corner numbering of a square cell. Dofs of element e are 4*e + corner.
enum class Corner : int { kSW = 0, kSE = 1, kNW = 2, kNE = 3 };

inline constexpr int kCornersPerCell = 4;

struct Edge {
  Point start;
  Point end;
  Point normal;     // unit; points from minus to plus, outward on the boundary
  double length = 0.0;
  int minus = -1;
  int plus = -1;    // -1 on the boundary

  bool on_boundary() const { return plus < 0; }
};

// Inclusive range of cell indices along both axes.
struct CellBox {
  int x0 = 0, x1 = -1;
  int y0 = 0, y1 = -1;

  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  int count() const { return width() * height(); }
  bool contains(int ix, int iy) const {
    return ix >= x0 && ix <= x1 && iy >= y0 && iy <= y1;
  }
  friend bool operator==(const CellBox&, const CellBox&) = default;
  friend auto operator<=>(const CellBox&, const CellBox&) = default;
};

// Uniform n x n subdivision of the unit square into square cells.
//
// Elements are numbered row-major from the bottom-left cell. Edges are
// numbered vertical first (x = i/n, row j at index j*(n+1)+i), then
// horizontal (y = j/n, column i at index n*(n+1) + j*n + i).
class MeshLevel {
 public:
  explicit MeshLevel(int cells_per_axis);

  int cells_per_axis() const { return n_; }
  double cell_size() const { return 1.0 / n_; }
  int num_elements() const { return n_ * n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  int element_index(int ix, int iy) const { return iy * n_ + ix; }
  std::array<int, 2> element_coords(int e) const { return {e % n_, e / n_}; }
  Point element_origin(int e) const;
  Point centroid(int e) const;

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int i) const { return edges_[static_cast<std::size_t>(i)]; }

 private:
  int n_;
  std::vector<Edge> edges_;
};

// Nested coarse/fine pair obtained by uniform refinement.
class MeshHierarchy {
 public:
  MeshHierarchy(int coarse_cells, int fine_cells);

  const MeshLevel& coarse() const { return coarse_; }
  const MeshLevel& fine() const { return fine_; }
  int refinement_ratio() const { return ratio_; }
  int parent(int fine_element) const {
    return parent_[static_cast<std::size_t>(fine_element)];
  }
  std::span<const int> parents() const { return parent_; }

  // Fine children of a coarse element, in increasing fine index.
  std::vector<int> children(int coarse_element) const;
  // Fine elements covered by a box of coarse cells, in increasing index.
  std::vector<int> fine_elements_in(const CellBox& coarse_box) const;

 private:
  MeshLevel coarse_;
  MeshLevel fine_;
  int ratio_;
  std::vector<int> parent_;
};

MeshHierarchy build_hierarchy(int coarse_cells, int fine_cells);

// Element patch: the center cell grown by `layers` rings of vertex
// neighbours, clipped at the domain boundary.
struct Patch {
  int center = 0;
  int layers = 0;
  CellBox box;
  std::vector<int> coarse_members;
  std::vector<int> fine_members;
  std::vector<int> fine_dofs;
};

CellBox patch_box(const MeshLevel& coarse, int center, int layers);
Patch build_patch(const MeshHierarchy& hier, int center, int layers);

// Smallest number of layers for which the patch around `center` is the
// whole domain.
int layers_to_cover(const MeshLevel& coarse, int center);

// ceil(growth * log_base(1/H)), clamped to the number of layers that covers
// the domain from a corner cell.
int patch_layers_for(double coarse_h, double growth, double log_base);

}  // namespace dglod
