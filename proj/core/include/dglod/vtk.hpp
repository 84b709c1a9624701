#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dglod/mesh.hpp"

namespace dglod {

struct CellField {
  std::string name;
  std::vector<double> values;  // one per element
};

// ASCII legacy VTK, STRUCTURED_POINTS with CELL_DATA scalars.
void write_vtk(std::ostream& out, const MeshLevel& level,
               const std::vector<CellField>& fields,
               const std::string& title = "dglod");
void write_vtk(const std::filesystem::path& path, const MeshLevel& level,
               const std::vector<CellField>& fields,
               const std::string& title = "dglod");

}  // namespace dglod
