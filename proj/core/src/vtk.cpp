#include "dglod/vtk.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "dglod/error.hpp"

namespace dglod {
namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void write_vtk(std::ostream& out, const MeshLevel& level,
               const std::vector<CellField>& fields,
               const std::string& title) {
  const int n = level.cells_per_axis();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n"
      << "DATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << n + 1 << ' ' << n + 1 << " 1\n"
      << "ORIGIN 0 0 0\nSPACING ";
  put(out, level.cell_size());
  out << ' ';
  put(out, level.cell_size());
  out << " 1\n"
      << "CELL_DATA " << level.num_elements() << '\n';
  for (const CellField& f : fields) {
    if (f.values.size() != static_cast<std::size_t>(level.num_elements())) {
      throw Error("vtk: field '" + f.name + "' has " +
                  std::to_string(f.values.size()) + " values, expected " +
                  std::to_string(level.num_elements()));
    }
    out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.values) {
      put(out, v);
      out << '\n';
    }
  }
}

void write_vtk(const std::filesystem::path& path, const MeshLevel& level,
               const std::vector<CellField>& fields,
               const std::string& title) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("vtk: cannot open " + path.string() + " for writing");
  }
  write_vtk(out, level, fields, title);
  if (!out) {
    throw Error("vtk: write to " + path.string() + " failed");
  }
}

}  // namespace dglod
