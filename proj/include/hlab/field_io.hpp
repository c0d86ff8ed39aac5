#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hlab/fields.hpp"

namespace hlab::io {

/// Raw little-endian float64 dump plus a JSON sidecar carrying the lattice
/// and component layout. Returns the two paths written.
std::vector<std::filesystem::path> write_field(const std::filesystem::path& base,
                                               const std::string& name,
                                               std::span<const double> values, const Grid& grid,
                                               const std::vector<std::string>& components);

template <int N>
std::vector<std::filesystem::path> write_field(const std::filesystem::path& base,
                                               const std::string& name, const NodeField<N>& f,
                                               const std::vector<std::string>& components) {
  return write_field(base, name, f.raw(), f.grid(), components);
}

struct LoadedField {
  std::vector<double> values;
  std::array<int, 3> dims{};
  Vec3 spacing{};
  Vec3 origin{};
  std::vector<std::string> components;
};

/// Reads a dump through its sidecar (path to the .json file).
LoadedField read_field(const std::filesystem::path& sidecar);

const std::vector<std::string>& sym_component_names();
const std::vector<std::string>& vector_component_names();

}  // namespace hlab::io
