#include "hlab/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace hlab::io {

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
  return r;
}

}  // namespace

const std::vector<std::string>& sym_component_names() {
  static const std::vector<std::string> names{"xx", "xy", "xz", "yy", "yz", "zz"};
  return names;
}

const std::vector<std::string>& vector_component_names() {
  static const std::vector<std::string> names{"x", "y", "z"};
  return names;
}

std::vector<std::filesystem::path> write_field(const std::filesystem::path& base,
                                               const std::string& name,
                                               std::span<const double> values, const Grid& grid,
                                               const std::vector<std::string>& components) {
  const std::filesystem::path bin = base.string() + ".bin";
  const std::filesystem::path side = base.string() + ".json";

  std::ofstream out(bin, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + bin.string());
  for (double v : values) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    bits = to_little(bits);
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }

  nlohmann::ordered_json j;
  j["name"] = name;
  j["file"] = bin.filename().string();
  j["dtype"] = "float64-le";
  j["layout"] = "node-major, x fastest";
  j["dims"] = grid.dims();
  j["spacing"] = grid.spacing();
  j["origin"] = grid.origin();
  j["components"] = components.empty() ? std::vector<std::string>{"value"} : components;
  std::ofstream js(side);
  js << j.dump(2) << "\n";
  return {bin, side};
}

LoadedField read_field(const std::filesystem::path& sidecar) {
  std::ifstream js(sidecar);
  if (!js) throw std::runtime_error("cannot read " + sidecar.string());
  const auto j = nlohmann::json::parse(js);
  LoadedField f;
  f.dims = j.at("dims").get<std::array<int, 3>>();
  f.spacing = j.at("spacing").get<Vec3>();
  f.origin = j.at("origin").get<Vec3>();
  f.components = j.at("components").get<std::vector<std::string>>();

  const auto bin = sidecar.parent_path() / j.at("file").get<std::string>();
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + bin.string());
  const std::size_t count =
      static_cast<std::size_t>(f.dims[0]) * f.dims[1] * f.dims[2] * f.components.size();
  f.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits))
      throw std::runtime_error("truncated field dump " + bin.string());
    bits = to_little(bits);
    std::memcpy(&f.values[i], &bits, sizeof bits);
  }
  return f;
}

}  // namespace hlab::io
