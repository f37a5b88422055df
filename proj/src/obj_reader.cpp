#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "handray/scene.hpp"

namespace handray {

namespace {

std::string_view next_token(std::string_view& line) {
  const auto start = line.find_first_not_of(" \t\r");
  if (start == std::string_view::npos) {
    line = {};
    return {};
  }
  line.remove_prefix(start);
  const auto end = line.find_first_of(" \t\r");
  const auto token = line.substr(0, end);
  line.remove_prefix(end == std::string_view::npos ? line.size() : end);
  return token;
}

double parse_double(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw MeshParseError("line " + std::to_string(line_no) + ": bad coordinate '" +
                             std::string(token) + "'",
                         line_no);
  }
  return value;
}

std::uint32_t parse_index(std::string_view token, std::size_t vertex_count, std::size_t line_no) {
  // Only the position index of `v/vt/vn` matters.
  token = token.substr(0, token.find('/'));
  long long idx = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
  if (ec != std::errc{} || ptr != token.data() + token.size() || idx == 0) {
    throw MeshParseError("line " + std::to_string(line_no) + ": bad face index '" +
                             std::string(token) + "'",
                         line_no);
  }
  const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertex_count) + idx;
  if (resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
    throw MeshParseError("line " + std::to_string(line_no) + ": face index " +
                             std::to_string(idx) + " out of range",
                         line_no);
  }
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

TriangleMesh parse_obj(std::istream& in, const RigidTransform& transform) {
  transform.validate();
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto keyword = next_token(line);
    if (keyword == "v") {
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        const auto tok = next_token(line);
        if (tok.empty()) {
          throw MeshParseError("line " + std::to_string(line_no) + ": vertex needs 3 coordinates",
                               line_no);
        }
        p[k] = parse_double(tok, line_no);
      }
      vertices.push_back(transform.apply(p));
    } else if (keyword == "f") {
      std::vector<std::uint32_t> poly;
      for (auto tok = next_token(line); !tok.empty(); tok = next_token(line)) {
        poly.push_back(parse_index(tok, vertices.size(), line_no));
      }
      if (poly.size() < 3) {
        throw MeshParseError("line " + std::to_string(line_no) + ": face needs at least 3 vertices",
                             line_no);
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(faces));
}

TriangleMesh load_mesh(const std::filesystem::path& path, const RigidTransform& transform) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path.string());
  return parse_obj(in, transform);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace handray
