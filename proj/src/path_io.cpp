#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "handray/binary_io.hpp"
#include "handray/tracer.hpp"

namespace handray {

void write_records_text(std::ostream& out, std::span<const PathRecord> records) {
  out << std::setprecision(17);
  for (const auto& r : records) out << r.tx << ' ' << r.rx << ' ' << r.length_d << ' ' << r.bounces << '\n';
}

void write_records_binary(std::ostream& out, std::span<const PathRecord> records) {
  for (const auto& r : records) {
    binary::put<std::uint32_t>(out, r.tx);
    binary::put<std::uint32_t>(out, r.rx);
    binary::put<double>(out, r.length_d);
    binary::put<std::uint32_t>(out, r.bounces);
  }
}

std::vector<PathRecord> read_records_text(std::istream& in) {
  std::vector<PathRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    PathRecord r;
    if (!(fields >> r.tx >> r.rx >> r.length_d >> r.bounces)) {
      throw std::runtime_error("path record line " + std::to_string(line_no) + " is malformed");
    }
    records.push_back(r);
  }
  return records;
}

std::vector<PathRecord> read_records_binary(std::istream& in) {
  std::vector<PathRecord> records;
  while (in.peek() != std::char_traits<char>::eof()) {
    PathRecord r;
    r.tx = binary::get<std::uint32_t>(in);
    r.rx = binary::get<std::uint32_t>(in);
    r.length_d = binary::get<double>(in);
    r.bounces = binary::get<std::uint32_t>(in);
    records.push_back(r);
  }
  return records;
}

namespace {

bool is_binary_path(const std::filesystem::path& path) { return path.extension() == ".bin"; }

}  // namespace

void save_records(const std::filesystem::path& path, std::span<const PathRecord> records) {
  const bool bin = is_binary_path(path);
  std::ofstream out(path, bin ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (bin) {
    write_records_binary(out, records);
  } else {
    write_records_text(out, records);
  }
}

std::vector<PathRecord> load_records(const std::filesystem::path& path) {
  const bool bin = is_binary_path(path);
  std::ifstream in(path, bin ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return bin ? read_records_binary(in) : read_records_text(in);
}

}  // namespace handray
