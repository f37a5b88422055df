#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "handray/baseband.hpp"
#include "handray/rfconfig.hpp"
#include "handray/tracer.hpp"

namespace handray {

/// Raised for malformed configs. The message names the line and field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeshSpec {
  std::filesystem::path path;  // resolved against the config directory
  Vec3 translate = Vec3::Zero();
  Vec3 rotate_deg = Vec3::Zero();
  double scale = 1.0;
  std::optional<double> alpha;
};

struct ArraySpec {
  int elements_per_side = 47;
  double spacing = 3e-3;
  double plane_z = 0.0;
  // When both lists are given they replace the square layout.
  std::vector<Vec3> tx_positions;
  std::vector<Vec3> rx_positions;

  bool explicit_positions() const { return !tx_positions.empty() || !rx_positions.empty(); }
};

struct WaveformSpec {
  double f_start = 72e9;
  double f_stop = 82e9;
  int steps = 128;
};

struct GridSpec {
  Vec3 min{-0.10, -0.10, 0.26};
  Vec3 max{0.10, 0.10, 0.34};
  Vec3 voxel{1e-3, 1e-3, 1e-3};
};

enum class Stage { kTrace, kBaseband, kImage, kAll };
enum class RecordFormat { kText, kBinary, kBoth, kNone };

Stage parse_stage(const std::string& name);
std::string stage_name(Stage stage);

/// Everything needed to run trace -> baseband -> imaging. Defaults reproduce
/// the 94 Tx / 94 Rx, 72-82 GHz, 128-step system and the 1 mm reconstruction
/// grid; only the mesh has no default.
struct Scenario {
  std::filesystem::path source;  // config file, empty when built in code
  std::vector<MeshSpec> meshes;
  std::vector<double> alphas{0.0};
  ArraySpec array;
  WaveformSpec waveform;
  TraceConfig trace;
  AmplitudeModel amplitude = AmplitudeModel::kUnit;
  double noise_power = 0.0;
  std::uint64_t noise_seed = 0;
  GridSpec grid;
  double floor_db = -15.0;
  bool export_complex = false;
  bool export_csv = false;
  std::filesystem::path output_dir = "out";
  RecordFormat records = RecordFormat::kBoth;
  Stage stage = Stage::kAll;
  std::optional<std::filesystem::path> input_cube;
  std::optional<std::filesystem::path> input_records;
  unsigned threads = 0;
};

/// Parses a YAML scenario. Relative paths resolve against the config's
/// directory. Only structural problems throw ConfigError; value ranges are
/// checked by validate_scenario.
Scenario parse_scenario(const std::filesystem::path& config_path);
Scenario parse_scenario_text(const std::string& text, const std::filesystem::path& base_dir);

ArrayGeometry build_array(const ArraySpec& spec);
Waveform build_waveform(const WaveformSpec& spec);
VoxelGrid build_grid(const GridSpec& spec);

/// Loads and merges all meshes; mesh i gets face group i.
TriangleMesh load_scene(const Scenario& scenario);
MaterialMap material_map(const Scenario& scenario, double alpha);

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> info;  // derived metrics and sizes, one line each

  bool ok() const { return violations.empty(); }
};

/// Checks every scenario invariant without writing anything.
ValidationReport validate_scenario(const Scenario& scenario);

struct ManifestEntry {
  std::filesystem::path path;  // relative to the output directory
  std::string alpha;           // formatted alpha, "-" when not applicable
  std::uint64_t seed = 0;
  std::string sha256;
};

struct Manifest {
  std::filesystem::path output_dir;
  std::vector<ManifestEntry> entries;
};

/// Runs the selected stages and writes `manifest.txt` into the output
/// directory. Per-alpha artifacts go to `alpha_<a>/`. Throws ConfigError when
/// the scenario is invalid and std::runtime_error when a stage input is missing.
Manifest run_scenario(const Scenario& scenario);

std::string format_alpha(double alpha);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace handray
