#include "handray/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace handray {

namespace {

std::string where(const YAML::Node& node, const std::string& field) {
  std::ostringstream os;
  if (node.Mark().line >= 0) os << "line " << node.Mark().line + 1 << ", ";
  os << "field '" << field << "'";
  return os.str();
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field, const char* expected) {
  if (!node.IsScalar()) throw ConfigError(where(node, field) + ": expected " + expected);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(node, field) + ": expected " + expected + ", got '" +
                      node.Scalar() + "'");
  }
}

double number(const YAML::Node& node, const std::string& field) {
  return scalar<double>(node, field, "a number");
}

Vec3 vec3(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() != 3) {
    throw ConfigError(where(node, field) + ": expected a list of 3 numbers");
  }
  return {number(node[0], field), number(node[1], field), number(node[2], field)};
}

std::vector<Vec3> vec3_list(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) throw ConfigError(where(node, field) + ": expected a list of [x, y, z]");
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(vec3(node[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

YAML::Node section(const YAML::Node& root, const std::string& name,
                   std::initializer_list<const char*> allowed) {
  const YAML::Node node = root[name];
  if (!node) return node;
  if (!node.IsMap()) throw ConfigError(where(node, name) + ": expected a mapping");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.count(key)) throw ConfigError(where(kv.first, name + "." + key) + ": unknown key");
  }
  return node;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

Stage parse_stage(const std::string& name) {
  if (name == "trace") return Stage::kTrace;
  if (name == "baseband") return Stage::kBaseband;
  if (name == "image" || name == "imaging") return Stage::kImage;
  if (name == "all") return Stage::kAll;
  throw ConfigError("unknown stage '" + name + "' (expected trace, baseband, image, all)");
}

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::kTrace: return "trace";
    case Stage::kBaseband: return "baseband";
    case Stage::kImage: return "image";
    case Stage::kAll: return "all";
  }
  return "all";
}

Scenario parse_scenario(const std::filesystem::path& config_path) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config file: " + config_path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Scenario s = parse_scenario_text(buffer.str(), config_path.parent_path());
  s.source = config_path;
  return s;
}

Scenario parse_scenario_text(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping of sections");
  static const std::set<std::string> kSections = {"scene", "material", "array", "waveform",
                                                   "trace", "baseband", "grid", "imaging",
                                                   "output", "run", "input"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!kSections.count(key)) throw ConfigError(where(kv.first, key) + ": unknown section");
  }

  Scenario s;
  s.output_dir = resolve(base_dir, "out");
  if (const auto scene = root["scene"]) {
    if (!scene.IsSequence()) throw ConfigError(where(scene, "scene") + ": expected a list of meshes");
    for (std::size_t i = 0; i < scene.size(); ++i) {
      const auto item = scene[i];
      const std::string field = "scene[" + std::to_string(i) + "]";
      if (!item.IsMap() || !item["mesh"]) throw ConfigError(where(item, field) + ": needs 'mesh'");
      for (const auto& kv : item) {
        const auto key = kv.first.as<std::string>();
        if (key != "mesh" && key != "translate" && key != "rotate_deg" && key != "scale" &&
            key != "alpha") {
          throw ConfigError(where(kv.first, field + "." + key) + ": unknown key");
        }
      }
      MeshSpec m;
      m.path = resolve(base_dir, scalar<std::string>(item["mesh"], field + ".mesh", "a path"));
      if (item["translate"]) m.translate = vec3(item["translate"], field + ".translate");
      if (item["rotate_deg"]) m.rotate_deg = vec3(item["rotate_deg"], field + ".rotate_deg");
      if (item["scale"]) m.scale = number(item["scale"], field + ".scale");
      if (item["alpha"]) m.alpha = number(item["alpha"], field + ".alpha");
      s.meshes.push_back(std::move(m));
    }
  }

  if (const auto mat = section(root, "material", {"alpha"}); mat && mat["alpha"]) {
    const auto a = mat["alpha"];
    s.alphas.clear();
    if (a.IsSequence()) {
      for (std::size_t i = 0; i < a.size(); ++i) s.alphas.push_back(number(a[i], "material.alpha"));
    } else {
      s.alphas.push_back(number(a, "material.alpha"));
    }
  }

  if (const auto arr = section(root, "array", {"elements_per_side", "spacing", "plane_z",
                                               "tx_positions", "rx_positions"})) {
    if (arr["elements_per_side"]) {
      s.array.elements_per_side =
          scalar<int>(arr["elements_per_side"], "array.elements_per_side", "an integer");
    }
    if (arr["spacing"]) s.array.spacing = number(arr["spacing"], "array.spacing");
    if (arr["plane_z"]) s.array.plane_z = number(arr["plane_z"], "array.plane_z");
    if (arr["tx_positions"]) s.array.tx_positions = vec3_list(arr["tx_positions"], "array.tx_positions");
    if (arr["rx_positions"]) s.array.rx_positions = vec3_list(arr["rx_positions"], "array.rx_positions");
  }

  if (const auto wf = section(root, "waveform", {"f_start", "f_stop", "steps"})) {
    if (wf["f_start"]) s.waveform.f_start = number(wf["f_start"], "waveform.f_start");
    if (wf["f_stop"]) s.waveform.f_stop = number(wf["f_stop"], "waveform.f_stop");
    if (wf["steps"]) s.waveform.steps = scalar<int>(wf["steps"], "waveform.steps", "an integer");
  }

  if (const auto tr = section(root, "trace", {"rays_per_triangle", "ray_budget", "max_bounces",
                                              "rx_radius", "seed", "amplitude"})) {
    if (tr["rays_per_triangle"]) {
      s.trace.rays_per_triangle =
          scalar<int>(tr["rays_per_triangle"], "trace.rays_per_triangle", "an integer");
    }
    if (tr["ray_budget"]) {
      const auto b = scalar<std::string>(tr["ray_budget"], "trace.ray_budget", "fixed or area");
      if (b == "fixed") {
        s.trace.budget = RayBudget::kFixed;
      } else if (b == "area") {
        s.trace.budget = RayBudget::kAreaWeighted;
      } else {
        throw ConfigError(where(tr["ray_budget"], "trace.ray_budget") + ": expected fixed or area");
      }
    }
    if (tr["max_bounces"]) {
      s.trace.max_bounces = scalar<int>(tr["max_bounces"], "trace.max_bounces", "an integer");
    }
    if (tr["rx_radius"]) s.trace.rx_radius = number(tr["rx_radius"], "trace.rx_radius");
    if (tr["seed"]) {
      s.trace.master_seed = scalar<std::uint64_t>(tr["seed"], "trace.seed", "an unsigned integer");
    }
    if (tr["amplitude"]) {
      const auto a = scalar<std::string>(tr["amplitude"], "trace.amplitude", "unit or inverse_distance");
      if (a == "unit") {
        s.amplitude = AmplitudeModel::kUnit;
      } else if (a == "inverse_distance") {
        s.amplitude = AmplitudeModel::kInverseDistance;
      } else {
        throw ConfigError(where(tr["amplitude"], "trace.amplitude") +
                          ": expected unit or inverse_distance");
      }
    }
  }

  if (const auto bb = section(root, "baseband", {"noise_power", "noise_seed"})) {
    if (bb["noise_power"]) s.noise_power = number(bb["noise_power"], "baseband.noise_power");
    if (bb["noise_seed"]) {
      s.noise_seed = scalar<std::uint64_t>(bb["noise_seed"], "baseband.noise_seed", "an unsigned integer");
    }
  }

  if (const auto g = section(root, "grid", {"min", "max", "voxel"})) {
    if (g["min"]) s.grid.min = vec3(g["min"], "grid.min");
    if (g["max"]) s.grid.max = vec3(g["max"], "grid.max");
    if (g["voxel"]) {
      if (g["voxel"].IsScalar()) {
        s.grid.voxel = Vec3::Constant(number(g["voxel"], "grid.voxel"));
      } else {
        s.grid.voxel = vec3(g["voxel"], "grid.voxel");
      }
    }
  }

  if (const auto im = section(root, "imaging", {"floor_db", "export_complex", "csv"})) {
    if (im["floor_db"]) {
      if (im["floor_db"].IsScalar() && im["floor_db"].Scalar() == "off") {
        s.floor_db = -std::numeric_limits<double>::infinity();
      } else {
        s.floor_db = number(im["floor_db"], "imaging.floor_db");
      }
    }
    if (im["export_complex"]) {
      s.export_complex = scalar<bool>(im["export_complex"], "imaging.export_complex", "true or false");
    }
    if (im["csv"]) s.export_csv = scalar<bool>(im["csv"], "imaging.csv", "true or false");
  }

  if (const auto out = section(root, "output", {"directory", "path_records"})) {
    if (out["directory"]) {
      s.output_dir = resolve(base_dir, scalar<std::string>(out["directory"], "output.directory", "a path"));
    }
    if (out["path_records"]) {
      const auto f = scalar<std::string>(out["path_records"], "output.path_records",
                                         "text, binary, both or none");
      if (f == "text") {
        s.records = RecordFormat::kText;
      } else if (f == "binary") {
        s.records = RecordFormat::kBinary;
      } else if (f == "both") {
        s.records = RecordFormat::kBoth;
      } else if (f == "none") {
        s.records = RecordFormat::kNone;
      } else {
        throw ConfigError(where(out["path_records"], "output.path_records") +
                          ": expected text, binary, both or none");
      }
    }
  }

  if (const auto run = section(root, "run", {"stage", "threads"})) {
    if (run["stage"]) {
      try {
        s.stage = parse_stage(scalar<std::string>(run["stage"], "run.stage", "a stage name"));
      } catch (const ConfigError& e) {
        throw ConfigError(where(run["stage"], "run.stage") + ": " + e.what());
      }
    }
    if (run["threads"]) s.threads = scalar<unsigned>(run["threads"], "run.threads", "an unsigned integer");
  }

  if (const auto in = section(root, "input", {"cube", "records"})) {
    if (in["cube"]) s.input_cube = resolve(base_dir, scalar<std::string>(in["cube"], "input.cube", "a path"));
    if (in["records"]) {
      s.input_records = resolve(base_dir, scalar<std::string>(in["records"], "input.records", "a path"));
    }
  }
  return s;
}

ArrayGeometry build_array(const ArraySpec& spec) {
  if (spec.explicit_positions()) return ArrayGeometry(spec.tx_positions, spec.rx_positions);
  return build_square_array(spec.elements_per_side, spec.spacing, spec.plane_z);
}

Waveform build_waveform(const WaveformSpec& spec) {
  return build_waveform(spec.f_start, spec.f_stop, spec.steps);
}

VoxelGrid build_grid(const GridSpec& spec) { return VoxelGrid(spec.min, spec.max, spec.voxel); }

TriangleMesh load_scene(const Scenario& scenario) {
  TriangleMesh scene;
  for (std::size_t i = 0; i < scenario.meshes.size(); ++i) {
    const auto& m = scenario.meshes[i];
    const auto transform = RigidTransform::from_euler_deg(m.rotate_deg, m.translate, m.scale);
    scene.append(load_mesh(m.path, transform).with_group(static_cast<std::uint32_t>(i)));
  }
  return scene;
}

MaterialMap material_map(const Scenario& scenario, double alpha) {
  MaterialMap map;
  map.fallback.alpha = alpha;
  for (const auto& m : scenario.meshes) {
    map.per_group.push_back(m.alpha ? std::optional<MaterialParams>(MaterialParams{*m.alpha}) : std::nullopt);
  }
  return map;
}

std::string format_alpha(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", alpha);
  return buf;
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport report;
  auto violation = [&](std::string msg) { report.violations.push_back(std::move(msg)); };
  auto info = [&](std::string msg) { report.info.push_back(std::move(msg)); };
  auto fmt = [](const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, args...);
    return std::string(buf);
  };

  const bool needs_scene = s.stage == Stage::kTrace || s.stage == Stage::kAll;

  if (s.alphas.empty()) violation("material.alpha: at least one value required");
  for (double a : s.alphas) {
    if (!(a >= 0.0 && a <= 1.0)) violation("material.alpha: " + fmt("%g", a) + " is outside [0, 1]");
  }

  std::optional<ArrayGeometry> array;
  try {
    array = build_array(s.array);
    info(fmt("antennas: %zu Tx, %zu Rx (%zu channels)", array->num_tx(), array->num_rx(),
             array->num_tx() * array->num_rx()));
    info(fmt("aperture extent: %.4f m", array->aperture_extent()));
  } catch (const std::exception& e) {
    violation(std::string("array: ") + e.what());
  }

  std::optional<Waveform> waveform;
  try {
    waveform = build_waveform(s.waveform);
    info(fmt("frequency steps: %d from %.6g Hz, delta_f %.6g Hz", waveform->n_f, waveform->f0,
             waveform->delta_f));
    info(fmt("unambiguous range: %.4f m", waveform->unambiguous_range()));
  } catch (const std::exception& e) {
    violation(std::string("waveform: ") + e.what());
  }

  std::optional<VoxelGrid> grid;
  try {
    grid = build_grid(s.grid);
    info(fmt("voxels: %d x %d x %d = %zu", grid->counts()[0], grid->counts()[1], grid->counts()[2],
             grid->size()));
  } catch (const std::exception& e) {
    violation(std::string("grid: ") + e.what());
  }

  if (array && waveform && grid) {
    const double standoff = std::abs(0.5 * (grid->min().z() + grid->max().z()) - array->center().z());
    try {
      const auto m = derived_metrics(*waveform, standoff, array->aperture_extent());
      info(fmt("bandwidth: %.6g Hz", m.bandwidth));
      info(fmt("range resolution: %.4f mm", m.range_resolution * 1e3));
      info(fmt("lateral resolution at %.3f m: %.4f mm", standoff, m.lateral_resolution * 1e3));
    } catch (const std::exception& e) {
      violation(std::string("derived metrics: ") + e.what());
    }
    if (s.trace.rx_radius >= 0.1 * standoff) {
      violation("trace.rx_radius must be much smaller than the standoff distance");
    }
    if (array) {
      info(fmt("backprojection work: %.3g voxel-channel-frequency terms",
               double(grid->size()) * double(array->num_tx() * array->num_rx()) * waveform->n_f));
    }
  }

  try {
    s.trace.validate();
  } catch (const std::exception& e) {
    violation(std::string("trace: ") + e.what());
  }
  if (!(s.noise_power >= 0.0)) violation("baseband.noise_power must be non-negative");
  if (std::isnan(s.floor_db) || s.floor_db >= 0.0) violation("imaging.floor_db must be negative");

  if (needs_scene) {
    if (s.meshes.empty()) violation("scene: at least one mesh required for the trace stage");
    std::size_t faces = 0;
    bool loaded = true;
    for (std::size_t i = 0; i < s.meshes.size(); ++i) {
      const auto& m = s.meshes[i];
      const std::string field = "scene[" + std::to_string(i) + "]";
      if (m.alpha && !(*m.alpha >= 0.0 && *m.alpha <= 1.0)) {
        violation(field + ".alpha: " + fmt("%g", *m.alpha) + " is outside [0, 1]");
      }
      if (!std::filesystem::exists(m.path)) {
        violation(field + ".mesh: file not found: " + m.path.string());
        loaded = false;
        continue;
      }
      try {
        const auto t = RigidTransform::from_euler_deg(m.rotate_deg, m.translate, m.scale);
        faces += load_mesh(m.path, t).num_faces();
      } catch (const std::exception& e) {
        violation(field + ".mesh: " + e.what());
        loaded = false;
      }
    }
    if (loaded && !s.meshes.empty()) {
      info(fmt("scene faces: %zu", faces));
      if (array && s.trace.rays_per_triangle >= 1) {
        try {
          const auto scene = load_scene(s);
          long long rays = 0;
          for (int r : rays_per_face(scene, s.trace)) rays += r;
          info(fmt("primary rays per alpha (upper bound): %lld", rays * (long long)array->num_tx()));
        } catch (const std::exception&) {
        }
      }
    }
  }

  if (s.stage == Stage::kImage && s.input_cube && !std::filesystem::exists(*s.input_cube)) {
    violation("input.cube: file not found: " + s.input_cube->string());
  }
  if (s.stage == Stage::kBaseband && s.input_records && !std::filesystem::exists(*s.input_records)) {
    violation("input.records: file not found: " + s.input_records->string());
  }
  return report;
}

}  // namespace handray
