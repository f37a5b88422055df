#include <algorithm>
#include <fstream>

#include "handray/imaging.hpp"
#include "handray/scenario.hpp"

namespace handray {

namespace fs = std::filesystem;

namespace {

struct PassOutput {
  fs::path dir;
  std::string alpha;
  std::vector<fs::path> files;
};

std::vector<PathRecord> load_stage_records(const Scenario& s, const fs::path& dir) {
  if (s.input_records) return load_records(*s.input_records);
  for (const char* name : {"records.bin", "records.txt"}) {
    if (fs::exists(dir / name)) return load_records(dir / name);
  }
  throw std::runtime_error("stage input missing: no path records in " + dir.string() +
                           " (run the trace stage first or set input.records)");
}

BasebandCube load_stage_cube(const Scenario& s, const fs::path& dir, const ArrayGeometry& array) {
  const fs::path path = s.input_cube ? *s.input_cube : dir / "cube.bin";
  if (!fs::exists(path)) {
    throw std::runtime_error("stage input missing: no baseband cube at " + path.string() +
                             " (run the baseband stage first or set input.cube)");
  }
  return load_cube(path, array);
}

void run_pass(const Scenario& s, const AccelStructure* scene, const ArrayGeometry& array,
              const Waveform& waveform, const VoxelGrid& grid, std::optional<double> alpha,
              PassOutput& pass) {
  fs::create_directories(pass.dir);
  const bool do_trace = s.stage == Stage::kTrace || s.stage == Stage::kAll;
  const bool do_baseband = s.stage == Stage::kBaseband || s.stage == Stage::kAll;
  const bool do_image = s.stage == Stage::kImage || s.stage == Stage::kAll;

  std::vector<PathRecord> records;
  if (do_trace) {
    records = trace_all(*scene, array, material_map(s, *alpha), s.trace, s.threads);
    if (s.records == RecordFormat::kText || s.records == RecordFormat::kBoth) {
      save_records(pass.dir / "records.txt", records);
      pass.files.push_back(pass.dir / "records.txt");
    }
    if (s.records == RecordFormat::kBinary || s.records == RecordFormat::kBoth) {
      save_records(pass.dir / "records.bin", records);
      pass.files.push_back(pass.dir / "records.bin");
    }
  } else if (do_baseband) {
    records = load_stage_records(s, pass.dir);
  }
  if (!do_baseband && !do_image) return;

  BasebandCube cube;
  if (do_baseband) {
    cube = synthesize_cube(records, waveform, array, s.amplitude, s.threads);
    add_noise(cube, s.noise_power, s.noise_seed);
    save_cube(pass.dir / "cube.bin", cube);
    pass.files.push_back(pass.dir / "cube.bin");
  } else {
    cube = load_stage_cube(s, pass.dir, array);
  }
  if (!do_image) return;

  const Volume volume = backproject(cube, grid, s.threads);
  save_volume(pass.dir / "volume.bin", volume);
  pass.files.push_back(pass.dir / "volume.bin");
  if (s.export_complex) {
    std::ofstream out(pass.dir / "volume_complex.bin", std::ios::binary);
    write_volume_complex(out, volume);
    pass.files.push_back(pass.dir / "volume_complex.bin");
  }
  RadarImage image;
  try {
    image = finalize_image(max_project(volume), s.floor_db);
  } catch (const std::domain_error&) {
    throw std::runtime_error("reconstruction in " + pass.dir.string() +
                             " is all zero (no receptions); increase rays or rx_radius");
  }
  for (auto& f : export_image(pass.dir, image, s.export_csv)) pass.files.push_back(f);
}

}  // namespace

Manifest run_scenario(const Scenario& s) {
  const auto report = validate_scenario(s);
  if (!report.ok()) {
    std::string msg = "invalid scenario:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw ConfigError(msg);
  }
  const ArrayGeometry array = build_array(s.array);
  const Waveform waveform = build_waveform(s.waveform);
  const VoxelGrid grid = build_grid(s.grid);

  std::optional<AccelStructure> scene;
  if (s.stage == Stage::kTrace || s.stage == Stage::kAll) scene.emplace(load_scene(s));

  fs::create_directories(s.output_dir);
  std::vector<PassOutput> passes;
  if (s.stage == Stage::kImage && s.input_cube) {
    // Imaging a supplied cube does not depend on the material.
    passes.push_back({s.output_dir, "-", {}});
    run_pass(s, nullptr, array, waveform, grid, std::nullopt, passes.back());
  } else {
    for (double alpha : s.alphas) {
      const std::string label = format_alpha(alpha);
      passes.push_back({s.output_dir / ("alpha_" + label), label, {}});
      run_pass(s, scene ? &*scene : nullptr, array, waveform, grid, alpha, passes.back());
    }
  }

  Manifest manifest{s.output_dir, {}};
  for (const auto& pass : passes) {
    for (const auto& f : pass.files) {
      manifest.entries.push_back(
          {fs::relative(f, s.output_dir), pass.alpha, s.trace.master_seed, sha256_file(f)});
    }
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });

  std::ofstream out(s.output_dir / "manifest.txt");
  if (!out) throw std::runtime_error("cannot write manifest in " + s.output_dir.string());
  out << "# sha256 alpha seed path\n";
  for (const auto& e : manifest.entries) {
    out << e.sha256 << ' ' << e.alpha << ' ' << e.seed << ' ' << e.path.generic_string() << '\n';
  }
  return manifest;
}

}  // namespace handray
