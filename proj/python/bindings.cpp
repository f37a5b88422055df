#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "handray/imaging.hpp"
#include "handray/procedural.hpp"
#include "handray/scenario.hpp"

namespace py = pybind11;
using namespace handray;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

Points to_points(const std::vector<Vec3>& v) {
  Points out(static_cast<Eigen::Index>(v.size()), 3);
  for (std::size_t i = 0; i < v.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

std::vector<Vec3> from_points(const Points& p) {
  std::vector<Vec3> out;
  for (Eigen::Index i = 0; i < p.rows(); ++i) out.emplace_back(p.row(i).transpose());
  return out;
}

py::dict records_to_dict(const std::vector<PathRecord>& recs) {
  py::array_t<std::uint32_t> tx(recs.size()), rx(recs.size()), bounces(recs.size());
  py::array_t<double> length(recs.size());
  auto t = tx.mutable_unchecked<1>();
  auto r = rx.mutable_unchecked<1>();
  auto b = bounces.mutable_unchecked<1>();
  auto d = length.mutable_unchecked<1>();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto k = static_cast<py::ssize_t>(i);
    t(k) = recs[i].tx;
    r(k) = recs[i].rx;
    d(k) = recs[i].length_d;
    b(k) = recs[i].bounces;
  }
  py::dict out;
  out["tx"] = tx;
  out["rx"] = rx;
  out["length"] = length;
  out["bounces"] = bounces;
  return out;
}

std::vector<PathRecord> records_from_dict(const py::dict& d) {
  const auto tx = py::array_t<std::uint32_t, py::array::forcecast>(d["tx"]);
  const auto rx = py::array_t<std::uint32_t, py::array::forcecast>(d["rx"]);
  const auto len = py::array_t<double, py::array::forcecast>(d["length"]);
  if (tx.size() != rx.size() || tx.size() != len.size()) {
    throw std::invalid_argument("record arrays must have equal length");
  }
  std::vector<PathRecord> out;
  for (py::ssize_t i = 0; i < tx.size(); ++i) {
    out.push_back({tx.at(i), rx.at(i), len.at(i), 1});
  }
  if (d.contains("bounces")) {
    const auto b = py::array_t<std::uint32_t, py::array::forcecast>(d["bounces"]);
    for (py::ssize_t i = 0; i < b.size() && i < tx.size(); ++i) out[i].bounces = b.at(i);
  }
  return out;
}

py::array_t<Complex> cube_to_array(const BasebandCube& cube) {
  py::array_t<Complex> out({cube.num_tx(), cube.num_rx(), cube.num_freq()});
  std::copy(cube.samples().begin(), cube.samples().end(), out.mutable_data());
  return out;
}

BasebandCube cube_from_array(const py::array_t<Complex, py::array::c_style | py::array::forcecast>& a,
                             const Waveform& w, const ArrayGeometry& array) {
  if (a.ndim() != 3 || std::size_t(a.shape(0)) != array.num_tx() ||
      std::size_t(a.shape(1)) != array.num_rx() || a.shape(2) != w.n_f) {
    throw std::invalid_argument("cube shape must be (num_tx, num_rx, n_f)");
  }
  BasebandCube cube(w, array);
  std::copy(a.data(), a.data() + a.size(), cube.samples().begin());
  return cube;
}

py::array_t<double> image_array(const RadarImage& img, const std::vector<double>& v) {
  py::array_t<double> out({img.ny, img.nx});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_handray, m) {
  m.doc() = "Radar ray tracing simulator core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<TriangleMesh>(m, "Mesh")
      .def_property_readonly("vertices", [](const TriangleMesh& t) { return to_points(t.vertices()); })
      .def_property_readonly("normals", [](const TriangleMesh& t) { return to_points(t.face_normals()); })
      .def_property_readonly("faces", [](const TriangleMesh& t) {
        py::array_t<std::uint32_t> out({t.num_faces(), std::size_t(3)});
        auto v = out.mutable_unchecked<2>();
        for (std::size_t f = 0; f < t.num_faces(); ++f)
          for (int c = 0; c < 3; ++c) v(f, c) = t.faces()[f][c];
        return out;
      })
      .def_property_readonly("num_faces", &TriangleMesh::num_faces)
      .def("total_area", &TriangleMesh::total_area);

  m.def("load_mesh",
        [](const std::filesystem::path& path, const Vec3& translate, const Vec3& rotate_deg, double scale) {
          return load_mesh(path, RigidTransform::from_euler_deg(rotate_deg, translate, scale));
        },
        py::arg("path"), py::arg("translate") = Vec3::Zero().eval(),
        py::arg("rotate_deg") = Vec3::Zero().eval(), py::arg("scale") = 1.0);
  m.def("make_plate", &make_plate, py::arg("width"), py::arg("height"), py::arg("cells"),
        py::arg("center"), py::arg("tilt_deg") = 0.0);
  m.def("make_hand", &make_hand, py::arg("offset") = Vec3::Zero().eval());

  py::class_<ArrayGeometry>(m, "ArrayGeometry")
      .def(py::init([](const Points& tx, const Points& rx) {
             return ArrayGeometry(from_points(tx), from_points(rx));
           }),
           py::arg("tx"), py::arg("rx"))
      .def_property_readonly("tx", [](const ArrayGeometry& a) { return to_points(a.tx()); })
      .def_property_readonly("rx", [](const ArrayGeometry& a) { return to_points(a.rx()); })
      .def_property_readonly("num_tx", &ArrayGeometry::num_tx)
      .def_property_readonly("num_rx", &ArrayGeometry::num_rx)
      .def("aperture_extent", &ArrayGeometry::aperture_extent);
  m.def("square_array", &build_square_array, py::arg("elements_per_side"), py::arg("spacing"),
        py::arg("plane_z") = 0.0);

  py::class_<Waveform>(m, "Waveform")
      .def_readonly("f0", &Waveform::f0)
      .def_readonly("delta_f", &Waveform::delta_f)
      .def_readonly("n_f", &Waveform::n_f)
      .def("frequency", &Waveform::frequency)
      .def("bandwidth", &Waveform::bandwidth)
      .def("unambiguous_range", &Waveform::unambiguous_range);
  m.def("build_waveform", py::overload_cast<double, double, int>(&build_waveform),
        py::arg("f_start"), py::arg("f_stop"), py::arg("steps"));

  py::class_<DerivedMetrics>(m, "DerivedMetrics")
      .def_readonly("bandwidth", &DerivedMetrics::bandwidth)
      .def_readonly("range_resolution", &DerivedMetrics::range_resolution)
      .def_readonly("center_wavelength", &DerivedMetrics::center_wavelength)
      .def_readonly("lateral_resolution", &DerivedMetrics::lateral_resolution);
  m.def("derived_metrics", &derived_metrics, py::arg("waveform"), py::arg("standoff"),
        py::arg("aperture"));

  m.def("sample_diffuse",
        [](const Vec3& normal, std::uint64_t seed, int count) {
          CounterRng rng(seed);
          std::vector<Vec3> out;
          for (int i = 0; i < count; ++i) out.push_back(sample_diffuse(normal.normalized(), rng));
          return to_points(out);
        },
        py::arg("normal"), py::arg("seed"), py::arg("count"));
  m.def("reflect_specular", &reflect_specular, py::arg("incident"), py::arg("normal"));
  m.def("scatter",
        [](const Vec3& incident, const Vec3& normal, double alpha, std::uint64_t seed) {
          CounterRng rng(seed);
          return scatter(incident, normal, MaterialParams{alpha}, rng).outgoing;
        },
        py::arg("incident"), py::arg("normal"), py::arg("alpha"), py::arg("seed"));

  m.def("trace",
        [](const TriangleMesh& mesh, const ArrayGeometry& array, double alpha, int rays_per_triangle,
           int max_bounces, double rx_radius, std::uint64_t seed, unsigned threads) {
          TraceConfig config;
          config.rays_per_triangle = rays_per_triangle;
          config.max_bounces = max_bounces;
          config.rx_radius = rx_radius;
          config.master_seed = seed;
          const AccelStructure scene(mesh);
          std::vector<PathRecord> recs;
          {
            py::gil_scoped_release release;
            recs = trace_all(scene, array, MaterialMap{MaterialParams{alpha}, {}}, config, threads);
          }
          return records_to_dict(recs);
        },
        py::arg("mesh"), py::arg("array"), py::arg("alpha") = 0.0, py::arg("rays_per_triangle") = 32,
        py::arg("max_bounces") = 3, py::arg("rx_radius") = 2e-3, py::arg("seed") = 1,
        py::arg("threads") = 0,
        "Traces the scene; returns a dict of arrays tx, rx, length, bounces.");

  m.def("synthesize_cube",
        [](const py::dict& records, const Waveform& w, const ArrayGeometry& array, bool inverse_distance) {
          const auto cube = synthesize_cube(records_from_dict(records), w, array,
                                            inverse_distance ? AmplitudeModel::kInverseDistance
                                                             : AmplitudeModel::kUnit);
          return cube_to_array(cube);
        },
        py::arg("records"), py::arg("waveform"), py::arg("array"), py::arg("inverse_distance") = false,
        "Complex baseband cube of shape (num_tx, num_rx, n_f).");

  py::class_<Volume>(m, "Volume")
      .def_property_readonly("values", [](const Volume& v) {
        const auto& c = v.grid.counts();
        py::array_t<Complex> out({c[2], c[1], c[0]});
        std::copy(v.values.begin(), v.values.end(), out.mutable_data());
        return out;
      })
      .def_property_readonly("counts", [](const Volume& v) { return v.grid.counts(); })
      .def("center", [](const Volume& v, int ix, int iy, int iz) { return v.grid.center(ix, iy, iz); });

  auto grid_args = [](const Vec3& lo, const Vec3& hi, double voxel) {
    return VoxelGrid(lo, hi, Vec3::Constant(voxel));
  };
  m.def("backproject",
        [grid_args](const py::array_t<Complex, py::array::c_style | py::array::forcecast>& cube,
                    const Waveform& w, const ArrayGeometry& array, const Vec3& lo, const Vec3& hi,
                    double voxel, unsigned threads) {
          const auto c = cube_from_array(cube, w, array);
          const auto grid = grid_args(lo, hi, voxel);
          py::gil_scoped_release release;
          return backproject(c, grid, threads);
        },
        py::arg("cube"), py::arg("waveform"), py::arg("array"), py::arg("grid_min"),
        py::arg("grid_max"), py::arg("voxel"), py::arg("threads") = 0);
  m.def("backproject_reference",
        [grid_args](const py::array_t<Complex, py::array::c_style | py::array::forcecast>& cube,
                    const Waveform& w, const ArrayGeometry& array, const Vec3& lo, const Vec3& hi,
                    double voxel) {
          return backproject_reference(cube_from_array(cube, w, array), grid_args(lo, hi, voxel));
        },
        py::arg("cube"), py::arg("waveform"), py::arg("array"), py::arg("grid_min"),
        py::arg("grid_max"), py::arg("voxel"));

  py::class_<RadarImage>(m, "Image")
      .def(py::init([](const py::array_t<double, py::array::c_style | py::array::forcecast>& amp) {
             if (amp.ndim() != 2) throw std::invalid_argument("amplitude must be 2-D");
             RadarImage img;
             img.ny = static_cast<int>(amp.shape(0));
             img.nx = static_cast<int>(amp.shape(1));
             img.dx = img.dy = 1.0;
             img.amplitude.assign(amp.data(), amp.data() + amp.size());
             img.depth_z.assign(img.amplitude.size(), 0.0);
             return img;
           }),
           py::arg("amplitude"))
      .def_property_readonly("amplitude", [](const RadarImage& i) { return image_array(i, i.amplitude); })
      .def_property_readonly("depth", [](const RadarImage& i) { return image_array(i, i.depth_z); })
      .def_readonly("floor_db", &RadarImage::floor_db);
  m.def("max_project", &max_project, py::arg("volume"));
  m.def("finalize_image", &finalize_image, py::arg("image"), py::arg("floor_db"));

  m.def("validate_scenario",
        [](const std::filesystem::path& config) {
          const auto report = validate_scenario(parse_scenario(config));
          return py::make_tuple(report.violations, report.info);
        },
        py::arg("config"), "Returns (violations, info) lists.");
  m.def("run_scenario",
        [](const std::filesystem::path& config, std::optional<std::string> stage,
           std::optional<std::uint64_t> seed, std::optional<unsigned> threads,
           std::optional<std::filesystem::path> out) {
          auto s = parse_scenario(config);
          if (stage) s.stage = parse_stage(*stage);
          if (seed) s.trace.master_seed = *seed;
          if (threads) s.threads = *threads;
          if (out) s.output_dir = *out;
          Manifest manifest;
          {
            py::gil_scoped_release release;
            manifest = run_scenario(s);
          }
          py::list entries;
          for (const auto& e : manifest.entries) {
            entries.append(py::make_tuple(e.sha256, e.alpha, e.seed, (manifest.output_dir / e.path).string()));
          }
          return entries;
        },
        py::arg("config"), py::arg("stage") = py::none(), py::arg("seed") = py::none(),
        py::arg("threads") = py::none(), py::arg("out") = py::none(),
        "Runs a YAML scenario; returns (sha256, alpha, seed, path) tuples.");
}
