#include <cstdio>
#include <fstream>

#include "stpilot/checksum.hpp"
#include "stpilot/error.hpp"
#include "stpilot/scenesim.hpp"
#include "stpilot/trajectory_io.hpp"

namespace stpilot::scenesim {
namespace fs = std::filesystem;
namespace {

std::string cell_name(int camera, int time) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%03d/t%03d.png", camera, time);
  return buf;
}

}  // namespace

void write_grid(const fs::path& dir, const Grid& grid, const std::string& scene_hash) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

  nlohmann::json cells = nlohmann::json::object();
  std::string all_hashes;
  for (int c = 1; c <= grid.camera_count(); ++c) {
    fs::create_directories((dir / cell_name(c, 1)).parent_path(), ec);
    require(!ec, ErrorKind::Io, "cannot create camera directory: " + ec.message());
    for (int t = 1; t <= grid.time_count(); ++t) {
      const std::string name = cell_name(c, t);
      const auto bytes = encode_png(grid.cell(c, t));
      write_file_bytes(dir / name, bytes);
      const std::string h = sha256_hex(bytes);
      cells[name] = h;
      all_hashes += h;
    }
  }
  geometry::write_trajectory(dir / "trajectory.txt", grid.trajectory);

  nlohmann::json meta{{"format", "stpilot-grid"},
                      {"version", 1},
                      {"cameras", grid.camera_count()},
                      {"times", grid.times},
                      {"intrinsics", to_json(grid.intrinsics)},
                      {"scene_hash", scene_hash},
                      {"trajectory", "trajectory.txt"},
                      {"trajectory_sha256", sha256_file(dir / "trajectory.txt")},
                      {"cells", cells},
                      {"manifest_sha256", sha256_hex(all_hashes)}};
  std::ofstream out(dir / "meta.json");
  out << meta.dump(2) << '\n';
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + (dir / "meta.json").string());
}

Grid read_grid(const fs::path& dir, bool verify_checksums) {
  const fs::path meta_path = dir / "meta.json";
  std::ifstream in(meta_path);
  require(static_cast<bool>(in), ErrorKind::Io, "missing grid metadata " + meta_path.string());
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, "unreadable " + meta_path.string() + ": " + e.what());
  }

  Grid grid;
  try {
    const fs::path traj_path = dir / meta.at("trajectory").get<std::string>();
    if (verify_checksums) {
      require(sha256_file(traj_path) == meta.at("trajectory_sha256").get<std::string>(),
              ErrorKind::Checksum, "checksum mismatch: " + traj_path.string());
    }
    grid.trajectory = geometry::read_trajectory(traj_path);
    grid.times = meta.at("times").get<std::vector<double>>();
    grid.intrinsics = intrinsics_from_json(meta.at("intrinsics"));
    require(meta.at("cameras").get<int>() == grid.camera_count(), ErrorKind::Io,
            "grid metadata camera count disagrees with " + traj_path.string());
    const auto& cells = meta.at("cells");
    grid.cells.reserve(grid.trajectory.size() * grid.times.size());
    for (int c = 1; c <= grid.camera_count(); ++c) {
      for (int t = 1; t <= grid.time_count(); ++t) {
        const std::string name = cell_name(c, t);
        const fs::path path = dir / name;
        const auto bytes = read_file_bytes(path);
        if (verify_checksums) {
          require(cells.contains(name) && sha256_hex(bytes) == cells.at(name).get<std::string>(),
                  ErrorKind::Checksum, "checksum mismatch: " + path.string());
        }
        grid.cells.push_back(decode_png(bytes));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, "malformed " + meta_path.string() + ": " + e.what());
  }
  return grid;
}

}  // namespace stpilot::scenesim
