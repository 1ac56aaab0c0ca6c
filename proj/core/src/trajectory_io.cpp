#include "stpilot/trajectory_io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "stpilot/error.hpp"

namespace stpilot::geometry {
namespace {

Pose pose_from_text(const std::array<double, 12>& v, const std::string& where) {
  Mat3 r;
  Vec3 t;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) r(row, col) = v[row * 4 + col];
    t(row) = v[row * 4 + 3];
  }
  require(r.allFinite() && t.allFinite(), ErrorKind::InvalidPose, where + ": non-finite value");
  const double drift = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  require(drift <= kTextRotationTolerance && r.determinant() > 0.0, ErrorKind::InvalidPose,
          where + ": rotation is not orthonormal");
  try {
    return {r, t};
  } catch (const Error&) {
    return {nearest_rotation(r), t};
  }
}

}  // namespace

Trajectory parse_trajectory(std::istream& in, const std::string& source_name) {
  Trajectory traj;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::array<double, 12> values{};
    std::size_t count = 0;
    std::string token;
    const std::string where = source_name + ":" + std::to_string(line_no);
    while (fields >> token) {
      require(count < 12, ErrorKind::InvalidArgument, where + ": more than 12 values");
      try {
        std::size_t used = 0;
        values[count] = std::stod(token, &used);
        require(used == token.size(), ErrorKind::InvalidArgument,
                where + ": bad number '" + token + "'");
      } catch (const std::logic_error&) {
        fail(ErrorKind::InvalidArgument, where + ": bad number '" + token + "'");
      }
      ++count;
    }
    require(count == 12, ErrorKind::InvalidArgument,
            where + ": expected 12 values, got " + std::to_string(count));
    traj.push_back(pose_from_text(values, where));
  }
  require(!traj.empty(), ErrorKind::InvalidArgument, source_name + ": no poses");
  return traj;
}

void format_trajectory(std::ostream& out, const Trajectory& traj) {
  char buf[32];
  for (const auto& pose : traj) {
    const auto v = pose.row_major();
    for (std::size_t i = 0; i < v.size(); ++i) {
      // %.17g round-trips every double exactly.
      std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
      out << (i ? " " : "") << buf;
    }
    out << '\n';
  }
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Io, "cannot open trajectory file " + path.string());
  return parse_trajectory(in, path.string());
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot write trajectory file " + path.string());
  out << "# 3x4 world-to-camera [R|t], row-major, one frame per line\n";
  format_trajectory(out, traj);
  require(out.good(), ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace stpilot::geometry
