#include <cstdio>
#include <fstream>

#include "stpilot/checksum.hpp"
#include "stpilot/error.hpp"
#include "stpilot/griddata.hpp"

namespace stpilot::griddata {
namespace fs = std::filesystem;
namespace {

constexpr const char* kClipRoles[] = {"source", "target", "previous"};

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "f%03zu.png", i + 1);
  return buf;
}

bool safe_id(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

nlohmann::json clip_meta(const Clip& clip) {
  nlohmann::json cams = nlohmann::json::array();
  for (const auto& pose : clip.cameras) cams.push_back(pose.row_major());
  return {{"frames", clip.size()}, {"cameras", cams}, {"times", timewarp::to_json(clip.times)}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "missing " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, "unreadable " + path.string() + ": " + e.what());
  }
}

}  // namespace

void write_dataset(const std::vector<PairSample>& samples, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "samples", ec);
  require(!ec, ErrorKind::Io, "cannot create " + (dir / "samples").string() + ": " + ec.message());

  nlohmann::json ids = nlohmann::json::array();
  nlohmann::json files = nlohmann::json::object();
  for (const auto& sample : samples) {
    check_pair(sample);
    require(safe_id(sample.id), ErrorKind::InvalidArgument,
            "sample id '" + sample.id + "' is not a plain file name");
    require(std::find(ids.begin(), ids.end(), sample.id) == ids.end(), ErrorKind::InvalidArgument,
            "duplicate sample id '" + sample.id + "'");
    ids.push_back(sample.id);
    const std::string rel_root = "samples/" + sample.id;

    nlohmann::json pair{{"id", sample.id},
                        {"reference_frame", sample.reference_frame},
                        {"seed", sample.seed},
                        {"spec", sample.spec}};
    if (sample.warp) pair["warp"] = timewarp::to_json(*sample.warp);

    const Clip* clips[] = {&sample.source, &sample.target,
                           sample.previous ? &*sample.previous : nullptr};
    for (int r = 0; r < 3; ++r) {
      if (!clips[r]) continue;
      const std::string rel_dir = rel_root + "/" + kClipRoles[r];
      fs::create_directories(dir / rel_dir, ec);
      require(!ec, ErrorKind::Io, "cannot create " + (dir / rel_dir).string());
      for (std::size_t i = 0; i < clips[r]->size(); ++i) {
        const std::string rel = rel_dir + "/" + frame_name(i);
        const auto bytes = encode_png(clips[r]->frames[i]);
        write_file_bytes(dir / rel, bytes);
        files[rel] = sha256_hex(bytes);
      }
      pair[kClipRoles[r]] = clip_meta(*clips[r]);
    }
    const std::string rel_pair = rel_root + "/pair.json";
    const std::string text = pair.dump(1) + "\n";
    write_text(dir / rel_pair, text);
    files[rel_pair] = sha256_hex(text);
  }

  const nlohmann::json manifest{
      {"format", "stpilot-dataset"}, {"version", 1}, {"samples", ids}, {"files", files}};
  write_text(dir / "manifest.json", manifest.dump(1) + "\n");
}

std::vector<PairSample> read_dataset(const fs::path& dir) {
  const nlohmann::json manifest = read_json(dir / "manifest.json");
  std::vector<PairSample> samples;
  try {
    require(manifest.at("format") == "stpilot-dataset", ErrorKind::Io,
            (dir / "manifest.json").string() + " is not a dataset manifest");
    const auto& files = manifest.at("files");

    auto verified_bytes = [&](const std::string& rel) {
      const fs::path path = dir / rel;
      require(files.contains(rel), ErrorKind::Checksum, "file not listed in manifest: " + path.string());
      auto bytes = read_file_bytes(path);
      require(sha256_hex(bytes) == files.at(rel).get<std::string>(), ErrorKind::Checksum,
              "checksum mismatch: " + path.string());
      return bytes;
    };

    for (const auto& jid : manifest.at("samples")) {
      const std::string id = jid.get<std::string>();
      require(safe_id(id), ErrorKind::Io, "bad sample id '" + id + "' in manifest");
      const std::string rel_root = "samples/" + id;
      const auto pair_bytes = verified_bytes(rel_root + "/pair.json");
      const auto pair = nlohmann::json::parse(pair_bytes.begin(), pair_bytes.end());

      auto read_clip = [&](const char* role) {
        const auto& meta = pair.at(role);
        Clip clip;
        const auto n = meta.at("frames").get<std::size_t>();
        for (std::size_t i = 0; i < n; ++i) {
          const std::string rel = rel_root + "/" + role + "/" + frame_name(i);
          try {
            clip.frames.push_back(decode_png(verified_bytes(rel)));
          } catch (const Error& e) {
            if (e.kind() == ErrorKind::Checksum) throw;
            fail(e.kind(), (dir / rel).string() + ": " + e.what());
          }
        }
        for (const auto& row : meta.at("cameras")) {
          const auto v = row.get<std::vector<double>>();
          clip.cameras.push_back(geometry::Pose::from_row_major(v));
        }
        clip.times = timewarp::time_signal_from_json(meta.at("times"));
        return clip;
      };

      PairSample s;
      s.id = pair.at("id").get<std::string>();
      s.reference_frame = pair.at("reference_frame").get<int>();
      s.seed = pair.at("seed").get<std::uint64_t>();
      s.spec = pair.at("spec");
      if (pair.contains("warp")) s.warp = timewarp::warp_spec_from_json(pair.at("warp"));
      s.source = read_clip("source");
      s.target = read_clip("target");
      if (pair.contains("previous")) s.previous = read_clip("previous");
      check_pair(s);
      samples.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, "malformed dataset in " + dir.string() + ": " + e.what());
  }
  return samples;
}

}  // namespace stpilot::griddata
