#include <bit>
#include <cstring>
#include <fstream>

#include "stpilot/embed.hpp"
#include "stpilot/error.hpp"

namespace stpilot::embed {
namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
    return out;
  }
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext) {
  return std::filesystem::path(stem.string() + ext);
}

}  // namespace

void save_weights(const std::filesystem::path& stem, EmbedModel& model) {
  nlohmann::json tensors = nlohmann::json::array();
  std::ofstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  require(bin.good(), ErrorKind::Io, "cannot write " + with_suffix(stem, ".bin").string());
  std::size_t offset = 0;
  model.visit([&](const std::string& name, const std::vector<int>& shape,
                  std::vector<double>& value, std::vector<double>&) {
    tensors.push_back({{"name", name}, {"shape", shape}, {"offset", offset}, {"count", value.size()}});
    for (double v : value) {
      const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
      bin.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
    offset += value.size();
  });
  require(bin.good(), ErrorKind::Io, "write failed for " + with_suffix(stem, ".bin").string());

  const nlohmann::json manifest{{"format", "float64-le"},
                                {"config", to_json(model.config)},
                                {"tensors", tensors},
                                {"total_count", offset}};
  std::ofstream js(with_suffix(stem, ".json"));
  require(js.good(), ErrorKind::Io, "cannot write " + with_suffix(stem, ".json").string());
  js << manifest.dump(2) << '\n';
}

EmbedModel load_weights(const std::filesystem::path& stem) {
  std::ifstream js(with_suffix(stem, ".json"));
  require(js.good(), ErrorKind::Io, "cannot open " + with_suffix(stem, ".json").string());
  nlohmann::json manifest;
  try {
    js >> manifest;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, std::string("bad weight manifest: ") + e.what());
  }
  EmbedModel model = EmbedModel::create(embed_config_from_json(manifest.at("config")));

  std::ifstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  require(bin.good(), ErrorKind::Io, "cannot open " + with_suffix(stem, ".bin").string());
  const auto& tensors = manifest.at("tensors");
  std::size_t index = 0;
  model.visit([&](const std::string& name, const std::vector<int>& shape,
                  std::vector<double>& value, std::vector<double>&) {
    require(index < tensors.size(), ErrorKind::ShapeMismatch, "weight manifest is missing " + name);
    const auto& t = tensors[index++];
    require(t.at("name").get<std::string>() == name && t.at("shape").get<std::vector<int>>() == shape,
            ErrorKind::ShapeMismatch, "weight manifest entry does not match " + name);
    bin.seekg(static_cast<std::streamoff>(t.at("offset").get<std::size_t>() * 8));
    for (auto& v : value) {
      std::uint64_t bits = 0;
      bin.read(reinterpret_cast<char*>(&bits), sizeof(bits));
      require(bin.good(), ErrorKind::Io, "weight file truncated in " + name);
      v = std::bit_cast<double>(to_little_endian(bits));
    }
  });
  require(index == tensors.size(), ErrorKind::ShapeMismatch, "weight manifest has extra tensors");
  return model;
}

}  // namespace stpilot::embed
