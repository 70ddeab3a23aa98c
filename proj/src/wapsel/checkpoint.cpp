#include "wapsel/checkpoint.hpp"

#include <bit>
#include <cmath>

#include "json.hpp"
#include "wapsel/errors.hpp"
#include "wapsel/io.hpp"

namespace wapsel {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw ParseError("checkpoint truncated at byte " + std::to_string(pos_));
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(s[i])) << (8 * i);
    return v;
  }
  double f64() {
    auto s = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(s[i])) << (8 * i);
    return std::bit_cast<double>(v);
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::json metadata_json(const Checkpoint& ckpt) {
  const HeadModel& m = ckpt.model;
  nlohmann::json meta;
  meta["loss"] = name(ckpt.meta.loss);
  meta["layers"] = m.layer_count();
  meta["hidden"] = m.hidden_width();
  meta["seed"] = ckpt.meta.seed;
  meta["config_hash"] = ckpt.meta.config_hash;
  meta["no_peer"] = ckpt.meta.no_peer;
  meta["reward_mode"] = name(ckpt.meta.reward_mode);
  meta["dpo_base"] = ckpt.meta.dpo_base ? nlohmann::json(name(*ckpt.meta.dpo_base)) : nlohmann::json(nullptr);
  meta["epochs"] = ckpt.meta.epochs;
  return meta;
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  const auto& m = ckpt.model;
  std::string out(kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(m.layer_count()));
  for (const auto& s : m.shapes()) {
    put_u32(out, static_cast<std::uint32_t>(s.in));
    put_u32(out, static_cast<std::uint32_t>(s.out));
  }
  for (double p : m.parameters()) put_f64(out, p);

  const std::string text = metadata_json(ckpt).dump();
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(kCheckpointMagic.size()) != kCheckpointMagic) throw ParseError("not a head checkpoint");
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto layers = r.u32();
  if (layers < 1 || layers > 16) throw ParseError("implausible layer count " + std::to_string(layers));
  std::vector<LayerShape> shapes;
  std::size_t total = 0;
  for (std::uint32_t l = 0; l < layers; ++l) {
    LayerShape s{r.u32(), r.u32()};
    if (s.in == 0 || s.out == 0 || s.in > 4096 || s.out > 4096) throw ParseError("implausible layer shape");
    total += s.in * s.out + s.out;
    shapes.push_back(s);
  }
  std::vector<double> params(total);
  for (double& p : params) {
    p = r.f64();
    if (!std::isfinite(p)) throw ParseError("checkpoint holds a non-finite parameter");
  }
  Checkpoint ckpt;
  try {
    ckpt.model = HeadModel(std::move(shapes), std::move(params));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("bad checkpoint shapes: ") + e.what());
  }
  const auto len = r.u32();
  const auto text = r.take(len);
  if (!r.done()) throw ParseError("trailing bytes after checkpoint metadata");
  try {
    const auto meta = nlohmann::json::parse(text);
    ckpt.meta.loss = parse_enum<LossKind>(meta.at("loss").get<std::string>());
    ckpt.meta.seed = meta.at("seed").get<std::uint64_t>();
    ckpt.meta.config_hash = meta.at("config_hash").get<std::string>();
    ckpt.meta.no_peer = meta.at("no_peer").get<bool>();
    ckpt.meta.reward_mode = parse_enum<RewardMode>(meta.at("reward_mode").get<std::string>());
    if (!meta.at("dpo_base").is_null()) {
      ckpt.meta.dpo_base = parse_enum<LossKind>(meta.at("dpo_base").get<std::string>());
    }
    ckpt.meta.epochs = meta.at("epochs").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint metadata: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  io::write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(io::read_file(path));
}

}  // namespace wapsel
