#include "isb/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "isb/error.hpp"

namespace fs = std::filesystem;

namespace isb {
namespace {

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const std::string& in, std::size_t& at) {
  if (at + sizeof(T) > in.size()) fail(ErrorCode::UnreadableSource, "truncated checkpoint");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  at += sizeof(T);
  return static_cast<T>(v);
}

const char* const kPrefixes[] = {"discriminator/", "generator/", "optimizer/"};

std::string hex_encode(const std::string& s) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (unsigned char c : s) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

std::string hex_decode(const std::string& s) {
  auto val = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    fail(ErrorCode::UnreadableSource, "bad hex digit in checkpoint");
  };
  if (s.size() % 2) fail(ErrorCode::UnreadableSource, "odd-length hex string in checkpoint");
  std::string out;
  for (std::size_t i = 0; i < s.size(); i += 2) out.push_back(static_cast<char>(val(s[i]) * 16 + val(s[i + 1])));
  return out;
}

}  // namespace

void append_arrays(std::string& out, const TensorMap& arrays) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(arrays.size()));
  for (const auto& [name, t] : arrays) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double v : t.values()) {
      const float f = static_cast<float>(v);
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_le<std::uint32_t>(out, bits);
    }
  }
}

TensorMap parse_arrays(const std::string& bytes, std::size_t& offset) {
  TensorMap arrays;
  const auto count = get_le<std::uint32_t>(bytes, offset);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = get_le<std::uint32_t>(bytes, offset);
    if (offset + name_len > bytes.size()) fail(ErrorCode::UnreadableSource, "truncated array name");
    std::string name = bytes.substr(offset, name_len);
    offset += name_len;
    const auto rank = get_le<std::uint32_t>(bytes, offset);
    nn::Shape shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(get_le<std::uint32_t>(bytes, offset));
    const std::size_t n = nn::shape_size(shape);
    if (offset + 4 * n > bytes.size()) fail(ErrorCode::UnreadableSource, "truncated array " + name);
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto bits = get_le<std::uint32_t>(bytes, offset);
      float f;
      std::memcpy(&f, &bits, 4);
      values[k] = f;
    }
    arrays.emplace(std::move(name), nn::Tensor(std::move(shape), std::move(values)));
  }
  return arrays;
}

std::string encode_checkpoint(const CheckpointBundle& bundle) {
  std::string out = "ISBC";
  put_le<std::uint32_t>(out, bundle.format_version);
  nlohmann::json header{{"configs", bundle.configs}, {"step", bundle.step}, {"rng_state", hex_encode(bundle.rng_state)}};
  const std::string text = header.dump();
  put_le<std::uint64_t>(out, text.size());
  out += text;
  TensorMap all;
  for (const auto& [k, v] : bundle.discriminator_params) all.emplace(std::string(kPrefixes[0]) + k, v);
  for (const auto& [k, v] : bundle.generator_params) all.emplace(std::string(kPrefixes[1]) + k, v);
  for (const auto& [k, v] : bundle.optimizer_state) all.emplace(std::string(kPrefixes[2]) + k, v);
  append_arrays(out, all);
  return out;
}

CheckpointBundle decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 8 || bytes.compare(0, 4, "ISBC") != 0) fail(ErrorCode::UnreadableSource, "not an ISBC checkpoint");
  std::size_t at = 4;
  CheckpointBundle bundle;
  bundle.format_version = get_le<std::uint32_t>(bytes, at);
  if (bundle.format_version != kCheckpointFormatVersion) {
    fail(ErrorCode::VersionMismatch, "checkpoint format version " + std::to_string(bundle.format_version) +
                                         ", this build reads version " + std::to_string(kCheckpointFormatVersion));
  }
  const auto text_len = get_le<std::uint64_t>(bytes, at);
  if (at + text_len > bytes.size()) fail(ErrorCode::UnreadableSource, "truncated checkpoint header");
  try {
    const auto header = nlohmann::json::parse(bytes.substr(at, text_len));
    bundle.configs = header.at("configs");
    bundle.step = header.at("step").get<std::int64_t>();
    bundle.rng_state = hex_decode(header.at("rng_state").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::UnreadableSource, std::string("malformed checkpoint header: ") + e.what());
  }
  at += text_len;
  for (auto& [name, t] : parse_arrays(bytes, at)) {
    if (name.rfind(kPrefixes[0], 0) == 0) {
      bundle.discriminator_params.emplace(name.substr(std::strlen(kPrefixes[0])), std::move(t));
    } else if (name.rfind(kPrefixes[1], 0) == 0) {
      bundle.generator_params.emplace(name.substr(std::strlen(kPrefixes[1])), std::move(t));
    } else if (name.rfind(kPrefixes[2], 0) == 0) {
      bundle.optimizer_state.emplace(name.substr(std::strlen(kPrefixes[2])), std::move(t));
    } else {
      fail(ErrorCode::UnreadableSource, "unexpected array " + name + " in checkpoint");
    }
  }
  if (at != bytes.size()) fail(ErrorCode::UnreadableSource, "trailing bytes in checkpoint");
  return bundle;
}

std::string read_binary_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_binary_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

void save_checkpoint(const CheckpointBundle& bundle, const fs::path& path) { write_binary_file(path, encode_checkpoint(bundle)); }

CheckpointBundle load_checkpoint(const fs::path& path) { return decode_checkpoint(read_binary_file(path)); }

TensorMap export_parameters(const nn::ParameterList& params) {
  TensorMap out;
  for (const auto& p : params) out.emplace(p.name, p.var.value());
  return out;
}

void import_parameters(const nn::ParameterList& params, const TensorMap& values, const std::string& what) {
  if (params.size() != values.size()) {
    fail(ErrorCode::ShapeMismatch, what + ": checkpoint has " + std::to_string(values.size()) + " arrays, model has " +
                                       std::to_string(params.size()));
  }
  for (const auto& p : params) {
    auto it = values.find(p.name);
    if (it == values.end()) fail(ErrorCode::ShapeMismatch, what + ": checkpoint lacks " + p.name);
    if (it->second.shape() != p.var.value().shape()) {
      fail(ErrorCode::ShapeMismatch, what + ": " + p.name + " is " + nn::shape_string(it->second.shape()) +
                                         " in checkpoint, " + nn::shape_string(p.var.value().shape()) + " in model");
    }
  }
  for (const auto& p : params) {
    nn::Var v = p.var;
    v.mutable_value() = values.at(p.name);
  }
}

}  // namespace isb
