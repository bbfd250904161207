#include "latent_reach/store.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

namespace latent_reach::store {

namespace {

// float storage keeps the on-disk text at 32-bit shortest form
using Json = nlohmann::basic_json<nlohmann::ordered_map, std::vector, std::string, bool, std::int64_t,
                                  std::uint64_t, float>;

Json float_array(const LatentPoint& p) {
  Json arr = Json::array();
  for (double x : p.coords()) arr.push_back(static_cast<float>(x));
  return arr;
}

Json float_array(const std::vector<double>& xs) {
  Json arr = Json::array();
  for (double x : xs) arr.push_back(static_cast<float>(x));
  return arr;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw FormatError("line " + std::to_string(line) + ": " + msg);
}

std::vector<double> read_floats(const Json& j, std::size_t line, const std::string& what) {
  if (!j.is_array()) fail(line, what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) fail(line, what + " must contain only numbers");
    out.push_back(static_cast<double>(v.get<float>()));
  }
  return out;
}

LatentPoint read_point(const Json& j, std::size_t line, const std::string& what, std::size_t dim) {
  auto coords = read_floats(j, line, what);
  if (coords.size() != dim) {
    fail(line, what + " has length " + std::to_string(coords.size()) + ", expected dim " + std::to_string(dim));
  }
  try {
    return LatentPoint(std::move(coords));
  } catch (const Error& e) {
    fail(line, what + ": " + e.what());
  }
}

DatasetHeader parse_header(const Json& j) {
  if (!j.is_object()) fail(1, "header must be a JSON object");
  if (!j.contains("schema") || !j["schema"].is_string() || j["schema"].get<std::string>() != kDatasetSchema) {
    fail(1, std::string("unsupported schema, expected \"") + kDatasetSchema + "\"");
  }
  DatasetHeader h;
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<std::int64_t>() <= 0) {
    fail(1, "header field \"dim\" must be a positive integer");
  }
  h.dim = static_cast<std::size_t>(j["dim"].get<std::int64_t>());
  if (!j.contains("source") || !j["source"].is_string()) fail(1, "header field \"source\" must be a string");
  h.source = j["source"].get<std::string>();
  if (!j.contains("layer_index") || !j["layer_index"].is_number_integer()) {
    fail(1, "header field \"layer_index\" must be an integer");
  }
  h.layer_index = static_cast<long>(j["layer_index"].get<std::int64_t>());
  if (!j.contains("target_name") || !j["target_name"].is_string()) {
    fail(1, "header field \"target_name\" must be a string");
  }
  h.target_name = j["target_name"].get<std::string>();
  if (j.contains("pooling")) {
    if (!j["pooling"].is_string()) fail(1, "header field \"pooling\" must be a string");
    h.pooling = j["pooling"].get<std::string>();
  }
  return h;
}

Trajectory parse_trajectory(const Json& j, std::size_t line, std::size_t dim) {
  if (!j.is_object()) fail(line, "trajectory must be a JSON object");
  if (!j.contains("states") || !j["states"].is_array()) fail(line, "missing \"states\" array");
  if (!j.contains("ell")) fail(line, "missing \"ell\" array");
  Trajectory t;
  const auto& states = j["states"];
  for (std::size_t i = 0; i < states.size(); ++i) {
    t.states.push_back(read_point(states[i], line, "state " + std::to_string(i), dim));
  }
  t.ell = read_floats(j["ell"], line, "ell");
  if (t.states.empty()) fail(line, "trajectory has no states");
  if (t.states.size() != t.ell.size()) {
    fail(line, std::to_string(t.states.size()) + " states but " + std::to_string(t.ell.size()) + " ell values");
  }
  if (j.contains("tokens")) {
    if (!j["tokens"].is_array()) fail(line, "\"tokens\" must be an array of strings");
    std::vector<std::string> tokens;
    for (const auto& tok : j["tokens"]) {
      if (!tok.is_string()) fail(line, "\"tokens\" must be an array of strings");
      tokens.push_back(tok.get<std::string>());
    }
    t.tokens = std::move(tokens);
  }
  if (j.contains("prompt_embedding")) t.prompt_embedding = read_point(j["prompt_embedding"], line, "prompt_embedding", dim);
  if (j.contains("response_embedding")) {
    t.response_embedding = read_point(j["response_embedding"], line, "response_embedding", dim);
  }
  try {
    t.validate();
  } catch (const Error& e) {
    fail(line, e.what());
  }
  return t;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tensor(std::vector<std::uint8_t>& out, std::span<const float> t) {
  put_u64(out, t.size());
  for (float f : t) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  void tensor(std::span<float> dst, const char* name) {
    const std::uint64_t n = u64();
    if (n != dst.size()) {
      throw FormatError(std::string("checkpoint tensor ") + name + " has " + std::to_string(n) +
                        " values, expected " + std::to_string(dst.size()));
    }
    for (float& f : dst) f = std::bit_cast<float>(u32());
  }
  bool done() const { return pos_ == end_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > end_) throw FormatError("truncated checkpoint");
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

constexpr const char* kTensorNames[kTensorCount] = {"affine1.weight", "affine1.bias", "ln1.gain", "ln1.bias",
                                                    "affine2.weight", "affine2.bias", "ln2.gain", "ln2.bias",
                                                    "affine3.weight", "affine3.bias"};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const std::filesystem::path& path, const std::string& data) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_dataset(std::ostream& out, const TrajectoryDataset& ds) {
  ds.validate();
  Json header;
  header["schema"] = kDatasetSchema;
  header["dim"] = static_cast<std::int64_t>(ds.header.dim);
  header["source"] = ds.header.source;
  header["layer_index"] = static_cast<std::int64_t>(ds.header.layer_index);
  header["target_name"] = ds.header.target_name;
  header["pooling"] = ds.header.pooling;
  out << header.dump() << '\n';
  for (const auto& t : ds.trajectories) {
    Json j;
    Json states = Json::array();
    for (const auto& s : t.states) states.push_back(float_array(s));
    j["states"] = std::move(states);
    j["ell"] = float_array(t.ell);
    if (t.tokens) j["tokens"] = *t.tokens;
    if (t.prompt_embedding) j["prompt_embedding"] = float_array(*t.prompt_embedding);
    if (t.response_embedding) j["response_embedding"] = float_array(*t.response_embedding);
    out << j.dump() << '\n';
  }
}

void write_dataset(const std::filesystem::path& path, const TrajectoryDataset& ds) {
  std::ostringstream buf;
  write_dataset(buf, ds);
  write_file_atomic(path, buf.str());
}

TrajectoryDataset read_dataset(std::istream& in) {
  TrajectoryDataset ds;
  std::string text;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) {
      if (!have_header) fail(line, "expected header object");
      continue;
    }
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail(line, std::string("malformed JSON (") + e.what() + ")");
    }
    if (!have_header) {
      ds.header = parse_header(j);
      have_header = true;
    } else {
      ds.trajectories.push_back(parse_trajectory(j, line, ds.header.dim));
    }
  }
  if (!have_header) throw FormatError("line 1: missing header");
  return ds;
}

TrajectoryDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_dataset(in);
}

std::uint64_t checksum64(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::uint8_t> encode_checkpoint(const ValueNetwork& net, const OptimizerState<float>& opt) {
  const NetworkShape& s = net.shape();
  if (opt.m.shape != s || opt.v.shape != s) throw DimensionError("optimizer moments do not match network shape");
  std::vector<std::uint8_t> out = {'L', 'R', 'C', 'K'};
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(s.input_dim));
  put_u32(out, static_cast<std::uint32_t>(s.hidden1));
  put_u32(out, static_cast<std::uint32_t>(s.hidden2));
  put_u64(out, net.seed());
  for (auto t : net.params().tensors()) put_tensor(out, t);
  put_u64(out, opt.step);
  for (auto t : opt.m.tensors()) put_tensor(out, t);
  for (auto t : opt.v.tensors()) put_tensor(out, t);
  put_u64(out, checksum64(out.data(), out.size()));
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes, std::optional<std::size_t> expected_input_dim) {
  if (bytes.size() < 4 + 4 + 8 || bytes[0] != 'L' || bytes[1] != 'R' || bytes[2] != 'C' || bytes[3] != 'K') {
    throw FormatError("not a checkpoint (bad magic)");
  }
  const std::size_t body = bytes.size() - 8;
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) stored |= static_cast<std::uint64_t>(bytes[body + i]) << (8 * i);
  if (stored != checksum64(bytes.data(), body)) throw FormatError("corrupt checkpoint");

  Reader r(bytes, body);
  r.u32();  // magic
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  NetworkShape shape;
  shape.input_dim = r.u32();
  shape.hidden1 = r.u32();
  shape.hidden2 = r.u32();
  if (shape.input_dim == 0 || shape.hidden1 == 0 || shape.hidden2 == 0) {
    throw FormatError("checkpoint dimensions must be positive");
  }
  if (expected_input_dim && *expected_input_dim != shape.input_dim) {
    throw DimensionError("checkpoint input dim " + std::to_string(shape.input_dim) + " does not match expected " +
                         std::to_string(*expected_input_dim));
  }
  const std::uint64_t seed = r.u64();
  Parameters<float> params = Parameters<float>::filled(shape, 0.0f);
  auto pt = params.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) r.tensor(pt[i], kTensorNames[i]);
  OptimizerState<float> opt = OptimizerState<float>::fresh(shape);
  opt.step = r.u64();
  auto mt = opt.m.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) r.tensor(mt[i], kTensorNames[i]);
  auto vt = opt.v.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) r.tensor(vt[i], kTensorNames[i]);
  if (!r.done()) throw FormatError("trailing bytes in checkpoint");
  return Checkpoint{ValueNetwork(std::move(params), seed), std::move(opt)};
}

void save_checkpoint(const std::filesystem::path& path, const ValueNetwork& net, const OptimizerState<float>& opt) {
  const auto bytes = encode_checkpoint(net, opt);
  write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<std::size_t> expected_input_dim) {
  return decode_checkpoint(read_file(path), expected_input_dim);
}

}  // namespace latent_reach::store
