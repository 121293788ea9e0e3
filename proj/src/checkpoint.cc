#include "eqodds/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "eqodds/errors.h"

namespace eqodds {

namespace {

constexpr char kMagic[8] = {'E', 'Q', 'O', 'D', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void U8(uint8_t x) { out_.push_back(static_cast<char>(x)); }
  void U32(uint32_t x) {
    for (int b = 0; b < 4; ++b) U8(static_cast<uint8_t>(x >> (8 * b)));
  }
  void U64(uint64_t x) {
    for (int b = 0; b < 8; ++b) U8(static_cast<uint8_t>(x >> (8 * b)));
  }
  void F64s(const std::vector<double>& xs) {
    for (double x : xs) U64(std::bit_cast<uint64_t>(x));
  }
  void Bytes(const char* p, size_t n) { out_.append(p, n); }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  uint8_t U8() {
    Need(1);
    return static_cast<uint8_t>(in_[pos_++]);
  }
  uint32_t U32() {
    uint32_t x = 0;
    for (int b = 0; b < 4; ++b) x |= static_cast<uint32_t>(U8()) << (8 * b);
    return x;
  }
  uint64_t U64() {
    uint64_t x = 0;
    for (int b = 0; b < 8; ++b) x |= static_cast<uint64_t>(U8()) << (8 * b);
    return x;
  }
  std::vector<double> F64s(size_t n) {
    Need(n * 8);
    std::vector<double> xs(n);
    for (double& x : xs) x = std::bit_cast<double>(U64());
    return xs;
  }
  std::string Bytes(size_t n) {
    Need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == in_.size(); }

 private:
  void Need(size_t n) const {
    if (in_.size() - pos_ < n) throw ValidationError("checkpoint is truncated");
  }
  const std::string& in_;
  size_t pos_ = 0;
};

// Guards allocation from corrupt headers.
constexpr uint64_t kMaxDim = uint64_t{1} << 32;

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& c) {
  CheckParams(c.spec, c.params);
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.U32(kCheckpointVersion);
  w.U64(c.spec.input_dim);
  w.U64(c.spec.output_dim);
  w.U32(static_cast<uint32_t>(c.spec.hidden.size()));
  for (size_t h : c.spec.hidden) w.U64(h);
  w.U8(c.spec.layer_norm ? 1 : 0);
  w.U8(c.spec.spectral_norm ? 1 : 0);
  w.U32(static_cast<uint32_t>(c.label.size()));
  w.Bytes(c.label.data(), c.label.size());
  for (const LayerParams& p : c.params.layers) {
    w.F64s(p.weight);
    w.F64s(p.bias);
    w.F64s(p.gamma);
    w.F64s(p.beta);
    w.F64s(p.u);
  }
  return w.Take();
}

Checkpoint DeserializeCheckpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.Bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw ValidationError("not a checkpoint file (bad magic)");
  }
  const uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw ValidationError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint c;
  c.spec.input_dim = r.U64();
  c.spec.output_dim = r.U64();
  const uint32_t n_hidden = r.U32();
  if (c.spec.input_dim >= kMaxDim || c.spec.output_dim >= kMaxDim || n_hidden > 1024) {
    throw ValidationError("checkpoint header has implausible dimensions");
  }
  for (uint32_t k = 0; k < n_hidden; ++k) {
    const uint64_t h = r.U64();
    if (h >= kMaxDim) throw ValidationError("checkpoint header has implausible widths");
    c.spec.hidden.push_back(h);
  }
  c.spec.layer_norm = r.U8() != 0;
  c.spec.spectral_norm = r.U8() != 0;
  c.label = r.Bytes(r.U32());
  ValidateSpec(c.spec);

  size_t in = c.spec.input_dim;
  for (size_t l = 0; l <= n_hidden; ++l) {
    const bool hidden = l < n_hidden;
    const size_t out = hidden ? c.spec.hidden[l] : c.spec.output_dim;
    LayerParams p;
    p.in = in;
    p.out = out;
    p.weight = r.F64s(in * out);
    p.bias = r.F64s(out);
    if (hidden && c.spec.layer_norm) {
      p.gamma = r.F64s(out);
      p.beta = r.F64s(out);
    }
    if (c.spec.spectral_norm) p.u = r.F64s(out);
    c.params.layers.push_back(std::move(p));
    in = out;
  }
  if (!r.AtEnd()) throw ValidationError("checkpoint has trailing bytes");
  try {
    CheckParams(c.spec, c.params);
  } catch (const NumericError& e) {
    throw ValidationError(std::string("checkpoint: ") + e.what());
  }
  return c;
}

void WriteCheckpoint(const Checkpoint& checkpoint, const std::string& path) {
  const std::string bytes = SerializeCheckpoint(checkpoint);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

Checkpoint ReadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return DeserializeCheckpoint(buf.str());
}

}  // namespace eqodds
