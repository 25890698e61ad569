#include "arf/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <random>

#include "arf/error.hpp"

namespace arf {

namespace {

constexpr std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int bit = 0; bit < 8; ++bit)
      c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

constexpr auto kCrcTable = make_crc_table();

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void i32(std::int32_t v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void boolean(bool v) { u8(v ? 1 : 0); }
  void str(const std::string& s) {
    u64(s.size());
    buf_.append(s);
  }

  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    const char* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[i])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const char* p = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(p[i])) << (8 * i);
    return v;
  }
  std::int32_t i32() { return std::bit_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool boolean() { return u8() != 0; }
  std::string str() {
    const std::uint64_t size = u64();
    if (size > remaining()) throw Error("model artifact: truncated payload");
    const char* p = take(size);
    return std::string(p, size);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const char* take(std::size_t n) {
    if (n > remaining()) throw Error("model artifact: truncated payload");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

void write_schema(Writer& w, const Schema& schema) {
  w.u32(static_cast<std::uint32_t>(schema.n_columns()));
  for (const Column& col : schema.columns()) {
    w.str(col.name);
    w.u8(static_cast<std::uint8_t>(col.kind));
    if (col.kind == ColumnKind::categorical) {
      w.u32(static_cast<std::uint32_t>(col.levels.size()));
      for (const std::string& level : col.levels) w.str(level);
    }
  }
}

Schema read_schema(Reader& r) {
  std::vector<Column> columns(r.u32());
  for (Column& col : columns) {
    col.name = r.str();
    const std::uint8_t kind = r.u8();
    if (kind > 1) throw Error("model artifact: bad column kind");
    col.kind = static_cast<ColumnKind>(kind);
    if (col.kind == ColumnKind::categorical) {
      col.levels.resize(r.u32());
      for (std::string& level : col.levels) level = r.str();
    }
  }
  return Schema(std::move(columns));
}

void write_forest(Writer& w, const Forest& forest) {
  w.u64(forest.config.n_trees);
  w.u64(forest.config.mtry);
  w.u64(forest.config.min_node_size);
  w.u64(forest.config.max_depth);
  w.u64(forest.config.seed);
  w.u32(static_cast<std::uint32_t>(forest.trees.size()));
  for (const Tree& tree : forest.trees) {
    w.u32(static_cast<std::uint32_t>(tree.nodes.size()));
    for (const TreeNode& node : tree.nodes) {
      w.boolean(node.is_leaf());
      if (node.is_leaf()) {
        w.u64(node.n_real);
      } else {
        w.i32(node.left);
        w.i32(node.right);
        w.u32(node.split.feature);
        w.u8(static_cast<std::uint8_t>(node.split.kind));
        if (node.split.kind == SplitKind::continuous) {
          w.f64(node.split.threshold);
        } else {
          w.u32(static_cast<std::uint32_t>(node.split.left_set.size()));
          for (std::int32_t code : node.split.left_set) w.i32(code);
        }
      }
    }
  }
}

Forest read_forest(Reader& r) {
  Forest forest;
  forest.config.n_trees = r.u64();
  forest.config.mtry = r.u64();
  forest.config.min_node_size = r.u64();
  forest.config.max_depth = r.u64();
  forest.config.seed = r.u64();
  forest.trees.resize(r.u32());
  for (Tree& tree : forest.trees) {
    tree.nodes.resize(r.u32());
    for (TreeNode& node : tree.nodes) {
      if (r.boolean()) {
        node.n_real = r.u64();
      } else {
        node.left = r.i32();
        node.right = r.i32();
        node.split.feature = r.u32();
        const std::uint8_t kind = r.u8();
        if (kind > 1) throw Error("model artifact: bad split kind");
        node.split.kind = static_cast<SplitKind>(kind);
        if (node.split.kind == SplitKind::continuous) {
          node.split.threshold = r.f64();
        } else {
          node.split.left_set.resize(r.u32());
          for (std::int32_t& code : node.split.left_set) code = r.i32();
        }
        const auto size = static_cast<std::int32_t>(tree.nodes.size());
        if (node.left < 0 || node.left >= size || node.right < 0 || node.right >= size)
          throw Error("model artifact: tree child id out of range");
      }
    }
  }
  return forest;
}

void write_params(Writer& w, const std::optional<LeafParamsTable>& params) {
  w.boolean(params.has_value());
  if (!params) return;
  w.u32(static_cast<std::uint32_t>(params->trees.size()));
  for (const auto& leaves : params->trees) {
    w.u32(static_cast<std::uint32_t>(leaves.size()));
    for (const LeafParams& leaf : leaves) {
      w.i32(leaf.nodeid);
      w.f64(leaf.coverage);
      w.u32(static_cast<std::uint32_t>(leaf.features.size()));
      for (const LeafFeatureParams& feature : leaf.features) {
        if (const auto* tn = std::get_if<TruncNormParams>(&feature)) {
          w.u8(0);
          w.f64(tn->mean);
          w.f64(tn->sd);
          w.f64(tn->lower);
          w.f64(tn->upper);
        } else {
          const auto& cat = std::get<CategoricalParams>(feature);
          w.u8(1);
          w.u32(static_cast<std::uint32_t>(cat.probs.size()));
          for (const auto& [code, prob] : cat.probs) {
            w.i32(code);
            w.f64(prob);
          }
        }
      }
    }
  }
}

std::optional<LeafParamsTable> read_params(Reader& r) {
  if (!r.boolean()) return std::nullopt;
  LeafParamsTable table;
  table.trees.resize(r.u32());
  for (auto& leaves : table.trees) {
    leaves.resize(r.u32());
    for (LeafParams& leaf : leaves) {
      leaf.nodeid = r.i32();
      leaf.coverage = r.f64();
      leaf.features.resize(r.u32());
      for (LeafFeatureParams& feature : leaf.features) {
        const std::uint8_t tag = r.u8();
        if (tag == 0) {
          TruncNormParams tn;
          tn.mean = r.f64();
          tn.sd = r.f64();
          tn.lower = r.f64();
          tn.upper = r.f64();
          feature = tn;
        } else if (tag == 1) {
          CategoricalParams cat;
          cat.probs.resize(r.u32());
          for (auto& [code, prob] : cat.probs) {
            code = r.i32();
            prob = r.f64();
          }
          feature = std::move(cat);
        } else {
          throw Error("model artifact: bad feature parameter tag");
        }
      }
    }
  }
  return table;
}

void write_metadata(Writer& w, const FitMetadata& meta) {
  w.u64(meta.config.n_trees);
  w.u64(meta.config.min_node_size);
  w.u64(meta.config.mtry);
  w.u64(meta.config.max_depth);
  w.f64(meta.config.delta);
  w.u64(meta.config.max_iters);
  w.u64(meta.config.seed);
  w.boolean(meta.config.verbose);
  w.f64(meta.smoothing_alpha);
  w.u32(static_cast<std::uint32_t>(meta.trace.accuracies.size()));
  for (double a : meta.trace.accuracies) w.f64(a);
  w.boolean(meta.trace.converged);
  w.u64(meta.trace.iterations_used);
  w.u64(meta.created_unix);
}

FitMetadata read_metadata(Reader& r) {
  FitMetadata meta;
  meta.config.n_trees = r.u64();
  meta.config.min_node_size = r.u64();
  meta.config.mtry = r.u64();
  meta.config.max_depth = r.u64();
  meta.config.delta = r.f64();
  meta.config.max_iters = r.u64();
  meta.config.seed = r.u64();
  meta.config.verbose = r.boolean();
  meta.smoothing_alpha = r.f64();
  meta.trace.accuracies.resize(r.u32());
  for (double& a : meta.trace.accuracies) a = r.f64();
  meta.trace.converged = r.boolean();
  meta.trace.iterations_used = r.u64();
  meta.created_unix = r.u64();
  return meta;
}

}  // namespace

std::uint32_t crc32(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const std::uint8_t*>(data);
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i)
    crc = kCrcTable[(crc ^ bytes[i]) & 0xFF] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

std::string save_model_bytes(const ArfModel& model) {
  Writer payload;
  write_schema(payload, model.schema);
  write_forest(payload, model.forest);
  write_params(payload, model.params);
  write_metadata(payload, model.meta);
  const std::string body = payload.take();

  Writer out;
  for (char c : kModelMagic) out.u8(static_cast<std::uint8_t>(c));
  out.u32(kModelFormatVersion);
  out.u64(body.size());
  std::string result = out.take();
  result += body;
  Writer tail;
  tail.u32(crc32(body.data(), body.size()));
  result += tail.take();
  return result;
}

ArfModel load_model_bytes(const std::string& bytes) {
  constexpr std::size_t kHeaderSize = 4 + 4 + 8;
  if (bytes.size() < kHeaderSize) throw Error("not a model artifact (too short)");
  if (std::memcmp(bytes.data(), kModelMagic, 4) != 0)
    throw Error("not a model artifact (bad magic)");

  Reader header(bytes);
  header.u32();  // skip magic, checked above
  const std::uint32_t version = header.u32();
  if (version != kModelFormatVersion)
    throw Error("model artifact: unsupported format version " + std::to_string(version));
  const std::uint64_t payload_size = header.u64();
  if (bytes.size() < kHeaderSize + payload_size + 4)
    throw Error("model artifact: truncated file");
  if (bytes.size() > kHeaderSize + payload_size + 4)
    throw Error("model artifact: trailing bytes after checksum");

  const std::string payload = bytes.substr(kHeaderSize, payload_size);
  const std::string tail = bytes.substr(kHeaderSize + payload_size, 4);
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i)
    stored |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(tail[i])) << (8 * i);
  if (stored != crc32(payload.data(), payload.size()))
    throw Error("model artifact: checksum mismatch (file corrupted)");

  Reader r(payload);
  ArfModel model;
  model.schema = read_schema(r);
  model.forest = read_forest(r);
  model.params = read_params(r);
  model.meta = read_metadata(r);
  if (!r.done()) throw Error("model artifact: trailing bytes in payload");
  if (model.params && model.params->trees.size() != model.forest.trees.size())
    throw Error("model artifact: parameter table does not match the forest");
  return model;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp = dir / (path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write failure on " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move temporary file into place at " + path.string());
  }
}

void save_model(const ArfModel& model, const std::filesystem::path& path) {
  atomic_write_file(path, save_model_bytes(model));
}

ArfModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model artifact " + path.string());
  std::string bytes(std::istreambuf_iterator<char>(in), {});
  return load_model_bytes(bytes);
}

}  // namespace arf
