// File layout (all integers and floats little-endian):
//
//   "DRIX" | u32 version | section* | u32 crc32(everything before it)
//   section := u32 tag | u64 payload length | payload
//
// Sections appear once each, in tag order: header, provider, config,
// chunks, vectors, clusters, stats.

#include <zlib.h>

#include <bit>
#include <fstream>
#include <sstream>

#include "docroute/errors.hpp"
#include "docroute/index.hpp"

namespace docroute {

namespace {

constexpr char kMagic[4] = {'D', 'R', 'I', 'X'};

enum SectionTag : std::uint32_t {
  kHeader = 1,
  kProvider = 2,
  kConfig = 3,
  kChunks = 4,
  kVectors = 5,
  kClusters = 6,
  kStats = 7,
};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    const auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    return std::string(take(n));
  }
  std::string_view take(std::size_t n) {
    if (n > data_.size() - pos_) fail(ErrorKind::kInvariantViolation, "index section is truncated");
    const auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), n);
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

void put_section(Writer& out, SectionTag tag, Writer& payload) {
  out.u32(tag);
  out.u64(payload.bytes().size());
  out.raw(payload.bytes());
}

Reader get_section(Reader& in, SectionTag tag) {
  const std::uint32_t got = in.u32();
  if (got != tag) {
    fail(ErrorKind::kInvariantViolation, "expected section " + std::to_string(tag) + ", found " + std::to_string(got));
  }
  const std::uint64_t length = in.u64();
  return Reader(in.take(length));
}

void put_vector(Writer& w, std::span<const float> v) {
  for (float x : v) w.f32(x);
}

std::vector<float> get_vector(Reader& r, std::size_t n) {
  std::vector<float> v(n);
  for (float& x : v) x = r.f32();
  return v;
}

void expect_done(const Reader& r, std::string_view name) {
  if (!r.done()) fail(ErrorKind::kInvariantViolation, "trailing bytes in " + std::string(name) + " section");
}

}  // namespace

std::string serialize_index(const ExpertIndex& index) {
  Writer out;
  out.raw(std::string_view(kMagic, 4));
  out.u32(index.version);

  Writer header;
  header.u64(index.chunks.size());
  header.u32(static_cast<std::uint32_t>(index.clusters.size()));
  header.u32(index.dim());
  header.u64(index.clustering.seed);
  put_section(out, kHeader, header);

  Writer provider;
  provider.u8(static_cast<std::uint8_t>(index.provider.kind));
  provider.u32(index.provider.dim);
  provider.u64(index.provider.seed);
  provider.str(index.provider.endpoint);
  provider.u32(index.provider.batch_size);
  provider.str(index.provider.model_name);
  put_section(out, kProvider, provider);

  Writer config;
  config.u32(index.chunking.window_size);
  config.f64(index.chunking.overlap_fraction);
  config.u32(index.clustering.min_cluster_size);
  config.u32(index.clustering.min_samples.value_or(0));
  config.u32(index.clustering.max_cluster_size);
  config.f64(index.clustering.tightness_floor);
  config.u32(index.clustering.kmeans_max_iters);
  config.f64(index.clustering.kmeans_tolerance);
  config.u64(index.clustering.seed);
  put_section(out, kConfig, config);

  Writer chunks;
  for (const Chunk& c : index.chunks) {
    chunks.str(c.chunk_id);
    chunks.str(c.doc_id);
    chunks.u32(c.ordinal);
    chunks.u32(c.start_token);
    chunks.u32(c.end_token);
    chunks.str(c.text);
  }
  put_section(out, kChunks, chunks);

  Writer vectors;
  put_vector(vectors, index.vectors);
  put_section(out, kVectors, vectors);

  Writer clusters;
  for (const IndexedCluster& c : index.clusters) {
    clusters.u32(c.id);
    clusters.u32(c.begin);
    clusters.u32(c.size);
    clusters.f64(c.tightness);
    put_vector(clusters, c.raw_centroid);
    put_vector(clusters, c.centroid.values());
  }
  put_section(out, kClusters, clusters);

  Writer stats;
  stats.u32(index.stats.clusters);
  stats.u64(index.stats.chunks);
  stats.u32(index.stats.dim);
  stats.f64(index.stats.mean_tightness);
  stats.u64(index.stats.noise_absorbed);
  stats.u32(static_cast<std::uint32_t>(index.stats.size_histogram.size()));
  for (const auto& [size, count] : index.stats.size_histogram) {
    stats.u32(size);
    stats.u32(count);
  }
  put_section(out, kStats, stats);

  const std::uint32_t crc = crc_of(out.bytes());
  out.u32(crc);
  return std::move(out.bytes());
}

ExpertIndex deserialize_index(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != std::string_view(kMagic, 4)) {
    fail(ErrorKind::kBadMagic, "not an index file (bad magic)");
  }
  if (bytes.size() < 8) fail(ErrorKind::kChecksum, "index file is truncated");
  Reader prefix(bytes.substr(4, 4));
  const std::uint32_t version = prefix.u32();
  if (version != kIndexFormatVersion) {
    fail(ErrorKind::kVersionMismatch, "index format version " + std::to_string(version) + " is not supported (expected " +
                                          std::to_string(kIndexFormatVersion) + ")");
  }
  if (bytes.size() < 12) fail(ErrorKind::kChecksum, "index file is truncated");
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader trailer(bytes.substr(bytes.size() - 4));
  if (trailer.u32() != crc_of(body)) fail(ErrorKind::kChecksum, "index checksum mismatch (file corrupt or truncated)");

  ExpertIndex index;
  index.version = version;
  Reader in(body.substr(8));

  Reader header = get_section(in, kHeader);
  const std::uint64_t n = header.u64();
  const std::uint32_t m = header.u32();
  const std::uint32_t d = header.u32();
  const std::uint64_t seed = header.u64();
  expect_done(header, "header");

  Reader provider = get_section(in, kProvider);
  const std::uint8_t kind = provider.u8();
  if (kind > static_cast<std::uint8_t>(ProviderKind::kPlanted)) {
    fail(ErrorKind::kInvariantViolation, "unknown provider kind " + std::to_string(kind));
  }
  index.provider.kind = static_cast<ProviderKind>(kind);
  index.provider.dim = provider.u32();
  index.provider.seed = provider.u64();
  index.provider.endpoint = provider.str();
  index.provider.batch_size = provider.u32();
  index.provider.model_name = provider.str();
  expect_done(provider, "provider");
  if (index.provider.dim != d) fail(ErrorKind::kInvariantViolation, "header dim disagrees with provider dim");

  Reader config = get_section(in, kConfig);
  index.chunking.window_size = config.u32();
  index.chunking.overlap_fraction = config.f64();
  index.clustering.min_cluster_size = config.u32();
  if (const std::uint32_t ms = config.u32(); ms != 0) index.clustering.min_samples = ms;
  index.clustering.max_cluster_size = config.u32();
  index.clustering.tightness_floor = config.f64();
  index.clustering.kmeans_max_iters = config.u32();
  index.clustering.kmeans_tolerance = config.f64();
  index.clustering.seed = config.u64();
  expect_done(config, "config");
  if (index.clustering.seed != seed) fail(ErrorKind::kInvariantViolation, "header seed disagrees with config seed");

  Reader chunks = get_section(in, kChunks);
  while (!chunks.done()) {
    Chunk c;
    c.chunk_id = chunks.str();
    c.doc_id = chunks.str();
    c.ordinal = chunks.u32();
    c.start_token = chunks.u32();
    c.end_token = chunks.u32();
    c.text = chunks.str();
    index.chunks.push_back(std::move(c));
  }
  if (index.chunks.size() != n) fail(ErrorKind::kInvariantViolation, "chunk count disagrees with header N");

  Reader vectors = get_section(in, kVectors);
  index.vectors = get_vector(vectors, n * d);
  expect_done(vectors, "vectors");

  Reader clusters = get_section(in, kClusters);
  for (std::uint32_t i = 0; i < m; ++i) {
    IndexedCluster c;
    c.id = clusters.u32();
    c.begin = clusters.u32();
    c.size = clusters.u32();
    c.tightness = clusters.f64();
    c.raw_centroid = get_vector(clusters, d);
    c.centroid = EmbeddingVector::adopt(get_vector(clusters, d));
    index.clusters.push_back(std::move(c));
  }
  expect_done(clusters, "clusters");

  Reader stats = get_section(in, kStats);
  index.stats.clusters = stats.u32();
  index.stats.chunks = stats.u64();
  index.stats.dim = stats.u32();
  index.stats.mean_tightness = stats.f64();
  index.stats.noise_absorbed = stats.u64();
  const std::uint32_t buckets = stats.u32();
  for (std::uint32_t i = 0; i < buckets; ++i) {
    const std::uint32_t size = stats.u32();
    const std::uint32_t count = stats.u32();
    index.stats.size_histogram.emplace_back(size, count);
  }
  expect_done(stats, "stats");
  expect_done(in, "file");

  index.validate();
  return index;
}

void save_index(const ExpertIndex& index, const std::filesystem::path& path) {
  const std::string bytes = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write index " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "failed writing index " + path.string());
}

ExpertIndex load_index(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) fail(ErrorKind::kNotFound, "index not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read index " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_index(buf.str());
}

}  // namespace docroute
