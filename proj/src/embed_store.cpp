#include "saxe/embed_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace saxe {

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw PreconditionError("embedding must have dim > 0");
  for (double v : values_) {
    if (!std::isfinite(v)) throw PreconditionError("embedding value is not finite");
  }
}

Embedding Embedding::zeros(std::size_t dim) {
  return Embedding(std::vector<double>(dim, 0.0));
}

double Embedding::norm() const { return std::sqrt(dot(*this)); }

double Embedding::dot(const Embedding& other) const {
  if (other.dim() != dim()) throw PreconditionError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
  return s;
}

Embedding& Embedding::operator+=(const Embedding& other) {
  if (other.dim() != dim()) throw PreconditionError("add: dimension mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Embedding& Embedding::operator-=(const Embedding& other) {
  if (other.dim() != dim()) throw PreconditionError("subtract: dimension mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Embedding& Embedding::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

double cosine(const Embedding& a, const Embedding& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw PreconditionError("cosine of zero-norm vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

EmbeddingSet::EmbeddingSet(std::uint32_t dim) : dim_(dim) {
  if (dim == 0) throw PreconditionError("embedding set dim must be positive");
}

void EmbeddingSet::add(const std::string& key, Embedding e) {
  if (e.dim() != dim_) {
    throw PreconditionError("embedding for '" + key + "' has dim " +
                            std::to_string(e.dim()) + ", set has " +
                            std::to_string(dim_));
  }
  auto [it, inserted] = entries_.try_emplace(key);
  if (inserted) keys_.push_back(key);
  it->second.push_back(std::move(e));
  ++count_;
}

bool EmbeddingSet::contains(const std::string& key) const {
  return entries_.contains(key);
}

const std::vector<Embedding>& EmbeddingSet::at(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw std::out_of_range("no embedding for key: " + key);
  return it->second;
}

const std::vector<Embedding>* EmbeddingSet::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<Embedding> EmbeddingSet::all() const {
  std::vector<Embedding> out;
  out.reserve(count_);
  for (const auto& k : keys_) {
    const auto& list = entries_.at(k);
    out.insert(out.end(), list.begin(), list.end());
  }
  return out;
}

std::string context_key(const std::string& word, const std::string& context_id) {
  return word + "|" + context_id;
}

// --- SAXE ---------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'S', 'A', 'X', 'E'};
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 8;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t offset() const { return pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }

  template <typename T>
  T read_le(const char* field) {
    need(sizeof(T), field);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view take(std::size_t n, const char* field) {
    need(n, field);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* field) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string("truncated ") + field + " at byte offset " +
                            std::to_string(pos_),
                        pos_);
    }
  }

  std::string_view bytes_;
  std::uint64_t pos_ = 0;
};

}  // namespace

EmbeddingSet parse_embeddings(std::string_view bytes) {
  Reader r(bytes);
  auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw FormatError("bad magic at byte offset 0 (expected \"SAXE\")", 0);
  }
  const auto version_at = r.offset();
  const auto version = r.read_le<std::uint32_t>("version");
  if (version != kSaxeVersion) {
    throw FormatError("unsupported format version " + std::to_string(version) +
                          " at byte offset " + std::to_string(version_at),
                      version_at);
  }
  const auto dim_at = r.offset();
  const auto dim = r.read_le<std::uint32_t>("dim");
  if (dim == 0) {
    throw FormatError("dim must be positive at byte offset " + std::to_string(dim_at),
                      dim_at);
  }
  const auto count_at = r.offset();
  const auto count = r.read_le<std::uint64_t>("record count");
  // Each record occupies at least 2 + 4*dim bytes.
  const std::uint64_t min_record = 2 + 4ULL * dim;
  if (count > (bytes.size() - kHeaderSize) / min_record) {
    throw FormatError("record count " + std::to_string(count) +
                          " exceeds file size at byte offset " + std::to_string(count_at),
                      count_at);
  }

  EmbeddingSet set(dim);
  std::vector<double> values(dim);
  for (std::uint64_t rec = 0; rec < count; ++rec) {
    const auto key_len = r.read_le<std::uint16_t>("key length");
    std::string key(r.take(key_len, "key"));
    for (std::uint32_t d = 0; d < dim; ++d) {
      const auto at = r.offset();
      const auto f = std::bit_cast<float>(r.read_le<std::uint32_t>("vector"));
      if (!std::isfinite(f)) {
        throw FormatError("non-finite value at byte offset " + std::to_string(at), at);
      }
      values[d] = f;
    }
    set.add(key, Embedding(values));
  }
  if (!r.at_end()) {
    throw FormatError("trailing bytes at byte offset " + std::to_string(r.offset()),
                      r.offset());
  }
  return set;
}

EmbeddingSet load_embeddings(const std::string& path) {
  return parse_embeddings(read_file(path));
}

std::string serialize_embeddings(const EmbeddingSet& set) {
  std::vector<std::string> keys = set.keys();
  std::sort(keys.begin(), keys.end());

  std::string out;
  out.append(kMagic, 4);
  put_le<std::uint32_t>(out, kSaxeVersion);
  put_le<std::uint32_t>(out, set.dim());
  put_le<std::uint64_t>(out, set.embedding_count());
  for (const auto& key : keys) {
    if (key.size() > 0xffff) throw PreconditionError("key longer than 65535 bytes: " + key);
    for (const auto& e : set.at(key)) {
      put_le<std::uint16_t>(out, static_cast<std::uint16_t>(key.size()));
      out += key;
      for (double v : e.values()) {
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
    }
  }
  return out;
}

void write_embeddings(const EmbeddingSet& set, const std::string& path) {
  write_file(path, serialize_embeddings(set));
}

// --- pooling / z-scoring --------------------------------------------------------

Embedding mean_pool(std::span<const Embedding> parts) {
  if (parts.empty()) throw PreconditionError("mean_pool: empty input");
  Embedding acc = Embedding::zeros(parts.front().dim());
  for (const auto& p : parts) acc += p;
  acc *= 1.0 / static_cast<double>(parts.size());
  return acc;
}

ZScoreStats compute_zscore_stats(std::span<const Embedding> sample) {
  if (sample.size() < 2) {
    throw PreconditionError("compute_zscore_stats: need at least 2 embeddings");
  }
  const std::size_t dim = sample.front().dim();
  const double n = static_cast<double>(sample.size());
  ZScoreStats stats;
  stats.sample_count = sample.size();
  stats.mean.assign(dim, 0.0);
  stats.std.assign(dim, 0.0);
  for (const auto& e : sample) {
    if (e.dim() != dim) throw PreconditionError("compute_zscore_stats: ragged input");
    for (std::size_t i = 0; i < dim; ++i) stats.mean[i] += e[i];
  }
  for (double& m : stats.mean) m /= n;
  for (const auto& e : sample) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = e[i] - stats.mean[i];
      stats.std[i] += d * d;
    }
  }
  for (double& s : stats.std) s = std::max(std::sqrt(s / n), kStdFloor);
  return stats;
}

ZScoreStats compute_zscore_stats(const EmbeddingSet& set) {
  const auto all = set.all();
  return compute_zscore_stats(std::span<const Embedding>(all));
}

Embedding zscore(const Embedding& e, const ZScoreStats& stats) {
  if (e.dim() != stats.dim()) throw PreconditionError("zscore: dimension mismatch");
  std::vector<double> out(e.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (e[i] - stats.mean[i]) / stats.std[i];
  return Embedding(std::move(out));
}

Embedding zscore_inverse(const Embedding& z, const ZScoreStats& stats) {
  if (z.dim() != stats.dim()) throw PreconditionError("zscore_inverse: dimension mismatch");
  std::vector<double> out(z.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = z[i] * stats.std[i] + stats.mean[i];
  return Embedding(std::move(out));
}

std::string stats_to_json(const ZScoreStats& stats) {
  nlohmann::ordered_json j;
  j["dim"] = stats.dim();
  j["sample_count"] = stats.sample_count;
  j["mean"] = stats.mean;
  j["std"] = stats.std;
  return j.dump() + "\n";
}

ZScoreStats stats_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  ZScoreStats stats;
  stats.mean = j.at("mean").get<std::vector<double>>();
  stats.std = j.at("std").get<std::vector<double>>();
  stats.sample_count = j.at("sample_count").get<std::uint64_t>();
  if (stats.mean.empty() || stats.mean.size() != stats.std.size()) {
    throw FormatError("z-score stats: mean/std length mismatch", 0);
  }
  for (double s : stats.std) {
    if (!(s > 0.0)) throw FormatError("z-score stats: non-positive std", 0);
  }
  return stats;
}

ZScoreStats load_stats(const std::string& path) { return stats_from_json(read_file(path)); }

}  // namespace saxe
