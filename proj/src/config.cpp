#include "saxe/config.hpp"

#include <charconv>
#include <filesystem>
#include <functional>

namespace saxe {

namespace {

namespace fs = std::filesystem;

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw InputError("config: bad value for " + std::string(key) + ": '" + std::string(value) +
                     "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const auto v = to_lower(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("config: bad boolean for " + std::string(key) + ": '" + std::string(value) +
                   "'");
}

std::string resolve(std::string_view value, const std::string& base_dir) {
  if (value.empty() || base_dir.empty() || fs::path(value).is_absolute()) {
    return std::string(value);
  }
  return (fs::path(base_dir) / fs::path(value)).lexically_normal().string();
}

struct Field {
  std::function<void(RunConfig&, std::string_view, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number_field(T RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view v, const std::string&) {
            c.*member = parse_number<T>("", v);
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

Field path_field(std::string RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view v, const std::string& base) {
            c.*member = resolve(v, base);
          },
          [member](const RunConfig& c) { return c.*member; }};
}

Field text_field(std::string RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view v, const std::string&) {
            c.*member = std::string(v);
          },
          [member](const RunConfig& c) { return c.*member; }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    for (auto [name, member] : std::initializer_list<std::pair<const char*, std::string RunConfig::*>>{
             {"db", &RunConfig::db},
             {"vocab", &RunConfig::vocab},
             {"wordpiece_vocab", &RunConfig::wordpiece_vocab},
             {"contexts", &RunConfig::contexts},
             {"embeddings", &RunConfig::embeddings},
             {"stats", &RunConfig::stats},
             {"axes", &RunConfig::axes},
             {"targets", &RunConfig::targets},
             {"categories", &RunConfig::categories},
             {"background", &RunConfig::background},
             {"corpus", &RunConfig::corpus},
             {"terms", &RunConfig::terms},
             {"pronouns", &RunConfig::pronouns},
             {"ideology", &RunConfig::ideology},
             {"series", &RunConfig::series},
             {"occurrence_embeddings", &RunConfig::occurrence_embeddings},
             {"variant_embeddings", &RunConfig::variant_embeddings},
             {"out", &RunConfig::out}}) {
      t[name] = path_field(member);
    }
    t["group_a"] = text_field(&RunConfig::group_a);
    t["group_b"] = text_field(&RunConfig::group_b);
    t["series_denominator"] = text_field(&RunConfig::series_denominator);
    t["method"] = {[](RunConfig& c, std::string_view v, const std::string&) {
                     try {
                       c.method = parse_method(v);
                     } catch (const PreconditionError& e) {
                       throw InputError(std::string("config: ") + e.what());
                     }
                   },
                   [](const RunConfig& c) { return std::string(method_name(c.method)); }};
    t["zscored"] = {[](RunConfig& c, std::string_view v, const std::string&) {
                      c.zscored = parse_bool("zscored", v);
                    },
                    [](const RunConfig& c) { return std::string(c.zscored ? "true" : "false"); }};
    t["pole_mean"] = {[](RunConfig& c, std::string_view v, const std::string&) {
                        try {
                          c.pole_mean = parse_pole_mean(v);
                        } catch (const PreconditionError& e) {
                          throw InputError(std::string("config: ") + e.what());
                        }
                      },
                      [](const RunConfig& c) { return std::string(pole_mean_name(c.pole_mean)); }};
    t["seed"] = number_field(&RunConfig::seed);
    t["threads"] = number_field(&RunConfig::threads);
    t["min_pole"] = number_field(&RunConfig::min_pole);
    t["context_k"] = number_field(&RunConfig::context_k);
    t["pool_cap"] = number_field(&RunConfig::pool_cap);
    t["bootstrap"] = number_field(&RunConfig::bootstrap);
    t["alpha"] = number_field(&RunConfig::alpha);
    t["k"] = number_field(&RunConfig::k);
    t["smoothing"] = number_field(&RunConfig::smoothing);
    t["fem_threshold"] = number_field(&RunConfig::fem_threshold);
    t["vocab_min"] = number_field(&RunConfig::vocab_min);
    t["min_clusters"] = number_field(&RunConfig::min_clusters);
    t["top_k"] = number_field(&RunConfig::top_k);
    t["restarts"] = number_field(&RunConfig::restarts);
    t["max_iters"] = number_field(&RunConfig::max_iters);
    t["sample_cap"] = number_field(&RunConfig::sample_cap);
    t["reservoir_k"] = number_field(&RunConfig::reservoir_k);
    t["bot_ngram"] = number_field(&RunConfig::bot_ngram);
    t["bot_max_repeats"] = number_field(&RunConfig::bot_max_repeats);
    t["freq_percentile"] = number_field(&RunConfig::freq_percentile);
    return t;
  }();
  return table;
}

}  // namespace

void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   const std::string& base_dir) {
  const auto it = fields().find(std::string(key));
  if (it == fields().end()) throw InputError("config: unknown key '" + std::string(key) + "'");
  try {
    it->second.set(config, value, base_dir);
  } catch (const InputError&) {
    // number fields don't know their own key name
    throw InputError("config: bad value for " + std::string(key) + ": '" + std::string(value) +
                     "'");
  }
}

RunConfig parse_config(std::string_view text, const std::string& base_dir) {
  RunConfig config;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(config, trim(std::string_view(line).substr(0, eq)),
                  trim(std::string_view(line).substr(eq + 1)), base_dir);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  if (!fs::exists(path)) throw InputError("config file not found: " + path);
  const auto base = fs::path(path).parent_path().string();
  return parse_config(read_file(path), base.empty() ? "." : base);
}

void validate_config(const RunConfig& c) {
  auto positive = [](const char* name, double v) {
    if (!(v > 0)) throw InputError(std::string("config: ") + name + " must be positive");
  };
  positive("min_pole", static_cast<double>(c.min_pole));
  positive("context_k", static_cast<double>(c.context_k));
  positive("pool_cap", static_cast<double>(c.pool_cap));
  positive("bootstrap", static_cast<double>(c.bootstrap));
  positive("k", static_cast<double>(c.k));
  positive("smoothing", c.smoothing);
  positive("vocab_min", static_cast<double>(c.vocab_min));
  positive("min_clusters", static_cast<double>(c.min_clusters));
  positive("top_k", static_cast<double>(c.top_k));
  positive("restarts", static_cast<double>(c.restarts));
  positive("max_iters", static_cast<double>(c.max_iters));
  positive("sample_cap", static_cast<double>(c.sample_cap));
  positive("reservoir_k", static_cast<double>(c.reservoir_k));
  positive("bot_ngram", static_cast<double>(c.bot_ngram));
  positive("bot_max_repeats", static_cast<double>(c.bot_max_repeats));
  positive("threads", static_cast<double>(c.threads));
  if (!(c.alpha > 0 && c.alpha < 1)) throw InputError("config: alpha must be in (0,1)");
  if (!(c.fem_threshold > 0 && c.fem_threshold <= 1)) {
    throw InputError("config: fem_threshold must be in (0,1]");
  }
  if (c.smoothing % 2 == 0) throw InputError("config: smoothing must be odd");
  if (!(c.freq_percentile > 0 && c.freq_percentile < 100)) {
    throw InputError("config: freq_percentile must be in (0,100)");
  }
  if (c.series_denominator != "documents" && c.series_denominator != "tokens") {
    throw InputError("config: series_denominator must be documents or tokens");
  }
  if (c.out.empty()) throw InputError("config: out must be set");
}

std::string canonical_config(const RunConfig& config) {
  std::string out;
  for (const auto& [name, field] : fields()) {
    if (name == "out") continue;  // where results go doesn't change them
    out += name + '=' + field.get(config) + '\n';
  }
  return out;
}

}  // namespace saxe
