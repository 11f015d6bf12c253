#include "saxe/axis_build.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

namespace saxe {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kGlove: return "glove";
    case Method::kBertDefault: return "bert-default";
    case Method::kBertProb: return "bert-prob";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "glove") return Method::kGlove;
  if (name == "bert-default" || name == "default") return Method::kBertDefault;
  if (name == "bert-prob" || name == "prob") return Method::kBertProb;
  throw PreconditionError("unknown method: " + std::string(name));
}

std::string_view side_name(Side s) { return s == Side::kLeft ? "left" : "right"; }

std::string_view pole_mean_name(PoleMeanMode m) {
  return m == PoleMeanMode::kContexts ? "contexts" : "adjectives";
}

PoleMeanMode parse_pole_mean(std::string_view name) {
  if (name == "contexts") return PoleMeanMode::kContexts;
  if (name == "adjectives") return PoleMeanMode::kAdjectives;
  throw PreconditionError("unknown pole mean mode: " + std::string(name));
}

std::string Axis::storage_key() const {
  return "axis:" + spec.axis_id + ":" + std::string(method_name(method)) + ":" +
         (zscored ? "z" : "raw");
}

Embedding pole_mean(const PoleEmbeddings& pole, PoleMeanMode mode) {
  std::vector<Embedding> parts;
  for (const auto& group : pole) {
    if (group.embeddings.empty()) continue;
    if (mode == PoleMeanMode::kContexts) {
      parts.insert(parts.end(), group.embeddings.begin(), group.embeddings.end());
    } else {
      parts.push_back(mean_pool(group.embeddings));
    }
  }
  if (parts.empty()) throw PreconditionError("pole has no embeddings");
  return mean_pool(parts);
}

Embedding axis_vector(std::span<const Embedding> left, std::span<const Embedding> right) {
  if (left.empty()) throw PreconditionError("axis: left pole has no embeddings");
  if (right.empty()) throw PreconditionError("axis: right pole has no embeddings");
  return mean_pool(left) - mean_pool(right);
}

Embedding axis_vector(const PoleEmbeddings& left, const PoleEmbeddings& right,
                      PoleMeanMode mode) {
  Embedding l, r;
  try {
    l = pole_mean(left, mode);
  } catch (const PreconditionError&) {
    throw PreconditionError("axis: left pole has no embeddings");
  }
  try {
    r = pole_mean(right, mode);
  } catch (const PreconditionError&) {
    throw PreconditionError("axis: right pole has no embeddings");
  }
  return l - r;
}

Axis build_axis(std::span<const Embedding> left, std::span<const Embedding> right, AxisMeta meta,
                const ZScoreStats* stats) {
  Axis axis;
  if (meta.zscored) {
    if (!stats) throw PreconditionError("build_axis: z-scored axis needs stats");
    std::vector<Embedding> zl, zr;
    for (const auto& e : left) zl.push_back(zscore(e, *stats));
    for (const auto& e : right) zr.push_back(zscore(e, *stats));
    axis.vector = axis_vector(zl, zr);
  } else {
    axis.vector = axis_vector(left, right);
  }
  axis.spec = std::move(meta.spec);
  axis.method = meta.method;
  axis.requested_method = meta.method;
  axis.zscored = meta.zscored;
  axis.left_sources = std::move(meta.left_sources);
  axis.right_sources = std::move(meta.right_sources);
  return axis;
}

namespace {

std::vector<SourceRef> with_embeddings(std::span<const ContextRecord> records,
                                       const EmbeddingSet& embeddings, Diagnostics* diag) {
  std::vector<SourceRef> out;
  for (const auto& r : records) {
    if (!embeddings.contains(context_key(r.adjective, r.context_id))) {
      warn(diag, "no embedding for context " + r.adjective + "|" + r.context_id);
      continue;
    }
    out.push_back({r.adjective, r.context_id});
  }
  return out;
}

// Default pool when no probability pool is supplied: every "adj|ctx" key.
std::vector<ContextRecord> pool_from_keys(const EmbeddingSet& embeddings,
                                          std::span<const std::string> adjectives) {
  std::map<std::string, std::vector<ContextRecord>> by_adj;
  for (const auto& a : adjectives) by_adj[a];
  for (const auto& key : embeddings.keys()) {
    const auto bar = key.find('|');
    if (bar == std::string::npos) continue;
    auto it = by_adj.find(key.substr(0, bar));
    if (it == by_adj.end()) continue;
    ContextRecord r;
    r.adjective = it->first;
    r.context_id = key.substr(bar + 1);
    it->second.push_back(std::move(r));
  }
  std::vector<ContextRecord> out;
  for (auto& [a, list] : by_adj) out.insert(out.end(), list.begin(), list.end());
  return out;
}

std::vector<SourceRef> default_side(const AxisSpec& spec, Side side, const EmbeddingSource& src,
                                    const RealizeOptions& options, Diagnostics* diag) {
  const auto& adjectives = side == Side::kLeft ? spec.left.adjectives : spec.right.adjectives;
  const auto merged = src.pool ? merged_pole_pool(*src.pool, adjectives)
                               : pool_from_keys(*src.embeddings, adjectives);
  std::vector<ContextRecord> usable;
  for (const auto& r : merged) {
    if (src.embeddings->contains(context_key(r.adjective, r.context_id))) usable.push_back(r);
  }
  if (usable.empty()) return {};
  const auto seed =
      derive_seed(options.seed, "default:" + spec.axis_id + ":" + std::string(side_name(side)));
  const auto chosen = select_default_contexts(usable, options.contexts_per_pole, seed);
  return with_embeddings(chosen, *src.embeddings, diag);
}

}  // namespace

std::optional<PoleSelection> select_sources(const AxisSpec& spec, const EmbeddingSource& source,
                                            const RealizeOptions& options, Diagnostics* diag) {
  if (!source.embeddings) throw PreconditionError("select_sources: no embeddings supplied");
  PoleSelection sel;
  sel.method = options.method;

  switch (options.method) {
    case Method::kGlove: {
      for (const auto& a : spec.left.adjectives) {
        if (source.embeddings->contains(a)) sel.left.push_back({a, ""});
      }
      for (const auto& a : spec.right.adjectives) {
        if (source.embeddings->contains(a)) sel.right.push_back({a, ""});
      }
      break;
    }
    case Method::kBertProb: {
      const bool representable =
          !source.wordpiece_vocab ||
          (single_wordpiece_pole(spec.left, *source.wordpiece_vocab) &&
           single_wordpiece_pole(spec.right, *source.wordpiece_vocab));
      if (representable && source.pool) {
        const auto l = select_prob_contexts_for_pole(*source.pool, spec.left.adjectives,
                                                     options.contexts_per_pole, diag);
        const auto r = select_prob_contexts_for_pole(*source.pool, spec.right.adjectives,
                                                     options.contexts_per_pole, diag);
        sel.left = with_embeddings(l, *source.embeddings, diag);
        sel.right = with_embeddings(r, *source.embeddings, diag);
        break;
      }
      if (!source.pool) warn(diag, "axis " + spec.axis_id + ": no probability pool");
      sel.method = Method::kBertDefault;
      sel.backoff = true;
      [[fallthrough]];
    }
    case Method::kBertDefault: {
      sel.left = default_side(spec, Side::kLeft, source, options, diag);
      sel.right = default_side(spec, Side::kRight, source, options, diag);
      break;
    }
  }

  if (sel.left.empty() || sel.right.empty()) {
    warn(diag, "axis " + spec.axis_id + " skipped: no usable embeddings on the " +
                   (sel.left.empty() ? "left" : "right") + " pole");
    return std::nullopt;
  }
  return sel;
}

PoleEmbeddings gather_pole(std::span<const SourceRef> sources, const EmbeddingSet& embeddings,
                           const ZScoreStats* stats) {
  PoleEmbeddings pole;
  std::map<std::string, std::size_t> slot;
  for (const auto& src : sources) {
    const auto key = src.context_id.empty() ? src.adjective
                                            : context_key(src.adjective, src.context_id);
    const auto& list = embeddings.at(key);
    auto [it, inserted] = slot.try_emplace(src.adjective, pole.size());
    if (inserted) pole.push_back({src.adjective, {}});
    auto& group = pole[it->second].embeddings;
    // A key holding several vectors (repeated static entries) counts once.
    const Embedding e = list.size() == 1 ? list.front() : mean_pool(list);
    group.push_back(stats ? zscore(e, *stats) : e);
  }
  return pole;
}

std::vector<Axis> realize_all(std::span<const AxisSpec> specs, const EmbeddingSource& source,
                              const RealizeOptions& options, Diagnostics* diag) {
  if (options.zscored && !options.stats) {
    throw PreconditionError("realize_all: z-scored axes need stats");
  }
  std::vector<Axis> out;
  for (const auto& spec : specs) {
    auto sel = select_sources(spec, source, options, diag);
    if (!sel) continue;
    const ZScoreStats* stats = options.zscored ? options.stats : nullptr;
    const auto left = gather_pole(sel->left, *source.embeddings, stats);
    const auto right = gather_pole(sel->right, *source.embeddings, stats);

    Axis axis;
    axis.spec = spec;
    axis.vector = axis_vector(left, right, options.pole_mean);
    axis.method = sel->method;
    axis.requested_method = options.method;
    axis.zscored = options.zscored;
    axis.backoff = sel->backoff;
    axis.pole_mean = options.pole_mean;
    axis.left_sources = std::move(sel->left);
    axis.right_sources = std::move(sel->right);
    out.push_back(std::move(axis));
  }
  return out;
}

EmbeddingSet axes_to_embedding_set(std::span<const Axis> axes) {
  if (axes.empty()) throw PreconditionError("no axes to store");
  EmbeddingSet set(static_cast<std::uint32_t>(axes.front().vector.dim()));
  for (const auto& a : axes) set.add(a.storage_key(), a.vector);
  return set;
}

namespace {

json sources_json(std::span<const SourceRef> sources) {
  json arr = json::array();
  for (const auto& s : sources) arr.push_back({s.adjective, s.context_id});
  return arr;
}

std::vector<SourceRef> sources_from_json(const json& arr) {
  std::vector<SourceRef> out;
  for (const auto& pair : arr) out.push_back({pair.at(0).get<std::string>(), pair.at(1).get<std::string>()});
  return out;
}

}  // namespace

std::string serialize_axis_manifest(std::span<const Axis> axes) {
  std::vector<const Axis*> sorted;
  for (const auto& a : axes) sorted.push_back(&a);
  std::sort(sorted.begin(), sorted.end(),
            [](const Axis* a, const Axis* b) { return a->storage_key() < b->storage_key(); });
  std::string out;
  for (const Axis* a : sorted) {
    ordered_json j;
    j["key"] = a->storage_key();
    j["axis_id"] = a->spec.axis_id;
    j["left"] = {{"seed", a->spec.left.seed}, {"adjectives", a->spec.left.adjectives}};
    j["right"] = {{"seed", a->spec.right.seed}, {"adjectives", a->spec.right.adjectives}};
    j["method"] = method_name(a->method);
    j["requested_method"] = method_name(a->requested_method);
    j["zscored"] = a->zscored;
    j["backoff"] = a->backoff;
    j["pole_mean"] = pole_mean_name(a->pole_mean);
    j["left_sources"] = sources_json(a->left_sources);
    j["right_sources"] = sources_json(a->right_sources);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Axis> parse_axis_manifest(std::string_view jsonl, const EmbeddingSet& vectors) {
  std::vector<Axis> out;
  std::uint64_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      Axis a;
      a.spec.axis_id = j.at("axis_id").get<std::string>();
      a.spec.left.seed = j.at("left").at("seed").get<std::string>();
      a.spec.left.adjectives = j.at("left").at("adjectives").get<std::vector<std::string>>();
      a.spec.right.seed = j.at("right").at("seed").get<std::string>();
      a.spec.right.adjectives = j.at("right").at("adjectives").get<std::vector<std::string>>();
      a.method = parse_method(j.at("method").get<std::string>());
      a.requested_method = parse_method(j.at("requested_method").get<std::string>());
      a.zscored = j.at("zscored").get<bool>();
      a.backoff = j.at("backoff").get<bool>();
      a.pole_mean = parse_pole_mean(j.value("pole_mean", std::string("contexts")));
      a.left_sources = sources_from_json(j.at("left_sources"));
      a.right_sources = sources_from_json(j.at("right_sources"));
      const auto key = j.at("key").get<std::string>();
      const auto* vec = vectors.find(key);
      if (!vec) {
        throw FormatError("axis manifest line " + std::to_string(line_no) +
                              ": no stored vector for " + key,
                          line_no);
      }
      a.vector = vec->front();
      out.push_back(std::move(a));
    } catch (const json::exception& e) {
      throw FormatError("axis manifest line " + std::to_string(line_no) + ": " + e.what(),
                        line_no);
    } catch (const PreconditionError& e) {
      throw FormatError("axis manifest line " + std::to_string(line_no) + ": " + e.what(),
                        line_no);
    }
  }
  return out;
}

std::vector<Axis> load_axes_with_manifest(const std::string& saxe_path,
                                          const std::string& manifest_path) {
  const auto vectors = load_embeddings(saxe_path);
  return parse_axis_manifest(read_file(manifest_path), vectors);
}

}  // namespace saxe
