#include "saxe/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <set>

#include <json.hpp>

#include "saxe/axis_validate.hpp"
#include "saxe/corpus_ingest.hpp"
#include "saxe/plot.hpp"
#include "saxe/project.hpp"
#include "saxe/timeseries.hpp"

namespace saxe {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class StageContext {
 public:
  StageContext(std::string name, const RunConfig& config)
      : config(config), name_(std::move(name)) {
    record.name = name_;
  }

  const RunConfig& config;
  StageRecord record;
  Diagnostics diag;

  /// Checks a configured input and records its digest.
  std::string input(const std::string& label, const std::string& path) {
    if (path.empty()) throw InputError("no path configured for " + label);
    if (!fs::is_regular_file(path)) throw InputError("missing " + label + " file: " + path);
    record.inputs[label] = hex64(fnv1a64(read_file(path)));
    return path;
  }

  /// An earlier stage's output under out/.
  std::string produced(const std::string& file) {
    const auto path = out_path(file);
    if (!fs::is_regular_file(path)) {
      throw InputError("missing " + file + " in " + config.out + " (run the stage that writes it)");
    }
    record.inputs["out:" + file] = hex64(fnv1a64(read_file(path)));
    return path;
  }

  /// Configured path when set, else an earlier stage's output.
  std::string input_or_produced(const std::string& label, const std::string& path,
                                const std::string& file) {
    return path.empty() ? produced(file) : input(label, path);
  }

  void write(const std::string& file, std::string_view contents) {
    write_file(out_path(file) + ".partial", contents);
    record.outputs[file] = hex64(fnv1a64(contents));
  }

  void commit() {
    for (const auto& [file, digest] : record.outputs) {
      fs::rename(out_path(file) + ".partial", out_path(file));
    }
    record.warnings = diag.warnings;
  }

  std::uint64_t seed(const std::string& label) const { return derive_seed(config.seed, label); }

  std::string out_path(const std::string& file) const {
    return (fs::path(config.out) / file).string();
  }

 private:
  std::string name_;
};

// --- shared loading ------------------------------------------------------------

std::optional<ZScoreStats> load_stats_for(StageContext& ctx, const EmbeddingSet& embeddings) {
  if (!ctx.config.zscored) return std::nullopt;
  if (!ctx.config.stats.empty()) return load_stats(ctx.input("stats", ctx.config.stats));
  return compute_zscore_stats(embeddings);
}

std::optional<ZScoreStats> load_built_stats(StageContext& ctx) {
  if (!ctx.config.stats.empty()) return load_stats(ctx.input("stats", ctx.config.stats));
  if (fs::is_regular_file(ctx.out_path("zscore_stats.json"))) {
    return load_stats(ctx.produced("zscore_stats.json"));
  }
  return std::nullopt;
}

std::vector<Axis> load_built_axes(StageContext& ctx) {
  const auto saxe = ctx.produced("axes.saxe");
  const auto manifest = ctx.produced("axes.manifest.jsonl");
  return load_axes_with_manifest(saxe, manifest);
}

const ZScoreStats* stats_if_needed(std::span<const Axis> axes,
                                   const std::optional<ZScoreStats>& stats) {
  const bool any_z = std::any_of(axes.begin(), axes.end(), [](const Axis& a) { return a.zscored; });
  if (any_z && !stats) throw InputError("z-scored axes need z-score stats");
  return stats ? &*stats : nullptr;
}

/// One vector per key (mean pooled when a key holds several).
std::vector<std::pair<std::string, Embedding>> pooled(const EmbeddingSet& set) {
  std::vector<std::pair<std::string, Embedding>> out;
  for (const auto& key : set.keys()) {
    const auto& list = set.at(key);
    out.emplace_back(key, list.size() == 1 ? list.front() : mean_pool(list));
  }
  return out;
}

/// Keys "group|id" grouped by prefix; keys without '|' are skipped.
std::map<std::string, std::vector<Embedding>> group_by_prefix(const EmbeddingSet& set,
                                                               Diagnostics* diag) {
  std::map<std::string, std::vector<Embedding>> out;
  std::size_t skipped = 0;
  for (const auto& [key, e] : pooled(set)) {
    const auto bar = key.find('|');
    if (bar == std::string::npos) {
      ++skipped;
      continue;
    }
    out[key.substr(0, bar)].push_back(e);
  }
  if (skipped) warn(diag, std::to_string(skipped) + " keys without a '|' group prefix skipped");
  return out;
}

std::map<std::string, std::string> load_two_column(const std::string& path, const char* what) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  for (const auto& line : split(read_file(path), '\n')) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() != 2) {
      throw FormatError(std::string(what) + " line " + std::to_string(line_no) +
                            ": expected 2 tab-separated columns",
                        line_no);
    }
    out[trim(f[0])] = trim(f[1]);
  }
  return out;
}

std::vector<std::string> csv_list(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& part : split(s, ',')) {
    auto t = trim(part);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

void write_line_chart(StageContext& ctx, const std::string& stem, const LineChart& chart) {
  ctx.write(stem + ".tsv", line_chart_tsv(chart));
  ctx.write(stem + ".svg", render_line_svg(chart, &ctx.diag));
}

void write_bar_chart(StageContext& ctx, const std::string& stem, const BarChart& chart) {
  ctx.write(stem + ".tsv", bar_chart_tsv(chart));
  ctx.write(stem + ".svg", render_bar_svg(chart, &ctx.diag));
}

std::string pole_seed(const Axis& axis, Side side) {
  return side == Side::kLeft ? axis.spec.left.seed : axis.spec.right.seed;
}

// --- stages ------------------------------------------------------------------------

void build_lexicon_stage(StageContext& ctx) {
  const auto db = load_synset_db(ctx.input("db", ctx.config.db));
  const auto vocab = load_word_list(ctx.input("vocab", ctx.config.vocab));
  const auto axes = build_axes(db, vocab, LexiconOptions{ctx.config.min_pole}, &ctx.diag);
  if (axes.empty()) warn(&ctx.diag, "no axes survived the lexicon filters");
  ctx.write("axes.jsonl", serialize_axes(axes));
}

struct AxisInputs {
  EmbeddingSet embeddings{1};
  std::vector<AxisSpec> specs;
  std::optional<ContextPool> pool;
  std::optional<std::set<std::string>> wordpieces;
  std::optional<ZScoreStats> stats;

  EmbeddingSource source() const {
    return {&embeddings, pool ? &*pool : nullptr, wordpieces ? &*wordpieces : nullptr};
  }
};

AxisInputs load_axis_inputs(StageContext& ctx, bool need_pool) {
  const auto& c = ctx.config;
  AxisInputs in;
  in.embeddings = load_embeddings(ctx.input("embeddings", c.embeddings));
  in.specs = load_axes(ctx.input_or_produced("axes", c.axes, "axes.jsonl"));
  if (need_pool || !c.contexts.empty()) {
    in.pool = load_context_pool(ctx.input("contexts", c.contexts), c.pool_cap, &ctx.diag);
  }
  if (!c.wordpiece_vocab.empty()) {
    in.wordpieces = load_word_list(ctx.input("wordpiece_vocab", c.wordpiece_vocab));
  }
  in.stats = load_stats_for(ctx, in.embeddings);
  return in;
}

RealizeOptions realize_options(const StageContext& ctx, Method method, bool zscored,
                               const std::optional<ZScoreStats>& stats) {
  RealizeOptions o;
  o.method = method;
  o.zscored = zscored;
  o.stats = zscored && stats ? &*stats : nullptr;
  // build-axes, select-contexts and validate share one seed so their
  // selections agree.
  o.seed = ctx.seed("contexts");
  o.contexts_per_pole = ctx.config.context_k;
  o.pole_mean = ctx.config.pole_mean;
  return o;
}

void select_contexts_stage(StageContext& ctx) {
  const auto in = load_axis_inputs(ctx, ctx.config.method != Method::kGlove);
  const auto opts = realize_options(ctx, ctx.config.method, ctx.config.zscored, in.stats);
  std::string out = "axis_id\trequested\tmethod\tbackoff\tside\tadjective\tcontext_id\n";
  for (const auto& spec : in.specs) {
    const auto sel = select_sources(spec, in.source(), opts, &ctx.diag);
    if (!sel) continue;
    for (Side side : {Side::kLeft, Side::kRight}) {
      for (const auto& ref : side == Side::kLeft ? sel->left : sel->right) {
        out += spec.axis_id + '\t' + std::string(method_name(ctx.config.method)) + '\t' +
               std::string(method_name(sel->method)) + '\t' + (sel->backoff ? "1" : "0") + '\t' +
               std::string(side_name(side)) + '\t' + ref.adjective + '\t' + ref.context_id + '\n';
      }
    }
  }
  ctx.write("selections.tsv", out);
}

void build_axes_stage(StageContext& ctx) {
  const auto in = load_axis_inputs(ctx, ctx.config.method != Method::kGlove);
  const auto opts = realize_options(ctx, ctx.config.method, ctx.config.zscored, in.stats);
  const auto axes = realize_all(in.specs, in.source(), opts, &ctx.diag);
  if (axes.empty()) warn(&ctx.diag, "no axes could be realized");
  ctx.write("axes.saxe", serialize_embeddings(axes.empty() ? EmbeddingSet(in.embeddings.dim())
                                                           : axes_to_embedding_set(axes)));
  ctx.write("axes.manifest.jsonl", serialize_axis_manifest(axes));
  if (in.stats) ctx.write("zscore_stats.json", stats_to_json(*in.stats));
}

void validate_stage(StageContext& ctx) {
  const auto& c = ctx.config;
  const auto axes = load_built_axes(ctx);
  const auto in = load_axis_inputs(ctx, false);
  const auto stats = load_built_stats(ctx);
  const ZScoreStats* sp = stats_if_needed(axes, stats);

  std::vector<ConsistencyReport> reports;
  for (const auto& axis : axes) reports.push_back(validate_axis(axis, in.embeddings, sp));
  ctx.write("consistency.tsv", reports_to_tsv(reports));
  ctx.write("loo.tsv", loo_to_tsv(reports));
  ctx.write("summary.json", summary_to_json(summarize_method(reports)));

  // Every method variant the inputs support, realized over the same specs.
  std::vector<Method> methods;
  if (c.method == Method::kGlove) {
    methods = {Method::kGlove};
  } else if (in.pool) {
    methods = {Method::kBertDefault, Method::kBertProb};
  } else {
    methods = {c.method};
  }
  std::vector<std::pair<MethodSummary, std::vector<ConsistencyReport>>> table;
  for (Method m : methods) {
    for (bool z : {false, true}) {
      if (z && !in.stats) continue;
      Diagnostics quiet;
      const auto variant =
          realize_all(in.specs, in.source(), realize_options(ctx, m, z, in.stats), &quiet);
      std::vector<ConsistencyReport> rs;
      for (const auto& axis : variant) {
        rs.push_back(validate_axis(axis, in.embeddings, z ? &*in.stats : nullptr));
      }
      auto summary = summarize_method(rs);
      summary.label = method_label(m, z);
      table.emplace_back(std::move(summary), std::move(rs));
    }
  }
  const std::string configured = method_label(c.method, c.zscored && in.stats.has_value());
  const std::vector<ConsistencyReport>* reference = nullptr;
  for (const auto& [s, rs] : table) {
    if (s.label == configured) reference = &rs;
  }
  std::string tsv =
      "method\taxes\tpoles\tmean_C\tci95\tconsistent\tbackoff\tU_vs_" + configured + "\tp\n";
  BarChart chart{"mean consistency by method", "mean_C", {}};
  for (const auto& [s, rs] : table) {
    tsv += s.label + '\t' + std::to_string(s.axes) + '\t' + std::to_string(s.poles) + '\t' +
           format_double(s.mean_c) + '\t' + format_double(s.ci95) + '\t' +
           std::to_string(s.consistent_count) + '\t' + std::to_string(s.backoff_count);
    if (reference && !rs.empty() && !reference->empty() && &rs != reference) {
      const auto mw = compare_methods(rs, *reference);
      tsv += '\t' + format_double(mw.u) + '\t' + format_double(mw.p_value) + '\n';
    } else {
      tsv += "\t\t\n";
    }
    if (s.poles > 0) chart.bars.push_back({s.label, s.mean_c, s.ci95});
  }
  ctx.write("methods.tsv", tsv);
  write_bar_chart(ctx, "methods_chart", chart);
}

struct Targets {
  std::vector<std::pair<std::string, Embedding>> items;
};

/// term -> axis_id -> score
TermAxisScores score_targets(std::span<const std::pair<std::string, Embedding>> targets,
                             std::span<const Axis> axes, const ZScoreStats* stats,
                             std::vector<AxisScore>* flat = nullptr) {
  TermAxisScores out;
  for (const auto& [term, e] : targets) {
    for (const auto& axis : axes) {
      const auto s = axis_score(term, e, axis, stats);
      out[term][axis.spec.axis_id] = s.score;
      if (flat) flat->push_back(s);
    }
  }
  return out;
}

void project_stage(StageContext& ctx) {
  const auto axes = load_built_axes(ctx);
  const auto stats = load_built_stats(ctx);
  const auto targets = pooled(load_embeddings(ctx.input("targets", ctx.config.targets)));
  std::vector<AxisScore> flat;
  score_targets(targets, axes, stats_if_needed(axes, stats), &flat);
  ctx.write("scores.tsv", scores_to_tsv(flat));

  std::map<std::string, const Axis*> by_id;
  for (const auto& a : axes) by_id[a.spec.axis_id] = &a;
  std::string poles = "target\trank\taxis_id\tpole\tscore\n";
  for (const auto& [term, e] : targets) {
    std::vector<AxisScore> mine;
    for (const auto& s : flat) {
      if (s.target == term) mine.push_back(s);
    }
    std::size_t rank = 0;
    for (const auto& r : rank_scores(mine, ctx.config.top_k)) {
      poles += term + '\t' + std::to_string(++rank) + '\t' + r.axis_id + '\t' +
               pole_seed(*by_id.at(r.axis_id), r.pole) + '\t' + format_double(r.score) + '\n';
    }
  }
  ctx.write("poles.tsv", poles);
}

void contrast_stage(StageContext& ctx) {
  const auto& c = ctx.config;
  const auto axes = load_built_axes(ctx);
  const auto stats = load_built_stats(ctx);
  const auto targets = pooled(load_embeddings(ctx.input("targets", c.targets)));
  const auto categories = load_two_column(ctx.input("categories", c.categories), "categories");
  const auto scores = score_targets(targets, axes, stats_if_needed(axes, stats));
  std::vector<std::string> background;
  if (c.background.empty()) {
    for (const auto& [t, row] : scores) background.push_back(t);
  } else {
    for (const auto& t : load_word_list(ctx.input("background", c.background))) {
      if (scores.contains(t)) {
        background.push_back(t);
      } else {
        warn(&ctx.diag, "background term without a target embedding: " + t);
      }
    }
  }

  std::map<std::string, std::vector<std::string>> members;
  for (const auto& [term, cat] : categories) {
    if (scores.contains(term)) {
      members[cat].push_back(term);
    } else {
      warn(&ctx.diag, "category term without a target embedding: " + term);
    }
  }
  std::string tsv =
      "category\taxis_id\tcategory_mean\tbackground_mean\tdifference\tdirection\tt\tp\t"
      "boot_mean\tci_low\tci_high\tsignificant\n";
  BarChart chart{"category contrasts", "difference", {}};
  for (const auto& [cat, terms] : members) {
    std::vector<AxisSamples> samples;
    for (const auto& axis : axes) {
      AxisSamples s;
      s.axis_id = axis.spec.axis_id;
      for (const auto& t : terms) s.category.push_back(scores.at(t).at(s.axis_id));
      for (const auto& t : background) s.background.push_back(scores.at(t).at(s.axis_id));
      samples.push_back(std::move(s));
    }
    ContrastOptions opts;
    opts.bootstrap = c.bootstrap;
    opts.alpha = c.alpha;
    opts.seed = ctx.seed("contrast:" + cat);
    const auto results = contrast_experiment(samples, opts, &ctx.diag);
    tsv += contrast_to_tsv(cat, results);
    for (std::size_t i = 0; i < results.size() && i < c.top_k; ++i) {
      chart.bars.push_back({cat + ":" + results[i].axis_id, results[i].difference, std::nullopt});
    }
  }
  ctx.write("contrast.tsv", tsv);
  write_bar_chart(ctx, "contrast_chart", chart);
}

void ingest_stage(StageContext& ctx) {
  const auto& c = ctx.config;
  auto docs = parse_corpus(read_file(ctx.input("corpus", c.corpus)), &ctx.diag);
  IngestOptions opts;
  opts.bot_ngram = c.bot_ngram;
  opts.bot_max_repeats = c.bot_max_repeats;
  const auto result = ingest(std::move(docs), opts);
  ctx.write("documents.jsonl", serialize_documents(result.documents));
  nlohmann::ordered_json j;
  j["documents"] = result.documents.size();
  j["duplicates_removed"] = result.duplicates_removed;
  j["bot_documents_removed"] = result.bot_documents_removed;
  j["flagged_authors"] = result.flagged_authors;
  ctx.write("ingest.json", j.dump(2) + "\n");
}

std::vector<Document> load_documents(StageContext& ctx) {
  return parse_documents(read_file(ctx.produced("documents.jsonl")));
}

std::set<std::string> feminine_terms(std::span<const VocabTerm> vocab, double threshold) {
  std::set<std::string> out;
  for (const auto& v : vocab) {
    if (v.leaning.value && *v.leaning.value > threshold) out.insert(v.surface);
  }
  return out;
}

void vocab_stage(StageContext& ctx) {
  const auto& c = ctx.config;
  const auto docs = load_documents(ctx);
  const auto terms = load_word_list(ctx.input("terms", c.terms));
  const auto counts = count_terms(docs, terms);
  const auto vocab = vocab_filter(counts.total, c.vocab_min);
  std::map<std::string, PronounCounts> pronouns;
  if (!c.pronouns.empty()) pronouns = parse_pronoun_tsv(read_file(ctx.input("pronouns", c.pronouns)));
  GenderOptions gopts;
  gopts.min_clusters = c.min_clusters;
  const auto labeled =
      label_vocabulary(vocab, counts.total, pronouns, default_gender_words(), infer_plural_map(vocab), gopts);
  ctx.write("vocab.tsv", vocab_to_tsv(labeled));

  std::vector<FrequencySeries> series;
  if (!docs.empty()) {
    const auto months = month_range(counts.documents_per_month.begin()->first,
                                    counts.documents_per_month.rbegin()->first);
    const auto& totals = c.series_denominator == "tokens" ? counts.tokens_per_month
                                                          : counts.documents_per_month;
    for (const auto& term : feminine_terms(labeled, c.fem_threshold)) {
      auto it = counts.monthly.find(term);
      series.push_back(build_series(term, it == counts.monthly.end() ? MonthCounts{} : it->second,
                                    totals, months, &ctx.diag));
    }
  }
  ctx.write("series.tsv", series_to_tsv(series));
}

void sample_stage(StageContext& ctx) {
  const auto& c = ctx.config;
  const auto docs = load_documents(ctx);
  const auto vocab = parse_vocab_tsv(read_file(ctx.produced("vocab.tsv")));
  std::map<std::string, std::string> ideology;
  if (!c.ideology.empty()) ideology = load_two_column(ctx.input("ideology", c.ideology), "ideology");
  const auto occurrences = find_occurrences(docs, feminine_terms(vocab, c.fem_threshold));

  const auto sampled = stratified_sample(occurrences, platform_ideology_year_key(ideology),
                                         c.sample_cap, ctx.seed("sample:platform-year"));
  std::vector<Occurrence> person;
  for (const auto& o : sampled) person.push_back(replace_target(o, default_number_lexicon()));
  const auto monthly =
      stratified_sample(occurrences, month_key(), c.reservoir_k, ctx.seed("sample:month"));
  ctx.write("occurrences.jsonl", serialize_occurrences(sampled));
  ctx.write("person_occurrences.jsonl", serialize_occurrences(person));
  ctx.write("timeline_occurrences.jsonl", serialize_occurrences(monthly));
}

void cluster_stage(StageContext& ctx) {
  const auto& c = ctx.config;
  const auto raw = parse_series_tsv(read_file(ctx.input_or_produced("series", c.series, "series.tsv")));
  std::vector<std::string> terms;
  std::vector<std::vector<double>> values;
  std::vector<std::string> months;
  for (const auto& s : raw) {
    auto sm = smooth(s, c.smoothing);
    double norm = 0.0;
    for (double v : sm.values) norm += v * v;
    if (norm == 0.0) {
      warn(&ctx.diag, "series for " + s.term + " is all zero; not clustered");
      continue;
    }
    months = sm.months;
    terms.push_back(sm.term);
    values.push_back(std::move(sm.values));
  }
  if (values.size() < c.k) {
    throw InputError("need at least " + std::to_string(c.k) + " non-zero series, have " +
                     std::to_string(values.size()));
  }
  KscOptions opts;
  opts.k = c.k;
  opts.max_iters = c.max_iters;
  opts.seed = ctx.seed("ksc");
  opts.restarts = c.restarts;
  opts.threads = c.threads;
  const auto model = ksc_cluster(values, opts);
  if (!model.converged) warn(&ctx.diag, "clustering stopped at max_iters before converging");
  ctx.write("clusters.json", cluster_model_to_json(model, terms, months));

  LineChart chart{"cluster centroids", "month", months, {}};
  for (std::size_t k = 0; k < model.centroids.size(); ++k) {
    chart.series.push_back({"cluster " + std::to_string(k), model.centroids[k], {}});
  }
  write_line_chart(ctx, "centroids_chart", chart);
}

/// Axes ordered by the variance of `per_axis` values (descending, ties by
/// axis_id), at most top_k.
std::vector<std::string> top_variance_axes(const std::map<std::string, std::vector<double>>& per_axis,
                                           std::size_t top_k) {
  std::vector<std::pair<double, std::string>> v;
  for (const auto& [id, xs] : per_axis) {
    if (xs.size() >= 2) v.emplace_back(axis_variance(xs), id);
  }
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size() && i < top_k; ++i) out.push_back(v[i].second);
  return out;
}

void timeline_stage(StageContext& ctx) {
  const auto& c = ctx.config;
  const auto axes = load_built_axes(ctx);
  const auto stats = load_built_stats(ctx);
  const ZScoreStats* sp = stats_if_needed(axes, stats);
  const auto groups = group_by_prefix(
      load_embeddings(ctx.input("occurrence_embeddings", c.occurrence_embeddings)), &ctx.diag);

  std::vector<std::string> months;
  for (const auto& [m, _] : groups) months.push_back(m);
  // axis_id -> per-month (mean, ci)
  std::map<std::string, std::vector<std::pair<double, std::optional<double>>>> cells;
  std::map<std::string, std::vector<double>> monthly_means;
  for (const auto& axis : axes) {
    auto& row = cells[axis.spec.axis_id];
    for (const auto& [m, list] : groups) {
      std::vector<double> xs;
      for (const auto& e : list) xs.push_back(axis_score(m, e, axis, sp).score);
      const double mu = mean(xs);
      row.emplace_back(mu, xs.size() >= 2 ? std::optional(ci95_half_width(xs)) : std::nullopt);
      monthly_means[axis.spec.axis_id].push_back(mu);
    }
  }
  LineChart chart{"axis scores by month", "month", months, {}};
  for (const auto& id : top_variance_axes(monthly_means, c.top_k)) {
    LineSeries s{id, {}, {}};
    for (const auto& [mu, ci] : cells[id]) {
      s.values.push_back(mu);
      s.ci95.push_back(ci);
    }
    chart.series.push_back(std::move(s));
  }
  if (months.size() == 1) warn(&ctx.diag, "timeline has a single month");
  write_line_chart(ctx, "timeline", chart);
}

void variants_stage(StageContext& ctx) {
  const auto& c = ctx.config;
  const auto axes = load_built_axes(ctx);
  const auto stats = load_built_stats(ctx);
  const ZScoreStats* sp = stats_if_needed(axes, stats);
  const auto groups = group_by_prefix(
      load_embeddings(ctx.input("variant_embeddings", c.variant_embeddings)), &ctx.diag);
  const auto a_names = csv_list(c.group_a);
  const auto b_names = csv_list(c.group_b);
  if (a_names.empty() || b_names.empty()) throw InputError("group_a and group_b must be set");

  auto collect = [&](const std::vector<std::string>& names, const Axis& axis) {
    std::vector<double> xs;
    for (const auto& n : names) {
      auto it = groups.find(n);
      if (it == groups.end()) continue;
      for (const auto& e : it->second) xs.push_back(axis_score(n, e, axis, sp).score);
    }
    return xs;
  };
  for (const auto* names : {&a_names, &b_names}) {
    for (const auto& n : *names) {
      if (!groups.contains(n)) warn(&ctx.diag, "variant without embeddings: " + n);
    }
  }
  std::vector<GroupPair> pairs;
  for (const auto& axis : axes) {
    GroupPair p{axis.spec.axis_id, collect(a_names, axis), collect(b_names, axis)};
    if (p.a.empty() || p.b.empty()) throw InputError("a variant group has no embeddings");
    pairs.push_back(std::move(p));
  }
  const auto ranking = mean_difference_ranking(pairs);
  ctx.write("variants.tsv", mean_differences_to_tsv(ranking));
  BarChart chart{"variant mean differences (" + c.group_a + " minus " + c.group_b + ")",
                 "difference", {}};
  for (std::size_t i = 0; i < ranking.size() && i < c.top_k; ++i) {
    chart.bars.push_back({ranking[i].axis_id, ranking[i].difference, std::nullopt});
  }
  write_bar_chart(ctx, "variants_chart", chart);
}

void report_stage(StageContext& ctx) {
  const auto& c = ctx.config;
  const auto axes = load_built_axes(ctx);
  const auto stats = load_built_stats(ctx);
  const auto loaded = cluster_model_from_json(read_file(ctx.produced("clusters.json")));
  const auto vocab = parse_vocab_tsv(read_file(ctx.produced("vocab.tsv")));
  const auto targets = pooled(load_embeddings(ctx.input("targets", c.targets)));
  const auto fem = feminine_terms(vocab, c.fem_threshold);

  std::vector<std::pair<std::string, Embedding>> fem_targets;
  for (const auto& t : targets) {
    if (fem.contains(t.first)) fem_targets.push_back(t);
  }
  const auto scores = score_targets(fem_targets, axes, stats_if_needed(axes, stats));

  std::map<std::string, std::vector<double>> per_axis;
  for (const auto& [term, row] : scores) {
    for (const auto& [id, s] : row) per_axis[id].push_back(s);
  }
  std::string var_tsv = "axis_id\tn\tvariance\n";
  const auto ranked = top_variance_axes(per_axis, per_axis.size());
  for (const auto& id : ranked) {
    var_tsv += id + '\t' + std::to_string(per_axis[id].size()) + '\t' +
               format_double(axis_variance(per_axis[id])) + '\n';
  }
  ctx.write("axis_variance.tsv", var_tsv);

  // Profiles over clustered terms that have scores, restricted to the
  // highest-variance axes.
  const std::set<std::string> shown(ranked.begin(),
                                    ranked.begin() + static_cast<std::ptrdiff_t>(
                                                         std::min(c.top_k, ranked.size())));
  ClusterModel model = loaded.model;
  model.assignments.clear();
  std::vector<std::string> terms;
  TermAxisScores profile_scores;
  std::map<std::string, double> frequency;
  for (const auto& v : vocab) frequency[v.surface] = static_cast<double>(v.total_count);
  for (std::size_t i = 0; i < loaded.terms.size(); ++i) {
    const auto& t = loaded.terms[i];
    auto it = scores.find(t);
    if (it == scores.end() || !frequency.contains(t)) {
      warn(&ctx.diag, "clustered term without scores or counts: " + t);
      continue;
    }
    terms.push_back(t);
    model.assignments.push_back(loaded.model.assignments[i]);
    for (const auto& [id, s] : it->second) {
      if (shown.contains(id)) profile_scores[t][id] = s;
    }
  }
  const auto cells = cluster_axis_profile(model, terms, profile_scores, frequency, c.freq_percentile);
  std::string prof = "cluster\tfrequency\taxis_id\tn\tmean\tci95\n";
  BarChart chart{"cluster axis profiles", "mean", {}};
  double peak = 0.0;
  for (const auto& cell : cells) {
    const std::string half = cell.high_frequency ? "high" : "low";
    prof += std::to_string(cell.cluster) + '\t' + half + '\t' + cell.axis_id + '\t' +
            std::to_string(cell.n) + '\t' + format_double(cell.mean) + '\t' +
            (cell.ci95 ? format_double(*cell.ci95) : std::string()) + '\n';
    chart.bars.push_back({"c" + std::to_string(cell.cluster) + "-" + half + ":" + cell.axis_id,
                          cell.mean, cell.ci95});
    peak = std::max(peak, std::abs(cell.mean));
  }
  ctx.write("cluster_profile.tsv", prof);
  write_bar_chart(ctx, "cluster_profile_chart", chart);

  // Centroid shapes drawn at half the largest profile magnitude, for overlay.
  LineChart shapes{"cluster centroid shapes (scaled)", "month", loaded.months, {}};
  for (std::size_t k = 0; k < loaded.model.centroids.size(); ++k) {
    shapes.series.push_back(
        {"cluster " + std::to_string(k), scale_to_peak(loaded.model.centroids[k], peak / 2), {}});
  }
  write_line_chart(ctx, "centroid_shapes", shapes);
}

struct StageDef {
  std::string name;
  std::function<void(StageContext&)> run;
  std::function<bool(const RunConfig&)> configured;
  /// Earlier stages whose outputs this one reads, paired with the output
  /// file that shows they have run. A dependency is skipped when the config
  /// supplies that input directly.
  std::vector<std::pair<std::string, std::string>> needs = {};
};

bool supplied(const RunConfig& c, const std::string& stage, const std::string& dep) {
  if (dep == "build-lexicon") return !c.axes.empty();
  if (stage == "cluster" && dep == "vocab") return !c.series.empty();
  return false;
}

const std::vector<StageDef>& stages() {
  static const std::vector<StageDef> defs = {
      {"build-lexicon", build_lexicon_stage,
       [](const RunConfig& c) { return !c.db.empty() && !c.vocab.empty(); }},
      {"select-contexts", select_contexts_stage,
       [](const RunConfig& c) { return !c.embeddings.empty() && !c.contexts.empty(); },
       {{"build-lexicon", "axes.jsonl"}}},
      {"build-axes", build_axes_stage, [](const RunConfig& c) { return !c.embeddings.empty(); },
       {{"build-lexicon", "axes.jsonl"}}},
      {"validate", validate_stage, [](const RunConfig& c) { return !c.embeddings.empty(); },
       {{"build-axes", "axes.saxe"}}},
      {"project", project_stage, [](const RunConfig& c) { return !c.targets.empty(); },
       {{"build-axes", "axes.saxe"}}},
      {"contrast", contrast_stage,
       [](const RunConfig& c) { return !c.targets.empty() && !c.categories.empty(); },
       {{"build-axes", "axes.saxe"}}},
      {"ingest", ingest_stage, [](const RunConfig& c) { return !c.corpus.empty(); }},
      {"vocab", vocab_stage,
       [](const RunConfig& c) { return !c.corpus.empty() && !c.terms.empty(); },
       {{"ingest", "documents.jsonl"}}},
      {"sample", sample_stage,
       [](const RunConfig& c) { return !c.corpus.empty() && !c.terms.empty(); },
       {{"vocab", "vocab.tsv"}}},
      {"cluster", cluster_stage,
       [](const RunConfig& c) { return !c.series.empty() || (!c.corpus.empty() && !c.terms.empty()); },
       {{"vocab", "series.tsv"}}},
      {"timeline", timeline_stage,
       [](const RunConfig& c) { return !c.occurrence_embeddings.empty(); },
       {{"build-axes", "axes.saxe"}}},
      {"variants", variants_stage,
       [](const RunConfig& c) {
         return !c.variant_embeddings.empty() && !c.group_a.empty() && !c.group_b.empty();
       },
       {{"build-axes", "axes.saxe"}}},
      {"report", report_stage,
       [](const RunConfig& c) { return !c.targets.empty() && !c.corpus.empty() && !c.terms.empty(); },
       {{"build-axes", "axes.saxe"}, {"cluster", "clusters.json"}}},
  };
  return defs;
}

const StageDef& find_stage(const std::string& name) {
  for (const auto& d : stages()) {
    if (d.name == name) return d;
  }
  throw InputError("unknown stage: " + name);
}

void merge_manifest(const RunConfig& config, const StageRecord& record) {
  const auto path = (fs::path(config.out) / "manifest.json").string();
  nlohmann::ordered_json j;
  json existing;
  if (fs::is_regular_file(path)) {
    try {
      existing = json::parse(read_file(path));
    } catch (const json::exception&) {
      existing = json::object();
    }
  }
  const auto hash = config_hash(config);
  json stage_map = json::object();
  // Records from a different configuration are stale.
  if (existing.is_object() && existing.value("config_hash", "") == hash &&
      existing.contains("stages")) {
    stage_map = existing["stages"];
  }
  json r;
  r["seed"] = hex64(record.seed);
  r["inputs"] = record.inputs;
  r["outputs"] = record.outputs;
  r["warnings"] = record.warnings;
  stage_map[record.name] = r;

  j["config_hash"] = hash;
  j["root_seed"] = config.seed;
  j["stages"] = stage_map;  // std::map ordering keeps this stable
  write_file(path + ".partial", j.dump(2) + "\n");
  fs::rename(path + ".partial", path);
}

}  // namespace

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& d : stages()) n.push_back(d.name);
    return n;
  }();
  return names;
}

bool stage_configured(const std::string& stage, const RunConfig& config) {
  return find_stage(stage).configured(config);
}

std::string config_hash(const RunConfig& config) {
  return hex64(fnv1a64(canonical_config(config)));
}

StageRecord run_stage(const std::string& stage, const RunConfig& config) {
  const auto& def = find_stage(stage);
  StageContext ctx(stage, config);
  ctx.record.seed = derive_seed(config.seed, stage);
  try {
    validate_config(config);
    fs::create_directories(config.out);
    def.run(ctx);
    ctx.commit();
  } catch (const InputError& e) {
    throw StageError(stage, e.what(), true);
  } catch (const FormatError& e) {
    throw StageError(stage, e.what(), true);
  } catch (const PreconditionError& e) {
    throw StageError(stage, e.what(), true);
  } catch (const std::exception& e) {
    throw StageError(stage, e.what(), false);
  }
  merge_manifest(config, ctx.record);
  return ctx.record;
}

std::vector<StageRecord> run_with_prerequisites(const std::string& stage,
                                                const RunConfig& config) {
  std::vector<StageRecord> out;
  for (const auto& [dep, marker] : find_stage(stage).needs) {
    if (supplied(config, stage, dep)) continue;
    if (fs::is_regular_file(fs::path(config.out) / marker)) continue;
    for (auto& r : run_with_prerequisites(dep, config)) out.push_back(std::move(r));
  }
  out.push_back(run_stage(stage, config));
  return out;
}

std::vector<StageRecord> run_pipeline(const RunConfig& config) {
  std::vector<StageRecord> out;
  for (const auto& d : stages()) {
    if (d.configured(config)) out.push_back(run_stage(d.name, config));
  }
  return out;
}

}  // namespace saxe
