// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <sys/wait.h>

#include <bit>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>

#include "oracles.hpp"
#include "saxe/axis_lexicon.hpp"
#include "saxe/axis_validate.hpp"
#include "saxe/project.hpp"
#include "saxe/timeseries.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using testing::fixture;
using testing::Gen;

namespace {

int failures = 0;

void verdict(bool ok, const char* name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// --- consistency -----------------------------------------------------------------

void consistency_oracle() {
  Gen g(1001);
  double worst = 0.0;
  std::size_t checked = 0;
  double lib_time = 0.0;
  for (int axis = 0; axis < 50; ++axis) {
    auto make = [&](const std::vector<double>& shift) {
      oracle::RawPole pole(static_cast<std::size_t>(g.integer(4, 6)));
      for (auto& adj : pole)
        for (int k = 0, n = g.integer(1, 3); k < n; ++k) {
          auto v = g.vec(8);
          for (std::size_t d = 0; d < 8; ++d) v[d] += shift[d];
          adj.push_back(v);
        }
      return pole;
    };
    const auto dir = g.vec(8, 0.5);
    auto neg = dir;
    for (auto& x : neg) x = -x;
    const auto rl = make(dir), rr = make(neg);
    saxe::PoleEmbeddings left, right;
    for (std::size_t i = 0; i < rl.size(); ++i) {
      left.push_back({"l" + std::to_string(i), {}});
      for (const auto& v : rl[i]) left.back().embeddings.emplace_back(v);
    }
    for (std::size_t i = 0; i < rr.size(); ++i) {
      right.push_back({"r" + std::to_string(i), {}});
      for (const auto& v : rr[i]) right.back().embeddings.emplace_back(v);
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = saxe::consistency_report("a" + std::to_string(axis), saxe::Method::kBertDefault,
                                              false, left, right);
    lib_time += seconds_since(t0);
    for (const auto& l : rep.loo) {
      const bool on_left = l.side == saxe::Side::kLeft;
      const auto idx = static_cast<std::size_t>(std::stoul(l.adjective.substr(1)));
      worst = std::max(worst, std::abs(l.cosine - oracle::loo(rl, rr, on_left, idx)));
      ++checked;
    }
    worst = std::max(worst, std::abs(rep.left_c - oracle::pole_c(rl, rr, true)));
    worst = std::max(worst, std::abs(rep.right_c - oracle::pole_c(rl, rr, false)));
    checked += 2;
  }
  verdict(worst <= 1e-9 && lib_time < 5.0 && checked > 500, "consistency-oracle",
          fmt("%.0f values, max |diff| %.3g, %.3f s (tol 1e-9, < 5 s)", double(checked), worst,
              lib_time));
}

// --- axis algebra ----------------------------------------------------------------

void axis_algebra() {
  Gen g(1002);
  bool exact_negation = true;
  double worst_shift = 0.0, worst_scale = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t dim = static_cast<std::size_t>(g.integer(2, 32));
    std::vector<saxe::Embedding> l, r;
    for (int k = 0, n = g.integer(1, 8); k < n; ++k) l.push_back(g.emb(dim));
    for (int k = 0, n = g.integer(1, 8); k < n; ++k) r.push_back(g.emb(dim));
    const auto v = saxe::axis_vector(l, r);
    const auto swapped = saxe::axis_vector(r, l);
    for (std::size_t d = 0; d < dim; ++d) exact_negation = exact_negation && swapped[d] == -v[d];

    const auto t = g.emb(dim, 10.0);
    std::vector<saxe::Embedding> lt, rt;
    for (const auto& e : l) lt.push_back(e + t);
    for (const auto& e : r) rt.push_back(e + t);
    const auto vt = saxe::axis_vector(lt, rt);
    const double s = g.uniform(-10, 10);
    std::vector<saxe::Embedding> ls, rs;
    for (const auto& e : l) ls.push_back(e * s);
    for (const auto& e : r) rs.push_back(e * s);
    const auto vs = saxe::axis_vector(ls, rs);
    for (std::size_t d = 0; d < dim; ++d) {
      worst_shift = std::max(worst_shift, std::abs(vt[d] - v[d]));
      worst_scale = std::max(worst_scale, std::abs(vs[d] - s * v[d]));
    }
  }
  verdict(exact_negation && worst_shift <= 1e-9 && worst_scale <= 1e-9, "axis-algebra",
          std::string("1000 axes, swap gives exact negation: ") + (exact_negation ? "yes" : "no") +
              fmt(", translation max %.3g, scale max %.3g (tol 1e-9)", worst_shift, worst_scale));
}

// --- KSC distance ----------------------------------------------------------------

void ksc_identity() {
  Gen g(1003);
  double worst = 0.0, worst_sym = 0.0, worst_scaled = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t len = static_cast<std::size_t>(g.integer(2, 60));
    const auto x = g.vec(len), y = g.vec(len);
    const double c = testing::plain_cos(x, y);
    const double want = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double d = saxe::ksc_distance(x, y);
    worst = std::max(worst, std::abs(d - want));
    worst_sym = std::max(worst_sym, std::abs(d - saxe::ksc_distance(y, x)));
    auto x3 = x;
    for (auto& v : x3) v *= 3;
    worst_scaled = std::max(worst_scaled, saxe::ksc_distance(x, x3));
  }
  verdict(worst <= 1e-9 && worst_sym <= 1e-9 && worst_scaled <= 1e-12, "ksc-distance-identity",
          fmt("10000 pairs, max |d-sin| %.3g, max asymmetry %.3g, max d(x,3x) %.3g", worst,
              worst_sym, worst_scaled));
}

// --- KSC recovery ----------------------------------------------------------------

bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& truth) {
  std::map<std::size_t, std::size_t> fwd, back;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [f, fi] = fwd.emplace(a[i], truth[i]);
    auto [b, bi] = back.emplace(truth[i], a[i]);
    if (f->second != truth[i] || b->second != a[i]) return false;
  }
  return true;
}

void ksc_recovery() {
  const std::size_t groups = 6, per = 10, len = 84;
  std::size_t recovered = 0;
  bool monotone = true;
  std::size_t traces = 0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    Gen g(5000 + run);
    std::vector<std::vector<double>> series;
    std::vector<std::size_t> truth;
    for (std::size_t grp = 0; grp < groups; ++grp) {
      const double center = 6.0 + 12.0 * static_cast<double>(grp);
      for (std::size_t i = 0; i < per; ++i) {
        const double peak = g.uniform(50, 500);
        std::vector<double> s(len);
        for (std::size_t t = 0; t < len; ++t) {
          const double z = (static_cast<double>(t) - center) / 2.0;
          s[t] = peak * std::exp(-0.5 * z * z) + g.normal(0, 0.05 * peak);
        }
        series.push_back(std::move(s));
        truth.push_back(grp);
      }
    }
    saxe::KscOptions opt;
    opt.k = groups;
    opt.seed = run;
    opt.restarts = 10;
    const auto m = saxe::ksc_cluster(series, opt);
    if (same_partition(m.assignments, truth)) ++recovered;
    // every restart's trace, not only the kept one
    for (std::size_t r = 0; r < opt.restarts; ++r) {
      std::vector<std::vector<double>> init;
      for (auto i : saxe::ksc_initial_indices(series.size(), groups, run, r)) init.push_back(series[i]);
      const auto one = saxe::ksc_run(series, init, opt.max_iters);
      ++traces;
      for (std::size_t i = 1; i < one.objective_trace.size(); ++i)
        monotone = monotone && one.objective_trace[i] <= one.objective_trace[i - 1] * (1 + 1e-12);
    }
  }
  verdict(recovered >= 95 && monotone, "ksc-recovery",
          fmt("%.0f/100 runs recovered (need >= 95), objective non-increasing in all %.0f runs: ",
              double(recovered), double(traces)) +
              (monotone ? "yes" : "no"));
}

// --- context selection -----------------------------------------------------------

void context_selection() {
  Gen g(1005);
  std::size_t trials = 0, mismatches = 0, enumerated = 0;
  for (int t = 0; t < 2000; ++t) {
    const int n = g.integer(0, 20);
    std::vector<saxe::ContextRecord> pool;
    for (int i = 0; i < n; ++i) {
      saxe::ContextRecord r;
      r.context_id = "c" + std::to_string(g.integer(0, 99)) + "." + std::to_string(i);
      r.adjective = "adj";
      r.tokens.assign(12, "w");
      // coarse grid forces ties; occasionally an empty map
      for (int k = 0, m = g.integer(0, 3); k < m; ++k) r.syn_probs["s" + std::to_string(k)] = g.integer(0, 8) / 8.0;
      for (int k = 0, m = g.integer(0, 3); k < m; ++k) r.ant_probs["a" + std::to_string(k)] = g.integer(0, 8) / 8.0;
      pool.push_back(r);
    }
    const auto k = static_cast<std::size_t>(g.integer(1, 12));
    std::vector<std::string> got;
    for (const auto& r : saxe::select_prob_contexts(pool, k)) got.push_back(r.context_id);
    ++trials;
    if (got != oracle::filter_sort_truncate(pool, k)) ++mismatches;
    if (n <= 14) {
      ++enumerated;
      if (got != oracle::prob_selection(pool, k)) ++mismatches;
    }
  }
  verdict(mismatches == 0, "context-selection-equivalence",
          fmt("%.0f pools of 0-20 records (%.0f also by subset enumeration), %.0f mismatches",
              double(trials), double(enumerated), double(mismatches)));
}

// --- calibration -----------------------------------------------------------------

void calibration() {
  Gen g(1006);
  std::size_t flagged = 0;
  const std::size_t trials = 10000;
  for (std::size_t t = 0; t < trials; ++t) {
    saxe::AxisSamples s;
    s.axis_id = "null";
    const double mu = g.uniform(-0.3, 0.3), sigma = g.uniform(0.05, 0.3);
    for (int i = 0; i < 20; ++i) s.category.push_back(g.normal(mu, sigma));
    for (int i = 0; i < 2000; ++i) s.background.push_back(g.normal(mu, sigma));
    saxe::ContrastOptions opt;
    opt.alpha = 0.001;
    opt.bootstrap = 10;
    opt.seed = t;
    flagged += saxe::contrast_experiment(std::vector{s}, opt).size();
  }
  const double rate = static_cast<double>(flagged) / trials;

  std::size_t covered = 0;
  const std::size_t boots = 5000;
  for (std::size_t t = 0; t < boots; ++t) {
    const double mu = g.uniform(-1, 1), sigma = g.uniform(0.1, 2);
    std::vector<double> xs(30);
    for (auto& x : xs) x = g.normal(mu, sigma);
    const auto b = saxe::bootstrap_mean(xs, 1000, saxe::derive_seed(17, std::to_string(t)));
    if (b.ci_low <= mu && mu <= b.ci_high) ++covered;
  }
  const double coverage = static_cast<double>(covered) / boots;
  verdict(rate <= 0.005 && coverage >= 0.93 && coverage <= 0.97, "statistical-calibration",
          fmt("null flag rate %.4f over 10000 trials (<= 0.005 at alpha 0.001), bootstrap coverage "
              "%.4f over 5000 trials (0.93-0.97)",
              rate, coverage));
}

// --- lexicon ---------------------------------------------------------------------

void lexicon_fixture() {
  using W = std::vector<std::string>;
  auto ax = [](std::string l, W la, std::string r, W ra) {
    return saxe::AxisSpec{l + "__" + r, {l, la}, {r, ra}};
  };
  const std::vector<saxe::AxisSpec> expected{
      ax("bad.a.01", {"bad", "awful", "terrible", "poor"}, "good.a.01",
         {"good", "fine", "superb", "nice", "pleasant"}),
      ax("big.a.01", {"big", "large", "huge"}, "small.a.01", {"small", "tiny", "wee"}),
      ax("cold.a.01", {"cold", "cool", "chilly", "lukewarm"}, "hot.a.01",
         {"hot", "spicy", "peppery", "warm"}),
      ax("heavy.a.01", {"heavy", "hefty", "weighty", "massive"}, "light.a.01",
         {"light", "airy", "weightless"}),
      ax("old.a.01", {"old", "aged", "ancient", "antique"}, "young.a.01",
         {"young", "youthful", "juvenile", "immature"}),
      ax("strong.a.01", {"strong", "powerful", "mighty", "sturdy"}, "weak.a.01",
         {"weak", "feeble", "frail", "fragile", "run_down"}),
  };
  const auto db = saxe::load_synset_db(fixture("lexicon/toy_db.jsonl"));
  const auto vocab = saxe::load_word_list(fixture("lexicon/toy_vocab.txt"));
  const auto first = saxe::build_axes(db, vocab);
  const auto a = saxe::serialize_axes(first);
  const auto b = saxe::serialize_axes(saxe::build_axes(saxe::load_synset_db(fixture("lexicon/toy_db.jsonl")), vocab));
  verdict(first == expected && a == b && db.size() == 40 && vocab.size() == 60, "lexicon-fixture",
          fmt("%.0f axes from 40 synsets / 60 words, match hand trace: ", double(first.size())) +
              (first == expected ? "yes" : "no") + ", rerun byte-identical: " + (a == b ? "yes" : "no"));
}

// --- format round trip -----------------------------------------------------------

void format_round_trip() {
  Gen g(1008);
  saxe::EmbeddingSet set(24);
  std::set<std::string> keys;
  while (keys.size() < 10000) {
    std::string k;
    for (int i = 0, n = g.integer(1, 40); i < n; ++i) k.push_back(static_cast<char>(g.integer(33, 126)));
    keys.insert(k);
  }
  std::vector<std::vector<std::uint32_t>> bits;
  for (const auto& k : keys) {
    std::vector<double> v(24);
    std::vector<std::uint32_t> b(24);
    for (std::size_t d = 0; d < 24; ++d) {
      float f;
      do {
        f = std::bit_cast<float>(static_cast<std::uint32_t>(g.engine()()));
      } while (!std::isfinite(f));
      v[d] = f;
      b[d] = std::bit_cast<std::uint32_t>(f);
    }
    set.add(k, saxe::Embedding(v));
    bits.push_back(b);
  }
  const auto path = (fs::temp_directory_path() / "saxe_acceptance_roundtrip.saxe").string();
  saxe::write_embeddings(set, path);
  const auto back = saxe::load_embeddings(path);
  bool exact = back.key_count() == keys.size();
  std::size_t i = 0;
  for (const auto& k : keys) {
    const auto& e = back.at(k).front();
    for (std::size_t d = 0; d < 24; ++d)
      exact = exact && std::bit_cast<std::uint32_t>(static_cast<float>(e[d])) == bits[i][d];
    ++i;
  }
  exact = exact && saxe::serialize_embeddings(back) == saxe::read_file(path);
  fs::remove(path);

  const std::vector<std::pair<const char*, std::uint64_t>> bad{
      {"bad_magic", 0}, {"bad_version", 4}, {"zero_dim", 8}, {"huge_count", 12},
      {"short_header", 8}, {"truncated_record", 56}, {"trailing_bytes", 64}, {"nan_value", 31}};
  std::size_t rejected = 0;
  for (const auto& [name, offset] : bad) {
    try {
      saxe::load_embeddings(fixture(std::string("store/") + name + ".saxe"));
    } catch (const saxe::FormatError& e) {
      if (e.offset() == offset &&
          std::string(e.what()).find(std::to_string(offset)) != std::string::npos)
        ++rejected;
    }
  }
  verdict(exact && rejected == bad.size(), "format-round-trip",
          std::string("10000 records bit-exact: ") + (exact ? "yes" : "no") +
              fmt(", corrupted files rejected at the right offset: %.0f/%.0f", double(rejected),
                  double(bad.size())));
}

// --- end to end ------------------------------------------------------------------

void end_to_end() {
  const auto a = fs::temp_directory_path() / "saxe_acceptance_e2e_a";
  const auto b = fs::temp_directory_path() / "saxe_acceptance_e2e_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const auto t0 = std::chrono::steady_clock::now();
  auto run = [](const fs::path& out) {
    const std::string cmd = std::string(SAXE_BINARY) + " -q --config " + fixture("toy/toy.conf") +
                            " --out " + out.string() + " run";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const int ca = run(a);
  const int cb = run(b);
  const double elapsed = seconds_since(t0);
  std::size_t files = 0, differ = 0;
  if (fs::exists(a)) {
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      const auto other = b / e.path().filename();
      if (!fs::exists(other) || saxe::read_file(e.path().string()) != saxe::read_file(other.string()))
        ++differ;
    }
  }
  verdict(ca == 0 && cb == 0 && files > 20 && differ == 0 && elapsed < 60.0, "end-to-end-determinism",
          fmt("two full toy runs, %.0f files, %.0f differing, %.2f s total (< 60 s)", double(files),
              double(differ), elapsed));
  fs::remove_all(a);
  fs::remove_all(b);
}

}  // namespace

int main() {
  consistency_oracle();
  axis_algebra();
  ksc_identity();
  ksc_recovery();
  context_selection();
  calibration();
  lexicon_fixture();
  format_round_trip();
  end_to_end();
  return failures == 0 ? 0 : 1;
}
