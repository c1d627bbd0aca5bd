// neardup: near-duplicate detection for crawled page histories.
//
// Versions of a page are tokenized, diffed, aligned in chunks, and rewritten
// into annotated templates where volatile fragments (dates, prices, wallet
// addresses, counters, ...) become reserved words. Two versions are near
// duplicates exactly when their template digests collide. Subcommands cover
// corpus ingest, template processing and reporting, chunk-size sensitivity,
// similarity comparisons, and a few standalone corpus analyzers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"

#include "neardup/analyzers.hpp"
#include "neardup/corpus.hpp"
#include "neardup/report.hpp"
#include "neardup/similarity.hpp"

namespace fs = std::filesystem;
using namespace neardup;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMissingInput = 3;
constexpr int kExitBadConfig = 4;

struct MissingInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

ReadResult load_input(const std::string& input) {
  if (input.empty() || !fs::exists(input))
    throw MissingInputError("input not found: " + input);
  ReadResult read =
      fs::is_directory(input) ? read_corpus_dir(input) : read_corpus_jsonl(input);
  for (const auto& w : read.warnings) std::cerr << "warning: " << w << '\n';
  if (read.malformed > 0)
    std::cerr << "warning: skipped " << read.malformed
              << " malformed record(s)\n";
  return read;
}

RuleSet load_rule_set(const std::string& rules_path) {
  if (rules_path.empty()) return default_rules();
  if (!fs::exists(rules_path))
    throw MissingInputError("rule file not found: " + rules_path);
  try {
    return load_rules_file(rules_path);
  } catch (const RuleParseError& e) {
    throw BadConfigError(rules_path + ": rule '" + e.rule_name + "' line " +
                         std::to_string(e.line) + ": " + e.what());
  }
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

// Flags shared by the corpus-consuming subcommands.
struct CommonOpts {
  std::string input;
  std::string out = "out";
  std::string rules_path;
  double sample_pct = 100.0;
  uint64_t seed = 0;
  int chunk_size = 10;
  int budget_ms = 1000;
  unsigned jobs = 0;
  size_t min_versions = 2;
  size_t max_versions = 100;
};

void add_input_option(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-i,--input", opts.input,
                  "corpus JSONL file or directory of <site>/<timestamp>.html")
      ->envname("NEARDUP_INPUT")
      ->required();
}

void add_ingest_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--sample-pct", opts.sample_pct,
                  "share of sites kept by seeded sampling")
      ->check(CLI::Range(0.0, 100.0))
      ->envname("NEARDUP_SAMPLE_PCT");
  cmd->add_option("--seed", opts.seed, "sampling seed")->envname("NEARDUP_SEED");
  cmd->add_option("--min-versions", opts.min_versions,
                  "drop sites with fewer versions");
  cmd->add_option("--max-versions", opts.max_versions,
                  "cap versions kept per site");
}

void add_process_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--chunk-size", opts.chunk_size,
                  "scripts aligned together; 0 disables alignment")
      ->envname("NEARDUP_CHUNK_SIZE");
  cmd->add_option("--budget-ms", opts.budget_ms, "per-diff time budget")
      ->check(CLI::PositiveNumber)
      ->envname("NEARDUP_BUDGET_MS");
  cmd->add_option("--rules", opts.rules_path, "annotation rule file")
      ->envname("NEARDUP_RULES");
  cmd->add_option("-j,--jobs", opts.jobs, "worker threads (0 = all cores)")
      ->envname("NEARDUP_JOBS");
}

IngestConfig ingest_config(const CommonOpts& opts) {
  IngestConfig cfg;
  cfg.sample_pct = opts.sample_pct;
  cfg.seed = opts.seed;
  cfg.min_versions = opts.min_versions;
  cfg.max_versions = opts.max_versions;
  return cfg;
}

ProcessConfig process_config(const CommonOpts& opts) {
  ProcessConfig cfg;
  cfg.align.chunk_size = opts.chunk_size;
  cfg.diff_budget = std::chrono::milliseconds(opts.budget_ms);
  cfg.jobs = opts.jobs;
  return cfg;
}

void validate_chunk_size(int chunk_size) {
  if (chunk_size < 0 || chunk_size == 1)
    throw BadConfigError("--chunk-size must be 0 or at least 2");
}

int run_ingest(const CommonOpts& opts) {
  auto read = load_input(opts.input);
  const size_t input_versions = read.records.size();
  auto result = ingest(std::move(read.records), ingest_config(opts));
  const fs::path dir = ensure_out_dir(opts.out);
  write_corpus_jsonl((dir / "corpus.jsonl").string(), result.sites);
  write_exclusions_csv((dir / "exclusions.csv").string(), result);
  size_t dropped = 0;
  for (const auto& [crit, count] : result.dropped_versions) dropped += count;
  std::cout << "ingest input_versions=" << input_versions
            << " kept_sites=" << result.sites.size()
            << " kept_versions=" << result.kept_versions
            << " dropped=" << dropped << " malformed=" << read.malformed
            << '\n';
  return 0;
}

int run_process(const CommonOpts& opts) {
  validate_chunk_size(opts.chunk_size);
  const RuleSet rules = load_rule_set(opts.rules_path);
  auto read = load_input(opts.input);
  auto ing = ingest(std::move(read.records), ingest_config(opts));
  auto result = process_corpus(ing.sites, process_config(opts), rules);
  auto index = build_index(result);
  const auto stats = near_duplicate_stats(result);
  const auto raw_clusters = cluster_stats(index.raw());
  const auto tpl_clusters = cluster_stats(index.templated());

  const fs::path dir = ensure_out_dir(opts.out);
  const auto path = [&dir](const char* name) { return (dir / name).string(); };
  write_versions_csv(path("versions.csv"), result);
  write_categories_csv(path("categories.csv"), stats);
  write_exclusions_csv(path("exclusions.csv"), ing);
  write_crosstab_csv(path("crosstab.csv"), stats);
  write_clusters_csv(path("clusters.csv"), raw_clusters, tpl_clusters);
  write_summary_text(path("summary.txt"), stats, raw_clusters, tpl_clusters);
  index.save(path("index.tsv"));
  write_timings_csv(path("timings.csv"), result);

  std::map<std::string, std::string> settings = {
      {"input", opts.input},
      {"chunk_size", std::to_string(opts.chunk_size)},
      {"budget_ms", std::to_string(opts.budget_ms)},
      {"sample_pct", fixed(opts.sample_pct, 6)},
      {"seed", std::to_string(opts.seed)},
      {"min_versions", std::to_string(opts.min_versions)},
      {"max_versions", std::to_string(opts.max_versions)},
      {"rules", opts.rules_path.empty() ? "default" : opts.rules_path},
  };
  // The timings file varies run to run, so it stays out of the manifest.
  write_run_manifest(path("manifest.json"), settings, stats,
                     {path("versions.csv"), path("categories.csv"),
                      path("exclusions.csv"), path("crosstab.csv"),
                      path("clusters.csv"), path("summary.txt"),
                      path("index.tsv")});

  std::cout << "processed sites=" << stats.sites
            << " versions=" << stats.versions
            << " unique_raw=" << stats.unique_raw
            << " unique_templates=" << stats.unique_templates
            << " near_dup_pct=" << fixed(stats.near_dup_percent)
            << " annotated_units=" << stats.annotated_units
            << " failed_units=" << stats.failed_units << '\n';
  return 0;
}

int run_report(const std::string& index_path, const std::string& out) {
  if (!fs::exists(index_path))
    throw MissingInputError("index not found: " + index_path);
  auto index = TemplateIndex::load(index_path);
  const auto raw_clusters = cluster_stats(index.raw());
  const auto tpl_clusters = cluster_stats(index.templated());
  if (!out.empty()) {
    const fs::path dir = ensure_out_dir(out);
    write_clusters_csv((dir / "clusters.csv").string(), raw_clusters,
                       tpl_clusters);
  }
  size_t raw_versions = 0, tpl_versions = 0;
  for (const auto& [digest, entries] : index.raw()) raw_versions += entries.size();
  for (const auto& [digest, entries] : index.templated())
    tpl_versions += entries.size();
  std::cout << "report versions=" << raw_versions
            << " unique_raw=" << index.raw().size()
            << " unique_templates=" << index.templated().size()
            << " near_dup_pct="
            << fixed(near_duplicate_percent(index.raw().size(),
                                            index.templated().size()))
            << " raw_clusters=" << raw_clusters.cluster_count
            << " template_clusters=" << tpl_clusters.cluster_count << '\n';
  return 0;
}

int run_sensitivity(const CommonOpts& opts, std::vector<int> chunk_sizes) {
  if (chunk_sizes.empty()) chunk_sizes = {0, 2, 5, 10, 20, 50, 100};
  for (int size : chunk_sizes) validate_chunk_size(size);
  const RuleSet rules = load_rule_set(opts.rules_path);
  auto read = load_input(opts.input);
  auto ing = ingest(std::move(read.records), ingest_config(opts));

  const fs::path dir = ensure_out_dir(opts.out);
  std::ofstream csv(dir / "sensitivity.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write sensitivity.csv");
  csv << "chunk_size,unique_raw,unique_templates,near_dup_pct,annotated_units,"
         "failed_units\n";
  for (int size : chunk_sizes) {
    ProcessConfig cfg = process_config(opts);
    cfg.align.chunk_size = size;
    const auto stats = near_duplicate_stats(process_corpus(ing.sites, cfg, rules));
    csv << size << ',' << stats.unique_raw << ',' << stats.unique_templates
        << ',' << fixed(stats.near_dup_percent, 6) << ','
        << stats.annotated_units << ',' << stats.failed_units << '\n';
    std::cout << "chunk_size=" << size
              << " unique_templates=" << stats.unique_templates
              << " near_dup_pct=" << fixed(stats.near_dup_percent) << '\n';
  }
  return 0;
}

int run_compare_similarity(const CommonOpts& opts, int k, int num_hashes) {
  auto read = load_input(opts.input);
  auto ing = ingest(std::move(read.records), ingest_config(opts));

  const fs::path dir = ensure_out_dir(opts.out);
  std::ofstream csv(dir / "similarity.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write similarity.csv");
  csv << "site_id,old_version,new_version,jaccard,minhash,diff_similarity\n";

  size_t pairs = 0;
  double abs_err_sum = 0.0;
  for (const auto& site : ing.sites) {
    for (size_t i = 0; i + 1 < site.versions.size(); ++i) {
      const TokenStream a = tokenize(site.versions[i].html);
      const TokenStream b = tokenize(site.versions[i + 1].html);
      const ShingleSet sa = shingle(a, k);
      const ShingleSet sb = shingle(b, k);
      const double exact = jaccard(sa, sb);
      const double estimate = minhash_estimate(sa, sb, num_hashes, opts.seed);
      const EditScript script =
          token_diff(a, b, std::chrono::milliseconds(opts.budget_ms));
      const double diff_sim = diff_similarity(script);
      csv << csv_escape(site.site_id) << ',' << i << ',' << i + 1 << ','
          << fixed(exact, 6) << ',' << fixed(estimate, 6) << ','
          << fixed(diff_sim, 6) << '\n';
      abs_err_sum += std::abs(exact - estimate);
      ++pairs;
    }
  }
  std::cout << "similarity pairs=" << pairs << " k=" << k
            << " num_hashes=" << num_hashes << " mean_abs_minhash_err="
            << fixed(pairs ? abs_err_sum / static_cast<double>(pairs) : 0.0, 6)
            << '\n';
  return 0;
}

int run_scan_bitcoin(const CommonOpts& opts, bool all_versions) {
  auto read = load_input(opts.input);
  auto sites = group_versions(std::move(read.records));
  const auto findings = scan_hidden_bitcoin(sites, all_versions);

  const fs::path dir = ensure_out_dir(opts.out);
  std::ofstream csv(dir / "bitcoin.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write bitcoin.csv");
  csv << "site_id,version,location,scheme,address,valid,reason\n";
  size_t valid = 0;
  std::set<std::string> sites_with_valid;
  for (const auto& f : findings) {
    csv << csv_escape(f.site_id) << ',' << f.version << ','
        << btc_location_name(f.location) << ',' << btc_scheme_name(f.scheme)
        << ',' << csv_escape(f.address) << ',' << (f.valid ? 1 : 0) << ','
        << csv_escape(f.reason) << '\n';
    if (f.valid) {
      ++valid;
      sites_with_valid.insert(f.site_id);
    }
  }
  std::cout << "bitcoin findings=" << findings.size() << " valid=" << valid
            << " sites_with_valid=" << sites_with_valid.size() << '\n';
  return 0;
}

int run_titles(const CommonOpts& opts, const std::string& patterns_path) {
  std::vector<DisruptionPattern> patterns;
  if (patterns_path.empty()) {
    patterns = default_disruption_patterns();
  } else if (!fs::exists(patterns_path)) {
    throw MissingInputError("pattern file not found: " + patterns_path);
  } else {
    try {
      patterns = load_disruption_patterns(patterns_path);
    } catch (const std::runtime_error& e) {
      throw BadConfigError(e.what());
    }
  }

  auto read = load_input(opts.input);
  auto sites = group_versions(std::move(read.records));
  TitleStats stats;
  try {
    stats = analyze_titles(sites, patterns);
  } catch (const std::runtime_error& e) {
    throw BadConfigError(e.what());
  }

  const fs::path dir = ensure_out_dir(opts.out);
  std::ofstream csv(dir / "titles.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write titles.csv");
  csv << "site_id,versions,distinct_runs,disruptions\n";
  for (const auto& site : stats.sites) {
    size_t versions = 0;
    for (const auto& run : site.runs) versions += run.count;
    std::string names;
    for (const auto& d : site.disruptions) {
      if (!names.empty()) names += ';';
      names += d;
    }
    csv << csv_escape(site.site_id) << ',' << versions << ','
        << site.runs.size() << ',' << csv_escape(names) << '\n';
  }

  std::cout << "titles sites=" << stats.sites.size()
            << " changed=" << stats.sites_with_title_changes;
  for (const auto& [name, count] : stats.sites_per_disruption)
    std::cout << ' ' << name << '=' << count;
  std::cout << '\n';
  return 0;
}

int run_dynamics(const CommonOpts& opts) {
  auto read = load_input(opts.input);
  auto sites = group_versions(std::move(read.records));
  const DynamicsStats stats = change_dynamics(sites);

  const fs::path dir = ensure_out_dir(opts.out);
  std::ofstream csv(dir / "dynamics.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write dynamics.csv");
  csv << "site_id,day_versions,changed_pairs,change_interval_days,"
         "lifespan_days\n";
  for (const auto& site : stats.sites) {
    csv << csv_escape(site.site_id) << ',' << site.day_versions << ','
        << site.changed_pairs << ',' << fixed(site.change_interval_days, 6)
        << ',' << fixed(site.lifespan_days, 6) << '\n';
  }

  std::cout << "dynamics sites=" << stats.sites.size()
            << " excluded=" << stats.excluded_sites
            << " never_changed=" << stats.never_changed << " interval_buckets=";
  for (size_t i = 0; i < stats.interval_buckets.size(); ++i)
    std::cout << (i ? "/" : "") << stats.interval_buckets[i];
  std::cout << " lifespan_buckets=";
  for (size_t i = 0; i < stats.lifespan_buckets.size(); ++i)
    std::cout << (i ? "/" : "") << stats.lifespan_buckets[i];
  if (stats.fit_valid) {
    std::cout << " slope=" << fixed(stats.fit.slope, 4)
              << " r2=" << fixed(stats.fit.r2, 4)
              << " adjusted_r2=" << fixed(stats.fit.adjusted_r2, 4)
              << " n=" << stats.fit.n;
  } else {
    std::cout << " fit=insufficient-data";
  }
  std::cout << '\n';
  return 0;
}

int run_dump_rules(const std::string& rules_path) {
  std::cout << dump_rules(load_rule_set(rules_path));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-duplicate detection and template annotation for page histories"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::vector<int> chunk_sizes;
  int shingle_k = 3;
  int num_hashes = 128;
  bool all_versions = false;
  std::string index_path, patterns_path;
  std::string report_out;  // report writes only when asked

  auto* ingest_cmd =
      app.add_subcommand("ingest", "filter a raw corpus and write it back out");
  add_input_option(ingest_cmd, opts);
  ingest_cmd->add_option("-o,--out", opts.out, "output directory");
  add_ingest_options(ingest_cmd, opts);

  auto* process_cmd = app.add_subcommand(
      "process", "ingest, build annotated templates, and write all reports");
  add_input_option(process_cmd, opts);
  process_cmd->add_option("-o,--out", opts.out, "output directory");
  add_ingest_options(process_cmd, opts);
  add_process_options(process_cmd, opts);

  auto* report_cmd =
      app.add_subcommand("report", "recompute cluster stats from a saved index");
  report_cmd->add_option("--index", index_path, "index.tsv from a process run")
      ->required();
  report_cmd->add_option("-o,--out", report_out, "optional output directory");

  auto* sens_cmd = app.add_subcommand(
      "sensitivity", "re-run template building across chunk sizes");
  add_input_option(sens_cmd, opts);
  sens_cmd->add_option("-o,--out", opts.out, "output directory");
  sens_cmd->add_option("--chunk-sizes", chunk_sizes,
                       "chunk sizes to test (default 0,2,5,10,20,50,100)")
      ->delimiter(',');
  add_ingest_options(sens_cmd, opts);
  add_process_options(sens_cmd, opts);

  auto* sim_cmd = app.add_subcommand(
      "compare-similarity",
      "jaccard, minhash, and diff similarity for consecutive versions");
  add_input_option(sim_cmd, opts);
  sim_cmd->add_option("-o,--out", opts.out, "output directory");
  sim_cmd->add_option("-k,--shingle-k", shingle_k, "shingle width in tokens")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--num-hashes", num_hashes, "minhash functions")
      ->check(CLI::PositiveNumber);
  add_ingest_options(sim_cmd, opts);
  add_process_options(sim_cmd, opts);

  auto* btc_cmd = app.add_subcommand(
      "scan-bitcoin", "find wallet addresses hidden in markup");
  add_input_option(btc_cmd, opts);
  btc_cmd->add_option("-o,--out", opts.out, "output directory");
  btc_cmd->add_flag("--all-versions", all_versions,
                    "scan every version, not just the oldest per site");

  auto* titles_cmd =
      app.add_subcommand("titles", "page-title churn and disruption signatures");
  add_input_option(titles_cmd, opts);
  titles_cmd->add_option("-o,--out", opts.out, "output directory");
  titles_cmd->add_option("--patterns", patterns_path,
                         "JSON array of {name, pattern} disruption signatures");

  auto* dyn_cmd = app.add_subcommand(
      "dynamics", "change intervals, lifespans, and their relationship");
  add_input_option(dyn_cmd, opts);
  dyn_cmd->add_option("-o,--out", opts.out, "output directory");

  auto* rules_cmd =
      app.add_subcommand("dump-rules", "print the annotation rules in effect");
  rules_cmd->add_option("--rules", opts.rules_path, "annotation rule file")
      ->envname("NEARDUP_RULES");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(ingest_cmd)) return run_ingest(opts);
    if (app.got_subcommand(process_cmd)) return run_process(opts);
    if (app.got_subcommand(report_cmd)) return run_report(index_path, report_out);
    if (app.got_subcommand(sens_cmd)) return run_sensitivity(opts, chunk_sizes);
    if (app.got_subcommand(sim_cmd))
      return run_compare_similarity(opts, shingle_k, num_hashes);
    if (app.got_subcommand(btc_cmd)) return run_scan_bitcoin(opts, all_versions);
    if (app.got_subcommand(titles_cmd)) return run_titles(opts, patterns_path);
    if (app.got_subcommand(dyn_cmd)) return run_dynamics(opts);
    if (app.got_subcommand(rules_cmd)) return run_dump_rules(opts.rules_path);
  } catch (const MissingInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMissingInput;
  } catch (const BadConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const RuleParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
