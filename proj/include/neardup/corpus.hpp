#pragma once

// Corpus handling: page-version records, ingest filtering, per-site
// processing into annotated templates, the template index, and the
// aggregate statistics the reports are built from.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "neardup/align.hpp"
#include "neardup/annotate.hpp"
#include "neardup/rules.hpp"

namespace neardup {

struct PageVersion {
  std::string site_id;
  int64_t fetched_at = 0;   // Unix epoch seconds, UTC
  std::string fetched_iso;  // original timestamp text
  std::string html;
  std::vector<std::string> tags;
  bool has_embedded_images = false;
};

struct SiteHistory {
  std::string site_id;
  std::vector<PageVersion> versions;  // ascending fetched_at
  std::set<std::string> tags;         // union over versions
};

// UTC timestamp parsing. Accepts YYYY-MM-DD with an optional THH:MM:SS part
// (':' or '-' separators) and an optional Z or +HH:MM / -HH:MM offset.
// Returns nullopt on anything else.
std::optional<int64_t> parse_iso8601(std::string_view text);
std::string format_iso8601(int64_t epoch_seconds);

enum class RedirectKind { None, MetaRefresh, ScriptRefresh };

// A page is a pure redirect when it carries a <meta http-equiv=refresh>
// with a url and at most `max_visible_chars` of visible text, or when a
// script rewrites location and the page offers the usual fallback anchor.
RedirectKind detect_redirect(std::string_view html, size_t max_visible_chars = 80);

std::string extract_title(std::string_view html);
bool has_script_tag(std::string_view html);

struct IngestConfig {
  std::vector<std::string> proxy_signatures = {
      "Proxy error", "The proxy server could not handle the request",
      "502 Bad Gateway", "504 Gateway Time-out"};
  std::vector<std::string> blocked_tags = {"CSAM"};
  double sample_pct = 100.0;  // share of sites kept, by seeded hash
  uint64_t seed = 0;
  size_t min_versions = 2;
  size_t max_versions = 100;
};

// One dropped unit. Criteria use one letter each:
//   a blank page          b proxy error page     c sampled-out site
//   d blocked tag + embedded images              e redirect page
//   f too few versions    g over version cap     u consecutive duplicate
struct ExclusionRecord {
  char criterion = '?';
  std::string site_id;
  std::string fetched_iso;  // empty for whole-site records
  size_t version_count = 1;
  std::string detail;
};

struct IngestResult {
  std::vector<SiteHistory> sites;
  std::vector<ExclusionRecord> exclusions;
  std::map<char, size_t> dropped_versions;  // per criterion letter
  size_t input_versions = 0;
  size_t kept_versions = 0;  // invariant: kept + sum(dropped) == input
};

IngestResult ingest(std::vector<PageVersion> records, const IngestConfig& config);

// Groups records into per-site histories sorted by fetch time, with no
// filtering; ingest() is the filtering path.
std::vector<SiteHistory> group_versions(std::vector<PageVersion> records);

// JSONL reader: one object per line with site_id, fetched_at, html and
// optional tags / has_embedded_images (embedded images are detected from
// data: URIs when absent). Malformed lines are skipped and reported.
struct ReadResult {
  std::vector<PageVersion> records;
  size_t malformed = 0;
  std::vector<std::string> warnings;
};

ReadResult read_corpus_jsonl(const std::string& path);

// Directory layout: <root>/<site_id>/<timestamp>.html plus an optional
// <root>/<site_id>/meta.json ({"tags": [...]}).
ReadResult read_corpus_dir(const std::string& root);

void write_corpus_jsonl(const std::string& path,
                        const std::vector<SiteHistory>& sites);

struct ProcessConfig {
  AlignmentConfig align;
  std::chrono::milliseconds diff_budget{1000};
  unsigned jobs = 1;  // 0 = hardware concurrency
  bool keep_traces = false;
};

// One consecutive-version comparison inside a site.
struct ScriptStats {
  int old_index = 0;
  int new_index = 0;
  double diff_millis = 0.0;
  bool budget_exhausted = false;
  bool scripting = false;     // either side carries a <script>
  size_t units = 0;           // difference units seen by annotation
  size_t pseudo_units = 0;
  size_t annotated_units = 0;
  size_t failed_units = 0;
};

struct SiteProcessResult {
  std::string site_id;
  std::set<std::string> tags;
  std::vector<std::string> fetched_iso;        // per version
  std::vector<std::string> raw_digests;        // hex, per version
  std::vector<std::string> template_digests;   // hex, per version
  std::vector<std::string> templates;          // display form, per version
  std::vector<ScriptStats> scripts;
  std::map<std::string, int64_t> category_counts;  // includes "fail"
  std::vector<AnnotationTraceEntry> trace;         // only with keep_traces
  std::string error;  // non-empty when processing failed (site kept for audit)
};

// Versions map to templates by position: version 0 renders from the old
// side of the first comparison, version i>0 from the new side of
// comparison i-1. A single-version site hashes its literal text.
SiteProcessResult process_site(const SiteHistory& site,
                               const ProcessConfig& config,
                               const RuleSet& rules);

struct CorpusResult {
  std::vector<SiteProcessResult> sites;  // input order
};

CorpusResult process_corpus(const std::vector<SiteHistory>& sites,
                            const ProcessConfig& config, const RuleSet& rules);

// digest hex -> (site_id, version index) postings. Insertions are
// thread-safe; call finalize() before reading or saving.
class TemplateIndex {
 public:
  using Postings = std::map<std::string, std::vector<std::pair<std::string, int>>>;

  void add_raw(const std::string& digest, const std::string& site, int version);
  void add_template(const std::string& digest, const std::string& site, int version);
  void add_site(const SiteProcessResult& site);
  void finalize();  // sorts postings for deterministic output

  const Postings& raw() const { return raw_; }
  const Postings& templated() const { return templated_; }

  void save(const std::string& path) const;
  static TemplateIndex load(const std::string& path);

 private:
  Postings raw_;
  Postings templated_;
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

TemplateIndex build_index(const CorpusResult& result);

// Digest groups spanning at least two distinct sites.
struct Cluster {
  std::string digest;
  size_t site_count = 0;
  size_t version_count = 0;
};

struct ClusterStats {
  std::vector<Cluster> clusters;  // sorted by size desc, digest asc
  size_t cluster_count = 0;
  double mean_sites = 0.0;
  double median_sites = 0.0;
  size_t max_sites = 0;
};

ClusterStats cluster_stats(const TemplateIndex::Postings& postings);

// 100 * (1 - unique_templates / unique_raw); 0 when unique_raw is 0.
double near_duplicate_percent(size_t unique_raw, size_t unique_templates);

struct CrosstabRow {
  int64_t annotated = 0;
  int64_t failed = 0;
};

struct DedupStats {
  size_t sites = 0;
  size_t versions = 0;
  size_t comparisons = 0;
  size_t unique_raw = 0;
  size_t unique_templates = 0;
  double near_dup_percent = 0.0;
  std::map<std::string, int64_t> category_counts;
  int64_t annotated_units = 0;
  int64_t failed_units = 0;
  std::map<std::string, CrosstabRow> by_tag;  // "No offence" when untagged
  CrosstabRow with_script;
  CrosstabRow without_script;
  size_t budget_exhausted = 0;
  double mean_diff_millis = 0.0;
};

DedupStats near_duplicate_stats(const CorpusResult& result);

}  // namespace neardup
