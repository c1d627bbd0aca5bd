#include "neardup/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "neardup/sha256.hpp"

namespace neardup {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string csv_escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

void write_versions_csv(const std::string& path, const CorpusResult& result) {
  auto out = open_out(path);
  out << "site_id,version,fetched_at,raw_sha256,template_sha256\n";
  for (const auto& site : result.sites) {
    for (size_t i = 0; i < site.raw_digests.size(); ++i) {
      const std::string tpl =
          i < site.template_digests.size() ? site.template_digests[i] : "";
      out << csv_escape(site.site_id) << ',' << i << ','
          << csv_escape(i < site.fetched_iso.size() ? site.fetched_iso[i] : "")
          << ',' << site.raw_digests[i] << ',' << tpl << '\n';
    }
  }
}

void write_categories_csv(const std::string& path, const DedupStats& stats) {
  auto out = open_out(path);
  out << "category,units,share_pct\n";
  int64_t total = 0;
  for (const auto& [word, count] : stats.category_counts) total += count;
  // Largest first; name breaks ties so the order is stable.
  std::vector<std::pair<std::string, int64_t>> rows(
      stats.category_counts.begin(), stats.category_counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [word, count] : rows) {
    const double share =
        total > 0 ? 100.0 * static_cast<double>(count) /
                        static_cast<double>(total)
                  : 0.0;
    out << csv_escape(word) << ',' << count << ',' << fixed6(share) << '\n';
  }
}

void write_exclusions_csv(const std::string& path, const IngestResult& ingest) {
  auto out = open_out(path);
  out << "criterion,site_id,fetched_at,versions,detail\n";
  for (const auto& rec : ingest.exclusions) {
    out << rec.criterion << ',' << csv_escape(rec.site_id) << ','
        << csv_escape(rec.fetched_iso) << ',' << rec.version_count << ','
        << csv_escape(rec.detail) << '\n';
  }
}

void write_crosstab_csv(const std::string& path, const DedupStats& stats) {
  auto out = open_out(path);
  out << "dimension,key,annotated_units,failed_units,annotated_share_pct\n";
  const auto emit = [&out](std::string_view dim, std::string_view key,
                           const CrosstabRow& row) {
    const int64_t total = row.annotated + row.failed;
    const double share =
        total > 0 ? 100.0 * static_cast<double>(row.annotated) /
                        static_cast<double>(total)
                  : 0.0;
    out << csv_escape(dim) << ',' << csv_escape(key) << ',' << row.annotated
        << ',' << row.failed << ',' << fixed6(share) << '\n';
  };
  for (const auto& [tag, row] : stats.by_tag) emit("tag", tag, row);
  emit("scripting", "no", stats.without_script);
  emit("scripting", "yes", stats.with_script);
}

void write_clusters_csv(const std::string& path, const ClusterStats& raw,
                        const ClusterStats& templated) {
  auto out = open_out(path);
  out << "kind,digest,sites,versions\n";
  for (const auto& c : raw.clusters)
    out << "raw," << c.digest << ',' << c.site_count << ',' << c.version_count
        << '\n';
  for (const auto& c : templated.clusters)
    out << "template," << c.digest << ',' << c.site_count << ','
        << c.version_count << '\n';
}

void write_timings_csv(const std::string& path, const CorpusResult& result) {
  auto out = open_out(path);
  out << "site_id,old_version,new_version,millis,budget_exhausted,units,"
         "pseudo_units,annotated_units,failed_units\n";
  for (const auto& site : result.sites) {
    for (const auto& st : site.scripts) {
      out << csv_escape(site.site_id) << ',' << st.old_index << ','
          << st.new_index << ',' << fixed6(st.diff_millis) << ','
          << (st.budget_exhausted ? 1 : 0) << ',' << st.units << ','
          << st.pseudo_units << ',' << st.annotated_units << ','
          << st.failed_units << '\n';
    }
  }
}

void write_summary_text(const std::string& path, const DedupStats& stats,
                        const ClusterStats& raw_clusters,
                        const ClusterStats& template_clusters) {
  auto out = open_out(path);
  const auto line = [&out](std::string_view key, const std::string& value) {
    out << key;
    for (size_t i = key.size(); i < 28; ++i) out << ' ';
    out << value << '\n';
  };
  line("sites", std::to_string(stats.sites));
  line("versions", std::to_string(stats.versions));
  line("comparisons", std::to_string(stats.comparisons));
  line("unique_raw", std::to_string(stats.unique_raw));
  line("unique_templates", std::to_string(stats.unique_templates));
  line("near_duplicate_pct", fixed6(stats.near_dup_percent));
  line("annotated_units", std::to_string(stats.annotated_units));
  line("failed_units", std::to_string(stats.failed_units));
  line("budget_exhausted", std::to_string(stats.budget_exhausted));
  line("raw_clusters", std::to_string(raw_clusters.cluster_count));
  line("raw_cluster_max_sites", std::to_string(raw_clusters.max_sites));
  line("raw_cluster_mean_sites", fixed6(raw_clusters.mean_sites));
  line("template_clusters", std::to_string(template_clusters.cluster_count));
  line("template_cluster_max_sites",
       std::to_string(template_clusters.max_sites));
  line("template_cluster_mean_sites", fixed6(template_clusters.mean_sites));
}

void write_run_manifest(const std::string& path,
                        const std::map<std::string, std::string>& settings,
                        const DedupStats& stats,
                        const std::vector<std::string>& output_files) {
  nlohmann::json j;
  j["settings"] = settings;
  j["counts"] = {
      {"sites", stats.sites},
      {"versions", stats.versions},
      {"comparisons", stats.comparisons},
      {"unique_raw", stats.unique_raw},
      {"unique_templates", stats.unique_templates},
      {"near_duplicate_pct", fixed6(stats.near_dup_percent)},
      {"annotated_units", stats.annotated_units},
      {"failed_units", stats.failed_units},
  };
  nlohmann::json outputs = nlohmann::json::object();
  for (const auto& file : output_files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("manifest: cannot read " + file);
    std::ostringstream buf;
    buf << in.rdbuf();
    outputs[std::filesystem::path(file).filename().string()] =
        to_hex(sha256(buf.str()));
  }
  j["outputs"] = outputs;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace neardup
