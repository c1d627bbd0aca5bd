#pragma once

// Report writers. Every writer produces byte-identical output for the same
// inputs: rows are sorted, floats use fixed precision, and nothing
// timestamps itself. Timing data goes to its own file so the remaining
// outputs can be hashed into the run manifest and compared across runs.

#include <map>
#include <string>
#include <vector>

#include "neardup/corpus.hpp"

namespace neardup {

std::string csv_escape(std::string_view field);

void write_versions_csv(const std::string& path, const CorpusResult& result);
void write_categories_csv(const std::string& path, const DedupStats& stats);
void write_exclusions_csv(const std::string& path, const IngestResult& ingest);
void write_crosstab_csv(const std::string& path, const DedupStats& stats);
void write_clusters_csv(const std::string& path, const ClusterStats& raw,
                        const ClusterStats& templated);
void write_timings_csv(const std::string& path, const CorpusResult& result);

void write_summary_text(const std::string& path, const DedupStats& stats,
                        const ClusterStats& raw_clusters,
                        const ClusterStats& template_clusters);

// JSON manifest with the run settings and a sha256 of each listed output
// file (path -> stored under its basename). Deterministic by construction;
// callers leave the timings file out of the list.
void write_run_manifest(const std::string& path,
                        const std::map<std::string, std::string>& settings,
                        const DedupStats& stats,
                        const std::vector<std::string>& output_files);

}  // namespace neardup
