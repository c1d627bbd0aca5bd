#pragma once

// Corpus analyzers that sit next to the template pipeline: scanning markup
// for bitcoin addresses a visitor never sees, summarizing page-title churn,
// and relating how often sites change to how long they live.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "neardup/corpus.hpp"

namespace neardup {

enum class BtcScheme { Base58, Bech32, Bech32m };
enum class BtcLocation { Hyperlink, EmbeddedImage, ScriptText, OtherAttribute };

const char* btc_scheme_name(BtcScheme scheme);
const char* btc_location_name(BtcLocation location);

struct AddressCheck {
  bool valid = false;
  std::string reason;  // empty when valid
};

// Legacy base58check: 25..34 chars starting with 1 or 3, decoding to
// exactly 25 bytes with version byte 0x00/0x05 and a double-sha256 checksum.
AddressCheck validate_base58(std::string_view address);

// Segwit bech32 (BIP-173) / bech32m (BIP-350) for the bc hrp. On success
// scheme and witness_version describe the decoded address.
struct Bech32Check {
  bool valid = false;
  std::string reason;
  BtcScheme scheme = BtcScheme::Bech32;
  int witness_version = -1;
};
Bech32Check validate_bech32(std::string_view address);

// Version-3 onion service hostname label: 56 base32 chars ending in d.
bool validate_onion_v3(std::string_view label);

struct BitcoinFinding {
  std::string address;
  BtcScheme scheme = BtcScheme::Base58;
  BtcLocation location = BtcLocation::OtherAttribute;
  bool valid = false;
  std::string reason;
  std::string site_id;
  int version = -1;
};

// Address-shaped strings in places a visitor does not read: hyperlink
// targets, image sources, script bodies, and other attribute values.
// Candidates failing validation are reported with the reason.
std::vector<BitcoinFinding> scan_html_for_bitcoin(std::string_view html);

// Scans the oldest version of each site, or every version when
// all_versions is set. Findings are deduplicated per
// (site, version, location, address).
std::vector<BitcoinFinding> scan_hidden_bitcoin(
    const std::vector<SiteHistory>& sites, bool all_versions = false);

struct TitleGroup {
  std::string title;
  size_t count = 0;  // consecutive versions sharing the title
};

// Run-length groups of consecutive equal titles.
std::vector<TitleGroup> title_runs(const std::vector<std::string>& titles);

struct DisruptionPattern {
  std::string name;
  std::string pattern;  // case-insensitive regex, searched in the title
};

// Hosting-disruption signatures: monitoring dashboards, unavailability
// notices, fresh web-server installs, and error titles.
std::vector<DisruptionPattern> default_disruption_patterns();
std::vector<DisruptionPattern> load_disruption_patterns(const std::string& path);

struct SiteTitleSummary {
  std::string site_id;
  std::vector<TitleGroup> runs;
  std::set<std::string> disruptions;  // pattern names seen in any title
};

struct TitleStats {
  std::vector<SiteTitleSummary> sites;
  std::map<std::string, size_t> sites_per_disruption;
  std::map<std::string, size_t> title_version_counts;  // title -> versions
  size_t sites_with_title_changes = 0;
};

TitleStats analyze_titles(const std::vector<SiteHistory>& sites,
                          const std::vector<DisruptionPattern>& patterns);

// Ordinary least squares y = slope * x + intercept with R^2 and adjusted
// R^2. Throws std::invalid_argument when sizes mismatch, n < 3, or x has
// zero variance.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  size_t n = 0;
};

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

struct SiteDynamics {
  std::string site_id;
  size_t day_versions = 0;   // first observation per UTC day
  size_t changed_pairs = 0;  // consecutive day-versions with different bytes
  // Mean day gap between the first-seen days of consecutive distinct
  // versions. A page rewritten every day scores 1.0; one that keeps each
  // revision for a week scores ~7 even though the crawler looks daily.
  double change_interval_days = 0.0;
  double lifespan_days = 0.0;         // last day - first day
};

struct DynamicsStats {
  std::vector<SiteDynamics> sites;  // sites with >= 2 day-versions
  size_t excluded_sites = 0;        // fewer than 2 day-distinct observations
  // Day-bucket histograms: <=1, (1,7], (7,30], (30,120], >120. Intervals
  // count sites with at least one changed pair; lifespans count all
  // reported sites. Fractions are each histogram over its own total, so a
  // populated row sums to 1.
  std::array<size_t, 5> interval_buckets{};
  std::array<size_t, 5> lifespan_buckets{};
  std::array<double, 5> interval_fractions{};
  std::array<double, 5> lifespan_fractions{};
  size_t never_changed = 0;  // >= 2 day-versions but no differing pair
  LinearFit fit;             // log(lifespan) over change interval
  bool fit_valid = false;
};

DynamicsStats change_dynamics(const std::vector<SiteHistory>& sites);

}  // namespace neardup
