#include "neardup/analyzers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>

#include "json.hpp"

#include "html_scan.hpp"
#include "neardup/sha256.hpp"

namespace neardup {

namespace {

namespace hs = htmlscan;

// ---- base58check ----

constexpr std::string_view kBase58Chars =
    "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

int base58_value(char c) {
  const size_t pos = kBase58Chars.find(c);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

bool is_base58(char c) { return base58_value(c) >= 0; }

}  // namespace

const char* btc_scheme_name(BtcScheme scheme) {
  switch (scheme) {
    case BtcScheme::Base58: return "base58";
    case BtcScheme::Bech32: return "bech32";
    case BtcScheme::Bech32m: return "bech32m";
  }
  return "?";
}

const char* btc_location_name(BtcLocation location) {
  switch (location) {
    case BtcLocation::Hyperlink: return "hyperlink";
    case BtcLocation::EmbeddedImage: return "embedded-image";
    case BtcLocation::ScriptText: return "script-text";
    case BtcLocation::OtherAttribute: return "other-attribute";
  }
  return "?";
}

AddressCheck validate_base58(std::string_view address) {
  if (address.size() < 25 || address.size() > 34)
    return {false,
            "length " + std::to_string(address.size()) + " out of range 25-34"};
  if (address[0] != '1' && address[0] != '3')
    return {false, "does not start with 1 or 3"};

  // Base58 big-integer decode, little-endian accumulator.
  std::vector<uint8_t> num;
  size_t leading_ones = 0;
  bool counting = true;
  for (char c : address) {
    const int v = base58_value(c);
    if (v < 0) return {false, std::string("invalid character '") + c + "'"};
    if (counting && c == '1') {
      ++leading_ones;
    } else {
      counting = false;
    }
    uint32_t carry = static_cast<uint32_t>(v);
    for (auto& byte : num) {
      const uint32_t x = byte * 58u + carry;
      byte = static_cast<uint8_t>(x & 0xff);
      carry = x >> 8;
    }
    while (carry) {
      num.push_back(static_cast<uint8_t>(carry & 0xff));
      carry >>= 8;
    }
  }

  std::vector<uint8_t> bytes(leading_ones, 0);
  bytes.insert(bytes.end(), num.rbegin(), num.rend());
  if (bytes.size() != 25)
    return {false,
            "decodes to " + std::to_string(bytes.size()) + " bytes, expected 25"};
  if (bytes[0] != 0x00 && bytes[0] != 0x05)
    return {false, "unexpected version byte"};

  const std::string_view payload(reinterpret_cast<const char*>(bytes.data()), 21);
  const Sha256 first = sha256(payload);
  const Sha256 second =
      sha256(std::string_view(reinterpret_cast<const char*>(first.data()), 32));
  for (int i = 0; i < 4; ++i)
    if (second[i] != bytes[21 + i]) return {false, "checksum mismatch"};
  return {true, {}};
}

// ---- bech32 / bech32m ----

namespace {

constexpr std::string_view kBech32Chars = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";
constexpr uint32_t kBech32mConst = 0x2bc830a3;

int bech32_value(char c) {
  const size_t pos = kBech32Chars.find(c);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

uint32_t bech32_polymod(const std::vector<int>& values) {
  static constexpr uint32_t gen[] = {0x3b6a57b2, 0x26508e6d, 0x1ea119fa,
                                     0x3d4233dd, 0x2a1462b3};
  uint32_t chk = 1;
  for (int v : values) {
    const uint32_t b = chk >> 25;
    chk = ((chk & 0x1ffffff) << 5) ^ static_cast<uint32_t>(v);
    for (int i = 0; i < 5; ++i)
      if ((b >> i) & 1) chk ^= gen[i];
  }
  return chk;
}

std::vector<int> hrp_expand(std::string_view hrp) {
  std::vector<int> out;
  for (char c : hrp) out.push_back(c >> 5);
  out.push_back(0);
  for (char c : hrp) out.push_back(c & 31);
  return out;
}

// Strict 5-to-8 bit regrouping: incomplete groups must be shorter than five
// bits and zero-filled, per the segwit address rules.
bool convert_5_to_8(const std::vector<int>& data, std::vector<uint8_t>& out) {
  uint32_t acc = 0;
  int bits = 0;
  for (int v : data) {
    acc = (acc << 5) | static_cast<uint32_t>(v);
    bits += 5;
    while (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<uint8_t>((acc >> bits) & 0xff));
    }
  }
  if (bits >= 5) return false;
  if ((acc << (8 - bits)) & 0xff) return false;
  return true;
}

}  // namespace

Bech32Check validate_bech32(std::string_view address) {
  Bech32Check out;
  if (address.size() < 10) {
    out.reason = "too short";
    return out;
  }
  if (address.size() > 90) {
    out.reason = "longer than 90 characters";
    return out;
  }
  bool has_lower = false, has_upper = false;
  for (char c : address) {
    if (std::islower(static_cast<unsigned char>(c))) has_lower = true;
    if (std::isupper(static_cast<unsigned char>(c))) has_upper = true;
  }
  if (has_lower && has_upper) {
    out.reason = "mixed case";
    return out;
  }
  std::string lower = hs::to_lower(address);
  if (lower.compare(0, 3, "bc1") != 0) {
    out.reason = "missing bc1 prefix";
    return out;
  }

  std::vector<int> data;
  for (size_t i = 3; i < lower.size(); ++i) {
    const int v = bech32_value(lower[i]);
    if (v < 0) {
      out.reason = std::string("invalid data character '") + lower[i] + "'";
      return out;
    }
    data.push_back(v);
  }
  if (data.size() < 7) {  // witness version plus six checksum characters
    out.reason = "data part too short";
    return out;
  }

  std::vector<int> values = hrp_expand("bc");
  values.insert(values.end(), data.begin(), data.end());
  const uint32_t pm = bech32_polymod(values);
  BtcScheme scheme;
  if (pm == 1) {
    scheme = BtcScheme::Bech32;
  } else if (pm == kBech32mConst) {
    scheme = BtcScheme::Bech32m;
  } else {
    out.reason = "checksum mismatch";
    return out;
  }

  const int version = data[0];
  if (version > 16) {
    out.reason = "invalid witness version";
    return out;
  }
  std::vector<uint8_t> program;
  const std::vector<int> payload(data.begin() + 1, data.end() - 6);
  if (!convert_5_to_8(payload, program)) {
    out.reason = "invalid bit padding";
    return out;
  }
  if (program.size() < 2 || program.size() > 40) {
    out.reason = "witness program length " + std::to_string(program.size()) +
                 " out of range";
    return out;
  }
  if (version == 0) {
    if (scheme != BtcScheme::Bech32) {
      out.reason = "bech32m checksum on a version 0 program";
      return out;
    }
    if (program.size() != 20 && program.size() != 32) {
      out.reason = "version 0 program must be 20 or 32 bytes";
      return out;
    }
  } else if (scheme != BtcScheme::Bech32m) {
    out.reason = "bech32 checksum on a version 1+ program";
    return out;
  }

  out.valid = true;
  out.scheme = scheme;
  out.witness_version = version;
  return out;
}

bool validate_onion_v3(std::string_view label) {
  if (label.size() != 56) return false;
  for (char c : label)
    if (!((c >= 'a' && c <= 'z') || (c >= '2' && c <= '7'))) return false;
  return label.back() == 'd';
}

// ---- HTML scanning ----

namespace {

void scan_text_for_addresses(std::string_view text, BtcLocation location,
                             std::vector<BitcoinFinding>& out) {
  // Legacy candidates: maximal base58 runs starting with 1 or 3 and long
  // enough to plausibly be an address. Longer runs still surface, flagged
  // with the length reason.
  size_t i = 0;
  while (i < text.size()) {
    if (!is_base58(text[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && is_base58(text[j])) ++j;
    const std::string_view run = text.substr(i, j - i);
    if ((run[0] == '1' || run[0] == '3') && run.size() >= 25) {
      const AddressCheck check = validate_base58(run);
      out.push_back({std::string(run), BtcScheme::Base58, location,
                     check.valid, check.reason, {}, -1});
    }
    i = j;
  }

  // Segwit candidates: a bc1 prefix followed by charset characters; trailing
  // garbage is common inside URLs, so every plausible cut is tried longest
  // first and the first one that validates wins.
  size_t pos = 0;
  while ((pos = hs::ifind(text, "bc1", pos)) != std::string_view::npos) {
    size_t j = pos + 3;
    while (j < text.size() &&
           bech32_value(static_cast<char>(std::tolower(
               static_cast<unsigned char>(text[j])))) >= 0)
      ++j;
    const size_t full_len = std::min<size_t>(j - pos, 90);
    if (full_len < 10) {
      pos = j;
      continue;
    }
    bool reported = false;
    for (size_t len = full_len; len >= 10; --len) {
      const std::string_view candidate = text.substr(pos, len);
      const Bech32Check check = validate_bech32(candidate);
      if (check.valid) {
        out.push_back({std::string(candidate), check.scheme, location, true,
                       {}, {}, -1});
        reported = true;
        break;
      }
    }
    if (!reported) {
      const std::string_view candidate = text.substr(pos, full_len);
      const Bech32Check check = validate_bech32(candidate);
      out.push_back({std::string(candidate), check.scheme, location, false,
                     check.reason, {}, -1});
    }
    pos = j;
  }
}

}  // namespace

std::vector<BitcoinFinding> scan_html_for_bitcoin(std::string_view html) {
  std::vector<BitcoinFinding> out;
  hs::walk(html, [&out](const hs::Tag& tag) {
    if (tag.closing) return;
    if (tag.name == "script" && !tag.body.empty())
      scan_text_for_addresses(tag.body, BtcLocation::ScriptText, out);
    for (const auto& [name, value] : tag.attrs) {
      if (value.empty()) continue;
      BtcLocation location = BtcLocation::OtherAttribute;
      if (tag.name == "a" && name == "href")
        location = BtcLocation::Hyperlink;
      else if (tag.name == "img" && name == "src")
        location = BtcLocation::EmbeddedImage;
      scan_text_for_addresses(value, location, out);
    }
  });
  return out;
}

std::vector<BitcoinFinding> scan_hidden_bitcoin(
    const std::vector<SiteHistory>& sites, bool all_versions) {
  std::vector<BitcoinFinding> out;
  std::set<std::tuple<std::string, int, std::string, std::string>> seen;
  for (const auto& site : sites) {
    const size_t last = all_versions ? site.versions.size() : 1;
    for (size_t v = 0; v < last && v < site.versions.size(); ++v) {
      for (auto finding : scan_html_for_bitcoin(site.versions[v].html)) {
        finding.site_id = site.site_id;
        finding.version = static_cast<int>(v);
        const auto key =
            std::make_tuple(finding.site_id, finding.version,
                            std::string(btc_location_name(finding.location)),
                            finding.address);
        if (seen.insert(key).second) out.push_back(std::move(finding));
      }
    }
  }
  return out;
}

// ---- titles ----

std::vector<TitleGroup> title_runs(const std::vector<std::string>& titles) {
  std::vector<TitleGroup> out;
  for (const auto& t : titles) {
    if (!out.empty() && out.back().title == t)
      ++out.back().count;
    else
      out.push_back({t, 1});
  }
  return out;
}

std::vector<DisruptionPattern> default_disruption_patterns() {
  return {
      {"monitoring", "Alertmanager|Node Exporter"},
      {"unavailable", "404 Not Found|Down for maintenance"},
      {"fresh-install", "Welcome to nginx|Apache2 Ubuntu Default Page"},
      {"error-page", "^\\s*error\\b"},
  };
}

std::vector<DisruptionPattern> load_disruption_patterns(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw std::runtime_error(path + ": expected a JSON array");
  std::vector<DisruptionPattern> out;
  for (const auto& entry : j) {
    if (!entry.is_object() || !entry.contains("name") ||
        !entry.contains("pattern") || !entry["name"].is_string() ||
        !entry["pattern"].is_string())
      throw std::runtime_error(path + ": entries need name and pattern strings");
    out.push_back({entry["name"].get<std::string>(),
                   entry["pattern"].get<std::string>()});
  }
  return out;
}

TitleStats analyze_titles(const std::vector<SiteHistory>& sites,
                          const std::vector<DisruptionPattern>& patterns) {
  std::vector<std::pair<std::string, std::regex>> compiled;
  compiled.reserve(patterns.size());
  for (const auto& p : patterns) {
    try {
      compiled.emplace_back(
          p.name, std::regex(p.pattern, std::regex::ECMAScript |
                                            std::regex::icase |
                                            std::regex::optimize));
    } catch (const std::regex_error& e) {
      throw std::runtime_error("disruption pattern '" + p.name +
                               "': " + e.what());
    }
  }

  TitleStats stats;
  for (const auto& site : sites) {
    SiteTitleSummary summary;
    summary.site_id = site.site_id;
    std::vector<std::string> titles;
    titles.reserve(site.versions.size());
    for (const auto& v : site.versions)
      titles.push_back(extract_title(v.html));
    summary.runs = title_runs(titles);

    for (const auto& run : summary.runs) {
      stats.title_version_counts[run.title] += run.count;
      for (const auto& [name, rx] : compiled)
        if (std::regex_search(run.title, rx)) summary.disruptions.insert(name);
    }
    if (summary.runs.size() > 1) ++stats.sites_with_title_changes;
    for (const auto& name : summary.disruptions)
      ++stats.sites_per_disruption[name];
    stats.sites.push_back(std::move(summary));
  }
  return stats;
}

// ---- change dynamics ----

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("fit_line: size mismatch");
  const size_t n = xs.size();
  if (n < 3) throw std::invalid_argument("fit_line: need at least 3 points");

  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: x has zero variance");

  LinearFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r2 = 1.0;  // constant y, zero residuals
  } else {
    double ss_res = 0;
    for (size_t i = 0; i < n; ++i) {
      const double e = ys[i] - (fit.slope * xs[i] + fit.intercept);
      ss_res += e * e;
    }
    fit.r2 = 1.0 - ss_res / syy;
  }
  fit.adjusted_r2 =
      1.0 - (1.0 - fit.r2) * (static_cast<double>(n) - 1.0) /
                (static_cast<double>(n) - 2.0);
  return fit;
}

namespace {

int64_t floor_day(int64_t epoch_seconds) {
  const int64_t day = epoch_seconds / 86400;
  return (epoch_seconds % 86400 < 0) ? day - 1 : day;
}

size_t day_bucket(double days) {
  if (days <= 1.0) return 0;
  if (days <= 7.0) return 1;
  if (days <= 30.0) return 2;
  if (days <= 120.0) return 3;
  return 4;
}

}  // namespace

DynamicsStats change_dynamics(const std::vector<SiteHistory>& sites) {
  DynamicsStats stats;
  std::vector<double> xs, ys;

  for (const auto& site : sites) {
    // First observation per UTC day; versions are already time-ordered.
    std::vector<std::pair<int64_t, const std::string*>> days;
    for (const auto& v : site.versions) {
      const int64_t day = floor_day(v.fetched_at);
      if (days.empty() || days.back().first != day)
        days.emplace_back(day, &v.html);
    }
    if (days.size() < 2) {
      ++stats.excluded_sites;
      continue;
    }

    SiteDynamics dyn;
    dyn.site_id = site.site_id;
    dyn.day_versions = days.size();
    dyn.lifespan_days =
        static_cast<double>(days.back().first - days.front().first);

    // Each distinct version is pinned to the day it first appeared; the
    // interval averages the gaps between those days, not between the raw
    // observations (a daily crawl would otherwise flatten every changing
    // site to an interval of exactly one day).
    int64_t gap_sum = 0;
    int64_t run_start = days.front().first;
    for (size_t i = 1; i < days.size(); ++i) {
      if (*days[i].second != *days[i - 1].second) {
        gap_sum += days[i].first - run_start;
        run_start = days[i].first;
        ++dyn.changed_pairs;
      }
    }
    if (dyn.changed_pairs > 0) {
      dyn.change_interval_days = static_cast<double>(gap_sum) /
                                 static_cast<double>(dyn.changed_pairs);
      ++stats.interval_buckets[day_bucket(dyn.change_interval_days)];
      if (dyn.lifespan_days > 0.0) {
        xs.push_back(dyn.change_interval_days);
        ys.push_back(std::log(dyn.lifespan_days));
      }
    } else {
      ++stats.never_changed;
    }
    ++stats.lifespan_buckets[day_bucket(dyn.lifespan_days)];
    stats.sites.push_back(std::move(dyn));
  }

  size_t interval_total = 0, lifespan_total = 0;
  for (size_t i = 0; i < 5; ++i) {
    interval_total += stats.interval_buckets[i];
    lifespan_total += stats.lifespan_buckets[i];
  }
  for (size_t i = 0; i < 5; ++i) {
    if (interval_total > 0)
      stats.interval_fractions[i] =
          static_cast<double>(stats.interval_buckets[i]) /
          static_cast<double>(interval_total);
    if (lifespan_total > 0)
      stats.lifespan_fractions[i] =
          static_cast<double>(stats.lifespan_buckets[i]) /
          static_cast<double>(lifespan_total);
  }

  try {
    stats.fit = fit_line(xs, ys);
    stats.fit_valid = true;
  } catch (const std::invalid_argument&) {
    stats.fit_valid = false;
  }
  return stats;
}

}  // namespace neardup
