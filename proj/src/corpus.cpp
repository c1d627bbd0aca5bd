#include "neardup/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "html_scan.hpp"

namespace neardup {

namespace {

namespace hs = htmlscan;
using nlohmann::json;

bool is_blank(std::string_view s) {
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform [0, 100) draw keyed by site id; stable across runs and platforms.
double sample_draw(uint64_t seed, std::string_view site_id) {
  uint64_t x = splitmix64(fnv1a64(site_id) ^ splitmix64(seed));
  return static_cast<double>(x >> 11) * (100.0 / 9007199254740992.0);
}

// Civil-date helpers (Howard Hinnant's algorithms, days since 1970-01-01).
int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool parse_uint(std::string_view s, size_t pos, size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

unsigned days_in_month(int y, unsigned m) {
  static const unsigned dim[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap ? 29 : 28;
  }
  return dim[m - 1];
}

}  // namespace

std::optional<int64_t> parse_iso8601(std::string_view text) {
  size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  std::string_view s = text.substr(b, e - b);

  int year, month, day;
  if (!parse_uint(s, 0, 4, year) || s.size() < 10 || s[4] != '-' ||
      !parse_uint(s, 5, 2, month) || s[7] != '-' || !parse_uint(s, 8, 2, day))
    return std::nullopt;
  if (month < 1 || month > 12 || day < 1 ||
      day > static_cast<int>(days_in_month(year, month)))
    return std::nullopt;

  size_t i = 10;
  int hour = 0, minute = 0, second = 0;
  if (i < s.size() && (s[i] == 'T' || s[i] == ' ' || s[i] == 't')) {
    ++i;
    // HH:MM:SS, with '-' accepted as the separator (filename form).
    if (!parse_uint(s, i, 2, hour) || i + 8 > s.size()) return std::nullopt;
    const char sep = s[i + 2];
    if ((sep != ':' && sep != '-') || s[i + 5] != sep) return std::nullopt;
    if (!parse_uint(s, i + 3, 2, minute) || !parse_uint(s, i + 6, 2, second))
      return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    i += 8;
  }

  int64_t offset = 0;
  if (i < s.size()) {
    if (s[i] == 'Z' || s[i] == 'z') {
      ++i;
    } else if (s[i] == '+' || s[i] == '-') {
      const int sign = s[i] == '+' ? 1 : -1;
      int oh, om;
      ++i;
      if (!parse_uint(s, i, 2, oh)) return std::nullopt;
      i += 2;
      if (i < s.size() && s[i] == ':') ++i;
      if (!parse_uint(s, i, 2, om)) return std::nullopt;
      i += 2;
      if (oh > 23 || om > 59) return std::nullopt;
      offset = sign * (oh * 3600 + om * 60);
    }
  }
  if (i != s.size()) return std::nullopt;

  const int64_t days = days_from_civil(year, month, day);
  return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::string format_iso8601(int64_t epoch_seconds) {
  int64_t days = epoch_seconds / 86400;
  int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

RedirectKind detect_redirect(std::string_view html, size_t max_visible_chars) {
  bool meta_refresh = false;
  bool script_rewrites = false;
  hs::walk(html, [&](const hs::Tag& tag) {
    if (tag.closing) return;
    if (tag.name == "meta") {
      const std::string equiv = hs::to_lower(hs::attr(tag, "http-equiv"));
      if (equiv == "refresh" &&
          hs::ifind(hs::attr(tag, "content"), "url=") != std::string_view::npos)
        meta_refresh = true;
    } else if (tag.name == "script") {
      if (hs::ifind(tag.body, "location.replace") != std::string_view::npos ||
          hs::ifind(tag.body, "location.href") != std::string_view::npos ||
          hs::ifind(tag.body, "window.location") != std::string_view::npos)
        script_rewrites = true;
    }
  });
  if (meta_refresh && hs::visible_text(html).size() <= max_visible_chars)
    return RedirectKind::MetaRefresh;
  if (script_rewrites) {
    for (const std::string& text : hs::anchor_texts(html))
      if (hs::ifind(text, "wait a second") != std::string_view::npos)
        return RedirectKind::ScriptRefresh;
  }
  return RedirectKind::None;
}

std::string extract_title(std::string_view html) { return hs::title_text(html); }

bool has_script_tag(std::string_view html) {
  bool found = false;
  hs::walk(html, [&](const hs::Tag& tag) {
    if (!tag.closing && tag.name == "script") found = true;
  });
  return found;
}

std::vector<SiteHistory> group_versions(std::vector<PageVersion> records) {
  std::map<std::string, std::vector<PageVersion>> by_site;
  for (auto& r : records) by_site[r.site_id].push_back(std::move(r));
  std::vector<SiteHistory> out;
  out.reserve(by_site.size());
  for (auto& [site_id, versions] : by_site) {
    std::stable_sort(versions.begin(), versions.end(),
                     [](const PageVersion& a, const PageVersion& b) {
                       if (a.fetched_at != b.fetched_at)
                         return a.fetched_at < b.fetched_at;
                       return a.fetched_iso < b.fetched_iso;
                     });
    SiteHistory site;
    site.site_id = site_id;
    for (const auto& v : versions) site.tags.insert(v.tags.begin(), v.tags.end());
    site.versions = std::move(versions);
    out.push_back(std::move(site));
  }
  return out;
}

IngestResult ingest(std::vector<PageVersion> records, const IngestConfig& config) {
  IngestResult out;
  out.input_versions = records.size();

  std::map<std::string, std::vector<PageVersion>> by_site;
  for (auto& r : records) by_site[r.site_id].push_back(std::move(r));
  records.clear();

  const auto drop_version = [&out](char crit, const PageVersion& v,
                                   std::string detail) {
    out.exclusions.push_back(
        {crit, v.site_id, v.fetched_iso, 1, std::move(detail)});
    out.dropped_versions[crit] += 1;
  };

  for (auto& [site_id, versions] : by_site) {
    std::stable_sort(versions.begin(), versions.end(),
                     [](const PageVersion& a, const PageVersion& b) {
                       if (a.fetched_at != b.fetched_at)
                         return a.fetched_at < b.fetched_at;
                       return a.fetched_iso < b.fetched_iso;
                     });

    std::set<std::string> site_tags;
    for (const auto& v : versions)
      site_tags.insert(v.tags.begin(), v.tags.end());

    std::vector<PageVersion> kept;
    kept.reserve(versions.size());
    for (auto& v : versions) {
      if (is_blank(v.html)) {
        drop_version('a', v, "blank page");
        continue;
      }
      bool proxy = false;
      for (const auto& sig : config.proxy_signatures) {
        if (hs::ifind(v.html, sig) != std::string_view::npos) {
          drop_version('b', v, "proxy signature: " + sig);
          proxy = true;
          break;
        }
      }
      if (proxy) continue;
      kept.push_back(std::move(v));
    }

    if (kept.empty()) continue;

    if (config.sample_pct < 100.0 &&
        sample_draw(config.seed, site_id) >= config.sample_pct) {
      out.exclusions.push_back(
          {'c', site_id, "", kept.size(), "site sampled out"});
      out.dropped_versions['c'] += kept.size();
      continue;
    }

    bool blocked = false;
    for (const auto& t : config.blocked_tags)
      if (site_tags.count(t)) blocked = true;

    std::vector<PageVersion> filtered;
    filtered.reserve(kept.size());
    for (auto& v : kept) {
      if (blocked && v.has_embedded_images) {
        drop_version('d', v, "blocked tag with embedded images");
        continue;
      }
      const RedirectKind redirect = detect_redirect(v.html);
      if (redirect != RedirectKind::None) {
        drop_version('e', v,
                     redirect == RedirectKind::MetaRefresh ? "meta refresh"
                                                           : "script refresh");
        continue;
      }
      if (!filtered.empty() && filtered.back().html == v.html) {
        drop_version('u', v, "consecutive duplicate");
        continue;
      }
      filtered.push_back(std::move(v));
    }

    if (filtered.size() < config.min_versions) {
      if (!filtered.empty()) {
        out.exclusions.push_back({'f', site_id, "", filtered.size(),
                                  "fewer than " +
                                      std::to_string(config.min_versions) +
                                      " versions"});
        out.dropped_versions['f'] += filtered.size();
      }
      continue;
    }
    if (filtered.size() > config.max_versions) {
      const size_t extra = filtered.size() - config.max_versions;
      out.exclusions.push_back(
          {'g', site_id, "", extra,
           "over the " + std::to_string(config.max_versions) + " version cap"});
      out.dropped_versions['g'] += extra;
      filtered.resize(config.max_versions);
    }

    SiteHistory site;
    site.site_id = site_id;
    for (const auto& v : filtered)
      site.tags.insert(v.tags.begin(), v.tags.end());
    site.versions = std::move(filtered);
    out.kept_versions += site.versions.size();
    out.sites.push_back(std::move(site));
  }
  return out;
}

namespace {

bool detect_embedded_images(std::string_view html) {
  return hs::ifind(html, "data:image/") != std::string_view::npos;
}

// Shared record validation for both readers.
std::optional<PageVersion> version_from_json(const json& j, std::string& err) {
  PageVersion v;
  if (!j.is_object()) {
    err = "not a JSON object";
    return std::nullopt;
  }
  const auto site = j.find("site_id");
  if (site == j.end() || !site->is_string() ||
      site->get<std::string>().empty()) {
    err = "missing or invalid site_id";
    return std::nullopt;
  }
  v.site_id = site->get<std::string>();
  const auto html = j.find("html");
  if (html == j.end() || !html->is_string()) {
    err = "missing or invalid html";
    return std::nullopt;
  }
  v.html = html->get<std::string>();
  const auto ts = j.find("fetched_at");
  if (ts == j.end()) {
    err = "missing fetched_at";
    return std::nullopt;
  }
  if (ts->is_string()) {
    const auto parsed = parse_iso8601(ts->get<std::string>());
    if (!parsed) {
      err = "unparseable fetched_at";
      return std::nullopt;
    }
    v.fetched_at = *parsed;
    v.fetched_iso = ts->get<std::string>();
  } else if (ts->is_number_integer()) {
    v.fetched_at = ts->get<int64_t>();
    v.fetched_iso = format_iso8601(v.fetched_at);
  } else {
    err = "fetched_at must be an ISO string or epoch seconds";
    return std::nullopt;
  }
  if (const auto tags = j.find("tags"); tags != j.end()) {
    if (!tags->is_array()) {
      err = "tags must be an array of strings";
      return std::nullopt;
    }
    for (const auto& t : *tags) {
      if (!t.is_string()) {
        err = "tags must be an array of strings";
        return std::nullopt;
      }
      v.tags.push_back(t.get<std::string>());
    }
  }
  if (const auto img = j.find("has_embedded_images"); img != j.end()) {
    if (!img->is_boolean()) {
      err = "has_embedded_images must be a boolean";
      return std::nullopt;
    }
    v.has_embedded_images = img->get<bool>();
  } else {
    v.has_embedded_images = detect_embedded_images(v.html);
  }
  return v;
}

}  // namespace

ReadResult read_corpus_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  ReadResult out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      ++out.malformed;
      out.warnings.push_back(path + ":" + std::to_string(lineno) +
                             ": invalid JSON");
      continue;
    }
    std::string err;
    auto v = version_from_json(j, err);
    if (!v) {
      ++out.malformed;
      out.warnings.push_back(path + ":" + std::to_string(lineno) + ": " + err);
      continue;
    }
    out.records.push_back(std::move(*v));
  }
  return out;
}

ReadResult read_corpus_dir(const std::string& root) {
  namespace fs = std::filesystem;
  ReadResult out;
  if (!fs::is_directory(root))
    throw std::runtime_error(root + " is not a directory");

  std::vector<fs::path> site_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) site_dirs.push_back(entry.path());
  std::sort(site_dirs.begin(), site_dirs.end());

  for (const auto& dir : site_dirs) {
    const std::string site_id = dir.filename().string();
    std::vector<std::string> tags;
    const fs::path meta = dir / "meta.json";
    if (fs::exists(meta)) {
      std::ifstream in(meta, std::ios::binary);
      json j = json::parse(in, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        ++out.malformed;
        out.warnings.push_back(meta.string() + ": invalid JSON");
      } else if (const auto t = j.find("tags");
                 t != j.end() && t->is_array()) {
        for (const auto& tag : *t)
          if (tag.is_string()) tags.push_back(tag.get<std::string>());
      }
    }

    std::vector<fs::path> pages;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".html")
        pages.push_back(entry.path());
    std::sort(pages.begin(), pages.end());

    for (const auto& page : pages) {
      const std::string stem = page.stem().string();
      const auto ts = parse_iso8601(stem);
      if (!ts) {
        ++out.malformed;
        out.warnings.push_back(page.string() +
                               ": filename is not a timestamp");
        continue;
      }
      PageVersion v;
      v.site_id = site_id;
      v.fetched_at = *ts;
      v.fetched_iso = stem;
      v.tags = tags;
      std::ifstream in(page, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      v.html = buf.str();
      v.has_embedded_images = detect_embedded_images(v.html);
      out.records.push_back(std::move(v));
    }
  }
  return out;
}

void write_corpus_jsonl(const std::string& path,
                        const std::vector<SiteHistory>& sites) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& site : sites) {
    for (const auto& v : site.versions) {
      json j;
      j["site_id"] = v.site_id;
      j["fetched_at"] =
          v.fetched_iso.empty() ? format_iso8601(v.fetched_at) : v.fetched_iso;
      j["html"] = v.html;
      j["tags"] = v.tags;
      j["has_embedded_images"] = v.has_embedded_images;
      out << j.dump() << '\n';
    }
  }
}

SiteProcessResult process_site(const SiteHistory& site,
                               const ProcessConfig& config,
                               const RuleSet& rules) {
  SiteProcessResult r;
  r.site_id = site.site_id;
  r.tags = site.tags;

  const size_t n = site.versions.size();
  std::vector<TokenStream> tokens(n);
  std::vector<bool> scripted(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& v = site.versions[i];
    r.fetched_iso.push_back(
        v.fetched_iso.empty() ? format_iso8601(v.fetched_at) : v.fetched_iso);
    r.raw_digests.push_back(content_digest(v.html).hex());
    tokens[i] = tokenize(v.html);
    scripted[i] = has_script_tag(v.html);
  }
  if (n == 0) return r;
  if (n == 1) {
    r.template_digests.push_back(r.raw_digests[0]);
    r.templates.push_back(site.versions[0].html);
    return r;
  }

  std::vector<AlignedScript> scripts;
  scripts.reserve(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    EditScript es = token_diff(tokens[i], tokens[i + 1], config.diff_budget);
    es.old_id = static_cast<int>(i);
    es.new_id = static_cast<int>(i + 1);
    scripts.push_back(std::move(es));
  }

  try {
    for (const auto& [b, e] :
         chunk_bounds(scripts.size(), config.align.chunk_size)) {
      std::vector<AlignedScript> slice(scripts.begin() + b, scripts.begin() + e);
      auto aligned = align_chunk(std::move(slice), config.align);
      std::move(aligned.begin(), aligned.end(), scripts.begin() + b);
    }
  } catch (const ChainMismatchError& ex) {
    r.error = ex.what();  // processed unaligned below
  }

  std::vector<AnnotatedTemplate> old_side(scripts.size());
  std::vector<AnnotatedTemplate> new_side(scripts.size());
  for (size_t i = 0; i < scripts.size(); ++i) {
    auto [old_tpl, new_tpl] = build_templates(scripts[i], rules);

    ScriptStats st;
    st.old_index = scripts[i].old_id;
    st.new_index = scripts[i].new_id;
    st.diff_millis =
        static_cast<double>(scripts[i].elapsed.count()) / 1000.0;
    st.budget_exhausted = scripts[i].budget_exhausted;
    st.scripting = scripted[i] || scripted[i + 1];
    st.units = old_tpl.trace.size();
    for (const auto& entry : old_tpl.trace)
      if (entry.pseudo) ++st.pseudo_units;
    st.failed_units = static_cast<size_t>(old_tpl.failures);
    st.annotated_units = st.units - st.failed_units;
    r.scripts.push_back(st);

    for (const auto& [word, count] : old_tpl.category_counts)
      r.category_counts[word] += count;
    if (config.keep_traces)
      r.trace.insert(r.trace.end(), old_tpl.trace.begin(), old_tpl.trace.end());

    old_side[i] = std::move(old_tpl);
    new_side[i] = std::move(new_tpl);
  }

  r.templates.push_back(old_side[0].display);
  r.template_digests.push_back(template_hash(old_side[0]).hex());
  for (size_t i = 0; i < scripts.size(); ++i) {
    r.templates.push_back(new_side[i].display);
    r.template_digests.push_back(template_hash(new_side[i]).hex());
  }
  return r;
}

CorpusResult process_corpus(const std::vector<SiteHistory>& sites,
                            const ProcessConfig& config, const RuleSet& rules) {
  CorpusResult result;
  result.sites.resize(sites.size());

  unsigned jobs = config.jobs;
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(
      std::min<size_t>(jobs, std::max<size_t>(sites.size(), 1)));

  if (jobs <= 1) {
    for (size_t i = 0; i < sites.size(); ++i)
      result.sites[i] = process_site(sites[i], config, rules);
    return result;
  }

  std::atomic<size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= sites.size()) return;
        result.sites[i] = process_site(sites[i], config, rules);
      }
    });
  }
  for (auto& t : workers) t.join();
  return result;
}

void TemplateIndex::add_raw(const std::string& digest, const std::string& site,
                            int version) {
  std::lock_guard lock(*mutex_);
  raw_[digest].emplace_back(site, version);
}

void TemplateIndex::add_template(const std::string& digest,
                                 const std::string& site, int version) {
  std::lock_guard lock(*mutex_);
  templated_[digest].emplace_back(site, version);
}

void TemplateIndex::add_site(const SiteProcessResult& site) {
  for (size_t i = 0; i < site.raw_digests.size(); ++i)
    add_raw(site.raw_digests[i], site.site_id, static_cast<int>(i));
  for (size_t i = 0; i < site.template_digests.size(); ++i)
    add_template(site.template_digests[i], site.site_id, static_cast<int>(i));
}

void TemplateIndex::finalize() {
  std::lock_guard lock(*mutex_);
  for (auto* postings : {&raw_, &templated_})
    for (auto& [digest, entries] : *postings)
      std::sort(entries.begin(), entries.end());
}

void TemplateIndex::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& [digest, entries] : raw_)
    for (const auto& [site, version] : entries)
      out << "raw\t" << digest << '\t' << site << '\t' << version << '\n';
  for (const auto& [digest, entries] : templated_)
    for (const auto& [site, version] : entries)
      out << "tpl\t" << digest << '\t' << site << '\t' << version << '\n';
}

TemplateIndex TemplateIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  TemplateIndex index;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      const size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 4 || (fields[0] != "raw" && fields[0] != "tpl"))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed index line");
    int version = 0;
    try {
      version = std::stoi(fields[3]);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed version number");
    }
    if (fields[0] == "raw")
      index.add_raw(fields[1], fields[2], version);
    else
      index.add_template(fields[1], fields[2], version);
  }
  index.finalize();
  return index;
}

TemplateIndex build_index(const CorpusResult& result) {
  TemplateIndex index;
  for (const auto& site : result.sites) index.add_site(site);
  index.finalize();
  return index;
}

ClusterStats cluster_stats(const TemplateIndex::Postings& postings) {
  ClusterStats stats;
  for (const auto& [digest, entries] : postings) {
    std::set<std::string> sites;
    for (const auto& [site, version] : entries) sites.insert(site);
    if (sites.size() >= 2)
      stats.clusters.push_back({digest, sites.size(), entries.size()});
  }
  std::sort(stats.clusters.begin(), stats.clusters.end(),
            [](const Cluster& a, const Cluster& b) {
              if (a.site_count != b.site_count)
                return a.site_count > b.site_count;
              return a.digest < b.digest;
            });
  stats.cluster_count = stats.clusters.size();
  if (stats.clusters.empty()) return stats;

  std::vector<size_t> sizes;
  sizes.reserve(stats.clusters.size());
  for (const auto& c : stats.clusters) sizes.push_back(c.site_count);
  stats.max_sites = *std::max_element(sizes.begin(), sizes.end());
  double sum = 0;
  for (size_t s : sizes) sum += static_cast<double>(s);
  stats.mean_sites = sum / static_cast<double>(sizes.size());
  std::sort(sizes.begin(), sizes.end());
  const size_t mid = sizes.size() / 2;
  stats.median_sites =
      sizes.size() % 2 == 1
          ? static_cast<double>(sizes[mid])
          : (static_cast<double>(sizes[mid - 1]) +
             static_cast<double>(sizes[mid])) /
                2.0;
  return stats;
}

double near_duplicate_percent(size_t unique_raw, size_t unique_templates) {
  if (unique_raw == 0) return 0.0;
  return (1.0 - static_cast<double>(unique_templates) /
                    static_cast<double>(unique_raw)) *
         100.0;
}

DedupStats near_duplicate_stats(const CorpusResult& result) {
  DedupStats stats;
  std::set<std::string> raw, tpl;
  double total_millis = 0.0;
  size_t timed = 0;

  for (const auto& site : result.sites) {
    ++stats.sites;
    stats.versions += site.raw_digests.size();
    stats.comparisons += site.scripts.size();
    raw.insert(site.raw_digests.begin(), site.raw_digests.end());
    tpl.insert(site.template_digests.begin(), site.template_digests.end());
    for (const auto& [word, count] : site.category_counts)
      stats.category_counts[word] += count;

    int64_t annotated = 0, failed = 0;
    for (const auto& st : site.scripts) {
      annotated += static_cast<int64_t>(st.annotated_units);
      failed += static_cast<int64_t>(st.failed_units);
      auto& row = st.scripting ? stats.with_script : stats.without_script;
      row.annotated += static_cast<int64_t>(st.annotated_units);
      row.failed += static_cast<int64_t>(st.failed_units);
      if (st.budget_exhausted) ++stats.budget_exhausted;
      total_millis += st.diff_millis;
      ++timed;
    }
    stats.annotated_units += annotated;
    stats.failed_units += failed;

    if (site.tags.empty()) {
      stats.by_tag["No offence"].annotated += annotated;
      stats.by_tag["No offence"].failed += failed;
    } else {
      for (const auto& tag : site.tags) {
        stats.by_tag[tag].annotated += annotated;
        stats.by_tag[tag].failed += failed;
      }
    }
  }

  stats.unique_raw = raw.size();
  stats.unique_templates = tpl.size();
  stats.near_dup_percent =
      near_duplicate_percent(stats.unique_raw, stats.unique_templates);
  if (timed > 0) stats.mean_diff_millis = total_millis / static_cast<double>(timed);
  return stats;
}

}  // namespace neardup
