#include "recsim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "recsim/error.hpp"

namespace recsim {

void ReactionTally::add(const InteractionOutcome& o) noexcept {
  reactions[static_cast<std::size_t>(o.reaction)] += 1;
  if (o.comment) ++comments;
  if (o.shared) ++shares;
  if (o.friend_requested) ++friend_requests;
}

unsigned ReactionTally::total_positive() const noexcept {
  unsigned n = 0;
  for (ReactionKind k : kAllReactions) {
    if (is_positive(k)) n += count(k);
  }
  return n;
}

unsigned ReactionTally::total_negative() const noexcept {
  return count(ReactionKind::Sad) + count(ReactionKind::Angry);
}

unsigned ReactionTally::total_reactions() const noexcept { return total_positive() + total_negative() + comments; }

ReactionTally tally(std::span<const TranscriptRecord> transcript, std::string_view profile_id, ScenarioKind scenario) {
  ReactionTally t;
  t.profile_id = std::string(profile_id);
  t.scenario = scenario;
  bool seen = false;
  for (const auto& r : transcript) {
    if (r.agent_id != profile_id) continue;
    seen = true;
    t.add(r.outcome);
  }
  if (!seen && !transcript.empty()) throw UnknownProfile(std::string(profile_id));
  return t;
}

std::string display_label(std::string_view profile_id) {
  std::string s(profile_id);
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

namespace {

constexpr ReactionKind kColumns[] = {ReactionKind::Haha, ReactionKind::Like,  ReactionKind::Wow, ReactionKind::Care,
                                     ReactionKind::Love, ReactionKind::Sad, ReactionKind::Angry};

const char* const kHeader[] = {"Haha", "Like", "Wow", "Care", "Love", "Sad", "Angry",
                               "Comments", "Total Reactions", "Total Positive", "Total Negative"};

std::vector<unsigned> row_values(const ReactionTally& t) {
  std::vector<unsigned> v;
  for (ReactionKind k : kColumns) v.push_back(t.count(k));
  v.push_back(t.comments);
  v.push_back(t.total_reactions());
  v.push_back(t.total_positive());
  v.push_back(t.total_negative());
  return v;
}

std::string scenario_title(ScenarioKind s) { return std::string(to_string(s)) + " Scenario"; }

std::string render_text(ScenarioKind scenario, const std::vector<const ReactionTally*>& rows) {
  std::size_t label_w = std::string("In total").size();
  for (const auto* t : rows) label_w = std::max(label_w, display_label(t->profile_id).size());
  std::vector<std::size_t> width;
  for (const char* h : kHeader) width.push_back(std::string(h).size());

  std::ostringstream out;
  out << scenario_title(scenario) << "\n\n" << std::left << std::setw(static_cast<int>(label_w)) << "";
  for (std::size_t c = 0; c < width.size(); ++c) out << "  " << kHeader[c];
  out << '\n';
  unsigned tot_r = 0, tot_p = 0, tot_n = 0;
  for (const auto* t : rows) {
    out << std::left << std::setw(static_cast<int>(label_w)) << display_label(t->profile_id);
    const auto v = row_values(*t);
    for (std::size_t c = 0; c < v.size(); ++c) out << "  " << std::right << std::setw(static_cast<int>(width[c])) << v[c];
    out << '\n';
    tot_r += t->total_reactions();
    tot_p += t->total_positive();
    tot_n += t->total_negative();
  }
  out << std::left << std::setw(static_cast<int>(label_w)) << "In total";
  for (std::size_t c = 0; c < width.size(); ++c) {
    out << "  " << std::right << std::setw(static_cast<int>(width[c]));
    if (c == 8) out << tot_r;
    else if (c == 9) out << tot_p;
    else if (c == 10) out << tot_n;
    else out << "";
  }
  out << "\n\nExtended\n\n" << std::left << std::setw(static_cast<int>(label_w)) << ""
      << "  Shares  Friend Requests  Skipped\n";
  for (const auto* t : rows) {
    out << std::left << std::setw(static_cast<int>(label_w)) << display_label(t->profile_id) << "  " << std::right
        << std::setw(6) << t->shares << "  " << std::setw(15) << t->friend_requests << "  " << std::setw(7)
        << t->count(ReactionKind::None) << '\n';
  }
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string render_csv(const std::vector<const ReactionTally*>& rows) {
  std::ostringstream out;
  out << "Profile";
  for (const char* h : kHeader) out << ',' << h;
  out << ",Shares,Friend Requests,Skipped\n";
  unsigned tot_r = 0, tot_p = 0, tot_n = 0;
  for (const auto* t : rows) {
    out << csv_field(t->profile_id);
    for (unsigned v : row_values(*t)) out << ',' << v;
    out << ',' << t->shares << ',' << t->friend_requests << ',' << t->count(ReactionKind::None) << '\n';
    tot_r += t->total_reactions();
    tot_p += t->total_positive();
    tot_n += t->total_negative();
  }
  out << "In total,,,,,,,,," << tot_r << ',' << tot_p << ',' << tot_n << ",,,\n";
  return out.str();
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

unsigned to_count(const std::string& s) {
  unsigned v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw FixtureCorrupt("metrics", "bad count '" + s + "'");
  return v;
}

}  // namespace

std::vector<ScenarioReport> render_report(std::span<const ReactionTally> tallies) {
  std::vector<ScenarioReport> out;
  for (ScenarioKind s : kAllScenarios) {
    std::vector<const ReactionTally*> rows;
    for (const auto& t : tallies) {
      if (t.scenario == s) rows.push_back(&t);
    }
    if (rows.empty()) continue;
    out.push_back(ScenarioReport{s, render_text(s, rows), render_csv(rows)});
  }
  return out;
}

std::vector<ReactionTally> parse_report_csv(std::string_view csv, ScenarioKind scenario) {
  std::vector<ReactionTally> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line)) throw FixtureCorrupt("metrics", "empty report");
  constexpr std::size_t kFields = 15;
  if (split_csv_line(line).size() != kFields) throw FixtureCorrupt("metrics", "unexpected report header");
  bool total_seen = false;
  unsigned sum_r = 0, sum_p = 0, sum_n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != kFields) throw FixtureCorrupt("metrics", "row has " + std::to_string(f.size()) + " fields");
    if (f[0] == "In total") {
      if (to_count(f[9]) != sum_r || to_count(f[10]) != sum_p || to_count(f[11]) != sum_n) {
        throw FixtureCorrupt("metrics", "'In total' row does not match the profile rows");
      }
      total_seen = true;
      continue;
    }
    ReactionTally t;
    t.profile_id = f[0];
    t.scenario = scenario;
    for (std::size_t c = 0; c < std::size(kColumns); ++c) {
      t.reactions[static_cast<std::size_t>(kColumns[c])] = to_count(f[1 + c]);
    }
    t.comments = to_count(f[8]);
    t.shares = to_count(f[12]);
    t.friend_requests = to_count(f[13]);
    t.reactions[static_cast<std::size_t>(ReactionKind::None)] = to_count(f[14]);
    if (t.total_reactions() != to_count(f[9]) || t.total_positive() != to_count(f[10]) ||
        t.total_negative() != to_count(f[11])) {
      throw FixtureCorrupt("metrics", "totals of '" + t.profile_id + "' are inconsistent");
    }
    sum_r += t.total_reactions();
    sum_p += t.total_positive();
    sum_n += t.total_negative();
    out.push_back(std::move(t));
  }
  if (!total_seen) throw FixtureCorrupt("metrics", "missing 'In total' row");
  return out;
}

Stats describe(std::span<const double> values) {
  Stats s;
  if (values.empty()) return s;
  double sum = 0.0;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

ScoreSummary score_summary(const ScoreSeries& series, ScenarioKind scenario) {
  ScoreSummary out;
  out.scenario = scenario;
  const std::size_t n = series.agents();
  if (n == 0) return out;
  for (int d = 0; d <= series.days; ++d) {
    const std::span<const double> p(series.polarization.data() + series.at(d, 0), n);
    const std::span<const double> e(series.engagement.data() + series.at(d, 0), n);
    out.daily.push_back(DailyMeans{d, describe(p).mean, describe(e).mean});
    if (d == series.days) {
      out.final_polarization = describe(p);
      out.final_engagement = describe(e);
    }
  }
  return out;
}

namespace {

void put_double(std::string& out, double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ec == std::errc() ? p : buf);
}

}  // namespace

std::string series_csv(const ScoreSeries& series) {
  std::string out = "day,agent_id,P_s,E_s,F\n";
  out.reserve(out.size() + series.polarization.size() * 48);
  for (int d = 0; d <= series.days; ++d) {
    for (std::size_t a = 0; a < series.agents(); ++a) {
      const std::size_t i = series.at(d, a);
      out += std::to_string(d);
      out += ',';
      out += series.agent_ids[a];
      out += ',';
      put_double(out, series.polarization[i]);
      out += ',';
      put_double(out, series.engagement[i]);
      out += ',';
      if (!std::isnan(series.impact[i])) put_double(out, series.impact[i]);
      out += '\n';
    }
  }
  return out;
}

std::string daily_means_csv(const ScoreSummary& summary) {
  std::string out = "day,mean_P_s,mean_E_s\n";
  for (const auto& d : summary.daily) {
    out += std::to_string(d.day);
    out += ',';
    put_double(out, d.polarization);
    out += ',';
    put_double(out, d.engagement);
    out += '\n';
  }
  return out;
}

}  // namespace recsim
