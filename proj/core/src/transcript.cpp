#include "recsim/transcript.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <tuple>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "recsim/error.hpp"

namespace recsim {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_ndjson(const TranscriptRecord& r) {
  ordered_json j;
  j["day"] = r.day;
  j["agent_id"] = r.agent_id;
  j["post_id"] = r.post_id;
  j["channel"] = to_string(r.channel);
  j["reaction"] = to_string(r.outcome.reaction);
  j["read_comments"] = r.outcome.read_comments;
  j["comment"] = r.outcome.comment ? ordered_json(*r.outcome.comment) : ordered_json(nullptr);
  j["shared"] = r.outcome.shared;
  j["friend_request"] = r.outcome.friend_requested;
  j["F"] = r.impact;
  j["T"] = r.activity;
  j["P_s_prev"] = r.polarization_prev;
  j["E_s_prev"] = r.engagement_prev;
  j["P_s"] = r.polarization;
  j["E_s"] = r.engagement;
  return j.dump();
}

namespace {

SourceKind channel_from_string(const std::string& s) {
  for (auto k : {SourceKind::Friend, SourceKind::Trending, SourceKind::Imposed}) {
    if (to_string(k) == s) return k;
  }
  throw FixtureCorrupt("transcript", "unknown channel '" + s + "'");
}

}  // namespace

TranscriptRecord record_from_ndjson(std::string_view line) {
  try {
    const json j = json::parse(line);
    if (!j.is_object() || j.size() != 15) throw FixtureCorrupt("transcript", "expected a 15-key object");
    TranscriptRecord r;
    r.day = j.at("day").get<int>();
    r.agent_id = j.at("agent_id").get<std::string>();
    r.post_id = j.at("post_id").get<std::string>();
    r.channel = channel_from_string(j.at("channel").get<std::string>());
    const auto reaction = reaction_from_string(j.at("reaction").get<std::string>());
    if (!reaction) throw FixtureCorrupt("transcript", "unknown reaction in '" + std::string(line) + "'");
    r.outcome.reaction = *reaction;
    r.outcome.read_comments = j.at("read_comments").get<bool>();
    if (!j.at("comment").is_null()) r.outcome.comment = j.at("comment").get<std::string>();
    r.outcome.shared = j.at("shared").get<bool>();
    r.outcome.friend_requested = j.at("friend_request").get<bool>();
    r.impact = j.at("F").get<double>();
    r.activity = j.at("T").get<double>();
    r.polarization_prev = j.at("P_s_prev").get<double>();
    r.engagement_prev = j.at("E_s_prev").get<double>();
    r.polarization = j.at("P_s").get<double>();
    r.engagement = j.at("E_s").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw FixtureCorrupt("transcript", std::string(e.what()));
  }
}

std::vector<TranscriptRecord> read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FixtureCorrupt("transcript", "cannot read " + path.string());
  std::vector<TranscriptRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(record_from_ndjson(line));
  }
  return out;
}

void write_transcript(const std::filesystem::path& path, std::span<const TranscriptRecord> records) {
  NdjsonFileSink sink(path);
  sink.append(records);
  sink.commit();
}

void NdjsonFileSink::append(std::span<const TranscriptRecord> records) {
  auto& out = writer_.stream();
  for (const auto& r : records) out << to_ndjson(r) << '\n';
}

VerifyReport verify_transcript(std::span<const TranscriptRecord> records, const DynamicsParams& params) {
  VerifyReport report;
  report.records = records.size();
  struct Last {
    int day;
    double polarization;
    double engagement;
  };
  std::map<std::string, Last, std::less<>> last;
  std::unordered_set<std::string> consumed;

  auto problem = [&](std::size_t i, const std::string& what) {
    if (report.problems.size() < 50) report.problems.push_back("record " + std::to_string(i + 1) + ": " + what);
  };
  auto deviate = [&](double a, double b) {
    const double d = std::abs(a - b);
    if (!(d <= report.max_deviation)) report.max_deviation = std::isnan(d) ? INFINITY : d;
  };

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (i > 0) {
      const auto& p = records[i - 1];
      if (!(std::tie(p.day, p.agent_id, p.post_id) < std::tie(r.day, r.agent_id, r.post_id))) {
        problem(i, "out of (day, agent_id, post_id) order");
      }
    }
    if (!consumed.insert(r.agent_id + '\n' + r.post_id).second) problem(i, "post consumed twice by " + r.agent_id);
    if (r.outcome.reaction == ReactionKind::None &&
        (r.outcome.comment || r.outcome.shared || r.outcome.friend_requested || r.outcome.read_comments)) {
      problem(i, "skipped post carries interactions");
    }

    const bool group_start = i == 0 || records[i - 1].day != r.day || records[i - 1].agent_id != r.agent_id;
    if (group_start) {
      ++report.agent_days;
      try {
        deviate(r.polarization, update_polarization(r.polarization_prev, params.alpha, r.impact));
        deviate(r.engagement, update_engagement(r.engagement_prev, params.beta, r.activity, r.impact));
      } catch (const Error& e) {
        problem(i, e.what());
      }
      if (auto it = last.find(r.agent_id); it != last.end()) {
        deviate(r.polarization_prev, it->second.polarization);
        deviate(r.engagement_prev, it->second.engagement);
        if (it->second.day >= r.day) problem(i, "agent day repeated");
      }
      last.insert_or_assign(r.agent_id, Last{r.day, r.polarization, r.engagement});
    } else {
      const auto& g = records[i - 1];
      if (g.impact != r.impact || g.activity != r.activity || g.polarization_prev != r.polarization_prev ||
          g.engagement_prev != r.engagement_prev || g.polarization != r.polarization ||
          g.engagement != r.engagement) {
        problem(i, "score fields differ within one agent-day");
      }
    }
  }
  return report;
}

}  // namespace recsim
