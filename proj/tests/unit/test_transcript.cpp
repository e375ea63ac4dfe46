#include <doctest.h>

#include <filesystem>
#include <random>

#include "recsim/error.hpp"
#include "recsim/transcript.hpp"
#include "support.hpp"

using namespace recsim;

namespace {

/// A consistent two-day chain for two agents with alpha = beta = 0.9.
std::vector<TranscriptRecord> chain() {
  std::vector<TranscriptRecord> out;
  double p[2] = {0.0, 0.1}, e[2] = {0.0, -0.3};
  const double f[2][2] = {{0.3, -0.45}, {0.7, 0.1 / 3.0}};
  for (int day = 1; day <= 2; ++day) {
    for (int a = 0; a < 2; ++a) {
      const double np = 0.9 * p[a] + (1.0 - 0.9) * f[day - 1][a];
      const double ne = 0.9 * e[a] + (1.0 - 0.9) * 0.75 * f[day - 1][a];
      for (int k = 0; k < 2; ++k) {
        TranscriptRecord r;
        r.day = day;
        r.agent_id = a == 0 ? "A" : "B";
        r.post_id = "p" + std::to_string(day) + std::to_string(k);
        r.channel = k ? SourceKind::Friend : SourceKind::Imposed;
        if (k) r.outcome = InteractionOutcome{ReactionKind::Care, true, std::string("Well said, été!"), true, true};
        r.impact = f[day - 1][a];
        r.activity = 0.75;
        r.polarization_prev = p[a];
        r.engagement_prev = e[a];
        r.polarization = np;
        r.engagement = ne;
        out.push_back(r);
      }
      p[a] = np;
      e[a] = ne;
    }
  }
  return out;
}

bool mentions(const VerifyReport& r, const std::string& needle) {
  for (const auto& p : r.problems) {
    if (p.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("transcript") {

TEST_CASE("ndjson round trip is exact") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (auto r : chain()) {
    r.impact = unit(gen);
    r.polarization = unit(gen);
    const auto line = to_ndjson(r);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(record_from_ndjson(line) == r);
  }
}

TEST_CASE("malformed lines") {
  const auto good = to_ndjson(chain().front());
  CHECK_THROWS_AS(record_from_ndjson("{"), FixtureCorrupt);
  CHECK_THROWS_AS(record_from_ndjson("{}"), FixtureCorrupt);
  std::string bad = good;
  bad.replace(bad.find("\"None\""), 6, "\"Grr\"");
  CHECK_THROWS_AS(record_from_ndjson(bad), FixtureCorrupt);
  bad = good;
  bad.replace(bad.find("\"imposed\""), 9, "\"psychic\"");
  CHECK_THROWS_AS(record_from_ndjson(bad), FixtureCorrupt);
}

TEST_CASE("files and sinks") {
  testing::TempDir dir("transcript");
  const auto records = chain();
  write_transcript(dir / "t.ndjson", records);
  CHECK(read_transcript(dir / "t.ndjson") == records);
  CHECK_THROWS_AS(read_transcript(dir / "missing.ndjson"), FixtureCorrupt);

  {
    NdjsonFileSink sink(dir / "s.ndjson");
    sink.append(std::span(records).first(3));
    sink.append(std::span(records).subspan(3));
    CHECK_FALSE(std::filesystem::exists(dir / "s.ndjson"));
    sink.commit();
  }
  CHECK(read_transcript(dir / "s.ndjson") == records);

  {
    NdjsonFileSink abandoned(dir / "a.ndjson");
    abandoned.append(records);
  }
  CHECK_FALSE(std::filesystem::exists(dir / "a.ndjson"));

  MemorySink memory;
  memory.append(records);
  CHECK(memory.records() == records);
}

TEST_CASE("verification accepts a consistent chain") {
  const auto report = verify_transcript(chain(), DynamicsParams{});
  CHECK(report.ok());
  CHECK(report.records == 8);
  CHECK(report.agent_days == 4);
  CHECK(report.max_deviation == 0.0);
  CHECK(verify_transcript({}, DynamicsParams{}).ok());
}

TEST_CASE("verification catches tampering") {
  SUBCASE("score") {
    auto t = chain();
    t[2].polarization += 1e-9;
    t[3].polarization += 1e-9;
    const auto r = verify_transcript(t, DynamicsParams{});
    CHECK_FALSE(r.ok());
    CHECK(r.max_deviation > 0.0);
  }
  SUBCASE("wrong alpha") {
    CHECK_FALSE(verify_transcript(chain(), DynamicsParams{0.5, 0.9, 0.1}).ok());
  }
  SUBCASE("order") {
    auto t = chain();
    std::swap(t[0], t[1]);
    CHECK(mentions(verify_transcript(t, DynamicsParams{}), "order"));
  }
  SUBCASE("double consumption") {
    auto t = chain();
    t[5].post_id = "p10";
    t[4].post_id = "p09";
    CHECK_FALSE(verify_transcript(t, DynamicsParams{}).ok());
  }
  SUBCASE("broken chain") {
    auto t = chain();
    for (int i : {4, 5}) {
      t[i].polarization_prev = 0.5;
      t[i].polarization = 0.9 * 0.5 + (1.0 - 0.9) * t[i].impact;
    }
    const auto r = verify_transcript(t, DynamicsParams{});
    CHECK_FALSE(r.ok());
    CHECK(r.max_deviation > 0.4);
  }
}

}
