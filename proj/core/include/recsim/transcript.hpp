#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recsim/content.hpp"
#include "recsim/decision.hpp"
#include "recsim/dynamics.hpp"
#include "recsim/io.hpp"

namespace recsim {

/// One consumed post. Every record of an agent-day carries the same score
/// update: F, the activity T, and the scores before and after it.
struct TranscriptRecord {
  int day = 0;
  std::string agent_id;
  std::string post_id;
  SourceKind channel = SourceKind::Imposed;
  InteractionOutcome outcome;
  double impact = 0.0;  // F
  double activity = 1.0;  // T
  double polarization_prev = 0.0;
  double engagement_prev = 0.0;
  double polarization = 0.0;
  double engagement = 0.0;

  bool operator==(const TranscriptRecord&) const = default;
};

/// One JSON object, keys in fixed order, no trailing newline.
std::string to_ndjson(const TranscriptRecord& record);

/// Throws FixtureCorrupt("transcript", ...) on a malformed line.
TranscriptRecord record_from_ndjson(std::string_view line);

std::vector<TranscriptRecord> read_transcript(const std::filesystem::path& path);
void write_transcript(const std::filesystem::path& path, std::span<const TranscriptRecord> records);

/// Receives each day's records once the day has been applied.
class TranscriptSink {
 public:
  virtual ~TranscriptSink() = default;
  virtual void append(std::span<const TranscriptRecord> records) = 0;
};

class MemorySink final : public TranscriptSink {
 public:
  void append(std::span<const TranscriptRecord> records) override {
    records_.insert(records_.end(), records.begin(), records.end());
  }
  std::vector<TranscriptRecord>& records() noexcept { return records_; }

 private:
  std::vector<TranscriptRecord> records_;
};

/// Streams NDJSON into a temp file; the target appears only after commit().
class NdjsonFileSink final : public TranscriptSink {
 public:
  explicit NdjsonFileSink(std::filesystem::path target) : writer_(std::move(target)) {}
  void append(std::span<const TranscriptRecord> records) override;
  void commit() { writer_.commit(); }

 private:
  AtomicFileWriter writer_;
};

struct VerifyReport {
  std::size_t records = 0;
  std::size_t agent_days = 0;
  double max_deviation = 0.0;
  std::vector<std::string> problems;  // ordering, chain or duplicate violations

  bool ok() const noexcept { return problems.empty() && max_deviation == 0.0; }
};

/// Re-derives every polarization and engagement update from the recorded F,
/// T and previous scores, checks that each agent's chain continues from its
/// last recorded scores, that records are strictly ordered by (day,
/// agent_id, post_id), and that no agent consumes a post twice.
VerifyReport verify_transcript(std::span<const TranscriptRecord> records, const DynamicsParams& params);

}  // namespace recsim
