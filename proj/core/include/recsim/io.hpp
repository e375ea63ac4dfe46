#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace recsim {

/// Reads a whole file. Throws std::runtime_error when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

/// Parses a JSON file; throws FixtureCorrupt (tagged with `module`) on a
/// missing or malformed file.
nlohmann::json read_json_fixture(const std::filesystem::path& path, const std::string& module);

/// Streams into `<target>.tmp` and renames onto `target` on commit(). If the
/// writer is destroyed without commit() the temp file is removed and the
/// target is never touched, so a killed run cannot leave a truncated output.
class AtomicFileWriter {
 public:
  explicit AtomicFileWriter(std::filesystem::path target);
  ~AtomicFileWriter();

  AtomicFileWriter(const AtomicFileWriter&) = delete;
  AtomicFileWriter& operator=(const AtomicFileWriter&) = delete;

  std::ostream& stream() { return out_; }
  void write(std::string_view text) { out_ << text; }
  void commit();

  const std::filesystem::path& target() const { return target_; }

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_file_atomic(const std::filesystem::path& target, std::string_view contents);

}  // namespace recsim
