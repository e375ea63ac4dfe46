#include "recsim/io.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "recsim/error.hpp"

namespace recsim {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json read_json_fixture(const fs::path& path, const std::string& module) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FixtureCorrupt(module, "cannot open fixture " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FixtureCorrupt(module, path.string() + ": " + e.what());
  }
}

AtomicFileWriter::AtomicFileWriter(fs::path target) : target_(std::move(target)) {
  if (target_.has_parent_path()) fs::create_directories(target_.parent_path());
  temp_ = target_;
  temp_ += ".tmp";
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open " + temp_.string() + " for writing");
}

AtomicFileWriter::~AtomicFileWriter() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    fs::remove(temp_, ec);
  }
}

void AtomicFileWriter::commit() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failed for " + temp_.string());
  out_.close();
  fs::rename(temp_, target_);
  committed_ = true;
}

void write_file_atomic(const fs::path& target, std::string_view contents) {
  AtomicFileWriter w(target);
  w.write(contents);
  w.commit();
}

}  // namespace recsim
