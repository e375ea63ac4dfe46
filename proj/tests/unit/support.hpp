#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "recsim/agents.hpp"
#include "recsim/content.hpp"

namespace testing {

inline std::filesystem::path fixtures() { return RECSIM_FIXTURES_DIR; }

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("recsim-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline recsim::AgentDescriptor descriptor(std::string id = "A") {
  recsim::AgentDescriptor d;
  d.id = std::move(id);
  d.nickname = "Tester";
  d.bio = "bio";
  d.interests = {"art"};
  return d;
}

inline recsim::AgentPrompt agent(std::string id, double pa, std::vector<std::string> interests,
                                 double er = 4.0, int e = 4) {
  auto d = descriptor(std::move(id));
  d.dynamics.political_attitude = pa;
  d.dynamics.emotive_reaction = er;
  d.statics.extraversion = e;
  d.interests = std::move(interests);
  return recsim::new_agent(std::move(d));
}

inline recsim::Post post(std::string id, double stance, std::vector<std::string> tags) {
  recsim::Post p;
  p.id = std::move(id);
  p.origin = "news";
  p.stance = stance;
  p.tags = std::move(tags);
  p.text = "text of " + p.id;
  p.permanent = true;
  return p;
}

}  // namespace testing
