#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cyberdef/nn.hpp"
#include "cyberdef/team.hpp"

namespace cyberdef {

/// Portable text format: a versioned header, key/value metadata, then each
/// network's layer sizes and hexfloat parameters.
struct Checkpoint {
  int version = 1;
  std::int64_t iteration = 0;
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, PolicyNet>> nets;

  const PolicyNet* find(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Throws LoadError on a missing file, bad version or malformed content.
Checkpoint load_checkpoint(const std::string& path);

/// Captures every network of the team under stable names.
Checkpoint team_checkpoint(const Team& team, std::int64_t iteration);
/// Copies matching networks into the team. With `required` every network of
/// the team must be present. Throws LoadError naming the first differing
/// dimension on a layout mismatch.
void restore_team(Team& team, const Checkpoint& ckpt, bool required = true);
/// Same, restricted to sub-policy units.
void restore_subpolicies(Team& team, const Checkpoint& ckpt);

/// Hex digest of a file's bytes.
std::string file_digest(const std::string& path);

}  // namespace cyberdef
