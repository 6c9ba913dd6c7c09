#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "deconet/config.hpp"

namespace deconet {

/// Flags shared by every subcommand.
struct CommonFlags {
  bool force = false;
};

/// Each command writes its artifacts under cfg.out and returns the process exit status.
int cmd_datagen(const RunConfig& cfg, const CommonFlags& flags, std::ostream& log);
int cmd_train(const RunConfig& cfg, const CommonFlags& flags, std::ostream& log);
int cmd_acf(const RunConfig& cfg, const CommonFlags& flags, std::ostream& log);
int cmd_bounds(const RunConfig& cfg, const CommonFlags& flags, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const CommonFlags& flags, std::ostream& log);

}  // namespace deconet
