#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tempo/clients.hpp"
#include "tempo/config.hpp"

namespace tempo::cli {

enum ExitCode { kOk = 0, kValidation = 1, kRuntime = 2 };

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  EnvLookup env = process_env();
  // Replaces the clients built from the configured endpoints.
  std::optional<QualityClients> clients;
};

// `args` excludes the program name.
int run(const std::vector<std::string>& args, Io& io);

}  // namespace tempo::cli
