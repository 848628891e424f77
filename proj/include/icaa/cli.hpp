#pragma once
// Command-line entry point: ingest, index, react, check, bench, report and config.

#include "icaa/config.hpp"
#include "icaa/gateway.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace icaa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitReplayMiss = 3;

struct Environment {
    config::EnvLookup getenv;                  // defaults to std::getenv
    std::shared_ptr<llm::ChatBackend> backend;  // replaces the HTTP backend in live and record mode
};

struct RunStats {
    llm::GatewayStats gateway;
    std::size_t http_requests = 0;  // process-wide HTTP requests made during the run
};

// args[0] is the program name. Data goes to `out` or files, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env = {},
        RunStats* stats = nullptr);

}  // namespace icaa::cli
