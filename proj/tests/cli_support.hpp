#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace cli {

struct Run {
  int exit_code = -1;
  std::string out;
  double seconds = 0.0;
};

inline std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

/// Runs the xurdf binary with `args` (already quoted), stdout captured, stderr discarded.
inline Run run(const std::string& args) {
  const std::string command = quote(XURDF_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  const auto start = std::chrono::steady_clock::now();
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string fixture_file(const std::string& name, const std::string& file) {
  return quote((std::filesystem::path(XURDF_FIXTURE_DIR) / name / file).string());
}

}  // namespace cli
