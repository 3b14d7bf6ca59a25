#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "fwmix/dataset.hpp"
#include "fwmix/random.hpp"

namespace fwtest {

inline std::atomic<int>& temp_counter() {
  static std::atomic<int> counter{0};
  return counter;
}

// Scratch directory removed on scope exit.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("fwmix_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(temp_counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

// Runs the installed CLI binary, returns its exit code (-1 on spawn failure).
inline int run_cli(const std::string& args) {
  const std::string cmd = std::string(FWMIX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

// Random regression dataset; targets follow a noisy linear rule so models
// have something learnable.
inline fwmix::Dataset random_dataset(std::size_t n, std::size_t m, std::uint64_t seed,
                                     const std::string& tag = "") {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < m; ++j) names.push_back("x" + std::to_string(j + 1));
  fwmix::Dataset out(names, "y");
  fwmix::RandomStream rng(fwmix::SeedSpec{seed, "fixture"});
  std::vector<double> x(m);
  for (std::size_t i = 0; i < n; ++i) {
    double y = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      x[j] = rng.normal(0.0, 1.0);
      y += (j % 2 == 0 ? 0.8 : -0.4) * x[j];
    }
    y += rng.normal(0.0, 0.3);
    out.append(x, y, tag);
  }
  return out;
}

}  // namespace fwtest
