#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwmix {

// Thrown for bad user input: malformed config files, missing columns,
// invalid parameter combinations. The CLI maps it to exit code 2;
// everything else that escapes is a runtime failure (exit 1).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_config(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

inline bool is_finite(double v) { return std::isfinite(v); }

// Compensated (Kahan) accumulator. Metric aggregations use this so that
// results do not drift with summation chunking.
class KahanSum {
 public:
  void add(double v) {
    double y = v - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

double mean_of(const std::vector<double>& v);
// Sample variance, n-1 denominator. Requires v.size() >= 2.
double sample_variance(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

// Worker budget shared by the parallel sections (random forest trees,
// cross-validation folds). 0 = use hardware concurrency.
void set_worker_count(int n);
int worker_count();

// Runs fn(i) for i in [0, n). Distributes by index so any output written
// to slot i lands in the same place regardless of thread count. Nested
// calls degrade to serial execution instead of oversubscribing.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fwmix
