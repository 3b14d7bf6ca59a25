#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "fwmix/common.hpp"
#include "model_states.hpp"

namespace fwmix::detail {

namespace {

// Caches RBF kernel columns with least-recently-used eviction. Capacity is
// sized to a fixed byte budget so large training sets stay bounded.
class KernelCache {
 public:
  KernelCache(const std::vector<double>& z, const std::vector<double>& norm2, std::size_t n,
              std::size_t dim, double gamma)
      : z_(z), norm2_(norm2), n_(n), dim_(dim), gamma_(gamma) {
    constexpr std::size_t budget_bytes = 64u << 20;
    capacity_ = std::max<std::size_t>(2, std::min(n_, budget_bytes / (sizeof(double) * n_)));
    slots_.reserve(capacity_);  // references handed out must survive later fills
  }

  const std::vector<double>& column(std::size_t i, std::size_t pinned) {
    ++clock_;
    if (auto it = slot_of_.find(i); it != slot_of_.end()) {
      stamps_[it->second] = clock_;
      return slots_[it->second];
    }
    std::size_t slot;
    if (slots_.size() < capacity_) {
      slot = slots_.size();
      slots_.emplace_back(n_);
      stamps_.push_back(clock_);
      rows_.push_back(i);
    } else {
      slot = evict(pinned);
      stamps_[slot] = clock_;
      slot_of_.erase(rows_[slot]);
      rows_[slot] = i;
    }
    slot_of_[i] = slot;
    fill(i, slots_[slot]);
    return slots_[slot];
  }

 private:
  std::size_t evict(std::size_t pinned_row) const {
    std::size_t best = 0;
    std::uint64_t best_stamp = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      if (rows_[s] == pinned_row) continue;
      if (stamps_[s] < best_stamp) {
        best_stamp = stamps_[s];
        best = s;
      }
    }
    return best;
  }

  void fill(std::size_t i, std::vector<double>& col) const {
    const double* zi = z_.data() + i * dim_;
    for (std::size_t l = 0; l < n_; ++l) {
      const double* zl = z_.data() + l * dim_;
      double dot = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) dot += zi[j] * zl[j];
      const double d2 = std::max(0.0, norm2_[i] + norm2_[l] - 2.0 * dot);
      col[l] = std::exp(-gamma_ * d2);
    }
  }

  const std::vector<double>& z_;
  const std::vector<double>& norm2_;
  std::size_t n_;
  std::size_t dim_;
  double gamma_;
  std::size_t capacity_;
  std::uint64_t clock_ = 0;
  std::vector<std::vector<double>> slots_;
  std::vector<std::uint64_t> stamps_;
  std::vector<std::size_t> rows_;
  std::unordered_map<std::size_t, std::size_t> slot_of_;
};

class SvrState final : public ModelState {
 public:
  ModelKind kind() const override { return ModelKind::svr; }
  std::size_t dimension() const override { return mean_.size(); }
  bool convergence_warning() const override { return warning_; }

  double predict(std::span<const double> x) const override {
    const std::size_t m = mean_.size();
    std::vector<double> q(m);
    for (std::size_t j = 0; j < m; ++j) q[j] = (x[j] - mean_[j]) / sd_[j];
    double f = bias_;
    for (std::size_t s = 0; s < sv_beta_.size(); ++s) {
      const double* zs = sv_z_.data() + s * m;
      double d2 = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double diff = q[j] - zs[j];
        d2 += diff * diff;
      }
      f += sv_beta_[s] * std::exp(-gamma_ * d2);
    }
    return f;
  }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["n_support"] = sv_beta_.size();
    j["bias"] = bias_;
    j["gamma"] = gamma_;
    j["c"] = c_;
    j["epsilon"] = epsilon_;
    j["converged"] = !warning_;
    return j;
  }

  std::vector<double> mean_, sd_;
  double gamma_ = 1.0;
  double bias_ = 0.0;
  double c_ = 1.0;
  double epsilon_ = 0.1;
  bool warning_ = false;
  std::vector<double> beta_;  // full dual vector, kept for diagnostics
  std::vector<double> sv_z_;  // standardized support rows
  std::vector<double> sv_beta_;
};

// Exact objective gain of moving the (i, j) pair by delta along the
// sum-preserving direction (+delta on i, -delta on j).
double pair_gain(double delta, double gi, double gj, double eta, double eps, double bi,
                 double bj) {
  return (gi - gj) * delta - 0.5 * eta * delta * delta -
         eps * (std::fabs(bi + delta) - std::fabs(bi)) -
         eps * (std::fabs(bj - delta) - std::fabs(bj));
}

}  // namespace

std::shared_ptr<const ModelState> fit_svr(const Dataset& train, const SvrParams& params,
                                          std::vector<double>* dual_objective_trace) {
  require_config(params.c > 0.0, "svr.c: must be > 0");
  require_config(params.epsilon >= 0.0, "svr.epsilon: must be >= 0");
  require_config(params.kkt_tol > 0.0, "svr.kkt_tol: must be > 0");
  require_config(params.max_passes >= 1, "svr.max_passes: must be >= 1");

  const std::size_t n = train.size();
  const std::size_t m = train.dim();
  auto state = std::make_shared<SvrState>();
  state->c_ = params.c;
  state->epsilon_ = params.epsilon;

  state->mean_.assign(m, 0.0);
  state->sd_.assign(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    const auto col = train.feature_column(j);
    state->mean_[j] = mean_of(col);
    const double sd = col.size() >= 2 ? sample_sd(col) : 0.0;
    state->sd_[j] = sd > 0.0 ? sd : 1.0;
  }

  std::vector<double> z(n * m);
  std::vector<double> norm2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = train.features(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = (row[j] - state->mean_[j]) / state->sd_[j];
      z[i * m + j] = v;
      acc += v * v;
    }
    norm2[i] = acc;
  }

  if (params.gamma > 0.0) {
    state->gamma_ = params.gamma;
  } else {
    // Scale heuristic: 1 / (m * Var(z)) over all standardized entries.
    double sum = 0.0, sum2 = 0.0;
    for (double v : z) {
      sum += v;
      sum2 += v * v;
    }
    const auto count = static_cast<double>(z.size());
    const double var = sum2 / count - (sum / count) * (sum / count);
    state->gamma_ = var > 1e-12 ? 1.0 / (static_cast<double>(m) * var) : 1.0;
  }

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = train.target(i);

  const double c = params.c;
  const double eps = params.epsilon;
  std::vector<double> beta(n, 0.0);
  std::vector<double> u(n, 0.0);  // u = K beta
  KernelCache cache(z, norm2, n, m, state->gamma_);

  auto record_objective = [&]() {
    if (!dual_objective_trace) return;
    double w = 0.0;
    for (std::size_t l = 0; l < n; ++l)
      w += y[l] * beta[l] - eps * std::fabs(beta[l]) - 0.5 * beta[l] * u[l];
    dual_objective_trace->push_back(w);
  };
  if (dual_objective_trace) dual_objective_trace->clear();
  record_objective();

  bool converged = n < 2;
  for (int pass = 0; pass < params.max_passes && !converged; ++pass) {
    for (std::size_t step = 0; step < n; ++step) {
      // Maximal violating pair: the best "can grow" and "can shrink" scores.
      double best_up = -std::numeric_limits<double>::infinity();
      double best_dn = -std::numeric_limits<double>::infinity();
      std::size_t i = n, j = n;
      for (std::size_t l = 0; l < n; ++l) {
        const double g = y[l] - u[l];
        if (beta[l] < c) {
          const double up = g - eps * (beta[l] >= 0.0 ? 1.0 : -1.0);
          if (up > best_up) {
            best_up = up;
            i = l;
          }
        }
        if (beta[l] > -c) {
          const double dn = -g - eps * (beta[l] <= 0.0 ? 1.0 : -1.0);
          if (dn > best_dn) {
            best_dn = dn;
            j = l;
          }
        }
      }
      if (i >= n || j >= n || i == j || best_up + best_dn <= params.kkt_tol) {
        converged = true;
        break;
      }

      const std::vector<double>& ki = cache.column(i, n);
      const std::vector<double>& kj = cache.column(j, i);
      const double gi = y[i] - u[i];
      const double gj = y[j] - u[j];
      const double eta = std::max(0.0, ki[i] + kj[j] - 2.0 * ki[j]);
      const double lo = std::max(-c - beta[i], beta[j] - c);
      const double hi = std::min(c - beta[i], beta[j] + c);

      std::vector<double> candidates = {lo, hi, std::clamp(-beta[i], lo, hi),
                                        std::clamp(beta[j], lo, hi)};
      if (eta > 0.0) {
        for (const double si : {-1.0, 1.0})
          for (const double sj : {-1.0, 1.0})
            candidates.push_back(std::clamp((gi - gj - eps * (si - sj)) / eta, lo, hi));
      }
      double best_gain = 0.0;
      double best_delta = 0.0;
      for (const double d : candidates) {
        const double gain = pair_gain(d, gi, gj, eta, eps, beta[i], beta[j]);
        if (gain > best_gain) {
          best_gain = gain;
          best_delta = d;
        }
      }
      if (best_gain <= 0.0) break;  // no ascent left along any violating pair

      beta[i] += best_delta;
      beta[j] -= best_delta;
      beta[i] = std::clamp(beta[i], -c, c);
      beta[j] = std::clamp(beta[j], -c, c);
      for (std::size_t l = 0; l < n; ++l) u[l] += best_delta * (ki[l] - kj[l]);
      record_objective();
    }
  }
  state->warning_ = !converged;

  // Bias from the KKT conditions: interior points pin it exactly, otherwise
  // the feasible interval's midpoint.
  const double eps_b = 1e-9 * c;
  double b_sum = 0.0;
  std::size_t b_count = 0;
  double b_lo = -std::numeric_limits<double>::infinity();
  double b_hi = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < n; ++l) {
    const double f0 = y[l] - u[l];
    if (beta[l] > eps_b && beta[l] < c - eps_b) {
      b_sum += f0 - eps;
      ++b_count;
    } else if (beta[l] < -eps_b && beta[l] > -c + eps_b) {
      b_sum += f0 + eps;
      ++b_count;
    } else if (std::fabs(beta[l]) <= eps_b) {
      b_lo = std::max(b_lo, f0 - eps);
      b_hi = std::min(b_hi, f0 + eps);
    } else if (beta[l] >= c - eps_b) {
      b_hi = std::min(b_hi, f0 - eps);
    } else {
      b_lo = std::max(b_lo, f0 + eps);
    }
  }
  if (b_count > 0) {
    state->bias_ = b_sum / static_cast<double>(b_count);
  } else if (std::isfinite(b_lo) && std::isfinite(b_hi)) {
    state->bias_ = 0.5 * (b_lo + b_hi);
  } else if (std::isfinite(b_lo)) {
    state->bias_ = b_lo;
  } else if (std::isfinite(b_hi)) {
    state->bias_ = b_hi;
  } else {
    state->bias_ = 0.0;
  }

  state->beta_ = beta;
  for (std::size_t l = 0; l < n; ++l) {
    if (beta[l] != 0.0) {
      state->sv_beta_.push_back(beta[l]);
      state->sv_z_.insert(state->sv_z_.end(), z.begin() + static_cast<std::ptrdiff_t>(l * m),
                          z.begin() + static_cast<std::ptrdiff_t>((l + 1) * m));
    }
  }
  return state;
}

std::optional<SvrDualView> svr_view(const ModelState& state) {
  const auto* svr = dynamic_cast<const SvrState*>(&state);
  if (!svr) return std::nullopt;
  return SvrDualView{std::span<const double>(svr->beta_), svr->bias_, svr->c_, svr->epsilon_,
                     svr->gamma_};
}

}  // namespace fwmix::detail
