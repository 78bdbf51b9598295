#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace lenslab {

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double sqrt3 = 1.73205080756887729353;
/// Half-width of the unit-radius lens, sqrt(3)/2.
inline constexpr double ell = 0.86602540378443864676;
}  // namespace constants

/// Compensated (Neumaier) summation.
class NeumaierSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  NeumaierSum& operator+=(double v) noexcept {
    add(v);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Seeded generator with a platform-independent uniform mapping.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

/// Gauss-Legendre rule mapped to [0, 1].
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {
template <unsigned N>
QuadRule make_gauss_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  QuadRule rule;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      rule.nodes.push_back(0.5);
      rule.weights.push_back(0.5 * w[i]);
      continue;
    }
    rule.nodes.push_back(0.5 - 0.5 * a[i]);
    rule.weights.push_back(0.5 * w[i]);
    rule.nodes.push_back(0.5 + 0.5 * a[i]);
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}
}  // namespace detail

/// Cached Gauss-Legendre rules with 1..10, 12, 16, 20 points.
inline const QuadRule& gauss_rule(int points) {
  static const std::array<QuadRule, 13> rules = {
      detail::make_gauss_rule<1>(),  detail::make_gauss_rule<2>(),
      detail::make_gauss_rule<3>(),  detail::make_gauss_rule<4>(),
      detail::make_gauss_rule<5>(),  detail::make_gauss_rule<6>(),
      detail::make_gauss_rule<7>(),  detail::make_gauss_rule<8>(),
      detail::make_gauss_rule<9>(),  detail::make_gauss_rule<10>(),
      detail::make_gauss_rule<12>(), detail::make_gauss_rule<16>(),
      detail::make_gauss_rule<20>()};
  if (points <= 10) return rules[static_cast<std::size_t>(std::max(points, 1) - 1)];
  if (points <= 12) return rules[10];
  if (points <= 16) return rules[11];
  return rules[12];
}

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

/// Nelder-Mead downhill simplex with standard coefficients. Stops when the
/// spread of function values across the simplex drops below `ftol` (absolute)
/// and the simplex diameter below `xtol`, or after `max_evals` evaluations.
inline SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                                 std::vector<double> x0, std::span<const double> steps,
                                 int max_evals, double ftol = 1e-12, double xtol = 1e-10) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
  std::vector<double> fv(n + 1);
  int evals = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    fv[i] = f(simplex[i]);
    ++evals;
  }
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);

  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };

  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[best][k]));
      }
    }
    if (fv[worst] - fv[best] <= ftol && diameter <= xtol) break;
    if (diameter <= xtol * 1e-3) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
    const double fr = eval(trial);
    if (fr < fv[best]) {
      for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        fv[worst] = fe;
      } else {
        simplex[worst] = trial;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = trial;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    for (std::size_t k = 0; k < n; ++k) {
      trial2[k] = outside ? centroid[k] + 0.5 * (trial[k] - centroid[k])
                          : centroid[k] + 0.5 * (simplex[worst][k] - centroid[k]);
    }
    const double fc = eval(trial2);
    if (fc < std::min(fr, fv[worst])) {
      simplex[worst] = trial2;
      fv[worst] = fc;
      continue;
    }
    // shrink towards the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) {
        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      }
      fv[i] = eval(simplex[i]);
    }
  }
  const auto best_it = std::min_element(fv.begin(), fv.end());
  const auto bi = static_cast<std::size_t>(best_it - fv.begin());
  return {simplex[bi], fv[bi], evals};
}

/// Worker count: LENSLAB_THREADS if set and positive, else the hardware count.
inline unsigned worker_count() {
  if (const char* env = std::getenv("LENSLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs body(i) for i in [0, n). Each index is handled exactly once; results
/// must be written to per-index slots so that reductions stay deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  std::mutex failure_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          failed = true;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

/// Median of a copy of the data (mean of the two middle values for even sizes).
inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace lenslab
