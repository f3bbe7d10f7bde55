#include <cmath>
#include <limits>
#include <thread>

#include "ontopt/errors.hpp"
#include "ontopt/solvers.hpp"

namespace ontopt {

namespace {

std::vector<double> axis(double lo, double hi, double step) {
  std::vector<double> out;
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= count; ++k) out.push_back(lo + static_cast<double>(k) * step);
  if (out.back() < hi - 1e-12 * (1.0 + std::abs(hi))) out.push_back(hi);
  return out;
}

struct Best {
  double value = std::numeric_limits<double>::infinity();
  Vec point;
  long evaluated = 0;
};

}  // namespace

Solution solve_grid_oracle(const Problem& p, const GridBox& box, const SolverConfig& cfg) {
  const int n = p.dimension();
  if (n > 3) throw InapplicableError("NotApplicable", "grid oracle is limited to 3 scalar coordinates, got " + std::to_string(n));
  if (box.lo.size() != n || box.hi.size() != n) {
    throw DimensionError("grid box has " + std::to_string(box.lo.size()) + " coordinates, expected " + std::to_string(n));
  }
  if (!(box.step > 0.0)) throw DomainError("grid step must be positive");
  std::vector<std::vector<double>> axes;
  for (int j = 0; j < n; ++j) {
    if (box.lo(j) > box.hi(j)) throw DomainError("grid box has lo > hi at coordinate " + std::to_string(j));
    axes.push_back(axis(box.lo(j), box.hi(j), box.step));
  }
  const Expr f = min_objective(p);
  const ParamMap params = p.param_map();

  // Worker w scans the first-axis indices [begin, end) in lexicographic order;
  // strict improvement keeps the earliest point among ties.
  auto scan = [&](std::size_t begin, std::size_t end) {
    Best best;
    Vec x(n);
    std::vector<std::size_t> idx(n, 0);
    if (n == 0) {
      end = std::min<std::size_t>(end, 1);
    }
    for (std::size_t i0 = begin; i0 < end; ++i0) {
      std::fill(idx.begin(), idx.end(), 0);
      if (n > 0) idx[0] = i0;
      while (true) {
        for (int j = 0; j < n; ++j) x(j) = axes[j][idx[j]];
        ++best.evaluated;
        if (max_violation(p, x) <= cfg.grid_feasibility_tol) {
          double v = std::numeric_limits<double>::infinity();
          try {
            v = eval(f, x, params);
          } catch (const Error&) {
          }
          if (v < best.value) {
            best.value = v;
            best.point = x;
          }
        }
        int j = n - 1;
        while (j >= 1 && ++idx[j] == axes[j].size()) idx[j--] = 0;
        if (j < 1) break;
      }
    }
    return best;
  };

  const std::size_t first = n > 0 ? axes[0].size() : 1;
  const int workers = std::max(1, std::min<int>(cfg.grid_threads, static_cast<int>(first)));
  std::vector<Best> parts(workers);
  if (workers == 1) {
    parts[0] = scan(0, first);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      const std::size_t b = first * w / workers, e = first * (w + 1) / workers;
      threads.emplace_back([&, w, b, e] { parts[w] = scan(b, e); });
    }
    for (auto& th : threads) th.join();
  }
  Best best;
  for (const Best& part : parts) {
    best.evaluated += part.evaluated;
    if (part.value < best.value) {
      best.value = part.value;
      best.point = part.point;
    }
  }

  Solution s;
  s.method = "grid";
  s.iterations = static_cast<int>(best.evaluated);
  if (!std::isfinite(best.value)) {
    s.status = SolveStatus::kInfeasible;
    return s;
  }
  s.status = SolveStatus::kOptimal;
  s.point = best.point;
  s.value = original_value(p, best.value);
  s.history.push_back(best.value);
  return s;
}

}  // namespace ontopt
