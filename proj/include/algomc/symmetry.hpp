#pragma once

// Information measures that are monotone under symmetry-respecting channels:
// Fisher information under translations, reference information under finite
// group actions, and the peaks experiment on stochastic maps that increase
// entropy.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "algomc/discrete.hpp"
#include "algomc/error.hpp"
#include "algomc/rng.hpp"

namespace algomc {

// Density sampled on x0, x0 + h, ..., normalized so that h * sum(p) = 1.
struct GridDensity {
  double x0 = 0.0;
  double h = 1.0;
  std::vector<double> p;

  GridDensity() = default;
  GridDensity(double x0_, double h_, std::vector<double> values, bool normalize = true)
      : x0(x0_), h(h_), p(std::move(values)) {
    if (!(h > 0)) throw PreconditionError("GridDensity: spacing must be positive");
    if (p.empty()) throw PreconditionError("GridDensity: no grid points");
    double s = 0.0;
    for (double v : p) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("GridDensity: values must be finite and non-negative");
      s += v;
    }
    if (!(s > 0)) throw PreconditionError("GridDensity: zero total mass");
    if (normalize) {
      for (double& v : p) v /= s * h;
    } else if (std::abs(s * h - 1.0) > 1e-8) {
      throw PreconditionError("GridDensity: Riemann sum differs from 1");
    }
  }

  static GridDensity from_function(const std::function<double(double)>& f, double lo, double hi, double h) {
    if (!(hi > lo)) throw PreconditionError("GridDensity: empty range");
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / h)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(lo + h * static_cast<double>(i));
    return GridDensity(lo, h, std::move(v));
  }

  std::size_t size() const noexcept { return p.size(); }
  double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m += x(i) * p[i] * h;
    return m;
  }
  double variance() const {
    const double mu = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < size(); ++i) v += (x(i) - mu) * (x(i) - mu) * p[i] * h;
    return v;
  }
  GridDensity shifted(double dx) const { return GridDensity(x0 + dx, h, p, false); }
};

inline constexpr double kDensityFloor = 1e-300;

// F = ∫ p'(x)^2 / p(x) dx, the p-weighted mean of the squared score
// (d/dx ln p)^2. Central differences on interior points.
inline double fisher_information(const GridDensity& d) {
  if (d.size() < 3) throw PreconditionError("fisher_information: need at least three grid points");
  double f = 0.0;
  for (std::size_t i = 1; i + 1 < d.size(); ++i) {
    if (d.p[i] == 0.0) {
      throw PreconditionError("fisher_information: zero density at interior point x = " + std::to_string(d.x(i)) +
                              "; trim the support to where the density is positive");
    }
    const double dp = (d.p[i + 1] - d.p[i - 1]) / (2 * d.h);
    f += dp * dp / std::max(d.p[i], kDensityFloor);
  }
  return f * d.h;
}

inline GridDensity convolve(const GridDensity& a, const GridDensity& b) {
  if (std::abs(a.h - b.h) > 1e-12 * std::max(a.h, b.h)) throw PreconditionError("convolve: grid spacings differ");
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a.p[i] * b.p[j] * a.h;
  return GridDensity(a.x0 + b.x0, a.h, std::move(out));
}

inline double gaussian_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2 * M_PI));
}

inline GridDensity gaussian_grid(double mean, double sd, double h, double width = 10.0) {
  return GridDensity::from_function([=](double x) { return gaussian_density(x, mean, sd); }, mean - width * sd,
                                    mean + width * sd, h);
}

struct NamedDensity {
  std::string name;
  GridDensity density;
};

// Ten strictly positive test densities on a common spacing.
inline std::vector<NamedDensity> shipped_test_densities(double h = 0.01) {
  using std::exp;
  std::vector<NamedDensity> out;
  auto add = [&](std::string name, std::function<double(double)> f, double lo, double hi) {
    out.push_back({std::move(name), GridDensity::from_function(f, lo, hi, h)});
  };
  add("gaussian", [](double x) { return gaussian_density(x, 0, 1); }, -10, 10);
  add("narrow-gaussian", [](double x) { return gaussian_density(x, 1, 0.3); }, -2, 4);
  add("bimodal", [](double x) { return 0.5 * gaussian_density(x, -2, 0.6) + 0.5 * gaussian_density(x, 2, 0.6); }, -8, 8);
  add("trimodal",
      [](double x) {
        return 0.3 * gaussian_density(x, -3, 0.5) + 0.4 * gaussian_density(x, 0, 0.4) + 0.3 * gaussian_density(x, 3, 0.7);
      },
      -8, 10);
  add("logistic", [](double x) { return exp(-x) / ((1 + exp(-x)) * (1 + exp(-x))); }, -30, 30);
  add("hyperbolic-secant", [](double x) { return 0.5 / std::cosh(M_PI * x / 2); }, -25, 25);
  add("student-t3", [](double x) { return std::pow(1 + x * x / 3, -2.0); }, -40, 40);
  add("gumbel", [](double x) { return exp(-(x + exp(-x))); }, -3.5, 30);
  add("skew-normal",
      [](double x) { return 2 * gaussian_density(x, 0, 1) * 0.5 * std::erfc(-4 * x / M_SQRT2); }, -6, 8);
  add("laplace", [](double x) { return 0.5 * exp(-std::abs(x)); }, -30, 30);
  return out;
}

// ---------------------------------------------------------------------------

using Permutation = std::vector<std::size_t>;

// A finite group given by its elements as permutations of {0, ..., size-1}.
class FiniteGroupAction {
 public:
  FiniteGroupAction(std::size_t size, std::vector<Permutation> elements) : size_(size), elements_(std::move(elements)) {
    if (elements_.empty()) throw PreconditionError("FiniteGroupAction: no elements");
    for (std::size_t k = 0; k < elements_.size(); ++k) {
      const auto& g = elements_[k];
      if (g.size() != size_) throw PreconditionError("FiniteGroupAction: permutation has wrong length");
      std::vector<bool> seen(size_, false);
      for (auto v : g) {
        if (v >= size_ || seen[v]) throw PreconditionError("FiniteGroupAction: element is not a permutation");
        seen[v] = true;
      }
      if (!index_.emplace(g, k).second) throw PreconditionError("FiniteGroupAction: duplicate element");
    }
    Permutation id(size_);
    std::iota(id.begin(), id.end(), 0);
    if (!index_.count(id)) throw PreconditionError("FiniteGroupAction: identity missing");
    for (const auto& g : elements_) {
      if (!index_.count(inverse(g))) throw PreconditionError("FiniteGroupAction: inverse missing");
      for (const auto& h : elements_) {
        if (!index_.count(compose(g, h))) throw PreconditionError("FiniteGroupAction: not closed under composition");
      }
    }
  }

  // Closure of the generators under composition.
  static FiniteGroupAction generated_by(std::size_t size, const std::vector<Permutation>& generators) {
    Permutation id(size);
    std::iota(id.begin(), id.end(), 0);
    std::map<Permutation, bool> seen{{id, true}};
    std::vector<Permutation> order{id}, frontier{id};
    while (!frontier.empty()) {
      std::vector<Permutation> next;
      for (const auto& g : frontier)
        for (const auto& s : generators) {
          if (s.size() != size) throw PreconditionError("FiniteGroupAction: generator has wrong length");
          auto h = compose(s, g);
          if (seen.emplace(h, true).second) {
            order.push_back(h);
            next.push_back(std::move(h));
          }
        }
      frontier = std::move(next);
    }
    return FiniteGroupAction(size, std::move(order));
  }

  // Z_2^n acting on {0,1}^n (encoded as integers) by XOR with a fixed mask.
  static FiniteGroupAction bit_flips(unsigned n) {
    if (n > 16) throw PreconditionError("bit_flips: n too large");
    const std::size_t size = std::size_t{1} << n;
    std::vector<Permutation> els;
    for (std::size_t a = 0; a < size; ++a) {
      Permutation g(size);
      for (std::size_t x = 0; x < size; ++x) g[x] = x ^ a;
      els.push_back(std::move(g));
    }
    return FiniteGroupAction(size, std::move(els));
  }

  static FiniteGroupAction cyclic(std::size_t n) {
    if (n == 0) throw PreconditionError("cyclic: n must be positive");
    std::vector<Permutation> els;
    for (std::size_t r = 0; r < n; ++r) {
      Permutation g(n);
      for (std::size_t x = 0; x < n; ++x) g[x] = (x + r) % n;
      els.push_back(std::move(g));
    }
    return FiniteGroupAction(n, std::move(els));
  }

  // (g ∘ h)(x) = g(h(x)).
  static Permutation compose(const Permutation& g, const Permutation& h) {
    Permutation out(h.size());
    for (std::size_t x = 0; x < h.size(); ++x) out[x] = g[h[x]];
    return out;
  }
  static Permutation inverse(const Permutation& g) {
    Permutation out(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) out[g[x]] = x;
    return out;
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t order() const noexcept { return elements_.size(); }
  const std::vector<Permutation>& elements() const noexcept { return elements_; }

 private:
  struct Hash {
    std::size_t operator()(const Permutation& p) const noexcept {
      std::size_t h = 1469598103934665603ull;
      for (auto v : p) h = (h ^ v) * 1099511628211ull;
      return h;
    }
  };
  std::size_t size_;
  std::vector<Permutation> elements_;
  std::unordered_map<Permutation, std::size_t, Hash> index_;
};

// P(g y | g x) = P(y | x) for all g, x, y, i.e. relabelling the output by g
// is the same as feeding the input relabelled by g^{-1}.
inline bool covariant_channel_check(const StochasticMatrix& k, const FiniteGroupAction& g, double tol = 1e-12) {
  if (k.rows() != g.size() || k.cols() != g.size()) throw PreconditionError("covariant_channel_check: dimension mismatch");
  for (const auto& el : g.elements())
    for (std::size_t x = 0; x < g.size(); ++x)
      for (std::size_t y = 0; y < g.size(); ++y) {
        if (std::abs(k.at(el[y], el[x]) - k.at(y, x)) > tol) return false;
      }
  return true;
}

// I_G(P) = H(|G|^{-1} Σ_g P∘g) - H(P).
inline double reference_information(std::span<const double> p, const FiniteGroupAction& g) {
  if (p.size() != g.size()) throw PreconditionError("reference_information: distribution size differs from the action");
  std::vector<double> mix(p.size(), 0.0);
  const double w = 1.0 / static_cast<double>(g.order());
  for (const auto& el : g.elements())
    for (std::size_t x = 0; x < p.size(); ++x) mix[el[x]] += w * p[x];
  return entropy_bits(mix) - entropy_bits(p);
}

// Channel y = x XOR e with e ~ noise (a distribution on {0,1}^n).
inline StochasticMatrix xor_noise_channel(const std::vector<double>& noise) {
  const std::size_t n = noise.size();
  std::vector<double> v(n * n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) v[y * n + x] = noise[y ^ x];
  return StochasticMatrix(n, n, std::move(v));
}

// ---------------------------------------------------------------------------

// Cyclic random-walk smoother on {0..N-1}: a_ii = 1 - 2p, a_ij = p for
// i = j ± 1 (mod N). Doubly stochastic for p in [0, 1/2].
inline StochasticMatrix smoothing_matrix(std::size_t n, double p) {
  if (n < 2) throw PreconditionError("smoothing_matrix: N must be at least 2");
  if (!(p >= 0.0 && p <= 0.5)) throw PreconditionError("smoothing_matrix: p must lie in [0, 1/2]");
  std::vector<double> v(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    v[j * n + j] += 1 - 2 * p;
    v[((j + 1) % n) * n + j] += p;
    v[((j + n - 1) % n) * n + j] += p;
  }
  StochasticMatrix a(n, n, std::move(v));
  if (!a.is_doubly_stochastic()) throw PreconditionError("smoothing matrix is not doubly stochastic");
  return a;
}

// I(X:J) for J uniform over a finite family of distributions of X.
inline double family_information(const std::vector<std::vector<double>>& family) {
  if (family.empty()) throw PreconditionError("family_information: empty family");
  std::vector<double> mix(family.front().size(), 0.0);
  double mean_h = 0.0;
  for (const auto& p : family) {
    for (std::size_t i = 0; i < p.size(); ++i) mix[i] += p[i] / static_cast<double>(family.size());
    mean_h += entropy_bits(p) / static_cast<double>(family.size());
  }
  return entropy_bits(mix) - mean_h;
}

struct PeakFamily {
  std::size_t n = 120;
  std::size_t k = 4;
  double p = 0.25;
  std::size_t steps = 50;  // smoothing steps m
};

struct PeaksReport {
  PeakFamily family;
  std::size_t members = 0;  // family members averaged over
  double info_x = 0.0;      // I(X:J)
  double info_y = 0.0;      // I(Y:J)
  double delta_h = 0.0;     // mean H(Y_j) - H(X_j)
  double bound_bits = 0.0;  // lower bound on mean backward-map description length
  bool sampled = false;
};

namespace detail {

// First column of A^m for the cyclic smoother.
inline std::vector<double> smoothing_kernel(const PeakFamily& f) {
  const auto a = smoothing_matrix(f.n, f.p);
  std::vector<double> w(f.n, 0.0);
  w[0] = 1.0;
  for (std::size_t s = 0; s < f.steps; ++s) w = apply_kernel(a, w);
  return w;
}

inline std::vector<double> smooth_peaks(const std::vector<double>& w, const std::vector<std::size_t>& peaks) {
  const std::size_t n = w.size();
  std::vector<double> y(n, 0.0);
  const double mass = 1.0 / static_cast<double>(peaks.size());
  for (auto t : peaks)
    for (std::size_t i = 0; i < n; ++i) y[(i + t) % n] += mass * w[i];
  return y;
}

template <class F>
void for_each_subset_with_zero(std::size_t n, std::size_t k, F&& f) {
  std::vector<std::size_t> s{0};
  std::function<void(std::size_t)> rec = [&](std::size_t next) {
    if (s.size() == k) {
      f(s);
      return;
    }
    for (std::size_t v = next; v + (k - s.size()) <= n; ++v) {
      s.push_back(v);
      rec(v + 1);
      s.pop_back();
    }
  };
  rec(1);
}

inline void check_family(const PeakFamily& f) {
  if (f.k == 0 || f.k > f.n) throw PreconditionError("peaks_experiment: need 1 <= k <= N");
}

}  // namespace detail

// Exact over all k-subsets. The smoother is circulant, so entropies are
// invariant under rotating the peak set, and the average over all subsets
// equals the average over subsets that contain site 0. Both mixtures are
// uniform, hence I(X:J) = log2 N - log2 k and I(X:J) - I(Y:J) = ΔH.
inline PeaksReport peaks_experiment(const PeakFamily& f) {
  detail::check_family(f);
  const auto w = detail::smoothing_kernel(f);
  PeaksReport r;
  r.family = f;
  double sum_hy = 0.0;
  std::size_t count = 0;
  detail::for_each_subset_with_zero(f.n, f.k, [&](const std::vector<std::size_t>& s) {
    sum_hy += entropy_bits(detail::smooth_peaks(w, s));
    ++count;
  });
  r.members = count;
  const double hx = std::log2(static_cast<double>(f.k));
  const double hy = sum_hy / static_cast<double>(count);
  r.info_x = std::log2(static_cast<double>(f.n)) - hx;
  r.info_y = std::log2(static_cast<double>(f.n)) - hy;
  r.delta_h = hy - hx;
  r.bound_bits = r.delta_h;
  return r;
}

// Literal computation over every k-subset, for cross-checking small cases.
inline PeaksReport peaks_experiment_enumerated(const PeakFamily& f);

// Monte Carlo variant: J uniform over `samples` random k-subsets.
inline PeaksReport peaks_experiment_sampled(const PeakFamily& f, std::size_t samples, Philox4x32& rng) {
  detail::check_family(f);
  if (samples == 0) throw PreconditionError("peaks_experiment_sampled: samples must be positive");
  const auto w = detail::smoothing_kernel(f);
  std::vector<std::vector<double>> xs, ys;
  std::vector<std::size_t> sites(f.n);
  for (std::size_t t = 0; t < samples; ++t) {
    std::iota(sites.begin(), sites.end(), 0);
    rng.shuffle(sites);
    std::vector<std::size_t> peaks(sites.begin(), sites.begin() + static_cast<std::ptrdiff_t>(f.k));
    std::vector<double> x(f.n, 0.0);
    for (auto s : peaks) x[s] = 1.0 / static_cast<double>(f.k);
    xs.push_back(std::move(x));
    ys.push_back(detail::smooth_peaks(w, peaks));
  }
  PeaksReport r;
  r.family = f;
  r.members = samples;
  r.sampled = true;
  r.info_x = family_information(xs);
  r.info_y = family_information(ys);
  double hx = 0, hy = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    hx += entropy_bits(xs[i]);
    hy += entropy_bits(ys[i]);
  }
  r.delta_h = (hy - hx) / static_cast<double>(samples);
  r.bound_bits = r.delta_h;
  return r;
}

// ---------------------------------------------------------------------------

namespace detail {

// Phase-one simplex (Bland's rule): is {v >= 0 : A v = b} nonempty?
inline bool lp_feasible(std::vector<std::vector<double>> a, std::vector<double> b, double tol = 1e-9) {
  const std::size_t m = a.size();
  if (m == 0) return true;
  const std::size_t nv = a.front().size();
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0) {
      for (auto& v : a[i]) v = -v;
      b[i] = -b[i];
    }
  }
  // Columns: original variables, then one artificial per row, then rhs.
  const std::size_t cols = nv + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(a[i].begin(), a[i].end(), t[i].begin());
    t[i][nv + i] = 1.0;
    t[i][cols - 1] = b[i];
    basis[i] = nv + i;
  }
  // Objective row: minimize the sum of artificials, expressed in non-basics.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < cols; ++c) {
      if (c < nv || c == cols - 1) t[m][c] -= t[i][c];
    }
  for (int iter = 0; iter < 100000; ++iter) {
    std::size_t enter = cols;
    for (std::size_t c = 0; c + 1 < cols; ++c) {
      if (t[m][c] < -tol) {
        enter = c;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = m;
    double best = INFINITY;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > tol) {
        const double ratio = t[i][cols - 1] / t[i][enter];
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave < m && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen in phase one
    const double piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols; ++c) t[i][c] -= f * t[leave][c];
    }
    basis[leave] = enter;
  }
  return -t[m][cols - 1] <= 1e-8;
}

}  // namespace detail

// Is there one stochastic matrix B with B y_j = x_j for every j in the class?
inline bool shared_backward_map_exists(const std::vector<std::vector<double>>& xs,
                                       const std::vector<std::vector<double>>& ys) {
  if (xs.size() != ys.size() || xs.empty()) throw PreconditionError("shared_backward_map_exists: bad class");
  const std::size_t nx = xs.front().size(), ny = ys.front().size();
  constexpr double eps = 1e-15;
  // Columns of B that some y_j uses, and rows allowed in each such column.
  std::vector<std::size_t> cols;
  for (std::size_t l = 0; l < ny; ++l) {
    if (std::any_of(ys.begin(), ys.end(), [&](const auto& y) { return y[l] > eps; })) cols.push_back(l);
  }
  std::vector<std::pair<std::size_t, std::size_t>> vars;  // (row, column position)
  for (std::size_t c = 0; c < cols.size(); ++c) {
    bool any = false;
    for (std::size_t i = 0; i < nx; ++i) {
      bool ok = true;
      for (std::size_t j = 0; j < xs.size() && ok; ++j) {
        if (ys[j][cols[c]] > eps && xs[j][i] <= eps) ok = false;
      }
      if (ok) {
        vars.emplace_back(i, c);
        any = true;
      }
    }
    if (!any) return false;
  }
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::vector<double> row(vars.size(), 0.0);
    for (std::size_t v = 0; v < vars.size(); ++v) row[v] = vars[v].second == c ? 1.0 : 0.0;
    a.push_back(std::move(row));
    b.push_back(1.0);
  }
  for (std::size_t j = 0; j < xs.size(); ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      std::vector<double> row(vars.size(), 0.0);
      bool used = false;
      for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].first == i) {
          row[v] = ys[j][cols[vars[v].second]];
          used = used || row[v] != 0.0;
        }
      }
      if (!used) {
        if (xs[j][i] > 1e-12) return false;
        continue;
      }
      a.push_back(std::move(row));
      b.push_back(xs[j][i]);
    }
  return detail::lp_feasible(std::move(a), std::move(b));
}

struct PartitionCheckReport {
  std::size_t members = 0;
  std::size_t max_classes = 0;
  double info_x = 0.0;
  double info_y = 0.0;
  std::size_t partitions_checked = 0;  // admissible partitions into <= max_classes classes
  std::size_t min_classes = 0;          // fewest classes of an admissible partition
  std::size_t violations = 0;           // I(X:J) > log2 d + I(Y:J) + tol
  std::size_t chain_violations = 0;     // I(X:J|R) > I(Y:J|R) + tol
  double worst_margin = INFINITY;       // min over partitions of log2 d + I(Y:J) - I(X:J)
};

// For every partition of the family into at most `max_classes` classes that
// each admit one shared backward stochastic matrix, checks
//   I(X:J) <= H(R) + I(X:J|R) <= log2 d + I(Y:J|R) <= log2 d + I(Y:J).
inline PartitionCheckReport partition_check(const std::vector<std::vector<double>>& xs,
                                            const std::vector<std::vector<double>>& ys, std::size_t max_classes = 4,
                                            double tol = 1e-9) {
  const std::size_t l = xs.size();
  if (l != ys.size() || l == 0) throw PreconditionError("partition_check: family sizes differ or are zero");
  if (l > 16) throw PreconditionError("partition_check: at most 16 family members");
  PartitionCheckReport r;
  r.members = l;
  r.max_classes = max_classes;
  r.info_x = family_information(xs);
  r.info_y = family_information(ys);
  r.min_classes = 0;

  std::unordered_map<std::uint32_t, bool> feasible;
  auto class_ok = [&](std::uint32_t mask) {
    const auto it = feasible.find(mask);
    if (it != feasible.end()) return it->second;
    std::vector<std::vector<double>> cx, cy;
    for (std::size_t j = 0; j < l; ++j) {
      if (mask >> j & 1u) {
        cx.push_back(xs[j]);
        cy.push_back(ys[j]);
      }
    }
    const bool ok = shared_backward_map_exists(cx, cy);
    feasible.emplace(mask, ok);
    return ok;
  };
  // Conditional information given the class label, J uniform.
  auto conditional_info = [&](const std::vector<std::uint32_t>& classes, const std::vector<std::vector<double>>& fam) {
    double total = 0.0;
    for (auto mask : classes) {
      std::vector<std::vector<double>> sub;
      for (std::size_t j = 0; j < l; ++j) {
        if (mask >> j & 1u) sub.push_back(fam[j]);
      }
      total += static_cast<double>(sub.size()) / static_cast<double>(l) * family_information(sub);
    }
    return total;
  };

  std::vector<std::uint32_t> classes;
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == l) {
      ++r.partitions_checked;
      const std::size_t d = classes.size();
      if (r.min_classes == 0 || d < r.min_classes) r.min_classes = d;
      double h_r = 0.0;
      for (auto mask : classes) {
        const double w = static_cast<double>(std::popcount(mask)) / static_cast<double>(l);
        h_r -= w * std::log2(w);
      }
      const double ix_r = conditional_info(classes, xs);
      const double iy_r = conditional_info(classes, ys);
      if (ix_r > iy_r + tol) ++r.chain_violations;
      if (r.info_x > h_r + ix_r + tol) ++r.chain_violations;
      const double margin = std::log2(static_cast<double>(d)) + r.info_y - r.info_x;
      r.worst_margin = std::min(r.worst_margin, margin);
      if (margin < -tol) ++r.violations;
      return;
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto grown = classes[c] | (1u << j);
      if (!class_ok(grown)) continue;
      const auto old = classes[c];
      classes[c] = grown;
      rec(j + 1);
      classes[c] = old;
    }
    if (classes.size() < max_classes) {
      classes.push_back(1u << j);
      rec(j + 1);
      classes.pop_back();
    }
  };
  rec(0);
  return r;
}

// The family of all k-peak distributions on {0..N-1} and their smoothings.
inline std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>> peak_family_members(
    const PeakFamily& f) {
  detail::check_family(f);
  const auto w = detail::smoothing_kernel(f);
  std::vector<std::vector<double>> xs, ys;
  std::vector<std::size_t> s;
  std::function<void(std::size_t)> rec = [&](std::size_t next) {
    if (s.size() == f.k) {
      std::vector<double> x(f.n, 0.0);
      for (auto t : s) x[t] = 1.0 / static_cast<double>(f.k);
      xs.push_back(std::move(x));
      ys.push_back(detail::smooth_peaks(w, s));
      return;
    }
    for (std::size_t v = next; v + (f.k - s.size()) <= f.n; ++v) {
      s.push_back(v);
      rec(v + 1);
      s.pop_back();
    }
  };
  rec(0);
  return {xs, ys};
}

inline PeaksReport peaks_experiment_enumerated(const PeakFamily& f) {
  const auto [xs, ys] = peak_family_members(f);
  PeaksReport r;
  r.family = f;
  r.members = xs.size();
  r.info_x = family_information(xs);
  r.info_y = family_information(ys);
  double hx = 0, hy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    hx += entropy_bits(xs[i]);
    hy += entropy_bits(ys[i]);
  }
  r.delta_h = (hy - hx) / static_cast<double>(xs.size());
  r.bound_bits = r.delta_h;
  return r;
}

}  // namespace algomc
