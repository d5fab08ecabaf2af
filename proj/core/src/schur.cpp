#include "schurlab/schur.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "linalg.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/parallel.hpp"
#include "schurlab/rng.hpp"

namespace schurlab {

namespace {

double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void multiply(const Matrix& m, std::span<const double> v, std::span<double> out) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * v[j];
    out[i] = s;
  }
}

void multiply_transposed(const Matrix& m, std::span<const double> v, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j] * vi;
  }
}

std::unordered_set<Element, ElementHash> as_set(std::span<const Element> xs) {
  return {xs.begin(), xs.end()};
}

void require_same_group(const Group& a, const Group& b) {
  if (!(a == b)) throw ValidationError("kernel and operator live on different groups");
}

}  // namespace

Window::Window(Group group, std::vector<Element> elements) : group_(std::move(group)) {
  for (const auto& x : elements) group_.validate(x);
  std::sort(elements.begin(), elements.end());
  if (std::adjacent_find(elements.begin(), elements.end()) != elements.end()) {
    throw ValidationError("window contains duplicate elements");
  }
  elements_ = std::move(elements);
  index_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i], i);
}

std::shared_ptr<const Window> Window::ball(const Group& g, int radius) {
  auto b = g.ball_at_identity(radius);
  return std::make_shared<const Window>(g, *b);
}

std::optional<std::size_t> Window::index_of(const Element& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WindowOperator::WindowOperator(std::shared_ptr<const Window> window, Matrix matrix)
    : window_(std::move(window)), matrix_(std::move(matrix)) {
  if (!window_) throw ValidationError("window operator needs a window");
  if (matrix_.rows() != window_->size() || matrix_.cols() != window_->size()) {
    throw ValidationError("matrix shape does not match the window");
  }
  for (double v : matrix_.data()) {
    if (!std::isfinite(v)) throw ValidationError("window operator entries must be finite");
  }
}

WindowOperator WindowOperator::zero(std::shared_ptr<const Window> window) {
  const std::size_t n = window->size();
  return WindowOperator(std::move(window), Matrix(n, n));
}

WindowOperator WindowOperator::identity(std::shared_ptr<const Window> window) {
  const std::size_t n = window->size();
  return WindowOperator(std::move(window), Matrix::identity(n));
}

double WindowOperator::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : matrix_.data()) m = std::max(m, std::abs(v));
  return m;
}

WindowOperator WindowOperator::operator-(const WindowOperator& other) const {
  if (window_ != other.window_ && !std::ranges::equal(window_->elements(), other.window().elements())) {
    throw ValidationError("operators live on different windows");
  }
  Matrix out = matrix_;
  auto dst = out.data();
  auto src = other.matrix_.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
  return WindowOperator(window_, std::move(out));
}

WindowOperator tube_mask(std::shared_ptr<const Window> window, std::span<const Element> set) {
  const auto members = as_set(set);
  const Group& g = window->group();
  const std::size_t n = window->size();
  Matrix m(n, n);
  std::vector<Element> inverses;
  inverses.reserve(n);
  for (const auto& y : window->elements()) inverses.push_back(g.inv(y));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (members.contains(g.mul((*window)[i], inverses[j]))) m(i, j) = 1.0;
    }
  }
  return WindowOperator(std::move(window), std::move(m));
}

WindowOperator schur_product(const Kernel& k, const WindowOperator& t) {
  const Window& w = t.window();
  const Group& g = w.group();
  require_same_group(k.group(), g);
  const std::size_t n = w.size();
  Matrix m(n, n);
  std::vector<Element> inverses;
  inverses.reserve(n);
  for (const auto& y : w.elements()) inverses.push_back(g.inv(y));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double tij = t(i, j);
      if (tij == 0.0) continue;
      m(i, j) = k(g.mul(w[i], inverses[j])) * tij;
    }
  }
  return WindowOperator(t.window_ptr(), std::move(m));
}

WindowOperator convolution_operator(const Kernel& k, std::shared_ptr<const Window> window) {
  const std::size_t n = window->size();
  return schur_product(k, WindowOperator(std::move(window), Matrix(n, n, 1.0)));
}

NormResult op_norm_power(const Matrix& m, double rel_tol, std::size_t max_iterations) {
  NormResult out;
  out.method = "power";
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows == 0 || cols == 0) return out;

  std::vector<double> v(cols, 1.0 / std::sqrt(static_cast<double>(cols)));
  std::vector<double> tv(rows);
  std::vector<double> w(cols);
  double previous = -1.0;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    multiply(m, v, tv);
    multiply_transposed(m, tv, w);
    // Rayleigh quotient of T^T T at the unit vector v.
    const double lambda = std::inner_product(v.begin(), v.end(), w.begin(), 0.0);
    const double wn = euclidean_norm(w);
    out.iterations = it;
    out.value = std::sqrt(std::max(lambda, 0.0));
    if (wn == 0.0) {
      if (it == 1) {
        // The all-ones start lies in the kernel of T; restart from the basis
        // vector with the largest column norm.
        std::size_t best = 0;
        double best_norm = -1.0;
        for (std::size_t j = 0; j < cols; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < rows; ++i) s += m(i, j) * m(i, j);
          if (s > best_norm) {
            best_norm = s;
            best = j;
          }
        }
        if (best_norm == 0.0) return out;  // T = 0
        std::fill(v.begin(), v.end(), 0.0);
        v[best] = 1.0;
        previous = -1.0;
        continue;
      }
      return out;
    }
    if (previous >= 0.0 && std::abs(lambda - previous) <= rel_tol * lambda) {
      out.converged = true;
      return out;
    }
    previous = lambda;
    for (std::size_t j = 0; j < cols; ++j) v[j] = w[j] / wn;
  }
  out.converged = false;
  return out;
}

NormResult op_norm(const Matrix& m) {
  if (m.rows() < kSvdThreshold && m.cols() < kSvdThreshold) {
    NormResult out;
    out.method = "svd";
    out.value = detail::max_singular_value_svd(m);
    return out;
  }
  return op_norm_power(m);
}

NormResult op_norm(const WindowOperator& t) {
  NormResult out = op_norm(t.matrix());
  const double sup = t.sup_norm();
  if (out.converged && out.value < sup * (1.0 - 1e-9) - 1e-12) {
    throw std::logic_error("operator norm fell below the largest entry");
  }
  return out;
}

double fin_prop_bound(const WindowOperator& t, std::span<const Element> set) {
  const auto mask = tube_mask(t.window_ptr(), set);
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (t(i, j) != 0.0 && mask(i, j) == 0.0) {
        throw ValidationError("operator support leaves Tube(F) at (" +
                              t.window().group().format(t.window()[i]) + ", " +
                              t.window().group().format(t.window()[j]) + ")");
      }
    }
  }
  const auto members = as_set(set);
  return static_cast<double>(members.size()) * t.sup_norm();
}

SchurTestBound schur_test_bound(const WindowOperator& t, std::span<const double> weights) {
  const std::size_t n = t.size();
  if (weights.size() != n) throw ValidationError("one weight per window element is required");
  for (double p : weights) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("Schur test weights must be positive");
  }
  SchurTestBound out;
  for (std::size_t x = 0; x < n; ++x) {
    double row = 0.0;
    double col = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
      row += std::abs(t(x, z)) * weights[z];
      col += std::abs(t(z, x)) * weights[z];
    }
    out.c1 = std::max(out.c1, row / weights[x]);
    out.c2 = std::max(out.c2, col / weights[x]);
  }
  out.bound = std::sqrt(out.c1 * out.c2);
  return out;
}

SchurTestBound schur_test_bound(const WindowOperator& t) {
  const std::vector<double> ones(t.size(), 1.0);
  return schur_test_bound(t, ones);
}

L1MultiplierBound l1_multiplier_bound(const SparseFunction& f, const WindowOperator& t) {
  const Kernel kf = Kernel::make(f.group(), {f.entries().begin(), f.entries().end()}, "k_f");
  L1MultiplierBound out;
  out.multiplied_norm = op_norm(schur_product(kf, t)).value;
  out.base_norm = op_norm(t).value;
  out.l1_norm = norm_p(f, 1.0);
  out.ratio = out.base_norm == 0.0 ? 0.0 : out.multiplied_norm / out.base_norm;
  out.holds = out.multiplied_norm <= out.l1_norm * out.base_norm + 1e-9;
  return out;
}

WindowOperator random_operator(std::shared_ptr<const Window> window, std::uint64_t seed,
                               std::optional<std::span<const Element>> tube) {
  const std::size_t n = window->size();
  Matrix m(n, n);
  CounterRng rng(seed);
  for (auto& v : m.data()) v = rng.uniform(-1.0, 1.0);
  if (tube) {
    const auto mask = tube_mask(window, *tube);
    auto data = m.data();
    auto bits = mask.matrix().data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= bits[i];
  }
  return WindowOperator(std::move(window), std::move(m));
}

CpNormReport cp_norm_check(const Kernel& k, std::shared_ptr<const Window> window,
                           std::size_t trials, std::uint64_t seed, unsigned threads) {
  const Group& g = window->group();
  require_same_group(k.group(), g);
  // [k(x y^{-1})]_{x,y in W} is the Gram matrix of k on W^{-1}.
  std::vector<Element> inverted;
  inverted.reserve(window->size());
  for (const auto& x : window->elements()) inverted.push_back(g.inv(x));
  const auto psd = gram_psd_check(k, inverted, 1e-9, std::max(kDefaultGramCap, inverted.size()));
  if (!psd.psd) {
    throw ValidationError("kernel is not positive definite on the window (lambda_min = " +
                          std::to_string(psd.min_eigenvalue) + ")");
  }

  CpNormReport report;
  report.trials = trials;
  report.kernel_at_identity = k.at_identity();
  const auto id = WindowOperator::identity(window);
  const double id_norm = op_norm(id).value;
  report.witness_ratio = id_norm == 0.0 ? 0.0 : op_norm(schur_product(k, id)).value / id_norm;

  std::vector<double> ratios(trials, 0.0);
  std::vector<char> violated(trials, 0);
  parallel_for(trials, threads, [&](std::size_t i) {
    const auto t = random_operator(window, stream_seed(seed, i));
    const double base = op_norm(t).value;
    const double multiplied = op_norm(schur_product(k, t)).value;
    ratios[i] = base == 0.0 ? 0.0 : multiplied / base;
    violated[i] = multiplied > report.kernel_at_identity * base + 1e-8 ? 1 : 0;
  });
  for (std::size_t i = 0; i < trials; ++i) {
    report.max_ratio = std::max(report.max_ratio, ratios[i]);
    report.upper_violations += static_cast<std::size_t>(violated[i]);
  }
  return report;
}

Kernel cutoff(const Kernel& k, std::span<const Element> set) {
  const auto members = as_set(set);
  std::vector<Entry> kept;
  for (const auto& [s, v] : k.entries()) {
    if (members.contains(s)) kept.emplace_back(s, v);
  }
  return Kernel::make(k.group(), std::move(kept), k.label().empty() ? "r_F" : "r_F(" + k.label() + ")");
}

std::vector<LadderStep> convolution_norm_ladder(const Kernel& k, std::span<const int> radii,
                                                std::size_t max_window) {
  std::vector<LadderStep> out;
  for (int r : radii) {
    std::shared_ptr<const std::vector<Element>> ball;
    try {
      ball = k.group().ball_at_identity(r);
    } catch (const ResourceError&) {
      break;
    }
    if (ball->size() > max_window) break;
    auto window = std::make_shared<const Window>(k.group(), *ball);
    LadderStep step;
    step.radius = r;
    step.window_size = window->size();
    step.norm = op_norm(convolution_operator(k, window)).value;
    out.push_back(step);
  }
  return out;
}

}  // namespace schurlab
