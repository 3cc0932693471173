#include "nstab/gauss.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nstab/error.hpp"
#include "nstab/quadrature.hpp"

namespace nstab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOuterRange = 10.0;
// Absolute error target of the nested integrals, relative to ||f||_2^r.
constexpr double kNormTolerance = 1e-7;
constexpr int kMaxBisections = 40;
constexpr double kLevelTighten = 1e-1;
// Root-count samples per panel when locating breakpoints.
constexpr int kRootSamples = 24;
constexpr std::size_t kMaxHermiteTerms = 1'000'000;

void enumerate_level(int n, int remaining, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[static_cast<std::size_t>(pos)] = remaining;
    out.push_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[static_cast<std::size_t>(pos)] = k;
    enumerate_level(n, remaining - k, pos + 1, cur, out);
  }
}

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("noise eta must lie in (0,1)");
}

// Monomial coefficients of h_0..h_degree: row k holds h_k.
const std::vector<std::vector<double>>& hermite_monomials(int degree) {
  static std::mutex mu;
  static std::vector<std::vector<double>> he{{1.0}, {0.0, 1.0}};
  std::lock_guard lock(mu);
  while (static_cast<int>(he.size()) <= degree) {
    const std::size_t k = he.size() - 1;
    std::vector<double> next(k + 2, 0.0);
    for (std::size_t j = 0; j < he[k].size(); ++j) next[j + 1] += he[k][j];
    for (std::size_t j = 0; j < he[k - 1].size(); ++j) next[j] -= static_cast<double>(k) * he[k - 1][j];
    he.push_back(std::move(next));
  }
  static std::vector<std::vector<double>> normalized;
  while (static_cast<int>(normalized.size()) <= degree) {
    const std::size_t k = normalized.size();
    std::vector<double> row = he[k];
    const double scale = 1.0 / std::sqrt(std::tgamma(static_cast<double>(k) + 1.0));
    for (double& v : row) v *= scale;
    normalized.push_back(std::move(row));
  }
  return normalized;
}

double horner(const double* a, std::size_t size, double x) {
  double acc = 0.0;
  for (std::size_t j = size; j-- > 0;) acc = acc * x + a[j];
  return acc;
}

void hermite_values_into(double x, int degree, double* h) {
  h[0] = 1.0;
  if (degree >= 1) h[1] = x;
  for (int k = 1; k < degree; ++k) {
    h[k + 1] = (x * h[k] - std::sqrt(static_cast<double>(k)) * h[k - 1]) / std::sqrt(static_cast<double>(k + 1));
  }
}

// Reused storage for the one-dimensional norm, which runs millions of times
// inside the nested integrals.
struct RootScratch {
  std::vector<Eigen::MatrixXd> companions;
  std::vector<std::unique_ptr<Eigen::EigenSolver<Eigen::MatrixXd>>> solvers;
  std::vector<double> deriv;
  std::vector<double> roots;
  std::vector<double> mono;
  std::vector<double> cuts;
  std::vector<double> seg;
  std::vector<double> ha;
  std::vector<double> hb;
  std::vector<double> sturm_a;
  std::vector<double> sturm_b;
};

RootScratch& scratch() {
  thread_local RootScratch s;
  return s;
}

// Real roots of sum_j a_j x^j (a[d] != 0), sorted and deduplicated into
// `roots`.
void real_roots(const double* a, std::size_t d, RootScratch& sc) {
  auto& roots = sc.roots;
  roots.clear();
  if (d == 0) return;
  if (d == 1) {
    roots.push_back(-a[0] / a[1]);
    return;
  }
  if (sc.solvers.size() <= d) {
    sc.solvers.resize(d + 1);
    sc.companions.resize(d + 1);
  }
  const auto m = static_cast<Eigen::Index>(d);
  if (!sc.solvers[d]) {
    sc.solvers[d] = std::make_unique<Eigen::EigenSolver<Eigen::MatrixXd>>(m);
    sc.companions[d] = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 1; j < m; ++j) sc.companions[d](j, j - 1) = 1.0;
  }
  Eigen::MatrixXd& companion = sc.companions[d];
  for (Eigen::Index j = 0; j < m; ++j) companion(j, m - 1) = -a[static_cast<std::size_t>(j)] / a[d];
  auto& solver = *sc.solvers[d];
  solver.compute(companion, false);
  if (solver.info() != Eigen::Success) throw NumericError("polynomial root solve failed");
  sc.deriv.resize(d);
  for (std::size_t j = 1; j <= d; ++j) sc.deriv[j - 1] = static_cast<double>(j) * a[j];
  for (Eigen::Index j = 0; j < m; ++j) {
    const std::complex<double> z = solver.eigenvalues()(j);
    if (std::abs(z.imag()) > 1e-7 * std::max(1.0, std::abs(z))) continue;
    double x = z.real();
    for (int it = 0; it < 3; ++it) {
      const double dp = horner(sc.deriv.data(), d, x);
      if (dp == 0.0) break;
      const double step = horner(a, d + 1, x) / dp;
      if (!std::isfinite(step) || std::abs(step) > 1e-3 * std::max(1.0, std::abs(x))) break;
      x -= step;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double u, double v) { return std::abs(u - v) <= 1e-12 * std::max(1.0, std::abs(u)); }),
              roots.end());
}

// int_a^b h_k dphi for k = 0..degree into sc.seg.
void hermite_segment_integrals(double a, double b, int degree, RootScratch& sc) {
  const auto size = static_cast<std::size_t>(degree) + 1;
  sc.seg.resize(size);
  sc.ha.assign(size, 0.0);
  sc.hb.assign(size, 0.0);
  sc.seg[0] = (a <= 0.0 ? normal_cdf(b) - normal_cdf(a) : normal_sf(a) - normal_sf(b));
  if (degree == 0) return;
  if (!std::isinf(a)) hermite_values_into(a, degree, sc.ha.data());
  if (!std::isinf(b)) hermite_values_into(b, degree, sc.hb.data());
  const double pa = normal_pdf(a);
  const double pb = normal_pdf(b);
  for (int k = 1; k <= degree; ++k) {
    const auto km = static_cast<std::size_t>(k - 1);
    sc.seg[static_cast<std::size_t>(k)] = (sc.ha[km] * pa - sc.hb[km] * pb) / std::sqrt(static_cast<double>(k));
  }
}

// int |g|^r dphi for g = sum_k u_k h_k in one variable; optionally reports
// the number of distinct real roots of g.
double univariate_lr(const std::vector<double>& u, double r, int* root_count = nullptr) {
  if (root_count) *root_count = 0;
  double big = 0.0;
  for (double v : u) big = std::max(big, std::abs(v));
  if (big == 0.0) return 0.0;
  std::size_t d = u.size() - 1;
  while (d > 0 && std::abs(u[d]) <= 1e-15 * big) --d;
  if (d == 0) return std::pow(std::abs(u[0]), r);
  if (r == 2.0 && !root_count) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= d; ++k) acc += u[k] * u[k];
    return acc;
  }
  RootScratch& sc = scratch();
  const auto& mono = hermite_monomials(static_cast<int>(d));
  sc.mono.assign(d + 1, 0.0);
  for (std::size_t k = 0; k <= d; ++k) {
    for (std::size_t j = 0; j < mono[k].size(); ++j) sc.mono[j] += u[k] * mono[k][j];
  }
  real_roots(sc.mono.data(), d, sc);
  auto& cuts = sc.cuts;
  cuts.assign(1, -kInf);
  cuts.insert(cuts.end(), sc.roots.begin(), sc.roots.end());
  cuts.push_back(kInf);
  if (root_count) *root_count = static_cast<int>(cuts.size()) - 2;
  if (r == 2.0) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= d; ++k) acc += u[k] * u[k];
    return acc;
  }

  double total = 0.0;
  if (r == 1.0) {
    // g has one sign on each segment, so |int g| = int |g| there.
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      hermite_segment_integrals(cuts[s], cuts[s + 1], static_cast<int>(d), sc);
      double acc = 0.0;
      for (std::size_t k = 0; k <= d; ++k) acc += u[k] * sc.seg[k];
      total += std::abs(acc);
    }
    return total;
  }
  const std::vector<double> a = sc.mono;
  const std::vector<double> segments = cuts;
  auto integrand = [&a, r](double x) {
    return std::pow(std::abs(horner(a.data(), a.size(), x)), r) * normal_pdf(x);
  };
  for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
    total += integrate(integrand, segments[s], segments[s + 1], 1e-12);
  }
  return total;
}

// Number of distinct real roots of the Hermite series u, from a Sturm chain.
// Only used to locate breakpoints, so a miscount costs accuracy of the split
// and never the value of the integral.
int sturm_root_count(const std::vector<double>& u) {
  double big = 0.0;
  for (double v : u) big = std::max(big, std::abs(v));
  if (big == 0.0) return 0;
  std::size_t d = u.size() - 1;
  while (d > 0 && std::abs(u[d]) <= 1e-15 * big) --d;
  if (d == 0) return 0;
  RootScratch& sc = scratch();
  const auto& mono = hermite_monomials(static_cast<int>(d));
  std::vector<double>& p0 = sc.sturm_a;
  std::vector<double>& p1 = sc.sturm_b;
  p0.assign(d + 1, 0.0);
  for (std::size_t k = 0; k <= d; ++k) {
    for (std::size_t j = 0; j < mono[k].size(); ++j) p0[j] += u[k] * mono[k][j];
  }
  p1.assign(d, 0.0);
  for (std::size_t j = 1; j <= d; ++j) p1[j - 1] = static_cast<double>(j) * p0[j];
  // Signs of each chain member at -inf and +inf.
  int changes_lo = 0;
  int changes_hi = 0;
  int last_lo = 0;
  int last_hi = 0;
  auto push = [&](const std::vector<double>& q) {
    const int s_hi = q.back() > 0.0 ? 1 : -1;
    const int s_lo = (q.size() - 1) % 2 == 0 ? s_hi : -s_hi;
    if (last_hi != 0 && s_hi != last_hi) ++changes_hi;
    if (last_lo != 0 && s_lo != last_lo) ++changes_lo;
    last_hi = s_hi;
    last_lo = s_lo;
  };
  auto trim = [](std::vector<double>& q, double scale) {
    while (!q.empty() && std::abs(q.back()) <= 1e-12 * scale) q.pop_back();
  };
  auto max_abs = [](const std::vector<double>& q) {
    double m = 0.0;
    for (double v : q) m = std::max(m, std::abs(v));
    return m;
  };
  push(p0);
  trim(p1, max_abs(p1));
  while (!p1.empty()) {
    push(p1);
    if (p1.size() == 1) break;
    // p0 <- -(p0 mod p1), then swap.
    const double scale = max_abs(p0);
    const std::size_t k = p1.size() - 1;
    for (std::size_t top = p0.size() - 1; top >= k; --top) {
      const double q = p0[top] / p1[k];
      for (std::size_t j = 0; j <= k; ++j) p0[top - k + j] -= q * p1[j];
      if (top == k) break;
    }
    p0.resize(k);
    for (double& v : p0) v = -v;
    trim(p0, scale);
    const double m = max_abs(p0);
    if (m > 0.0) {
      for (double& v : p0) v /= m;
    }
    std::swap(p0, p1);
  }
  return changes_lo - changes_hi;
}

struct RuleValue {
  double value;
  double error;
};

// Kronrod 15-point value with |K15 - G7| from the same evaluations.
template <typename F>
RuleValue kronrod15(const F& f, double a, double b) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& x = gauss_kronrod<double, 15>::abscissa();
  const auto& wk = gauss_kronrod<double, 15>::weights();
  const auto& wg = gauss<double, 7>::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double k = wk[0] * f0;
  double g = wg[0] * f0;
  for (std::size_t j = 1; j < x.size(); ++j) {
    const double pair = f(c - h * x[j]) + f(c + h * x[j]);
    k += wk[j] * pair;
    if (j % 2 == 0) g += wg[j / 2] * pair;
  }
  return {k * h, std::abs(k - g) * h};
}

// Bisects until the Kronrod error estimate meets an absolute budget, halving
// the budget per split so that only intervals around kinks get refined.
template <typename F>
double integrate_absolute(const F& f, double a, double b, double tol, int depth) {
  const RuleValue r = kronrod15(f, a, b);
  if (r.error <= tol || depth == 0) return r.value;
  const double m = 0.5 * (a + b);
  return integrate_absolute(f, a, m, 0.5 * tol, depth - 1) + integrate_absolute(f, m, b, 0.5 * tol, depth - 1);
}

// Integrates |f|^r: the last coordinate exactly, the one before it piecewise
// between the points where the real-root count of the restriction changes,
// and any remaining ones adaptively.
class LrIntegrator {
 public:
  LrIntegrator(const HermiteExpansion& f, double r, int panels)
      : f_(f), r_(r), panels_(panels), n_(f.n()), degree_(f.degree()),
        hv_(static_cast<std::size_t>(n_), std::vector<double>(static_cast<std::size_t>(degree_) + 1)),
        u_(static_cast<std::size_t>(degree_) + 1),
        tol_(kNormTolerance * std::max(std::pow(f.l2_norm(), r), 1e-300)) {}

  double run() { return n_ == 1 ? inner(nullptr) : level(0); }

 private:
  double at(int i, double x, int* roots) {
    hermite_values_into(x, degree_, hv_[static_cast<std::size_t>(i)].data());
    return (i == n_ - 2 ? inner(roots) : level(i + 1)) * normal_pdf(x);
  }

  double level(int i) {
    const double width = 2.0 * kOuterRange / panels_;
    // Inner levels must be quieter than the budget of the level above.
    const double level_tol = tol_ * std::pow(kLevelTighten, i) * width / (2.0 * kOuterRange);
    double acc = 0.0;
    for (int p = 0; p < panels_; ++p) {
      const double a = -kOuterRange + p * width;
      if (i == n_ - 2) {
        acc += breakpoint_panel(i, a, a + width, level_tol);
      } else {
        auto g = [this, i](double x) { return at(i, x, nullptr); };
        acc += integrate_absolute(g, a, a + width, level_tol, kMaxBisections);
      }
    }
    return acc;
  }

  int root_count(int i, double x) {
    hermite_values_into(x, degree_, hv_[static_cast<std::size_t>(i)].data());
    fill_inner_coefficients();
    return sturm_root_count(u_);
  }

  // Splits [a, b] where the root count changes; there the integrand behaves
  // like |x - x0|^{3/2}, which x = x0 + s^2 makes smooth.
  double breakpoint_panel(int i, double a, double b, double tol) {
    std::vector<double> breaks{a};
    double prev_x = a;
    int prev = root_count(i, a);
    for (int k = 1; k <= kRootSamples; ++k) {
      const double x = a + (b - a) * k / kRootSamples;
      const int cur = root_count(i, x);
      if (cur != prev) {
        double lo = prev_x;
        double hi = x;
        while (hi - lo > 1e-13 * std::max(1.0, std::abs(lo))) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          (root_count(i, mid) == prev ? lo : hi) = mid;
        }
        breaks.push_back(0.5 * (lo + hi));
      }
      prev = cur;
      prev_x = x;
    }
    breaks.push_back(b);
    const std::size_t last = breaks.size() - 2;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double share = tol * (breaks[k + 1] - breaks[k]) / (b - a);
      acc += piece(i, breaks[k], breaks[k + 1], k > 0, k < last, share);
    }
    return acc;
  }

  double piece(int i, double lo, double hi, bool kink_lo, bool kink_hi, double tol) {
    if (kink_lo && kink_hi) {
      const double mid = 0.5 * (lo + hi);
      return piece(i, lo, mid, true, false, 0.5 * tol) + piece(i, mid, hi, false, true, 0.5 * tol);
    }
    const double len = hi - lo;
    if (kink_lo || kink_hi) {
      const double anchor = kink_lo ? lo : hi;
      const double sign = kink_lo ? 1.0 : -1.0;
      auto g = [=, this](double s) { return at(i, anchor + sign * len * s * s, nullptr) * 2.0 * len * s; };
      return integrate_absolute(g, 0.0, 1.0, tol, kMaxBisections);
    }
    auto g = [this, i](double x) { return at(i, x, nullptr); };
    return integrate_absolute(g, lo, hi, tol, kMaxBisections);
  }

  double inner(int* roots) {
    fill_inner_coefficients();
    return univariate_lr(u_, r_, roots);
  }

  // Hermite coefficients in the last coordinate with the others fixed.
  void fill_inner_coefficients() {
    std::vector<double>& u = u_;
    std::fill(u.begin(), u.end(), 0.0);
    const auto& set = f_.indices();
    for (std::size_t j = 0; j < set.size(); ++j) {
      const double c = f_[j];
      if (c == 0.0) continue;
      const MultiIndex& alpha = set[j];
      double w = c;
      for (int k = 0; k + 1 < n_; ++k) {
        w *= hv_[static_cast<std::size_t>(k)][static_cast<std::size_t>(alpha[static_cast<std::size_t>(k)])];
      }
      u[static_cast<std::size_t>(alpha.back())] += w;
    }
  }

  const HermiteExpansion& f_;
  double r_;
  int panels_;
  int n_;
  int degree_;
  std::vector<std::vector<double>> hv_;
  std::vector<double> u_;
  double tol_;
};

void check_norm_args(const HermiteExpansion& f, double r, int quad_order) {
  if (std::isnan(r) || r < 1.0 || std::isinf(r)) throw InvalidParameter("Gaussian L^r norm needs finite r >= 1");
  if (quad_order < f.degree() + 1) throw InvalidParameter("quad_order must be at least degree + 1");
  if (f.n() > kMaxQuadratureDimension) {
    throw SizeLimit("quadrature supports n <= " + std::to_string(kMaxQuadratureDimension));
  }
}

}  // namespace

HermiteIndexSet::HermiteIndexSet(int n, int degree) : n_(n), degree_(degree) {
  MultiIndex cur(static_cast<std::size_t>(n), 0);
  for (int d = 0; d <= degree; ++d) {
    enumerate_level(n, d, 0, cur, indices_);
    orders_.resize(indices_.size(), d);
    if (indices_.size() > kMaxHermiteTerms) throw SizeLimit("Hermite index set too large");
  }
  for (std::size_t j = 0; j < indices_.size(); ++j) lookup_.emplace(indices_[j], j);
}

std::shared_ptr<const HermiteIndexSet> HermiteIndexSet::get(int n, int degree) {
  if (n < 1) throw InvalidParameter("Gaussian dimension must be >= 1");
  if (degree < 0) throw InvalidParameter("Hermite degree must be >= 0");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const HermiteIndexSet>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{n, degree}];
  if (!slot) slot = std::shared_ptr<const HermiteIndexSet>(new HermiteIndexSet(n, degree));
  return slot;
}

std::size_t HermiteIndexSet::find(const MultiIndex& alpha) const {
  const auto it = lookup_.find(alpha);
  return it == lookup_.end() ? size() : it->second;
}

std::vector<double> hermite_values(double x, int degree) {
  if (degree < 0) throw InvalidParameter("degree must be >= 0");
  std::vector<double> h(static_cast<std::size_t>(degree) + 1);
  hermite_values_into(x, degree, h.data());
  return h;
}

HermiteExpansion::HermiteExpansion(int n, int degree)
    : set_(HermiteIndexSet::get(n, degree)), c_(set_->size(), 0.0) {}

HermiteExpansion::HermiteExpansion(int n, int degree, std::vector<double> coefficients)
    : set_(HermiteIndexSet::get(n, degree)), c_(std::move(coefficients)) {
  if (c_.size() != set_->size()) {
    throw InvalidParameter("expected " + std::to_string(set_->size()) + " Hermite coefficients");
  }
}

HermiteExpansion HermiteExpansion::basis(int n, int degree, const MultiIndex& alpha, double c) {
  HermiteExpansion f(n, degree);
  f.set_coefficient(alpha, c);
  return f;
}

double HermiteExpansion::coefficient(const MultiIndex& alpha) const {
  const std::size_t j = set_->find(alpha);
  return j == set_->size() ? 0.0 : c_[j];
}

void HermiteExpansion::set_coefficient(const MultiIndex& alpha, double value) {
  if (alpha.size() != static_cast<std::size_t>(n())) throw InvalidParameter("multi-index has wrong length");
  const std::size_t j = set_->find(alpha);
  if (j == set_->size()) throw InvalidParameter("multi-index exceeds the truncation degree");
  c_[j] = value;
}

double HermiteExpansion::evaluate(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(n())) throw InvalidParameter("point has wrong dimension");
  std::vector<std::vector<double>> hv(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) hv[i] = hermite_values(x[i], degree());
  double acc = 0.0;
  for (std::size_t j = 0; j < c_.size(); ++j) {
    if (c_[j] == 0.0) continue;
    double term = c_[j];
    const MultiIndex& alpha = (*set_)[j];
    for (std::size_t i = 0; i < x.size(); ++i) term *= hv[i][static_cast<std::size_t>(alpha[i])];
    acc += term;
  }
  return acc;
}

double HermiteExpansion::l2_norm() const {
  double acc = 0.0;
  for (double v : c_) acc += v * v;
  return std::sqrt(acc);
}

double HermiteExpansion::variance() const {
  double acc = 0.0;
  for (std::size_t j = 1; j < c_.size(); ++j) acc += c_[j] * c_[j];
  return acc;
}

int HermiteExpansion::effective_degree() const {
  int best = -1;
  for (std::size_t j = 0; j < c_.size(); ++j) {
    if (c_[j] != 0.0) best = std::max(best, set_->order(j));
  }
  return best;
}

HermiteExpansion& HermiteExpansion::operator+=(const HermiteExpansion& other) {
  if (other.set_ != set_) throw InvalidParameter("expansions have different index sets");
  for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += other.c_[j];
  return *this;
}

HermiteExpansion& HermiteExpansion::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

HermiteExpansion operator+(HermiteExpansion a, const HermiteExpansion& b) { return a += b; }
HermiteExpansion operator*(double s, HermiteExpansion a) { return a *= s; }

HermiteExpansion ou_apply(const HermiteExpansion& f, double t) {
  if (!(t >= 0.0)) throw InvalidParameter("time must be >= 0");
  HermiteExpansion out = f;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= std::exp(-t * f.indices().order(j));
  return out;
}

HermiteExpansion partial_derivative(const HermiteExpansion& f, int i) {
  if (i < 0 || i >= f.n()) throw InvalidParameter("partial derivative coordinate out of range");
  HermiteExpansion out(f.n(), f.degree());
  const auto& set = f.indices();
  const auto ui = static_cast<std::size_t>(i);
  for (std::size_t j = 0; j < set.size(); ++j) {
    const int k = set[j][ui];
    if (k == 0 || f[j] == 0.0) continue;
    MultiIndex lower = set[j];
    lower[ui] = k - 1;
    out[set.find(lower)] += std::sqrt(static_cast<double>(k)) * f[j];
  }
  return out;
}

double dirichlet_energy(const HermiteExpansion& f) {
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f.indices().order(j) * f[j] * f[j];
  return acc;
}

HermiteExpansion restrict_to_coordinates(const HermiteExpansion& f,
                                         std::span<const std::size_t> coords) {
  std::vector<bool> keep(static_cast<std::size_t>(f.n()), false);
  for (std::size_t k : coords) {
    if (k >= keep.size()) throw InvalidParameter("coordinate out of range");
    keep[k] = true;
  }
  HermiteExpansion out = f;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const MultiIndex& alpha = f.indices()[j];
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] != 0 && !keep[i]) {
        out[j] = 0.0;
        break;
      }
    }
  }
  return out;
}

double gaussian_noise_stability(const HermiteExpansion& f, double eta) {
  check_eta(eta);
  const double rho = std::sqrt(1.0 - eta * eta);
  double acc = 0.0;
  for (std::size_t j = 1; j < f.size(); ++j) acc += std::pow(rho, f.indices().order(j)) * f[j] * f[j];
  return acc;
}

double lr_norm_gauss_value(const HermiteExpansion& f, double r, int quad_order) {
  check_norm_args(f, r, quad_order);
  if (r == 2.0) return f.l2_norm();
  LrIntegrator integrator(f, r, quad_order);
  return std::pow(std::max(0.0, integrator.run()), 1.0 / r);
}

NormEstimate lr_norm_gauss(const HermiteExpansion& f, double r, int quad_order) {
  NormEstimate out;
  out.value = lr_norm_gauss_value(f, r, quad_order);
  if (r != 2.0 && f.n() > 1) {
    out.refinement_delta = std::abs(out.value - lr_norm_gauss_value(f, r, 2 * quad_order));
  }
  return out;
}

NormEstimate l1_norm_gauss(const HermiteExpansion& f, int quad_order) {
  return lr_norm_gauss(f, 1.0, quad_order);
}

double tensor_expectation(const std::function<double(std::span<const double>)>& g, int n,
                          int order) {
  if (n < 1 || n > kMaxQuadratureDimension) {
    throw SizeLimit("tensor quadrature supports 1 <= n <= " + std::to_string(kMaxQuadratureDimension));
  }
  const GaussHermiteRule rule = gauss_hermite_rule(order);
  const auto m = static_cast<std::size_t>(order);
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  double acc = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      x[i] = rule.nodes[idx[i]];
      w *= rule.weights[idx[i]];
    }
    acc += w * g(x);
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == m) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  return acc;
}

double sup_on_tensor_grid(const HermiteExpansion& f, int order) {
  double best = 0.0;
  tensor_expectation(
      [&](std::span<const double> x) {
        best = std::max(best, std::abs(f.evaluate(x)));
        return 0.0;
      },
      f.n(), order);
  return best;
}

LineMeasure::LineMeasure(bool gaussian, double exponent, double z)
    : gaussian_(gaussian), exponent_(exponent), z_(z) {}

LineMeasure LineMeasure::gaussian() { return LineMeasure(true, 2.0, std::sqrt(2.0 * std::numbers::pi)); }

LineMeasure LineMeasure::exponential_power(double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw InvalidParameter("exponent p must be finite and >= 1");
  const double half = integrate([p](double x) { return std::exp(-std::pow(x, p)); }, 0.0, kInf, 1e-13);
  return LineMeasure(false, p, 2.0 * half);
}

double LineMeasure::pdf(double x) const {
  if (std::isinf(x)) return 0.0;
  if (gaussian_) return normal_pdf(x);
  return std::exp(-std::pow(std::abs(x), exponent_)) / z_;
}

double LineMeasure::sf(double x) const {
  if (x == kInf) return 0.0;
  if (x == -kInf) return 1.0;
  if (gaussian_) return normal_sf(x);
  if (exponent_ == 2.0) return normal_sf(x * std::numbers::sqrt2);
  if (x < 0.0) return 1.0 - sf(-x);
  const double p = exponent_;
  const double tail = integrate([p](double y) { return std::exp(-std::pow(y, p)); }, x, kInf, 1e-13);
  return tail / z_;
}

double LineMeasure::cdf(double x) const {
  if (x > 0.0) return 1.0 - sf(x);
  return sf(-x);
}

double LineMeasure::upper_quantile(double tail) const {
  if (!(tail > 0.0 && tail < 1.0)) throw InvalidParameter("tail probability must lie in (0,1)");
  double lo = -1.0;
  double hi = 1.0;
  for (int k = 0; sf(lo) < tail; ++k) {
    lo *= 2.0;
    if (k > 60) throw NumericError("quantile bracket search failed");
  }
  for (int k = 0; sf(hi) > tail; ++k) {
    hi *= 2.0;
    if (k > 60) throw NumericError("quantile bracket search failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sf(mid) > tail) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) return 0.5 * (lo + hi);
  }
  throw NumericError("quantile bisection did not converge");
}

double box_measure(const HalfspaceBox& box) {
  double m = 1.0;
  for (double a : box.thresholds) m *= box.measure.cdf(a);
  return m;
}

double box_indicator(const HalfspaceBox& box, std::span<const double> x) {
  if (x.size() != box.thresholds.size()) throw InvalidParameter("point has wrong dimension");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > box.thresholds[i]) return 0.0;
  }
  return 1.0;
}

double geometric_influence_halfspace(const HalfspaceBox& box, int i) {
  if (i < 0 || static_cast<std::size_t>(i) >= box.thresholds.size()) {
    throw InvalidParameter("coordinate out of range");
  }
  const double ai = box.thresholds[static_cast<std::size_t>(i)];
  if (std::isinf(ai)) return 0.0;
  double rest = 1.0;
  for (std::size_t j = 0; j < box.thresholds.size(); ++j) {
    if (j != static_cast<std::size_t>(i)) rest *= box.measure.cdf(box.thresholds[j]);
  }
  return rest * box.measure.pdf(ai);
}

double gaussian_noise_stability_box(const HalfspaceBox& box, double eta) {
  check_eta(eta);
  if (!box.measure.is_gaussian()) throw Unsupported("box noise stability needs Gaussian coordinates");
  const double rho = std::sqrt(1.0 - eta * eta);
  double joint = 1.0;
  double marginal = 1.0;
  for (double a : box.thresholds) {
    joint *= bivariate_normal_cdf(a, a, rho);
    const double f = normal_cdf(a);
    marginal *= f * f;
  }
  return joint - marginal;
}

McEstimate gaussian_noise_stability_mc(const std::function<double(std::span<const double>)>& f,
                                       int n, double eta, std::size_t samples,
                                       std::uint64_t seed) {
  check_eta(eta);
  if (n < 1) throw InvalidParameter("dimension must be >= 1");
  if (samples < 1) throw InvalidParameter("need at least one sample");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double rho = std::sqrt(1.0 - eta * eta);
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> v(static_cast<std::size_t>(n));
  std::vector<double> a(samples);
  std::vector<double> b(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = normal(rng);
      v[i] = rho * w[i] + eta * normal(rng);
    }
    a[k] = f(w);
    b[k] = f(v);
  }
  return pooled_covariance(a, b);
}

KmsResult kms_example(int n, double p_exp) {
  if (n < 2) throw InvalidParameter("kms example needs n >= 2");
  if (!(p_exp >= 2.0)) throw InvalidParameter("kms example needs exponent p >= 2");
  const LineMeasure measure = LineMeasure::exponential_power(p_exp);
  const double nn = static_cast<double>(n);
  // F(a)^n = 1/2, i.e. sf(a) = 1 - 2^{-1/n}.
  const double tail = -std::expm1(-std::numbers::ln2 / nn);
  KmsResult out;
  out.threshold = measure.upper_quantile(tail);
  out.influence = std::exp2(-(nn - 1.0) / nn) * measure.pdf(out.threshold);
  out.scaled_ratio = out.influence * nn / std::pow(std::log(nn), 1.0 - 1.0 / p_exp);
  return out;
}

}  // namespace nstab
