#include "nstab/boolean.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "nstab/error.hpp"

namespace nstab {
namespace {

void check_dimension(int n) {
  if (n < 1 || n > kMaxCubeDimension) {
    throw SizeLimit("cube dimension must be in [1, " + std::to_string(kMaxCubeDimension) + "]");
  }
}

void check_bias(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("bias p must lie in (0,1)");
}

void check_coordinate(const CubeFunction& f, int i) {
  if (i < 0 || i >= f.n()) {
    throw InvalidParameter("coordinate " + std::to_string(i + 1) + " out of range 1.." +
                           std::to_string(f.n()));
  }
}

double time_from_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("noise eta must lie in (0,1)");
  return -std::log1p(-eta);
}

// In-place unnormalized Walsh-Hadamard butterfly.
void fwht(std::vector<double>& a) {
  for (std::size_t h = 1; h < a.size(); h <<= 1) {
    for (std::size_t i = 0; i < a.size(); i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double x = a[j];
        const double y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
    }
  }
}

double boolean_value(bool truth, BooleanRange range) {
  if (range == BooleanRange::kZeroOne) return truth ? 1.0 : 0.0;
  return truth ? 1.0 : -1.0;
}

}  // namespace

CubeFunction::CubeFunction(int n, std::vector<double> values, double p)
    : n_(n), p_(p), values_(std::move(values)) {
  check_dimension(n);
  check_bias(p);
  if (values_.size() != (std::size_t{1} << n)) {
    throw InvalidParameter("cube table needs 2^n entries");
  }
}

double CubeFunction::weight(std::size_t x) const {
  if (uniform()) return std::ldexp(1.0, -n_);
  const int plus = std::popcount(x);
  return std::pow(1.0 - p_, plus) * std::pow(p_, n_ - plus);
}

SpacePtr CubeFunction::space() const { return cube_space(n_, p_); }

TableFunction CubeFunction::to_table() const { return TableFunction(space(), values_); }

CubeFunction CubeFunction::from_table(const TableFunction& f, double p) {
  const auto& space = f.space();
  const int n = static_cast<int>(space.factor_count());
  if (!space.has_factors() || space.size() != (std::size_t{1} << n)) {
    throw InvalidParameter("table is not on a cube space");
  }
  return CubeFunction(n, std::vector<double>(f.values().begin(), f.values().end()), p);
}

bool CubeFunction::is_indicator() const {
  for (double v : values_) {
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

SpacePtr cube_space(int n, double p) {
  check_dimension(n);
  check_bias(p);
  std::vector<Factor> factors(static_cast<std::size_t>(n), Factor{2, {p, 1.0 - p}});
  return FiniteProductSpace::product(std::move(factors));
}

CubeFunction discrete_derivative(const CubeFunction& f, int i) {
  check_coordinate(f, i);
  std::vector<double> out(f.size());
  const std::size_t flip = std::size_t{1} << i;
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = f[x ^ flip] - f[x];
  return CubeFunction(f.n(), std::move(out), f.p());
}

double influence(const CubeFunction& f, int i, double r) {
  if (std::isnan(r) || r < 1.0) throw InvalidParameter("influence norm needs r >= 1");
  const CubeFunction d = discrete_derivative(f, i);
  if (std::isinf(r)) {
    double best = 0.0;
    for (double v : d.values()) best = std::max(best, std::abs(v));
    return best;
  }
  double acc = 0.0;
  for (std::size_t x = 0; x < d.size(); ++x) acc += std::pow(std::abs(d[x]), r) * f.weight(x);
  return std::pow(acc, 1.0 / r);
}

std::vector<double> influence_profile(const CubeFunction& f, double r) {
  std::vector<double> out(static_cast<std::size_t>(f.n()));
  for (int i = 0; i < f.n(); ++i) out[static_cast<std::size_t>(i)] = influence(f, i, r);
  return out;
}

double set_influence(const CubeFunction& indicator, int i) {
  check_coordinate(indicator, i);
  if (!indicator.is_indicator()) throw DomainError("set influence needs a 0/1 indicator");
  const std::size_t flip = std::size_t{1} << i;
  double acc = 0.0;
  for (std::size_t x = 0; x < indicator.size(); ++x) {
    if (indicator[x] == 1.0 && indicator[x ^ flip] == 0.0) acc += indicator.weight(x);
  }
  return acc;
}

WalshExpansion walsh_transform(const CubeFunction& f) {
  if (!f.uniform()) throw Unsupported("Walsh transform is defined for the uniform measure only");
  std::vector<double> a = f.values();
  fwht(a);
  // chi_S(x) = (-1)^{|S|} (-1)^{|S & x|} under the bit encoding.
  const double scale = std::ldexp(1.0, -f.n());
  for (std::size_t s = 0; s < a.size(); ++s) {
    a[s] *= (std::popcount(s) % 2 ? -scale : scale);
  }
  return WalshExpansion{f.n(), std::move(a)};
}

CubeFunction inverse_walsh(const WalshExpansion& expansion) {
  std::vector<double> a = expansion.coefficients;
  if (a.size() != (std::size_t{1} << expansion.n)) {
    throw InvalidParameter("Walsh expansion needs 2^n coefficients");
  }
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (std::popcount(s) % 2) a[s] = -a[s];
  }
  fwht(a);
  return CubeFunction(expansion.n, std::move(a));
}

CubeFunction bonami_beckner_kernel(const CubeFunction& f, double t) {
  if (!f.uniform()) throw Unsupported("Bonami-Beckner kernel is defined for the uniform measure");
  if (!(t >= 0.0)) throw InvalidParameter("time must be >= 0");
  const double rho = std::exp(-t);
  const double w = std::ldexp(1.0, -f.n());
  // prod_i (1 + rho x_i w_i) depends only on the Hamming distance d(x, w):
  // (1 + rho)^{n-d} (1 - rho)^d.
  std::vector<double> kernel(static_cast<std::size_t>(f.n()) + 1);
  for (int d = 0; d <= f.n(); ++d) {
    kernel[static_cast<std::size_t>(d)] = std::pow(1.0 + rho, f.n() - d) * std::pow(1.0 - rho, d);
  }
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t x = 0; x < f.size(); ++x) {
    double acc = 0.0;
    for (std::size_t y = 0; y < f.size(); ++y) {
      acc += f[y] * kernel[static_cast<std::size_t>(std::popcount(x ^ y))];
    }
    out[x] = acc * w;
  }
  return CubeFunction(f.n(), std::move(out));
}

CubeFunction bonami_beckner(const CubeFunction& f, double t) {
  if (!(t >= 0.0)) throw InvalidParameter("time must be >= 0");
  WalshExpansion e = walsh_transform(f);
  for (std::size_t s = 0; s < e.coefficients.size(); ++s) {
    e.coefficients[s] *= std::exp(-t * std::popcount(s));
  }
  return inverse_walsh(e);
}

CubeFunction cube_semigroup(const CubeFunction& f, double t) {
  if (!(t >= 0.0)) throw InvalidParameter("time must be >= 0");
  if (t == 0.0) return f;
  // exp(t (E_i - Id)) = e^{-t} Id + (1 - e^{-t}) E_i; the factors commute.
  const double keep = std::exp(-t);
  const double mix = -std::expm1(-t);
  const double p = f.p();
  std::vector<double> v = f.values();
  for (int i = 0; i < f.n(); ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t x = 0; x < v.size(); ++x) {
      if (x & bit) continue;
      const double minus = v[x];
      const double plus = v[x | bit];
      const double avg = p * minus + (1.0 - p) * plus;
      v[x] = keep * minus + mix * avg;
      v[x | bit] = keep * plus + mix * avg;
    }
  }
  return CubeFunction(f.n(), std::move(v), f.p());
}

double noise_stability(const CubeFunction& f, double eta) {
  const double t = time_from_eta(eta);
  if (f.uniform()) {
    const WalshExpansion e = walsh_transform(f);
    double acc = 0.0;
    for (std::size_t s = 1; s < e.coefficients.size(); ++s) {
      acc += std::pow(1.0 - eta, std::popcount(s)) * e.coefficients[s] * e.coefficients[s];
    }
    return acc;
  }
  const CubeFunction pf = cube_semigroup(f, t);
  double m = 0.0;
  double cross = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    m += f[x] * f.weight(x);
    cross += f[x] * pf[x] * f.weight(x);
  }
  return cross - m * m;
}

McEstimate noise_stability_mc(const CubeFunction& f, double eta, std::size_t samples,
                              std::uint64_t seed) {
  if (samples < 1) throw InvalidParameter("need at least one sample");
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("noise eta must lie in (0,1)");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution plus(1.0 - f.p());
  std::bernoulli_distribution redraw(eta);
  std::vector<double> a(samples);
  std::vector<double> b(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    std::size_t x = 0;
    std::size_t y = 0;
    for (int i = 0; i < f.n(); ++i) {
      const std::size_t bit = std::size_t{1} << i;
      const bool xi = plus(rng);
      bool yi = xi;
      if (redraw(rng)) yi = plus(rng);
      if (xi) x |= bit;
      if (yi) y |= bit;
    }
    a[k] = f[x];
    b[k] = f[y];
  }
  return pooled_covariance(a, b);
}

Generator build_cube_generator(int n, double p) {
  check_bias(p);
  if (n < 1 || n > kMaxCubeGeneratorDimension) {
    throw SizeLimit("dense cube generator supports 1 <= n <= " +
                    std::to_string(kMaxCubeGeneratorDimension));
  }
  SpacePtr space = cube_space(n, p);
  if (p != 0.5) return build_product_projection_generator(std::move(space));

  const auto size = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(size, size);
  std::vector<Direction> dirs;
  for (int i = 0; i < n; ++i) {
    const Eigen::Index flip = Eigen::Index{1} << i;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(2 * size));
    for (Eigen::Index x = 0; x < size; ++x) {
      trips.emplace_back(x, x ^ flip, 0.5);
      trips.emplace_back(x, x, -0.5);
      L(x, x ^ flip) += 0.5;
      L(x, x) -= 0.5;
    }
    SparseOp op(size, size);
    op.setFromTriplets(trips.begin(), trips.end());
    dirs.push_back({"D" + std::to_string(i + 1) + "/2", std::move(op)});
  }
  return Generator(std::move(space), std::move(L), std::move(dirs), 0.0, 1.0, 1.0);
}

CubeFunction constant_function(int n, double c, double p) {
  check_dimension(n);
  return CubeFunction(n, std::vector<double>(std::size_t{1} << n, c), p);
}

CubeFunction dictator(int n, int coordinate, BooleanRange range, double p) {
  check_dimension(n);
  if (coordinate < 0 || coordinate >= n) throw InvalidParameter("dictator coordinate out of range");
  std::vector<double> v(std::size_t{1} << n);
  for (std::size_t x = 0; x < v.size(); ++x) v[x] = boolean_value((x >> coordinate) & 1U, range);
  return CubeFunction(n, std::move(v), p);
}

CubeFunction parity(int n, BooleanRange range, double p) {
  check_dimension(n);
  std::vector<double> v(std::size_t{1} << n);
  // prod x_i = +1 iff the number of -1 coordinates is even.
  for (std::size_t x = 0; x < v.size(); ++x) v[x] = boolean_value((n - std::popcount(x)) % 2 == 0, range);
  return CubeFunction(n, std::move(v), p);
}

CubeFunction majority(int n, BooleanRange range, double p) {
  check_dimension(n);
  if (n % 2 == 0) throw InvalidParameter("majority needs an odd number of coordinates");
  std::vector<double> v(std::size_t{1} << n);
  for (std::size_t x = 0; x < v.size(); ++x) v[x] = boolean_value(2 * std::popcount(x) > n, range);
  return CubeFunction(n, std::move(v), p);
}

CubeFunction tribes(int n, int width, BooleanRange range, double p) {
  check_dimension(n);
  if (width < 1 || n % width != 0) throw InvalidParameter("tribes width must divide n");
  const std::size_t tribe_mask = (std::size_t{1} << width) - 1;
  std::vector<double> v(std::size_t{1} << n);
  for (std::size_t x = 0; x < v.size(); ++x) {
    bool any = false;
    for (int start = 0; start < n && !any; start += width) {
      any = ((x >> start) & tribe_mask) == tribe_mask;
    }
    v[x] = boolean_value(any, range);
  }
  return CubeFunction(n, std::move(v), p);
}

CubeFunction parse_cube_function(std::istream& in, double p) {
  std::vector<std::pair<std::size_t, double>> entries;
  int n = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string bits;
    if (!(ls >> bits)) continue;
    double value = 0.0;
    if (!(ls >> value)) {
      throw InvalidParameter("line " + std::to_string(line_no) + ": expected '<bitstring> <value>'");
    }
    std::string extra;
    if (ls >> extra) throw InvalidParameter("line " + std::to_string(line_no) + ": trailing text");
    if (n < 0) {
      n = static_cast<int>(bits.size());
      check_dimension(n);
    } else if (static_cast<int>(bits.size()) != n) {
      throw InvalidParameter("line " + std::to_string(line_no) + ": bitstring length changed");
    }
    std::size_t x = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
      const char c = bits[j];
      if (c == '1' || c == '+') {
        x |= std::size_t{1} << j;
      } else if (c != '0' && c != '-') {
        throw InvalidParameter("line " + std::to_string(line_no) + ": bad character in bitstring");
      }
    }
    entries.emplace_back(x, value);
  }
  if (n < 0) throw InvalidParameter("function file is empty");
  std::vector<double> values(std::size_t{1} << n, 0.0);
  std::vector<bool> seen(values.size(), false);
  for (const auto& [x, value] : entries) {
    if (seen[x]) throw InvalidParameter("state listed twice in function file");
    seen[x] = true;
    values[x] = value;
  }
  for (bool s : seen) {
    if (!s) throw InvalidParameter("function file does not list every state");
  }
  return CubeFunction(n, std::move(values), p);
}

void write_cube_function(std::ostream& out, const CubeFunction& f) {
  char buf[32];
  for (std::size_t x = 0; x < f.size(); ++x) {
    for (int j = 0; j < f.n(); ++j) out << (((x >> j) & 1U) ? '1' : '0');
    std::snprintf(buf, sizeof buf, "%.17g", f[x]);
    out << ' ' << buf << '\n';
  }
}

}  // namespace nstab
