#include "nstab/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nstab/boolean.hpp"
#include "nstab/bounds.hpp"
#include "nstab/error.hpp"
#include "nstab/gauss.hpp"
#include "nstab/groups.hpp"
#include "nstab/junta.hpp"
#include "nstab/markov.hpp"
#include "nstab/report.hpp"

namespace nstab::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double to_number(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("not a number: " + s);
  }
  if (pos != s.size()) throw UsageError("not a number: " + s);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

// ---- models ---------------------------------------------------------------

struct Model {
  std::string kind;
  std::string name;
  int n = 0;
  double p = 0.5;
  int m = 0;
  int degree = kDefaultHermiteDegree;
  LineMeasure measure = LineMeasure::gaussian();
  std::shared_ptr<const CayleySystem> system;

  bool cube() const { return kind == "cube"; }
  bool cayley() const { return kind == "torus" || kind == "symmetric"; }
  bool gaussian() const { return kind == "gaussian"; }
};

Model build_model(const std::string& text) {
  if (text.empty()) throw UsageError("--model is required");
  const Descriptor d = parse_descriptor(text);
  Model model;
  model.kind = d.name;
  model.name = text;
  for (const auto& [key, value] : d.params) {
    static const std::map<std::string, std::vector<std::string>> allowed = {
        {"cube", {"n", "p"}},
        {"torus", {"m", "n"}},
        {"symmetric", {"n"}},
        {"gaussian", {"n", "degree", "p"}}};
    const auto it = allowed.find(d.name);
    if (it == allowed.end()) throw UsageError("unknown model " + d.name);
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
      throw UsageError("model " + d.name + " has no parameter " + key);
    }
  }
  if (d.name == "cube") {
    model.n = d.integer("n", 3);
    model.p = d.number("p", 0.5);
    cube_space(model.n, model.p);
  } else if (d.name == "torus") {
    model.m = d.integer("m", 3);
    model.n = d.integer("n", 2);
    model.system = std::make_shared<const CayleySystem>(build_torus(model.m, model.n));
  } else if (d.name == "symmetric") {
    model.n = d.integer("n", 4);
    model.system = std::make_shared<const CayleySystem>(build_symmetric_group(model.n));
  } else if (d.name == "gaussian") {
    model.n = d.integer("n", 1);
    model.degree = d.integer("degree", kDefaultHermiteDegree);
    if (model.n < 1 || model.degree < 0) throw UsageError("gaussian needs n >= 1, degree >= 0");
    if (d.params.contains("p")) model.measure = LineMeasure::exponential_power(d.number("p", 2.0));
  } else {
    throw UsageError("unknown model " + d.name);
  }
  return model;
}

// ---- functions ------------------------------------------------------------

struct Functions {
  std::vector<CubeInstance> cube;
  std::vector<CayleyInstance> table;
  std::vector<HermiteInstance> hermite;
  std::vector<BoxInstance> boxes;

  bool empty() const { return cube.empty() && table.empty() && hermite.empty() && boxes.empty(); }
};

BooleanRange range_of(const Descriptor& d, const std::string& fallback) {
  const std::string r = d.text("range", fallback);
  if (r == "pm") return BooleanRange::kPlusMinusOne;
  if (r == "01") return BooleanRange::kZeroOne;
  throw UsageError("range must be pm or 01");
}

double lo_value(BooleanRange r) { return r == BooleanRange::kZeroOne ? 0.0 : -1.0; }

std::string instance_id(const std::string& text, const std::string& suffix = "") {
  // CSV cells must not contain commas.
  std::string id = text;
  std::replace(id.begin(), id.end(), ',', ';');
  return id + suffix;
}

void add_cube(const Model& model, const Descriptor& d, const std::string& text, std::mt19937_64& rng,
              Functions& fns) {
  const int n = model.n;
  const double p = model.p;
  const BooleanRange range = range_of(d, "pm");
  if (d.name == "constant") {
    fns.cube.push_back({instance_id(text), constant_function(n, d.number("c", 1.0), p)});
  } else if (d.name == "dictator") {
    fns.cube.push_back({instance_id(text), dictator(n, d.integer("i", 1) - 1, range, p)});
  } else if (d.name == "parity") {
    fns.cube.push_back({instance_id(text), parity(n, range, p)});
  } else if (d.name == "majority") {
    fns.cube.push_back({instance_id(text), majority(n, range, p)});
  } else if (d.name == "tribes") {
    fns.cube.push_back({instance_id(text), tribes(n, d.integer("w", 3), range, p)});
  } else if (d.name == "random") {
    const int count = d.integer("count", 1);
    if (n > kMaxCubeDimension) throw SizeLimit("cube dimension too large");
    const double lo = lo_value(range);
    for (int k = 0; k < count; ++k) {
      std::vector<double> values(std::size_t{1} << n);
      for (double& v : values) v = (rng() >> 63) ? 1.0 : lo;
      fns.cube.push_back({instance_id(text, "#" + std::to_string(k)), CubeFunction(n, values, p)});
    }
  } else if (d.name == "file") {
    const std::string path = d.text("path", "");
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open function file " + path);
    CubeFunction f = parse_cube_function(in, p);
    if (f.n() != n) throw UsageError("function file dimension does not match the model");
    fns.cube.push_back({instance_id(text), std::move(f)});
  } else {
    throw UsageError("unknown cube function " + d.name);
  }
}

void add_cayley(const Model& model, const Descriptor& d, const std::string& text,
                std::mt19937_64& rng, Functions& fns) {
  const auto& space = model.system->model.space;
  const std::size_t size = space->size();
  const BooleanRange range = range_of(d, "01");
  const double lo = lo_value(range);
  auto make = [&](const std::function<bool(std::size_t)>& member) {
    std::vector<double> values(size);
    for (std::size_t x = 0; x < size; ++x) values[x] = member(x) ? 1.0 : lo;
    return TableFunction(space, std::move(values));
  };
  if (d.name == "constant") {
    fns.table.push_back({instance_id(text), TableFunction::constant(space, d.number("c", 1.0))});
  } else if (d.name == "coord") {
    const int i = d.integer("i", 1);
    if (i < 1 || i > model.n) throw UsageError("coord index out of range");
    const auto k = static_cast<std::size_t>(i - 1);
    if (model.kind == "torus") {
      const auto v = static_cast<std::size_t>(d.integer("v", 0));
      fns.table.push_back({instance_id(text), make([&](std::size_t x) {
                             return space->coordinate(x, k) == v;
                           })});
    } else {
      // sigma(i) = v with 1-based i and v.
      const int v = d.integer("v", i) - 1;
      fns.table.push_back({instance_id(text), make([&](std::size_t x) {
                             return permutation_at(model.n, x)[k] == v;
                           })});
    }
  } else if (d.name == "random") {
    const int count = d.integer("count", 1);
    const double density = d.number("density", 0.5);
    std::bernoulli_distribution coin(density);
    for (int k = 0; k < count; ++k) {
      fns.table.push_back({instance_id(text, "#" + std::to_string(k)),
                           make([&](std::size_t) { return coin(rng); })});
    }
  } else {
    throw UsageError("unknown function " + d.name + " for " + model.kind);
  }
}

MultiIndex parse_alpha(const std::string& s, int n) {
  MultiIndex alpha;
  for (const auto& part : split(s, '.')) alpha.push_back(static_cast<int>(to_number(part)));
  if (static_cast<int>(alpha.size()) != n) throw UsageError("alpha needs one entry per coordinate");
  return alpha;
}

void add_gaussian(const Model& model, const Descriptor& d, const std::string& text,
                  std::mt19937_64& rng, Functions& fns) {
  const int n = model.n;
  const int degree = model.degree;
  const bool boxlike = d.name == "halfspace" || d.name == "box";
  if (!boxlike && !model.measure.is_gaussian()) {
    throw UsageError("Hermite expansions need the Gaussian measure");
  }
  if (d.name == "constant") {
    fns.hermite.push_back(
        {instance_id(text), HermiteExpansion::basis(n, degree, MultiIndex(n, 0), d.number("c", 1.0))});
  } else if (d.name == "hermite") {
    fns.hermite.push_back({instance_id(text),
                           HermiteExpansion::basis(n, degree, parse_alpha(d.text("alpha", ""), n),
                                                   d.number("c", 1.0))});
  } else if (d.name == "random") {
    const int count = d.integer("count", 1);
    const int top = d.integer("degree", degree);
    std::normal_distribution<double> normal;
    for (int k = 0; k < count; ++k) {
      HermiteExpansion f(n, degree);
      for (std::size_t j = 1; j < f.size(); ++j) {
        if (f.indices().order(j) <= top) f[j] = normal(rng);
      }
      fns.hermite.push_back({instance_id(text, "#" + std::to_string(k)), std::move(f)});
    }
  } else if (boxlike) {
    const double a = d.number("a", 0.0);
    HalfspaceBox box{std::vector<double>(static_cast<std::size_t>(n), a), model.measure};
    if (d.name == "halfspace") {
      const int i = d.integer("i", 1);
      if (i < 1 || i > n) throw UsageError("halfspace coordinate out of range");
      for (int k = 0; k < n; ++k) {
        if (k != i - 1) box.thresholds[static_cast<std::size_t>(k)] = kInfinity;
      }
    }
    fns.boxes.push_back({instance_id(text), std::move(box)});
  } else {
    throw UsageError("unknown gaussian function " + d.name);
  }
}

Functions build_functions(const Model& model, const std::vector<std::string>& texts,
                          std::uint64_t seed) {
  if (texts.empty()) throw UsageError("--fn is required");
  std::mt19937_64 rng(seed);
  Functions fns;
  for (const auto& text : texts) {
    const Descriptor d = parse_descriptor(text);
    if (model.cube()) {
      add_cube(model, d, text, rng, fns);
    } else if (model.cayley()) {
      add_cayley(model, d, text, rng, fns);
    } else {
      add_gaussian(model, d, text, rng, fns);
    }
  }
  return fns;
}

// ---- output ---------------------------------------------------------------

void emit_json(const RunConfig& cfg, const json& j, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw UsageError("cannot write " + cfg.out);
  file << text;
}

std::ofstream open_csv(const RunConfig& cfg) {
  std::ofstream file(cfg.csv, std::ios::binary);
  if (!file) throw UsageError("cannot write " + cfg.csv);
  return file;
}

json base_spec(const RunConfig& cfg) {
  json spec;
  spec["command"] = cfg.command;
  spec["functions"] = cfg.functions;
  spec["seed"] = cfg.seed;
  return spec;
}

// ---- commands -------------------------------------------------------------

int cmd_influences(const RunConfig& cfg, std::ostream& out) {
  const Model model = build_model(cfg.model);
  const Functions fns = build_functions(model, cfg.functions, cfg.seed);
  json rows = json::array();
  auto push = [&](const std::string& id, const std::vector<std::string>& names,
                  const std::vector<double>& profile) {
    double total = 0.0;
    for (double v : profile) total += v;
    rows.push_back({{"function_id", id}, {"directions", names}, {"profile", profile},
                    {"total", total}});
  };
  std::vector<std::string> coord_names;
  for (int i = 1; i <= model.n; ++i) coord_names.push_back("x" + std::to_string(i));
  for (const auto& inst : fns.cube) push(inst.id, coord_names, influence_profile(inst.f, 1.0));
  for (const auto& inst : fns.table) {
    const auto& cm = model.system->model;
    std::vector<double> profile;
    for (std::size_t s = 0; s < cm.generator_count(); ++s) {
      profile.push_back(cayley_derivative_norm(cm, inst.f, s, 1.0));
    }
    push(inst.id, cm.generator_names, profile);
  }
  const int order = cfg.quad_order > 0 ? cfg.quad_order : default_quad_order(model.degree);
  for (const auto& inst : fns.hermite) {
    std::vector<double> profile;
    for (int i = 0; i < model.n; ++i) {
      profile.push_back(lr_norm_gauss_value(partial_derivative(inst.f, i), 1.0, order));
    }
    push(inst.id, coord_names, profile);
  }
  for (const auto& inst : fns.boxes) {
    std::vector<double> profile;
    for (int i = 0; i < model.n; ++i) profile.push_back(geometric_influence_halfspace(inst.box, i));
    push(inst.id, coord_names, profile);
  }
  json j;
  j["spec"] = base_spec(cfg);
  j["model"] = model.name;
  j["instances"] = rows;
  emit_json(cfg, j, out);
  if (!cfg.csv.empty()) {
    auto file = open_csv(cfg);
    file << "function_id,direction,value\n";
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < row["profile"].size(); ++k) {
        file << row["function_id"].get<std::string>() << ','
             << row["directions"][k].get<std::string>() << ','
             << format_double(row["profile"][k].get<double>()) << '\n';
      }
    }
  }
  return kExitPass;
}

// Continuous-time walk g -> g s at unit rate, s uniform in S.
McEstimate cayley_stability_mc(const CayleyModel& cm, const TableFunction& f, double t,
                               std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> start(0, cm.order() - 1);
  std::uniform_int_distribution<std::size_t> step(0, cm.generator_count() - 1);
  std::poisson_distribution<int> jumps(t);
  std::vector<double> a(samples), b(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    std::size_t g = start(rng);
    a[k] = f[g];
    for (int j = jumps(rng); j > 0; --j) g = cm.right_mult[step(rng)][g];
    b[k] = f[g];
  }
  return pooled_covariance(a, b);
}

int cmd_stability(const RunConfig& cfg, std::ostream& out) {
  const Model model = build_model(cfg.model);
  const Functions fns = build_functions(model, cfg.functions, cfg.seed);
  const std::vector<double> grid =
      cfg.grid.empty() ? linear_grid(0.05, 0.95, 19) : parse_grid(cfg.grid);
  for (double eta : grid) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw UsageError("stability grid values must lie in [0,1]");
  }
  json rows = json::array();
  auto push = [&](const std::string& id, double eta, double exact,
                  const std::optional<McEstimate>& mc) {
    json row{{"function_id", id}, {"eta", eta}, {"exact", exact}};
    if (mc) {
      row["mc"] = mc->estimate;
      row["mc_std_error"] = mc->std_error;
    }
    rows.push_back(std::move(row));
  };
  std::uint64_t stream = cfg.seed;
  auto next_seed = [&] { return stream++; };
  for (const auto& inst : fns.cube) {
    for (double eta : grid) {
      std::optional<McEstimate> mc;
      if (cfg.mc > 0) mc = noise_stability_mc(inst.f, eta, cfg.mc, next_seed());
      push(inst.id, eta, noise_stability(inst.f, eta), mc);
    }
  }
  if (!fns.table.empty()) {
    const SemigroupEvolution ev(model.system->generator);
    for (const auto& inst : fns.table) {
      const double m = mean(inst.f);
      for (double eta : grid) {
        const double t = eta >= 1.0 ? kInfinity : -std::log1p(-eta);
        const double exact = std::isinf(t) ? 0.0 : inner_product(inst.f, ev.apply(t, inst.f)) - m * m;
        std::optional<McEstimate> mc;
        if (cfg.mc > 0 && !std::isinf(t)) {
          mc = cayley_stability_mc(model.system->model, inst.f, t, cfg.mc, next_seed());
        }
        push(inst.id, eta, exact, mc);
      }
    }
  }
  for (const auto& inst : fns.hermite) {
    for (double eta : grid) {
      std::optional<McEstimate> mc;
      if (cfg.mc > 0) {
        mc = gaussian_noise_stability_mc([&](std::span<const double> x) { return inst.f.evaluate(x); },
                                         model.n, eta, cfg.mc, next_seed());
      }
      push(inst.id, eta, gaussian_noise_stability(inst.f, eta), mc);
    }
  }
  for (const auto& inst : fns.boxes) {
    if (!inst.box.measure.is_gaussian()) throw UsageError("box stability needs the Gaussian measure");
    for (double eta : grid) {
      std::optional<McEstimate> mc;
      if (cfg.mc > 0) {
        mc = gaussian_noise_stability_mc(
            [&](std::span<const double> x) { return box_indicator(inst.box, x); }, model.n, eta,
            cfg.mc, next_seed());
      }
      push(inst.id, eta, gaussian_noise_stability_box(inst.box, eta), mc);
    }
  }
  json j;
  j["spec"] = base_spec(cfg);
  j["spec"]["mc_samples"] = cfg.mc;
  j["model"] = model.name;
  j["instances"] = rows;
  emit_json(cfg, j, out);
  if (!cfg.csv.empty()) {
    auto file = open_csv(cfg);
    file << "function_id,eta,exact,mc,mc_std_error\n";
    for (const auto& row : rows) {
      file << row["function_id"].get<std::string>() << ','
           << format_double(row["eta"].get<double>()) << ','
           << format_double(row["exact"].get<double>()) << ',';
      if (row.contains("mc")) {
        file << format_double(row["mc"].get<double>()) << ','
             << format_double(row["mc_std_error"].get<double>());
      } else {
        file << ',';
      }
      file << '\n';
    }
  }
  return kExitPass;
}

BoundSpec bound_spec(const RunConfig& cfg) {
  BoundSpec spec;
  spec.theorem = parse_theorem_id(cfg.bound);
  spec.r = cfg.r;
  if (cfg.rho > 0.0) spec.rho = cfg.rho;
  if (cfg.lambda > 0.0) spec.lambda = cfg.lambda;
  spec.c = cfg.c;
  spec.constant = cfg.constant;
  spec.c2 = cfg.c2;
  if (cfg.clock.empty()) {
    switch (spec.theorem) {
      case TheoremId::kT1_2:
      case TheoremId::kT1_4:
      case TheoremId::kC1_5:
      case TheoremId::kC1_8:
      case TheoremId::kT4_2:
        spec.clock = Clock::kNoise;
        break;
      default:
        spec.clock = Clock::kTime;
    }
  } else if (cfg.clock == "t") {
    spec.clock = Clock::kTime;
  } else if (cfg.clock == "eta") {
    spec.clock = Clock::kNoise;
  } else {
    throw UsageError("--clock must be t or eta");
  }
  return spec;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const BoundSpec spec = bound_spec(cfg);
  const Model model = build_model(cfg.model);
  Functions fns = build_functions(model, cfg.functions, cfg.seed);
  std::vector<double> grid;
  if (!cfg.grid.empty()) {
    grid = parse_grid(cfg.grid);
  } else if (spec.clock == Clock::kNoise) {
    grid = linear_grid(0.05, 0.95, 19);
  } else {
    grid = default_time_grid();
  }
  Family family;
  if (model.cube()) {
    family = CubeFamily{std::move(fns.cube)};
  } else if (model.cayley()) {
    family = CayleyFamily{model.system, model.kind == "symmetric" ? model.n : 0, std::move(fns.table)};
  } else if (!fns.hermite.empty() && !fns.boxes.empty()) {
    throw UsageError("verify takes either Hermite expansions or boxes, not both");
  } else if (!fns.boxes.empty()) {
    family = BoxFamily{std::move(fns.boxes)};
  } else {
    family = GaussianFamily{std::move(fns.hermite), cfg.quad_order};
  }
  const BoundReport report = verify(spec, family, grid);
  json j = to_json(report);
  j["model"] = model.name;
  j["spec"]["functions"] = cfg.functions;
  j["spec"]["seed"] = cfg.seed;
  emit_json(cfg, j, out);
  if (!cfg.csv.empty()) {
    auto file = open_csv(cfg);
    write_csv(file, report);
  }
  return report.passed() ? kExitPass : kExitFailure;
}

int cmd_constants(const RunConfig& cfg, std::ostream& out) {
  const Model model = build_model(cfg.model);
  std::optional<double> gap;
  std::optional<double> gap_closed;
  std::optional<double> rho;
  std::optional<double> rho_closed;
  LogSobolevOptions options;
  options.seed = cfg.seed;
  if (model.cube()) {
    if (model.n > kMaxCubeGeneratorDimension) throw SizeLimit("cube too large for a dense generator");
    const Generator g = build_cube_generator(model.n, model.p);
    gap = spectral_gap(g);
    gap_closed = 1.0;
    rho = log_sobolev_constant(g, options);
    rho_closed = two_point_log_sobolev(model.p);
  } else if (model.cayley()) {
    if (!model.system->generator) throw SizeLimit("group too large for a dense generator");
    const Generator& g = *model.system->generator;
    gap = spectral_gap(g);
    gap_closed = model.kind == "torus" ? torus_spectral_gap(model.m, model.n)
                                       : symmetric_group_spectral_gap(model.n);
    rho = log_sobolev_constant(g, options);
  } else {
    if (!model.measure.is_gaussian()) throw UsageError("constants are available for the Gaussian only");
    gap_closed = 1.0;
    rho_closed = 1.0;
  }
  auto entry = [](const std::optional<double>& computed, const std::optional<double>& closed) {
    json e{{"computed", computed ? json(*computed) : json(nullptr)},
           {"closed_form", closed ? json(*closed) : json(nullptr)}};
    if (computed && closed && *closed != 0.0) {
      e["relative_difference"] = std::abs(*computed - *closed) / std::abs(*closed);
    }
    return e;
  };
  json j;
  j["spec"] = base_spec(cfg);
  j["model"] = model.name;
  j["spectral_gap"] = entry(gap, gap_closed);
  j["log_sobolev"] = entry(rho, rho_closed);
  emit_json(cfg, j, out);
  return kExitPass;
}

int cmd_junta(const RunConfig& cfg, std::ostream& out) {
  const Model model = build_model(cfg.model);
  const Functions fns = build_functions(model, cfg.functions, cfg.seed);
  if (!fns.boxes.empty()) throw UsageError("junta takes Hermite expansions, not boxes");
  json spec = base_spec(cfg);
  spec["t"] = cfg.t;
  spec["eta"] = cfg.eta;
  std::string function_id;
  if (cfg.epsilon > 0.0) {
    spec["epsilon"] = cfg.epsilon;
    if (model.gaussian()) throw UsageError("the junta search runs on cube and group models");
    std::optional<FriedgutResult> result;
    if (!fns.cube.empty()) {
      result = friedgut_check(fns.cube.front().f, cfg.epsilon);
      function_id = fns.cube.front().id;
    } else {
      result = friedgut_check(*model.system, fns.table.front().f, cfg.epsilon);
      function_id = fns.table.front().id;
    }
    json j = friedgut_report(model.name, spec, *result);
    j["instances"][0]["function_id"] = function_id;
    emit_json(cfg, j, out);
    return result->found ? kExitPass : kExitFailure;
  }
  std::optional<JuntaResult> result;
  if (!fns.cube.empty()) {
    result = junta_extract(fns.cube.front().f, cfg.t, cfg.eta);
    function_id = fns.cube.front().id;
  } else if (!fns.table.empty()) {
    result = junta_extract(*model.system, fns.table.front().f, cfg.t, cfg.eta);
    function_id = fns.table.front().id;
  } else {
    result = junta_extract(fns.hermite.front().f, cfg.t, cfg.eta, cfg.c, cfg.quad_order);
    function_id = fns.hermite.front().id;
  }
  const bool passed = result->lemma_holds.value_or(true);
  json j = junta_report(model.name, spec, *result);
  j["instances"][0]["function_id"] = function_id;
  emit_json(cfg, j, out);
  return passed ? kExitPass : kExitFailure;
}

// ---- configuration --------------------------------------------------------

struct Flags {
  RunConfig cfg;
  std::string config_path;
  std::map<std::string, CLI::Option*> options;
};

void add_options(CLI::App* app, Flags& flags) {
  RunConfig& c = flags.cfg;
  auto& o = flags.options;
  o["model"] = app->add_option("--model", c.model, "cube:n=3,p=0.2 | torus:m=3,n=2 | symmetric:n=4 | gaussian:n=1,degree=8");
  o["fn"] = app->add_option("--fn", c.functions, "function descriptor, repeatable");
  o["bound"] = app->add_option("--bound", c.bound, "statement id such as T1.6 or L6.3-improved");
  o["grid"] = app->add_option("--grid", c.grid, "log:a:b:n | lin:a:b:n | comma list");
  o["seed"] = app->add_option("--seed", c.seed, "seed for random families and sampling");
  o["out"] = app->add_option("--out", c.out, "JSON output path (default stdout)");
  o["csv"] = app->add_option("--csv", c.csv, "CSV output path");
  o["mc"] = app->add_option("--mc", c.mc, "Monte Carlo sample count");
  o["r"] = app->add_option("--r", c.r, "norm exponent r in [1,2]");
  o["rho"] = app->add_option("--rho", c.rho, "log-Sobolev constant override");
  o["lambda"] = app->add_option("--lambda", c.lambda, "spectral gap override");
  o["c"] = app->add_option("--c", c.c, "convexity modulus");
  o["constant"] = app->add_option("--constant", c.constant, "constant for free-constant statements");
  o["c2"] = app->add_option("--c2", c.c2, "exponent constant of the noise statements");
  o["clock"] = app->add_option("--clock", c.clock, "t or eta");
  o["t"] = app->add_option("--t", c.t, "junta time");
  o["eta"] = app->add_option("--eta", c.eta, "junta influence threshold");
  o["epsilon"] = app->add_option("--epsilon", c.epsilon, "target L1 error for the junta search");
  o["quad_order"] = app->add_option("--quad-order", c.quad_order, "Gaussian quadrature order");
  app->add_option("--config", flags.config_path, "JSON file with the same keys as the flags");
}

template <typename T>
void assign(const json& j, const std::string& key, T& field) {
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError("config key " + key + ": " + e.what());
  }
}

void apply_config(Flags& flags) {
  if (flags.config_path.empty()) return;
  std::ifstream in(flags.config_path);
  if (!in) throw UsageError("cannot open config " + flags.config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  RunConfig& c = flags.cfg;
  for (const auto& [key, value] : j.items()) {
    const auto it = flags.options.find(key);
    if (it == flags.options.end()) throw UsageError("unknown config key " + key);
    if (it->second->count() > 0) continue;
    if (key == "model") assign(j, key, c.model);
    else if (key == "fn") {
      if (value.is_string()) c.functions = {value.get<std::string>()};
      else assign(j, key, c.functions);
    }
    else if (key == "bound") assign(j, key, c.bound);
    else if (key == "grid") {
      if (value.is_array()) {
        std::string text;
        for (const auto& v : value) text += (text.empty() ? "" : ",") + format_double(v.get<double>());
        c.grid = text;
      } else {
        assign(j, key, c.grid);
      }
    }
    else if (key == "seed") assign(j, key, c.seed);
    else if (key == "out") assign(j, key, c.out);
    else if (key == "csv") assign(j, key, c.csv);
    else if (key == "mc") assign(j, key, c.mc);
    else if (key == "r") assign(j, key, c.r);
    else if (key == "rho") assign(j, key, c.rho);
    else if (key == "lambda") assign(j, key, c.lambda);
    else if (key == "c") assign(j, key, c.c);
    else if (key == "constant") assign(j, key, c.constant);
    else if (key == "c2") assign(j, key, c.c2);
    else if (key == "clock") assign(j, key, c.clock);
    else if (key == "t") assign(j, key, c.t);
    else if (key == "eta") assign(j, key, c.eta);
    else if (key == "epsilon") assign(j, key, c.epsilon);
    else if (key == "quad_order") assign(j, key, c.quad_order);
  }
}

}  // namespace

double Descriptor::number(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : to_number(it->second);
}

int Descriptor::integer(const std::string& key, int fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = to_number(it->second);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError(key + " must be an integer");
  return static_cast<int>(v);
}

std::string Descriptor::text(const std::string& key, const std::string& fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Descriptor parse_descriptor(const std::string& text) {
  Descriptor d;
  const auto colon = text.find(':');
  d.name = text.substr(0, colon);
  if (d.name.empty()) throw UsageError("empty descriptor");
  if (colon == std::string::npos) return d;
  for (const auto& part : split(text.substr(colon + 1), ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("expected key=value in " + text);
    d.params[part.substr(0, eq)] = part.substr(eq + 1);
  }
  return d;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 4 && (parts[0] == "log" || parts[0] == "lin")) {
    const double a = to_number(parts[1]);
    const double b = to_number(parts[2]);
    const double count = to_number(parts[3]);
    if (count < 1 || count != std::floor(count)) throw UsageError("grid count must be a positive integer");
    try {
      return parts[0] == "log" ? log_grid(a, b, static_cast<int>(count))
                               : linear_grid(a, b, static_cast<int>(count));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (parts.size() != 1) throw UsageError("bad grid " + text);
  std::vector<double> grid;
  for (const auto& v : split(text, ',')) grid.push_back(to_number(v));
  if (grid.empty()) throw UsageError("empty grid");
  return grid;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noise stability and influence bounds on product, group and Gaussian models"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"influences", "per-direction influence profiles"},
      {"stability", "noise stability over an eta grid"},
      {"verify", "sweep a bound over a function family and time grid"},
      {"constants", "spectral gap and log-Sobolev constant of the model"},
      {"junta", "junta extraction or junta-size search"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_options(sub, flags);
    sub->callback([&flags, name = name] { flags.cfg.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }
  // Every subcommand registered the same flags; keep the parsed one's.
  for (CLI::App* sub : app.get_subcommands()) {
    flags.options.clear();
    for (CLI::Option* opt : sub->get_options()) {
      std::string key = opt->get_name(false, true);
      while (!key.empty() && key.front() == '-') key.erase(key.begin());
      std::replace(key.begin(), key.end(), '-', '_');
      flags.options[key] = opt;
    }
    flags.options.erase("help");
    flags.options.erase("config");
  }
  try {
    apply_config(flags);
    const RunConfig& cfg = flags.cfg;
    if (cfg.command == "influences") return cmd_influences(cfg, out);
    if (cfg.command == "stability") return cmd_stability(cfg, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    if (cfg.command == "constants") return cmd_constants(cfg, out);
    return cmd_junta(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidParameter& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Unsupported& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SizeLimit& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace nstab::cli
