#include "zeno/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string>

#include "json.hpp"

namespace zeno {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& msg) {
  throw config_parse_error("config parse error: " + msg);
}

[[noreturn]] void invalid(const std::string& msg) {
  throw validation_error("config validation error: " + msg);
}

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known)
      parse_fail("unknown key '" + item.key() + "' in " + where);
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_double(const json& v, const char* what) {
  if (!v.is_number()) parse_fail(std::string(what) + " must be a number");
  return v.get<double>();
}

Index as_count(const json& v, const char* what) {
  if (!v.is_number_integer())
    parse_fail(std::string(what) + " must be an integer");
  return v.get<Index>();
}

std::uint64_t as_seed(const json& v, const char* what) {
  if (!(v.is_number_unsigned() ||
        (v.is_number_integer() && v.get<std::int64_t>() >= 0)))
    parse_fail(std::string(what) + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const char* what) {
  if (!v.is_string()) parse_fail(std::string(what) + " must be a string");
  return v.get<std::string>();
}

std::vector<double> as_grid(const json& v, const char* what) {
  if (!v.is_array())
    parse_fail(std::string(what) + " must be an array of numbers");
  std::vector<double> grid;
  grid.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number())
      parse_fail(std::string(what) + " must contain only numbers");
    grid.push_back(e.get<double>());
  }
  return grid;
}

double as_beta(const json& v) {
  if (v.is_number()) {
    const double beta = v.get<double>();
    if (!(beta > 0.0))
      invalid("'beta' must be positive (or the string \"inf\")");
    return beta;
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity")
      return std::numeric_limits<double>::infinity();
  }
  parse_fail("'beta' must be a number or the string \"inf\"");
}

// Explicit matrix literal: nested arrays of [re, im] pairs, rectangular.
Matrix as_matrix(const json& v, const char* what) {
  if (!v.is_array() || v.empty())
    parse_fail(std::string(what) + " must be a non-empty nested array");
  const auto rows = static_cast<Index>(v.size());
  Index cols = 0;
  Matrix m;
  for (Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.empty())
      parse_fail(std::string(what) + " rows must be non-empty arrays");
    if (i == 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      parse_fail(std::string(what) + " rows must all have the same length");
    }
    for (Index j = 0; j < cols; ++j) {
      const json& e = row[static_cast<std::size_t>(j)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
          !e[1].is_number())
        parse_fail(std::string(what) +
                   " entries must be [re, im] number pairs");
      m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

// Dimension a named operator preset carries on its own (0 when it takes the
// dimension from context).
Index preset_intrinsic_dim(const std::string& name) {
  if (name == "sigma_x" || name == "sigma_y" || name == "sigma_z") return 2;
  if (name == "plus") return 2;
  if (name == "bell_phi" || name == "bell_psi") return 4;
  return 0;
}

Matrix preset_operator(const std::string& name, Index dim, const char* what) {
  if (name == "sigma_x" || name == "sigma_y" || name == "sigma_z") {
    Matrix s(2, 2);
    if (name == "sigma_x") s << 0, 1, 1, 0;
    if (name == "sigma_y") s << 0, Complex(0, -1), Complex(0, 1), 0;
    if (name == "sigma_z") s << 1, 0, 0, -1;
    return s;
  }
  if (name == "identity" || name == "zero") {
    if (dim < 1)
      invalid(std::string("preset '") + name + "' for " + what +
              " needs a known dimension");
    return name == "identity" ? Matrix(Matrix::Identity(dim, dim))
                              : Matrix(Matrix::Zero(dim, dim));
  }
  invalid("unknown operator preset '" + name + "' for " + what);
}

Matrix preset_state(const std::string& name, Index dim, const char* what) {
  if (name == "plus") {
    return Matrix(0.5 * Matrix::Ones(2, 2));
  }
  if (name == "bell_phi" || name == "bell_psi") {
    Vector v = Vector::Zero(4);
    if (name == "bell_phi") {
      v[0] = v[3] = 1.0 / std::sqrt(2.0);
    } else {
      v[1] = v[2] = 1.0 / std::sqrt(2.0);
    }
    return Matrix(v * v.adjoint());
  }
  if (name == "basis0" || name == "mixed") {
    if (dim < 1)
      invalid(std::string("preset '") + name + "' for " + what +
              " needs a known dimension");
    if (name == "basis0") {
      Matrix m = Matrix::Zero(dim, dim);
      m(0, 0) = 1.0;
      return m;
    }
    return Matrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
  }
  invalid("unknown initial state preset '" + name + "' for " + what);
}

// Operator-or-preset slot, resolved against the running dimension.
struct Slot {
  const json* j = nullptr;
  Matrix* target = nullptr;
  const char* name = "";
  bool is_state = false;
};

CompositeCoupling parse_composite(const json& v, const char* what) {
  if (!v.is_object())
    parse_fail(std::string(what) + " must be an object");
  check_keys(v, what, {"sites", "combine", "mu", "seed"});
  const json* sites = find(v, "sites");
  if (!sites || !sites->is_array() || sites->empty())
    parse_fail(std::string(what) + " needs a non-empty 'sites' array");
  CompositeCoupling c;
  for (const json& site : *sites) {
    Matrix m;
    if (site.is_string()) {
      m = preset_operator(site.get<std::string>(), 0, what);
    } else {
      m = as_matrix(site, "composite site");
      if (m.rows() != m.cols()) invalid("composite sites must be square");
    }
    c.site_ops.push_back(HermitianMatrix{std::move(m)});
  }
  if (const json* comb = find(v, "combine")) {
    const std::string s = as_string(*comb, "'combine'");
    if (s == "sum")
      c.combine = CompositeCoupling::Combine::sum;
    else if (s == "product")
      c.combine = CompositeCoupling::Combine::product;
    else
      invalid("unknown combine rule '" + s + "'");
  }
  if (const json* mu = find(v, "mu")) {
    c.mu = as_double(*mu, "'mu'");
    if (c.mu < 0.0) invalid("'mu' must be non-negative");
  }
  if (const json* seed = find(v, "seed")) c.seed = as_seed(*seed, "'seed'");
  return c;
}

ExperimentKind parse_kind(const std::string& s) {
  if (s == "sweep") return ExperimentKind::sweep;
  if (s == "dephasing") return ExperimentKind::dephasing;
  if (s == "entanglement") return ExperimentKind::entanglement;
  if (s == "collision") return ExperimentKind::collision;
  if (s == "multires") return ExperimentKind::multires;
  invalid("unknown experiment kind '" + s + "'");
}

ReservoirConfig parse_reservoir(const json& v) {
  if (!v.is_object()) parse_fail("'reservoir' must be an object");
  check_keys(v, "reservoir",
             {"family", "amplitude", "cutoff", "omega_c", "modes", "n_max",
              "beta"});
  ReservoirConfig r;
  const json* fam = find(v, "family");
  if (!fam) invalid("reservoir needs a 'family'");
  const std::string f = as_string(*fam, "'family'");
  if (f == "flat")
    r.density.family = SpectralDensity::Family::flat;
  else if (f == "ohmic")
    r.density.family = SpectralDensity::Family::ohmic;
  else
    invalid("unknown spectral density family '" + f + "'");
  if (const json* a = find(v, "amplitude"))
    r.density.amplitude = as_double(*a, "'amplitude'");
  if (const json* c = find(v, "cutoff"))
    r.density.cutoff = as_double(*c, "'cutoff'");
  if (const json* w = find(v, "omega_c"))
    r.density.omega_c = as_double(*w, "'omega_c'");
  r.density.validate();
  const json* modes = find(v, "modes");
  if (!modes) invalid("reservoir needs a 'modes' count");
  r.modes = as_count(*modes, "'modes'");
  if (r.modes < 1) invalid("'modes' must be at least 1");
  const json* n_max = find(v, "n_max");
  if (!n_max) invalid("reservoir needs an 'n_max' truncation");
  r.n_max = as_count(*n_max, "'n_max'");
  if (r.n_max < 1) invalid("'n_max' must be at least 1");
  if (const json* b = find(v, "beta")) r.beta = as_beta(*b);
  return r;
}

void require_hermitian(const Matrix& m, const char* what) {
  if (m.size() == 0)
    invalid(std::string("this experiment requires ") + what);
  if (!is_hermitian(m))
    invalid(std::string(what) + " must be Hermitian");
}

void validate_for_kind(ExperimentConfig& cfg) {
  const Index d = cfg.dimension;
  if (d < 1) invalid("system dimension cannot be inferred; set it");
  // h defaults to the zero operator when a kind needs one and none is given
  if (cfg.h.size() == 0 &&
      cfg.kind != ExperimentKind::collision)
    cfg.h = Matrix::Zero(d, d);

  switch (cfg.kind) {
    case ExperimentKind::sweep:
    case ExperimentKind::dephasing: {
      require_hermitian(cfg.h, "'h'");
      require_hermitian(cfg.coupling, "'coupling'");
      if (cfg.initial_state.size() == 0)
        invalid("this experiment requires an 'initial_state'");
      DensityMatrix{cfg.initial_state};
      if (!cfg.has_reservoir) invalid("this experiment requires a reservoir");
      if (cfg.lambda_grid.empty()) invalid("'lambda_grid' must be non-empty");
      if (cfg.time_grid.empty()) invalid("'time_grid' must be non-empty");
      if (cfg.kind == ExperimentKind::dephasing) {
        if (d != 2) invalid("the dephasing experiment runs on a qubit");
        if (cfg.lambda_grid.size() != 1)
          invalid("the dephasing experiment takes exactly one coupling "
                  "value in 'lambda_grid'");
        const Matrix comm =
            cfg.h * cfg.coupling - cfg.coupling * cfg.h;
        const double scale = 1.0 + cfg.h.cwiseAbs().maxCoeff() *
                                       cfg.coupling.cwiseAbs().maxCoeff();
        if (comm.cwiseAbs().maxCoeff() > 1e-12 * scale)
          invalid("'h' and 'coupling' must commute for dephasing");
        if (spectral_decompose(HermitianMatrix{cfg.coupling}).size() != 2)
          invalid("the dephasing coupling must have exactly two distinct "
                  "levels");
      }
      break;
    }
    case ExperimentKind::entanglement: {
      if (d != 4)
        invalid("the entanglement experiment runs on two qubits (dimension "
                "4)");
      require_hermitian(cfg.h, "'h'");
      require_hermitian(cfg.coupling, "'coupling'");
      if (cfg.samples < 1) invalid("'samples' must be at least 1");
      if (cfg.time_grid.empty()) invalid("'time_grid' must be non-empty");
      break;
    }
    case ExperimentKind::collision: {
      if (cfg.initial_state.size() == 0)
        invalid("this experiment requires an 'initial_state'");
      DensityMatrix{cfg.initial_state};
      if (cfg.collisions.empty()) invalid("'collisions' must be non-empty");
      for (const Matrix& m : cfg.collisions)
        if (!is_hermitian(m) || m.rows() != d)
          invalid("each collision operator must be Hermitian with the "
                  "system dimension");
      break;
    }
    case ExperimentKind::multires: {
      if (d != 4)
        invalid("the multires experiment runs on two qubits (dimension 4)");
      require_hermitian(cfg.h, "'h'");
      require_hermitian(cfg.coupling, "'coupling'");
      require_hermitian(cfg.coupling2, "'coupling2'");
      if (cfg.initial_state.size() == 0)
        invalid("this experiment requires an 'initial_state'");
      DensityMatrix{cfg.initial_state};
      if (!cfg.has_reservoir) invalid("this experiment requires a reservoir");
      if (cfg.lambda_grid.size() != 1)
        invalid("the multires experiment takes exactly one coupling value "
                "in 'lambda_grid'");
      if (cfg.time_grid.empty()) invalid("'time_grid' must be non-empty");
      break;
    }
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::dephasing: return "dephasing";
    case ExperimentKind::entanglement: return "entanglement";
    case ExperimentKind::collision: return "collision";
    case ExperimentKind::multires: return "multires";
  }
  return "unknown";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
  if (!doc.is_object()) parse_fail("top level must be an object");
  check_keys(doc, "the top level",
             {"experiment", "seed", "output", "system", "reservoir",
              "lambda_grid", "time_grid", "samples", "collisions"});

  ExperimentConfig cfg;
  const json* kind = find(doc, "experiment");
  if (!kind) parse_fail("missing key 'experiment'");
  cfg.kind = parse_kind(as_string(*kind, "'experiment'"));
  if (const json* seed = find(doc, "seed"))
    cfg.seed = as_seed(*seed, "'seed'");
  if (const json* out = find(doc, "output"))
    cfg.output = as_string(*out, "'output'");

  const json* sys = find(doc, "system");
  const json *h_j = nullptr, *g_j = nullptr, *g2_j = nullptr, *st_j = nullptr;
  const json *gc_j = nullptr, *g2c_j = nullptr;
  if (sys) {
    if (!sys->is_object()) parse_fail("'system' must be an object");
    check_keys(*sys, "system",
               {"dimension", "h", "coupling", "coupling_composite",
                "coupling2", "coupling2_composite", "initial_state"});
    if (const json* dim = find(*sys, "dimension")) {
      cfg.dimension = as_count(*dim, "'dimension'");
      if (cfg.dimension < 1) invalid("'dimension' must be positive");
    }
    h_j = find(*sys, "h");
    g_j = find(*sys, "coupling");
    gc_j = find(*sys, "coupling_composite");
    g2_j = find(*sys, "coupling2");
    g2c_j = find(*sys, "coupling2_composite");
    st_j = find(*sys, "initial_state");
    if (g_j && gc_j)
      parse_fail("'coupling' and 'coupling_composite' are mutually "
                 "exclusive");
    if (g2_j && g2c_j)
      parse_fail("'coupling2' and 'coupling2_composite' are mutually "
                 "exclusive");
  }

  auto note_dim = [&cfg](Index d, const char* what) {
    if (d < 1) invalid(std::string(what) + " must have positive dimension");
    if (cfg.dimension == 0)
      cfg.dimension = d;
    else if (cfg.dimension != d)
      invalid(std::string(what) + " does not match the system dimension");
  };

  // Pass 1: explicit matrices and composite blocks fix the dimension.
  const Slot slots[] = {
      {h_j, &cfg.h, "'h'", false},
      {g_j, &cfg.coupling, "'coupling'", false},
      {g2_j, &cfg.coupling2, "'coupling2'", false},
      {st_j, &cfg.initial_state, "'initial_state'", true},
  };
  for (const Slot& s : slots) {
    if (!s.j || s.j->is_string()) continue;
    Matrix m = as_matrix(*s.j, s.name);
    if (m.rows() != m.cols())
      invalid(std::string(s.name) + " must be square");
    note_dim(m.rows(), s.name);
    *s.target = std::move(m);
  }
  if (gc_j) {
    const Matrix m = composite_coupling(
        parse_composite(*gc_j, "'coupling_composite'")).mat();
    note_dim(m.rows(), "'coupling_composite'");
    cfg.coupling = m;
  }
  if (g2c_j) {
    const Matrix m = composite_coupling(
        parse_composite(*g2c_j, "'coupling2_composite'")).mat();
    note_dim(m.rows(), "'coupling2_composite'");
    cfg.coupling2 = m;
  }

  // Pass 2: presets with an intrinsic size, then context-sized presets.
  for (const bool intrinsic_round : {true, false}) {
    for (const Slot& s : slots) {
      if (!s.j || !s.j->is_string()) continue;
      const std::string name = s.j->get<std::string>();
      if ((preset_intrinsic_dim(name) > 0) != intrinsic_round) continue;
      Matrix m = s.is_state ? preset_state(name, cfg.dimension, s.name)
                            : preset_operator(name, cfg.dimension, s.name);
      note_dim(m.rows(), s.name);
      *s.target = std::move(m);
    }
  }

  if (const json* res = find(doc, "reservoir")) {
    cfg.reservoir = parse_reservoir(*res);
    cfg.has_reservoir = true;
  }
  if (const json* lg = find(doc, "lambda_grid"))
    cfg.lambda_grid = as_grid(*lg, "'lambda_grid'");
  if (const json* tg = find(doc, "time_grid"))
    cfg.time_grid = as_grid(*tg, "'time_grid'");
  if (const json* n = find(doc, "samples")) {
    cfg.samples = as_count(*n, "'samples'");
    if (cfg.samples < 0) invalid("'samples' must be non-negative");
  }
  if (const json* coll = find(doc, "collisions")) {
    if (!coll->is_array())
      parse_fail("'collisions' must be an array of operators");
    for (const json& e : *coll) {
      Matrix m = e.is_string()
                     ? preset_operator(e.get<std::string>(), cfg.dimension,
                                       "'collisions'")
                     : as_matrix(e, "'collisions'");
      if (m.rows() != m.cols()) invalid("'collisions' entries must be square");
      note_dim(m.rows(), "'collisions'");
      cfg.collisions.push_back(std::move(m));
    }
  }

  validate_for_kind(cfg);
  return cfg;
}

}  // namespace zeno
