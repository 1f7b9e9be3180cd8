#include "asymmap/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace asymmap {

using nlohmann::json;

ConfigError::ConfigError(const std::string& path, const std::string& message, std::size_t line)
    : Error([&] {
        std::string s;
        if (line > 0) s += "line " + std::to_string(line) + ": ";
        if (!path.empty()) s += path + ": ";
        return s + message;
      }()),
      path_(path),
      line_(line) {}

namespace {

// Typed access to one JSON object, with the field path kept for messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
        throw ConfigError(sub(it.key()), "unknown key");
      }
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) const { return j_.at(key); }
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& path() const { return path_; }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_, msg); }

  Node object(const char* key) const {
    if (!has(key)) throw ConfigError(sub(key), "required field missing");
    return Node(j_.at(key), sub(key));
  }

  double number(const char* key) const {
    if (!has(key)) throw ConfigError(sub(key), "required field missing");
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(sub(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(sub(key), "must be finite");
    return d;
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::uint64_t unsigned_int(const char* key) const {
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(sub(key), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::uint64_t unsigned_int(const char* key, std::uint64_t fallback) const {
    return has(key) ? unsigned_int(key) : fallback;
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError(sub(key), "expected true or false");
    return j_.at(key).get<bool>();
  }

  std::string string(const char* key) const {
    if (!has(key)) throw ConfigError(sub(key), "required field missing");
    if (!j_.at(key).is_string()) throw ConfigError(sub(key), "expected a string");
    return j_.at(key).get<std::string>();
  }
  std::string string(const char* key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  std::vector<double> numbers(const char* key) const {
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(sub(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        throw ConfigError(sub(key) + "[" + std::to_string(i) + "]", "expected a finite number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

std::string indexed(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

void require(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) throw ConfigError(path, msg);
}

PenaltySpec parse_penalty(const Node& n) {
  n.allow({"kind", "exponent", "smooth"});
  const auto kind_name = n.string("kind");
  PenaltyKind kind;
  try {
    kind = penalty_from_name(kind_name);
  } catch (const InvalidArgument&) {
    throw ConfigError(n.sub("kind"), "unknown penalty '" + kind_name +
                                         "' (expected zero_norm, l1, l2, lp or zero_norm_plus)");
  }
  PenaltySpec p;
  switch (kind) {
    case PenaltyKind::ZeroNorm:
    case PenaltyKind::L1:
    case PenaltyKind::L2:
      require(!n.has("exponent") && !n.has("smooth"), n.path(),
              "'exponent' and 'smooth' apply only to lp and zero_norm_plus");
      p = kind == PenaltyKind::ZeroNorm ? PenaltySpec::zero_norm()
          : kind == PenaltyKind::L1     ? PenaltySpec::l1()
                                        : PenaltySpec::l2();
      break;
    case PenaltyKind::Lp: {
      require(!n.has("smooth"), n.sub("smooth"), "applies only to zero_norm_plus");
      const double e = n.number("exponent");
      require(e > 0.0 && e <= 2.0, n.sub("exponent"), "must lie in (0, 2]");
      p = PenaltySpec::lp(e);
      break;
    }
    case PenaltyKind::ZeroNormPlus: {
      require(!n.has("exponent"), n.sub("exponent"), "applies only to lp");
      const Node s = n.object("smooth");
      s.allow({"kind", "scale", "exponent"});
      require(s.string("kind", "power") == "power", s.sub("kind"),
              "only 'power' smooth terms can be configured from a file");
      const double scale = s.number("scale");
      const double e = s.number("exponent", 2.0);
      require(scale >= 0.0, s.sub("scale"), "must be >= 0");
      require(e >= 1.0 && e <= 2.0, s.sub("exponent"), "must lie in [1, 2]");
      p = PenaltySpec::zero_norm_plus(SmoothTerm::power(scale, e));
      break;
    }
  }
  return p;
}

json penalty_json(const PenaltySpec& p) {
  json j{{"kind", std::string(penalty_name(p.kind))}};
  if (p.kind == PenaltyKind::Lp) j["exponent"] = p.exponent;
  if (p.kind == PenaltyKind::ZeroNormPlus) {
    if (p.smooth.kind != SmoothTerm::Kind::Power) {
      throw InvalidArgument("custom smooth terms cannot be serialized");
    }
    j["smooth"] = {{"kind", "power"}, {"scale", p.smooth.scale}, {"exponent", p.smooth.exponent}};
  }
  return j;
}

BlockSpec parse_block(const Node& n) {
  n.allow({"fraction", "rho", "q", "c", "w", "penalty"});
  BlockSpec b;
  b.fraction = n.number("fraction");
  b.rho = n.number("rho");
  require(n.string("q", "gaussian") == "gaussian", n.sub("q"),
          "only 'gaussian' nonzero entries are supported");
  b.c = n.number("c", 1.0);
  b.w = n.number("w", 1.0);
  b.penalty_id = n.unsigned_int("penalty", 0);
  require(b.fraction > 0.0 && b.fraction <= 1.0, n.sub("fraction"), "must lie in (0, 1]");
  require(b.rho >= 0.0 && b.rho <= 1.0, n.sub("rho"), "must lie in [0, 1]");
  require(b.c >= 0.0, n.sub("c"), "must be >= 0");
  require(b.w >= 0.0, n.sub("w"), "must be >= 0");
  return b;
}

std::vector<double> parse_grid(const Node& sweep) {
  const auto& g = sweep.raw("grid");
  const std::string path = sweep.sub("grid");
  std::vector<double> out;
  if (g.is_array()) {
    out = sweep.numbers("grid");
  } else {
    const Node r(g, path);
    r.allow({"start", "stop", "num"});
    const double a = r.number("start");
    const double b = r.number("stop");
    const auto num = r.unsigned_int("num");
    require(num >= 2, r.sub("num"), "must be >= 2");
    for (std::uint64_t i = 0; i < num; ++i) {
      out.push_back(i + 1 == num ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(num - 1));
    }
  }
  require(!out.empty(), path, "must not be empty");
  for (std::size_t i = 1; i < out.size(); ++i) {
    require(out[i] > out[i - 1], indexed(path, i), "grid must be strictly increasing");
  }
  return out;
}

}  // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  const Node root(doc, "");
  root.allow({"model", "penalties", "ensemble", "lambda", "tune", "distortions", "solver", "sweep",
              "simulate", "output"});
  RunConfig cfg;

  // model
  {
    const Node m = root.object("model");
    m.allow({"lambda0", "blocks"});
    cfg.model.lambda0 = m.number("lambda0");
    require(cfg.model.lambda0 >= 0.0, m.sub("lambda0"), "must be >= 0");
    require(m.has("blocks") && m.raw("blocks").is_array() && !m.raw("blocks").empty(), m.sub("blocks"),
            "expected a nonempty array of blocks");
    const auto& blocks = m.raw("blocks");
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      cfg.model.blocks.push_back(parse_block(Node(blocks[j], indexed(m.sub("blocks"), j))));
    }
    double total = 0.0;
    for (const auto& b : cfg.model.blocks) total += b.fraction;
    if (std::abs(total - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg.precision(15);
      msg << "block fractions must sum to 1 (got " << total << ")";
      throw ConfigError(m.sub("blocks"), msg.str());
    }
  }

  // penalties
  {
    require(root.has("penalties") && root.raw("penalties").is_array() && !root.raw("penalties").empty(),
            "penalties", "expected a nonempty array of penalties");
    const auto& pens = root.raw("penalties");
    for (std::size_t i = 0; i < pens.size(); ++i) {
      cfg.penalties.push_back(parse_penalty(Node(pens[i], indexed("penalties", i))));
    }
    for (std::size_t j = 0; j < cfg.model.blocks.size(); ++j) {
      require(cfg.model.blocks[j].penalty_id < cfg.penalties.size(),
              indexed("model.blocks", j) + ".penalty", "index out of range of the penalty table");
    }
  }

  // ensemble
  {
    const Node e = root.object("ensemble");
    e.allow({"kind", "alpha", "eigenvalues_file", "eigenvalues"});
    const auto kind = e.string("kind");
    auto& ec = cfg.ensemble;
    if (kind == "marcenko_pastur") {
      ec.kind = EnsembleKind::MarcenkoPastur;
    } else if (kind == "identity") {
      ec.kind = EnsembleKind::Identity;
    } else if (kind == "empirical") {
      ec.kind = EnsembleKind::Empirical;
    } else {
      throw ConfigError(e.sub("kind"), "unknown ensemble '" + kind +
                                           "' (expected marcenko_pastur, identity or empirical)");
    }
    ec.alpha = e.number("alpha", ec.kind == EnsembleKind::Identity ? 1.0 : 0.5);
    require(ec.alpha > 0.0, e.sub("alpha"), "must be > 0");
    if (ec.kind == EnsembleKind::Empirical) {
      require(e.has("eigenvalues_file") != e.has("eigenvalues"), e.path(),
              "empirical ensembles need exactly one of 'eigenvalues_file' or 'eigenvalues'");
      if (e.has("eigenvalues_file")) {
        ec.eigenvalues_file = e.string("eigenvalues_file");
        std::filesystem::path p(ec.eigenvalues_file);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        if (!std::filesystem::exists(p)) {
          throw ConfigError(e.sub("eigenvalues_file"), "file not found: " + p.string());
        }
        try {
          const auto ens = MatrixEnsemble::load_empirical(p, ec.alpha);
          ec.eigenvalues.assign(ens.eigenvalues().begin(), ens.eigenvalues().end());
        } catch (const Error& ex) {
          throw ConfigError(e.sub("eigenvalues_file"), ex.what());
        }
      } else {
        ec.eigenvalues = e.numbers("eigenvalues");
        try {
          (void)MatrixEnsemble::empirical(ec.eigenvalues, ec.alpha);
        } catch (const Error& ex) {
          throw ConfigError(e.sub("eigenvalues"), ex.what());
        }
      }
    } else {
      require(!e.has("eigenvalues_file") && !e.has("eigenvalues"), e.path(),
              "eigenvalues apply only to empirical ensembles");
    }
  }

  if (root.has("lambda")) {
    cfg.lambda = root.number("lambda");
    require(*cfg.lambda > 0.0, "lambda", "must be > 0");
  }
  if (root.has("tune")) {
    const Node t = root.object("tune");
    t.allow({"enabled", "log10_lo", "log10_hi", "prescan_points", "warm_start"});
    cfg.tune.enabled = t.boolean("enabled", true);
    cfg.tune.log10_lo = t.number("log10_lo", cfg.tune.log10_lo);
    cfg.tune.log10_hi = t.number("log10_hi", cfg.tune.log10_hi);
    cfg.tune.prescan_points = t.unsigned_int("prescan_points", cfg.tune.prescan_points);
    cfg.tune.warm_start = t.boolean("warm_start", cfg.tune.warm_start);
    require(cfg.tune.log10_hi > cfg.tune.log10_lo, t.path(), "log10_hi must exceed log10_lo");
    require(cfg.tune.prescan_points >= 3, t.sub("prescan_points"), "must be >= 3");
  }

  if (root.has("distortions")) {
    const auto& d = root.raw("distortions");
    require(d.is_array() && !d.empty(), "distortions", "expected a nonempty array of names");
    cfg.distortions.clear();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto path = indexed("distortions", i);
      require(d[i].is_string(), path, "expected a distortion name");
      try {
        cfg.distortions.push_back({distortion_from_name(d[i].get<std::string>())});
      } catch (const InvalidArgument&) {
        throw ConfigError(path, "unknown distortion '" + d[i].get<std::string>() +
                                    "' (expected squared_error, support_mismatch, "
                                    "indicator_match or indicator_mismatch)");
      }
    }
  }

  if (root.has("solver")) {
    const Node s = root.object("solver");
    s.allow({"damping", "min_damping", "tol", "max_iter", "init_chi", "init_p", "multi_start",
             "quadrature_nodes"});
    auto& sc = cfg.solver;
    sc.damping = s.number("damping", sc.damping);
    sc.min_damping = s.number("min_damping", sc.min_damping);
    sc.tol = s.number("tol", sc.tol);
    sc.max_iter = s.unsigned_int("max_iter", sc.max_iter);
    if (s.has("init_chi")) sc.init_chi = s.number("init_chi");
    if (s.has("init_p")) sc.init_p = s.number("init_p");
    sc.multi_start = s.boolean("multi_start", sc.multi_start);
    sc.quadrature_nodes = s.unsigned_int("quadrature_nodes", sc.quadrature_nodes);
    require(sc.damping > 0.0 && sc.damping <= 1.0, s.sub("damping"), "must lie in (0, 1]");
    require(sc.min_damping > 0.0 && sc.min_damping <= sc.damping, s.sub("min_damping"),
            "must lie in (0, damping]");
    require(sc.tol > 0.0, s.sub("tol"), "must be > 0");
    require(sc.max_iter >= 1, s.sub("max_iter"), "must be >= 1");
    require(!sc.init_chi || *sc.init_chi >= 0.0, s.sub("init_chi"), "must be >= 0");
    require(!sc.init_p || *sc.init_p >= 0.0, s.sub("init_p"), "must be >= 0");
    require(sc.quadrature_nodes >= 16, s.sub("quadrature_nodes"), "must be >= 16");
  }

  if (root.has("sweep")) {
    const Node s = root.object("sweep");
    s.allow({"axis", "grid", "c_blocks", "mse0_db", "inv_alpha_lo", "inv_alpha_hi", "tolerance",
             "prescan_points"});
    SweepConfig sc;
    sc.axis = s.string("axis", "c");
    require(sc.axis == "c", s.sub("axis"), "only the 'c' axis is supported");
    if (s.has("grid")) sc.grid = parse_grid(s);
    if (s.has("c_blocks")) {
      const auto& cb = s.raw("c_blocks");
      require(cb.is_array(), s.sub("c_blocks"), "expected an array of block indices");
      for (std::size_t i = 0; i < cb.size(); ++i) {
        const auto path = indexed(s.sub("c_blocks"), i);
        require(cb[i].is_number_integer() && cb[i].get<std::int64_t>() >= 0, path, "expected a block index");
        const auto j = cb[i].get<std::size_t>();
        require(j < cfg.model.blocks.size(), path, "block index out of range");
        sc.c_blocks.push_back(j);
      }
    }
    sc.mse0_db = s.number("mse0_db", sc.mse0_db);
    sc.inv_alpha_lo = s.number("inv_alpha_lo", sc.inv_alpha_lo);
    sc.inv_alpha_hi = s.number("inv_alpha_hi", sc.inv_alpha_hi);
    sc.tolerance = s.number("tolerance", sc.tolerance);
    sc.prescan_points = s.unsigned_int("prescan_points", sc.prescan_points);
    require(sc.inv_alpha_lo > 0.0 && sc.inv_alpha_hi > sc.inv_alpha_lo, s.path(),
            "need 0 < inv_alpha_lo < inv_alpha_hi");
    require(sc.tolerance > 0.0, s.sub("tolerance"), "must be > 0");
    require(sc.prescan_points >= 2, s.sub("prescan_points"), "must be >= 2");
    cfg.sweep = std::move(sc);
  }

  if (root.has("simulate")) {
    const Node s = root.object("simulate");
    s.allow({"N", "trials", "solver", "seed", "decoupled_samples", "max_iter", "gates"});
    SimulateConfig sc;
    sc.n = s.unsigned_int("N", sc.n);
    sc.trials = s.unsigned_int("trials", sc.trials);
    const auto solver = s.string("solver", "ridge");
    try {
      sc.solver = solver_from_name(solver);
    } catch (const InvalidArgument&) {
      throw ConfigError(s.sub("solver"), "unknown solver '" + solver +
                                             "' (expected ridge, l1 or l0_exhaustive)");
    }
    sc.seed = s.unsigned_int("seed", sc.seed);
    sc.decoupled_samples = s.unsigned_int("decoupled_samples", sc.decoupled_samples);
    sc.max_iter = s.unsigned_int("max_iter", sc.max_iter);
    if (s.has("gates")) {
      const Node g = s.object("gates");
      g.allow({"mse_relative", "mse_sigmas", "tv"});
      sc.mse_relative = g.number("mse_relative", sc.mse_relative);
      sc.mse_sigmas = g.number("mse_sigmas", sc.mse_sigmas);
      sc.tv = g.number("tv", sc.tv);
    }
    require(sc.trials >= 1, s.sub("trials"), "must be >= 1");
    require(sc.n >= cfg.model.blocks.size(), s.sub("N"), "must be at least the number of blocks");
    require(sc.solver != SolverKind::L0Exhaustive || sc.n <= kExhaustiveMaxN, s.sub("N"),
            "l0_exhaustive supports N <= 22");
    require(std::llround(cfg.ensemble.alpha * static_cast<double>(sc.n)) >= 1, s.sub("N"),
            "alpha * N must round to at least one measurement");
    cfg.simulate = sc;
  }

  if (root.has("output")) {
    const Node o = root.object("output");
    o.allow({"path", "histograms_dir"});
    cfg.output.path = o.string("path", "");
    cfg.output.histograms_dir = o.string("histograms_dir", "");
  }

  try {
    cfg.model.validate(cfg.penalties.size());
  } catch (const InvalidArgument& ex) {
    throw ConfigError("model", ex.what());
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    // byte offset to 1-based line
    const auto upto = std::min<std::size_t>(ex.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ConfigError("", std::string("invalid JSON: ") + ex.what(), line);
  }
  return parse_config(doc, base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

json to_json(const RunConfig& cfg) {
  json j;
  json blocks = json::array();
  for (const auto& b : cfg.model.blocks) {
    blocks.push_back({{"fraction", b.fraction},
                      {"rho", b.rho},
                      {"q", "gaussian"},
                      {"c", b.c},
                      {"w", b.w},
                      {"penalty", b.penalty_id}});
  }
  j["model"] = {{"lambda0", cfg.model.lambda0}, {"blocks", blocks}};
  j["penalties"] = json::array();
  for (const auto& p : cfg.penalties) j["penalties"].push_back(penalty_json(p));

  const auto& e = cfg.ensemble;
  json ens;
  switch (e.kind) {
    case EnsembleKind::MarcenkoPastur: ens["kind"] = "marcenko_pastur"; break;
    case EnsembleKind::Identity: ens["kind"] = "identity"; break;
    case EnsembleKind::Empirical: ens["kind"] = "empirical"; break;
  }
  ens["alpha"] = e.alpha;
  if (e.kind == EnsembleKind::Empirical) {
    if (!e.eigenvalues_file.empty()) {
      ens["eigenvalues_file"] = e.eigenvalues_file;
    } else {
      ens["eigenvalues"] = e.eigenvalues;
    }
  }
  j["ensemble"] = ens;

  if (cfg.lambda) j["lambda"] = *cfg.lambda;
  if (cfg.tune != TuneConfig{}) {
    j["tune"] = {{"enabled", cfg.tune.enabled},
                 {"log10_lo", cfg.tune.log10_lo},
                 {"log10_hi", cfg.tune.log10_hi},
                 {"prescan_points", cfg.tune.prescan_points},
                 {"warm_start", cfg.tune.warm_start}};
  }
  j["distortions"] = json::array();
  for (const auto& d : cfg.distortions) j["distortions"].push_back(std::string(distortion_name(d.kind)));

  const auto& s = cfg.solver;
  json solver{{"damping", s.damping},
              {"min_damping", s.min_damping},
              {"tol", s.tol},
              {"max_iter", s.max_iter},
              {"multi_start", s.multi_start},
              {"quadrature_nodes", s.quadrature_nodes}};
  if (s.init_chi) solver["init_chi"] = *s.init_chi;
  if (s.init_p) solver["init_p"] = *s.init_p;
  j["solver"] = solver;

  if (cfg.sweep) {
    const auto& w = *cfg.sweep;
    j["sweep"] = {{"axis", w.axis},
                  {"grid", w.grid},
                  {"c_blocks", w.c_blocks},
                  {"mse0_db", w.mse0_db},
                  {"inv_alpha_lo", w.inv_alpha_lo},
                  {"inv_alpha_hi", w.inv_alpha_hi},
                  {"tolerance", w.tolerance},
                  {"prescan_points", w.prescan_points}};
    if (w.grid.empty()) j["sweep"].erase("grid");
  }
  if (cfg.simulate) {
    const auto& m = *cfg.simulate;
    j["simulate"] = {{"N", m.n},
                     {"trials", m.trials},
                     {"solver", std::string(solver_name(m.solver))},
                     {"seed", m.seed},
                     {"decoupled_samples", m.decoupled_samples},
                     {"max_iter", m.max_iter},
                     {"gates", {{"mse_relative", m.mse_relative}, {"mse_sigmas", m.mse_sigmas}, {"tv", m.tv}}}};
  }
  if (cfg.output != OutputConfig{}) {
    j["output"] = {{"path", cfg.output.path}, {"histograms_dir", cfg.output.histograms_dir}};
  }
  return j;
}

MatrixEnsemble RunConfig::make_ensemble() const {
  switch (ensemble.kind) {
    case EnsembleKind::MarcenkoPastur: return MatrixEnsemble::marcenko_pastur(ensemble.alpha);
    case EnsembleKind::Identity: return MatrixEnsemble::identity(ensemble.alpha);
    case EnsembleKind::Empirical: return MatrixEnsemble::empirical(ensemble.eigenvalues, ensemble.alpha);
  }
  throw InternalError("unknown ensemble kind");
}

SolveOptions RunConfig::solve_options() const {
  SolveOptions o;
  o.damping = solver.damping;
  o.min_damping = solver.min_damping;
  o.tol = solver.tol;
  o.max_iter = solver.max_iter;
  o.init_chi = solver.init_chi;
  o.init_p = solver.init_p;
  o.quadrature.nodes = solver.quadrature_nodes;
  o.quadrature.check_nodes = 2 * solver.quadrature_nodes;
  return o;
}

TuneOptions RunConfig::tune_options() const {
  TuneOptions o;
  o.log10_lo = tune.log10_lo;
  o.log10_hi = tune.log10_hi;
  o.prescan_points = tune.prescan_points;
  o.warm_start = tune.warm_start;
  o.solve = solve_options();
  return o;
}

RateOptions RunConfig::rate_options() const {
  RateOptions o;
  if (sweep) {
    o.inv_alpha_lo = sweep->inv_alpha_lo;
    o.inv_alpha_hi = sweep->inv_alpha_hi;
    o.tolerance = sweep->tolerance;
    o.prescan_points = sweep->prescan_points;
  }
  o.tune = tune_options();
  return o;
}

ValidationSpec RunConfig::validation_spec() const {
  ValidationSpec v;
  const SimulateConfig sim = simulate.value_or(SimulateConfig{});
  v.n = sim.n;
  v.alpha = ensemble.alpha;
  v.lambda = lambda.value_or(0.0);
  v.solver = sim.solver;
  v.trials = sim.trials;
  v.seed = sim.seed;
  v.decoupled_samples = sim.decoupled_samples;
  v.proximal.max_iter = sim.max_iter;
  v.gates = {sim.mse_relative, sim.mse_sigmas, sim.tv};
  v.quadrature = solve_options().quadrature;
  return v;
}

}  // namespace asymmap
