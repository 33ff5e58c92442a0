#include "levymc/json_io.hpp"

#include <set>

namespace levymc {

namespace {

// Object view that records which keys were consumed and rejects leftovers.
class StrictView {
 public:
  StrictView(const json& j, std::string ctx) : j_(j), ctx_(std::move(ctx)) {
    if (!j_.is_object()) throw ConfigError(ctx_ + ": expected a JSON object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& at(const char* key) {
    if (!j_.contains(key)) throw ConfigError(ctx_ + ": missing required key '" + key + "'");
    used_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  T get(const char* key) {
    try {
      return at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(ctx_ + ": bad value for '" + key + "': " + e.what());
    }
  }

  template <typename T>
  T get_or(const char* key, T fallback) {
    if (!j_.contains(key)) return fallback;
    return get<T>(key);
  }

  void done() {
    for (const auto& item : j_.items())
      if (!used_.contains(item.key()))
        throw ConfigError(ctx_ + ": unknown key '" + item.key() + "'");
  }

 private:
  const json& j_;
  std::string ctx_;
  std::set<std::string> used_;
};

Eigen::VectorXd vector_from(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(ctx + ": expected numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw ConfigError(ctx + ": expected an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(ctx + ": expected non-empty rows");
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError(ctx + ": ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return m;
}

json vector_to(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_to(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

std::vector<double> dvec_from(const json& j, const std::string& ctx) {
  const Eigen::VectorXd v = vector_from(j, ctx);
  return {v.data(), v.data() + v.size()};
}

}  // namespace

LevyModel model_from_json(const json& j) {
  StrictView v(j, "model");
  const int dim_x = v.get<int>("dim_x");
  Eigen::MatrixXd sigma = matrix_from(v.at("sigma"), "model.sigma");
  Eigen::VectorXd drift = vector_from(v.at("drift"), "model.drift");
  std::optional<double> budget;
  if (v.has("lipschitz_budget")) budget = v.get<double>("lipschitz_budget");

  StrictView mv(v.at("measure"), "model.measure");
  const std::string kind = mv.get<std::string>("kind");
  std::optional<PowerLawG> g_override;
  if (mv.has("g")) {
    StrictView gv(mv.at("g"), "model.measure.g");
    g_override = PowerLawG{gv.get<double>("coefficient"), gv.get<double>("exponent")};
    gv.done();
  }

  JumpMeasureSpec measure;
  if (kind == "truncated_stable") {
    TruncatedStable ts;
    ts.alpha = mv.get<double>("alpha");
    ts.intensity = mv.get<double>("intensity");
    ts.radius = mv.get_or<double>("radius", 1.0);
    ts.one_sided = mv.get_or<bool>("one_sided", false);
    measure = ts;
  } else if (kind == "finite_activity") {
    FiniteActivity fa;
    const json& atoms = mv.at("atoms");
    if (!atoms.is_array()) throw ConfigError("model.measure.atoms: expected an array");
    for (const auto& a : atoms) {
      StrictView av(a, "model.measure.atoms[]");
      FiniteAtom atom;
      atom.x = vector_from(av.at("x"), "atom.x");
      atom.mass = av.get<double>("mass");
      av.done();
      fa.atoms.push_back(std::move(atom));
    }
    measure = fa;
  } else if (kind == "tabulated_radial") {
    TabulatedRadial tab;
    tab.radii = dvec_from(mv.at("radii"), "model.measure.radii");
    tab.density = dvec_from(mv.at("density"), "model.measure.density");
    measure = tab;
  } else {
    throw ConfigError("model.measure.kind: unknown kind '" + kind + "'");
  }
  mv.done();
  v.done();

  try {
    return LevyModel(dim_x, std::move(sigma), std::move(drift), std::move(measure), budget,
                     g_override);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  } catch (const DimensionMismatchError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

json model_to_json(const LevyModel& model) {
  json j;
  j["dim_x"] = model.dim_x();
  j["sigma"] = matrix_to(model.sigma());
  j["drift"] = vector_to(model.drift());
  json m;
  if (const auto* ts = std::get_if<TruncatedStable>(&model.measure())) {
    m["kind"] = "truncated_stable";
    m["alpha"] = ts->alpha;
    m["intensity"] = ts->intensity;
    m["radius"] = ts->radius;
    m["one_sided"] = ts->one_sided;
  } else if (const auto* fa = std::get_if<FiniteActivity>(&model.measure())) {
    m["kind"] = "finite_activity";
    json atoms = json::array();
    for (const auto& a : fa->atoms) atoms.push_back({{"x", vector_to(a.x)}, {"mass", a.mass}});
    m["atoms"] = atoms;
  } else {
    const auto& tab = std::get<TabulatedRadial>(model.measure());
    m["kind"] = "tabulated_radial";
    m["radii"] = tab.radii;
    m["density"] = tab.density;
  }
  if (model.g_override())
    m["g"] = {{"coefficient", model.g_override()->coefficient},
              {"exponent", model.g_override()->exponent}};
  j["measure"] = m;
  j["lipschitz_budget"] = model.lipschitz_budget();
  return j;
}

CoefficientField coefficient_from_json(const json& j, int dim_x) {
  StrictView v(j, "coefficient");
  const std::string kind = v.get<std::string>("kind");
  CoefficientField out = CoefficientField::constant(Eigen::MatrixXd::Zero(1, 1));
  if (kind == "constant") {
    out = CoefficientField::constant(matrix_from(v.at("matrix"), "coefficient.matrix"));
  } else if (kind == "affine") {
    Eigen::MatrixXd base = matrix_from(v.at("base"), "coefficient.base");
    const json& sl = v.at("slopes");
    if (!sl.is_array()) throw ConfigError("coefficient.slopes: expected an array of matrices");
    std::vector<Eigen::MatrixXd> slopes;
    for (const auto& s : sl) slopes.push_back(matrix_from(s, "coefficient.slopes[]"));
    out = CoefficientField::affine(std::move(base), std::move(slopes));
  } else if (kind == "sinusoidal") {
    out = CoefficientField::sinusoidal(matrix_from(v.at("base"), "coefficient.base"),
                                       matrix_from(v.at("amp"), "coefficient.amp"),
                                       vector_from(v.at("freq"), "coefficient.freq"));
  } else {
    throw ConfigError("coefficient.kind: unknown kind '" + kind + "'");
  }
  v.done();
  if (out.dim_x() != dim_x)
    throw ConfigError("coefficient: column count must equal the model's dim_x");
  return out;
}

Payoff payoff_from_json(const json& j) {
  StrictView v(j, "payoff");
  const std::string kind = v.get<std::string>("kind");
  if (kind == "terminal") {
    Payoff p = Payoff::terminal(vector_from(v.at("weights"), "payoff.weights"));
    v.done();
    return p;
  }
  if (kind == "lookback") {
    Payoff p = Payoff::lookback(v.get<int>("coordinate"));
    v.done();
    return p;
  }
  if (kind == "asian") {
    Payoff p = Payoff::asian(vector_from(v.at("weights"), "payoff.weights"));
    v.done();
    return p;
  }
  throw ConfigError("payoff.kind: unknown kind '" + kind + "'");
}

ScheduleSpec schedule_spec_from_json(const json& j) {
  StrictView v(j, "schedule");
  ScheduleSpec s;
  s.mode = v.get<std::string>("mode");
  s.correction = v.get_or<bool>("correction", true);
  if (s.mode == "manual") {
    s.eps = dvec_from(v.at("eps"), "schedule.eps");
    s.h = dvec_from(v.at("h"), "schedule.h");
    s.n = v.get<std::vector<std::int64_t>>("n");
  } else if (s.mode == "case1" || s.mode == "case2") {
    s.tau = v.get<double>("tau");
    s.c1 = v.get_or<double>("C1", 1.0);
    s.c2 = v.get_or<double>("C2", 1.0);
  } else {
    throw ConfigError("schedule.mode: must be 'manual', 'case1' or 'case2'");
  }
  v.done();
  return s;
}

LevelSchedule build_schedule(const LevyModel& model, const ScheduleSpec& spec, double tau) {
  try {
    if (spec.mode == "manual") return make_manual(model, spec.eps, spec.h, spec.n, spec.correction);
    if (spec.mode == "case1") return schedule_case1(model, tau, spec.c1, spec.c2, spec.correction);
    return schedule_case2(model, tau, spec.c1, spec.c2, spec.correction);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

LevelSchedule build_schedule(const LevyModel& model, const ScheduleSpec& spec) {
  return build_schedule(model, spec, spec.tau);
}

ExperimentConfig config_from_json(const json& j) {
  StrictView v(j, "config");
  LevyModel model = model_from_json(v.at("model"));
  CoefficientField coeff = coefficient_from_json(v.at("coefficient"), model.dim_x());
  Eigen::VectorXd y0 = vector_from(v.at("y0"), "y0");
  if (y0.size() != coeff.dim_y())
    throw ConfigError("y0: dimension must equal the coefficient's dim_y");
  Payoff payoff = payoff_from_json(v.at("payoff"));
  try {
    payoff.check_dim(coeff.dim_y());
  } catch (const DimensionMismatchError& e) {
    throw ConfigError(std::string("payoff: ") + e.what());
  }
  ScheduleSpec schedule = schedule_spec_from_json(v.at("schedule"));

  ExperimentConfig cfg{std::move(model),  std::move(coeff),    std::move(y0),
                       std::move(payoff), std::move(schedule), 0,
                       std::nullopt,      10000,               ReferenceSpec{}};
  cfg.seed = v.get_or<std::uint64_t>("seed", 0);
  cfg.n_probe = v.get_or<std::int64_t>("n_probe", 10000);
  if (v.has("sweep")) {
    StrictView sv(v.at("sweep"), "sweep");
    SweepSpec sweep;
    sweep.tau_list = dvec_from(sv.at("tau_list"), "sweep.tau_list");
    sweep.repetitions = sv.get<int>("repetitions");
    sv.done();
    if (sweep.tau_list.empty() || sweep.repetitions < 1)
      throw ConfigError("sweep: need a non-empty tau_list and repetitions >= 1");
    cfg.sweep = std::move(sweep);
  }
  if (v.has("reference")) {
    StrictView rv(v.at("reference"), "reference");
    cfg.reference.mode = rv.get_or<std::string>("mode", "auto");
    cfg.reference.n = rv.get_or<std::int64_t>("n", 50000);
    rv.done();
    if (cfg.reference.mode != "auto" && cfg.reference.mode != "closed_form" &&
        cfg.reference.mode != "simulation")
      throw ConfigError("reference.mode: must be 'auto', 'closed_form' or 'simulation'");
  }
  v.done();
  return cfg;
}

json result_to_json(const MlmcResult& result) {
  json j;
  j["estimate"] = result.estimate;
  j["stderr"] = result.stderr_value;
  j["cost"] = result.model_cost;
  json levels = json::array();
  for (const auto& st : result.levels) {
    levels.push_back({{"k", st.k},
                      {"n", st.n},
                      {"mean", st.mean},
                      {"var", st.var},
                      {"eps", st.eps},
                      {"h", st.h},
                      {"envelope", st.envelope},
                      {"breakpoints", st.breakpoints}});
  }
  j["levels"] = levels;
  return j;
}

json skeleton_to_json(const PathSkeleton& path) {
  json j;
  j["t"] = path.t;
  json ys = json::array();
  for (std::size_t i = 0; i < path.size(); ++i) {
    json row = json::array();
    for (int c = 0; c < path.dim; ++c) row.push_back(path.y[i * path.dim + c]);
    ys.push_back(row);
  }
  j["y"] = ys;
  return j;
}

json realization_to_json(const DrivingRealization& real) {
  json j;
  json jumps = json::array();
  for (const auto& jr : real.jumps)
    jumps.push_back({{"t", jr.time}, {"x", vector_to(jr.size)}});
  j["jumps"] = jumps;
  j["grid_fine"] = real.grid_fine.points;
  j["grid_coarse"] = real.grid_coarse.points;
  return j;
}

}  // namespace levymc
