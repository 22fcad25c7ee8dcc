#include "biot/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace biot {

using json = nlohmann::json;

namespace {

std::string join_issues(const std::vector<std::string> &issues)
{
  std::string s = "invalid configuration:";
  for (const auto &i : issues)
    s += "\n  " + i;
  return s;
}

/// Walks one JSON object, collecting every problem instead of stopping at
/// the first one. Keys never read are reported as unknown by finish().
class Section
{
public:
  Section(const json *obj, std::string path, std::vector<std::string> &issues)
      : obj_(obj), path_(std::move(path)), issues_(issues)
  {
    if (obj_ && !obj_->is_object()) {
      issue("", "must be an object");
      obj_ = nullptr;
    }
  }

  bool present() const { return obj_ != nullptr; }
  bool has(const std::string &key) const { return obj_ && obj_->contains(key); }

  const json *raw(const std::string &key)
  {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key))
      return nullptr;
    return &obj_->at(key);
  }

  Section child(const std::string &key) { return Section(raw(key), name(key), issues_); }

  void number(const std::string &key, double &out, bool (*ok)(double) = nullptr, const char *rule = nullptr)
  {
    const json *v = raw(key);
    if (!v)
      return;
    if (!v->is_number()) {
      issue(key, "must be a number");
      return;
    }
    const double x = v->get<double>();
    if (ok && !ok(x)) {
      issue(key, rule);
      return;
    }
    out = x;
  }

  template <class Int> void integer(const std::string &key, Int &out, long long min_value)
  {
    const json *v = raw(key);
    if (!v)
      return;
    if (!v->is_number_integer() || v->get<long long>() < min_value) {
      issue(key, "must be an integer >= " + std::to_string(min_value));
      return;
    }
    out = static_cast<Int>(v->get<long long>());
  }

  void boolean(const std::string &key, bool &out)
  {
    const json *v = raw(key);
    if (!v)
      return;
    if (!v->is_boolean()) {
      issue(key, "must be true or false");
      return;
    }
    out = v->get<bool>();
  }

  void string(const std::string &key, std::string &out)
  {
    const json *v = raw(key);
    if (!v)
      return;
    if (!v->is_string()) {
      issue(key, "must be a string");
      return;
    }
    out = v->get<std::string>();
  }

  template <class E> void choice(const std::string &key, E &out, const std::vector<std::pair<std::string, E>> &options)
  {
    const json *v = raw(key);
    if (!v)
      return;
    if (v->is_string())
      for (const auto &[name, value] : options)
        if (v->get<std::string>() == name) {
          out = value;
          return;
        }
    std::string allowed;
    for (const auto &o : options)
      allowed += (allowed.empty() ? "" : ", ") + o.first;
    issue(key, "must be one of: " + allowed);
  }

  void numbers(const std::string &key, std::vector<double> &out, bool (*ok)(double) = nullptr,
               const char *rule = nullptr)
  {
    const json *v = raw(key);
    if (!v)
      return;
    if (!v->is_array() || v->empty()) {
      issue(key, "must be a non-empty array of numbers");
      return;
    }
    std::vector<double> tmp;
    for (const auto &e : *v) {
      if (!e.is_number() || (ok && !ok(e.get<double>()))) {
        issue(key, rule ? std::string("entries ") + rule : "entries must be numbers");
        return;
      }
      tmp.push_back(e.get<double>());
    }
    out = std::move(tmp);
  }

  void integers(const std::string &key, std::vector<int> &out, int min_value)
  {
    const json *v = raw(key);
    if (!v)
      return;
    if (!v->is_array() || v->empty()) {
      issue(key, "must be a non-empty array of integers");
      return;
    }
    std::vector<int> tmp;
    for (const auto &e : *v) {
      if (!e.is_number_integer() || e.get<long long>() < min_value) {
        issue(key, "entries must be integers >= " + std::to_string(min_value));
        return;
      }
      tmp.push_back(e.get<int>());
    }
    out = std::move(tmp);
  }

  void strings(const std::string &key, std::vector<std::string> &out)
  {
    const json *v = raw(key);
    if (!v)
      return;
    if (!v->is_array()) {
      issue(key, "must be an array of strings");
      return;
    }
    std::vector<std::string> tmp;
    for (const auto &e : *v) {
      if (!e.is_string()) {
        issue(key, "entries must be strings");
        return;
      }
      tmp.push_back(e.get<std::string>());
    }
    out = std::move(tmp);
  }

  void finish()
  {
    if (!obj_)
      return;
    for (const auto &[key, value] : obj_->items())
      if (!seen_.count(key))
        issues_.push_back(name(key) + ": unknown key");
  }

  void issue(const std::string &key, const std::string &what) { issues_.push_back(name(key) + ": " + what); }
  std::string name(const std::string &key) const
  {
    if (key.empty())
      return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }
  std::vector<std::string> &issues() { return issues_; }

private:
  const json *obj_;
  std::string path_;
  std::vector<std::string> &issues_;
  std::set<std::string> seen_;
};

bool positive(double x) { return x > 0.0; }
bool nonnegative(double x) { return x >= 0.0; }
bool poisson(double x) { return x > 0.0 && x < 0.5; }

std::optional<cplx> parse_complex(const json &v)
{
  if (v.is_number())
    return cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return cplx(v[0].get<double>(), v[1].get<double>());
  return std::nullopt;
}

BoundaryValue parse_value(const json *v, bool vector_valued, int dim, const std::string &where,
                          std::vector<std::string> &issues)
{
  BoundaryValue out;
  if (!v)
    return out;
  if (v->is_string()) {
    if (v->get<std::string>() == "manufactured")
      out.manufactured = true;
    else
      issues.push_back(where + ": the only named value is \"manufactured\"");
    return out;
  }
  if (!vector_valued) {
    if (auto z = parse_complex(*v))
      out.scalar = *z;
    else
      issues.push_back(where + ": must be a number, [re, im] or \"manufactured\"");
    return out;
  }
  if (!v->is_array() || static_cast<int>(v->size()) != dim) {
    issues.push_back(where + ": must list " + std::to_string(dim) + " components or be \"manufactured\"");
    return out;
  }
  for (int c = 0; c < dim; ++c) {
    auto z = parse_complex((*v)[static_cast<std::size_t>(c)]);
    if (!z) {
      issues.push_back(where + ": components must be numbers or [re, im] pairs");
      return out;
    }
    out.vector[c] = *z;
  }
  return out;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues))
{
}

std::string to_string(StudyKind s)
{
  switch (s) {
  case StudyKind::single: return "single";
  case StudyKind::convergence: return "convergence";
  case StudyKind::kappa_sweep: return "kappa_sweep";
  case StudyKind::nu_sweep: return "nu_sweep";
  case StudyKind::layered: return "layered";
  }
  return "unknown";
}

RunConfig parse_config(std::string_view json_text, const std::filesystem::path &base_dir)
{
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }

  std::vector<std::string> issues;
  RunConfig cfg;
  cfg.base_dir = base_dir;
  Section root(&doc, "", issues);

  root.choice<StudyKind>("study", cfg.study,
                         {{"single", StudyKind::single},
                          {"convergence", StudyKind::convergence},
                          {"kappa_sweep", StudyKind::kappa_sweep},
                          {"nu_sweep", StudyKind::nu_sweep},
                          {"layered", StudyKind::layered}});
  root.integer("degree", cfg.degree, 1);
  if (cfg.degree > 2)
    root.issue("degree", "must be 1 or 2");

  {
    auto g = root.child("geometry");
    if (!g.present())
      root.issue("geometry", "is required");
    g.choice<GeometryKind>("type", cfg.geometry.kind,
                           {{"unit_square", GeometryKind::unit_square},
                            {"unit_cube", GeometryKind::unit_cube},
                            {"gmsh", GeometryKind::gmsh}});
    g.integer("n", cfg.geometry.n, 1);
    g.integers("levels", cfg.geometry.levels, 1);
    std::string path;
    g.string("path", path);
    cfg.geometry.path = path;
    if (g.present() && cfg.geometry.kind == GeometryKind::gmsh && path.empty())
      g.issue("path", "is required for gmsh geometry");
    g.finish();
  }

  {
    auto m = root.child("material");
    m.number("E", cfg.material.E, positive, "must be positive");
    m.number("nu", cfg.material.nu, poisson, "must lie in (0, 0.5)");
    m.number("mu_f", cfg.material.mu_f, positive, "must be positive");
    m.number("omega", cfg.material.omega, positive, "must be positive");
    m.number("rho", cfg.material.rho, positive, "must be positive");
    m.number("alpha", cfg.material.alpha, positive, "must be positive");
    m.number("B", cfg.material.B, positive, "must be positive");
    m.number("ell", cfg.material.ell, positive, "must be positive");
    if (const json *k = m.raw("kappa")) {
      if (k->is_number()) {
        if (k->get<double>() > 0.0)
          cfg.material.kappa = {{0, k->get<double>()}};
        else
          m.issue("kappa", "must be positive");
      } else if (k->is_object() && !k->empty()) {
        std::map<int, double> map;
        for (const auto &[key, value] : k->items()) {
          int region = 0;
          try {
            std::size_t used = 0;
            region = std::stoi(key, &used);
            if (used != key.size())
              throw std::invalid_argument(key);
          } catch (const std::exception &) {
            m.issue("kappa." + key, "region keys must be integers");
            continue;
          }
          if (!value.is_number() || !(value.get<double>() > 0.0)) {
            m.issue("kappa." + key, "must be a positive number");
            continue;
          }
          map[region] = value.get<double>();
        }
        cfg.material.kappa = map;
      } else {
        m.issue("kappa", "must be a positive number or a map from region id to value");
      }
    }
    m.finish();
  }

  {
    auto s = root.child("stabilization");
    if (const json *d1 = s.raw("delta1")) {
      if (d1->is_string() && d1->get<std::string>() == "inverse_omega_squared")
        cfg.delta1_inverse_omega_squared = true;
      else if (d1->is_number() && d1->get<double>() >= 0.0)
        cfg.stab.delta1 = d1->get<double>();
      else
        s.issue("delta1", "must be a nonnegative number or \"inverse_omega_squared\"");
    }
    s.number("delta2", cfg.stab.delta2, nonnegative, "must be nonnegative");
    s.finish();
  }

  {
    std::string source = "none";
    root.string("source", source);
    if (source == "manufactured")
      cfg.manufactured_source = true;
    else if (source != "none")
      root.issue("source", "must be \"none\" or \"manufactured\"");
  }

  if (const json *b = root.raw("boundary")) {
    if (!b->is_object()) {
      root.issue("boundary", "must be an object keyed by boundary tag");
    } else {
      const int dim = cfg.geometry.dim();
      for (const auto &[tag, entry] : b->items()) {
        Section e(&entry, "boundary." + tag, issues);
        BoundaryEntry be;
        be.tag = tag;
        auto d = e.child("displacement");
        if (!d.present())
          e.issue("displacement", "is required");
        d.choice<DisplacementCondition>(
            "kind", be.displacement,
            {{"dirichlet", DisplacementCondition::dirichlet}, {"traction", DisplacementCondition::traction}});
        be.displacement_value = parse_value(d.raw("value"), true, dim, d.name("value"), issues);
        d.finish();
        auto p = e.child("pressure");
        if (!p.present())
          e.issue("pressure", "is required");
        p.choice<PressureCondition>("kind", be.pressure,
                                    {{"dirichlet", PressureCondition::dirichlet}, {"flux", PressureCondition::flux}});
        be.pressure_value = parse_value(p.raw("value"), false, dim, p.name("value"), issues);
        p.finish();
        e.finish();
        cfg.boundary.push_back(std::move(be));
      }
    }
  }

  {
    auto s = root.child("solver");
    s.choice<SolveMethod>("method", cfg.solver.method, {{"direct", SolveMethod::direct}, {"gmres", SolveMethod::gmres}});
    s.number("tol", cfg.solver.gmres.tol, positive, "must be positive");
    s.integer("restart", cfg.solver.gmres.restart, 1);
    s.integer("max_iter", cfg.solver.gmres.max_iter, 1);
    s.integer("max_unknowns", cfg.solver.direct.max_unknowns, 1);
    s.choice<bool>("precond", cfg.solver.ilu0, {{"ilu0", true}, {"none", false}});
    s.finish();
  }

  {
    auto s = root.child("sweep");
    s.numbers("kappas", cfg.sweep.kappas, positive, "must be positive");
    s.numbers("nus", cfg.sweep.nus, poisson, "must lie in (0, 0.5)");
    s.numbers("delta2", cfg.sweep.delta2s, nonnegative, "must be nonnegative");
    s.finish();
  }

  {
    auto s = root.child("layered");
    auto &l = cfg.layered;
    s.numbers("omegas", l.omegas, positive, "must be positive");
    s.numbers("layer_bounds", l.layer_bounds, [](double x) { return x > 0.0 && x < 1.0; }, "must lie in (0, 1)");
    s.number("bottom_traction", l.bottom_traction);
    s.number("bottom_pressure", l.bottom_pressure);
    s.integer("samples", l.samples, 2);
    s.number("line_x", l.line_x, [](double x) { return x >= 0.0 && x <= 1.0; }, "must lie in [0, 1]");
    s.boolean("compare_direct", l.compare_direct);
    s.finish();
  }

  {
    auto s = root.child("spectrum");
    s.integer("k_eigs", cfg.spectrum.k_eigs, 1);
    s.strings("clamped", cfg.spectrum.clamped);
    s.finish();
  }

  {
    auto s = root.child("infsup");
    s.integers("levels", cfg.infsup.levels, 1);
    s.numbers("delta1", cfg.infsup.delta1s, nonnegative, "must be nonnegative");
    s.strings("displacement_dirichlet", cfg.infsup.displacement_dirichlet);
    s.strings("pressure_dirichlet", cfg.infsup.pressure_dirichlet);
    s.finish();
  }

  {
    auto s = root.child("output");
    std::string dir;
    s.string("directory", dir);
    cfg.output_dir = dir;
    s.boolean("vtk", cfg.write_vtk);
    s.finish();
  }
  root.finish();

  // Cross-field requirements.
  const bool structured = cfg.geometry.kind != GeometryKind::gmsh;
  switch (cfg.study) {
  case StudyKind::convergence:
    if (!structured)
      issues.push_back("geometry.type: convergence studies need unit_square or unit_cube");
    if (cfg.geometry.levels.size() < 3)
      issues.push_back("geometry.levels: convergence studies need at least 3 levels");
    break;
  case StudyKind::kappa_sweep:
    if (!structured)
      issues.push_back("geometry.type: sweeps need unit_square or unit_cube");
    if (cfg.sweep.kappas.empty())
      issues.push_back("sweep.kappas: required for kappa_sweep");
    break;
  case StudyKind::nu_sweep:
    if (!structured)
      issues.push_back("geometry.type: sweeps need unit_square or unit_cube");
    if (cfg.sweep.nus.empty())
      issues.push_back("sweep.nus: required for nu_sweep");
    break;
  case StudyKind::layered:
    if (cfg.geometry.kind != GeometryKind::unit_square)
      issues.push_back("geometry.type: the layered study uses unit_square");
    break;
  case StudyKind::single:
    break;
  }
  if (cfg.study != StudyKind::single && !cfg.boundary.empty())
    issues.push_back("boundary: only single runs take explicit boundary conditions");
  if (cfg.study == StudyKind::single && cfg.boundary.empty() && cfg.geometry.kind == GeometryKind::gmsh)
    issues.push_back("boundary: required for gmsh geometry");
  if (cfg.sweep.delta2s.empty())
    cfg.sweep.delta2s = {cfg.stab.delta2};

  if (!issues.empty())
    throw ConfigError(std::move(issues));
  return cfg;
}

RunConfig load_config(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError({"cannot read config file " + path.string()});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

} // namespace biot
