#include "qrw/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace qrw {

namespace {

using Json = nlohmann::ordered_json;

std::string idx(const std::string& path, size_t i) {
  std::ostringstream out;
  out << path << "[" << i << "]";
  return out.str();
}

const Json& member(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

const Json* optional_member(const Json& j, const std::string& path,
                            const char* key) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

double as_real(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "value must be finite");
  return x;
}

long long as_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

Complex as_complex(const Json& j, const std::string& path) {
  if (j.is_number()) return Complex(as_real(j, path), 0.0);
  if (j.is_array() && j.size() == 2)
    return Complex(as_real(j[0], idx(path, 0)), as_real(j[1], idx(path, 1)));
  throw ConfigError(path, "expected a real number or an [re, im] pair");
}

RealVector as_real_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  RealVector out(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    out(static_cast<Index>(i)) = as_real(j[i], idx(path, i));
  return out;
}

std::vector<double> as_real_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) out.push_back(as_real(j[i], idx(path, i)));
  return out;
}

ComplexVector as_complex_vector(const Json& j, const std::string& path,
                                Index size) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  if (static_cast<Index>(j.size()) != size) {
    std::ostringstream msg;
    msg << "expected " << size << " entries, got " << j.size();
    throw ConfigError(path, msg.str());
  }
  ComplexVector out(size);
  for (size_t i = 0; i < j.size(); ++i)
    out(static_cast<Index>(i)) = as_complex(j[i], idx(path, i));
  return out;
}

ComplexMatrix as_complex_matrix(const Json& j, const std::string& path,
                                Index rows, Index cols) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of rows");
  if (static_cast<Index>(j.size()) != rows) {
    std::ostringstream msg;
    msg << "expected " << rows << " rows, got " << j.size();
    throw ConfigError(path, msg.str());
  }
  ComplexMatrix out(rows, cols);
  for (size_t r = 0; r < j.size(); ++r) {
    const Json& row = j[r];
    const std::string row_path = idx(path, r);
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      std::ostringstream msg;
      msg << "expected a row of " << cols << " entries";
      throw ConfigError(row_path, msg.str());
    }
    for (size_t c = 0; c < row.size(); ++c)
      out(static_cast<Index>(r), static_cast<Index>(c)) =
          as_complex(row[c], idx(row_path, c));
  }
  return out;
}

StepFunction as_step_function(const Json& j, const std::string& path,
                              Index dim) {
  const Json& pieces = member(j, path, "pieces");
  const std::string pieces_path = join(path, "pieces");
  if (!pieces.is_array()) throw ConfigError(pieces_path, "expected an array");
  std::vector<double> durations;
  ComplexMatrix values(dim, static_cast<Index>(pieces.size()));
  for (size_t i = 0; i < pieces.size(); ++i) {
    const std::string piece_path = idx(pieces_path, i);
    const double d =
        as_real(member(pieces[i], piece_path, "duration"), join(piece_path, "duration"));
    if (!(d > 0.0))
      throw ConfigError(join(piece_path, "duration"), "must be positive");
    durations.push_back(d);
    values.col(static_cast<Index>(i)) = as_complex_vector(
        member(pieces[i], piece_path, "value"), join(piece_path, "value"), dim);
  }
  return make_step_function(std::move(durations), std::move(values));
}

Json complex_to_json(const Complex& z) {
  return Json::array({z.real(), z.imag()});
}

Json vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

Json step_to_json(const StepFunction& f) {
  Json pieces = Json::array();
  for (Index k = 0; k < f.pieces(); ++k) {
    Json piece;
    piece["duration"] = f.durations[static_cast<size_t>(k)];
    piece["value"] = vector_to_json(f.values.col(k));
    pieces.push_back(std::move(piece));
  }
  Json out;
  out["pieces"] = std::move(pieces);
  return out;
}

bool same_matrix(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index c = 0; c < a.cols(); ++c)
    for (Index r = 0; r < a.rows(); ++r)
      if (a(r, c) != b(r, c)) return false;
  return true;
}

bool same_vector(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) return false;
  for (Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

bool same_real_vector(const RealVector& a, const RealVector& b) {
  if (a.size() != b.size()) return false;
  for (Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

bool same_step(const StepFunction& a, const StepFunction& b) {
  return a.durations == b.durations && same_matrix(a.values, b.values);
}

}  // namespace

ConfigError::ConfigError(std::string path_, const std::string& message)
    : std::runtime_error(path_ + ": " + message), path(std::move(path_)) {}

bool operator==(const CondExpConfig& a, const CondExpConfig& b) {
  return a.kind == b.kind && a.blocks == b.blocks &&
         same_matrix(a.basis, b.basis);
}

bool operator==(const ModelConfig& a, const ModelConfig& b) {
  return a.flavor == b.flavor && same_matrix(a.h_sys, b.h_sys) &&
         same_real_vector(a.mu, b.mu) && same_matrix(a.coupling, b.coupling) &&
         a.e0_index == b.e0_index;
}

bool operator==(const ToleranceConfig& a, const ToleranceConfig& b) {
  return a.abs == b.abs && a.rel == b.rel && a.gauge == b.gauge &&
         a.choi == b.choi && a.walk_cocycle == b.walk_cocycle &&
         a.order_lo == b.order_lo && a.order_hi == b.order_hi;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.id == b.id && a.dim_h == b.dim_h && a.dim_K == b.dim_K &&
         same_real_vector(a.rho_eigenvalues, b.rho_eigenvalues) &&
         a.condexp == b.condexp && a.model == b.model &&
         a.tau_grid == b.tau_grid && a.horizon == b.horizon &&
         a.t_grid == b.t_grid && same_step(a.f, b.f) && same_step(a.g, b.g) &&
         same_matrix(a.observable, b.observable) && same_vector(a.u, b.u) &&
         same_vector(a.v, b.v) && a.seeds == b.seeds &&
         a.tolerances == b.tolerances;
}

ExperimentConfig parse_config(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<json>", e.what());
  }
  if (!root.is_object()) throw ConfigError("<json>", "expected a JSON object");

  ExperimentConfig cfg;
  cfg.id = as_string(member(root, "", "id"), "id");
  if (cfg.id.empty()) throw ConfigError("id", "must be nonempty");

  cfg.dim_h = static_cast<Index>(as_integer(member(root, "", "dim_h"), "dim_h"));
  cfg.dim_K = static_cast<Index>(as_integer(member(root, "", "dim_K"), "dim_K"));
  if (cfg.dim_h < 1) throw ConfigError("dim_h", "must be at least 1");
  if (cfg.dim_K < 2) throw ConfigError("dim_K", "must be at least 2");

  cfg.rho_eigenvalues =
      as_real_vector(member(root, "", "rho_eigenvalues"), "rho_eigenvalues");
  if (cfg.rho_eigenvalues.size() != cfg.dim_K)
    throw ConfigError("rho_eigenvalues", "length must equal dim_K");
  double sum = 0.0;
  for (Index i = 0; i < cfg.rho_eigenvalues.size(); ++i) {
    if (cfg.rho_eigenvalues(i) < kFaithfulnessFloor)
      throw ConfigError(idx("rho_eigenvalues", static_cast<size_t>(i)),
                        "faithfulness violation: eigenvalue too small");
    sum += cfg.rho_eigenvalues(i);
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ConfigError("rho_eigenvalues", "must sum to 1");

  {
    const Json& ce = member(root, "", "condexp");
    cfg.condexp.kind = as_string(member(ce, "condexp", "kind"), "condexp.kind");
    if (cfg.condexp.kind == "block") {
      const Json& blocks = member(ce, "condexp", "blocks");
      if (!blocks.is_array())
        throw ConfigError("condexp.blocks", "expected an array of index lists");
      for (size_t b = 0; b < blocks.size(); ++b) {
        const std::string bpath = idx("condexp.blocks", b);
        if (!blocks[b].is_array()) throw ConfigError(bpath, "expected an array");
        std::vector<int> part;
        for (size_t i = 0; i < blocks[b].size(); ++i)
          part.push_back(
              static_cast<int>(as_integer(blocks[b][i], idx(bpath, i))));
        cfg.condexp.blocks.push_back(std::move(part));
      }
    } else if (cfg.condexp.kind == "pinching") {
      cfg.condexp.basis = as_complex_matrix(member(ce, "condexp", "basis"),
                                            "condexp.basis", cfg.dim_K,
                                            cfg.dim_K);
      if (unitarity_defect(cfg.condexp.basis) > 1e-12)
        throw ConfigError("condexp.basis", "columns must form an orthonormal basis");
    } else if (cfg.condexp.kind != "diagonal" && cfg.condexp.kind != "state") {
      throw ConfigError("condexp.kind",
                        "expected diagonal, block, state or pinching");
    }
  }

  {
    const Json& mj = member(root, "", "model");
    const std::string flavor = as_string(member(mj, "model", "flavor"),
                                         "model.flavor");
    if (flavor == "HP")
      cfg.model.flavor = Flavor::HP;
    else if (flavor == "EH")
      cfg.model.flavor = Flavor::EH;
    else
      throw ConfigError("model.flavor", "expected HP or EH");
    cfg.model.h_sys = as_complex_matrix(member(mj, "model", "H_sys"),
                                        "model.H_sys", cfg.dim_h, cfg.dim_h);
    cfg.model.mu = as_real_vector(member(mj, "model", "mu"), "model.mu");
    if (cfg.model.mu.size() != cfg.dim_K)
      throw ConfigError("model.mu", "length must equal dim_K");
    cfg.model.coupling =
        as_complex_matrix(member(mj, "model", "V"), "model.V",
                          cfg.dim_h * (cfg.dim_K - 1), cfg.dim_h);
    cfg.model.e0_index = static_cast<int>(
        as_integer(member(mj, "model", "e0_index"), "model.e0_index"));
    if (cfg.model.e0_index < 0 || cfg.model.e0_index >= cfg.dim_K)
      throw ConfigError("model.e0_index", "out of range");
  }

  cfg.tau_grid = as_real_list(member(root, "", "tau_grid"), "tau_grid");
  for (size_t i = 0; i < cfg.tau_grid.size(); ++i)
    if (!(cfg.tau_grid[i] > 0.0))
      throw ConfigError(idx("tau_grid", i), "must be positive");
  {
    std::vector<double> sorted = cfg.tau_grid;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("tau_grid", "values must be distinct");
  }

  cfg.horizon = as_real(member(root, "", "horizon"), "horizon");
  if (cfg.horizon < 0.0) throw ConfigError("horizon", "must be nonnegative");

  cfg.t_grid = as_real_list(member(root, "", "t_grid"), "t_grid");
  for (size_t i = 0; i < cfg.t_grid.size(); ++i)
    if (cfg.t_grid[i] < 0.0 || cfg.t_grid[i] > cfg.horizon + 1e-12)
      throw ConfigError(idx("t_grid", i), "must lie in [0, horizon]");

  const Index dim_noise = cfg.dim_K * cfg.dim_K - 1;
  cfg.f = as_step_function(member(root, "", "f"), "f", dim_noise);
  cfg.g = as_step_function(member(root, "", "g"), "g", dim_noise);
  if (horizon(cfg.f) > cfg.horizon + 1e-12)
    throw ConfigError("f", "support exceeds the horizon");
  if (horizon(cfg.g) > cfg.horizon + 1e-12)
    throw ConfigError("g", "support exceeds the horizon");

  if (const Json* obs = optional_member(root, "", "observable")) {
    cfg.observable =
        as_complex_matrix(*obs, "observable", cfg.dim_h, cfg.dim_h);
  } else if (cfg.dim_h >= 2) {
    cfg.observable = ComplexMatrix::Zero(cfg.dim_h, cfg.dim_h);
    cfg.observable(0, 1) = 1.0;
    cfg.observable(1, 0) = 1.0;
  } else {
    cfg.observable = ComplexMatrix::Identity(1, 1);
  }
  if (const Json* uj = optional_member(root, "", "u")) {
    cfg.u = as_complex_vector(*uj, "u", cfg.dim_h);
  } else {
    cfg.u = ComplexVector::Zero(cfg.dim_h);
    cfg.u(0) = 1.0;
  }
  if (const Json* vj = optional_member(root, "", "v")) {
    cfg.v = as_complex_vector(*vj, "v", cfg.dim_h);
  } else {
    cfg.v = ComplexVector::Zero(cfg.dim_h);
    cfg.v(0) = 1.0;
  }

  {
    const Json& seeds = member(root, "", "seeds");
    if (!seeds.is_number_integer() || seeds.get<long long>() < 0)
      throw ConfigError("seeds", "expected a nonnegative integer");
    cfg.seeds = seeds.get<std::uint64_t>();
  }

  if (const Json* tol = optional_member(root, "", "tolerances")) {
    const auto read = [&](const char* key, double* slot) {
      if (const Json* v = optional_member(*tol, "tolerances", key)) {
        const std::string path = join("tolerances", key);
        *slot = as_real(*v, path);
        if (!(*slot > 0.0)) throw ConfigError(path, "must be positive");
      }
    };
    read("abs", &cfg.tolerances.abs);
    read("rel", &cfg.tolerances.rel);
    read("gauge", &cfg.tolerances.gauge);
    read("choi", &cfg.tolerances.choi);
    read("walk_cocycle", &cfg.tolerances.walk_cocycle);
    read("order_lo", &cfg.tolerances.order_lo);
    read("order_hi", &cfg.tolerances.order_hi);
    if (cfg.tolerances.order_lo >= cfg.tolerances.order_hi)
      throw ConfigError("tolerances.order_lo", "must be below order_hi");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  Json root;
  root["id"] = cfg.id;
  root["dim_h"] = cfg.dim_h;
  root["dim_K"] = cfg.dim_K;
  {
    Json eig = Json::array();
    for (Index i = 0; i < cfg.rho_eigenvalues.size(); ++i)
      eig.push_back(cfg.rho_eigenvalues(i));
    root["rho_eigenvalues"] = std::move(eig);
  }
  {
    Json ce;
    ce["kind"] = cfg.condexp.kind;
    if (cfg.condexp.kind == "block") ce["blocks"] = cfg.condexp.blocks;
    if (cfg.condexp.kind == "pinching")
      ce["basis"] = matrix_to_json(cfg.condexp.basis);
    root["condexp"] = std::move(ce);
  }
  {
    Json mj;
    mj["flavor"] = cfg.model.flavor == Flavor::HP ? "HP" : "EH";
    mj["H_sys"] = matrix_to_json(cfg.model.h_sys);
    Json mu = Json::array();
    for (Index i = 0; i < cfg.model.mu.size(); ++i) mu.push_back(cfg.model.mu(i));
    mj["mu"] = std::move(mu);
    mj["V"] = matrix_to_json(cfg.model.coupling);
    mj["e0_index"] = cfg.model.e0_index;
    root["model"] = std::move(mj);
  }
  root["tau_grid"] = cfg.tau_grid;
  root["horizon"] = cfg.horizon;
  root["t_grid"] = cfg.t_grid;
  root["f"] = step_to_json(cfg.f);
  root["g"] = step_to_json(cfg.g);
  root["observable"] = matrix_to_json(cfg.observable);
  root["u"] = vector_to_json(cfg.u);
  root["v"] = vector_to_json(cfg.v);
  root["seeds"] = cfg.seeds;
  {
    Json tol;
    tol["abs"] = cfg.tolerances.abs;
    tol["rel"] = cfg.tolerances.rel;
    tol["gauge"] = cfg.tolerances.gauge;
    tol["choi"] = cfg.tolerances.choi;
    tol["walk_cocycle"] = cfg.tolerances.walk_cocycle;
    tol["order_lo"] = cfg.tolerances.order_lo;
    tol["order_hi"] = cfg.tolerances.order_hi;
    root["tolerances"] = std::move(tol);
  }
  return root.dump(2) + "\n";
}

}  // namespace qrw
