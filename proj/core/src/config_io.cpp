#include "itw/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "itw/errors.hpp"

namespace itw {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config key '" + path + "': " + message);
}

void expect_object(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

const json& req(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing required key");
  return *it;
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

double as_real(const json& node, const std::string& path) {
  if (!node.is_number()) fail(path, "expected a number");
  return node.get<double>();
}

std::uint64_t as_uint(const json& node, const std::string& path) {
  if (node.is_number_unsigned()) return node.get<std::uint64_t>();
  if (node.is_number_integer() && node.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(node.get<std::int64_t>());
  fail(path, "expected a non-negative integer");
}

Vec as_vec(const json& node, const std::string& path) {
  if (!node.is_array()) fail(path, "expected an array of numbers");
  Vec out;
  out.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(as_real(node[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Mat as_mat(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) fail(path, "expected a non-empty array of rows");
  std::vector<Vec> rows;
  rows.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i)
    rows.push_back(as_vec(node[i], path + "[" + std::to_string(i) + "]"));
  const std::size_t cols = rows[0].size();
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].size() != cols) fail(path, "ragged rows");
  Mat out(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = rows[i][j];
  return out;
}

// ---- jump maps ----

JumpMapPiece::Form parse_form(const json& node, const std::string& path) {
  if (!node.is_string()) fail(path, "expected \"linear\" or \"sinusoid\"");
  const auto s = node.get<std::string>();
  if (s == "linear") return JumpMapPiece::Form::linear;
  if (s == "sinusoid") return JumpMapPiece::Form::sinusoid;
  fail(path, "expected \"linear\" or \"sinusoid\", got \"" + s + "\"");
}

JumpMap parse_jump_map(const json& node, std::size_t out_dim, double horizon,
                       const std::string& path) {
  expect_object(node, path);
  reject_unknown_keys(node, {"form", "bound", "pieces"}, path);
  JumpMap map;
  map.out_dim = out_dim;
  const auto form = parse_form(req(node, "form", path), join(path, "form"));
  map.sup_bound = as_real(req(node, "bound", path), join(path, "bound"));

  const json& pieces = req(node, "pieces", path);
  if (!pieces.is_array() || pieces.empty()) fail(join(path, "pieces"), "expected a non-empty array");

  std::vector<JumpMapPiece> parsed;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const std::string ppath = join(path, "pieces") + "[" + std::to_string(k) + "]";
    const json& pj = pieces[k];
    expect_object(pj, ppath);
    JumpMapPiece piece;
    piece.form = form;
    if (form == JumpMapPiece::Form::linear)
      reject_unknown_keys(pj, {"offset", "coeff"}, ppath);
    else
      reject_unknown_keys(pj, {"offset", "coeff", "amplitude", "phase"}, ppath);

    const json& off = req(pj, "offset", ppath);
    piece.offset = (out_dim == 1 && off.is_number()) ? Vec{as_real(off, join(ppath, "offset"))}
                                                     : as_vec(off, join(ppath, "offset"));
    const json& coeff = req(pj, "coeff", ppath);
    if (out_dim == 1 && coeff.is_array() && (coeff.empty() || coeff[0].is_number())) {
      Vec flat = as_vec(coeff, join(ppath, "coeff"));
      piece.coeff = Mat(1, flat.size(), flat);
    } else {
      piece.coeff = as_mat(coeff, join(ppath, "coeff"));
    }
    if (form == JumpMapPiece::Form::sinusoid) {
      const json& amp = req(pj, "amplitude", ppath);
      piece.amp = (out_dim == 1 && amp.is_number()) ? Vec{as_real(amp, join(ppath, "amplitude"))}
                                                    : as_vec(amp, join(ppath, "amplitude"));
      const json& ph = req(pj, "phase", ppath);
      piece.phase = (out_dim == 1 && ph.is_number()) ? Vec{as_real(ph, join(ppath, "phase"))}
                                                     : as_vec(ph, join(ppath, "phase"));
    }
    parsed.push_back(std::move(piece));
  }
  map.mark_dim = parsed[0].coeff.cols();
  map.pieces = PiecewiseSchedule<JumpMapPiece>(std::move(parsed), horizon);
  return map;
}

json dump_jump_map(const JumpMap& map) {
  json out;
  out["form"] = map.pieces.piece(0).form == JumpMapPiece::Form::linear ? "linear" : "sinusoid";
  out["bound"] = map.sup_bound;
  json pieces = json::array();
  for (std::size_t k = 0; k < map.pieces.piece_count(); ++k) {
    const JumpMapPiece& p = map.pieces.piece(k);
    json pj;
    if (map.out_dim == 1) {
      pj["offset"] = p.offset[0];
      pj["coeff"] = p.coeff.data();
    } else {
      pj["offset"] = p.offset;
      json rows = json::array();
      for (std::size_t i = 0; i < p.coeff.rows(); ++i) {
        auto row = p.coeff.row(i);
        rows.push_back(Vec(row.begin(), row.end()));
      }
      pj["coeff"] = rows;
    }
    if (p.form == JumpMapPiece::Form::sinusoid) {
      if (map.out_dim == 1) {
        pj["amplitude"] = p.amp[0];
        pj["phase"] = p.phase[0];
      } else {
        pj["amplitude"] = p.amp;
        pj["phase"] = p.phase;
      }
    }
    pieces.push_back(std::move(pj));
  }
  out["pieces"] = std::move(pieces);
  return out;
}

// ---- state coefficients ----

StateCoefficients parse_state_coeffs(const json& node, double horizon, const std::string& path) {
  expect_object(node, path);
  reject_unknown_keys(node, {"drift", "diffusion", "jump_coeff"}, path);
  StateCoefficients out;

  const json& drift = req(node, "drift", path);
  if (!drift.is_array() || drift.empty()) fail(join(path, "drift"), "expected array of pieces");
  std::vector<Vec> drift_pieces;
  for (std::size_t k = 0; k < drift.size(); ++k)
    drift_pieces.push_back(as_vec(drift[k], join(path, "drift") + "[" + std::to_string(k) + "]"));
  out.drift = PiecewiseSchedule<Vec>(std::move(drift_pieces), horizon);

  const json& diff = req(node, "diffusion", path);
  if (!diff.is_array() || diff.empty()) fail(join(path, "diffusion"), "expected array of pieces");
  std::vector<Mat> diff_pieces;
  for (std::size_t k = 0; k < diff.size(); ++k)
    diff_pieces.push_back(as_mat(diff[k], join(path, "diffusion") + "[" + std::to_string(k) + "]"));
  out.diffusion = PiecewiseSchedule<Mat>(std::move(diff_pieces), horizon);

  const std::size_t n = out.drift.piece(0).size();
  out.jump_coeff = parse_jump_map(req(node, "jump_coeff", path), n, horizon, join(path, "jump_coeff"));
  return out;
}

json dump_state_coeffs(const StateCoefficients& sc) {
  json out;
  json drift = json::array();
  for (const Vec& piece : sc.drift.pieces()) drift.push_back(piece);
  out["drift"] = std::move(drift);
  json diff = json::array();
  for (const Mat& piece : sc.diffusion.pieces()) {
    json rows = json::array();
    for (std::size_t i = 0; i < piece.rows(); ++i) {
      auto row = piece.row(i);
      rows.push_back(Vec(row.begin(), row.end()));
    }
    diff.push_back(std::move(rows));
  }
  out["diffusion"] = std::move(diff);
  out["jump_coeff"] = dump_jump_map(sc.jump_coeff);
  return out;
}

// ---- mark law ----

MarkDistribution parse_jump_law(const json& node, const std::string& path) {
  expect_object(node, path);
  reject_unknown_keys(node, {"total_intensity", "mark_sampler"}, path);
  MarkDistribution out;
  out.total_intensity = as_real(req(node, "total_intensity", path), join(path, "total_intensity"));

  const json& sampler = req(node, "mark_sampler", path);
  const std::string spath = join(path, "mark_sampler");
  expect_object(sampler, spath);
  const json& kind = req(sampler, "kind", spath);
  if (!kind.is_string()) fail(join(spath, "kind"), "expected a string");
  const auto k = kind.get<std::string>();
  if (k == "uniform_box") {
    reject_unknown_keys(sampler, {"kind", "lo", "hi"}, spath);
    UniformBoxMarks s;
    s.lo = as_vec(req(sampler, "lo", spath), join(spath, "lo"));
    s.hi = as_vec(req(sampler, "hi", spath), join(spath, "hi"));
    out.mark_sampler = std::move(s);
  } else if (k == "isotropic_gaussian") {
    reject_unknown_keys(sampler, {"kind", "mean", "sigma"}, spath);
    IsotropicGaussianMarks s;
    s.mean = as_vec(req(sampler, "mean", spath), join(spath, "mean"));
    s.sigma = as_real(req(sampler, "sigma", spath), join(spath, "sigma"));
    out.mark_sampler = std::move(s);
  } else if (k == "discrete_atoms") {
    reject_unknown_keys(sampler, {"kind", "atoms", "weights"}, spath);
    DiscreteAtomMarks s;
    s.atoms = as_mat(req(sampler, "atoms", spath), join(spath, "atoms"));
    s.weights = as_vec(req(sampler, "weights", spath), join(spath, "weights"));
    out.mark_sampler = std::move(s);
  } else {
    fail(join(spath, "kind"),
         "expected one of uniform_box | isotropic_gaussian | discrete_atoms");
  }
  return out;
}

json dump_jump_law(const MarkDistribution& law) {
  json out;
  out["total_intensity"] = law.total_intensity;
  json sampler;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UniformBoxMarks>) {
          sampler["kind"] = "uniform_box";
          sampler["lo"] = s.lo;
          sampler["hi"] = s.hi;
        } else if constexpr (std::is_same_v<S, IsotropicGaussianMarks>) {
          sampler["kind"] = "isotropic_gaussian";
          sampler["mean"] = s.mean;
          sampler["sigma"] = s.sigma;
        } else {
          sampler["kind"] = "discrete_atoms";
          json rows = json::array();
          for (std::size_t i = 0; i < s.atoms.rows(); ++i) {
            auto row = s.atoms.row(i);
            rows.push_back(Vec(row.begin(), row.end()));
          }
          sampler["atoms"] = std::move(rows);
          sampler["weights"] = s.weights;
        }
      },
      law.mark_sampler);
  out["mark_sampler"] = std::move(sampler);
  return out;
}

// ---- field spec ----

BasisFunction parse_basis(const json& node, const std::string& path) {
  expect_object(node, path);
  const json& family = req(node, "family", path);
  if (!family.is_string()) fail(join(path, "family"), "expected a string");
  const auto f = family.get<std::string>();
  if (f == "polynomial") {
    reject_unknown_keys(node, {"family", "exponents"}, path);
    PolynomialBasis b;
    const json& exps = req(node, "exponents", path);
    if (!exps.is_array()) fail(join(path, "exponents"), "expected an array");
    for (std::size_t i = 0; i < exps.size(); ++i)
      b.exponents.push_back(static_cast<unsigned>(
          as_uint(exps[i], join(path, "exponents") + "[" + std::to_string(i) + "]")));
    return b;
  }
  if (f == "gaussian_bump") {
    reject_unknown_keys(node, {"family", "center", "width"}, path);
    GaussianBumpBasis b;
    b.center = as_vec(req(node, "center", path), join(path, "center"));
    b.width = as_real(req(node, "width", path), join(path, "width"));
    return b;
  }
  if (f == "sinusoid") {
    reject_unknown_keys(node, {"family", "frequency", "phase"}, path);
    SinusoidBasis b;
    b.frequency = as_vec(req(node, "frequency", path), join(path, "frequency"));
    b.phase = as_real(req(node, "phase", path), join(path, "phase"));
    return b;
  }
  fail(join(path, "family"), "expected one of polynomial | gaussian_bump | sinusoid");
}

json dump_basis(const BasisFunction& basis) {
  json out;
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, PolynomialBasis>) {
          out["family"] = "polynomial";
          out["exponents"] = b.exponents;
        } else if constexpr (std::is_same_v<B, GaussianBumpBasis>) {
          out["family"] = "gaussian_bump";
          out["center"] = b.center;
          out["width"] = b.width;
        } else {
          out["family"] = "sinusoid";
          out["frequency"] = b.frequency;
          out["phase"] = b.phase;
        }
      },
      basis);
  return out;
}

FieldSpec parse_field_spec(const json& node, std::size_t state_dim, double horizon,
                           const std::string& path) {
  expect_object(node, path);
  reject_unknown_keys(node, {"basis", "coefficients", "state_box"}, path);
  FieldSpec out;
  out.state_dim = state_dim;

  const json& basis = req(node, "basis", path);
  if (!basis.is_array() || basis.empty()) fail(join(path, "basis"), "expected a non-empty array");
  for (std::size_t p = 0; p < basis.size(); ++p)
    out.basis.push_back(parse_basis(basis[p], join(path, "basis") + "[" + std::to_string(p) + "]"));

  const json& coeffs = req(node, "coefficients", path);
  if (!coeffs.is_array()) fail(join(path, "coefficients"), "expected an array");
  for (std::size_t p = 0; p < coeffs.size(); ++p) {
    const std::string cpath = join(path, "coefficients") + "[" + std::to_string(p) + "]";
    const json& cj = coeffs[p];
    expect_object(cj, cpath);
    reject_unknown_keys(cj, {"initial", "drift", "diffusion", "jump"}, cpath);
    CoefficientDriver drv;
    drv.initial = as_real(req(cj, "initial", cpath), join(cpath, "initial"));

    const json& drift = req(cj, "drift", cpath);
    if (!drift.is_array() || drift.empty()) fail(join(cpath, "drift"), "expected array of pieces");
    drv.drift = PiecewiseSchedule<double>(as_vec(drift, join(cpath, "drift")), horizon);

    const json& diff = req(cj, "diffusion", cpath);
    if (!diff.is_array() || diff.empty())
      fail(join(cpath, "diffusion"), "expected array of pieces");
    std::vector<Vec> diff_pieces;
    for (std::size_t k = 0; k < diff.size(); ++k)
      diff_pieces.push_back(
          as_vec(diff[k], join(cpath, "diffusion") + "[" + std::to_string(k) + "]"));
    drv.diffusion = PiecewiseSchedule<Vec>(std::move(diff_pieces), horizon);

    if (cj.contains("jump") && !cj["jump"].is_null())
      drv.jump = parse_jump_map(cj["jump"], 1, horizon, join(cpath, "jump"));
    out.drivers.push_back(std::move(drv));
  }

  if (node.contains("state_box") && !node["state_box"].is_null()) {
    const json& bj = node["state_box"];
    const std::string bpath = join(path, "state_box");
    expect_object(bj, bpath);
    reject_unknown_keys(bj, {"lo", "hi"}, bpath);
    Box box;
    box.lo = as_vec(req(bj, "lo", bpath), join(bpath, "lo"));
    box.hi = as_vec(req(bj, "hi", bpath), join(bpath, "hi"));
    out.state_box = std::move(box);
  }
  return out;
}

json dump_field_spec(const FieldSpec& fs) {
  json out;
  json basis = json::array();
  for (const auto& b : fs.basis) basis.push_back(dump_basis(b));
  out["basis"] = std::move(basis);

  json coeffs = json::array();
  for (const auto& drv : fs.drivers) {
    json cj;
    cj["initial"] = drv.initial;
    cj["drift"] = drv.drift.pieces();
    json diff = json::array();
    for (const Vec& piece : drv.diffusion.pieces()) diff.push_back(piece);
    cj["diffusion"] = std::move(diff);
    if (drv.jump) cj["jump"] = dump_jump_map(*drv.jump);
    coeffs.push_back(std::move(cj));
  }
  out["coefficients"] = std::move(coeffs);

  if (fs.state_box) {
    json bj;
    bj["lo"] = fs.state_box->lo;
    bj["hi"] = fs.state_box->hi;
    out["state_box"] = std::move(bj);
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
  expect_object(doc, "<root>");
  reject_unknown_keys(doc,
                      {"state_dim", "wiener_dim", "mark_dim", "horizon", "base_steps",
                       "refinement_levels", "n_paths", "master_seed", "initial_state",
                       "state_coeffs", "jump_law", "field_spec"},
                      "");
  ScenarioConfig cfg;
  cfg.state_dim = as_uint(req(doc, "state_dim", ""), "state_dim");
  cfg.wiener_dim = as_uint(req(doc, "wiener_dim", ""), "wiener_dim");
  cfg.mark_dim = as_uint(req(doc, "mark_dim", ""), "mark_dim");
  cfg.horizon = as_real(req(doc, "horizon", ""), "horizon");
  cfg.base_steps = as_uint(req(doc, "base_steps", ""), "base_steps");
  cfg.refinement_levels = as_uint(req(doc, "refinement_levels", ""), "refinement_levels");
  cfg.n_paths = as_uint(req(doc, "n_paths", ""), "n_paths");
  cfg.master_seed = as_uint(req(doc, "master_seed", ""), "master_seed");
  cfg.initial_state = as_vec(req(doc, "initial_state", ""), "initial_state");
  cfg.state_coeffs = parse_state_coeffs(req(doc, "state_coeffs", ""), cfg.horizon, "state_coeffs");
  cfg.jump_law = parse_jump_law(req(doc, "jump_law", ""), "jump_law");
  cfg.field_spec =
      parse_field_spec(req(doc, "field_spec", ""), cfg.state_dim, cfg.horizon, "field_spec");
  return cfg;
}

ScenarioConfig parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_scenario(doc);
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

json serialize_scenario(const ScenarioConfig& cfg) {
  json doc;
  doc["state_dim"] = cfg.state_dim;
  doc["wiener_dim"] = cfg.wiener_dim;
  doc["mark_dim"] = cfg.mark_dim;
  doc["horizon"] = cfg.horizon;
  doc["base_steps"] = cfg.base_steps;
  doc["refinement_levels"] = cfg.refinement_levels;
  doc["n_paths"] = cfg.n_paths;
  doc["master_seed"] = cfg.master_seed;
  doc["initial_state"] = cfg.initial_state;
  doc["state_coeffs"] = dump_state_coeffs(cfg.state_coeffs);
  doc["jump_law"] = dump_jump_law(cfg.jump_law);
  doc["field_spec"] = dump_field_spec(cfg.field_spec);
  return doc;
}

std::uint64_t scenario_fingerprint(const ScenarioConfig& cfg) {
  return fnv1a64(serialize_scenario(cfg).dump());
}

std::string scenario_fingerprint_hex(const ScenarioConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(scenario_fingerprint(cfg)));
  return std::string(buf);
}

}  // namespace itw
