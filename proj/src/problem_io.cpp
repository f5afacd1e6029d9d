#include "hullcert/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hullcert::io {

namespace {

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void check_keys(const Json& j, const std::string& path, const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
  if (!j.is_object()) throw InputError(path.empty() ? "$" : path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw InputError(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
  for (const std::string& key : required) {
    if (!j.contains(key)) throw InputError(path.empty() ? key : path + "." + key, "missing field");
  }
}

std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(path, "expected a finite number");
  return v;
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw InputError(path, "expected an integer");
  return j.get<int>();
}

Vector vector_of(const Json& j, const std::string& path, int n) {
  if (!j.is_array()) throw InputError(path, "expected an array");
  if (static_cast<int>(j.size()) != n) {
    throw InputError(path, "expected " + std::to_string(n) + " entries, found " +
                               std::to_string(j.size()));
  }
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_of(const Json& j, const std::string& path, int n) {
  if (!j.is_array()) throw InputError(path, "expected an array of rows");
  if (static_cast<int>(j.size()) != n) {
    throw InputError(path, "expected " + std::to_string(n) + " rows, found " +
                               std::to_string(j.size()));
  }
  Matrix A(n, n);
  for (int r = 0; r < n; ++r) {
    A.row(r) = vector_of(j[r], path + "[" + std::to_string(r) + "]", n).transpose();
  }
  const double defect = linalg::symmetry_defect(A);
  if (defect > 1e-12) {
    std::ostringstream os;
    os << "matrix is not symmetric (relative defect " << defect << ")";
    throw InputError(path, os.str());
  }
  return A;
}

QuadraticForm form_of(const Json& j, const std::string& path, int n) {
  check_keys(j, path, {"A", "b", "c"}, {"A"});
  const Matrix A = matrix_of(j["A"], at(path, "A"), n);
  const Vector b = j.contains("b") ? vector_of(j["b"], at(path, "b"), n) : Vector::Zero(n);
  const double c = j.contains("c") ? number(j["c"], at(path, "c")) : 0.0;
  return QuadraticForm(A, b, c);
}

Structure structure_of(const Json& j, const std::string& path) {
  check_keys(j, path, {"kind", "r", "k"}, {"kind"});
  if (!j["kind"].is_string()) throw InputError(at(path, "kind"), "expected a string");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "generic" || kind == "diagonal") {
    if (j.contains("r") || j.contains("k")) {
      throw InputError(path, "block sizes only apply to kind \"kronecker\"");
    }
    return kind == "generic" ? Structure::generic() : Structure::diagonal();
  }
  if (kind == "kronecker") {
    check_keys(j, path, {"kind", "r", "k"}, {"kind", "r", "k"});
    const int r = integer(j["r"], at(path, "r"));
    const int k = integer(j["k"], at(path, "k"));
    if (r < 1 || k < 1) throw InputError(path, "block sizes must be positive");
    return Structure::kronecker(r, k);
  }
  throw InputError(at(path, "kind"), "expected \"generic\", \"diagonal\" or \"kronecker\"");
}

Json structure_json(const Structure& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  if (s.kind == Structure::Kind::Kronecker) {
    j["r"] = s.r;
    j["k"] = s.k;
  }
  return j;
}

Json form_json(const QuadraticForm& q) {
  Json j;
  j["A"] = to_json(q.A());
  j["b"] = to_json(q.b());
  j["c"] = q.c();
  return j;
}

Json optional_flag(const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); }

}  // namespace

Json to_json(const Vector& v) {
  Json j = Json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(num(v(i)));
  return j;
}

Json to_json(const Matrix& m) {
  Json j = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(num(m(r, c)));
    j.push_back(row);
  }
  return j;
}

ProblemFile parse_problem(const Json& j) {
  check_keys(j, "", {"version", "n", "m", "objective", "constraints", "structure", "box"},
             {"version", "n", "m", "objective", "constraints"});
  const int version = integer(j["version"], "version");
  if (version != kFormatVersion) {
    throw InputError("version", "unsupported version " + std::to_string(version));
  }
  const int n = integer(j["n"], "n");
  const int m = integer(j["m"], "m");
  if (n < 1) throw InputError("n", "must be positive");
  if (m < 0) throw InputError("m", "must be non-negative");
  const QuadraticForm obj = form_of(j["objective"], "objective", n);
  const Json& cs = j["constraints"];
  if (!cs.is_array()) throw InputError("constraints", "expected an array");
  if (static_cast<int>(cs.size()) != m) {
    throw InputError("constraints", "expected " + std::to_string(m) + " entries, found " +
                                        std::to_string(cs.size()));
  }
  std::vector<QuadraticForm> cons;
  for (int i = 0; i < m; ++i) {
    cons.push_back(form_of(cs[i], "constraints[" + std::to_string(i) + "]", n));
  }
  const Structure hint =
      j.contains("structure") ? structure_of(j["structure"], "structure") : Structure::generic();
  std::optional<oracle::Box> box;
  if (j.contains("box")) {
    check_keys(j["box"], "box", {"lo", "hi"}, {"lo", "hi"});
    oracle::Box b{vector_of(j["box"]["lo"], "box.lo", n), vector_of(j["box"]["hi"], "box.hi", n)};
    for (int i = 0; i < n; ++i) {
      if (b.lo(i) >= b.hi(i)) throw InputError("box", "lo must be below hi in every coordinate");
    }
    box = b;
  }
  try {
    return ProblemFile{Qcqp(obj, cons, hint), hint, box};
  } catch (const std::invalid_argument& e) {
    throw InputError("structure", e.what());
  }
}

ProblemFile parse_problem_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_problem(j);
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("$", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str());
}

Json to_json(const ProblemFile& f) {
  const Qcqp& p = f.problem;
  Json j;
  j["version"] = kFormatVersion;
  j["n"] = p.n();
  j["m"] = p.m();
  j["objective"] = form_json(p.objective());
  j["constraints"] = Json::array();
  for (const auto& q : p.constraints()) j["constraints"].push_back(form_json(q));
  j["structure"] = structure_json(f.hint);
  if (f.box) j["box"] = Json{{"lo", to_json(f.box->lo)}, {"hi", to_json(f.box->hi)}};
  return j;
}

std::string canonical(const ProblemFile& f) { return to_json(f).dump(2) + "\n"; }

EpigraphPoint parse_point(const Json& j, int n) {
  check_keys(j, "", {"x", "t"}, {"x", "t"});
  return EpigraphPoint{vector_of(j["x"], "x", n), number(j["t"], "t")};
}

EpigraphPoint load_point(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw InputError("$", "cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_point(j, n);
}

Json to_json(const EpigraphPoint& pt) { return Json{{"x", to_json(pt.x)}, {"t", num(pt.t)}}; }

Json to_json(const certify::Verdict& v) {
  Json j;
  j["status"] = certify::to_string(v.status);
  j["grade"] = certify::to_string(v.grade);
  j["method"] = v.method;
  j["reason"] = v.reason;
  Json a;
  a["definite"] = optional_flag(v.assumptions.definite);
  a["primal_strict"] = optional_flag(v.assumptions.primal_strict);
  a["nonconvex_constraints"] = optional_flag(v.assumptions.nonconvex_constraints);
  a["facially_exposed"] = optional_flag(v.assumptions.facially_exposed);
  j["assumptions_checked"] = a;
  Json e;
  e["witness"] = v.evidence.witness ? to_json(*v.evidence.witness) : Json(nullptr);
  if (!v.evidence.kernel.empty()) {
    Json ks = Json::array();
    for (const auto& k : v.evidence.kernel) {
      ks.push_back(Json{{"gamma", to_json(k.gamma)},
                        {"interior", k.interior},
                        {"kernel_dim", k.kernel_dim},
                        {"condition", k.condition},
                        {"trigger", certify::to_string(k.trigger)}});
    }
    e["kernel"] = ks;
  }
  if (!v.evidence.faces.empty()) {
    Json fs = Json::array();
    for (const auto& f : v.evidence.faces) {
      fs.push_back(Json{{"generators", f.generators},
                        {"f", to_json(f.f)},
                        {"rounding_dim", f.rounding_dim},
                        {"harmless", f.harmless},
                        {"witness_found", f.witness_found}});
    }
    e["faces"] = fs;
  }
  if (v.evidence.samples > 0) {
    e["samples"] = Json{{"requested", v.evidence.samples},
                        {"outside_s", v.evidence.samples_outside},
                        {"succeeded", v.evidence.samples_ok},
                        {"worst_reconstruction", num(v.evidence.worst_reconstruction)},
                        {"min_epsilon", num(v.evidence.min_epsilon)}};
  }
  j["evidence"] = e;
  return j;
}

Json to_json(const sdp::SdpSolution& s) {
  Json j;
  j["status"] = sdp::to_string(s.status);
  if (s.status == sdp::Status::Optimal) {
    j["opt_sdp"] = num(s.objective);
    j["t"] = num(s.t);
    j["x"] = to_json(s.x);
    const Matrix E = s.X - s.x * s.x.transpose();
    const linalg::EigenDecomposition e = linalg::sym_eig(0.5 * (E + E.transpose()));
    j["X_summary"] = Json{{"trace", num(s.X.trace())},
                          {"rank_gap_eigenvalues", to_json(Vector(e.values.reverse()))}};
    j["gamma"] = to_json(s.gamma.stacked());
  } else {
    j["opt_sdp"] = nullptr;
  }
  j["iterations"] = s.iterations;
  return j;
}

Json to_json(const rounding::DecomposeResult& r) {
  Json j;
  j["status"] = rounding::to_string(r.status);
  j["reason"] = r.reason;
  j["splits"] = r.splits;
  if (r.status == rounding::DecomposeStatus::Success) {
    Json pts = Json::array();
    for (size_t k = 0; k < r.decomposition.points.size(); ++k) {
      Json p = to_json(r.decomposition.points[k]);
      p["weight"] = num(r.decomposition.weights[k]);
      pts.push_back(p);
    }
    j["points"] = pts;
    j["vertical_ray"] = num(r.decomposition.vertical_ray);
    j["reconstruction_error"] = num(r.decomposition.reconstruction_error);
  }
  j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  return j;
}

Json to_json(const gamma::DefiniteWitness& w) {
  return Json{{"ok", w.ok},
              {"lambda", num(w.lambda)},
              {"gamma", to_json(w.gamma)},
              {"at_box", w.at_box}};
}

Json to_json(const gamma::GammaDescription& d) {
  Json j;
  j["kind"] = gamma::to_string(d.kind);
  j["source"] = d.source;
  j["strict_point"] = to_json(d.strict_point);
  if (d.polyhedral()) {
    Json gens = Json::array();
    for (int c = 0; c < d.cone.num_generators(); ++c) {
      gens.push_back(to_json(Vector(d.cone.generators().col(c))));
    }
    j["generators"] = gens;
    Json verts = Json::array();
    const Matrix V = d.vertices();
    for (int c = 0; c < V.cols(); ++c) verts.push_back(to_json(Vector(V.col(c))));
    j["gamma1_vertices"] = verts;
    Json rays = Json::array();
    const Matrix R = d.rays();
    for (int c = 0; c < R.cols(); ++c) rays.push_back(to_json(Vector(R.col(c))));
    j["gamma1_rays"] = rays;
  }
  return j;
}

Json to_json(const oracle::OracleReport& r) {
  Json j;
  j["box"] = Json{{"lo", to_json(r.box.lo)}, {"hi", to_json(r.box.hi)}};
  j["resolution"] = r.resolution;
  j["directions"] = r.directions;
  j["empty"] = r.empty;
  j["lines"] = r.lines;
  j["samples_retained"] = r.samples_retained;
  j["max_gap"] = num(r.max_gap);
  j["max_gap_raw"] = num(r.max_gap_raw);
  j["argmax_index"] = r.argmax_index;
  j["argmax_direction"] = r.argmax_index >= 0 ? to_json(r.argmax_direction) : Json(nullptr);
  j["grid_error_bound"] = num(r.grid_error_bound);
  j["boundary_flag"] = r.boundary_flag;
  j["global_min"] = r.global_min ? num(*r.global_min) : Json(nullptr);
  return j;
}

}  // namespace hullcert::io
