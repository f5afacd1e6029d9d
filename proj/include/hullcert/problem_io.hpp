#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hullcert/certify.hpp"
#include "hullcert/gamma.hpp"
#include "hullcert/model.hpp"
#include "hullcert/oracle.hpp"
#include "hullcert/rounding.hpp"
#include "hullcert/sdp.hpp"

namespace hullcert::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Malformed input; `path` names the offending field, e.g.
/// "constraints[1].A[0][2]".
class InputError : public std::runtime_error {
 public:
  InputError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ProblemFile {
  Qcqp problem;
  /// Structure tag as written in the file (generic when absent).
  Structure hint;
  std::optional<oracle::Box> box;
};

ProblemFile parse_problem(const Json& j);
ProblemFile parse_problem_text(const std::string& text);
ProblemFile load_problem(const std::string& path);
/// Canonical form: every field present, fixed key order.
Json to_json(const ProblemFile& f);
std::string canonical(const ProblemFile& f);

/// {"x": [...], "t": number}
EpigraphPoint parse_point(const Json& j, int n);
EpigraphPoint load_point(const std::string& path, int n);
Json to_json(const EpigraphPoint& pt);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);

Json to_json(const certify::Verdict& v);
Json to_json(const sdp::SdpSolution& s);
Json to_json(const rounding::DecomposeResult& r);
Json to_json(const gamma::DefiniteWitness& w);
Json to_json(const gamma::GammaDescription& d);
Json to_json(const oracle::OracleReport& r);

}  // namespace hullcert::io
