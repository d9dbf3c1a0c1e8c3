#pragma once

// Versioned JSON system documents: one of four problem modes plus analysis
// options. Parsing validates every field and reports the JSON pointer of the
// offending value (or line and column for syntax errors).

#include <cmath>
#include <complex>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qpoly/charbuild.hpp"
#include "qpoly/distributed.hpp"
#include "qpoly/error.hpp"
#include "qpoly/matrix.hpp"
#include "qpoly/quasipoly.hpp"
#include "qpoly/rational.hpp"
#include "qpoly/rootfinder.hpp"

namespace qpoly::io {

using Json = nlohmann::json;

inline constexpr const char* kSystemSchema = "qpoly-system/1";

/// Malformed or schema-violating input.
class InputError : public Error {
 public:
  using Error::Error;
};

enum class Mode { single_delay, multi_delay, distributed, raw_quasipolynomial };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::single_delay: return "single_delay";
    case Mode::multi_delay: return "multi_delay";
    case Mode::distributed: return "distributed";
    case Mode::raw_quasipolynomial: return "raw_quasipolynomial";
  }
  return "";
}

struct BasisEntry {
  std::string label;
  double value = 1.0;
  friend bool operator==(const BasisEntry&, const BasisEntry&) = default;
};

/// A delay given numerically, or by rational coordinates over the basis.
struct DelayEntry {
  std::optional<double> value;
  std::vector<Rational> coords;
  friend bool operator==(const DelayEntry&, const DelayEntry&) = default;
};

struct SingleDelayPayload {
  ComplexMatrix A, B;
  Complex tau{1.0, 0.0};
  friend bool operator==(const SingleDelayPayload&, const SingleDelayPayload&) = default;
};

struct MultiDelayPayload {
  ComplexMatrix A;
  std::vector<ComplexMatrix> B;
  std::vector<BasisEntry> basis;
  std::vector<DelayEntry> delays;
  friend bool operator==(const MultiDelayPayload&, const MultiDelayPayload&) = default;
};

struct DistributedPayload {
  Complex a;
  double tau = 1.0;
  std::vector<double> theta;
  std::vector<Complex> values;
  friend bool operator==(const DistributedPayload&, const DistributedPayload&) = default;
};

struct SigmaSpec {
  bool exact = true;
  Rational rational;  // exact path
  Complex numeric;    // float path
  friend bool operator==(const SigmaSpec&, const SigmaSpec&) = default;
};

struct TermSpec {
  SigmaSpec sigma;
  std::vector<Complex> coeffs;  // ascending degree
  friend bool operator==(const TermSpec&, const TermSpec&) = default;
};

struct RawPayload {
  std::vector<TermSpec> terms;
  friend bool operator==(const RawPayload&, const RawPayload&) = default;
};

struct AnalysisOptions {
  std::vector<Region> regions;
  std::optional<Region> scan_base;
  std::vector<double> scan_factors{1.0, 2.0, 4.0, 8.0};
  std::vector<double> growth_radii{10.0, 20.0, 40.0, 80.0};
  int growth_samples = 512;
  double boundary_eps = 1e-8;
  int max_depth = 24;
  std::size_t max_boxes = 4096;
  int kernel_grid = 256;
  double quad_rel_tol = 1e-12;
  int quad_max_panels = 4096;
  int quad_nodes = 16;

  friend bool operator==(const AnalysisOptions&, const AnalysisOptions&) = default;

  QuadratureConfig quadrature() const { return {quad_rel_tol, quad_max_panels, quad_nodes}; }

  CountOptions counting() const {
    CountOptions c;
    c.winding.boundary_eps = boundary_eps;
    c.winding.max_depth = max_depth;
    return c;
  }

  FindOptions finding() const {
    FindOptions f;
    f.isolate.counting = counting();
    f.isolate.max_boxes = max_boxes;
    f.refine.counting = counting();
    return f;
  }
};

using Payload = std::variant<SingleDelayPayload, MultiDelayPayload, DistributedPayload, RawPayload>;

struct SystemDocument {
  std::string schema = kSystemSchema;
  Mode mode = Mode::raw_quasipolynomial;
  Payload payload = RawPayload{};
  AnalysisOptions analysis;

  friend bool operator==(const SystemDocument&, const SystemDocument&) = default;
};

namespace detail {

/// Walks a JSON value while tracking its pointer for diagnostics.
class Field {
 public:
  Field(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("field " + (path_.empty() ? std::string("/") : path_) + ": " + what);
  }

  const Json& json() const { return j_; }
  const std::string& path() const { return path_; }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  Field at(const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) fail("missing required key '" + key + "'");
    return {j_.at(key), path_ + "/" + key};
  }

  std::optional<Field> maybe(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return Field(j_.at(key), path_ + "/" + key);
  }

  std::vector<Field> items() const {
    if (!j_.is_array()) fail("expected an array");
    std::vector<Field> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], path_ + "/" + std::to_string(i));
    return out;
  }

  void only_keys(std::initializer_list<const char*> keys) const {
    if (!j_.is_object()) fail("expected an object");
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool known = false;
      for (const char* k : keys) known = known || it.key() == k;
      if (!known) Field(it.value(), path_ + "/" + it.key()).fail("unknown key");
    }
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("expected a positive number");
    return v;
  }

  long integer(long min_value) const {
    if (!j_.is_number_integer()) fail("expected an integer");
    const long v = j_.get<long>();
    if (v < min_value) fail("expected an integer >= " + std::to_string(min_value));
    return v;
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  Complex complex() const {
    if (j_.is_number()) return {number(), 0.0};
    if (!j_.is_array() || j_.size() != 2) fail("expected a complex number [re, im]");
    const auto parts = items();
    return {parts[0].number(), parts[1].number()};
  }

  Rational rational() const {
    if (j_.is_number_integer()) return Rational(j_.get<long long>());
    if (j_.is_string()) {
      try {
        return parse_rational(j_.get<std::string>());
      } catch (const InvalidArgument& e) {
        fail(e.what());
      }
    }
    fail("expected a rational as an integer or a \"p/q\" string");
  }

  ComplexMatrix matrix() const {
    const auto rows = items();
    if (rows.empty()) fail("matrix must have at least one row");
    const std::size_t n = rows.size();
    std::vector<Complex> data;
    data.reserve(n * n);
    for (const auto& row : rows) {
      const auto cells = row.items();
      if (cells.size() != n) row.fail("matrix must be square with " + std::to_string(n) + " columns");
      for (const auto& c : cells) data.push_back(c.complex());
    }
    return ComplexMatrix(n, std::move(data));
  }

  Region region() const {
    only_keys({"re", "im"});
    const auto re = at("re").items();
    const auto im = at("im").items();
    if (re.size() != 2) at("re").fail("expected [min, max]");
    if (im.size() != 2) at("im").fail("expected [min, max]");
    Region r{re[0].number(), re[1].number(), im[0].number(), im[1].number()};
    if (!(r.re_min < r.re_max) || !(r.im_min < r.im_max)) fail("region needs min < max on both axes");
    return r;
  }

  std::vector<double> increasing_numbers() const {
    std::vector<double> v;
    for (const auto& x : items()) v.push_back(x.number());
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) fail("values must be strictly increasing");
    return v;
  }

 private:
  const Json& j_;
  std::string path_;
};

inline Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

inline Json rational_json(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1) {
    const BigInt& num = boost::multiprecision::numerator(q);
    if (num >= std::numeric_limits<long long>::min() && num <= std::numeric_limits<long long>::max())
      return num.convert_to<long long>();
  }
  return qpoly::to_string(q);
}

inline Json matrix_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json region_json(const Region& r) {
  return {{"re", Json::array({r.re_min, r.re_max})}, {"im", Json::array({r.im_min, r.im_max})}};
}

inline std::string position_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline AnalysisOptions parse_analysis(const Field& f) {
  AnalysisOptions a;
  f.only_keys({"regions", "scan", "growth", "tolerances"});
  if (auto regions = f.maybe("regions"))
    for (const auto& r : regions->items()) a.regions.push_back(r.region());
  if (auto scan = f.maybe("scan")) {
    scan->only_keys({"base", "factors"});
    if (auto base = scan->maybe("base")) a.scan_base = base->region();
    if (auto factors = scan->maybe("factors")) {
      a.scan_factors = factors->increasing_numbers();
      if (a.scan_factors.empty() || a.scan_factors.front() != 1.0) factors->fail("factors must start at 1");
    }
  }
  if (auto growth = f.maybe("growth")) {
    growth->only_keys({"radii", "samples"});
    if (auto radii = growth->maybe("radii")) {
      a.growth_radii = radii->increasing_numbers();
      if (a.growth_radii.size() < 2) radii->fail("need at least two radii");
      for (double r : a.growth_radii)
        if (r < 10.0) radii->fail("radii must be >= 10");
    }
    if (auto s = growth->maybe("samples")) a.growth_samples = static_cast<int>(s->integer(64));
  }
  if (auto tol = f.maybe("tolerances")) {
    tol->only_keys({"boundary_eps", "max_depth", "max_boxes", "kernel_grid", "quadrature"});
    if (auto v = tol->maybe("boundary_eps")) a.boundary_eps = v->positive();
    if (auto v = tol->maybe("max_depth")) a.max_depth = static_cast<int>(v->integer(1));
    if (auto v = tol->maybe("max_boxes")) a.max_boxes = static_cast<std::size_t>(v->integer(1));
    if (auto v = tol->maybe("kernel_grid")) a.kernel_grid = static_cast<int>(v->integer(16));
    if (auto q = tol->maybe("quadrature")) {
      q->only_keys({"rel_tol", "max_panels", "nodes_per_panel"});
      if (auto v = q->maybe("rel_tol")) a.quad_rel_tol = v->positive();
      if (auto v = q->maybe("max_panels")) a.quad_max_panels = static_cast<int>(v->integer(1));
      if (auto v = q->maybe("nodes_per_panel")) a.quad_nodes = static_cast<int>(v->integer(2));
    }
  }
  return a;
}

inline SingleDelayPayload parse_single(const Field& f) {
  f.only_keys({"A", "B", "tau"});
  SingleDelayPayload p;
  p.A = f.at("A").matrix();
  p.B = f.at("B").matrix();
  if (p.B.dim() != p.A.dim()) f.at("B").fail("dimension differs from A");
  p.tau = f.at("tau").complex();
  if (p.tau == Complex{}) f.at("tau").fail("delay must be nonzero");
  if (p.A.dim() > kMaxDeterminantDim) f.at("A").fail("dimension exceeds 8");
  return p;
}

inline MultiDelayPayload parse_multi(const Field& f) {
  f.only_keys({"A", "B", "basis", "delays"});
  MultiDelayPayload p;
  p.A = f.at("A").matrix();
  if (p.A.dim() > kMaxDeterminantDim) f.at("A").fail("dimension exceeds 8");
  for (const auto& b : f.at("B").items()) {
    p.B.push_back(b.matrix());
    if (p.B.back().dim() != p.A.dim()) b.fail("dimension differs from A");
  }
  if (p.B.empty()) f.at("B").fail("need at least one delayed matrix");
  if (auto basis = f.maybe("basis")) {
    for (const auto& e : basis->items()) {
      e.only_keys({"label", "value"});
      p.basis.push_back({e.at("label").string(), e.at("value").positive()});
    }
    if (p.basis.empty()) basis->fail("basis must not be empty when given");
  }
  const auto delays = f.at("delays").items();
  if (delays.size() != p.B.size()) f.at("delays").fail("need one delay per matrix in B");
  for (const auto& d : delays) {
    DelayEntry e;
    if (d.json().is_number()) {
      if (!p.basis.empty()) d.fail("delays must be given as basis coordinates when a basis is declared");
      e.value = d.number();
    } else {
      d.only_keys({"coords"});
      if (p.basis.empty()) d.fail("basis coordinates given but no basis declared");
      for (const auto& c : d.at("coords").items()) e.coords.push_back(c.rational());
      if (e.coords.size() != p.basis.size()) d.at("coords").fail("need one coordinate per basis element");
    }
    p.delays.push_back(std::move(e));
  }
  return p;
}

inline DistributedPayload parse_distributed(const Field& f) {
  f.only_keys({"a", "tau", "kernel"});
  DistributedPayload p;
  p.a = f.at("a").complex();
  p.tau = f.at("tau").positive();
  const Field k = f.at("kernel");
  k.only_keys({"theta", "values"});
  p.theta = k.at("theta").increasing_numbers();
  for (const auto& v : k.at("values").items()) p.values.push_back(v.complex());
  if (p.theta.size() < 2) k.at("theta").fail("need at least two samples");
  if (p.values.size() != p.theta.size()) k.at("values").fail("need one value per theta sample");
  if (std::abs(p.theta.front()) > 1e-12 * p.tau || std::abs(p.theta.back() - p.tau) > 1e-12 * p.tau)
    k.at("theta").fail("samples must span [0, tau]");
  return p;
}

inline RawPayload parse_raw(const Field& f) {
  f.only_keys({"terms"});
  RawPayload p;
  for (const auto& t : f.at("terms").items()) {
    t.only_keys({"sigma", "coeffs"});
    TermSpec term;
    const Field s = t.at("sigma");
    if (s.json().is_number_integer() || s.json().is_string()) {
      term.sigma.exact = true;
      term.sigma.rational = s.rational();
    } else {
      term.sigma.exact = false;
      term.sigma.numeric = s.complex();
    }
    for (const auto& c : t.at("coeffs").items()) term.coeffs.push_back(c.complex());
    p.terms.push_back(std::move(term));
  }
  return p;
}

}  // namespace detail

/// Parses and validates a system document.
inline SystemDocument parse_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError("syntax error at " + detail::position_of(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                     e.what());
  }
  const detail::Field root(j, "");
  SystemDocument doc;
  root.only_keys({"schema", "mode", "single_delay", "multi_delay", "distributed", "raw_quasipolynomial",
                  "analysis"});
  doc.schema = root.at("schema").string();
  if (doc.schema != kSystemSchema) root.at("schema").fail(std::string("unsupported schema, expected ") + kSystemSchema);
  const std::string mode = root.at("mode").string();
  int populated = 0;
  for (const char* k : {"single_delay", "multi_delay", "distributed", "raw_quasipolynomial"})
    populated += root.has(k) ? 1 : 0;
  if (populated != 1) root.fail("exactly one mode payload must be present");
  if (!root.has(mode)) root.at("mode").fail("mode '" + mode + "' has no matching payload");
  if (mode == "single_delay") {
    doc.mode = Mode::single_delay;
    doc.payload = detail::parse_single(root.at(mode));
  } else if (mode == "multi_delay") {
    doc.mode = Mode::multi_delay;
    doc.payload = detail::parse_multi(root.at(mode));
  } else if (mode == "distributed") {
    doc.mode = Mode::distributed;
    doc.payload = detail::parse_distributed(root.at(mode));
  } else if (mode == "raw_quasipolynomial") {
    doc.mode = Mode::raw_quasipolynomial;
    doc.payload = detail::parse_raw(root.at(mode));
  } else {
    root.at("mode").fail("unknown mode '" + mode + "'");
  }
  if (auto a = root.maybe("analysis")) doc.analysis = detail::parse_analysis(*a);
  return doc;
}

inline SystemDocument load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

inline Json to_json(const SystemDocument& doc) {
  using detail::complex_json;
  using detail::matrix_json;
  Json j;
  j["schema"] = doc.schema;
  j["mode"] = to_string(doc.mode);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        Json body;
        if constexpr (std::is_same_v<T, SingleDelayPayload>) {
          body = {{"A", matrix_json(p.A)}, {"B", matrix_json(p.B)}, {"tau", complex_json(p.tau)}};
        } else if constexpr (std::is_same_v<T, MultiDelayPayload>) {
          body["A"] = matrix_json(p.A);
          body["B"] = Json::array();
          for (const auto& b : p.B) body["B"].push_back(matrix_json(b));
          if (!p.basis.empty()) {
            body["basis"] = Json::array();
            for (const auto& b : p.basis) body["basis"].push_back({{"label", b.label}, {"value", b.value}});
          }
          body["delays"] = Json::array();
          for (const auto& d : p.delays) {
            if (d.value) {
              body["delays"].push_back(*d.value);
            } else {
              Json coords = Json::array();
              for (const auto& q : d.coords) coords.push_back(detail::rational_json(q));
              body["delays"].push_back({{"coords", coords}});
            }
          }
        } else if constexpr (std::is_same_v<T, DistributedPayload>) {
          Json values = Json::array();
          for (const auto& v : p.values) values.push_back(complex_json(v));
          body = {{"a", complex_json(p.a)}, {"tau", p.tau}, {"kernel", {{"theta", p.theta}, {"values", values}}}};
        } else {
          body["terms"] = Json::array();
          for (const auto& t : p.terms) {
            Json coeffs = Json::array();
            for (const auto& c : t.coeffs) coeffs.push_back(complex_json(c));
            Json sigma = t.sigma.exact ? detail::rational_json(t.sigma.rational)
                         : t.sigma.numeric.imag() == 0.0 ? Json(t.sigma.numeric.real())
                                                         : complex_json(t.sigma.numeric);
            body["terms"].push_back({{"sigma", sigma}, {"coeffs", coeffs}});
          }
        }
        j[to_string(doc.mode)] = std::move(body);
      },
      doc.payload);

  const AnalysisOptions& a = doc.analysis;
  Json analysis;
  analysis["regions"] = Json::array();
  for (const auto& r : a.regions) analysis["regions"].push_back(detail::region_json(r));
  analysis["scan"]["factors"] = a.scan_factors;
  if (a.scan_base) analysis["scan"]["base"] = detail::region_json(*a.scan_base);
  analysis["growth"] = {{"radii", a.growth_radii}, {"samples", a.growth_samples}};
  analysis["tolerances"] = {{"boundary_eps", a.boundary_eps},
                            {"max_depth", a.max_depth},
                            {"max_boxes", a.max_boxes},
                            {"kernel_grid", a.kernel_grid},
                            {"quadrature",
                             {{"rel_tol", a.quad_rel_tol},
                              {"max_panels", a.quad_max_panels},
                              {"nodes_per_panel", a.quad_nodes}}}};
  j["analysis"] = std::move(analysis);
  return j;
}

inline std::string serialize_document(const SystemDocument& doc) { return to_json(doc).dump(2) + "\n"; }

// Conversions to library objects.

inline DelaySystem to_delay_system(const SystemDocument& doc) {
  if (const auto* s = std::get_if<SingleDelayPayload>(&doc.payload)) return {s->A, {s->B}, s->tau};
  if (const auto* m = std::get_if<MultiDelayPayload>(&doc.payload)) {
    DelaySpec spec;
    if (m->basis.empty()) {
      std::vector<double> values;
      for (const auto& d : m->delays) values.push_back(*d.value);
      spec = DelaySpec::numeric(std::move(values));
    } else {
      std::vector<std::string> labels;
      std::vector<double> values;
      for (const auto& b : m->basis) labels.push_back(b.label), values.push_back(b.value);
      std::vector<std::vector<Rational>> coords;
      for (const auto& d : m->delays) coords.push_back(d.coords);
      spec = DelaySpec::over_basis(std::move(labels), std::move(values), std::move(coords));
    }
    return {m->A, m->B, std::move(spec)};
  }
  throw InputError("document does not describe a constant-delay system");
}

inline QuasiPolynomial to_quasipolynomial(const RawPayload& raw) {
  std::vector<ExponentTerm> terms;
  for (const auto& t : raw.terms) {
    Exponent e = t.sigma.exact ? Exponent::exact({t.sigma.rational}, std::vector<double>{1.0})
                               : Exponent::numeric(t.sigma.numeric);
    terms.push_back({std::move(e), ComplexPolynomial(t.coeffs)});
  }
  return normalize(std::move(terms));
}

inline DistributedSystem to_distributed(const SystemDocument& doc) {
  const auto* d = std::get_if<DistributedPayload>(&doc.payload);
  if (!d) throw InputError("document does not describe a distributed system");
  return {d->a, d->tau, tabulated_kernel(d->theta, d->values)};
}

}  // namespace qpoly::io
