#pragma once

// Batch analyses behind the command-line front end. Each returns an ordered
// JSON report; numeric failures are raised as NumericFailure naming the stage.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpoly/charbuild.hpp"
#include "qpoly/distributed.hpp"
#include "qpoly/io/document.hpp"
#include "qpoly/quasipoly.hpp"
#include "qpoly/rootfinder.hpp"

namespace qpoly::io {

using Report = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "qpoly-report/1";

class NumericFailure : public Error {
 public:
  NumericFailure(std::string stage, const std::string& what, Report details = Report::object())
      : Error("numeric failure in stage '" + stage + "': " + what),
        stage_(std::move(stage)),
        details_(std::move(details)) {}
  const std::string& stage() const { return stage_; }
  const Report& details() const { return details_; }

 private:
  std::string stage_;
  Report details_;
};

namespace detail {

inline Report cjson(Complex c) { return Report::array({c.real(), c.imag()}); }

inline Report rjson(const Region& r) {
  return {{"re", Report::array({r.re_min, r.re_max})}, {"im", Report::array({r.im_min, r.im_max})}};
}

inline Report history_json(const std::vector<CountAttempt>& h) {
  Report out = Report::array();
  for (const auto& a : h) out.push_back({{"region", rjson(a.region)}, {"error", a.error}});
  return out;
}

/// Runs fn; library precondition failures become input errors, every other
/// library failure becomes a NumericFailure tagged with stage.
template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InputError&) {
    throw;
  } catch (const NumericFailure&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw InputError(name + ": " + e.what());
  } catch (const CountFailure& e) {
    throw NumericFailure(name, e.what(), {{"retry_history", history_json(e.history())}});
  } catch (const Error& e) {
    throw NumericFailure(name, e.what());
  }
}

}  // namespace detail

/// The analysed object built from a document: a quasi-polynomial (constant
/// delays or raw input) or a distributed characteristic function.
struct Problem {
  Mode mode = Mode::raw_quasipolynomial;
  std::optional<QuasiPolynomial> quasi;
  std::optional<DistributedSystem> distributed;
  std::optional<DelaySystem> system;
  Complex tau{1.0, 0.0};  // single-delay rescaling mu = tau lambda
  AnalyticTarget target;

  /// Name of the variable root locations refer to.
  const char* variable() const { return mode == Mode::single_delay ? "mu" : "lambda"; }
};

inline Problem build_problem(const SystemDocument& doc) {
  return detail::stage("build", [&] {
    Problem p;
    p.mode = doc.mode;
    switch (doc.mode) {
      case Mode::single_delay: {
        p.system = to_delay_system(doc);
        RescaledCharacteristic rc = build_characteristic_single(*p.system);
        p.tau = rc.tau;
        p.quasi = std::move(rc.f);
        break;
      }
      case Mode::multi_delay:
        p.system = to_delay_system(doc);
        p.quasi = build_characteristic_multi(*p.system);
        break;
      case Mode::raw_quasipolynomial:
        p.quasi = to_quasipolynomial(std::get<RawPayload>(doc.payload));
        break;
      case Mode::distributed:
        p.distributed = to_distributed(doc);
        break;
    }
    if (p.quasi) {
      if (p.quasi->is_zero()) throw InputError("build: characteristic function is identically zero");
      p.target = make_target(*p.quasi);
    } else {
      p.target = make_target(*p.distributed, doc.analysis.quadrature());
    }
    return p;
  });
}

inline Report quasipolynomial_json(const QuasiPolynomial& q) {
  Report terms = Report::array();
  for (const auto& t : q.terms()) {
    Report coeffs = Report::array();
    for (const auto& c : t.poly.coeffs()) coeffs.push_back(detail::cjson(c));
    Report term;
    term["sigma"] = t.sigma.is_real() ? Report(t.sigma.real_value()) : detail::cjson(t.sigma.value());
    term["sigma_exact"] = t.sigma.is_exact() ? Report(t.sigma.to_string()) : Report(nullptr);
    term["coeffs"] = std::move(coeffs);
    terms.push_back(std::move(term));
  }
  return terms;
}

inline Report count_json(const Region& requested, const CountResult& c, const AnalysisOptions& a) {
  return {{"region", detail::rjson(requested)},
          {"region_used", detail::rjson(c.region)},
          {"count", c.count},
          {"winding_defect", c.defect},
          {"boundary_eps", a.boundary_eps},
          {"retry_history", detail::history_json(c.failures)}};
}

inline Report root_json(const Root& r, const Problem& p, double step_tol) {
  Report j;
  j["re"] = r.location.real();
  j["im"] = r.location.imag();
  j["residual"] = r.residual;
  j["multiplicity"] = r.multiplicity;
  j["multiplicity_confirmed"] = r.multiplicity_confirmed;
  j["newton_step_tol"] = step_tol;
  if (p.mode == Mode::single_delay) j["lambda"] = detail::cjson(r.location / p.tau);
  return j;
}

inline RootReport locate(const Problem& p, const Region& region, const AnalysisOptions& a) {
  return detail::stage("roots", [&] { return find_roots(p.target, region, a.finding()); });
}

inline Report roots_section(const Problem& p, const RootReport& rep, const AnalysisOptions& a) {
  Report j = count_json(rep.region, rep.count, a);
  Report roots = Report::array();
  for (const auto& r : rep.roots) roots.push_back(root_json(r, p, a.finding().refine.step_tol));
  j["roots"] = std::move(roots);
  return j;
}

inline GrowthScan run_scan(const Problem& p, const Region& base, const std::vector<double>& factors,
                           const AnalysisOptions& a) {
  return detail::stage("scan", [&] { return scan_growth(p.target, base, factors, a.counting()); });
}

inline Report scan_json(const GrowthScan& s, const AnalysisOptions& a) {
  Report rows = Report::array();
  for (const auto& e : s.entries) {
    Report row;
    row["factor"] = e.factor;
    row["region"] = detail::rjson(e.region);
    if (e.count) {
      row["count"] = e.count->count;
      row["region_used"] = detail::rjson(e.count->region);
      row["winding_defect"] = e.count->defect;
    } else {
      row["count"] = nullptr;
      row["error"] = e.error;
    }
    rows.push_back(std::move(row));
  }
  Report j;
  j["entries"] = std::move(rows);
  j["boundary_eps"] = a.boundary_eps;
  j["verdict"] = to_string(s.verdict);
  if (s.verdict == ScanVerdict::stabilized) j["stabilized_value"] = s.stabilized_value;
  j["summary"] = s.summary();
  return j;
}

inline Region default_scan_base(const AnalysisOptions& a) {
  return a.scan_base.value_or(Region{-5.0, 5.0, -5.0, 5.0});
}

inline Report trace_json(std::size_t index, const ComplexMatrix& B) {
  const TraceCheck t = check_trace_condition(B);
  return {{"index", index + 1},
          {"trace", detail::cjson(t.trace)},
          {"nonzero", t.nonzero},
          {"tolerance", t.threshold}};
}

/// Structural checks plus counts, roots and scans requested in the document.
inline Report analyze(const SystemDocument& doc) {
  const Problem p = build_problem(doc);
  const AnalysisOptions& a = doc.analysis;
  Report r;
  r["schema"] = kReportSchema;
  r["command"] = "analyze";
  r["mode"] = to_string(doc.mode);
  r["variable"] = p.variable();

  if (p.mode == Mode::single_delay) {
    r["rescaling"] = {{"tau", detail::cjson(p.tau)}, {"relation", "mu = tau * lambda"}};
  }

  if (p.quasi) {
    const QuasiPolynomial& f = *p.quasi;
    r["characteristic"] = {{"terms", quasipolynomial_json(f)}, {"sigma_merge_tolerance", kSigmaMergeTol}};
    if (f.all_real()) {
      const bool admissible = is_admissible(f);
      Report adm = {{"admissible", admissible},
                    {"distinct_exponents", f.size()},
                    {"sigma_merge_tolerance", kSigmaMergeTol}};
      if (!admissible) {
        const ComplexPolynomial g = reduce_to_polynomial(f);
        Report coeffs = Report::array();
        for (const auto& c : g.coeffs()) coeffs.push_back(detail::cjson(c));
        adm["reduced_polynomial"] = {{"degree", g.degree()}, {"coeffs", std::move(coeffs)}};
      }
      r["admissibility"] = std::move(adm);
      r["principal_term"] = {{"present", has_principal_term(f)}};
    } else {
      r["admissibility"] = {{"admissible", nullptr}, {"reason", "complex exponent coefficients"}};
    }
  }

  if (p.system) {
    Report traces = Report::array();
    for (std::size_t j = 0; j < p.system->Bs.size(); ++j) traces.push_back(trace_json(j, p.system->Bs[j]));
    r["trace_conditions"] = std::move(traces);
  }

  if (p.mode == Mode::single_delay) {
    const auto& s = std::get<SingleDelayPayload>(doc.payload);
    DelaySystem rescaled{s.A.scaled(s.tau), {s.B.scaled(s.tau)}, Complex(1.0)};
    const ExpansionReport e = detail::stage("expansion", [&] { return verify_expansion_structure(rescaled, *p.quasi); });
    r["expansion_structure"] = {{"n", e.n},
                                {"leading_exponential_coeff", detail::cjson(e.leading_exponential_coeff)},
                                {"expected_minus_trace", detail::cjson(e.expected)},
                                {"abs_error", e.abs_error},
                                {"tolerance", e.tolerance},
                                {"trace_law_holds", e.trace_law_holds},
                                {"last_exponent", e.last_exponent}};
  }

  if (p.mode == Mode::multi_delay) {
    const auto& spec = std::get<DelaySpec>(p.system->delays);
    const IndependenceVerdict v = check_delay_independence(spec);
    Report witness = Report::array();
    for (const auto& b : v.witness) {
      if (b >= std::numeric_limits<long long>::min() && b <= std::numeric_limits<long long>::max()) {
        witness.push_back(b.convert_to<long long>());
      } else {
        witness.push_back(b.str());
      }
    }
    r["independence"] = {{"status", to_string(v.status)},
                         {"witness", std::move(witness)},
                         {"exact", spec.is_exact()},
                         {"tolerance", 0}};
  }

  if (p.distributed) {
    const KernelCheck k = detail::stage("kernel", [&] { return kernel_nonzero_check(*p.distributed, a.kernel_grid); });
    r["kernel"] = {{"nonzero", k.nonzero},
                   {"sup_estimate", k.sup_estimate},
                   {"threshold", k.threshold},
                   {"grid_points", k.grid_points},
                   {"sampled_verdict", true}};
    r["quadrature"] = {{"rel_tol", a.quad_rel_tol}, {"max_panels", a.quad_max_panels}, {"nodes_per_panel", a.quad_nodes}};
  }

  if (p.quasi) {
    const GrowthEstimate g = detail::stage("growth", [&] {
      return estimate_growth_order(*p.quasi, a.growth_radii, a.growth_samples);
    });
    r["growth_order"] = {{"radii", g.radii},
                         {"max_log_abs", g.max_log_abs},
                         {"fitted_order", g.fitted_order},
                         {"samples_per_circle", g.samples_per_circle},
                         {"log_abs_floor", kLogAbsFloor}};
  }

  Report regions = Report::array();
  for (const auto& region : a.regions) regions.push_back(roots_section(p, locate(p, region, a), a));
  r["regions"] = std::move(regions);

  if (a.scan_base) r["scan"] = scan_json(run_scan(p, *a.scan_base, a.scan_factors, a), a);
  return r;
}

inline Report roots_report(const Problem& p, const RootReport& rep, const AnalysisOptions& a) {
  Report r;
  r["schema"] = kReportSchema;
  r["command"] = "roots";
  r["mode"] = to_string(p.mode);
  r["variable"] = p.variable();
  Report body = roots_section(p, rep, a);
  for (auto it = body.begin(); it != body.end(); ++it) r[it.key()] = it.value();
  return r;
}

inline Report scan_report(const Problem& p, const GrowthScan& s, const AnalysisOptions& a) {
  Report r;
  r["schema"] = kReportSchema;
  r["command"] = "scan";
  r["mode"] = to_string(p.mode);
  r["variable"] = p.variable();
  Report body = scan_json(s, a);
  for (auto it = body.begin(); it != body.end(); ++it) r[it.key()] = it.value();
  return r;
}

/// CSV root table with header re,im,residual,multiplicity.
inline std::string roots_csv(const RootReport& rep) {
  std::string s = "re,im,residual,multiplicity\n";
  char buf[128];
  for (const auto& r : rep.roots) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", r.location.real(), r.location.imag(), r.residual,
                  r.multiplicity);
    s += buf;
  }
  return s;
}

}  // namespace qpoly::io
