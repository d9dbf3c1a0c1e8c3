// Command-line front end: analyze, roots, scan.
//
// Exit codes: 0 success, 2 input error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpoly/io/analysis.hpp"
#include "qpoly/io/document.hpp"
#include "qpoly/io/svg.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw qpoly::io::InputError("cannot write output file '" + out_path + "'");
  out << text;
}

qpoly::Region region_from_flags(const std::vector<double>& re, const std::vector<double>& im) {
  qpoly::Region r{re.at(0), re.at(1), im.at(0), im.at(1)};
  try {
    r.validate();
  } catch (const qpoly::InvalidArgument& e) {
    throw qpoly::io::InputError(std::string("--re/--im: ") + e.what());
  }
  return r;
}

void try_plot(const std::string& path, const std::string& svg) {
  if (path.empty()) return;
  try {
    qpoly::io::write_svg(path, svg);
  } catch (const std::exception& e) {
    std::cerr << "warning: plot not written: " << e.what() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qpoly;
  using namespace qpoly::io;

  CLI::App app{"Characteristic quasi-polynomials of delay systems: structure checks and root counting"};
  app.require_subcommand(1);

  std::string input, out_path, plot_path, format = "json";
  std::vector<double> re, im, factors;

  auto* analyze_cmd = app.add_subcommand("analyze", "structural checks and the analyses listed in the document");
  analyze_cmd->add_option("file", input, "system document (JSON)")->required();
  analyze_cmd->add_option("--out", out_path, "write the report here instead of stdout");

  auto* roots_cmd = app.add_subcommand("roots", "count, isolate and refine roots in a rectangle");
  roots_cmd->add_option("file", input, "system document (JSON)")->required();
  roots_cmd->add_option("--re", re, "real range: min max")->expected(2)->required()->allow_extra_args(false);
  roots_cmd->add_option("--im", im, "imaginary range: min max")->expected(2)->required()->allow_extra_args(false);
  roots_cmd->add_option("--plot", plot_path, "write a root-plane SVG");
  roots_cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  roots_cmd->add_option("--out", out_path, "write the report here instead of stdout");

  auto* scan_cmd = app.add_subcommand("scan", "root counts over nested scaled regions");
  scan_cmd->add_option("file", input, "system document (JSON)")->required();
  scan_cmd->add_option("--factors", factors, "scale factors f1,f2,... starting at 1")->delimiter(',');
  scan_cmd->add_option("--re", re, "base real range: min max")->expected(2)->allow_extra_args(false);
  scan_cmd->add_option("--im", im, "base imaginary range: min max")->expected(2)->allow_extra_args(false);
  scan_cmd->add_option("--plot", plot_path, "write a count-vs-size SVG");
  scan_cmd->add_option("--out", out_path, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    const SystemDocument doc = load_document(input);
    if (analyze_cmd->parsed()) {
      emit(analyze(doc).dump(2) + "\n", out_path);
    } else if (roots_cmd->parsed()) {
      const Region region = region_from_flags(re, im);
      const Problem p = build_problem(doc);
      const RootReport rep = locate(p, region, doc.analysis);
      if (format == "csv") {
        emit(roots_csv(rep), out_path);
      } else {
        emit(roots_report(p, rep, doc.analysis).dump(2) + "\n", out_path);
      }
      std::vector<Region> boxes{rep.count.region};
      for (const auto& b : rep.boxes) boxes.push_back(b.box);
      try_plot(plot_path, root_plane_svg(rep.count.region, boxes, rep.roots));
    } else if (scan_cmd->parsed()) {
      std::vector<double> f = factors.empty() ? doc.analysis.scan_factors : factors;
      if (re.empty() != im.empty()) throw InputError("scan: --re and --im must be given together");
      const Region base = re.empty() ? default_scan_base(doc.analysis) : region_from_flags(re, im);
      if (f.empty() || f.front() != 1.0) throw InputError("--factors: must start at 1");
      for (std::size_t i = 1; i < f.size(); ++i)
        if (!(f[i] > f[i - 1])) throw InputError("--factors: must be strictly increasing");
      const Problem p = build_problem(doc);
      const GrowthScan s = run_scan(p, base, f, doc.analysis);
      emit(scan_report(p, s, doc.analysis).dump(2) + "\n", out_path);
      try_plot(plot_path, scan_svg(s));
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericFailure& e) {
    Report err = {{"error", "numeric_failure"}, {"stage", e.stage()}, {"message", e.what()}};
    for (auto it = e.details().begin(); it != e.details().end(); ++it) err[it.key()] = it.value();
    std::cerr << err.dump(2) << "\n";
    return kExitNumeric;
  } catch (const qpoly::InvalidArgument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const qpoly::Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
