#pragma once

// Argument-principle root counting on rectangles, quadtree isolation and
// Newton refinement for analytic targets (quasi-polynomials, distributed
// characteristic functions, or anything else supplying f and f').

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qpoly/distributed.hpp"
#include "qpoly/error.hpp"
#include "qpoly/parallel.hpp"
#include "qpoly/quasipoly.hpp"

namespace qpoly {

/// f together with f'. `scale(lambda)` is the magnitude against which |f|
/// counts as small on a contour; when unset it is 1 + |lambda|.
struct AnalyticTarget {
  std::function<Complex(Complex)> value;
  std::function<Complex(Complex)> deriv;
  std::function<double(Complex)> scale;

  double magnitude(Complex z) const { return scale ? scale(z) : 1.0 + std::abs(z); }
};

inline AnalyticTarget make_target(const QuasiPolynomial& p) {
  auto f = std::make_shared<const QuasiPolynomial>(p);
  auto df = std::make_shared<const QuasiPolynomial>(derivative(p));
  return {[f](Complex z) { return evaluate(*f, z); },
          [df](Complex z) { return evaluate(*df, z); },
          [f](Complex z) { return magnitude_scale(*f, z); }};
}

inline AnalyticTarget make_target(const DistributedSystem& sys, const QuadratureConfig& cfg = {}) {
  sys.validate();
  cfg.validate();
  const double delta = sys.tau * kernel_nonzero_check(sys).sup_estimate;
  const double abs_a = std::abs(sys.a);
  const double tau = sys.tau;
  return {[sys, cfg](Complex z) { return evaluate_distributed(sys, z, cfg); },
          [sys, cfg](Complex z) { return derivative_distributed(sys, z, cfg); },
          [=](Complex z) {
            return 1.0 + std::abs(z) + abs_a + delta * std::max(1.0, std::exp(-tau * z.real()));
          }};
}

struct Region {
  double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;

  static Region square(Complex center, double half_side) {
    return {center.real() - half_side, center.real() + half_side, center.imag() - half_side,
            center.imag() + half_side};
  }

  void validate() const {
    if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) ||
        !std::isfinite(im_max))
      throw InvalidArgument("region bounds must be finite");
    if (!(re_min < re_max) || !(im_min < im_max))
      throw InvalidArgument("region needs re_min < re_max and im_min < im_max");
  }

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  double max_side() const { return std::max(width(), height()); }
  double diameter() const { return std::hypot(width(), height()); }
  Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }

  bool contains(Complex z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }

  /// Same center, sides multiplied by factor.
  Region scaled(double factor) const {
    const Complex c = center();
    const double hw = 0.5 * width() * factor, hh = 0.5 * height() * factor;
    return {c.real() - hw, c.real() + hw, c.imag() - hh, c.imag() + hh};
  }

  Region inflated(double left, double right, double bottom, double top) const {
    return {re_min - left, re_max + right, im_min - bottom, im_max + top};
  }

  friend bool operator==(const Region&, const Region&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic seed derived from the region coordinates.
inline std::uint64_t region_seed(const Region& r, std::uint64_t salt = 0) {
  std::uint64_t h = splitmix64(salt);
  for (double v : {r.re_min, r.re_max, r.im_min, r.im_max}) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
  return h;
}

inline double wrap_phase(double d) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  d = std::remainder(d, two_pi);
  return d;
}

}  // namespace detail

struct WindingOptions {
  double boundary_eps = 1e-8;
  int max_depth = 24;
  int initial_segments = 16;  // per edge
};

struct WindingResult {
  int count = 0;
  double defect = 0.0;  // |total phase / 2 pi - count| before rounding
  std::size_t samples = 0;
};

/// Number of zeros inside the rectangle, with multiplicity, from the total
/// phase change of f along its boundary traversed counterclockwise. Each edge
/// is bisected until a segment and both of its halves change phase by less
/// than pi/2.
inline WindingResult winding_number(const AnalyticTarget& target, const Region& region,
                                    const WindingOptions& opts = {}) {
  region.validate();
  if (!(opts.boundary_eps > 0.0)) throw InvalidArgument("boundary_eps must be > 0");
  if (opts.max_depth < 0 || opts.initial_segments < 1)
    throw InvalidArgument("winding options out of range");

  constexpr double quarter = 0.5 * std::numbers::pi;
  std::size_t samples = 0;
  auto sample = [&](Complex z) {
    const Complex f = target.value(z);
    ++samples;
    if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
      throw NonFiniteValue("non-finite function value on contour");
    if (std::abs(f) <= opts.boundary_eps * target.magnitude(z))
      throw BoundaryProximityError(z, std::abs(f));
    return f;
  };
  auto dphase = [](Complex from, Complex to) { return detail::wrap_phase(std::arg(to) - std::arg(from)); };

  std::function<double(Complex, Complex, Complex, Complex, int)> segment =
      [&](Complex a, Complex fa, Complex b, Complex fb, int depth) -> double {
    const Complex m = 0.5 * (a + b);
    const Complex fm = sample(m);
    const double whole = dphase(fa, fb);
    const double left = dphase(fa, fm);
    const double right = dphase(fm, fb);
    if (std::abs(whole) < quarter && std::abs(left) < quarter && std::abs(right) < quarter)
      return left + right;
    if (depth >= opts.max_depth) throw DepthExceededError(m);
    return segment(a, fa, m, fm, depth + 1) + segment(m, fm, b, fb, depth + 1);
  };

  const Complex corners[4] = {{region.re_min, region.im_min},
                              {region.re_max, region.im_min},
                              {region.re_max, region.im_max},
                              {region.re_min, region.im_max}};

  int segments = opts.initial_segments;
  for (int pass = 0; pass < 4; ++pass, segments *= 4) {
    double total = 0.0;
    Complex z0 = corners[0];
    Complex f0 = sample(z0);
    const Complex f_start = f0;
    for (int e = 0; e < 4; ++e) {
      const Complex a = corners[e], b = corners[(e + 1) % 4];
      for (int s = 1; s <= segments; ++s) {
        const Complex z1 = (s == segments) ? b : a + (b - a) * (static_cast<double>(s) / segments);
        const Complex f1 = (e == 3 && s == segments) ? f_start : sample(z1);
        total += segment(z0, f0, z1, f1, 0);
        z0 = z1;
        f0 = f1;
      }
    }
    const double winding = total / (2.0 * std::numbers::pi);
    WindingResult r;
    r.count = static_cast<int>(std::lround(winding));
    r.defect = std::abs(winding - r.count);
    r.samples = samples;
    if (r.defect <= 0.05) return r;
  }
  throw ConvergenceError("winding number defect stayed above 0.05 after edge refinement");
}

struct CountOptions {
  WindingOptions winding;
  int max_retries = 8;
  double jitter = 1e-6;  // fraction of the region diameter for the first retry
};

struct CountAttempt {
  Region region;
  std::string error;
};

struct CountResult {
  int count = 0;
  double defect = 0.0;
  Region region;                       // region actually counted
  std::vector<CountAttempt> failures;  // attempts that preceded the success
};

/// Raised when every jittered retry of a count failed.
class CountFailure : public Error {
 public:
  CountFailure(std::vector<CountAttempt> history)
      : Error("root count failed after " + std::to_string(history.size()) + " attempts: " +
              history.back().error),
        history_(std::move(history)) {}
  const std::vector<CountAttempt>& history() const { return history_; }

 private:
  std::vector<CountAttempt> history_;
};

/// Winding number with retries: on contour collisions the region is inflated
/// by a deterministic pseudo-random jitter that doubles on every retry.
inline CountResult count_roots(const AnalyticTarget& target, const Region& region,
                               const CountOptions& opts = {}) {
  region.validate();
  std::mt19937_64 rng(detail::region_seed(region));
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  std::vector<CountAttempt> failures;
  Region current = region;
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    if (attempt > 0) {
      const double j = opts.jitter * region.diameter() * std::ldexp(1.0, attempt - 1);
      const double l = unit(rng), r = unit(rng), b = unit(rng), t = unit(rng);
      current = region.inflated(j * l, j * r, j * b, j * t);
    }
    try {
      const WindingResult w = winding_number(target, current, opts.winding);
      return {w.count, w.defect, current, std::move(failures)};
    } catch (const BoundaryProximityError& e) {
      failures.push_back({current, e.what()});
    } catch (const DepthExceededError& e) {
      failures.push_back({current, e.what()});
    }
  }
  throw CountFailure(std::move(failures));
}

struct IsolatedBox {
  Region box;
  int count = 0;
  bool cluster = false;  // count > 1 in a box that could not be split further
};

struct IsolateOptions {
  CountOptions counting;
  std::size_t max_boxes = 4096;
  double min_side = 1e-8;
  int split_attempts = 8;
};

namespace detail {

/// Splits box into four quadrants whose winding numbers sum to parent_count.
/// The split point starts at the center and moves pseudo-randomly by up to
/// 20% of the sides when a quadrant boundary runs into a root.
inline std::optional<std::vector<IsolatedBox>> split_box(const AnalyticTarget& target, const Region& box,
                                                         int parent_count, const IsolateOptions& opts) {
  std::mt19937_64 rng(region_seed(box, 0x5eed));
  std::uniform_real_distribution<double> offset(-0.2, 0.2);
  for (int attempt = 0; attempt <= opts.split_attempts; ++attempt) {
    Complex m = box.center();
    if (attempt > 0) m += Complex(offset(rng) * box.width(), offset(rng) * box.height());
    const Region quads[4] = {{box.re_min, m.real(), box.im_min, m.imag()},
                             {m.real(), box.re_max, box.im_min, m.imag()},
                             {box.re_min, m.real(), m.imag(), box.im_max},
                             {m.real(), box.re_max, m.imag(), box.im_max}};
    std::vector<IsolatedBox> children;
    int total = 0;
    try {
      for (const auto& q : quads) {
        const int c = winding_number(target, q, opts.counting.winding).count;
        total += c;
        if (c != 0) children.push_back({q, c, false});
      }
    } catch (const BoundaryProximityError&) {
      continue;
    } catch (const DepthExceededError&) {
      continue;
    }
    if (total == parent_count) return children;
  }
  return std::nullopt;
}

}  // namespace detail

/// Quadtree subdivision until every box holds one root, or holds several and
/// can no longer be split (side below min_side, or every split attempt put a
/// quadrant boundary onto a root); those come back flagged as clusters.
inline std::vector<IsolatedBox> isolate_roots(const AnalyticTarget& target, const Region& region,
                                              const IsolateOptions& opts = {}) {
  const CountResult top = count_roots(target, region, opts.counting);
  std::vector<IsolatedBox> done;
  std::vector<IsolatedBox> frontier;
  if (top.count > 0) frontier.push_back({top.region, top.count, false});
  std::size_t boxes = 1;
  while (!frontier.empty()) {
    std::vector<std::optional<std::vector<IsolatedBox>>> split(frontier.size());
    parallel_for(frontier.size(), [&](std::size_t i) {
      const auto& item = frontier[i];
      if (item.count == 1 || item.box.max_side() < opts.min_side) return;
      split[i] = detail::split_box(target, item.box, item.count, opts);
    });
    std::vector<IsolatedBox> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      IsolatedBox item = frontier[i];
      if (item.count == 1) {
        done.push_back(item);
      } else if (!split[i]) {
        item.cluster = true;
        done.push_back(item);
      } else {
        for (auto& c : *split[i]) next.push_back(c);
        boxes += 4;
      }
    }
    if (boxes > opts.max_boxes) throw Error("isolate_roots: max_boxes exceeded");
    frontier = std::move(next);
  }
  return done;
}

struct Root {
  Complex location;
  double residual = 0.0;  // |f(location)|
  int multiplicity = 1;
  Region box;
  bool multiplicity_confirmed = false;
  int iterations = 0;
};

struct RefineOptions {
  double step_tol = 1e-12;  // relative to 1 + |lambda|
  int max_iterations = 50;
  double safeguard = 10.0;    // allowed distance from the seed, in units of 1 + |seed|
  int multiplicity_hint = 0;  // 0: estimate from the convergence rate
  double confirm_box = 1e-3;  // half side, relative to 1 + |lambda|
  CountOptions counting;
};

namespace detail {

struct NewtonOutcome {
  Complex z;
  int multiplicity;
  int iterations;
};

inline NewtonOutcome newton(const AnalyticTarget& target, Complex seed, int multiplicity, bool estimate,
                            const RefineOptions& opts) {
  Complex z = seed;
  int m = multiplicity;
  std::vector<double> steps;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Complex f = target.value(z);
    if (f == Complex{}) return {z, m, it - 1};
    const Complex d = target.deriv(z);
    if (d == Complex{} || !std::isfinite(std::abs(d)) || !std::isfinite(std::abs(f)))
      throw ConvergenceError("Newton iteration hit a vanishing or non-finite derivative");
    const Complex step = static_cast<double>(m) * f / d;
    z -= step;
    if (std::abs(z - seed) > opts.safeguard * (1.0 + std::abs(seed)))
      throw ConvergenceError("Newton iteration left the safeguard radius");
    if (std::abs(step) <= opts.step_tol * (1.0 + std::abs(z))) return {z, m, it};

    if (estimate && m == 1) {
      steps.push_back(std::abs(step));
      if (steps.size() >= 4) {
        const std::size_t k = steps.size();
        const double r1 = steps[k - 3] / steps[k - 4];
        const double r2 = steps[k - 2] / steps[k - 3];
        const double r3 = steps[k - 1] / steps[k - 2];
        const double lo = std::min({r1, r2, r3}), hi = std::max({r1, r2, r3});
        if (lo > 0.3 && hi < 0.97 && hi - lo < 0.02) {
          const double r = (r1 + r2 + r3) / 3.0;
          const int guess = static_cast<int>(std::lround(1.0 / (1.0 - r)));
          if (guess >= 2) m = guess;
        }
      }
    }
  }
  throw ConvergenceError("Newton iteration did not converge");
}

}  // namespace detail

/// Newton refinement from seed. Linear convergence with ratio (m-1)/m marks
/// a root of multiplicity m, after which the iteration switches to
/// lambda -= m f/f' and the multiplicity is confirmed by a count on a small box.
inline Root refine_root(const AnalyticTarget& target, Complex seed, const RefineOptions& opts = {}) {
  if (!target.deriv) throw InvalidArgument("refine_root needs the derivative of the target");
  const bool estimate = opts.multiplicity_hint <= 0;
  detail::NewtonOutcome out =
      detail::newton(target, seed, estimate ? 1 : opts.multiplicity_hint, estimate, opts);

  Root root;
  root.multiplicity = out.multiplicity;
  root.multiplicity_confirmed = !estimate;
  const double half = opts.confirm_box * (1.0 + std::abs(out.z));
  root.box = Region::square(out.z, half);
  if (estimate && out.multiplicity > 1) {
    try {
      const int c = winding_number(target, root.box, opts.counting.winding).count;
      if (c == out.multiplicity) {
        root.multiplicity_confirmed = true;
      } else if (c == 1) {
        out = detail::newton(target, out.z, 1, false, opts);
        root.multiplicity = 1;
        root.multiplicity_confirmed = true;
        root.box = Region::square(out.z, half);
      }
    } catch (const Error&) {
      root.multiplicity_confirmed = false;
    }
  }
  root.location = out.z;
  root.iterations = out.iterations;
  root.residual = std::abs(target.value(out.z));
  return root;
}

struct FindOptions {
  IsolateOptions isolate;
  RefineOptions refine;
};

struct RootReport {
  Region region;
  CountResult count;
  std::vector<IsolatedBox> boxes;
  std::vector<Root> roots;  // one per box, ordered by (Re, Im)
};

namespace detail {

/// Newton from the box center; if the iterate escapes the box, descend into
/// the quadrant that holds the root and try again.
inline Root refine_in_box(const AnalyticTarget& target, IsolatedBox box, const FindOptions& opts) {
  RefineOptions ro = opts.refine;
  ro.multiplicity_hint = box.count;
  for (int level = 0; level < 60; ++level) {
    try {
      Root r = refine_root(target, box.box.center(), ro);
      if (box.box.contains(r.location)) {
        r.box = box.box;
        return r;
      }
    } catch (const ConvergenceError&) {
    }
    if (box.cluster) break;
    auto kids = split_box(target, box.box, box.count, opts.isolate);
    if (!kids || kids->size() != 1) break;
    box = kids->front();
  }
  if (box.cluster) {
    Root r;
    r.location = box.box.center();
    r.residual = std::abs(target.value(r.location));
    r.multiplicity = box.count;
    r.multiplicity_confirmed = true;
    r.box = box.box;
    return r;
  }
  throw ConvergenceError("could not refine the root isolated in a box");
}

}  // namespace detail

/// Count, isolate and refine all roots in region.
inline RootReport find_roots(const AnalyticTarget& target, const Region& region, const FindOptions& opts = {}) {
  RootReport rep;
  rep.region = region;
  rep.count = count_roots(target, region, opts.isolate.counting);
  rep.boxes = isolate_roots(target, region, opts.isolate);
  rep.roots.resize(rep.boxes.size());
  parallel_for(rep.boxes.size(), [&](std::size_t i) {
    rep.roots[i] = detail::refine_in_box(target, rep.boxes[i], opts);
  });
  std::sort(rep.roots.begin(), rep.roots.end(), [](const Root& a, const Root& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return rep;
}

enum class ScanVerdict { strictly_increasing, stabilized, mixed, unknown };

inline const char* to_string(ScanVerdict v) {
  switch (v) {
    case ScanVerdict::strictly_increasing: return "strictly_increasing";
    case ScanVerdict::stabilized: return "stabilized";
    case ScanVerdict::mixed: return "mixed";
    case ScanVerdict::unknown: return "unknown";
  }
  return "unknown";
}

struct ScanEntry {
  double factor = 1.0;
  Region region;
  std::optional<CountResult> count;  // empty when the count failed
  std::string error;
};

struct GrowthScan {
  std::vector<ScanEntry> entries;
  ScanVerdict verdict = ScanVerdict::unknown;
  int stabilized_value = 0;  // meaningful for ScanVerdict::stabilized

  std::string summary() const {
    switch (verdict) {
      case ScanVerdict::strictly_increasing: return "counts strictly increased across all steps";
      case ScanVerdict::stabilized: return "counts stabilized at value " + std::to_string(stabilized_value);
      case ScanVerdict::mixed: return "counts neither strictly increased nor stabilized";
      case ScanVerdict::unknown: return "at least one count failed";
    }
    return {};
  }
};

/// Root counts in `base` scaled about its center by each factor.
inline GrowthScan scan_growth(const AnalyticTarget& target, const Region& base, const std::vector<double>& factors,
                              const CountOptions& opts = {}) {
  base.validate();
  if (factors.empty() || factors.front() != 1.0) throw InvalidArgument("scan factors must start at 1");
  for (std::size_t i = 1; i < factors.size(); ++i)
    if (!(factors[i] > factors[i - 1])) throw InvalidArgument("scan factors must be strictly increasing");

  GrowthScan scan;
  scan.entries.resize(factors.size());
  parallel_for(factors.size(), [&](std::size_t i) {
    ScanEntry& e = scan.entries[i];
    e.factor = factors[i];
    e.region = base.scaled(factors[i]);
    try {
      e.count = count_roots(target, e.region, opts);
    } catch (const Error& err) {
      e.error = err.what();
    }
  });

  bool known = true, increasing = true, constant = true;
  for (std::size_t i = 0; i < scan.entries.size(); ++i) {
    if (!scan.entries[i].count) {
      known = false;
      continue;
    }
    if (i > 0 && scan.entries[i - 1].count) {
      const int prev = scan.entries[i - 1].count->count, cur = scan.entries[i].count->count;
      increasing = increasing && cur > prev;
      constant = constant && cur == prev;
    }
  }
  if (!known) {
    scan.verdict = ScanVerdict::unknown;
  } else if (scan.entries.size() >= 2 && increasing) {
    scan.verdict = ScanVerdict::strictly_increasing;
  } else if (constant) {
    scan.verdict = ScanVerdict::stabilized;
    scan.stabilized_value = scan.entries.front().count->count;
  } else {
    scan.verdict = ScanVerdict::mixed;
  }
  return scan;
}

}  // namespace qpoly
