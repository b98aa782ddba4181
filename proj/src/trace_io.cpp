#include "mvplc/trace_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>

#include <fmt/format.h>

namespace mvplc {

std::string trace_to_csv(const SimTrace& trace) {
  std::string out = "step,vehicle,t,x,y,psi,xhat,yhat,psihat,sx3,sy3,spsi3,n_lm\n";
  auto it = std::back_inserter(out);
  for (const TraceRow& r : trace.rows) {
    fmt::format_to(it, "{},{},{:.4f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{}\n", r.step, r.vehicle, r.t,
                   r.truth.x, r.truth.y, r.truth.psi, r.estimate.x, r.estimate.y, r.estimate.psi, r.sigma3(0), r.sigma3(1),
                   r.sigma3(2), r.n_landmarks);
  }
  return out;
}

namespace {

constexpr std::array<const char*, 6> kColours = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

const char* colour(int vehicle) { return kColours[static_cast<std::size_t>(vehicle) % kColours.size()]; }

struct Frame {
  double x0, y0, w, h;        // pixel box
  double lo_x, hi_x, lo_y, hi_y;  // data range

  double px(double x) const { return x0 + (x - lo_x) / (hi_x - lo_x) * w; }
  double py(double y) const { return y0 + h - (y - lo_y) / (hi_y - lo_y) * h; }
};

void polyline(std::string& out, const Frame& f, const std::vector<std::pair<double, double>>& pts, const char* stroke,
              const char* extra) {
  if (pts.empty()) return;
  auto it = std::back_inserter(out);
  fmt::format_to(it, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1\" {} points=\"", stroke, extra);
  for (const auto& [x, y] : pts) fmt::format_to(it, "{:.2f},{:.2f} ", f.px(x), f.py(y));
  out += "\"/>\n";
}

}  // namespace

std::string trace_to_svg(const Instance& instance, const Solution& solution, const SimTrace& trace) {
  constexpr double kWidth = 900.0;
  constexpr double kMap = 600.0;
  constexpr double kPanel = 160.0;
  const int panels = 3 * std::max(1, trace.vehicles);
  const double height = kMap + 40.0 + panels * (kPanel + 20.0);
  std::string out;
  auto it = std::back_inserter(out);
  fmt::format_to(it, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\">\n", kWidth, height);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Map extent covers all vertices and trajectories.
  double lo_x = 0.0, hi_x = 1.0, lo_y = 0.0, hi_y = 1.0;
  bool first = true;
  auto extend = [&](double x, double y) {
    if (first) {
      lo_x = hi_x = x;
      lo_y = hi_y = y;
      first = false;
    }
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  for (int v = 0; v < instance.num_vertices(); ++v) extend(instance.vertex(v).x, instance.vertex(v).y);
  for (const TraceRow& r : trace.rows) {
    extend(r.truth.x, r.truth.y);
    extend(r.estimate.x, r.estimate.y);
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
  const Frame map{150.0, 20.0, kMap, kMap, lo_x - 0.05 * span, lo_x + 1.05 * span, lo_y - 0.05 * span, lo_y + 1.05 * span};
  fmt::format_to(it, "<rect x=\"{:.0f}\" y=\"{:.0f}\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"none\" stroke=\"#999\"/>\n", map.x0, map.y0,
                 map.w, map.h);

  for (int k : solution.landmarks) {
    const Point p = instance.landmark_candidates[static_cast<std::size_t>(k)];
    fmt::format_to(it, "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"6\" height=\"6\" fill=\"#444\"/>\n", map.px(p.x) - 3.0, map.py(p.y) - 3.0);
  }
  for (const Point& p : instance.targets) {
    fmt::format_to(it, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"#888\"/>\n", map.px(p.x), map.py(p.y));
  }
  for (const Point& p : instance.depots) {
    fmt::format_to(it, "<path d=\"M {:.2f} {:.2f} l 6 10 l -12 0 z\" fill=\"black\"/>\n", map.px(p.x), map.py(p.y) - 6.0);
  }
  for (int v = 0; v < trace.vehicles; ++v) {
    std::vector<std::pair<double, double>> truth, est;
    for (const TraceRow& r : trace.rows) {
      if (r.vehicle != v) continue;
      truth.emplace_back(r.truth.x, r.truth.y);
      est.emplace_back(r.estimate.x, r.estimate.y);
    }
    polyline(out, map, truth, colour(v), "");
    polyline(out, map, est, colour(v), "stroke-dasharray=\"4 3\"");
  }

  // Error panels: x, y, psi per vehicle.
  static constexpr std::array<const char*, 3> kNames = {"x", "y", "psi"};
  const double t_end = trace.steps * (trace.rows.empty() ? 1.0 : trace.rows.front().t / (trace.rows.front().step + 1));
  int panel = 0;
  for (int v = 0; v < trace.vehicles; ++v) {
    for (int c = 0; c < 3; ++c, ++panel) {
      std::vector<std::pair<double, double>> err, upper, lower;
      double bound = 1e-9;
      for (const TraceRow& r : trace.rows) {
        if (r.vehicle != v) continue;
        const double e = c == 0 ? r.truth.x - r.estimate.x
                         : c == 1 ? r.truth.y - r.estimate.y
                                  : wrap_angle(r.truth.psi - r.estimate.psi);
        err.emplace_back(r.t, e);
        upper.emplace_back(r.t, r.sigma3(c));
        lower.emplace_back(r.t, -r.sigma3(c));
        bound = std::max({bound, std::abs(e), r.sigma3(c)});
      }
      const Frame f{150.0, kMap + 60.0 + panel * (kPanel + 20.0), kMap, kPanel, 0.0, std::max(t_end, 1e-9), -1.1 * bound, 1.1 * bound};
      fmt::format_to(it, "<rect x=\"{:.0f}\" y=\"{:.0f}\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"none\" stroke=\"#999\"/>\n", f.x0, f.y0,
                     f.w, f.h);
      fmt::format_to(it, "<text x=\"{:.0f}\" y=\"{:.0f}\" font-size=\"12\" text-anchor=\"end\">vehicle {} {} error</text>\n", f.x0 - 8.0,
                     f.y0 + f.h / 2.0, v, kNames[static_cast<std::size_t>(c)]);
      polyline(out, f, upper, "#999", "stroke-dasharray=\"3 3\"");
      polyline(out, f, lower, "#999", "stroke-dasharray=\"3 3\"");
      polyline(out, f, err, colour(v), "");
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace mvplc
