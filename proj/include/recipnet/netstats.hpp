#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "recipnet/core.hpp"

// Degree distributions per layer snapshot and power-law exponent estimation
// by ordinary least squares in log-log space.

namespace recipnet {

enum class DegreeMode { In, Out, Total };
enum class Multiplicity { Multi, Simple };

inline const char* degree_mode_name(DegreeMode m) {
  switch (m) {
    case DegreeMode::In: return "in";
    case DegreeMode::Out: return "out";
    case DegreeMode::Total: return "total";
  }
  return "?";
}

inline const char* multiplicity_name(Multiplicity m) {
  return m == Multiplicity::Multi ? "multi" : "simple";
}

struct DegreeDistribution {
  Layer layer = Layer::Chat;
  DegreeMode mode = DegreeMode::Total;
  Multiplicity multiplicity = Multiplicity::Multi;
  std::map<std::int64_t, std::int64_t> counts;  // degree -> node count
};

// Multi mode counts every event as one degree unit; simple mode counts
// distinct neighbors. Nodes without incident events in the layer are absent.
inline DegreeDistribution degree_distribution(const TemporalMultigraph& graph,
                                              Layer layer, DegreeMode mode,
                                              Multiplicity multiplicity) {
  DegreeDistribution dist;
  dist.layer = layer;
  dist.mode = mode;
  dist.multiplicity = multiplicity;

  const auto& events = graph.events();
  for (const auto& node : graph.nodes()) {
    std::int64_t degree = 0;
    if (multiplicity == Multiplicity::Multi) {
      for (std::uint32_t off : node.offsets) {
        const Event& e = events[off];
        if (e.layer != layer) continue;
        const bool out_edge = e.src == node.player;
        if (mode == DegreeMode::Total ||
            (mode == DegreeMode::Out && out_edge) ||
            (mode == DegreeMode::In && !out_edge)) {
          ++degree;
        }
      }
    } else {
      std::set<PlayerId> neighbors;
      for (std::uint32_t off : node.offsets) {
        const Event& e = events[off];
        if (e.layer != layer) continue;
        const bool out_edge = e.src == node.player;
        if (mode == DegreeMode::Total ||
            (mode == DegreeMode::Out && out_edge) ||
            (mode == DegreeMode::In && !out_edge)) {
          neighbors.insert(out_edge ? e.dst : e.src);
        }
      }
      degree = static_cast<std::int64_t>(neighbors.size());
    }
    if (degree > 0) ++dist.counts[degree];
  }
  return dist;
}

struct PowerLawFit {
  double exponent = 0.0;   // negated log-log slope
  double intercept = 0.0;  // log10 count at log10 x = 0
  double r_squared = 0.0;
  int points_used = 0;
};

// Least squares on (log10 x, log10 count). Bins with x <= 0 or count <= 0 are
// dropped before fitting; fewer than two usable points is an error.
inline PowerLawFit fit_power_law(
    const std::vector<std::pair<double, double>>& points) {
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, count] : points) {
    if (x > 0.0 && count > 0.0) {
      logs.emplace_back(std::log10(x), std::log10(count));
    }
  }
  if (logs.size() < 2) {
    throw std::invalid_argument("fit_power_law: fewer than 2 usable points");
  }

  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : logs) {
    sx += x;
    sy += y;
  }
  const double n = static_cast<double>(logs.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_power_law: all x values identical");
  }

  PowerLawFit fit;
  const double slope = sxy / sxx;
  fit.exponent = -slope;
  fit.intercept = my - slope * mx;
  fit.points_used = static_cast<int>(logs.size());

  double ss_res = 0.0;
  for (const auto& [x, y] : logs) {
    const double pred = fit.intercept + slope * x;
    ss_res += (y - pred) * (y - pred);
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

inline PowerLawFit fit_power_law(
    const std::map<std::int64_t, std::int64_t>& points) {
  std::vector<std::pair<double, double>> v;
  v.reserve(points.size());
  for (const auto& [x, count] : points) {
    v.emplace_back(static_cast<double>(x), static_cast<double>(count));
  }
  return fit_power_law(v);
}

}  // namespace recipnet
