#include "mrplan/conflicts.hpp"

#include <algorithm>

namespace mrplan {

std::vector<Conflict> detect_conflicts(const DiscretePlan& plan, const Graph& graph) {
  if (plan.robots.empty()) return {};
  size_t len = plan.robots.front().seq.size();
  for (const auto& r : plan.robots) {
    if (r.seq.size() != len || len == 0) {
      throw InputError("conflict detection requires equal-length non-empty paths");
    }
    for (size_t t = 1; t < r.seq.size(); ++t) {
      VertexId from = r.seq[t - 1], to = r.seq[t];
      if (from == to) continue;
      if (!graph.has_edge(from, to)) {
        throw InputError("robot " + std::to_string(r.id) + " jumps " + graph.name(from) +
                         "->" + graph.name(to) + " at timestep " + std::to_string(t));
      }
    }
  }

  std::vector<Conflict> out;
  size_t n = plan.robots.size();
  for (size_t t = 0; t < len; ++t) {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        const auto& a = plan.robots[i];
        const auto& b = plan.robots[j];
        if (a.seq[t] == b.seq[t]) {
          out.push_back(Conflict{Conflict::Kind::vertex, a.id, b.id,
                                 static_cast<int>(t), a.seq[t], kNoVertex});
        }
        if (t > 0 && a.seq[t - 1] == b.seq[t] && a.seq[t] == b.seq[t - 1] &&
            a.seq[t] != a.seq[t - 1]) {
          out.push_back(Conflict{Conflict::Kind::edge, a.id, b.id, static_cast<int>(t),
                                 a.seq[t], a.seq[t - 1]});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Conflict& x, const Conflict& y) {
    if (x.timestep != y.timestep) return x.timestep < y.timestep;
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return static_cast<int>(x.kind) < static_cast<int>(y.kind);
  });
  return out;
}

}  // namespace mrplan
