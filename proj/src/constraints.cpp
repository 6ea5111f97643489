#include "mrplan/constraints.hpp"

namespace mrplan {

void ConstraintSet::add(const SpaceTimeConstraint& c) {
  if (c.kind == SpaceTimeConstraint::Kind::vertex) {
    vertex_.insert(vkey(c.v, c.timestep));
    vertex_listed_.emplace_back(c.v, c.timestep);
  } else {
    edge_.insert(ekey(c.from, c.v, c.timestep));
  }
}

bool ConstraintSet::vertex_forbidden(VertexId v, int t) const {
  return vertex_.count(vkey(v, t)) != 0;
}

bool ConstraintSet::edge_forbidden(VertexId from, VertexId to, int t) const {
  return edge_.count(ekey(from, to, t)) != 0;
}

int ConstraintSet::earliest_settle(VertexId target) const {
  int settle = 0;
  for (const auto& [v, t] : vertex_listed_) {
    if (v == target && t + 1 > settle) settle = t + 1;
  }
  return settle;
}

}  // namespace mrplan
