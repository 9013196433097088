#include "qigraph/catalog.hpp"

#include <set>

#include "qigraph/error.hpp"

namespace qigraph {

namespace {

bool allowed_degree(int d) { return d == 1 || d == 2 || d == 3 || d == 4 || d == 6; }

std::vector<std::string> split_composite(const std::string& id) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = id.find(';', start);
    parts.push_back(id.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

const CuspSpec* OrbifoldEntry::cusp(const std::string& cusp_id) const {
  for (const auto& c : cusps) {
    if (c.id == cusp_id) return &c;
  }
  return nullptr;
}

std::map<std::string, int> OrbifoldEntry::own_degrees() const {
  std::map<std::string, int> out;
  for (const auto& c : cusps) out[c.id] = c.degree;
  return out;
}

const CuspAssignment* CoveringEntry::for_source(const std::string& cusp_id) const {
  for (const auto& a : cusps) {
    if (a.source_cusp == cusp_id) return &a;
  }
  return nullptr;
}

Rational cusp_cover_degree(const Matrix2& psi, const CuspSpec& source, const CuspSpec& target) {
  const auto idx = lattice_index(source.lattice.image(psi), target.lattice);
  return idx.ratio * Rational(target.degree) / Rational(source.degree);
}

const OrbifoldEntry& Catalog::orbifold(const std::string& id) const {
  auto it = orbifolds.find(id);
  if (it == orbifolds.end()) throw NotDeclared("orbifold '" + id + "'");
  return it->second;
}

std::string identity_covering_id(const std::string& orbifold_id) { return "id(" + orbifold_id + ")"; }

CoveringEntry identity_covering(const OrbifoldEntry& orbifold) {
  CoveringEntry c;
  c.id = identity_covering_id(orbifold.id);
  c.source = orbifold.id;
  c.target = orbifold.id;
  c.total_degree = 1;
  for (const auto& cusp : orbifold.cusps) c.cusps.push_back({cusp.id, cusp.id, Matrix2::identity()});
  return c;
}

CoveringEntry Catalog::covering(const std::string& id) const {
  const auto parts = split_composite(id);
  std::optional<CoveringEntry> acc;
  for (const auto& part : parts) {
    CoveringEntry next;
    if (part.rfind("id(", 0) == 0 && part.size() > 4 && part.back() == ')') {
      next = identity_covering(orbifold(part.substr(3, part.size() - 4)));
    } else {
      auto it = coverings.find(part);
      if (it == coverings.end()) throw NotDeclared("covering '" + part + "'");
      next = it->second;
    }
    acc = acc ? compose_coverings(*acc, next) : next;
  }
  return *acc;
}

void Catalog::merge(const Catalog& fragment) {
  for (const auto& [k, v] : fragment.orbifolds) orbifolds[k] = v;
  for (const auto& [k, v] : fragment.coverings) coverings[k] = v;
}

CoveringEntry compose_coverings(const CoveringEntry& first, const CoveringEntry& second) {
  if (first.target != second.source) {
    throw MismatchedEnds("covering '" + first.id + "' ends at '" + first.target +
                         "' but '" + second.id + "' starts at '" + second.source + "'");
  }
  // Identities are neutral so composing with them keeps the original id.
  if (second.id == identity_covering_id(second.source)) return first;
  if (first.id == identity_covering_id(first.source)) return second;
  CoveringEntry out;
  out.id = first.id + ";" + second.id;
  out.source = first.source;
  out.target = second.target;
  out.total_degree = first.total_degree * second.total_degree;
  for (const auto& a : first.cusps) {
    const CuspAssignment* b = second.for_source(a.target_cusp);
    if (b == nullptr) {
      throw MismatchedEnds("cusp '" + a.target_cusp + "' of '" + first.target +
                           "' is not assigned by '" + second.id + "'");
    }
    out.cusps.push_back({a.source_cusp, b->target_cusp, b->psi * a.psi});
  }
  return out;
}

Report validate_covering(const Catalog& cat, const CoveringEntry& cov) {
  Report r;
  const std::string subject = "covering " + cov.id;
  if (!cat.has_orbifold(cov.source)) {
    r.add(subject, "unresolved", "source orbifold '" + cov.source + "' is not declared");
  }
  if (!cat.has_orbifold(cov.target)) {
    r.add(subject, "unresolved", "target orbifold '" + cov.target + "' is not declared");
  }
  if (!r.ok()) return r;
  const auto& src = cat.orbifold(cov.source);
  const auto& tgt = cat.orbifold(cov.target);
  if (cov.total_degree <= 0) {
    r.add(subject, "degree", "total degree " + std::to_string(cov.total_degree) + " is not positive");
  }

  std::map<std::string, Rational> per_target;
  for (const auto& c : tgt.cusps) per_target[c.id] = Rational(0);
  std::set<std::string> seen;
  for (const auto& a : cov.cusps) {
    const std::string where = subject + " cusp " + a.source_cusp;
    if (!seen.insert(a.source_cusp).second) {
      r.add(where, "assignment", "source cusp assigned more than once");
      continue;
    }
    const CuspSpec* sc = src.cusp(a.source_cusp);
    const CuspSpec* tc = tgt.cusp(a.target_cusp);
    if (sc == nullptr) {
      r.add(where, "assignment", "no such cusp on '" + src.id + "'");
      continue;
    }
    if (tc == nullptr) {
      r.add(where, "assignment", "target cusp '" + a.target_cusp + "' not on '" + tgt.id + "'");
      continue;
    }
    if (a.psi.det().sign() <= 0) {
      r.add(where, "orientation", "det(psi) = " + a.psi.det().str() + " is not positive");
      continue;
    }
    if (!tc->lattice.contains(sc->lattice.image(a.psi))) {
      r.add(where, "lattice", "psi " + a.psi.str() + " does not carry " + sc->lattice.str() +
                                  " into " + tc->lattice.str());
      continue;
    }
    if (!conjugates_into(a.psi, sc->symmetry, tc->symmetry)) {
      r.add(where, "symmetry", "psi does not conjugate the order-" +
                                   std::to_string(sc->symmetry.order) + " group into the order-" +
                                   std::to_string(tc->symmetry.order) + " group");
      continue;
    }
    per_target[tc->id] += cusp_cover_degree(a.psi, *sc, *tc);
  }
  for (const auto& c : src.cusps) {
    if (!seen.count(c.id)) r.add(subject + " cusp " + c.id, "assignment", "source cusp not assigned");
  }
  if (r.ok()) {
    for (const auto& [cusp, sum] : per_target) {
      if (sum != Rational(cov.total_degree)) {
        r.add(subject + " target cusp " + cusp, "degree_sum",
              "cusp degrees sum to " + sum.str() + " but total degree is " +
                  std::to_string(cov.total_degree));
      }
    }
  }
  return r;
}

Report validate_catalog(const Catalog& cat) {
  Report r;
  for (const auto& [id, orb] : cat.orbifolds) {
    const std::string subject = "orbifold " + id;
    if (orb.id != id) r.add(subject, "id", "entry id '" + orb.id + "' differs from its key");
    if (id.find(';') != std::string::npos || id.rfind("id(", 0) == 0) {
      r.add(subject, "id", "reserved characters in id");
    }
    std::set<std::string> cusp_ids;
    for (const auto& c : orb.cusps) {
      const std::string where = subject + " cusp " + c.id;
      if (!cusp_ids.insert(c.id).second) r.add(where, "cusp_ids", "duplicate cusp id");
      if (!allowed_degree(c.degree)) {
        r.add(where, "degree", "degree " + std::to_string(c.degree) + " not in {1,2,3,4,6}");
      }
      if (c.symmetry.order != c.degree) {
        r.add(where, "symmetry", "symmetry order " + std::to_string(c.symmetry.order) +
                                     " differs from degree " + std::to_string(c.degree));
      }
      if (auto defect = symmetry_defect(c.symmetry, c.lattice)) r.add(where, "symmetry", *defect);
    }
    for (const auto& q : orb.minimal_quotients) {
      const std::string where = subject + " quotient " + q.covering;
      bool targets_ok = q.targets.size() == orb.cusps.size();
      for (const auto& c : orb.cusps) {
        auto it = q.targets.find(c.id);
        if (it == q.targets.end() || !allowed_degree(it->second) || it->second % c.degree != 0) {
          targets_ok = false;
        }
      }
      if (!targets_ok) {
        r.add(where, "targets", "targets must assign each cusp a multiple of its degree in {1,2,3,4,6}");
        continue;
      }
      if (orb.is_minimal && q.targets == orb.own_degrees() &&
          q.covering != identity_covering_id(orb.id)) {
        r.add(where, "minimal", "a minimal orbifold's own-degree quotient must be the identity");
      }
      CoveringEntry cov;
      try {
        cov = cat.covering(q.covering);
      } catch (const NotDeclared& e) {
        r.add(where, "unresolved", e.what());
        continue;
      }
      if (cov.source != id) r.add(where, "quotient", "covering does not start at '" + id + "'");
      if (!cat.has_orbifold(cov.target)) continue;
      const auto& tgt = cat.orbifold(cov.target);
      if (!tgt.is_minimal) r.add(where, "quotient", "target '" + tgt.id + "' is not minimal");
      if (tgt.cusps.size() != orb.cusps.size()) {
        r.add(where, "quotient", "minimal quotient must keep the number of cusps");
      }
      for (const auto& a : cov.cusps) {
        const CuspSpec* tc = tgt.cusp(a.target_cusp);
        auto it = q.targets.find(a.source_cusp);
        if (tc != nullptr && it != q.targets.end() && it->second % tc->degree != 0) {
          r.add(where, "targets", "quotient cusp '" + tc->id + "' has degree " +
                                      std::to_string(tc->degree) + " not dividing target " +
                                      std::to_string(it->second));
        }
      }
    }
  }
  for (const auto& [id, cov] : cat.coverings) {
    if (cov.id != id) r.add("covering " + id, "id", "entry id '" + cov.id + "' differs from its key");
    if (id.find(';') != std::string::npos || id.rfind("id(", 0) == 0) {
      r.add("covering " + id, "id", "reserved characters in id");
    }
    r.append(validate_covering(cat, cov));
  }
  return r;
}

CoveringEntry minimal_quotient_of(const Catalog& cat, const std::string& orbifold_id,
                                  const std::map<std::string, int>& targets) {
  const auto& orb = cat.orbifold(orbifold_id);
  for (const auto& c : orb.cusps) {
    auto it = targets.find(c.id);
    if (it == targets.end()) throw InvalidTarget("no target for cusp '" + c.id + "'");
    if (!allowed_degree(it->second)) {
      throw InvalidTarget("target " + std::to_string(it->second) + " for cusp '" + c.id +
                          "' not in {1,2,3,4,6}");
    }
    if (it->second % c.degree != 0) {
      throw InvalidTarget("target " + std::to_string(it->second) + " for cusp '" + c.id +
                          "' is not a multiple of its degree " + std::to_string(c.degree));
    }
  }
  if (targets.size() != orb.cusps.size()) throw InvalidTarget("targets name unknown cusps");
  for (const auto& q : orb.minimal_quotients) {
    if (q.targets == targets) return cat.covering(q.covering);
  }
  if (orb.is_minimal && targets == orb.own_degrees()) return identity_covering(orb);
  throw NotDeclared("no minimal quotient of '" + orbifold_id + "' declared for these targets");
}

}  // namespace qigraph
