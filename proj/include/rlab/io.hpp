#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlab/echelon.hpp"
#include "rlab/families.hpp"
#include "rlab/feedback.hpp"
#include "rlab/minimality.hpp"
#include "rlab/realization.hpp"
#include "rlab/squaring.hpp"
#include "rlab/types.hpp"

namespace rlab {

// Insertion-ordered documents keep report bytes reproducible.
using Json = nlohmann::ordered_json;

inline Json to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j, const std::string& label) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InvalidInputError(label + ": expected a number or [re, im]");
}

inline Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const Json& j, const std::string& label) {
  if (!j.is_array() || j.empty())
    throw InvalidInputError(label + ": expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty())
    throw InvalidInputError(label + ": rows must be non-empty arrays");
  const Index cols = static_cast<Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw InvalidInputError(label + ": ragged rows");
    for (Index k = 0; k < cols; ++k)
      m(i, k) = complex_from_json(row[static_cast<size_t>(k)], label);
  }
  require_finite(m, label);
  return m;
}

inline Json to_json(const std::vector<Complex>& v) {
  Json out = Json::array();
  for (const Complex& z : v) out.push_back(to_json(z));
  return out;
}

inline Json to_json(const Realization& r) {
  return Json{{"A", to_json(r.A)},
              {"B", to_json(r.B)},
              {"C", to_json(r.C)},
              {"D", to_json(r.D)}};
}

inline Realization realization_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInputError("system: expected a JSON object");
  for (const char* key : {"A", "B", "C", "D"})
    if (!j.contains(key))
      throw InvalidInputError(std::string("system: missing matrix ") + key);
  Realization r{matrix_from_json(j.at("A"), "A"), matrix_from_json(j.at("B"), "B"),
                matrix_from_json(j.at("C"), "C"), matrix_from_json(j.at("D"), "D")};
  validate(r);
  return r;
}

inline Json to_json(const JordanSpec& spec) {
  Json out = Json::array();
  for (const JordanGroup& g : spec.groups) {
    Json blocks = Json::array();
    for (Index s : g.block_sizes) blocks.push_back(s);
    out.push_back(Json{{"eig", to_json(g.eigenvalue)}, {"blocks", std::move(blocks)}});
  }
  return out;
}

inline JordanSpec jordan_spec_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInputError("jordan: expected an array of groups");
  JordanSpec spec;
  for (const Json& g : j) {
    if (!g.is_object() || !g.contains("eig") || !g.contains("blocks"))
      throw InvalidInputError("jordan: each group needs \"eig\" and \"blocks\"");
    JordanGroup group;
    group.eigenvalue = complex_from_json(g.at("eig"), "jordan eig");
    if (!g.at("blocks").is_array())
      throw InvalidInputError("jordan: \"blocks\" must be an array");
    for (const Json& b : g.at("blocks")) {
      if (!b.is_number_integer())
        throw InvalidInputError("jordan: block sizes must be integers");
      group.block_sizes.push_back(b.get<Index>());
    }
    spec.groups.push_back(std::move(group));
  }
  validate(spec);
  return spec;
}

inline Json to_json(const RowSpec& spec) {
  Json out = Json::array();
  for (const RowSpecBlock& b : spec.blocks) {
    Json rows = Json::array();
    for (Index r : b.rows) rows.push_back(r);
    out.push_back(Json{{"height", b.height}, {"rows", std::move(rows)}});
  }
  return out;
}

inline Json to_json(const Spectrum& s) {
  return Json{{"values", to_json(s.values)},
              {"source_dim", s.source_dim},
              {"scale", s.scale}};
}

inline Json to_json(const EigenClusters& c) {
  Json clusters = Json::array();
  for (const EigenCluster& cl : c.clusters)
    clusters.push_back(Json{{"representative", to_json(cl.representative)},
                            {"algebraic", cl.algebraic},
                            {"geometric", cl.geometric},
                            {"diameter", cl.diameter}});
  return Json{{"clusters", std::move(clusters)},
              {"radius", c.radius},
              {"ill_conditioned", c.ill_conditioned}};
}

inline Json to_json(const MinimalityVerdict& v) {
  Json out{{"controllable", v.controllable},
           {"observable", v.observable},
           {"minimal", v.minimal},
           {"controllability_margin", v.controllability_margin},
           {"observability_margin", v.observability_margin}};
  out["uncontrollable_witness"] =
      v.uncontrollable_witness ? to_json(*v.uncontrollable_witness) : Json();
  out["unobservable_witness"] =
      v.unobservable_witness ? to_json(*v.unobservable_witness) : Json();
  return out;
}

inline Json to_json(const RankFormulaResult& r) {
  return Json{{"lhs", r.lhs},
              {"rhs", r.rhs},
              {"holds", r.holds},
              {"minimizer", to_json(r.minimizer)}};
}

inline Json to_json(const SquaringTransform& t) {
  return Json{{"T_b", to_json(t.T_b)}, {"T_c", to_json(t.T_c)}, {"alpha", t.alpha}};
}

inline Json to_json(const FeedbackSearch& f) {
  Json out{{"found", f.found}, {"attempts", f.attempts}};
  out["eta"] = f.found ? Json(f.eta) : Json();
  out["K"] = f.found ? to_json(f.K) : Json();
  return out;
}

inline Json to_json(const CompletionAttempt& a) {
  return Json{{"lambda", to_json(a.lambda)},
              {"epsilon", a.epsilon},
              {"D", to_json(a.D)},
              {"cleared", a.cleared},
              {"distance", a.distance},
              {"threshold", a.threshold},
              {"completed_spectrum", to_json(a.completed_spectrum)}};
}

inline Json to_json(const CriterionCompletions& c) {
  Json per = Json::array();
  for (const CompletionAttempt& a : c.per_lambda) per.push_back(to_json(a));
  return Json{{"holds", c.holds},
              {"epsilon", c.epsilon},
              {"per_lambda", std::move(per)},
              {"literal_intersection", to_json(c.literal_intersection)}};
}

inline Json to_json(const CriteriaReport& r) {
  Json crit_ii{{"holds", r.crit_ii.holds}};
  crit_ii["eta"] = r.crit_ii.eta ? Json(*r.crit_ii.eta) : Json();
  crit_ii["K"] = r.crit_ii.K ? to_json(*r.crit_ii.K) : Json();
  Json crit_iv{{"completions_cleared", r.crit_iv.completions_cleared},
               {"holds_on_samples", r.crit_iv.holds_on_samples},
               {"samples", r.crit_iv.samples}};
  crit_iv["persistent_lambda"] =
      r.crit_iv.persistent_lambda ? to_json(*r.crit_iv.persistent_lambda) : Json();
  return Json{{"crit_i", to_json(r.crit_i)},
              {"crit_ii", std::move(crit_ii)},
              {"crit_iii", to_json(r.crit_iii)},
              {"crit_iv", std::move(crit_iv)},
              {"certified_squaring", r.certified_squaring},
              {"consistent", r.consistent}};
}

inline Json to_json(const FamilyReport& f) {
  return Json{{"psi_coeffs", to_json(f.psi_coeffs)},
              {"tilde", to_json(f.tilde)},
              {"crit_i_tilde", f.crit_i_tilde},
              {"minimal_tilde", f.minimal_tilde},
              {"minimal_L", f.minimal_L},
              {"chain_respected", f.chain_respected}};
}

inline Json to_json(const ProbeResult& p) {
  Json out{{"trials", p.stats.trials},
           {"minimal_tested", p.stats.minimal_tested},
           {"discarded_nonminimal", p.stats.discarded_nonminimal},
           {"closest_distance", p.stats.closest_distance},
           {"closest_threshold", p.stats.closest_threshold}};
  out["counterexample"] = p.counterexample ? to_json(*p.counterexample) : Json();
  return out;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open input file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InvalidInputError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace rlab
