#include "hdx/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hdx {

std::string value_text(const PartiteDistribution& mu, Value v) {
  if (mu.universe()) {
    if (const Subspace* s = mu.universe()->subspace(v)) return s->encode();
    return mu.universe()->label(v);
  }
  return std::to_string(v);
}

json to_json(const PartiteDistribution& mu) {
  if (!mu.is_explicit()) throw std::invalid_argument("to_json: sampler-backed distributions are not serializable");
  json j;
  j["labels"] = mu.labels();
  json rows = json::array();
  for (size_t i = 0; i < mu.size(); ++i) {
    json row = json::array();
    for (Value v : mu.tuple(i)) row.push_back(value_text(mu, v));
    rows.push_back(row);
  }
  j["tuples"] = rows;
  j["weights"] = mu.weights();
  return j;
}

json graph_summary(const WeightedGraph& g) {
  json parts = json::array();
  for (int p = 0; p < g.num_parts(); ++p)
    parts.push_back({{"coords", g.part_coords(p)}, {"vertices", g.vertices_in_part(p).size()}});
  return {{"parts", parts},
          {"vertices", g.num_vertices()},
          {"edges", g.edges().size()},
          {"triangles", g.triangles().size()}};
}

json to_json(const UGInstance& inst) {
  const WeightedGraph& g = inst.graph();
  json verts = json::array();
  for (int v = 0; v < g.num_vertices(); ++v) verts.push_back(g.vertex_name(v));
  json edges = json::array();
  for (size_t e = 0; e < g.edges().size(); ++e)
    edges.push_back({{"u", g.edges()[e].u},
                     {"v", g.edges()[e].v},
                     {"w", g.edges()[e].w},
                     {"pi", inst.constraint(static_cast<int>(e)).images()}});
  return {{"m", inst.alphabet()}, {"vertices", verts}, {"edges", edges}};
}

json to_json(const Assignment& a) {
  json j = json::array();
  for (const auto& p : a) j.push_back(p.images());
  return j;
}

json to_json(const SpectralReport& r) {
  return {{"op", r.op},         {"sigma1", r.sigma1}, {"sigma2", r.sigma2},
          {"gap", r.gap},       {"method", r.method}, {"tolerance", r.tolerance}};
}

json to_json(const AuditResult& r) {
  return {{"epsilon", r.epsilon},
          {"condition_labels", r.condition_labels},
          {"condition_value", r.condition_value},
          {"label_i", r.label_i},
          {"label_j", r.label_j},
          {"conditionals", r.conditionals}};
}

json to_json(const EventStats& e) {
  return {{"event1", e.event1},       {"event2", e.event2},          {"event3", e.event3},
          {"uncovered", e.uncovered}, {"lifted_viol", e.lifted_viol}, {"event_sum", e.sum()}};
}

json to_json(const LevelReport& r) {
  return {{"depth", r.depth},
          {"nodes", r.nodes},
          {"apex_cases", r.apex_cases},
          {"brute_cases", r.brute_cases},
          {"base_cases", r.base_cases},
          {"recursive_cases", r.recursive_cases},
          {"restrictions", r.restrictions},
          {"pivots", r.pivots},
          {"mean_sub_viol", r.mean_sub_viol},
          {"mean_alignment_disagreement", r.mean_alignment_disagreement},
          {"mean_h_incons", r.mean_h_incons},
          {"mean_h_viol", r.mean_h_viol},
          {"mean_lifted_viol", r.mean_lifted_viol},
          {"mean_events", to_json(r.mean_events)},
          {"not_bad_triangles", r.not_bad_triangles},
          {"not_bad_inconsistent", r.not_bad_inconsistent}};
}

json to_json(const LiftReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) levels.push_back(to_json(l));
  json j = {{"mode", lift_mode_name(r.mode_used)},
            {"viol", r.viol},
            {"nodes", r.nodes},
            {"top_recursive", r.top_recursive},
            {"top_events", to_json(r.top_events)},
            {"levels", levels}};
  if (!r.chosen_triple.empty()) {
    j["chosen_triple"] = r.chosen_triple;
    j["triples_sampled"] = r.triples_sampled;
    j["triples_accepted"] = r.triples_accepted;
    j["chosen_h_incons"] = r.chosen_h_incons;
  }
  return j;
}

std::string hex_bits(uint64_t bits, int k) {
  const int digits = std::max(1, (k + 3) / 4);
  std::string s(digits, '0');
  for (int i = digits - 1; i >= 0; --i, bits >>= 4) s[i] = "0123456789abcdef"[bits & 15];
  return s;
}

uint64_t parse_hex_bits(const std::string& s) { return std::stoull(s, nullptr, 16); }

json to_json(const DPTable& t) {
  json faces = json::array();
  json bits = json::array();
  for (size_t i = 0; i < t.bits.size(); ++i) {
    faces.push_back(t.faces->faces[i]);
    bits.push_back(hex_bits(t.bits[i], t.k));
  }
  return {{"k", t.k}, {"faces", faces}, {"bits", bits}};
}

json default_config() {
  return json::parse(R"({
    "seed": 1,
    "out": "out",
    "jobs": 1,
    "building": {
      "type": "A",
      "d": 3,
      "q": 2,
      "n": 5,
      "k": 3,
      "dims": [1, 2, 3],
      "copies": 1,
      "budget": 5000000.0,
      "mode": "auto"
    },
    "spectra": {
      "ops": ["bipartite"],
      "pairs": [[1, 2]],
      "parts": [[1], [2], [3]],
      "budget": 5000000.0
    },
    "ug": {
      "m": 2,
      "deltas": [0.0, 0.02, 0.05],
      "seeds": 3,
      "solvers": ["tree"],
      "parts": [[1], [2], [3]],
      "brute_budget": 50000000.0,
      "cones_trials": 10
    },
    "lift": {
      "mode": "easy",
      "block_k": 1,
      "base_threshold": 12,
      "base_max_m": 3,
      "max_depth": 64,
      "triples_tried": 64,
      "lift_samples": 8,
      "parts": [[1], [2], [3]],
      "r": 0,
      "m": 2,
      "deltas": [0.0],
      "seeds": 1
    },
    "dpt": {
      "source": "complete",
      "n": 20,
      "d": 12,
      "k": 9,
      "t": 0,
      "samples": 100000,
      "mode": "auto",
      "models": ["iid-bit-flip"],
      "rates": [0.0, 0.1],
      "eps": 0.3,
      "seeds": 1
    }
  })");
}

namespace {

void merge_into(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw std::invalid_argument("config: " + (path.empty() ? std::string("root") : path) + " must be a table");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw std::invalid_argument("config: unknown key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_into(slot, it.value(), key);
      continue;
    }
    const bool numeric = slot.is_number() && it.value().is_number();
    if (!numeric && slot.type() != it.value().type())
      throw std::invalid_argument("config: key '" + key + "' has the wrong type");
    slot = slot.is_number_float() && it.value().is_number() ? json(it.value().get<double>()) : it.value();
  }
}

}  // namespace

json merge_config(const json& user) {
  json c = default_config();
  merge_into(c, user, "");
  return c;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json user;
  try {
    user = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: parse error: ") + e.what());
  }
  return merge_config(user);
}

std::string config_hash(const json& config) {
  json c = config;
  c.erase("seed");
  c.erase("out");
  c.erase("jobs");
  const std::string s = c.dump();
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out += f;
    } else {
      out += '"';
      for (char c : f) out += c == '"' ? std::string("\"\"") : std::string(1, c);
      out += '"';
    }
  }
  return out + "\n";
}

}  // namespace hdx
