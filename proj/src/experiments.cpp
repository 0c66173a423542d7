#include "hdx/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include "hdx/buildings.hpp"
#include "hdx/cones.hpp"
#include "hdx/dpt.hpp"
#include "hdx/errors.hpp"
#include "hdx/lift.hpp"
#include "hdx/spectral.hpp"
#include "hdx/ug.hpp"

namespace hdx {

namespace {

BuildMode parse_build_mode(const std::string& s) {
  if (s == "auto") return BuildMode::Auto;
  if (s == "explicit") return BuildMode::Explicit;
  if (s == "sampler") return BuildMode::Sampler;
  throw std::invalid_argument("building.mode must be auto, explicit or sampler");
}

std::string join(const std::vector<int>& v, const char* sep = ";") {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::vector<int>> int_lists(const json& j) { return j.get<std::vector<std::vector<int>>>(); }

uint64_t seed_of(const json& config) { return config.at("seed").get<uint64_t>(); }

}  // namespace

Built build_from_config(const json& b, Rng& rng) {
  (void)rng;
  Built out;
  const std::string type = b.at("type");
  const int d = b.at("d"), q = b.at("q"), n = b.at("n"), k = b.at("k"), copies = b.at("copies");
  const double budget = b.at("budget");
  BuildOptions opts;
  opts.budget = budget;
  opts.mode = parse_build_mode(b.at("mode"));
  out.family = type;
  if (type == "A" || type == "C") {
    if (copies < 1) throw std::invalid_argument("building.copies must be >= 1");
    auto make = [&] { return type == "A" ? sb_type_a(d, q, opts) : sb_type_c(d, q, opts); };
    PartiteDistribution mu = make();
    for (int c = 1; c < copies; ++c) mu = tensor(mu, make());
    out.params = "d=" + std::to_string(d) + ";q=" + std::to_string(q) + ";copies=" + std::to_string(copies);
    if (mu.is_explicit()) out.complex = std::make_shared<SimplicialComplex>(SimplicialComplex::from_distribution(mu));
    out.mu = std::move(mu);
  } else if (type == "complete") {
    out.params = "n=" + std::to_string(n) + ";d=" + std::to_string(d);
    out.complex = std::make_shared<SimplicialComplex>(complete_complex(n, d));
  } else if (type == "grassmann" || type == "symplectic") {
    const auto dims = b.at("dims").get<std::vector<int>>();
    if (dims.size() != 3) throw std::invalid_argument("building.dims must list three dimensions");
    out.params = "d=" + std::to_string(d) + ";q=" + std::to_string(q) + ";dims=" + join(dims);
    out.graph = type == "grassmann" ? grassmann_tripartite(d, q, dims[0], dims[1], dims[2], budget)
                                    : symplectic_tripartite(d, q, dims[0], dims[1], dims[2], budget);
  } else if (type == "johnson") {
    out.params = "n=" + std::to_string(n) + ";k=" + std::to_string(k);
    out.graph = johnson_graph(n, k);
  } else {
    throw std::invalid_argument("building.type must be A, C, complete, grassmann, symplectic or johnson");
  }
  return out;
}

std::vector<std::string> run_ordered(size_t n, int jobs, const std::function<std::string(size_t)>& task) {
  std::vector<std::string> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

void write_outputs(const std::string& dir, const Outputs& outputs) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : outputs) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name);
    f << content;
  }
}

Outputs cmd_build(const json& config) {
  Rng rng = make_rng(seed_of(config), 0);
  Built built = build_from_config(config.at("building"), rng);
  const std::string hash = config_hash(config);
  json summary = {{"family", built.family}, {"params", built.params}, {"config_hash", hash}, {"seed", seed_of(config)}};
  std::string tuples = "", vertices = "", edges = "", triangles = "", top = "";
  Outputs out;
  if (built.mu) {
    summary["explicit"] = built.mu->is_explicit();
    if (built.mu->is_explicit()) {
      tuples = std::to_string(built.mu->size());
      summary["tuples"] = built.mu->size();
      if (built.mu->size() <= 100000) out["distribution.json"] = to_json(*built.mu).dump(1) + "\n";
    }
  }
  if (built.complex) {
    top = std::to_string(built.complex->num_top());
    summary["top_faces"] = built.complex->num_top();
    summary["complex_vertices"] = built.complex->num_vertices();
  }
  if (built.graph) {
    vertices = std::to_string(built.graph->num_vertices());
    edges = std::to_string(built.graph->edges().size());
    triangles = std::to_string(built.graph->triangles().size());
    summary["graph"] = graph_summary(*built.graph);
  }
  out["build.json"] = summary.dump(1) + "\n";
  out["build.csv"] =
      csv_line({"config_hash", "seed", "family", "params", "tuples", "top_faces", "vertices", "edges", "triangles"}) +
      csv_line({hash, std::to_string(seed_of(config)), built.family, built.params, tuples, top, vertices, edges,
                triangles});
  return out;
}

Outputs cmd_spectra(const json& config) {
  Rng rng = make_rng(seed_of(config), 0);
  Built built = build_from_config(config.at("building"), rng);
  const json& sc = config.at("spectra");
  const std::string hash = config_hash(config), seed = std::to_string(seed_of(config));
  const double budget = sc.at("budget");
  std::vector<std::pair<std::string, std::string>> rows;  // (sort key, line)
  auto add = [&](const std::string& op, const std::string& params, const SpectralReport& r) {
    rows.push_back({op + "|" + params,
                    csv_line({hash, seed, built.family, built.params, op, params, fmt_double(r.sigma1),
                              fmt_double(r.sigma2), fmt_double(r.gap), r.method, fmt_double(r.tolerance)})});
  };
  auto need_mu = [&](const std::string& op) -> const PartiteDistribution& {
    if (!built.mu) throw std::invalid_argument("spectra: op '" + op + "' needs a distribution building");
    return *built.mu;
  };
  auto need_complex = [&](const std::string& op) -> const SimplicialComplex& {
    if (!built.complex) throw std::invalid_argument("spectra: op '" + op + "' needs an explicit complex");
    return *built.complex;
  };
  for (const std::string op : sc.at("ops")) {
    if (op == "bipartite") {
      for (const auto& pr : int_lists(sc.at("pairs"))) {
        if (pr.size() != 2) throw std::invalid_argument("spectra.pairs entries must have two labels");
        WeightedGraph g = bipartite_graph(need_mu(op), {pr[0]}, {pr[1]});
        SpectralReport r = bipartite_spectrum(g);
        add(op, join(pr), r);
      }
    } else if (op == "tripartite") {
      SpectralReport r;
      std::string params;
      if (built.graph) {
        r.sigma2 = tripartite_second_singular(*built.graph);
        params = "graph";
      } else {
        auto parts = int_lists(sc.at("parts"));
        if (parts.size() != 3) throw std::invalid_argument("spectra.parts must list three coordinate sets");
        r.sigma2 = tripartite_second_singular(tripartite_graph(need_mu(op), parts[0], parts[1], parts[2]));
        params = join(parts[0], " ") + ";" + join(parts[1], " ") + ";" + join(parts[2], " ");
      }
      r.op = op;
      r.sigma1 = 1;
      r.gap = 1 - r.sigma2;
      r.method = "auto";
      add(op, params, r);
    } else if (op == "audit") {
      AuditResult a = epsilon_product_audit(need_mu(op), budget);
      SpectralReport r{op, 1, a.epsilon, 1 - a.epsilon, "dense", 0};
      add(op, "argmax=" + std::to_string(a.label_i) + ";" + std::to_string(a.label_j), r);
    } else if (op == "local") {
      double g = local_spectral_audit(need_complex(op), budget);
      add(op, "", SpectralReport{op, 1, g, 1 - g, "auto", 0});
    } else if (op == "trickling") {
      TricklingReport t = trickling_down_bound(need_complex(op));
      add(op, "link_lambda=" + fmt_double(t.link_lambda) + ";bound=" + fmt_double(t.bound),
          SpectralReport{op, 1, t.measured_gamma, 1 - t.measured_gamma, "auto", 0});
    } else if (op == "walk") {
      if (!built.graph) throw std::invalid_argument("spectra: op 'walk' needs a graph building");
      double l = walk_second_eigenvalue(*built.graph);
      add(op, "", SpectralReport{op, 1, l, 1 - l, "auto", 0});
    } else {
      throw std::invalid_argument("spectra: unknown op '" + op + "'");
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string csv = csv_line(
      {"config_hash", "seed", "family", "params", "op", "op_params", "sigma1", "sigma2", "gap", "method", "tolerance"});
  for (const auto& r : rows) csv += r.second;
  return {{"spectra.csv", csv}};
}

namespace {

WeightedGraph ug_graph(const Built& built, const std::vector<std::vector<int>>& parts) {
  if (built.graph) return *built.graph;
  if (!built.mu) throw std::invalid_argument("ug: building provides neither a graph nor a distribution");
  if (parts.size() != 3) throw std::invalid_argument("parts must list three coordinate sets");
  return tripartite_graph(*built.mu, parts[0], parts[1], parts[2]);
}

LiftParams lift_params(const json& lc) {
  LiftParams p;
  const std::string mode = lc.at("mode");
  if (mode != "easy" && mode != "exp") throw std::invalid_argument("lift.mode must be easy or exp");
  p.mode = mode == "easy" ? LiftMode::Easy : LiftMode::Exp;
  p.block_k = lc.at("block_k");
  p.base_threshold = lc.at("base_threshold");
  p.base_max_m = lc.at("base_max_m");
  p.max_depth = lc.at("max_depth");
  p.triples_tried = lc.at("triples_tried");
  p.lift_samples = lc.at("lift_samples");
  return p;
}

}  // namespace

Outputs cmd_ug(const json& config) {
  const uint64_t seed = seed_of(config);
  Rng rng = make_rng(seed, 0);
  Built built = build_from_config(config.at("building"), rng);
  const json& uc = config.at("ug");
  const int m = uc.at("m");
  if (m < 1 || m > kMaxAlphabet) throw std::invalid_argument("ug.m must lie in [1, 8]");
  WeightedGraph graph = ug_graph(built, int_lists(uc.at("parts")));
  const auto deltas = uc.at("deltas").get<std::vector<double>>();
  const int seeds = uc.at("seeds");
  const auto solvers = uc.at("solvers").get<std::vector<std::string>>();
  const double brute_budget = uc.at("brute_budget");
  const int cones_trials = uc.at("cones_trials");
  const std::string hash = config_hash(config);
  const LiftParams lp = lift_params(config.at("lift"));

  const size_t tasks = deltas.size() * static_cast<size_t>(std::max(0, seeds));
  auto task = [&](size_t idx) {
    const double delta = deltas[idx / seeds];
    const int trial = static_cast<int>(idx % seeds);
    Rng r = make_rng(seed, idx + 1);
    Assignment planted = random_assignment(graph.num_vertices(), m, r);
    UGInstance inst = plant(graph, planted, delta, r);
    const double inc = incons(inst);
    std::string rows;
    auto row = [&](const std::string& solver, double v, const std::string& gv, const std::string& ge,
                   const std::string& witness) {
      rows += csv_line({hash, std::to_string(seed), built.family, built.params, fmt_double(delta),
                        std::to_string(trial), solver, fmt_double(inc), fmt_double(v), fmt_double(1 - v), gv, ge,
                        witness});
    };
    for (const auto& s : solvers) {
      if (s == "tree") {
        TreeResult t = tree_propagate_solve(inst);
        double v = t.assignment ? viol(inst, *t.assignment) : viol(inst, forest_propagate(inst));
        row(s, v, "", "", t.witness ? "1" : "0");
      } else if (s == "brute") {
        row(s, viol(inst, brute_force_solve(inst, brute_budget).assignment), "", "", "");
      } else if (s == "cones") {
        if (built.family != "grassmann" && built.family != "symplectic")
          throw std::invalid_argument("ug: cones solver needs a grassmann or symplectic building");
        const bool gr = built.family == "grassmann";
        const auto dims = config.at("building").at("dims").get<std::vector<int>>();
        const int base_part = gr && (dims[2] - dims[1] <= dims[1] - dims[0]) ? 2 : 1;
        auto cand = graph.vertices_in_part(base_part);
        int base = cand[uniform_int(r, static_cast<int>(cand.size()))];
        PathTable pt = gr ? build_paths_gr(graph, build_block_decomposition_gr(graph, base, r))
                          : build_paths_symp(graph, base, r);
        ConesResult cr = cones_solve(inst, pt, gr ? ConesFamily::Grassmann : ConesFamily::Symplectic, cones_trials, r);
        row(s, cr.best_viol, fmt_double(pt.good_vertex_fraction), fmt_double(pt.good_edge_fraction), "");
        row("cones-mean", cr.mean_viol, fmt_double(pt.good_vertex_fraction), fmt_double(pt.good_edge_fraction), "");
      } else if (s == "johnson") {
        if (built.family != "johnson") throw std::invalid_argument("ug: johnson solver needs a johnson building");
        row(s, viol(inst, johnson_propagate(inst, config.at("building").at("n"), r)), "", "", "");
      } else if (s == "lift") {
        row(s, solve_tripartite(inst, lp, r).viol, "", "", "");
      } else {
        throw std::invalid_argument("ug: unknown solver '" + s + "'");
      }
    }
    return rows;
  };
  auto rows = run_ordered(tasks, config.at("jobs"), task);
  std::string csv = csv_line({"config_hash", "seed", "family", "params", "delta", "trial", "solver", "incons", "viol",
                              "value", "good_vertex_frac", "good_edge_frac", "witness"});
  for (const auto& r : rows) csv += r;
  return {{"ug.csv", csv}};
}

Outputs cmd_lift(const json& config) {
  const uint64_t seed = seed_of(config);
  Rng rng = make_rng(seed, 0);
  Built built = build_from_config(config.at("building"), rng);
  if (!built.mu || !built.mu->is_explicit()) throw std::invalid_argument("lift: needs an explicit distribution building");
  const json& lc = config.at("lift");
  const LiftParams lp = lift_params(lc);
  const int m = lc.at("m"), r = lc.at("r"), seeds = lc.at("seeds");
  if (m < 1 || m > kMaxAlphabet) throw std::invalid_argument("lift.m must lie in [1, 8]");
  WeightedGraph graph = r > 0 ? partite_graph_G_r(*built.mu, r, 0, rng) : ug_graph(built, int_lists(lc.at("parts")));
  const auto deltas = lc.at("deltas").get<std::vector<double>>();
  const std::string hash = config_hash(config);
  const size_t tasks = deltas.size() * static_cast<size_t>(std::max(0, seeds));
  auto task = [&](size_t idx) {
    const double delta = deltas[idx / seeds];
    const int trial = static_cast<int>(idx % seeds);
    Rng rr = make_rng(seed, idx + 1);
    UGInstance inst = plant(graph, random_assignment(graph.num_vertices(), m, rr), delta, rr);
    LiftResult res = r > 0 ? solve_partite(inst, lp, rr) : solve_tripartite(inst, lp, rr);
    const EventStats& e = res.report.top_events;
    std::string line = csv_line({hash, std::to_string(seed), fmt_double(delta), std::to_string(trial),
                                 lift_mode_name(res.report.mode_used), fmt_double(incons(inst)), fmt_double(res.viol),
                                 fmt_double(e.event1), fmt_double(e.event2), fmt_double(e.event3),
                                 fmt_double(e.uncovered), fmt_double(e.sum()), std::to_string(res.report.nodes)});
    json rep = {{"delta", delta}, {"trial", trial}, {"report", to_json(res.report)}};
    return line + '\x1f' + rep.dump();
  };
  auto results = run_ordered(tasks, config.at("jobs"), task);
  std::string csv = csv_line({"config_hash", "seed", "delta", "trial", "mode", "incons", "viol", "event1", "event2",
                              "event3", "uncovered", "event_sum", "nodes"});
  json reports = json::array();
  for (const auto& s : results) {
    size_t cut = s.find('\x1f');
    csv += s.substr(0, cut);
    reports.push_back(json::parse(s.substr(cut + 1)));
  }
  json doc = {{"config_hash", hash}, {"seed", seed}, {"runs", reports}};
  return {{"lift.csv", csv}, {"lift_reports.json", doc.dump(1) + "\n"}};
}

Outputs cmd_dpt(const json& config) {
  const uint64_t seed = seed_of(config);
  Rng rng = make_rng(seed, 0);
  const json& dc = config.at("dpt");
  std::shared_ptr<const SimplicialComplex> x;
  std::string family;
  if (dc.at("source") == "complete") {
    x = std::make_shared<SimplicialComplex>(complete_complex(dc.at("n"), dc.at("d")));
    family = "complete";
  } else if (dc.at("source") == "building") {
    Built built = build_from_config(config.at("building"), rng);
    if (!built.complex) throw std::invalid_argument("dpt: building has no explicit complex");
    x = built.complex;
    family = built.family;
  } else {
    throw std::invalid_argument("dpt.source must be complete or building");
  }
  const int k = dc.at("k");
  const int t = dc.at("t").get<int>() > 0 ? dc.at("t").get<int>() : default_query_size(k);
  const long samples = dc.at("samples");
  const std::string mode_s = dc.at("mode");
  TesterMode mode = mode_s == "auto"   ? TesterMode::Auto
                    : mode_s == "exact" ? TesterMode::Exact
                    : mode_s == "mc"    ? TesterMode::MonteCarlo
                                        : throw std::invalid_argument("dpt.mode must be auto, exact or mc");
  const auto models = dc.at("models").get<std::vector<std::string>>();
  for (const auto& mname : models) parse_corruption(mname);
  const auto rates = dc.at("rates").get<std::vector<double>>();
  const double eps = dc.at("eps");
  const int seeds = dc.at("seeds");
  const std::string hash = config_hash(config);
  // One shared face level; encode_like reuses it across rows.
  Rng base_rng = make_rng(seed, 1);
  DPTable base = encode(std::vector<int>(x->num_vertices(), 0), x, k);
  const size_t per_seed = models.size() * rates.size();
  auto task = [&](size_t idx) {
    const int trial = static_cast<int>(idx / per_seed);
    const std::string& model = models[(idx % per_seed) / rates.size()];
    const double rate = rates[idx % rates.size()];
    Rng fr = make_rng(seed, 1000 + trial);
    std::vector<int> f(x->num_vertices());
    for (auto& b : f) b = static_cast<int>(fr() & 1);
    Rng r = make_rng(seed, idx + 2);
    DPTable table = corrupt(encode_like(f, base), parse_corruption(model), rate, r);
    TesterResult tr = run_tester(table, t, samples, r, mode);
    DecodeResult dr = decode_majority(table, eps);
    return csv_line({hash, std::to_string(seed), family, std::to_string(k), std::to_string(t), model,
                     fmt_double(rate), std::to_string(trial), std::to_string(tr.samples), fmt_double(tr.acceptance),
                     fmt_double(tr.stderr_), tr.exact ? "1" : "0", fmt_double(eps), fmt_double(dr.eta)});
  };
  auto rows = run_ordered(per_seed * static_cast<size_t>(std::max(0, seeds)), config.at("jobs"), task);
  std::string csv = csv_line({"config_hash", "seed", "family", "k", "t", "model", "rate", "trial", "samples",
                              "acceptance", "stderr", "exact", "eps", "eta"});
  for (const auto& r : rows) csv += r;
  (void)base_rng;
  return {{"dpt.csv", csv}};
}

}  // namespace hdx
