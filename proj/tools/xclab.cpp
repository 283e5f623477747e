#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xclab/io.hpp"
#include "xclab/xclab.hpp"

using namespace xclab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Shared run state: global flags, recorded inputs, and artifacts that are
// only written once the verb has succeeded.
struct Run {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string format;
  std::string envelope;
  std::size_t alpha_cap = 22;
  std::size_t cover_limit = 200000;
  std::size_t cover_rows = 20;
  std::size_t cover_cols = 20;
  int verbosity = 0;

  json files = json::array();
  std::vector<std::pair<std::string, std::string>> pending;

  std::string read(const std::string& flag, const std::string& path) {
    auto text = io::read_file(path);
    files.push_back({{"flag", flag}, {"path", path}, {"fnv1a", io::fnv1a_hex(text)}});
    return text;
  }

  void emit(const std::string& path, std::string contents) { pending.emplace_back(path, std::move(contents)); }

  void note(const std::string& msg) const {
    if (verbosity > 0) std::cerr << "xclab: " << msg << '\n';
  }

  void validate_caps() const {
    if (alpha_cap < 1 || alpha_cap > 30) throw InputError("--alpha-cap must be in [1, 30]");
    if (cover_rows < 1 || cover_rows > 64 || cover_cols < 1 || cover_cols > 64)
      throw InputError("--cover-max-rows/--cover-max-cols must be in [1, 64]");
    if (threads < 1 || threads > 256) throw InputError("--threads must be in [1, 256]");
    if (!format.empty() && format != "json" && format != "csv" && format != "matrix-text")
      throw InputError("--format must be json, csv or matrix-text");
  }

  BoundConfig bound_config() const {
    BoundConfig cfg;
    cfg.seed = seed;
    cfg.cover_limit = cover_limit;
    cfg.cover_caps = {cover_rows, cover_cols};
    return cfg;
  }

  AlphaOptions alpha_options(const std::string& mode) const {
    AlphaOptions opt;
    if (mode == "exact")
      opt.mode = AlphaOptions::Mode::exact;
    else if (mode == "heuristic")
      opt.mode = AlphaOptions::Mode::heuristic;
    else
      throw InputError("--alpha-mode must be exact or heuristic");
    opt.cap = alpha_cap;
    opt.seed = seed;
    opt.threads = threads;
    return opt;
  }
};

struct Outcome {
  json result;
  int code = 0;
};

std::string fraction(const Rational& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::pair<std::size_t, std::size_t> parse_edge(const std::string& s) {
  std::size_t a = 0, b = 0;
  char comma = 0;
  std::istringstream is(s);
  if (!(is >> a >> comma >> b) || comma != ',' || !is.eof()) throw InputError("edge must be written as a,b: " + s);
  return {a, b};
}

std::vector<std::pair<long, long>> parse_points(const std::string& s) {
  std::vector<std::pair<long, long>> pts;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ';')) {
    long x = 0, y = 0;
    char comma = 0;
    std::istringstream ps(item);
    if (!(ps >> x >> comma >> y) || comma != ',') throw InputError("polygon vertices must be written x,y;x,y;...");
    pts.emplace_back(x, y);
  }
  return pts;
}

RowFilter parse_filter(const std::string& name) {
  if (name == "all") return {};
  if (name == "without-implied") return row_filters::without_implied;
  if (name == "odd-sets") return row_filters::odd_sets;
  if (name == "all-odd-sets") return row_filters::all_odd_sets;
  throw InputError("--filter must be all, without-implied, odd-sets or all-odd-sets");
}

SlackMatrix load_slack(Run& run, const std::string& path, const std::string& filter) {
  const auto text = run.read("--input", path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return slack_matrix(io::polytope_from_json(io::parse_json(text, path), fs::path(path).parent_path()),
                        parse_filter(filter));
  if (filter != "all") throw InputError("--filter applies only to polytope JSON input");
  return io::slack_from_text(text);
}

Polytope load_polytope(Run& run, const std::string& flag, const std::string& path) {
  return io::polytope_from_json(io::parse_json(run.read(flag, path), path), fs::path(path).parent_path());
}

std::string slack_csv(const SlackMatrix& s) {
  std::ostringstream os;
  os << "row";
  for (const auto& l : s.col_labels) os << ',' << '"' << l << '"';
  os << '\n';
  for (std::size_t i = 0; i < s.rows(); ++i) {
    os << '"' << s.row_labels[i] << '"';
    for (std::size_t j = 0; j < s.cols(); ++j) os << ',' << to_string(s.S(i, j));
    os << '\n';
  }
  return os.str();
}

json rectangles_json(const std::vector<Rectangle>& rects) {
  json a = json::array();
  for (const auto& r : rects) a.push_back(io::rectangle_to_json(r));
  return a;
}

// Ground caching: XCLAB_CACHE_DIR/ground_n<n>_t<t>.json holds the cuts as
// sorted node lists and the matchings as sorted lists of node pairs.
CutMatchingGround load_ground(Run& run, std::size_t n, std::size_t t) {
  const char* dir = std::getenv("XCLAB_CACHE_DIR");
  if (!dir || !*dir) return CutMatchingGround::materialize(n, t);
  check_cut_params(n, t);
  const fs::path path = fs::path(dir) / ("ground_n" + std::to_string(n) + "_t" + std::to_string(t) + ".json");
  EdgeIndexing ix(n);
  if (fs::exists(path)) {
    run.note("ground cache hit " + path.string());
    auto j = io::parse_json(run.read("XCLAB_CACHE_DIR", path.string()), path.string());
    try {
      if (j.at("n").get<std::size_t>() != n || j.at("t").get<std::size_t>() != t)
        throw InputError("ground cache " + path.string() + " is keyed to a different (n, t)");
      std::vector<std::uint64_t> cuts;
      for (const auto& c : j.at("cuts")) {
        std::uint64_t mask = 0;
        for (std::size_t v : c.get<std::vector<std::size_t>>()) {
          if (v >= n) throw InputError("ground cache: node out of range");
          mask |= std::uint64_t{1} << v;
        }
        cuts.push_back(mask);
      }
      std::vector<Matching> matchings;
      for (const auto& m : j.at("matchings")) {
        Matching mt;
        for (const auto& p : m.get<std::vector<std::pair<std::size_t, std::size_t>>>())
          mt.push_back(ix.index(p.first, p.second));
        std::sort(mt.begin(), mt.end());
        matchings.push_back(std::move(mt));
      }
      return CutMatchingGround::from_parts(n, t, std::move(cuts), std::move(matchings));
    } catch (const json::exception& e) {
      throw InputError("ground cache " + path.string() + ": " + e.what());
    }
  }
  auto g = CutMatchingGround::materialize(n, t);
  json cuts = json::array(), matchings = json::array();
  for (auto mask : g.cuts()) {
    std::vector<std::size_t> nodes;
    for (std::size_t v = 0; v < n; ++v)
      if (mask >> v & 1) nodes.push_back(v);
    cuts.push_back(nodes);
  }
  for (const auto& m : g.matchings()) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t e : m) pairs.push_back(ix.endpoints(e));
    matchings.push_back(pairs);
  }
  fs::create_directories(dir);
  io::write_file_atomic(path, json{{"n", n}, {"t", t}, {"cuts", cuts}, {"matchings", matchings}}.dump());
  run.note("ground cached to " + path.string());
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xclab: extended formulation lab (slack matrices, nonnegative rank bounds, matching measures)"};
  app.require_subcommand(1);
  app.fallthrough();
  Run run;
  app.add_option("--seed", run.seed, "RNG seed (recorded in the envelope)");
  app.add_option("--threads", run.threads, "thread cap forwarded to parallel operations");
  app.add_option("-o,--out", run.out, "write the primary artifact to this path");
  app.add_option("--format", run.format, "artifact format: json | csv | matrix-text");
  app.add_option("--envelope", run.envelope, "write the JSON envelope here instead of stdout");
  app.add_option("--alpha-cap", run.alpha_cap, "exact rectangle search: max size of the smaller side");
  app.add_option("--cover-limit", run.cover_limit, "exact cover: search node budget");
  app.add_option("--cover-max-rows", run.cover_rows, "exact cover: max matrix rows");
  app.add_option("--cover-max-cols", run.cover_cols, "exact cover: max matrix cols");
  app.add_flag("-v,--verbose", run.verbosity, "progress notes on stderr");

  std::map<CLI::App*, std::function<Outcome()>> verbs;

  // gen
  {
    auto* c = app.add_subcommand("gen", "generate a polytope (ppm, pm, pm-truncated, simplex, corner-simplex, cube, cross, polygon)");
    auto shape = std::make_shared<std::string>();
    auto n = std::make_shared<std::size_t>(0), d = std::make_shared<std::size_t>(0), s = std::make_shared<std::size_t>(0);
    auto pts = std::make_shared<std::string>();
    c->add_option("shape", *shape, "shape name")->required();
    c->add_option("--n", *n, "number of graph nodes");
    c->add_option("--d", *d, "dimension");
    c->add_option("--s", *s, "largest odd-set size kept (pm-truncated)");
    c->add_option("--vertices", *pts, "polygon vertices in ccw order, x,y;x,y;...");
    verbs[c] = [=, &run]() -> Outcome {
      auto need = [](std::size_t v, const char* flag) {
        if (v == 0) throw InputError(std::string("gen: missing ") + flag);
        return v;
      };
      Polytope p = [&] {
        if (*shape == "ppm") return perfect_matching_polytope(need(*n, "--n"));
        if (*shape == "pm") return matching_polytope(need(*n, "--n"));
        if (*shape == "pm-truncated") return truncated_matching_relaxation(need(*n, "--n"), need(*s, "--s"));
        if (*shape == "simplex") return shapes::standard_simplex(need(*d, "--d"));
        if (*shape == "corner-simplex") return shapes::corner_simplex(need(*d, "--d"));
        if (*shape == "cube") return shapes::cube(need(*d, "--d"));
        if (*shape == "cross") return shapes::cross_polytope(need(*d, "--d"));
        if (*shape == "polygon") return shapes::polygon(parse_points(*pts));
        throw InputError("gen: unknown shape '" + *shape + "'");
      }();
      auto j = io::polytope_to_json(p);
      if (!run.out.empty()) run.emit(run.out, j.dump(1) + "\n");
      return {j};
    };
  }

  // slack
  {
    auto* c = app.add_subcommand("slack", "slack matrix of a polytope");
    auto input = std::make_shared<std::string>();
    auto filter = std::make_shared<std::string>("all");
    c->add_option("--input", *input, "polytope JSON")->required();
    c->add_option("--filter", *filter, "all | without-implied | odd-sets | all-odd-sets");
    verbs[c] = [=, &run]() -> Outcome {
      auto s = load_slack(run, *input, *filter);
      json j{{"rows", s.rows()}, {"cols", s.cols()}, {"row_labels", s.row_labels}, {"col_labels", s.col_labels},
             {"S", io::to_json(s.S)}};
      if (!run.out.empty()) {
        const auto fmt = run.format.empty() ? std::string("matrix-text") : run.format;
        run.emit(run.out, fmt == "json" ? j.dump() + "\n" : fmt == "csv" ? slack_csv(s) : io::slack_to_text(s));
      }
      return {j};
    };
  }

  // bounds
  {
    auto* c = app.add_subcommand("bounds", "certified lower/upper bounds on nonnegative rank");
    auto input = std::make_shared<std::string>();
    auto filter = std::make_shared<std::string>("all");
    auto weights = std::make_shared<std::vector<std::string>>();
    auto witness = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("exact");
    auto no_cover = std::make_shared<bool>(false);
    c->add_option("--input", *input, "polytope JSON or slack text")->required();
    c->add_option("--filter", *filter, "row filter for polytope input");
    c->add_option("--weights", *weights, "weight matrix text for a hyperplane bound (repeatable)");
    c->add_option("--alpha-mode", *mode, "exact | heuristic");
    c->add_option("--witness", *witness, "write the upper-bound factorization JSON here");
    c->add_flag("--no-cover", *no_cover, "skip the exact rectangle cover");
    verbs[c] = [=, &run]() -> Outcome {
      auto s = load_slack(run, *input, *filter);
      auto cfg = run.bound_config();
      cfg.run_cover = !*no_cover;
      for (const auto& wpath : *weights) {
        auto w = io::weight_from_text(run.read("--weights", wpath));
        if (w.rows() != s.rows() || w.cols() != s.cols()) throw InputError("bounds: weight matrix shape differs from S");
        auto alpha = max_rectangle_value(w, run.alpha_options(*mode));
        if (!alpha.certified) throw InputError("bounds: hyperplane bounds need --alpha-mode exact");
        cfg.hyperplanes.push_back({std::move(w), std::move(alpha)});
      }
      run.note("computing bounds on a " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) + " matrix");
      auto rep = nonnegative_rank_bounds(s.S, cfg);
      if (!witness->empty() && rep.upper_witness) run.emit(*witness, io::factorization_to_json(*rep.upper_witness).dump() + "\n");
      auto j = io::bound_report_to_json(rep, rep.upper_witness ? *witness : std::string());
      if (!run.out.empty()) run.emit(run.out, j.dump(1) + "\n");
      return {j};
    };
  }

  // factorize
  {
    auto* c = app.add_subcommand("factorize", "nonnegative factorization S = U V");
    auto input = std::make_shared<std::string>();
    auto filter = std::make_shared<std::string>("all");
    auto r = std::make_shared<std::size_t>(0);
    auto restarts = std::make_shared<std::size_t>(8);
    c->add_option("--input", *input, "polytope JSON or slack text")->required();
    c->add_option("--filter", *filter, "row filter for polytope input");
    c->add_option("--rank", *r, "inner dimension (default: best certified upper bound)");
    c->add_option("--restarts", *restarts, "heuristic restarts");
    verbs[c] = [=, &run]() -> Outcome {
      auto s = load_slack(run, *input, *filter);
      Factorization fac;
      std::string method;
      if (*r > 0) {
        auto got = nmf_heuristic(s.S, *r, *restarts, run.seed);
        if (!got) throw ComputationError("factorize: no exact factorization of inner dimension " + std::to_string(*r) + " found");
        fac = std::move(*got);
        method = "nmf_heuristic";
      } else {
        auto cfg = run.bound_config();
        cfg.run_cover = false;
        cfg.nmf_restarts = *restarts;
        auto rep = nonnegative_rank_bounds(s.S, cfg);
        if (!rep.upper_witness) throw ComputationError("factorize: no factorization found");
        fac = std::move(*rep.upper_witness);
        method = rep.upper_method;
      }
      if (!verify_factorization(s, fac)) throw ComputationError("factorize: factorization failed verification");
      auto j = io::factorization_to_json(fac);
      if (!run.out.empty()) run.emit(run.out, j.dump() + "\n");
      return {json{{"r", fac.inner_dim()}, {"method", method}, {"verified", true}, {"factorization", j}}};
    };
  }

  // extend
  {
    auto* c = app.add_subcommand("extend", "extended formulation from a slack factorization");
    auto poly = std::make_shared<std::string>();
    auto facpath = std::make_shared<std::string>();
    auto trials = std::make_shared<std::size_t>(0);
    c->add_option("--polytope", *poly, "polytope JSON")->required();
    c->add_option("--factorization", *facpath, "factorization JSON (default: slack-variable form)");
    c->add_option("--check", *trials, "seeded LP objectives for the projection check");
    verbs[c] = [=, &run]() -> Outcome {
      auto p = load_polytope(run, "--polytope", *poly);
      auto fac = facpath->empty() ? slack_variable_factorization(slack_matrix(p))
                                  : io::factorization_from_json(io::parse_json(run.read("--factorization", *facpath), *facpath));
      auto ext = extension_from_factorization(p, fac);
      auto q = ext.to_lifted_system();
      auto j = io::lifted_system_to_json(q, ext.lifts);
      json res{{"x_dim", q.x_dim}, {"y_dim", q.y_dim}, {"ineqs", q.num_ineqs()}, {"extension", j}};
      if (*trials > 0) {
        auto v = lp_equal_under_projection(p, q, *trials, run.seed);
        res["projection_check"] = {{"pass", v.pass}, {"trials", v.trials_run}, {"detail", v.detail}};
        if (!v.pass) throw ComputationError("extend: projection check failed: " + v.detail);
      }
      if (!run.out.empty()) run.emit(run.out, j.dump() + "\n");
      return {res};
    };
  }

  // contract
  {
    auto* c = app.add_subcommand("contract", "slack factorization recovered from an extension");
    auto poly = std::make_shared<std::string>();
    auto ext = std::make_shared<std::string>();
    c->add_option("--polytope", *poly, "polytope JSON")->required();
    c->add_option("--extension", *ext, "extension JSON")->required();
    verbs[c] = [=, &run]() -> Outcome {
      auto p = load_polytope(run, "--polytope", *poly);
      auto q = io::lifted_system_from_json(io::parse_json(run.read("--extension", *ext), *ext), fs::path(*ext).parent_path());
      auto out = factorization_from_extension(p, q);
      auto j = io::factorization_to_json(out.factorization);
      if (!run.out.empty()) run.emit(run.out, j.dump() + "\n");
      json eqw = json::array();
      for (const auto& w : out.eq_weights) eqw.push_back(io::to_json(w));
      return {json{{"r", out.factorization.inner_dim()},
                   {"verified", verify_factorization(slack_matrix(p), out.factorization)},
                   {"factorization", j},
                   {"eq_weights", eqw}}};
    };
  }

  // cover
  {
    auto* c = app.add_subcommand("cover", "exact rectangle cover, or the canonical matching cover");
    auto input = std::make_shared<std::string>();
    auto filter = std::make_shared<std::string>("all");
    auto canonical = std::make_shared<std::size_t>(0);
    c->add_option("--input", *input, "polytope JSON or slack text");
    c->add_option("--filter", *filter, "row filter for polytope input");
    c->add_option("--canonical-matching", *canonical, "n: canonical cover of the perfect matching odd-set slack");
    verbs[c] = [=, &run]() -> Outcome {
      if (*canonical > 0) {
        auto mc = canonical_matching_cover(*canonical);
        auto cnt = coverage_counts(mc.rectangles, mc.slack.rows(), mc.slack.cols());
        bool rule = true;
        std::map<std::string, std::size_t> hist;
        for (std::size_t i = 0; i < mc.slack.rows(); ++i)
          for (std::size_t j = 0; j < mc.slack.cols(); ++j) {
            const Rational& sv = mc.slack.S(i, j);
            const Rational expect = sv * (sv + 1) / 2;
            rule = rule && Rational(static_cast<long>(cnt[i][j])) == expect;
            ++hist[to_string(sv) + ":" + std::to_string(cnt[i][j])];
          }
        json h = json::object();
        for (const auto& [k, v] : hist) h[k] = v;
        json res{{"n", *canonical}, {"rows", mc.slack.rows()}, {"cols", mc.slack.cols()},
                 {"rectangles", mc.rectangles.size()}, {"multiplicity_rule_holds", rule},
                 {"slack_to_coverage", h}};
        if (!run.out.empty()) run.emit(run.out, rectangles_json(mc.rectangles).dump() + "\n");
        return {res};
      }
      if (input->empty()) throw InputError("cover: give --input or --canonical-matching");
      auto s = load_slack(run, *input, *filter);
      auto cov = rectangle_cover_exact(s.S, run.cover_limit, {run.cover_rows, run.cover_cols});
      if (cov.exceeded)
        throw ComputationError("cover: search budget of " + std::to_string(run.cover_limit) + " nodes exceeded");
      json res{{"size", cov.size}, {"nodes", cov.nodes}, {"rectangles", rectangles_json(cov.rectangles)}};
      if (!run.out.empty()) run.emit(run.out, res.dump() + "\n");
      return {res};
    };
  }

  // sep
  {
    auto* c = app.add_subcommand("sep", "maximum rectangle value and hyperplane separation bound");
    auto input = std::make_shared<std::string>();
    auto filter = std::make_shared<std::string>("all");
    auto weights = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("exact");
    c->add_option("--input", *input, "polytope JSON or slack text")->required();
    c->add_option("--filter", *filter, "row filter for polytope input");
    c->add_option("--weights", *weights, "weight matrix text (-inf marks forbidden cells)")->required();
    c->add_option("--alpha-mode", *mode, "exact | heuristic");
    verbs[c] = [=, &run]() -> Outcome {
      auto s = load_slack(run, *input, *filter);
      auto w = io::weight_from_text(run.read("--weights", *weights));
      if (w.rows() != s.rows() || w.cols() != s.cols()) throw InputError("sep: weight matrix shape differs from S");
      auto alpha = max_rectangle_value(w, run.alpha_options(*mode));
      json res{{"alpha", to_string(alpha.value)}, {"certified", alpha.certified},
               {"witness", io::rectangle_to_json(alpha.witness)},
               {"inner_product", to_string(weight_inner_product(w, s.S))}};
      res["bound"] = alpha.certified ? json(to_string(hyperplane_bound(w, s.S, alpha))) : json(nullptr);
      return {res};
    };
  }

  // qsize
  {
    auto* c = app.add_subcommand("qsize", "class sizes |Q_l| of cut/matching pairs");
    auto n = std::make_shared<std::size_t>(0), t = std::make_shared<std::size_t>(0);
    auto l = std::make_shared<long>(-1);
    c->add_option("--n", *n, "nodes")->required();
    c->add_option("--t", *t, "cut size")->required();
    c->add_option("--l", *l, "crossing count (default: all classes)");
    verbs[c] = [=, &run]() -> Outcome {
      check_cut_params(*n, *t);
      json classes = json::object();
      Integer total = 0;
      for (std::size_t k = 0; k <= *n / 2; ++k) {
        if (*l >= 0 && static_cast<std::size_t>(*l) != k) continue;
        auto q = q_class_size(*n, *t, k);
        total += q;
        classes[std::to_string(k)] = q.get_str();
      }
      if (*l > static_cast<long>(*n / 2)) classes[std::to_string(*l)] = "0";
      json res{{"n", *n}, {"t", *t}, {"classes", classes}};
      if (*l < 0) res["total"] = total.get_str();
      return {res};
    };
  }

  // wdot
  {
    auto* c = app.add_subcommand("wdot", "<W, S> for the matching weight matrix");
    auto n = std::make_shared<std::size_t>(0), t = std::make_shared<std::size_t>(0), k = std::make_shared<std::size_t>(0);
    auto cross = std::make_shared<bool>(false);
    c->add_option("--n", *n, "nodes")->required();
    c->add_option("--t", *t, "cut size")->required();
    c->add_option("--k", *k, "heavy class index")->required();
    c->add_flag("--crosscheck", *cross, "also sum entrywise over the materialized ground");
    verbs[c] = [=, &run]() -> Outcome {
      auto counting = ws_inner_product_counting(*n, *t, *k);
      json res{{"value", fraction(counting)}, {"counting", fraction(counting)}, {"materialized", nullptr}};
      if (*cross) {
        auto g = load_ground(run, *n, *t);
        auto mat = ws_inner_product_materialized(g, *k);
        res["materialized"] = fraction(mat);
        res["agree"] = mat == counting;
        if (mat != counting) throw ComputationError("wdot: counting and materialized paths disagree");
      }
      return {res};
    };
  }

  // mu and rectvalue share the canonical-rectangle arguments
  auto rect_args = [](CLI::App* c, auto n, auto t, auto e1, auto e2) {
    c->add_option("--n", *n, "nodes")->required();
    c->add_option("--t", *t, "cut size")->required();
    c->add_option("--e1", *e1, "first edge a,b")->required();
    c->add_option("--e2", *e2, "second edge c,d")->required();
  };

  // mu
  {
    auto* c = app.add_subcommand("mu", "class measures mu_l of a canonical rectangle");
    auto n = std::make_shared<std::size_t>(0), t = std::make_shared<std::size_t>(0);
    auto e1 = std::make_shared<std::string>(), e2 = std::make_shared<std::string>();
    auto l = std::make_shared<long>(-1);
    rect_args(c, n, t, e1, e2);
    c->add_option("--l", *l, "class (default: every nonempty class)");
    verbs[c] = [=, &run]() -> Outcome {
      auto a = parse_edge(*e1), b = parse_edge(*e2);
      check_cut_params(*n, *t);
      auto g = load_ground(run, *n, *t);
      auto r = canonical_rectangle(a, b, g);
      json mus = json::object();
      if (*l >= 0) {
        mus[std::to_string(*l)] = to_string(mu(r, g, static_cast<std::size_t>(*l)));
      } else {
        for (std::size_t k = 0; k <= *n / 2; ++k)
          if (q_class_size(*n, *t, k) != 0) mus[std::to_string(k)] = to_string(mu(r, g, k));
      }
      return {json{{"rows", r.rows.size()}, {"cols", r.cols.size()}, {"mu", mus}}};
    };
  }

  // rectvalue
  {
    auto* c = app.add_subcommand("rectvalue", "<W, R> for a canonical rectangle");
    auto n = std::make_shared<std::size_t>(0), t = std::make_shared<std::size_t>(0), k = std::make_shared<std::size_t>(0);
    auto e1 = std::make_shared<std::string>(), e2 = std::make_shared<std::string>();
    rect_args(c, n, t, e1, e2);
    c->add_option("--k", *k, "heavy class index")->required();
    verbs[c] = [=, &run]() -> Outcome {
      auto a = parse_edge(*e1), b = parse_edge(*e2);
      weight_class_sizes(*n, *t, *k);
      auto g = load_ground(run, *n, *t);
      auto r = canonical_rectangle(a, b, g);
      auto v = rectangle_w_value(r, g, *k);
      return {json{{"rows", r.rows.size()},
                   {"cols", r.cols.size()},
                   {"forbidden_violation", v.forbidden_violation},
                   {"value", v.forbidden_violation ? std::string("-inf") : to_string(v.value)}}};
    };
  }

  // bias
  {
    auto* c = app.add_subcommand("bias", "indices whose marginal is epsilon-biased");
    auto input = std::make_shared<std::string>();
    auto eps = std::make_shared<std::string>("1/2");
    auto rm = std::make_shared<std::size_t>(0), rc = std::make_shared<std::size_t>(0);
    c->add_option("--input", *input, "JSON {sizes: [...], tuples: [[...], ...]}");
    c->add_option("--eps", *eps, "epsilon as a rational");
    c->add_option("--random-m", *rm, "instead of --input: seeded random Y in {0,1}^m");
    c->add_option("--random-count", *rc, "size of the random Y");
    verbs[c] = [=, &run]() -> Outcome {
      const Rational e = parse_rational(*eps);
      std::vector<std::vector<std::size_t>> y;
      std::vector<std::size_t> sizes;
      if (!input->empty()) {
        auto j = io::parse_json(run.read("--input", *input), *input);
        try {
          sizes = j.at("sizes").get<std::vector<std::size_t>>();
          y = j.at("tuples").get<std::vector<std::vector<std::size_t>>>();
        } catch (const json::exception& ex) {
          throw InputError(std::string("bias input: ") + ex.what());
        }
      } else {
        if (*rm == 0 || *rm > 30) throw InputError("bias: give --input, or --random-m in [1, 30]");
        if (*rc == 0 || *rc > (std::size_t{1} << *rm)) throw InputError("bias: --random-count must be in [1, 2^m]");
        sizes.assign(*rm, 2);
        std::mt19937_64 rng(run.seed);
        std::set<std::uint64_t> picked;
        while (picked.size() < *rc) picked.insert(rng() & ((std::uint64_t{1} << *rm) - 1));
        for (auto bits : picked) {
          std::vector<std::size_t> tup(*rm);
          for (std::size_t i = 0; i < *rm; ++i) tup[i] = bits >> i & 1;
          y.push_back(std::move(tup));
        }
      }
      auto idx = biased_indices(y, sizes, e);
      return {json{{"m", sizes.size()}, {"y_size", y.size()}, {"eps", to_string(e)}, {"biased", idx}, {"count", idx.size()}}};
    };
  }

  // ratio
  {
    auto* c = app.add_subcommand("ratio", "approximation ratio of the truncated odd-set relaxation");
    auto n = std::make_shared<std::size_t>(0), s = std::make_shared<std::size_t>(0), trials = std::make_shared<std::size_t>(50);
    auto unit = std::make_shared<bool>(false);
    c->add_option("--n", *n, "nodes")->required();
    c->add_option("--s", *s, "largest odd-set size kept")->required();
    c->add_option("--trials", *trials, "seeded objectives");
    c->add_flag("--unit", *unit, "also evaluate the all-ones objective");
    verbs[c] = [=, &run]() -> Outcome {
      auto k = truncated_matching_relaxation(*n, *s);
      auto p = matching_polytope(*n);
      std::vector<Vector> extra;
      if (*unit) extra.push_back(Vector(p.dim(), Rational(1)));
      auto r = approximation_ratio(k.hrep(), p, *trials, run.seed, extra);
      return {json{{"ratio", to_string(r.ratio)},
                   {"worst_objective", io::to_json(r.worst_objective)},
                   {"k_max", to_string(r.k_max)},
                   {"p_max", to_string(r.p_max)},
                   {"objectives", r.objectives_evaluated}}};
    };
  }

  // verify
  {
    auto* c = app.add_subcommand("verify", "check a factorization against S, or a polytope's vertex list");
    auto input = std::make_shared<std::string>();
    auto filter = std::make_shared<std::string>("all");
    auto facpath = std::make_shared<std::string>();
    auto poly = std::make_shared<std::string>();
    c->add_option("--input", *input, "polytope JSON or slack text");
    c->add_option("--filter", *filter, "row filter for polytope input");
    c->add_option("--factorization", *facpath, "factorization JSON");
    c->add_option("--polytope", *poly, "polytope JSON whose vertices are checked");
    verbs[c] = [=, &run]() -> Outcome {
      json res = json::object();
      bool ok = true;
      if (!facpath->empty()) {
        if (input->empty()) throw InputError("verify: --factorization needs --input");
        auto s = load_slack(run, *input, *filter);
        auto fac = io::factorization_from_json(io::parse_json(run.read("--factorization", *facpath), *facpath));
        const bool good = verify_factorization(s, fac);
        res["factorization"] = {{"ok", good}, {"r", fac.inner_dim()}};
        ok = ok && good;
      }
      if (!poly->empty()) {
        auto p = load_polytope(run, "--polytope", *poly);
        auto vc = verify_vertices(p);
        res["vertices"] = {{"ok", vc.ok},
                           {"offending", vc.offending ? json(p.vertex_labels()[*vc.offending]) : json(nullptr)}};
        ok = ok && vc.ok;
      }
      if (res.empty()) throw InputError("verify: give --factorization with --input, or --polytope");
      res["ok"] = ok;
      return {res, ok ? 0 : 1};
    };
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "xclab: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  CLI::App* verb = app.get_subcommands().front();
  json envelope{{"command", verb->get_name()},
                {"inputs", {{"args", args}, {"files", json::array()}}},
                {"seed", run.seed}};
  int code = 0;
  try {
    run.validate_caps();
    Outcome o = verbs.at(verb)();
    code = o.code;
    envelope["result"] = std::move(o.result);
    for (const auto& [path, contents] : run.pending) io::write_file_atomic(path, contents);
  } catch (const InputError& e) {
    std::cerr << "xclab " << verb->get_name() << ": " << e.what() << "\n\n" << verb->help();
    return 2;
  } catch (const ComputationError& e) {
    std::cerr << "xclab " << verb->get_name() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "xclab " << verb->get_name() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "xclab " << verb->get_name() << ": " << e.what() << '\n';
    return 1;
  }
  envelope["inputs"]["files"] = run.files;
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  envelope["timing"] = {{"wall_ms", ms}};
  const auto text = envelope.dump(1) + "\n";
  if (run.envelope.empty())
    std::cout << text;
  else
    io::write_file_atomic(run.envelope, text);
  return code;
}
