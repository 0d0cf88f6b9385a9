#include "splitmax/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace splitmax {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Line-oriented CSV reader for the flat numeric files used here.
class CsvReader {
 public:
  explicit CsvReader(const fs::path& path) : path_(path), in_(path) {
    if (!in_) throw DataError(path.string() + ": cannot open");
  }

  // Reads the header; returns its column names.
  std::vector<std::string> header() {
    std::vector<std::string> cols;
    if (!next()) return cols;
    for (auto f : fields_) cols.emplace_back(f);
    return cols;
  }

  bool next() {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (trim(line_).empty()) continue;
      fields_.clear();
      std::string_view rest(line_);
      for (;;) {
        const auto comma = rest.find(',');
        fields_.push_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      return true;
    }
    return false;
  }

  std::size_t size() const { return fields_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

  void expect_fields(std::size_t n) const {
    if (fields_.size() != n) {
      fail("expected " + std::to_string(n) + " fields, got " +
           std::to_string(fields_.size()));
    }
  }

  std::int64_t integer(std::size_t i) const {
    std::int64_t v = 0;
    const auto f = fields_.at(i);
    const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || p != f.data() + f.size()) {
      fail("bad integer '" + std::string(f) + "'");
    }
    return v;
  }

  double real(std::size_t i) const {
    double v = 0;
    auto f = fields_.at(i);
    if (!f.empty() && f.front() == '+') f.remove_prefix(1);
    const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || p != f.data() + f.size() || !std::isfinite(v)) {
      fail("bad number '" + std::string(f) + "'");
    }
    return v;
  }

 private:
  fs::path path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::vector<std::string_view> fields_;
};

void check_header(const fs::path& path, const std::vector<std::string>& got,
                  const std::vector<std::string>& want) {
  if (got != want) {
    std::string w;
    for (const auto& c : want) w += (w.empty() ? "" : ",") + c;
    throw DataError(path.string() + ":1: expected header '" + w + "'");
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": cannot write");
  return out;
}

void write_trajectories(std::ostream& out, const TrajectoryDB& db) {
  out << "user_id,lat,lon,t_start,t_end\n";
  for (const auto& r : db.records) {
    out << r.user.value << ',' << fmt(r.location.lat) << ',' << fmt(r.location.lon)
        << ',' << r.interval.start << ',' << r.interval.end << '\n';
  }
}

void write_billboards(std::ostream& out, std::span<const Billboard> billboards) {
  out << "billboard_id,lat,lon,panel_size\n";
  for (const auto& b : billboards) {
    out << b.id.value << ',' << fmt(b.location.lat) << ',' << fmt(b.location.lon) << ','
        << fmt(b.panel_size) << '\n';
  }
}

void write_slots(std::ostream& out, const SlotSet& slots) {
  out << "slot_id,billboard_id,t_start,t_end,cost\n";
  for (const auto& s : slots.slots) {
    out << s.id.value << ',' << s.billboard.value << ',' << s.interval.start << ','
        << s.interval.end << ',' << fmt(s.cost) << '\n';
  }
}

void write_edges(std::ostream& out, const SocialGraph& graph) {
  out << "src,dst,prob\n";
  for (const auto& e : graph.edges()) {
    out << graph.user(e.src).value << ',' << graph.user(e.dst).value << ','
        << fmt(e.prob) << '\n';
  }
}

void write_users(std::ostream& out, const SocialGraph& graph) {
  out << "user_id,seed_cost\n";
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    out << graph.user(v).value << ',' << fmt(graph.seed_cost(v)) << '\n';
  }
}

// Portable draws; std distributions differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

 private:
  std::mt19937_64 gen_;
};

std::vector<std::pair<NodeId, NodeId>> random_edges(std::size_t n, std::size_t m,
                                                    Rng& rng) {
  const std::size_t max_edges = n < 2 ? 0 : n * (n - 1);
  if (m > max_edges) {
    throw ConfigError("cannot place " + std::to_string(m) + " distinct edges on " +
                      std::to_string(n) + " nodes");
  }
  std::vector<std::pair<NodeId, NodeId>> out;
  if (m * 2 > max_edges) {
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = 0; v < n; ++v) {
        if (u != v) out.emplace_back(u, v);
      }
    }
    for (std::size_t i = out.size(); i > 1; --i) {
      std::swap(out[i - 1], out[rng.below(i)]);
    }
    out.resize(m);
  } else {
    std::set<std::pair<NodeId, NodeId>> seen;
    while (out.size() < m) {
      const auto u = static_cast<NodeId>(rng.below(n));
      const auto v = static_cast<NodeId>(rng.below(n));
      if (u == v || !seen.emplace(u, v).second) continue;
      out.emplace_back(u, v);
    }
  }
  return out;
}

std::string coords_name(CoordinateSystem c) {
  return c == CoordinateSystem::kPlanar ? "planar" : "wgs84";
}

CoordinateSystem parse_coords(const std::string& s) {
  if (s == "planar") return CoordinateSystem::kPlanar;
  if (s == "wgs84") return CoordinateSystem::kWgs84;
  throw ConfigError("unknown coordinate system '" + s + "'");
}

std::vector<double> singleton_influence(const SlotUserMatrix& matrix) {
  std::vector<double> out(matrix.slot_count(), 0.0);
  for (SlotIndex s = 0; s < matrix.slot_count(); ++s) {
    for (const auto& e : matrix.row(s)) out[s] += e.prob;
  }
  return out;
}

}  // namespace

TrajectoryDB load_trajectories(const fs::path& path, const TrajectoryFormat& format) {
  CsvReader csv(path);
  TrajectoryDB db;
  db.coords = format.coords;
  const auto head = csv.header();
  if (head.empty()) return db;
  check_header(path, head, {"user_id", "lat", "lon", "t_start", "t_end"});
  while (csv.next()) {
    csv.expect_fields(5);
    TrajectoryRecord r{UserId{csv.integer(0)}, {csv.real(1), csv.real(2)},
                       {csv.integer(3), csv.integer(4)}};
    if (r.interval.start > r.interval.end) csv.fail("t_start after t_end");
    db.records.push_back(r);
  }
  if (!db.records.empty()) {
    db.horizon = db.records.front().interval;
    for (const auto& r : db.records) {
      db.horizon.start = std::min(db.horizon.start, r.interval.start);
      db.horizon.end = std::max(db.horizon.end, r.interval.end);
    }
  }
  return db;
}

void save_trajectories(const fs::path& path, const TrajectoryDB& db) {
  auto out = open_out(path);
  write_trajectories(out, db);
}

std::vector<Billboard> load_billboards(const fs::path& path) {
  CsvReader csv(path);
  std::vector<Billboard> out;
  const auto head = csv.header();
  if (head.empty()) return out;
  check_header(path, head, {"billboard_id", "lat", "lon", "panel_size"});
  std::set<std::int64_t> ids;
  while (csv.next()) {
    csv.expect_fields(4);
    Billboard b{BillboardId{csv.integer(0)}, {csv.real(1), csv.real(2)}, csv.real(3)};
    if (!(b.panel_size > 0.0)) csv.fail("panel_size must be > 0");
    if (!ids.insert(b.id.value).second) csv.fail("duplicate billboard id");
    out.push_back(b);
  }
  return out;
}

void save_billboards(const fs::path& path, std::span<const Billboard> billboards) {
  auto out = open_out(path);
  write_billboards(out, billboards);
}

LoadedGraph load_graph(const GraphFiles& files) {
  std::vector<EdgeRecord> edges;
  bool has_prob = false;
  {
    CsvReader csv(files.edges);
    const auto head = csv.header();
    if (!head.empty()) {
      if (head == std::vector<std::string>{"src", "dst", "prob"}) {
        has_prob = true;
      } else {
        check_header(files.edges, head, {"src", "dst"});
      }
    }
    const std::size_t width = has_prob ? 3 : 2;
    while (csv.next()) {
      csv.expect_fields(width);
      EdgeRecord e{UserId{csv.integer(0)}, UserId{csv.integer(1)}, std::nullopt};
      if (has_prob) {
        e.prob = csv.real(2);
        if (!(*e.prob > 0.0 && *e.prob <= 1.0)) csv.fail("prob outside (0,1]");
      }
      if (e.src == e.dst) csv.fail("self-loop");
      edges.push_back(e);
    }
  }

  std::vector<UserId> nodes;
  std::vector<Money> costs;
  const bool has_users = !files.users.empty();
  if (has_users) {
    CsvReader csv(files.users);
    const auto head = csv.header();
    if (!head.empty()) check_header(files.users, head, {"user_id", "seed_cost"});
    while (csv.next()) {
      csv.expect_fields(2);
      nodes.push_back(UserId{csv.integer(0)});
      costs.push_back(csv.real(1));
      if (costs.back() < 0.0) csv.fail("negative seed cost");
    }
  } else {
    std::set<UserId> seen;
    for (const auto& e : edges) {
      seen.insert(e.src);
      seen.insert(e.dst);
    }
    nodes.assign(seen.begin(), seen.end());
    costs.assign(nodes.size(), 0.0);
  }
  try {
    return {SocialGraph(std::move(nodes), edges, std::move(costs)), has_prob, has_users};
  } catch (const DataError& e) {
    throw DataError(files.edges.string() + ": " + e.what());
  }
}

void save_graph(const GraphFiles& files, const SocialGraph& graph) {
  {
    auto out = open_out(files.edges);
    write_edges(out, graph);
  }
  if (!files.users.empty()) {
    auto out = open_out(files.users);
    write_users(out, graph);
  }
}

SlotSet load_slots(const fs::path& path) {
  CsvReader csv(path);
  SlotSet out;
  const auto head = csv.header();
  if (head.empty()) return out;
  check_header(path, head, {"slot_id", "billboard_id", "t_start", "t_end", "cost"});
  std::set<std::int64_t> ids;
  while (csv.next()) {
    csv.expect_fields(5);
    BillboardSlot s{SlotId{csv.integer(0)}, BillboardId{csv.integer(1)},
                    {csv.integer(2), csv.integer(3)}, csv.real(4)};
    if (s.interval.end <= s.interval.start) csv.fail("empty slot interval");
    if (s.cost < 0.0) csv.fail("negative cost");
    if (!ids.insert(s.id.value).second) csv.fail("duplicate slot id");
    out.slots.push_back(s);
  }
  return out;
}

void save_slots(const fs::path& path, const SlotSet& slots) {
  auto out = open_out(path);
  write_slots(out, slots);
}

SlotSet derive_slots(std::span<const Billboard> billboards, Timestamp delta,
                     const Interval& horizon) {
  if (delta <= 0) throw ConfigError("slot length must be > 0");
  if (horizon.end <= horizon.start) throw ConfigError("horizon must have T2 > T1");
  const Timestamp per_board = horizon.length() / delta;
  SlotSet out;
  out.slots.reserve(billboards.size() * static_cast<std::size_t>(per_board));
  std::int64_t next_id = 1;
  for (const auto& b : billboards) {
    for (Timestamp j = 0; j < per_board; ++j) {
      const Timestamp t = horizon.start + j * delta;
      out.slots.push_back({SlotId{next_id++}, b.id, {t, t + delta}, 1.0});
    }
  }
  return out;
}

Money slot_cost(double influence, double delta_scale) {
  if (!(delta_scale >= 0.8 && delta_scale <= 1.1)) {
    throw ConfigError("slot cost scale must be in [0.8, 1.1]");
  }
  if (!(influence >= 0.0)) throw ConfigError("slot influence must be >= 0");
  // The nudge keeps exact products like 0.9 * 100 / 10 from flooring down.
  const double raw = delta_scale * influence / 10.0;
  return std::max(1.0, std::floor(raw * (1.0 + 1e-12)));
}

Money seed_cost(const SocialGraph& graph, NodeId node, double k) {
  if (graph.empty()) throw ConfigError("seed cost on an empty graph");
  if (!(k >= 0.0) || !std::isfinite(k)) throw ConfigError("seed cost k must be >= 0");
  const auto deg = graph.out_degree(node);
  if (deg == 0) return 1.0;
  const double ratio = static_cast<double>(graph.node_count()) *
                       static_cast<double>(deg) /
                       static_cast<double>(graph.edge_count());
  return k * ratio;
}

std::vector<Money> seed_costs(const SocialGraph& graph, double k) {
  std::vector<Money> out(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) out[v] = seed_cost(graph, v, k);
  return out;
}

std::vector<Money> price_slots(const SlotUserMatrix& matrix, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  const auto infl = singleton_influence(matrix);
  std::vector<Money> out(infl.size());
  for (std::size_t s = 0; s < infl.size(); ++s) {
    const double scale = std::clamp(rng.uniform(0.8, 1.1), 0.8, 1.1);
    out[s] = slot_cost(infl[s], scale);
  }
  return out;
}

ProblemInstance generate_synthetic(const SyntheticParams& params) {
  if (params.extent <= 0.0) throw ConfigError("extent must be > 0");
  if (params.hotspot_fraction < 0.0 || params.hotspot_fraction > 1.0) {
    throw ConfigError("hotspot_fraction must be in [0, 1]");
  }
  Rng rng(params.rng_seed);

  std::vector<Billboard> billboards;
  for (std::size_t b = 0; b < params.billboards; ++b) {
    billboards.push_back({BillboardId{static_cast<std::int64_t>(b + 1)},
                          {rng.uniform(0.0, params.extent), rng.uniform(0.0, params.extent)},
                          static_cast<double>(1 + rng.below(4))});
  }

  TrajectoryDB db;
  db.coords = CoordinateSystem::kPlanar;
  db.horizon = params.horizon;
  if (params.horizon.end <= params.horizon.start) {
    throw ConfigError("horizon must have T2 > T1");
  }
  const auto span_len = static_cast<std::uint64_t>(params.horizon.length());
  for (std::size_t u = 0; u < params.users; ++u) {
    for (std::size_t c = 0; c < params.checkins_per_user; ++c) {
      Location loc;
      if (!billboards.empty() && rng.uniform() < params.hotspot_fraction) {
        const auto& b = billboards[rng.below(billboards.size())];
        const double r = 1.5 * params.lambda * std::sqrt(rng.uniform());
        const double theta = 2.0 * 3.14159265358979323846 * rng.uniform();
        loc = {b.location.lat + r * std::cos(theta), b.location.lon + r * std::sin(theta)};
      } else {
        loc = {rng.uniform(0.0, params.extent), rng.uniform(0.0, params.extent)};
      }
      const Timestamp start =
          params.horizon.start + static_cast<Timestamp>(rng.below(span_len));
      const Timestamp end =
          std::min(params.horizon.end, start + static_cast<Timestamp>(rng.below(1801)));
      db.records.push_back({UserId{static_cast<std::int64_t>(u + 1)}, loc, {start, end}});
    }
  }

  std::vector<UserId> nodes;
  for (std::size_t u = 0; u < params.users; ++u) {
    nodes.push_back(UserId{static_cast<std::int64_t>(u + 1)});
  }
  std::vector<EdgeRecord> edges;
  for (const auto& [u, v] : random_edges(params.users, params.edges, rng)) {
    edges.push_back({nodes[u], nodes[v], std::nullopt});
  }
  SocialGraph graph = assign_probabilities(SocialGraph(nodes, edges), params.prob_model);
  graph.set_seed_costs(seed_costs(graph, params.seed_cost_k));

  auto slots = derive_slots(billboards, params.delta_slot, params.horizon);
  InstanceParams ip{params.budget, params.lambda, params.delta_slot, params.rng_seed,
                    params.seed_cost_k};
  ProblemInstance instance(std::move(db), std::move(billboards), std::move(slots),
                           std::move(graph), ip);
  instance.set_slot_costs(price_slots(instance.matrix(), params.rng_seed));
  return instance;
}

ProblemInstance random_small_instance(const SmallInstanceParams& params,
                                      std::uint64_t rng_seed) {
  if (params.coverage < 0.0 || params.coverage > 1.0) {
    throw ConfigError("coverage must be in [0, 1]");
  }
  if (params.min_cost > params.max_cost || params.min_cost < 0.0) {
    throw ConfigError("invalid cost range");
  }
  Rng rng(rng_seed);
  const auto lo = static_cast<std::int64_t>(std::ceil(params.min_cost));
  const auto hi = static_cast<std::int64_t>(std::floor(params.max_cost));
  auto draw_cost = [&] {
    return static_cast<Money>(lo + static_cast<std::int64_t>(
                                       rng.below(static_cast<std::uint64_t>(hi - lo + 1))));
  };

  std::vector<UserId> nodes;
  for (std::size_t i = 0; i < params.nodes; ++i) {
    nodes.push_back(UserId{static_cast<std::int64_t>(i + 1)});
  }
  const std::size_t max_edges = params.nodes < 2 ? 0 : params.nodes * (params.nodes - 1);
  std::vector<EdgeRecord> edges;
  for (const auto& [u, v] : random_edges(params.nodes, std::min(params.edges, max_edges), rng)) {
    edges.push_back({nodes[u], nodes[v], 1.0 - rng.uniform()});
  }
  std::vector<Money> costs(params.nodes);
  for (auto& c : costs) c = draw_cost();
  SocialGraph graph(nodes, edges, costs);

  static constexpr double kRatios[] = {0.25, 0.5, 0.75, 1.0};
  SlotSet slots;
  std::vector<std::vector<SlotEntry>> rows(params.slots);
  for (std::size_t s = 0; s < params.slots; ++s) {
    const auto id = static_cast<std::int64_t>(s + 1);
    slots.slots.push_back({SlotId{id}, BillboardId{id}, {0, 1}, draw_cost()});
    const double ratio = kRatios[rng.below(4)];
    for (UserIndex u = 0; u < params.nodes; ++u) {
      if (rng.uniform() < params.coverage) rows[s].push_back({u, ratio});
    }
  }
  SlotUserMatrix matrix(std::move(rows), params.nodes);
  InstanceParams ip;
  ip.budget = params.budget;
  ip.rng_seed = rng_seed;
  return ProblemInstance(std::move(slots), std::move(matrix), UserUniverse(nodes),
                         std::move(graph), ip);
}

namespace {

void write_matrix_ids(std::ostream& out, const ProblemInstance& instance) {
  write_matrix_csv(out, instance.matrix(), instance.slots(), instance.universe());
}

nlohmann::json params_json(const ProblemInstance& instance) {
  const auto& p = instance.params();
  nlohmann::json j;
  j["budget"] = p.budget;
  j["lambda"] = p.lambda;
  j["delta_slot"] = p.delta_slot;
  j["rng_seed"] = p.rng_seed;
  j["seed_cost_k"] = p.seed_cost_k;
  j["horizon"] = {instance.trajectories().horizon.start, instance.trajectories().horizon.end};
  j["coords"] = coords_name(instance.trajectories().coords);
  j["prob_model"] = "explicit";
  return j;
}

}  // namespace

void save_instance(const fs::path& dir, const ProblemInstance& instance) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": " + ec.message());
  {
    auto out = open_out(dir / "instance.json");
    out << params_json(instance).dump(2) << '\n';
  }
  const bool from_trajectories = !instance.billboards().empty() ||
                                 !instance.trajectories().records.empty();
  if (from_trajectories) {
    save_trajectories(dir / "trajectories.csv", instance.trajectories());
    save_billboards(dir / "billboards.csv", instance.billboards());
  } else {
    // No raw data to rebuild the matrix from; store it directly.
    auto out = open_out(dir / "matrix.csv");
    write_matrix_ids(out, instance);
  }
  save_slots(dir / "slots.csv", instance.slots());
  save_graph({dir / "graph.csv", dir / "users.csv"}, instance.graph());
}

ProblemInstance load_instance(const fs::path& dir) {
  const auto meta_path = dir / "instance.json";
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw DataError(meta_path.string() + ": cannot open");
  nlohmann::json j;
  try {
    meta_in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(meta_path.string() + ": " + e.what());
  }

  InstanceParams params;
  std::string coords = "wgs84";
  std::string model = "wc";
  double pc = 0.1;
  std::optional<Interval> horizon;
  try {
    params.budget = j.value("budget", 0.0);
    params.lambda = j.value("lambda", params.lambda);
    params.delta_slot = j.value("delta_slot", params.delta_slot);
    params.rng_seed = j.value("rng_seed", params.rng_seed);
    params.seed_cost_k = j.value("seed_cost_k", params.seed_cost_k);
    coords = j.value("coords", coords);
    model = j.value("prob_model", model);
    pc = j.value("pc", pc);
    if (j.contains("horizon")) {
      const auto& h = j.at("horizon");
      horizon = Interval{h.at(0).get<Timestamp>(), h.at(1).get<Timestamp>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(meta_path.string() + ": " + e.what());
  }

  const bool has_users = fs::exists(dir / "users.csv");
  auto loaded = load_graph({dir / "graph.csv", has_users ? dir / "users.csv" : fs::path{}});
  SocialGraph graph = std::move(loaded.graph);
  if (!loaded.has_probabilities) {
    if (model == "explicit") {
      throw DataError((dir / "graph.csv").string() +
                      ": explicit probability model needs a prob column");
    }
    graph = assign_probabilities(graph, parse_probability_model(model, pc, params.rng_seed));
  }
  if (!loaded.has_seed_costs) graph.set_seed_costs(seed_costs(graph, params.seed_cost_k));

  const bool has_slots = fs::exists(dir / "slots.csv");
  if (fs::exists(dir / "matrix.csv") && !fs::exists(dir / "trajectories.csv")) {
    if (!has_slots) throw DataError((dir / "slots.csv").string() + ": missing");
    SlotSet slots = load_slots(dir / "slots.csv");
    std::map<std::int64_t, SlotIndex> slot_index;
    for (SlotIndex s = 0; s < slots.size(); ++s) slot_index[slots.slots[s].id.value] = s;
    struct Triple {
      std::int64_t slot, user;
      double prob;
    };
    std::vector<Triple> triples;
    std::vector<UserId> ids(graph.nodes().begin(), graph.nodes().end());
    CsvReader csv(dir / "matrix.csv");
    const auto head = csv.header();
    if (!head.empty()) check_header(dir / "matrix.csv", head, {"slot_id", "user_id", "prob"});
    while (csv.next()) {
      csv.expect_fields(3);
      triples.push_back({csv.integer(0), csv.integer(1), csv.real(2)});
      if (!slot_index.contains(triples.back().slot)) csv.fail("unknown slot id");
      ids.push_back(UserId{triples.back().user});
    }
    UserUniverse universe(std::move(ids));
    std::vector<std::vector<SlotEntry>> rows(slots.size());
    for (const auto& t : triples) {
      rows[slot_index[t.slot]].push_back({universe.index_of(UserId{t.user}), t.prob});
    }
    try {
      SlotUserMatrix matrix(std::move(rows), universe.size());
      return ProblemInstance(std::move(slots), std::move(matrix), std::move(universe),
                             std::move(graph), params);
    } catch (const std::invalid_argument& e) {
      throw DataError((dir / "matrix.csv").string() + ": " + e.what());
    }
  }

  TrajectoryDB db = load_trajectories(dir / "trajectories.csv", {parse_coords(coords)});
  if (horizon) db.horizon = *horizon;
  auto billboards = load_billboards(dir / "billboards.csv");
  SlotSet slots = has_slots ? load_slots(dir / "slots.csv")
                            : derive_slots(billboards, params.delta_slot, db.horizon);
  ProblemInstance instance(std::move(db), std::move(billboards), std::move(slots),
                           std::move(graph), params);
  if (!has_slots) instance.set_slot_costs(price_slots(instance.matrix(), params.rng_seed));
  return instance;
}

std::uint64_t summary_hash(const ProblemInstance& instance) {
  std::ostringstream out;
  out << params_json(instance).dump() << '\n';
  write_trajectories(out, instance.trajectories());
  write_billboards(out, instance.billboards());
  write_slots(out, instance.slots());
  write_edges(out, instance.graph());
  write_users(out, instance.graph());
  write_matrix_ids(out, instance);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : out.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace splitmax
