#include "modgraph/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "modgraph/errors.hpp"

namespace modgraph {

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

double parse_double_tok(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError("expected a number, got '" + std::string(tok) + "'", line);
  }
  return v;
}

std::int64_t parse_int_tok(std::string_view tok, std::size_t line) {
  std::int64_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError("expected an integer, got '" + std::string(tok) + "'", line);
  }
  return v;
}

// Seeds use the full unsigned 64-bit range and overflow the signed parser.
std::uint64_t parse_uint_tok(std::string_view tok, std::size_t line) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError("expected an unsigned integer, got '" + std::string(tok) + "'",
                     line);
  }
  return v;
}

// Splits an input stream into whitespace-separated tokens per content line,
// skipping blank lines and '#' comments, tracking the 1-based line number.
class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  bool next(std::vector<std::string_view>& tokens) {
    tokens.clear();
    while (std::getline(is_, buffer_)) {
      ++line_;
      std::string_view rest = buffer_;
      while (!rest.empty()) {
        const auto start = rest.find_first_not_of(" \t\r");
        if (start == std::string_view::npos) {
          break;
        }
        rest.remove_prefix(start);
        const auto end = rest.find_first_of(" \t\r");
        tokens.push_back(rest.substr(0, end));
        rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
      }
      if (!tokens.empty() && tokens.front().front() == '#') {
        tokens.clear();
        continue;
      }
      if (!tokens.empty()) {
        return true;
      }
    }
    return false;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& is_;
  std::string buffer_;
  std::size_t line_ = 0;
};

void expect_count(const std::vector<std::string_view>& tokens, std::size_t n,
                  std::size_t line, const char* what) {
  if (tokens.size() != n) {
    throw ParseError(std::string("malformed ") + what + " record", line);
  }
}

}  // namespace

void write_stream(std::ostream& os, const ObservationStream& stream) {
  os << "# t agent x y z theta\n";
  for (const Observation& o : stream) {
    os << format_double(o.t) << ' ' << o.agent_id << ' '
       << format_double(o.position.x()) << ' ' << format_double(o.position.y()) << ' '
       << format_double(o.position.z()) << ' ' << format_double(o.heading) << '\n';
  }
}

ObservationStream read_stream(std::istream& is) {
  ObservationStream out;
  LineReader reader(is);
  std::vector<std::string_view> t;
  while (reader.next(t)) {
    expect_count(t, 6, reader.line(), "observation");
    Observation o;
    o.t = parse_double_tok(t[0], reader.line());
    o.agent_id = static_cast<int>(parse_int_tok(t[1], reader.line()));
    o.position = Position{parse_double_tok(t[2], reader.line()),
                          parse_double_tok(t[3], reader.line()),
                          parse_double_tok(t[4], reader.line())};
    o.heading = parse_double_tok(t[5], reader.line());
    if (!out.empty() && o.t < out.back().t) {
      throw ParseError("observation timestamps must be non-decreasing", reader.line());
    }
    out.push_back(o);
  }
  return out;
}

namespace {

std::string_view event_kind_name(TopologyEvent::Kind kind) {
  switch (kind) {
    case TopologyEvent::Kind::insert:
      return "insert";
    case TopologyEvent::Kind::reposition:
      return "reposition";
    case TopologyEvent::Kind::remove:
      return "remove";
  }
  return "?";
}

TopologyEvent::Kind parse_event_kind(std::string_view name, std::size_t line) {
  if (name == "insert") {
    return TopologyEvent::Kind::insert;
  }
  if (name == "reposition") {
    return TopologyEvent::Kind::reposition;
  }
  if (name == "remove") {
    return TopologyEvent::Kind::remove;
  }
  throw ParseError("unknown event kind '" + std::string(name) + "'", line);
}

}  // namespace

void write_events(std::ostream& os, const std::vector<TopologyEvent>& events) {
  os << "# t kind id x y z\n";
  for (const TopologyEvent& ev : events) {
    os << format_double(ev.t) << ' ' << event_kind_name(ev.kind) << ' ' << ev.id << ' '
       << format_double(ev.position.x()) << ' ' << format_double(ev.position.y())
       << ' ' << format_double(ev.position.z()) << '\n';
  }
}

std::vector<TopologyEvent> read_events(std::istream& is) {
  std::vector<TopologyEvent> out;
  LineReader reader(is);
  std::vector<std::string_view> t;
  while (reader.next(t)) {
    expect_count(t, 6, reader.line(), "event");
    TopologyEvent ev;
    ev.t = parse_double_tok(t[0], reader.line());
    ev.kind = parse_event_kind(t[1], reader.line());
    ev.id = parse_int_tok(t[2], reader.line());
    ev.position = Position{parse_double_tok(t[3], reader.line()),
                           parse_double_tok(t[4], reader.line()),
                           parse_double_tok(t[5], reader.line())};
    if (!out.empty() && ev.t < out.back().t) {
      throw ParseError("event timestamps must be non-decreasing", reader.line());
    }
    out.push_back(ev);
  }
  return out;
}

void write_scene_config(std::ostream& os, const SceneConfig& cfg) {
  os << "scene " << cfg.scene_id << ' ' << format_double(cfg.duration) << ' '
     << format_double(cfg.dt) << ' ' << cfg.seed << '\n';
  for (const WallSegment& w : cfg.walls) {
    os << "wall " << format_double(w.a.x()) << ' ' << format_double(w.a.y()) << ' '
       << format_double(w.b.x()) << ' ' << format_double(w.b.y()) << '\n';
  }
  for (const AgentRoute& r : cfg.routes) {
    os << "route " << format_double(r.speed) << ' ' << format_double(r.period) << ' '
       << format_double(r.duty) << ' ' << format_double(r.phase) << ' '
       << format_double(r.noise_sigma) << ' ' << r.waypoints.size();
    for (const Position& p : r.waypoints) {
      os << ' ' << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
         << format_double(p.z());
    }
    os << '\n';
  }
}

SceneConfig read_scene_config(std::istream& is) {
  SceneConfig cfg;
  bool have_scene = false;
  LineReader reader(is);
  std::vector<std::string_view> t;
  while (reader.next(t)) {
    if (t[0] == "scene") {
      expect_count(t, 5, reader.line(), "scene");
      cfg.scene_id = static_cast<int>(parse_int_tok(t[1], reader.line()));
      cfg.duration = parse_double_tok(t[2], reader.line());
      cfg.dt = parse_double_tok(t[3], reader.line());
      cfg.seed = parse_uint_tok(t[4], reader.line());
      have_scene = true;
    } else if (t[0] == "wall") {
      expect_count(t, 5, reader.line(), "wall");
      WallSegment w;
      w.a = {parse_double_tok(t[1], reader.line()), parse_double_tok(t[2], reader.line())};
      w.b = {parse_double_tok(t[3], reader.line()), parse_double_tok(t[4], reader.line())};
      cfg.walls.push_back(w);
    } else if (t[0] == "route") {
      if (t.size() < 7) {
        throw ParseError("malformed route record", reader.line());
      }
      AgentRoute r;
      r.speed = parse_double_tok(t[1], reader.line());
      r.period = parse_double_tok(t[2], reader.line());
      r.duty = parse_double_tok(t[3], reader.line());
      r.phase = parse_double_tok(t[4], reader.line());
      r.noise_sigma = parse_double_tok(t[5], reader.line());
      const auto n = parse_int_tok(t[6], reader.line());
      if (n < 2 || t.size() != 7 + static_cast<std::size_t>(n) * 3) {
        throw ParseError("route waypoint count mismatch", reader.line());
      }
      for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t base = 7 + static_cast<std::size_t>(i) * 3;
        r.waypoints.emplace_back(parse_double_tok(t[base], reader.line()),
                                 parse_double_tok(t[base + 1], reader.line()),
                                 parse_double_tok(t[base + 2], reader.line()));
      }
      cfg.routes.push_back(std::move(r));
    } else {
      throw ParseError("unknown scene-config record '" + std::string(t[0]) + "'",
                       reader.line());
    }
  }
  if (!have_scene) {
    throw ParseError("scene-config file has no scene record", reader.line());
  }
  return cfg;
}

void write_graph(std::ostream& os, const NavGraph& graph) {
  for (const auto& [id, node] : graph.nodes()) {
    os << "node " << id << ' ' << format_double(node.position.x()) << ' '
       << format_double(node.position.y()) << ' ' << format_double(node.position.z())
       << '\n';
  }
  for (const auto& [a, b] : graph.edges_ordered()) {
    os << "edge " << a << ' ' << b << '\n';
  }
}

NavGraph read_graph(std::istream& is) {
  NavGraph graph;
  LineReader reader(is);
  std::vector<std::string_view> t;
  while (reader.next(t)) {
    if (t[0] == "node") {
      expect_count(t, 5, reader.line(), "node");
      graph.insert_node(parse_int_tok(t[1], reader.line()),
                        Position{parse_double_tok(t[2], reader.line()),
                                 parse_double_tok(t[3], reader.line()),
                                 parse_double_tok(t[4], reader.line())});
    } else if (t[0] == "edge") {
      expect_count(t, 3, reader.line(), "edge");
      graph.add_edge(parse_int_tok(t[1], reader.line()),
                     parse_int_tok(t[2], reader.line()));
    } else {
      throw ParseError("unknown graph record '" + std::string(t[0]) + "'",
                       reader.line());
    }
  }
  return graph;
}

namespace {

void write_histogram_fields(std::ostream& os, const DirectionalHistogram& h) {
  os << format_double(h.first_t()) << ' ' << format_double(h.last_t());
  for (int b = 0; b < h.bins(); ++b) {
    os << ' ' << format_double(h.count(b));
  }
}

DirectionalHistogram parse_histogram_fields(const std::vector<std::string_view>& t,
                                            std::size_t offset, int bins,
                                            std::size_t line) {
  if (t.size() != offset + 2 + static_cast<std::size_t>(bins)) {
    throw ParseError("histogram record has wrong arity", line);
  }
  const double first_t = parse_double_tok(t[offset], line);
  const double last_t = parse_double_tok(t[offset + 1], line);
  Eigen::ArrayXd counts(bins);
  for (int b = 0; b < bins; ++b) {
    counts[b] = parse_double_tok(t[offset + 2 + static_cast<std::size_t>(b)], line);
  }
  return DirectionalHistogram::from_parts(std::move(counts), first_t, last_t);
}

}  // namespace

void write_model_snapshot(std::ostream& os, const BuiltModel& model) {
  const ModelParams& p = model.params;
  os << "modgraph-snapshot 1\n";
  os << "params " << format_double(p.delta) << ' ' << p.bins << ' '
     << format_double(p.d_max) << ' ' << format_double(p.tau) << ' '
     << format_double(p.bind_radius) << ' ' << p.order << ' '
     << format_double(p.update_interval) << '\n';
  os << "candidates " << p.candidate_periods.size();
  for (double T : p.candidate_periods) {
    os << ' ' << format_double(T);
  }
  os << '\n';
  for (const auto& [id, node] : model.graph.nodes()) {
    os << "node " << id << ' ' << format_double(node.position.x()) << ' '
       << format_double(node.position.y()) << ' ' << format_double(node.position.z())
       << '\n';
    if (node.owned_dynamics) {
      os << "owned " << id << ' ';
      write_histogram_fields(os, *node.owned_dynamics);
      os << '\n';
    }
    if (!node.bound_keys.empty()) {
      os << "bound " << id << ' ' << node.bound_keys.size();
      for (const CellKey& key : node.bound_keys) {
        os << ' ' << key.ix << ' ' << key.iy << ' ' << key.iz;
      }
      os << '\n';
    }
  }
  for (const auto& [a, b] : model.graph.edges_ordered()) {
    os << "edge " << a << ' ' << b << '\n';
  }
  for (const CellKey& key : model.map.keys_ordered()) {
    const HashCell* cell = model.map.lookup(key);
    os << "cell " << key.ix << ' ' << key.iy << ' ' << key.iz << ' '
       << format_double(cell->created_t) << ' ';
    write_histogram_fields(os, cell->histogram);
    os << '\n';
  }
  for (const auto& [key, ch] : model.temporal.channels()) {
    os << "channel " << key.cell.ix << ' ' << key.cell.iy << ' ' << key.cell.iz << ' '
       << key.bin << ' ' << ch.n << ' ' << format_double(ch.value_sum) << ' '
       << (ch.published ? 1 : 0) << ' ' << format_double(ch.published_mean) << ' '
       << ch.coeff_sum.size();
    for (std::size_t k = 0; k < ch.coeff_sum.size(); ++k) {
      os << ' ' << format_double(ch.coeff_sum[k].real()) << ' '
         << format_double(ch.coeff_sum[k].imag()) << ' '
         << format_double(ch.basis_sum[k].real()) << ' '
         << format_double(ch.basis_sum[k].imag());
    }
    os << ' ' << ch.components.size();
    for (const SpectralComponent& c : ch.components) {
      os << ' ' << c.candidate << ' ' << format_double(c.amplitude) << ' '
         << format_double(c.phase);
    }
    os << '\n';
  }
  os << "end\n";
}

BuiltModel read_model_snapshot(std::istream& is) {
  LineReader reader(is);
  std::vector<std::string_view> t;
  if (!reader.next(t) || t.size() != 2 || t[0] != "modgraph-snapshot" || t[1] != "1") {
    throw ParseError("not a model snapshot (bad magic line)", reader.line());
  }

  BuiltModel model;
  std::optional<SparseHashMap> map;
  std::optional<GlobalTemporalModel> temporal;
  bool have_params = false;
  bool done = false;

  auto require_params = [&](const char* what) {
    if (!have_params) {
      throw ParseError(std::string(what) + " record before params", reader.line());
    }
  };
  auto require_temporal = [&](const char* what) {
    if (!temporal) {
      throw ParseError(std::string(what) + " record before candidates", reader.line());
    }
  };

  while (reader.next(t)) {
    if (t[0] == "params") {
      expect_count(t, 8, reader.line(), "params");
      model.params.delta = parse_double_tok(t[1], reader.line());
      model.params.bins = static_cast<int>(parse_int_tok(t[2], reader.line()));
      model.params.d_max = parse_double_tok(t[3], reader.line());
      model.params.tau = parse_double_tok(t[4], reader.line());
      model.params.bind_radius = parse_double_tok(t[5], reader.line());
      model.params.order = static_cast<int>(parse_int_tok(t[6], reader.line()));
      model.params.update_interval = parse_double_tok(t[7], reader.line());
      map.emplace(model.params.delta, model.params.bins);
      model.ownership.tau = model.params.tau;
      model.ownership.bind_radius = model.params.bind_radius;
      have_params = true;
    } else if (t[0] == "candidates") {
      require_params("candidates");
      if (t.size() < 2) {
        throw ParseError("malformed candidates record", reader.line());
      }
      const auto n = parse_int_tok(t[1], reader.line());
      expect_count(t, 2 + static_cast<std::size_t>(n), reader.line(), "candidates");
      model.params.candidate_periods.clear();
      for (std::int64_t k = 0; k < n; ++k) {
        model.params.candidate_periods.push_back(
            parse_double_tok(t[2 + static_cast<std::size_t>(k)], reader.line()));
      }
      temporal.emplace(model.params.candidate_periods, model.params.order,
                       model.params.bins);
    } else if (t[0] == "node") {
      expect_count(t, 5, reader.line(), "node");
      model.graph.insert_node(parse_int_tok(t[1], reader.line()),
                              Position{parse_double_tok(t[2], reader.line()),
                                       parse_double_tok(t[3], reader.line()),
                                       parse_double_tok(t[4], reader.line())});
    } else if (t[0] == "owned") {
      require_params("owned");
      if (t.size() < 2) {
        throw ParseError("malformed owned record", reader.line());
      }
      const NodeId id = parse_int_tok(t[1], reader.line());
      if (!model.graph.has_node(id)) {
        throw ParseError("owned record for unknown node", reader.line());
      }
      model.graph.node_mut(id).owned_dynamics =
          parse_histogram_fields(t, 2, model.params.bins, reader.line());
    } else if (t[0] == "bound") {
      if (t.size() < 3) {
        throw ParseError("malformed bound record", reader.line());
      }
      const NodeId id = parse_int_tok(t[1], reader.line());
      if (!model.graph.has_node(id)) {
        throw ParseError("bound record for unknown node", reader.line());
      }
      const auto n = parse_int_tok(t[2], reader.line());
      expect_count(t, 3 + static_cast<std::size_t>(n) * 3, reader.line(), "bound");
      for (std::int64_t k = 0; k < n; ++k) {
        const std::size_t base = 3 + static_cast<std::size_t>(k) * 3;
        const CellKey key{parse_int_tok(t[base], reader.line()),
                          parse_int_tok(t[base + 1], reader.line()),
                          parse_int_tok(t[base + 2], reader.line())};
        model.graph.node_mut(id).bound_keys.insert(key);
        model.ownership.redirect[key] = id;
      }
    } else if (t[0] == "edge") {
      expect_count(t, 3, reader.line(), "edge");
      model.graph.add_edge(parse_int_tok(t[1], reader.line()),
                           parse_int_tok(t[2], reader.line()));
    } else if (t[0] == "cell") {
      require_params("cell");
      if (t.size() < 5) {
        throw ParseError("malformed cell record", reader.line());
      }
      HashCell cell;
      cell.key = CellKey{parse_int_tok(t[1], reader.line()),
                         parse_int_tok(t[2], reader.line()),
                         parse_int_tok(t[3], reader.line())};
      cell.created_t = parse_double_tok(t[4], reader.line());
      cell.histogram = parse_histogram_fields(t, 5, model.params.bins, reader.line());
      map->insert_cell(std::move(cell));
    } else if (t[0] == "channel") {
      require_temporal("channel");
      if (t.size() < 10) {
        throw ParseError("malformed channel record", reader.line());
      }
      const ChannelKey key{CellKey{parse_int_tok(t[1], reader.line()),
                                   parse_int_tok(t[2], reader.line()),
                                   parse_int_tok(t[3], reader.line())},
                           static_cast<int>(parse_int_tok(t[4], reader.line()))};
      SpectralChannel ch;
      ch.n = parse_int_tok(t[5], reader.line());
      ch.value_sum = parse_double_tok(t[6], reader.line());
      ch.published = parse_int_tok(t[7], reader.line()) != 0;
      ch.published_mean = parse_double_tok(t[8], reader.line());
      const auto n_candidates = parse_int_tok(t[9], reader.line());
      std::size_t cursor = 10;
      if (t.size() < cursor + static_cast<std::size_t>(n_candidates) * 4 + 1) {
        throw ParseError("channel record has wrong arity", reader.line());
      }
      for (std::int64_t k = 0; k < n_candidates; ++k) {
        const double re_c = parse_double_tok(t[cursor++], reader.line());
        const double im_c = parse_double_tok(t[cursor++], reader.line());
        const double re_b = parse_double_tok(t[cursor++], reader.line());
        const double im_b = parse_double_tok(t[cursor++], reader.line());
        ch.coeff_sum.emplace_back(re_c, im_c);
        ch.basis_sum.emplace_back(re_b, im_b);
      }
      const auto n_components = parse_int_tok(t[cursor++], reader.line());
      expect_count(t, cursor + static_cast<std::size_t>(n_components) * 3,
                   reader.line(), "channel");
      for (std::int64_t k = 0; k < n_components; ++k) {
        SpectralComponent c;
        c.candidate = static_cast<int>(parse_int_tok(t[cursor++], reader.line()));
        c.amplitude = parse_double_tok(t[cursor++], reader.line());
        c.phase = parse_double_tok(t[cursor++], reader.line());
        ch.components.push_back(c);
      }
      temporal->insert_channel(key, std::move(ch));
    } else if (t[0] == "end") {
      done = true;
      break;
    } else {
      throw ParseError("unknown snapshot record '" + std::string(t[0]) + "'",
                       reader.line());
    }
  }
  if (!done) {
    throw ParseError("snapshot truncated (missing end record)", reader.line());
  }
  if (!have_params || !temporal) {
    throw ParseError("snapshot missing params or candidates", reader.line());
  }
  model.map = std::move(*map);
  model.temporal = std::move(*temporal);
  return model;
}

void write_field(std::ostream& os, const DescriptorField& field) {
  os << "# cx cy total flow direction entropy\n";
  for (const auto& [idx, cd] : field) {
    os << idx.first << ' ' << idx.second << ' ' << format_double(cd.bins.sum()) << ' '
       << format_double(cd.descriptor.magnitude) << ' ';
    if (cd.descriptor.dominant_direction) {
      os << format_double(*cd.descriptor.dominant_direction);
    } else {
      os << "na";
    }
    os << ' ' << format_double(cd.descriptor.entropy) << '\n';
  }
}

void write_scene_reports_csv(std::ostream& os, const std::vector<SceneReport>& reports) {
  os << "scene,source,data,js,bhattacharyya,wasserstein,circular_correlation,"
        "overlap_cells\n";
  for (const SceneReport& r : reports) {
    const std::pair<const char*, const FieldComparison*> sources[] = {
        {"historical", &r.historical}, {"predicted", &r.predicted}};
    for (const auto& [name, fc] : sources) {
      os << r.scene_id << ',' << name << ",entropy," << format_double(fc->entropy.js)
         << ',' << format_double(fc->entropy.bhattacharyya) << ','
         << format_double(fc->entropy.wasserstein) << ",," << fc->overlap_cells << '\n';
      os << r.scene_id << ',' << name << ",flow," << format_double(fc->flow.js) << ','
         << format_double(fc->flow.bhattacharyya) << ','
         << format_double(fc->flow.wasserstein) << ",," << fc->overlap_cells << '\n';
      os << r.scene_id << ',' << name << ",direction,,,"
         << format_double(fc->direction.wasserstein_deg) << ',';
      if (fc->direction.correlation) {
        os << format_double(*fc->direction.correlation);
      }
      os << ',' << fc->overlap_cells << '\n';
    }
  }
}

void write_plan(std::ostream& os, const PlanResult& plan) {
  os << "path";
  for (NodeId id : plan.path) {
    os << ' ' << id;
  }
  os << '\n';
  for (const PlanStep& s : plan.steps) {
    os << "step " << s.from << ' ' << s.to << ' ' << format_double(s.distance) << ' '
       << format_double(s.mean_temporal) << ' ' << format_double(s.directional) << ' '
       << format_double(s.cost) << '\n';
  }
  os << "total " << format_double(plan.total_cost) << '\n';
}

void save_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  os << content;
  if (!os) {
    throw std::runtime_error("write failed: " + path);
  }
}

std::string load_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  std::ostringstream buf;
  buf << is.rdbuf();
  return std::move(buf).str();
}

}  // namespace modgraph
