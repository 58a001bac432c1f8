#include "modgraph/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "modgraph/errors.hpp"

namespace modgraph {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

std::pair<Eigen::ArrayXd, Eigen::ArrayXd> scalar_histograms(
    const std::vector<double>& a, const std::vector<double>& b, int bins) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("scalar_histograms: empty sample");
  }
  if (bins < 1) {
    throw std::invalid_argument("scalar_histograms: need at least 1 bin");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* sample : {&a, &b}) {
    for (double v : *sample) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  Eigen::ArrayXd ha = Eigen::ArrayXd::Zero(bins);
  Eigen::ArrayXd hb = Eigen::ArrayXd::Zero(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  auto bin_of = [&](double v) {
    if (width <= 0.0) {
      return 0;  // all values identical: everything lands in one bin
    }
    const int idx = static_cast<int>(std::floor((v - lo) / width));
    return std::clamp(idx, 0, bins - 1);
  };
  for (double v : a) {
    ha[bin_of(v)] += 1.0;
  }
  for (double v : b) {
    hb[bin_of(v)] += 1.0;
  }
  return {ha / ha.sum(), hb / hb.sum()};
}

FieldComparison evaluate_fields(const DescriptorField& a, const DescriptorField& b) {
  std::vector<double> entropy_a;
  std::vector<double> entropy_b;
  std::vector<double> flow_a;
  std::vector<double> flow_b;
  std::vector<double> dir_a;
  std::vector<double> dir_b;
  double circ_w_sum = 0.0;
  std::size_t circ_w_cells = 0;
  std::size_t overlap = 0;

  for (const auto& [idx, ca] : a) {
    auto it = b.find(idx);
    if (it == b.end()) {
      continue;
    }
    const CellDescriptor& cb = it->second;
    ++overlap;
    entropy_a.push_back(ca.descriptor.entropy);
    entropy_b.push_back(cb.descriptor.entropy);
    flow_a.push_back(ca.descriptor.magnitude);
    flow_b.push_back(cb.descriptor.magnitude);
    if (ca.bins.sum() > 0.0 && cb.bins.sum() > 0.0 &&
        ca.bins.size() == cb.bins.size()) {
      circ_w_sum += circular_wasserstein(normalize_values(ca.bins),
                                         normalize_values(cb.bins));
      ++circ_w_cells;
    }
    if (ca.descriptor.dominant_direction && cb.descriptor.dominant_direction) {
      dir_a.push_back(*ca.descriptor.dominant_direction);
      dir_b.push_back(*cb.descriptor.dominant_direction);
    }
  }

  if (overlap == 0) {
    throw EmptyOverlapError("evaluate_fields: the two fields share no cells");
  }

  FieldComparison out;
  out.overlap_cells = overlap;

  const auto [pe, qe] = scalar_histograms(entropy_a, entropy_b);
  out.entropy.js = js_divergence(pe, qe);
  out.entropy.bhattacharyya = bhattacharyya(pe, qe);
  out.entropy.wasserstein = wasserstein_empirical(entropy_a, entropy_b);

  const auto [pf, qf] = scalar_histograms(flow_a, flow_b);
  out.flow.js = js_divergence(pf, qf);
  out.flow.bhattacharyya = bhattacharyya(pf, qf);
  out.flow.wasserstein = wasserstein_empirical(flow_a, flow_b);

  out.direction.compared_cells = circ_w_cells;
  out.direction.wasserstein_deg =
      circ_w_cells > 0 ? circ_w_sum / static_cast<double>(circ_w_cells) : kNaN;
  out.direction.correlated_cells = dir_a.size();
  if (dir_a.size() >= 2) {
    try {
      out.direction.correlation = circular_correlation(dir_a, dir_b);
    } catch (const UndefinedResultError&) {
      out.direction.correlation = std::nullopt;
    }
  }
  return out;
}

FieldComparison evaluate_scene_mode(const NavGraph& graph, const SparseHashMap& map,
                                    const GlobalTemporalModel& temporal,
                                    const GridModel& grid, FieldMode mode,
                                    double t_eval) {
  const DescriptorField graph_field =
      rasterize_graph_model(graph, map, temporal, grid.spec(), mode, t_eval);
  const DescriptorField grid_field = grid_descriptor_field(grid, mode, t_eval);
  return evaluate_fields(graph_field, grid_field);
}

SceneReport evaluate_scene(const NavGraph& graph, const SparseHashMap& map,
                           const GlobalTemporalModel& temporal, const GridModel& grid,
                           int scene_id, double t_eval) {
  SceneReport report;
  report.scene_id = scene_id;
  report.historical = evaluate_scene_mode(graph, map, temporal, grid,
                                          FieldMode::historical, t_eval);
  report.predicted = evaluate_scene_mode(graph, map, temporal, grid,
                                         FieldMode::predicted, t_eval);
  return report;
}

namespace {

AggregateStat stat_of(const std::vector<double>& raw) {
  AggregateStat s;
  std::vector<double> vals;
  for (double v : raw) {
    if (std::isfinite(v)) {
      vals.push_back(v);
    } else {
      ++s.excluded;
    }
  }
  s.count = vals.size();
  if (vals.empty()) {
    return s;
  }
  double sum = 0.0;
  for (double v : vals) {
    sum += v;
  }
  s.mean = sum / static_cast<double>(vals.size());
  if (vals.size() >= 2) {
    double sq = 0.0;
    for (double v : vals) {
      sq += (v - s.mean) * (v - s.mean);
    }
    s.std_dev = std::sqrt(sq / static_cast<double>(vals.size() - 1));
  }
  return s;
}

const FieldComparison& pick(const SceneReport& r, const std::string& source) {
  return source == "historical" ? r.historical : r.predicted;
}

}  // namespace

AggregateReport aggregate(const std::vector<SceneReport>& reports) {
  if (reports.empty()) {
    throw std::invalid_argument("aggregate: need at least one scene report");
  }
  AggregateReport out;
  out.scene_count = reports.size();
  for (const std::string source : {"historical", "predicted"}) {
    for (const std::string data : {"entropy", "flow", "direction"}) {
      AggregateRow row;
      row.source = source;
      row.data_type = data;
      std::vector<double> js;
      std::vector<double> bh;
      std::vector<double> ws;
      std::vector<double> corr;
      for (const SceneReport& r : reports) {
        const FieldComparison& fc = pick(r, source);
        if (data == "entropy" || data == "flow") {
          const MetricSet& ms = data == "entropy" ? fc.entropy : fc.flow;
          js.push_back(ms.js);
          bh.push_back(ms.bhattacharyya);
          ws.push_back(ms.wasserstein);
        } else {
          ws.push_back(fc.direction.wasserstein_deg);
          corr.push_back(fc.direction.correlation ? *fc.direction.correlation : kNaN);
        }
      }
      if (data != "direction") {
        row.js = stat_of(js);
        row.bhattacharyya = stat_of(bh);
      } else {
        row.correlation = stat_of(corr);
      }
      row.wasserstein = stat_of(ws);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

namespace {

std::string format_stat(const std::optional<AggregateStat>& s) {
  if (!s || s->count == 0) {
    return "n/a";
  }
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << s->mean << " +/- " << s->std_dev;
  if (s->excluded > 0) {
    os << " (excl " << s->excluded << ")";
  }
  return os.str();
}

}  // namespace

std::string render_table(const AggregateReport& report) {
  std::ostringstream os;
  os << "scenes: " << report.scene_count << "\n";
  const int w0 = 12;
  const int w1 = 11;
  const int wc = 22;
  auto pad = [](const std::string& s, int w) {
    return s.size() >= static_cast<std::size_t>(w)
               ? s + " "
               : s + std::string(static_cast<std::size_t>(w) - s.size(), ' ');
  };
  os << pad("source", w0) << pad("data", w1) << pad("JS", wc)
     << pad("Bhattacharyya", wc) << pad("Wasserstein", wc) << pad("CircCorr", wc)
     << "\n";
  for (const AggregateRow& row : report.rows) {
    os << pad(row.source, w0) << pad(row.data_type, w1) << pad(format_stat(row.js), wc)
       << pad(format_stat(row.bhattacharyya), wc)
       << pad(format_stat(row.wasserstein), wc) << pad(format_stat(row.correlation), wc)
       << "\n";
  }
  return os.str();
}

}  // namespace modgraph
