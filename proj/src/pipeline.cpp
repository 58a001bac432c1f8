#include "modgraph/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace modgraph {

ModelParams resolve_params(ModelParams params, double duration) {
  if (params.candidate_periods.empty()) {
    params.candidate_periods = default_candidate_periods(duration);
  }
  return params;
}

WindowAccumulator::WindowAccumulator(double interval, int bins)
    : interval_(interval), bins_(bins) {
  if (!(interval > 0.0)) {
    throw std::invalid_argument("WindowAccumulator: interval must be positive");
  }
  if (bins < 2) {
    throw std::invalid_argument("WindowAccumulator: need at least 2 bins");
  }
}

void WindowAccumulator::note(const CellKey& key, int bin, double weight) {
  if (bin < 0 || bin >= bins_) {
    throw std::invalid_argument("WindowAccumulator::note: bin out of range");
  }
  if (weight > 0.0) {
    counts_[ChannelKey{key, bin}] += weight;
  }
}

void WindowAccumulator::flush_one(double boundary, GlobalTemporalModel& model) {
  if (!(boundary > window_start_)) {
    throw std::invalid_argument("WindowAccumulator::flush_one: boundary not ahead");
  }
  for (const auto& [ck, w] : counts_) {
    known_.insert(ck.cell);
  }
  const double t_mid = 0.5 * (window_start_ + boundary);
  Eigen::ArrayXd values(bins_);
  for (const CellKey& loc : known_) {
    values.setZero();
    for (int b = 0; b < bins_; ++b) {
      auto it = counts_.find(ChannelKey{loc, b});
      if (it != counts_.end()) {
        values[b] = it->second;
      }
    }
    const double peak = values.maxCoeff();
    for (int b = 0; b < bins_; ++b) {
      model.ingest_window(ChannelKey{loc, b}, t_mid,
                          peak > 0.0 ? values[b] / peak : 0.0);
    }
  }
  counts_.clear();
  window_start_ = boundary;
}

void WindowAccumulator::advance(double t, GlobalTemporalModel& model) {
  while (window_start_ + interval_ <= t) {
    flush_one(window_start_ + interval_, model);
  }
}

void WindowAccumulator::finish(double end_time, GlobalTemporalModel& model) {
  advance(end_time, model);
  if (end_time > window_start_) {
    flush_one(end_time, model);
  }
}

void WindowAccumulator::remap(const CellKey& from, const CellKey& to) {
  if (from == to) {
    return;
  }
  for (int b = 0; b < bins_; ++b) {
    auto it = counts_.find(ChannelKey{from, b});
    if (it == counts_.end()) {
      continue;
    }
    counts_[ChannelKey{to, b}] += it->second;
    counts_.erase(it);
  }
  if (known_.erase(from) > 0) {
    known_.insert(to);
  }
}

ModelBuilder::ModelBuilder(ModelParams params, NavGraph graph)
    : params_(params),
      graph_(std::move(graph)),
      map_(params.delta, params.bins),
      temporal_(params.candidate_periods, params.order, params.bins),
      window_(params.update_interval, params.bins) {
  ownership_.tau = params.tau;
  ownership_.bind_radius = params.bind_radius;
}

void ModelBuilder::advance_to(double t) {
  if (t < now_) {
    throw std::invalid_argument("ModelBuilder: replay input is not time-ordered");
  }
  while (window_.window_start() + params_.update_interval <= t) {
    const double boundary = window_.window_start() + params_.update_interval;
    window_.flush_one(boundary, temporal_);
    bind_stable_cells(ownership_, graph_, map_, boundary);
  }
  now_ = t;
}

void ModelBuilder::observe(const Observation& obs) {
  advance_to(obs.t);
  const RouteResult routed = route_observation(ownership_, graph_, map_, obs.position,
                                               obs.heading, obs.t, 1.0);
  window_.note(routed.key, routed.bin, 1.0);
}

void ModelBuilder::handle_release(const ReleaseResult& res) {
  if (!res.destination_key) {
    return;
  }
  const CellKey dest = *res.destination_key;
  for (const CellKey& key : res.released_keys) {
    if (key == dest) {
      continue;
    }
    temporal_.remap_location(key, dest);
    window_.remap(key, dest);
  }
}

void ModelBuilder::apply_topology(const TopologyEvent& ev) {
  advance_to(ev.t);
  const auto release = apply_event(ownership_, graph_, map_, ev);
  if (release) {
    handle_release(*release);
  }
}

BuiltModel ModelBuilder::finish(double end_time) {
  advance_to(end_time);
  if (end_time > window_.window_start()) {
    window_.flush_one(end_time, temporal_);
  }
  bind_stable_cells(ownership_, graph_, map_, end_time);
  temporal_.update_spectrum();
  BuiltModel out;
  out.params = std::move(params_);
  out.graph = std::move(graph_);
  out.map = std::move(map_);
  out.ownership = std::move(ownership_);
  out.temporal = std::move(temporal_);
  return out;
}

GridBuilder::GridBuilder(const GridSpec& spec, const ModelParams& params)
    : grid_(spec, params.bins, params.candidate_periods, params.order),
      window_(params.update_interval, params.bins) {}

void GridBuilder::observe(const Observation& obs) {
  if (obs.t < now_) {
    throw std::invalid_argument("GridBuilder: replay input is not time-ordered");
  }
  window_.advance(obs.t, grid_.temporal());
  now_ = obs.t;
  grid_.accumulate(obs.position, obs.heading, obs.t, 1.0);
  const auto [cx, cy] = grid_.spec().cell_of(obs.position);
  window_.note(CellKey{cx, cy, 0}, orientation_bin(obs.heading, grid_.bins()), 1.0);
}

GridModel GridBuilder::finish(double end_time) {
  window_.finish(end_time, grid_.temporal());
  grid_.temporal().update_spectrum();
  return std::move(grid_);
}

GridSpec grid_spec_for_scene(const SceneConfig& cfg, double resolution, double margin) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("grid_spec_for_scene: resolution must be positive");
  }
  const Eigen::AlignedBox2d box = route_bounding_box(cfg.routes, margin);
  GridSpec spec;
  spec.resolution = resolution;
  // Snap the origin onto the lattice so grid cells coincide with hash cells.
  spec.origin = Position{std::floor(box.min().x() / resolution) * resolution,
                         std::floor(box.min().y() / resolution) * resolution, 0.0};
  spec.nx = static_cast<int>(std::ceil((box.max().x() - spec.origin.x()) / resolution));
  spec.ny = static_cast<int>(std::ceil((box.max().y() - spec.origin.y()) / resolution));
  return spec;
}

BuiltModel build_model(const ObservationStream& stream,
                       const std::vector<TopologyEvent>& events, ModelParams params,
                       NavGraph graph, double end_time) {
  ModelBuilder builder(std::move(params), std::move(graph));
  std::size_t oi = 0;
  std::size_t ei = 0;
  while (oi < stream.size() || ei < events.size()) {
    const bool take_event =
        ei < events.size() && (oi >= stream.size() || events[ei].t <= stream[oi].t);
    if (take_event) {
      builder.apply_topology(events[ei++]);
    } else {
      builder.observe(stream[oi++]);
    }
  }
  return builder.finish(end_time);
}

GridModel build_grid_model(const ObservationStream& stream, const GridSpec& spec,
                           const ModelParams& params, double end_time) {
  GridBuilder builder(spec, params);
  for (const Observation& obs : stream) {
    builder.observe(obs);
  }
  return builder.finish(end_time);
}

}  // namespace modgraph
