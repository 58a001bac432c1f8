#include "modgraph/temporal_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modgraph/errors.hpp"

namespace modgraph {

GlobalTemporalModel::GlobalTemporalModel(std::vector<double> candidate_periods,
                                         int order, int bins)
    : periods_(std::move(candidate_periods)), order_(order), bins_(bins) {
  if (periods_.empty()) {
    throw std::invalid_argument("GlobalTemporalModel: need at least one candidate period");
  }
  for (double T : periods_) {
    if (!(T > 0.0) || !std::isfinite(T)) {
      throw std::invalid_argument("GlobalTemporalModel: periods must be positive");
    }
  }
  std::vector<double> sorted = periods_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("GlobalTemporalModel: candidate periods must be distinct");
  }
  if (order_ < 1) {
    throw std::invalid_argument("GlobalTemporalModel: order must be at least 1");
  }
  if (bins_ < 2) {
    throw std::invalid_argument("GlobalTemporalModel: need at least 2 bins");
  }
  omegas_.reserve(periods_.size());
  for (double T : periods_) {
    omegas_.push_back(kTwoPi / T);
  }
}

void GlobalTemporalModel::ingest_window(const ChannelKey& key, double t_mid,
                                        double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("ingest_window: value must lie in [0, 1]");
  }
  if (!std::isfinite(t_mid)) {
    throw std::invalid_argument("ingest_window: time must be finite");
  }
  if (key.bin < 0 || key.bin >= bins_) {
    throw std::invalid_argument("ingest_window: bin out of range");
  }
  auto it = channels_.find(key);
  if (it == channels_.end()) {
    SpectralChannel fresh;
    fresh.coeff_sum.assign(periods_.size(), {0.0, 0.0});
    fresh.basis_sum.assign(periods_.size(), {0.0, 0.0});
    it = channels_.emplace(key, std::move(fresh)).first;
  }
  SpectralChannel& ch = it->second;
  ch.n += 1;
  ch.value_sum += value;
  for (std::size_t k = 0; k < omegas_.size(); ++k) {
    const std::complex<double> e = std::polar(1.0, -omegas_[k] * t_mid);
    ch.coeff_sum[k] += value * e;
    ch.basis_sum[k] += e;
  }
}

void GlobalTemporalModel::publish(SpectralChannel& ch) const {
  ch.published_mean = ch.mean();
  ch.components.clear();
  if (ch.n == 0) {
    ch.published = true;
    return;
  }
  std::vector<SpectralComponent> all;
  all.reserve(omegas_.size());
  for (std::size_t k = 0; k < omegas_.size(); ++k) {
    const std::complex<double> gamma =
        (ch.coeff_sum[k] - ch.published_mean * ch.basis_sum[k]) /
        static_cast<double>(ch.n);
    const double amp = std::abs(gamma);
    if (amp > kAmplitudeFloor) {
      all.push_back({static_cast<int>(k), amp, std::arg(gamma)});
    }
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.amplitude != b.amplitude) {
      return a.amplitude > b.amplitude;
    }
    return a.candidate < b.candidate;
  });
  if (all.size() > static_cast<std::size_t>(order_)) {
    all.resize(static_cast<std::size_t>(order_));
  }
  ch.components = std::move(all);
  ch.published = true;
}

void GlobalTemporalModel::update_spectrum() {
  for (auto& [key, ch] : channels_) {
    publish(ch);
  }
}

double GlobalTemporalModel::predict_channel(const ChannelKey& key, double t) const {
  auto it = channels_.find(key);
  if (it == channels_.end()) {
    throw NotFoundError("predict_channel: unknown channel");
  }
  const SpectralChannel& ch = it->second;
  double p = ch.published ? ch.published_mean : ch.mean();
  if (ch.published) {
    for (const SpectralComponent& c : ch.components) {
      p += 2.0 * c.amplitude * std::cos(omegas_[c.candidate] * t + c.phase);
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

Eigen::ArrayXd GlobalTemporalModel::predict_location(const CellKey& key, double t) const {
  if (!has_location(key)) {
    throw NotFoundError("predict_location: no channel for this location");
  }
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(bins_);
  for (int b = 0; b < bins_; ++b) {
    auto it = channels_.find(ChannelKey{key, b});
    if (it != channels_.end()) {
      out[b] = predict_channel(ChannelKey{key, b}, t);
    }
  }
  return out;
}

bool GlobalTemporalModel::has_location(const CellKey& key) const {
  // Channels for one cell are contiguous under (cell, bin) ordering.
  auto it = channels_.lower_bound(ChannelKey{key, 0});
  return it != channels_.end() && it->first.cell == key;
}

std::vector<CellKey> GlobalTemporalModel::location_keys() const {
  std::vector<CellKey> keys;
  for (const auto& [key, ch] : channels_) {
    if (keys.empty() || !(keys.back() == key.cell)) {
      keys.push_back(key.cell);
    }
  }
  return keys;
}

void GlobalTemporalModel::remap_location(const CellKey& from, const CellKey& to) {
  if (from == to) {
    return;
  }
  for (int b = 0; b < bins_; ++b) {
    auto it = channels_.find(ChannelKey{from, b});
    if (it == channels_.end()) {
      continue;
    }
    SpectralChannel moved = std::move(it->second);
    channels_.erase(it);
    auto dst = channels_.find(ChannelKey{to, b});
    if (dst == channels_.end()) {
      channels_.emplace(ChannelKey{to, b}, std::move(moved));
      continue;
    }
    SpectralChannel& ch = dst->second;
    ch.n += moved.n;
    ch.value_sum += moved.value_sum;
    for (std::size_t k = 0; k < ch.coeff_sum.size(); ++k) {
      ch.coeff_sum[k] += moved.coeff_sum[k];
      ch.basis_sum[k] += moved.basis_sum[k];
    }
    if (ch.published || moved.published) {
      publish(ch);  // keep the published view coherent with the merged sums
    }
  }
}

void GlobalTemporalModel::insert_channel(const ChannelKey& key, SpectralChannel channel) {
  if (channel.coeff_sum.size() != periods_.size() ||
      channel.basis_sum.size() != periods_.size()) {
    throw std::invalid_argument("insert_channel: candidate arity mismatch");
  }
  channels_[key] = std::move(channel);
}

std::vector<double> default_candidate_periods(double duration, int steps) {
  if (!(duration > 0.0) || steps < 1) {
    throw std::invalid_argument("default_candidate_periods: bad arguments");
  }
  std::vector<double> periods;
  periods.reserve(steps);
  double T = duration;
  for (int j = 0; j < steps; ++j) {
    periods.push_back(T);
    T /= 2.0;
  }
  return periods;
}

}  // namespace modgraph
