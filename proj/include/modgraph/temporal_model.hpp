#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "modgraph/flow_histogram.hpp"
#include "modgraph/geometry.hpp"

namespace modgraph {

inline constexpr int kDefaultSpectralOrder = 2;     // components kept per channel
inline constexpr double kDefaultUpdateInterval = 10.0;  // seconds between ingests
inline constexpr double kAmplitudeFloor = 1e-12;    // below this a component is noise

// One temporal channel per (location, orientation bin).
struct ChannelKey {
  CellKey cell;
  int bin = 0;
  friend auto operator<=>(const ChannelKey&, const ChannelKey&) = default;
};

struct SpectralComponent {
  int candidate = 0;      // index into the shared candidate-period set
  double amplitude = 0.0; // |centered Fourier coefficient|
  double phase = 0.0;     // arg of the coefficient
};

// Incrementally accumulated non-uniform Fourier sums for one channel. The
// centered coefficient for candidate k is (coeff_sum[k] - mean * basis_sum[k]) / n.
struct SpectralChannel {
  std::int64_t n = 0;
  double value_sum = 0.0;
  std::vector<std::complex<double>> coeff_sum;  // Σ v · e^{-iω_k t}
  std::vector<std::complex<double>> basis_sum;  // Σ e^{-iω_k t}

  bool published = false;
  double published_mean = 0.0;
  std::vector<SpectralComponent> components;  // ≤ K, amplitude-descending

  double mean() const { return n > 0 ? value_sum / static_cast<double>(n) : 0.0; }
};

// One spectral model shared by every channel in the map: common candidate
// periods, common order K, one update schedule. Channels are keyed by the hash
// key of where the data was observed, never by node identity, so histories
// survive binding, repositioning, and release.
class GlobalTemporalModel {
 public:
  GlobalTemporalModel() = default;
  GlobalTemporalModel(std::vector<double> candidate_periods, int order, int bins);

  int bins() const { return bins_; }
  int order() const { return order_; }
  const std::vector<double>& candidate_periods() const { return periods_; }

  // Feeds one normalized window measurement (value in [0,1]) taken at the
  // window midpoint; creates the channel on first contact.
  void ingest_window(const ChannelKey& key, double t_mid, double value);

  // Recomputes every channel's centered coefficients and republishes the
  // top-K components by amplitude.
  void update_spectrum();

  // clamp(mean + Σ 2·amp·cos(ω t + phase), 0, 1); throws NotFoundError for an
  // unknown channel.
  double predict_channel(const ChannelKey& key, double t) const;

  // Per-bin predicted activity for one location (missing bins read 0); throws
  // NotFoundError when the location has no channel at all.
  Eigen::ArrayXd predict_location(const CellKey& key, double t) const;

  bool has_channel(const ChannelKey& key) const { return channels_.count(key) != 0; }
  bool has_location(const CellKey& key) const;
  std::vector<CellKey> location_keys() const;
  std::size_t channel_count() const { return channels_.size(); }
  const std::map<ChannelKey, SpectralChannel>& channels() const { return channels_; }

  // Moves every bin channel of `from` onto `to`, merging accumulated sums
  // where `to` already has history (used when dynamics rematerialize in a
  // different cell than they were observed in).
  void remap_location(const CellKey& from, const CellKey& to);

  // Snapshot loading: install a fully formed channel record.
  void insert_channel(const ChannelKey& key, SpectralChannel channel);

 private:
  void publish(SpectralChannel& ch) const;

  std::vector<double> periods_;
  std::vector<double> omegas_;
  int order_ = kDefaultSpectralOrder;
  int bins_ = kDefaultBins;
  std::map<ChannelKey, SpectralChannel> channels_;
};

// Geometric period ladder {duration / 2^j, j = 0..steps-1}.
std::vector<double> default_candidate_periods(double duration, int steps = 7);

}  // namespace modgraph
