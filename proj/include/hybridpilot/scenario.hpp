#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hybridpilot/rng.hpp"

namespace hp {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Network geometry, large-scale fading and noise as seen by the target-cell
/// base station. Cell 0 is the target cell; beta(j, k) is the large-scale
/// power gain of user k in cell j toward the target BS.
struct NetworkScenario {
  int L = 1;           // cells
  int K = 1;           // users per cell
  int M = 1;           // BS antennas
  int T = 1;           // coherence frame length (symbols)
  double gamma = 3.8;  // path-loss exponent
  double sigma_n2 = 0.01;
  Eigen::MatrixXd beta;  // L x K

  std::uint64_t seed = 0;   // seed used for the user drop
  double snr_db = 20.0;     // convenience: sigma_n2 = 10^(-snr_db/10)

  int num_users() const { return L * K; }
  // flat column index of user (j, k)
  int user_index(int j, int k) const { return j * K + k; }

  void validate() const;
};

/// One draw of small-scale fading: column (j,k) is h_{j,k} = sqrt(beta) * g.
struct ChannelRealization {
  Eigen::MatrixXcd H;  // M x (L*K)
};

// Minimum BS-user distance (normalized units). Keeps the distance-ratio
// path-loss law bounded.
inline constexpr double kMinUserDistance = 0.1;

/// Drop K users uniformly in each of L hexagonal cells (center-to-vertex
/// radius 1). Supported layouts: L in {1, 3, 7}. Throws std::invalid_argument
/// otherwise.
std::vector<std::vector<Point>> place_users(int L, int K, TrialRng& rng);

/// Cell centers of the hexagonal layout for L in {1, 3, 7}.
std::vector<Point> cell_centers(int L);

/// Distance-ratio path-loss law: beta_{j,k} = (d_own / d_target)^gamma * beta_ref,
/// with in-cell users pinned to beta_ref exactly.
Eigen::MatrixXd large_scale_fading(const std::vector<std::vector<Point>>& positions,
                                   const std::vector<Point>& centers, double gamma,
                                   double beta_ref);

/// i.i.d. CN(0,1) small-scale fading scaled by sqrt(beta).
ChannelRealization sample_channel(const NetworkScenario& sc, TrialRng& rng);

/// Builds a scenario from (L, K, M, T, gamma, snr_db, seed): drops users with
/// the given seed and fills the beta table with beta_ref = 1.
NetworkScenario make_scenario(int L, int K, int M, int T, double gamma, double snr_db,
                              std::uint64_t seed);

// Plain-text key-value config (fields L, K, M, T, gamma, snr_db, seed, layout).
NetworkScenario load_scenario(std::istream& in);
NetworkScenario load_scenario_file(const std::string& path);
void save_scenario(const NetworkScenario& sc, std::ostream& out);

}  // namespace hp
