#include "hybridpilot/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hp {

void NetworkScenario::validate() const {
  if (L < 1 || K < 1 || M < 1) throw std::invalid_argument("scenario dimensions must be >= 1");
  if (T < L * K) throw std::invalid_argument("frame length T must be >= K*L");
  if (sigma_n2 <= 0.0) throw std::invalid_argument("noise variance must be positive");
  if (beta.rows() != L || beta.cols() != K)
    throw std::invalid_argument("beta table must be L x K");
  if ((beta.array() <= 0.0).any()) throw std::invalid_argument("beta entries must be positive");
}

std::vector<Point> cell_centers(int L) {
  if (L != 1 && L != 3 && L != 7)
    throw std::invalid_argument("unsupported layout: L must be 1, 3 or 7");
  std::vector<Point> c{{0.0, 0.0}};
  const double d = std::sqrt(3.0);  // center-to-center distance, unit circumradius
  for (int i = 0; i + 1 < L; ++i) {
    double ang = M_PI / 6.0 + i * M_PI / 3.0;
    c.push_back({d * std::cos(ang), d * std::sin(ang)});
  }
  return c;
}

namespace {

// Pointy-top hexagon, circumradius 1, centered at the origin.
bool inside_hexagon(double x, double y) {
  const double s3h = std::sqrt(3.0) / 2.0;
  double ax = std::abs(x), ay = std::abs(y);
  if (ax > s3h || ay > 1.0) return false;
  return s3h * ay + 0.5 * ax <= s3h + 1e-15;
}

}  // namespace

std::vector<std::vector<Point>> place_users(int L, int K, TrialRng& rng) {
  auto centers = cell_centers(L);
  std::vector<std::vector<Point>> pos(L, std::vector<Point>(K));
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < K; ++k) {
      for (;;) {
        double x = rng.uniform(-1.0, 1.0);
        double y = rng.uniform(-1.0, 1.0);
        if (!inside_hexagon(x, y)) continue;
        if (std::hypot(x, y) < kMinUserDistance) continue;
        pos[j][k] = {centers[j].x + x, centers[j].y + y};
        break;
      }
    }
  }
  return pos;
}

Eigen::MatrixXd large_scale_fading(const std::vector<std::vector<Point>>& positions,
                                   const std::vector<Point>& centers, double gamma,
                                   double beta_ref) {
  const int L = static_cast<int>(positions.size());
  const int K = static_cast<int>(positions.at(0).size());
  Eigen::MatrixXd beta(L, K);
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < K; ++k) {
      if (j == 0) {
        beta(j, k) = beta_ref;
        continue;
      }
      const Point& u = positions[j][k];
      double d_own = std::hypot(u.x - centers[j].x, u.y - centers[j].y);
      double d_tgt = std::hypot(u.x - centers[0].x, u.y - centers[0].y);
      if (d_own <= 0.0 || d_tgt <= 0.0)
        throw std::invalid_argument("user coincides with a base station");
      beta(j, k) = std::pow(d_own / d_tgt, gamma) * beta_ref;
    }
  }
  return beta;
}

ChannelRealization sample_channel(const NetworkScenario& sc, TrialRng& rng) {
  ChannelRealization ch;
  ch.H.resize(sc.M, sc.num_users());
  for (int j = 0; j < sc.L; ++j) {
    for (int k = 0; k < sc.K; ++k) {
      const double scale = std::sqrt(sc.beta(j, k));
      const int col = sc.user_index(j, k);
      for (int m = 0; m < sc.M; ++m) ch.H(m, col) = scale * rng.cgaussian();
    }
  }
  return ch;
}

NetworkScenario make_scenario(int L, int K, int M, int T, double gamma, double snr_db,
                              std::uint64_t seed) {
  NetworkScenario sc;
  sc.L = L;
  sc.K = K;
  sc.M = M;
  sc.T = T;
  sc.gamma = gamma;
  sc.snr_db = snr_db;
  sc.sigma_n2 = std::pow(10.0, -snr_db / 10.0);
  sc.seed = seed;
  TrialRng rng(seed, /*stream=*/0xb0a7);
  auto pos = place_users(L, K, rng);
  sc.beta = large_scale_fading(pos, cell_centers(L), gamma, /*beta_ref=*/1.0);
  sc.validate();
  return sc;
}

NetworkScenario load_scenario(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto need = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("config missing key: " + key);
    return it->second;
  };
  auto opt = [&](const std::string& key, const std::string& dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
  };
  int L = std::stoi(need("L"));
  if (kv.count("layout")) {
    std::string layout = kv["layout"];
    int Ll = layout == "hex1" ? 1 : layout == "hex3" ? 3 : layout == "hex7" ? 7 : -1;
    if (Ll < 0) throw std::invalid_argument("unknown layout: " + layout);
    if (Ll != L) throw std::invalid_argument("layout does not match L");
  }
  return make_scenario(L, std::stoi(need("K")), std::stoi(need("M")), std::stoi(need("T")),
                       std::stod(opt("gamma", "3.8")), std::stod(opt("snr_db", "20")),
                       std::stoull(opt("seed", "1")));
}

NetworkScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return load_scenario(in);
}

void save_scenario(const NetworkScenario& sc, std::ostream& out) {
  out << "L = " << sc.L << "\n"
      << "K = " << sc.K << "\n"
      << "M = " << sc.M << "\n"
      << "T = " << sc.T << "\n"
      << "gamma = " << sc.gamma << "\n"
      << "snr_db = " << sc.snr_db << "\n"
      << "seed = " << sc.seed << "\n"
      << "layout = hex" << sc.L << "\n";
}

}  // namespace hp
