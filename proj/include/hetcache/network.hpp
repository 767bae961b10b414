#pragma once

#include <cmath>

namespace hetcache {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

/// Area of a disc of radius 250 m; densities in the figure settings are
/// quoted as counts per such disc.
inline constexpr double kReferenceCellArea = 250.0 * 250.0 * 3.14159265358979323846;

inline double per_reference_cell(double count) { return count / kReferenceCellArea; }

/// Two-tier network: tier 1 is the macro layer (caches everything, m1
/// antennas), tier 2 the single-antenna cache-equipped helpers. All fields
/// are linear scale; powers in mW, densities per m^2.
struct NetworkConfig {
  double lambda1;   ///< macro density
  double lambda2;   ///< helper density
  double lambda_u;  ///< user density
  int m1;           ///< macro antennas (helpers have one)
  double p1;        ///< macro transmit power
  double p2;        ///< helper transmit power
  double b1;        ///< macro association bias
  double b2;        ///< helper association bias
  double alpha;     ///< path-loss exponent
  double gamma0;    ///< SINR threshold
  int n_cache;      ///< helper cache capacity in files

  static constexpr int kHelperAntennas = 1;

  /// Evaluation fixture: lambda1 = 1/(250^2 pi), lambda2 = lambda_u =
  /// 25/(250^2 pi), alpha = 3.7, M1 = 4, P1 = 46 dBm, P2 = 21 dBm,
  /// B1 = 0 dB, B2 = 10 dB, gamma0 = -10 dB, N_c = 100.
  static NetworkConfig default_fixture();

  double density_ratio() const { return lambda1 / lambda2; }
  double power_ratio() const { return p1 / p2; }
  double bias_ratio() const { return b1 / b2; }
  double user_helper_ratio() const { return lambda_u / lambda2; }

  /// lambda12 (P12 B12)^(2/alpha): weight of the macro tier in the
  /// association competition for a file cached with probability 1.
  double macro_weight() const {
    return density_ratio() * std::pow(power_ratio() * bias_ratio(), 2.0 / alpha);
  }

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

}  // namespace hetcache
