#include "hetcache/network.hpp"

#include "hetcache/common.hpp"

namespace hetcache {
namespace {

void require(bool ok, const char* field, const char* message) {
  if (!ok) {
    throw ConfigError(field, message);
  }
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

NetworkConfig NetworkConfig::default_fixture() {
  return NetworkConfig{
      .lambda1 = per_reference_cell(1.0),
      .lambda2 = per_reference_cell(25.0),
      .lambda_u = per_reference_cell(25.0),
      .m1 = 4,
      .p1 = dbm_to_mw(46.0),
      .p2 = dbm_to_mw(21.0),
      .b1 = db_to_linear(0.0),
      .b2 = db_to_linear(10.0),
      .alpha = 3.7,
      .gamma0 = db_to_linear(-10.0),
      .n_cache = 100,
  };
}

void NetworkConfig::validate() const {
  require(positive(lambda1), "lambda1", "density must be > 0");
  require(positive(lambda2), "lambda2", "density must be > 0");
  require(positive(lambda_u), "lambda_u", "density must be > 0");
  require(m1 >= 1, "m1", "antenna count must be >= 1");
  require(positive(p1), "p1", "power must be > 0");
  require(positive(p2), "p2", "power must be > 0");
  require(positive(b1), "b1", "bias must be > 0 (linear)");
  require(positive(b2), "b2", "bias must be > 0 (linear)");
  require(std::isfinite(alpha) && alpha > 2.0, "alpha", "path-loss exponent must be > 2");
  require(std::isfinite(gamma0) && gamma0 >= 0.0, "gamma0", "threshold must be >= 0 (linear)");
  require(n_cache >= 0, "n_cache", "cache size must be >= 0");
}

}  // namespace hetcache
