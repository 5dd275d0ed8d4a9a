// Random points inside the flow tile of a partition cell, with modes that
// deliberately pin coordinates onto the tile's walls so the analytic wall
// bounds have applicable samples. Thin forwarder to the library sampler so the
// tests and the verification suites draw from one implementation.
#pragma once

#include <vector>

#include "conleyflow/cvf.hpp"
#include "conleyflow/verify.hpp"
#include "gen.hpp"

namespace sampling {

enum TileMode {
  Bulk = conleyflow::verify::Bulk,
  TailWall = conleyflow::verify::TailWall,
  HeadWall = conleyflow::verify::HeadWall,
  OffWall = conleyflow::verify::OffWall
};

inline std::vector<double> tile_point(gen::Rng& r, const conleyflow::VCell& cell, int d,
                                      double eps, int mode) {
  return conleyflow::verify::tile_point(r, cell, d, eps, mode);
}

}  // namespace sampling
