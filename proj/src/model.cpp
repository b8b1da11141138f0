#include "bsb/model.hpp"

#include <cmath>
#include <sstream>

#include "bsb/errors.hpp"

namespace bsb {

std::string_view to_string(DampingCase c) {
  switch (c) {
    case DampingCase::DDD: return "DDD";
    case DampingCase::UDU: return "UDU";
    case DampingCase::Conservative: return "Conservative";
    case DampingCase::Other: return "Other";
  }
  return "Other";
}

StructureConfig validate_config(const StructureConfig& cfg) {
  for (double v : {cfg.l0, cfg.l1, cfg.l2, cfg.l3, cfg.rho1, cfg.rho2, cfg.beta}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonfiniteValue, "configuration contains a non-finite value");
  }
  if (!(cfg.l0 < cfg.l1 && cfg.l1 < cfg.l2 && cfg.l2 < cfg.l3)) {
    std::ostringstream os;
    os << "need l0 < l1 < l2 < l3, got " << cfg.l0 << ", " << cfg.l1 << ", " << cfg.l2 << ", " << cfg.l3;
    throw Error(ErrorCode::OrderingViolation, os.str());
  }
  if (cfg.rho1 < 0.0 || cfg.rho2 < 0.0 || cfg.beta < 0.0) {
    std::ostringstream os;
    os << "damping coefficients must be >= 0, got rho1=" << cfg.rho1 << " rho2=" << cfg.rho2
       << " beta=" << cfg.beta;
    throw Error(ErrorCode::NegativeDamping, os.str());
  }
  return cfg;
}

DampingCase classify_damping(const StructureConfig& cfg) {
  const bool beams_damped = cfg.rho1 > 0.0 && cfg.rho2 > 0.0;
  const bool beams_free = cfg.rho1 == 0.0 && cfg.rho2 == 0.0;
  if (beams_damped && cfg.beta > 0.0) return DampingCase::DDD;
  if (beams_free && cfg.beta > 0.0) return DampingCase::UDU;
  if (beams_free && cfg.beta == 0.0) return DampingCase::Conservative;
  return DampingCase::Other;
}

}  // namespace bsb
