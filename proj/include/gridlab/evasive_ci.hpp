#pragma once

// Bridge audit: an evasive set stays small on small cylinder intersections.
// The slice cover bounds E_{w~D}[F] by maxRatio * (fractional cover value);
// the direct count must never exceed the implied bound.

#include <string>

#include "gridlab/cover.hpp"
#include "gridlab/evasive.hpp"

namespace gridlab {

template <class R>
struct PseudorandomCIReport {
  AuditStatus status = AuditStatus::Pass;
  int tExp = 0;
  R ciDensity{};        // E[F] under the uniform measure
  R direct{};           // E_{w~D}[F]
  R implied{};          // maxRatio * fractional cover value
  R coverValue{};
  EvasivenessReport<R> evasiveness;
  std::string note;
};

template <class R>
PseudorandomCIReport<R> pseudorandom_ci_audit(const Grid3Indicator& D,
                                              const CylinderIntersection& F, int t,
                                              double floorConstant = 3.0,
                                              const ColGenConfig& cfg = {}) {
  PseudorandomCIReport<R> rep;
  rep.tExp = t;
  if (D.dims() != F.dims()) throw DimensionError("pseudorandom_ci_audit: domain mismatch");
  if (D.count() == 0) throw DegenerateError("pseudorandom_ci_audit: empty D");
  Grid3Indicator ind = F.to_indicator();
  rep.ciDensity = expectation<R>(ind);
  if (t < 0 || rep.ciDensity > pow2<R>(-t)) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "E[F] above 2^-t";
    return rep;
  }
  if (ind.count() == 0) {
    rep.direct = R(0);
    rep.implied = R(0);
    rep.status = AuditStatus::Pass;
    return rep;
  }
  int floorExp = static_cast<int>(std::ceil(floorConstant * t));
  auto fc = solve_fractional_cover<R>(ind, pow2<R>(-std::max(floorExp, 0)), cfg);
  rep.coverValue = fc.value;
  rep.evasiveness = evasiveness_audit<R>(D, floorExp, cfg.pointAxisCap);
  if (!rep.evasiveness.found) {
    rep.status = AuditStatus::HypothesisUnmet;
    rep.note = "no slice meets the evasiveness floor";
    return rep;
  }
  long long onD = 0;
  for (long long i = 0; i < D.dims().cells(); ++i)
    if (D.b[static_cast<size_t>(i)] && ind.b[static_cast<size_t>(i)]) ++onD;
  rep.direct = make_ratio<R>(onD, D.count());
  rep.implied = rep.evasiveness.maxRatio * fc.value;
  rep.status = leq(rep.direct, rep.implied, kDefaultTol) ? AuditStatus::Pass : AuditStatus::Fail;
  if (rep.status == AuditStatus::Fail) rep.note = "direct density exceeds the cover-implied bound";
  return rep;
}

}  // namespace gridlab
