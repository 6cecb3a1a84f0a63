#include "argo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "argo/error.hpp"

namespace argo {

ProfileDataset::ProfileDataset(std::vector<Observation> obs)
    : obs_(std::move(obs)) {
  for (const Observation& o : obs_) {
    validate_point(o.point);
    if (!std::isfinite(o.temp) || !std::isfinite(o.psal))
      throw data_error("non-finite residual for float " + o.float_id);
  }
  std::sort(obs_.begin(), obs_.end(),
            [](const Observation& a, const Observation& b) {
              return std::tie(a.float_id, a.point.pres, a.point.lat,
                              a.point.lon) < std::tie(b.float_id, b.point.pres,
                                                      b.point.lat, b.point.lon);
            });
  for (std::size_t k = 1; k < obs_.size(); ++k) {
    if (obs_[k].float_id == obs_[k - 1].float_id &&
        obs_[k].point == obs_[k - 1].point)
      throw data_error("duplicate observation key for float " +
                       obs_[k].float_id);
  }
  std::size_t start = 0;
  for (std::size_t k = 0; k <= obs_.size(); ++k) {
    if (k == obs_.size() ||
        (k > start && obs_[k].float_id != obs_[start].float_id)) {
      if (k > start) index_[obs_[start].float_id] = ObsRange{start, k};
      start = k;
    }
  }
}

std::vector<GeoPoint> ProfileDataset::points() const {
  std::vector<GeoPoint> pts;
  pts.reserve(obs_.size());
  for (const Observation& o : obs_) pts.push_back(o.point);
  return pts;
}

ProfileDataset ProfileDataset::without_float(
    const std::string& float_id) const {
  if (index_.find(float_id) == index_.end())
    throw data_error("unknown float id: " + float_id);
  std::vector<Observation> kept;
  kept.reserve(obs_.size());
  for (const Observation& o : obs_)
    if (o.float_id != float_id) kept.push_back(o);
  return ProfileDataset(std::move(kept));
}

std::vector<Observation> ProfileDataset::float_obs(
    const std::string& float_id) const {
  auto it = index_.find(float_id);
  if (it == index_.end())
    throw data_error("unknown float id: " + float_id);
  return std::vector<Observation>(obs_.begin() + it->second.begin,
                                  obs_.begin() + it->second.end);
}

std::vector<Observation> cylinder_neighborhood(const GeoPoint& center,
                                               const ProfileDataset& data,
                                               double radius_km,
                                               double half_height_db) {
  if (!(radius_km > 0.0))
    throw std::invalid_argument("cylinder_neighborhood: radius must be > 0");
  if (half_height_db < 0.0)
    throw std::invalid_argument(
        "cylinder_neighborhood: half height must be >= 0");
  std::vector<Observation> out;
  for (const Observation& o : data.observations()) {
    if (std::abs(o.point.pres - center.pres) > half_height_db) continue;
    if (chordal_distance(center, o.point) > radius_km) continue;
    out.push_back(o);
  }
  return out;
}

}  // namespace argo
