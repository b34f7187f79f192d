#include "raca/channel.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "raca/system.hpp"

namespace raca {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

double path_loss_db(double distance_m, double fc_ghz, PathLossModel model) {
  if (!(distance_m >= 1.0))
    throw std::invalid_argument("path_loss_db: model invalid below 1 m");
  if (!(fc_ghz > 0.0))
    throw std::invalid_argument("path_loss_db: carrier frequency must be positive");
  const double ld = std::log10(distance_m);
  const double lf = std::log10(fc_ghz);
  const double los = 32.4 + 17.3 * ld + 20.0 * lf;
  if (model == PathLossModel::inh_los) return los;
  const double nlos = 17.3 + 38.3 * ld + 24.9 * lf;
  return std::max(los, nlos);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
  state_ = mix64(seed + kGolden * (stream + 1));
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

Complex RngStream::cnormal() {
  const double re = normal();
  const double im = normal();
  return Complex(re * M_SQRT1_2, im * M_SQRT1_2);
}

CMatrix rayleigh_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.cnormal();
  return m;
}

namespace {

CMatrix draw_link(Eigen::Index rows, Eigen::Index cols, double dist_m,
                  double fc_ghz, PathLossModel model, std::uint64_t seed,
                  std::uint64_t stream) {
  RngStream rng(seed, stream);
  const double pl_db = path_loss_db(dist_m, fc_ghz, model);
  const double amp = std::sqrt(std::pow(10.0, -pl_db / 10.0));
  return amp * rayleigh_matrix(rows, cols, rng);
}

}  // namespace

ChannelSet generate_channels(const SystemConfig& c, std::uint64_t seed) {
  c.validate();
  const auto& g = c.geometry;
  ChannelSet ch;
  ch.seed = seed;
  ch.h_ua_fl = draw_link(c.n_ap, c.n_ue, g.d_ua_m, c.f_low_ghz, c.path_loss, seed, 0);
  ch.h_ur_fh = draw_link(c.n_relay, c.n_ue, g.d_ur_m, c.f_high_ghz, c.path_loss, seed, 1);
  ch.h_ra_fl = draw_link(c.n_ap, c.n_relay, g.d_ra_m, c.f_low_ghz, c.path_loss, seed, 2);
  ch.h_ua_fh = draw_link(c.n_ap, c.n_ue, g.d_ua_m, c.f_high_ghz, c.path_loss, seed, 3);
  ch.h_ur_fl = draw_link(c.n_relay, c.n_ue, g.d_ur_m, c.f_low_ghz, c.path_loss, seed, 4);
  return ch;
}

namespace {

using nlohmann::json;

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& rows, const char* name) {
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument(std::string("channel json: bad matrix ") + name);
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index nc = static_cast<Eigen::Index>(rows[0].size());
  CMatrix m(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    const json& row = rows[i];
    if (static_cast<Eigen::Index>(row.size()) != nc)
      throw std::invalid_argument(std::string("channel json: ragged matrix ") + name);
    for (Eigen::Index j = 0; j < nc; ++j)
      m(i, j) = Complex(row[j][0].get<double>(), row[j][1].get<double>());
  }
  require_finite(m, name);
  return m;
}

}  // namespace

std::string channelset_to_json(const ChannelSet& ch) {
  json j;
  j["seed"] = ch.seed;
  j["h_ua_fl"] = matrix_to_json(ch.h_ua_fl);
  j["h_ur_fh"] = matrix_to_json(ch.h_ur_fh);
  j["h_ra_fl"] = matrix_to_json(ch.h_ra_fl);
  j["h_ua_fh"] = matrix_to_json(ch.h_ua_fh);
  j["h_ur_fl"] = matrix_to_json(ch.h_ur_fl);
  return j.dump();
}

ChannelSet channelset_from_json(const std::string& text) {
  const json j = json::parse(text);
  ChannelSet ch;
  ch.seed = j.value("seed", std::uint64_t{0});
  ch.h_ua_fl = matrix_from_json(j.at("h_ua_fl"), "h_ua_fl");
  ch.h_ur_fh = matrix_from_json(j.at("h_ur_fh"), "h_ur_fh");
  ch.h_ra_fl = matrix_from_json(j.at("h_ra_fl"), "h_ra_fl");
  ch.h_ua_fh = matrix_from_json(j.at("h_ua_fh"), "h_ua_fh");
  ch.h_ur_fl = matrix_from_json(j.at("h_ur_fl"), "h_ur_fl");
  return ch;
}

}  // namespace raca
