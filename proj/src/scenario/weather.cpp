#include "gridscale/scenario/weather.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridscale/error.hpp"
#include "gridscale/util/rng.hpp"

namespace gridscale::scenario {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

// Stationary AR(1) with mean mu, marginal std sigma and coefficient phi.
class Ar1 {
 public:
  Ar1(double mu, double sigma, double phi, util::Rng& rng)
      : mu_(mu), sigma_(sigma), phi_(phi), x_(mu + sigma * util::standard_normal(rng)) {}

  double value() const { return x_; }
  void step(util::Rng& rng) {
    x_ = mu_ + phi_ * (x_ - mu_) + sigma_ * std::sqrt(1.0 - phi_ * phi_) * util::standard_normal(rng);
  }

 private:
  double mu_, sigma_, phi_, x_;
};

}  // namespace

WeatherConfig WeatherConfig::from_json(const util::Json& j) {
  WeatherConfig c;
  util::check_keys(j, {"latitude_deg", "wind_mean", "wind_std", "wind_phi", "temp_mean", "temp_diurnal_amp",
                       "temp_std", "temp_phi", "humidity_mean", "humidity_per_degree", "humidity_std",
                       "humidity_phi", "cut_in", "rated_speed", "cut_out"},
                   "weather config");
  util::read_opt(j, "latitude_deg", c.latitude_deg);
  util::read_opt(j, "wind_mean", c.wind_mean);
  util::read_opt(j, "wind_std", c.wind_std);
  util::read_opt(j, "wind_phi", c.wind_phi);
  util::read_opt(j, "temp_mean", c.temp_mean);
  util::read_opt(j, "temp_diurnal_amp", c.temp_diurnal_amp);
  util::read_opt(j, "temp_std", c.temp_std);
  util::read_opt(j, "temp_phi", c.temp_phi);
  util::read_opt(j, "humidity_mean", c.humidity_mean);
  util::read_opt(j, "humidity_per_degree", c.humidity_per_degree);
  util::read_opt(j, "humidity_std", c.humidity_std);
  util::read_opt(j, "humidity_phi", c.humidity_phi);
  util::read_opt(j, "cut_in", c.cut_in);
  util::read_opt(j, "rated_speed", c.rated_speed);
  util::read_opt(j, "cut_out", c.cut_out);
  if (!(c.cut_in < c.rated_speed && c.rated_speed <= c.cut_out)) {
    throw InvariantError("cut_in < rated_speed <= cut_out", "wind power curve");
  }
  for (double phi : {c.wind_phi, c.temp_phi, c.humidity_phi}) {
    if (!(phi >= 0 && phi < 1)) throw InvariantError("0 <= phi < 1", std::to_string(phi));
  }
  return c;
}

util::Json WeatherConfig::to_json() const {
  return {{"latitude_deg", latitude_deg},   {"wind_mean", wind_mean},
          {"wind_std", wind_std},           {"wind_phi", wind_phi},
          {"temp_mean", temp_mean},         {"temp_diurnal_amp", temp_diurnal_amp},
          {"temp_std", temp_std},           {"temp_phi", temp_phi},
          {"humidity_mean", humidity_mean}, {"humidity_per_degree", humidity_per_degree},
          {"humidity_std", humidity_std},   {"humidity_phi", humidity_phi},
          {"cut_in", cut_in},               {"rated_speed", rated_speed},
          {"cut_out", cut_out}};
}

util::Json to_json(const WeatherSeries& w) {
  return {{"start_minute", w.start_minute},
          {"solar_zenith_angle", w.solar_zenith_angle},
          {"wind_speed", w.wind_speed},
          {"humidity", w.humidity},
          {"temperature", w.temperature}};
}

WeatherSeries weather_from_json(const util::Json& j) {
  WeatherSeries w;
  w.start_minute = j.at("start_minute").get<double>();
  w.solar_zenith_angle = j.at("solar_zenith_angle").get<std::vector<double>>();
  w.wind_speed = j.at("wind_speed").get<std::vector<double>>();
  w.humidity = j.at("humidity").get<std::vector<double>>();
  w.temperature = j.at("temperature").get<std::vector<double>>();
  const auto n = w.wind_speed.size();
  if (w.solar_zenith_angle.size() != n || w.humidity.size() != n || w.temperature.size() != n) {
    throw InvariantError("weather series share one horizon", "length mismatch");
  }
  return w;
}

double solar_zenith_deg(double minute_since_epoch, double latitude_deg) {
  const double day = std::floor(minute_since_epoch / 1440.0);
  const double day_of_year = std::fmod(day, 365.0) + 1.0;
  const double hour = std::fmod(minute_since_epoch, 1440.0) / 60.0;
  const double declination = 23.44 * deg * std::sin(2.0 * std::numbers::pi * (284.0 + day_of_year) / 365.0);
  const double hour_angle = 15.0 * deg * (hour - 12.0);
  const double lat = latitude_deg * deg;
  double cos_z = std::sin(lat) * std::sin(declination) + std::cos(lat) * std::cos(declination) * std::cos(hour_angle);
  return std::acos(std::clamp(cos_z, -1.0, 1.0)) / deg;
}

WeatherSeries synthesize_weather(std::uint64_t seed, std::uint64_t scenario_id, double start_minute,
                                 std::size_t horizon, const WeatherConfig& config) {
  auto rng = util::make_rng(seed, {scenario_id, 0x77656174686572ULL});
  Ar1 wind(config.wind_mean, config.wind_std, config.wind_phi, rng);
  Ar1 temp(0.0, config.temp_std, config.temp_phi, rng);
  Ar1 humid(0.0, config.humidity_std, config.humidity_phi, rng);

  WeatherSeries w;
  w.start_minute = start_minute;
  for (std::size_t k = 0; k < horizon; ++k) {
    if (k > 0) {
      wind.step(rng);
      temp.step(rng);
      humid.step(rng);
    }
    const double minute = start_minute + static_cast<double>(k);
    const double hour = std::fmod(minute, 1440.0) / 60.0;
    const double t = config.temp_mean +
                     config.temp_diurnal_amp * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0) +
                     temp.value();
    const double h = config.humidity_mean + config.humidity_per_degree * (t - config.temp_mean) + humid.value();
    w.solar_zenith_angle.push_back(solar_zenith_deg(minute, config.latitude_deg));
    w.wind_speed.push_back(std::max(0.0, wind.value()));
    w.temperature.push_back(t);
    w.humidity.push_back(std::clamp(h, 0.0, 100.0));
  }
  return w;
}

double wind_power(double speed, double p_max, const WeatherConfig& config) {
  if (speed < config.cut_in || speed >= config.cut_out) return 0.0;
  if (speed >= config.rated_speed) return p_max;
  const double a = config.cut_in * config.cut_in * config.cut_in;
  const double b = config.rated_speed * config.rated_speed * config.rated_speed;
  return p_max * (speed * speed * speed - a) / (b - a);
}

double solar_power(double zenith_deg, double p_max) { return p_max * std::max(0.0, std::cos(zenith_deg * deg)); }

std::vector<double> renewable_from_weather(const WeatherSeries& weather, const grid::Generator& unit,
                                           const WeatherConfig& config) {
  std::vector<double> out;
  out.reserve(weather.horizon());
  if (unit.kind == grid::GeneratorKind::wind) {
    for (double v : weather.wind_speed) out.push_back(wind_power(v, unit.p_max, config));
  } else if (unit.kind == grid::GeneratorKind::solar) {
    for (double z : weather.solar_zenith_angle) out.push_back(solar_power(z, unit.p_max));
  } else {
    throw Error("renewable_from_weather needs a wind or solar unit");
  }
  return out;
}

}  // namespace gridscale::scenario
