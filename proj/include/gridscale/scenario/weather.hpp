#pragma once

#include <cstdint>
#include <vector>

#include "gridscale/grid/case.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::scenario {

struct WeatherConfig {
  double latitude_deg = 35.0;
  double wind_mean = 8.0;        ///< m/s, stationary mean of the AR(1) process
  double wind_std = 3.0;         ///< m/s, stationary standard deviation
  double wind_phi = 0.98;        ///< per-minute autocorrelation
  double temp_mean = 15.0;       ///< deg C
  double temp_diurnal_amp = 6.0; ///< deg C, peak near 15:00
  double temp_std = 1.5;         ///< deg C, anomaly standard deviation
  double temp_phi = 0.995;
  double humidity_mean = 60.0;   ///< %
  double humidity_per_degree = -2.0;
  double humidity_std = 5.0;
  double humidity_phi = 0.99;
  // Wind turbine power curve.
  double cut_in = 3.0;
  double rated_speed = 12.0;
  double cut_out = 25.0;

  static WeatherConfig from_json(const util::Json& j);
  util::Json to_json() const;
  bool operator==(const WeatherConfig&) const = default;
};

struct WeatherSeries {
  double start_minute = 0;  ///< minutes since the start of day 0
  std::vector<double> solar_zenith_angle;  ///< deg
  std::vector<double> wind_speed;          ///< m/s
  std::vector<double> humidity;            ///< %
  std::vector<double> temperature;         ///< deg C

  std::size_t horizon() const { return wind_speed.size(); }
  bool operator==(const WeatherSeries&) const = default;
};

util::Json to_json(const WeatherSeries& w);
WeatherSeries weather_from_json(const util::Json& j);

/// Solar zenith angle (deg) from declination and hour angle at local solar
/// time; day 0 is January 1.
double solar_zenith_deg(double minute_since_epoch, double latitude_deg);

/// Minute-level weather starting at `start_minute`. Wind, temperature anomaly
/// and humidity are AR(1) processes started from their stationary
/// distributions with a seed derived from (seed, scenario_id).
WeatherSeries synthesize_weather(std::uint64_t seed, std::uint64_t scenario_id, double start_minute,
                                 std::size_t horizon, const WeatherConfig& config);

/// Wind: 0 below cut-in and at or above cut-out, cubic between cut-in and
/// rated, nameplate up to cut-out. Solar: nameplate * max(0, cos zenith).
double wind_power(double speed, double p_max, const WeatherConfig& config);
double solar_power(double zenith_deg, double p_max);

/// Available power per minute for one unit. Throws for non-renewable units.
std::vector<double> renewable_from_weather(const WeatherSeries& weather, const grid::Generator& unit,
                                           const WeatherConfig& config);

}  // namespace gridscale::scenario
