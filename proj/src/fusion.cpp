#include "vulnmap/fusion.hpp"

#include <cmath>

#include "vulnmap/csv.hpp"
#include "vulnmap/errors.hpp"
#include "vulnmap/stats.hpp"

namespace vulnmap::fusion {

FuseResult fuse(std::span<const RadioIndicators> indicators) {
  if (indicators.size() < 50)
    throw EmptyInput("fusion needs at least 50 radios, got " +
                     std::to_string(indicators.size()));

  const auto n = static_cast<Eigen::Index>(indicators.size());
  Eigen::VectorXd eta(n), delta(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    eta[i] = indicators[static_cast<std::size_t>(i)].eta;
    delta[i] = indicators[static_cast<std::size_t>(i)].delta_s;
  }

  FuseResult res;
  res.spca = spca::spca(eta, delta);
  res.spearman_rankits = stats::spearman_rho(eta, delta);

  const Eigen::VectorXd leading = res.spca.scores.col(0);
  res.cdf = logspline::fit(leading);

  res.vs.reserve(indicators.size());
  for (Eigen::Index i = 0; i < n; ++i)
    res.vs.push_back({indicators[static_cast<std::size_t>(i)].radio_id,
                      res.cdf(leading[i])});
  return res;
}

std::vector<RadioIndicators> read_indicators_csv(const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column("radio_id");
  const std::size_t c_eta = reader.column("eta_r");
  const std::size_t c_delta = reader.column("delta_r_s");
  const std::size_t c_n = reader.column("n_households");
  std::vector<RadioIndicators> out;
  while (auto row = reader.next()) {
    const auto eta = csv::parse_double((*row)[c_eta]);
    const auto delta = csv::parse_double((*row)[c_delta]);
    const auto nh = csv::parse_int((*row)[c_n]);
    if (!eta || !delta || !nh || !std::isfinite(*eta) || !std::isfinite(*delta))
      throw MalformedRow(path.string() + ":" + std::to_string(reader.line()) +
                         ": bad indicators row");
    out.push_back({(*row)[c_id], *eta, *delta, static_cast<int>(*nh)});
  }
  return out;
}

void write_indicators_csv(const std::filesystem::path& path,
                          std::span<const RadioIndicators> indicators,
                          const std::vector<std::string>& metadata) {
  csv::Writer w(path);
  for (const auto& line : metadata) w.comment(line);
  w.row({"radio_id", "eta_r", "delta_r_s", "n_households"});
  for (const auto& r : indicators)
    w.row({r.radio_id, csv::format_double(r.eta), csv::format_double(r.delta_s),
           std::to_string(r.n_households)});
}

}  // namespace vulnmap::fusion
